//! W-class constructions: the multi-step recurrence factor, W-Kronecker
//! states, bipartite canonical Kronecker states and GL₂-side Φ-states.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{KronError, Result};
use crate::numeric::{Rational, SurdSum};
use crate::partitions::{
    factorial, in_w_polytope, PartitionTuple, TwoRowPartition, YamanouchiPath,
};
use crate::vector::{strides_for, tables_for, SparseKronVector};

/// Numerator of the recurrence factor at step `j`, with `lams` the partial
/// second-row lengths after the step and `qs` the step bits.
pub fn step_numerator(j: usize, lams: &[usize], qs: &[u8]) -> i64 {
    let j = j as i64;
    let mut s = 0i64;
    for (&l, &q) in lams.iter().zip(qs) {
        let l = l as i64;
        s += if q == 1 { j - l + 1 } else { l };
    }
    j - s
}

/// `j − 2λ + 2q`, the squared-denominator factor of one part at step `j`.
pub fn step_denominator(j: usize, lam: usize, q: u8) -> u64 {
    (j + 2 * q as usize - 2 * lam) as u64
}

/// Partial tuple `lams` at size `j` inside the W polytope.
pub fn partial_in_w(j: usize, lams: &[usize]) -> bool {
    let sum: usize = lams.iter().sum();
    sum <= j && lams.iter().all(|&l| 2 * l <= sum)
}

/// Recurrence factor `F = num / ∏ᵢ √(j − 2λⁱ + 2qⁱ)` for the partial tuple
/// after step `j`.
pub fn recurrence_factor(lam_after: &PartitionTuple, q_step: &[u8], j: usize) -> Result<SurdSum> {
    if j < 2 {
        return Err(KronError::Input("recurrence steps start at j = 2".into()));
    }
    if lam_after.n != j {
        return Err(KronError::Input(format!(
            "partial tuple has size {}, expected {j}",
            lam_after.n
        )));
    }
    if q_step.len() != lam_after.len() {
        return Err(KronError::Input(
            "step bits and tuple differ in length".into(),
        ));
    }
    for (&l, &q) in lam_after.parts.iter().zip(q_step) {
        let q = q as usize;
        if q > 1 || l < q || 2 * l > j || 2 * (l - q) > j - 1 {
            return Err(KronError::Input(format!(
                "step bit {q} inconsistent with partial lam {l} at size {j}"
            )));
        }
    }
    let num = step_numerator(j, &lam_after.parts, q_step);
    if num == 0 {
        return Ok(SurdSum::zero());
    }
    let den: u64 = lam_after
        .parts
        .iter()
        .zip(q_step)
        .map(|(&l, &q)| step_denominator(j, l, q))
        .product();
    let inv = SurdSum::sqrt_of(&Rational::new(BigInt::one(), BigInt::from(den)))?;
    Ok(inv.scale(&Rational::from_integer(BigInt::from(num))))
}

/// `(numerator, D)` of the multi-path product with polytope pruning;
/// `None` when the product vanishes.
fn multi_path_product(t: &PartitionTuple, paths: &[YamanouchiPath]) -> Option<(BigInt, BigInt)> {
    let n = t.n;
    let mut lams = vec![0usize; t.len()];
    let mut qs = vec![0u8; t.len()];
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 0..n {
        let j = k + 1;
        for (i, q) in paths.iter().enumerate() {
            qs[i] = q.bit(k);
            lams[i] += qs[i] as usize;
        }
        if !partial_in_w(j, &lams) {
            return None;
        }
        if j >= 2 {
            let s = step_numerator(j, &lams, &qs);
            if s == 0 {
                return None;
            }
            num *= s;
            for i in 0..lams.len() {
                den *= step_denominator(j, lams[i], qs[i]);
            }
        }
    }
    Some((num, den))
}

/// Unnormalized W-Kronecker coefficient `K̂ = ∏_{j≥2} F_j` along a multi-path.
pub fn w_kron_coefficient(t: &PartitionTuple, q: &[YamanouchiPath]) -> Result<SurdSum> {
    check_paths(t, q)?;
    Ok(match multi_path_product(t, q) {
        None => SurdSum::zero(),
        Some((num, den)) => {
            let inv = SurdSum::sqrt_of(&Rational::new(BigInt::one(), den))?;
            inv.scale(&Rational::from_integer(num))
        }
    })
}

/// The same product without polytope pruning (zero factors still vanish).
pub fn w_kron_coefficient_unpruned(t: &PartitionTuple, q: &[YamanouchiPath]) -> Result<SurdSum> {
    check_paths(t, q)?;
    let mut lams = vec![0usize; t.len()];
    let mut qs = vec![0u8; t.len()];
    let mut acc = SurdSum::one();
    for k in 1..t.n {
        for (i, p) in q.iter().enumerate() {
            qs[i] = p.bit(k);
        }
        for (i, p) in q.iter().enumerate() {
            lams[i] = (0..=k).filter(|&m| p.bit(m) == 1).count();
        }
        let partial = PartitionTuple {
            n: k + 1,
            parts: lams.clone(),
        };
        acc *= &recurrence_factor(&partial, &qs, k + 1)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

fn check_paths(t: &PartitionTuple, q: &[YamanouchiPath]) -> Result<()> {
    if q.len() != t.len() {
        return Err(KronError::Input(format!(
            "{} paths for a {}-part tuple",
            q.len(),
            t.len()
        )));
    }
    for (i, p) in q.iter().enumerate() {
        if p.len() != t.n || p.lam() != t.parts[i] {
            return Err(KronError::Input(format!(
                "path {p} does not belong to part {}",
                t.part(i)
            )));
        }
    }
    Ok(())
}

/// `comp[k][o]`: number of Yamanouchi completions from a prefix of length `k`
/// with `o` ones to the full partition.
pub(crate) fn completion_counts(p: TwoRowPartition) -> Vec<Vec<u64>> {
    let n = p.n;
    let mut comp = vec![vec![0u64; p.lam + 2]; n + 1];
    comp[n][p.lam] = 1;
    for k in (0..n).rev() {
        for o in 0..=p.lam.min(k / 2) {
            let mut c = comp[k + 1][o];
            if o < p.lam && 2 * (o + 1) <= k + 1 {
                c += comp[k + 1][o + 1];
            }
            comp[k][o] = c;
        }
    }
    comp
}

/// Accumulator that stays in `i128` until it would overflow.
#[derive(Clone)]
enum Acc {
    Small(i128),
    Big(BigInt),
}

impl Acc {
    fn mul(&self, k: i64) -> Acc {
        match self {
            Acc::Small(v) => match v.checked_mul(k as i128) {
                Some(x) => Acc::Small(x),
                None => Acc::Big(BigInt::from(*v) * k),
            },
            Acc::Big(b) => Acc::Big(b * k),
        }
    }

    fn into_big(self) -> BigInt {
        match self {
            Acc::Small(v) => BigInt::from(v),
            Acc::Big(b) => b,
        }
    }
}

/// Depth-first enumeration of all multi-paths of `t` with nonzero
/// recurrence product. Yields `(key, numerator product)`.
fn enumerate_w(t: &PartitionTuple) -> Result<Vec<(u64, BigInt)>> {
    let tables = tables_for(t);
    let strides = strides_for(&tables)?;
    let comps: Vec<Vec<Vec<u64>>> = t.partitions().map(completion_counts).collect();
    let n = t.n;
    let parts = t.len();

    #[derive(Clone)]
    struct Node {
        k: usize,
        lams: Vec<usize>,
        ranks: Vec<u64>,
        acc: Acc,
    }

    let children = |node: &Node, out: &mut Vec<Node>| {
        let k = node.k;
        let j = k + 1;
        let mut qs = vec![0u8; parts];
        for mask in 0u32..(1 << parts) {
            let mut ok = true;
            let mut lams = node.lams.clone();
            let mut ranks = node.ranks.clone();
            for i in 0..parts {
                let q = ((mask >> i) & 1) as u8;
                qs[i] = q;
                let o = node.lams[i];
                if q == 1 {
                    if o + 1 > t.parts[i] || 2 * (o + 1) > j {
                        ok = false;
                        break;
                    }
                    // paths taking 0 here come first
                    ranks[i] += comps[i][j][o];
                    lams[i] = o + 1;
                }
                if comps[i][j][lams[i]] == 0 {
                    ok = false;
                    break;
                }
            }
            if !ok || !partial_in_w(j, &lams) {
                continue;
            }
            let acc = if j >= 2 {
                let s = step_numerator(j, &lams, &qs);
                if s == 0 {
                    continue;
                }
                node.acc.mul(s)
            } else {
                node.acc.clone()
            };
            out.push(Node {
                k: j,
                lams,
                ranks,
                acc,
            });
        }
    };

    let root = Node {
        k: 0,
        lams: vec![0; parts],
        ranks: vec![0; parts],
        acc: Acc::Small(1),
    };
    // breadth-first to a modest frontier, then parallel depth-first
    let mut frontier = vec![root];
    while frontier.len() < 64 && frontier.first().is_some_and(|f| f.k < n) {
        let mut next = Vec::new();
        for node in &frontier {
            children(node, &mut next);
        }
        frontier = next;
    }
    let leaves: Vec<Vec<(u64, BigInt)>> = frontier
        .into_par_iter()
        .map(|start| {
            let mut out = Vec::new();
            let mut stack = vec![start];
            let mut buf = Vec::new();
            while let Some(node) = stack.pop() {
                if node.k == n {
                    let key: u64 = node.ranks.iter().zip(&strides).map(|(r, s)| r * s).sum();
                    out.push((key, node.acc.into_big()));
                    continue;
                }
                buf.clear();
                children(&node, &mut buf);
                stack.extend(buf.drain(..).rev());
            }
            out
        })
        .collect();
    Ok(leaves.into_iter().flatten().collect())
}

/// Normalized W-Kronecker state with the sign convention applied.
pub fn w_kron_state(t: &PartitionTuple) -> Result<SparseKronVector> {
    if t.len() < 2 {
        return Err(KronError::Input(
            "W-Kronecker states need at least two parts".into(),
        ));
    }
    if !in_w_polytope(t) {
        return Err(KronError::OutsidePolytope(t.to_string()));
    }
    unnormalized_w_state(t)?.normalized()
}

/// W-Kronecker state in weighted coordinates before normalization: the
/// integer part of each entry is the product of recurrence numerators.
pub fn unnormalized_w_state(t: &PartitionTuple) -> Result<SparseKronVector> {
    let entries = enumerate_w(t)?;
    SparseKronVector::from_weighted(t.clone(), SurdSum::one(), entries)
}

/// `(1/√f) Σ_q |q⟩|q⟩`.
pub fn bipartite_kron_state(p: TwoRowPartition) -> Result<SparseKronVector> {
    let t = PartitionTuple {
        n: p.n,
        parts: vec![p.lam, p.lam],
    };
    let tables = tables_for(&t);
    let f = tables[0].len() as u64;
    // coefficient 1/√f = y/√(D·D) with y = D
    let entries = tables[0]
        .weights
        .iter()
        .enumerate()
        .map(|(i, w)| (i as u64 * f + i as u64, BigInt::from(w.clone())));
    let mut v = SparseKronVector::from_weighted(t, SurdSum::one(), entries)?.normalized()?;
    v.mark_normalized(true);
    Ok(v)
}

/// `A_{λ,ω} = (n − λ − ω)!/(ω − λ)!`, zero outside `λ ≤ ω ≤ n − λ`.
pub fn a_factor(lam: usize, omega: usize, n: usize) -> Rational {
    if omega < lam || omega + lam > n {
        return Rational::zero();
    }
    Rational::new(factorial(n - lam - omega), factorial(omega - lam))
}

/// Normal-form weights `c⁰, c¹, …, cᴺ` of a W-class state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WCoefficients {
    pub c: Vec<Rational>,
}

impl WCoefficients {
    pub fn new(c: Vec<Rational>) -> Result<Self> {
        if c.len() < 2 {
            return Err(KronError::Input("need c⁰ and at least one cⁱ".into()));
        }
        if c.iter().any(|x| x.is_negative()) {
            return Err(KronError::Input(
                "W coefficients must be nonnegative".into(),
            ));
        }
        let total: Rational = c.iter().cloned().sum();
        if !total.is_one() {
            return Err(KronError::Input(format!(
                "W coefficients sum to {total}, not 1"
            )));
        }
        Ok(WCoefficients { c })
    }

    /// `c⁰ = 0`, `cⁱ = 1/N`: the W state itself.
    pub fn uniform(parties: usize) -> Self {
        let mut c = vec![Rational::zero()];
        c.extend((0..parties).map(|_| Rational::new(BigInt::one(), BigInt::from(parties))));
        WCoefficients { c }
    }

    pub fn parties(&self) -> usize {
        self.c.len() - 1
    }
}

/// Unnormalized Φ-state coefficients keyed by the weight tuple `ω`.
pub fn phi_state(t: &PartitionTuple, c: &WCoefficients) -> Result<BTreeMap<Vec<usize>, SurdSum>> {
    let parties = t.len();
    if c.parties() != parties {
        return Err(KronError::Input(format!(
            "{} coefficients for {parties} parts",
            c.parties()
        )));
    }
    let n = t.n;
    let nf = Rational::from_integer(factorial(n));
    // n!^{−(N−2)} as a rational
    let pref = pow_signed(&nf, -(parties as i64 - 2));
    let mut out = BTreeMap::new();
    let mut omega = vec![0usize; parties];
    fn rec(
        i: usize,
        sum: usize,
        t: &PartitionTuple,
        omega: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize], usize),
    ) {
        if i == t.len() {
            emit(omega, sum);
            return;
        }
        let lam = t.parts[i];
        for w in lam..=(t.n - lam) {
            if sum + w > t.n {
                break;
            }
            omega[i] = w;
            rec(i + 1, sum + w, t, omega, emit);
        }
    }
    let mut failure = None;
    rec(0, 0, t, &mut omega, &mut |om: &[usize], sum: usize| {
        let w0 = n - sum;
        let mut sq = pref.clone();
        sq *= pow_signed(&c.c[0], w0 as i64);
        let f0 = Rational::from_integer(factorial(w0));
        sq /= &f0 * &f0;
        for (i, &w) in om.iter().enumerate() {
            sq *= pow_signed(&c.c[i + 1], w as i64);
            sq *= a_factor(t.parts[i], w, n);
        }
        if sq.is_zero() {
            return;
        }
        match SurdSum::sqrt_of(&sq) {
            Ok(v) => {
                out.insert(om.to_vec(), v);
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(out)
}

/// Rescales a Φ-state to unit norm.
pub fn normalize_phi(phi: &BTreeMap<Vec<usize>, SurdSum>) -> Result<BTreeMap<Vec<usize>, SurdSum>> {
    let norm_sq: SurdSum = phi.values().map(|v| v.square()).sum();
    let norm_sq = norm_sq
        .as_rational()
        .ok_or_else(|| KronError::IrrationalNorm(norm_sq.clone()))?;
    if norm_sq.is_zero() {
        return Err(KronError::Domain("zero Φ-state".into()));
    }
    let inv = SurdSum::sqrt_of(&norm_sq.recip())?;
    Ok(phi.iter().map(|(k, v)| (k.clone(), v * &inv)).collect())
}

fn pow_signed(x: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}
