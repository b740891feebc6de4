//! Brute-force checks for small cases: the projector onto the invariant
//! subspace, Young-Yamanouchi matrices, reduced densities, invariance and
//! span comparison.
//!
//! Group actions are applied in weighted coordinates, where the generator
//! `s_j` acts on one part by `S = W^{1/2} O W^{-1/2}` with `O` the orthogonal
//! Young form and `W = diag(D(q))`. `S` is rational, so everything here is
//! integer arithmetic with explicit denominators.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{KronError, Result};
use crate::numeric::{Rational, SurdSum};
use crate::partitions::{
    kron_coeff_general, path_table, PartitionTuple, TwoRowPartition, YamanouchiPath,
};
use crate::schur::{IrrepMatrix, Permutation, SurdMatrix};
use crate::subspace::gram_schmidt;
use crate::vector::SparseKronVector;

/// Default bound on the side of a dense projector.
pub const PROJECTOR_CAP: usize = 2000;
/// Largest `n` for which a projector is built.
pub const PROJECTOR_MAX_N: usize = 8;

/// Contents `col − row` of the boxes along a path.
fn contents(q: &YamanouchiPath) -> Vec<i64> {
    let (mut r1, mut r2) = (0i64, 0i64);
    q.bits()
        .into_iter()
        .map(|b| {
            if b == 0 {
                r1 += 1;
                r1 - 1
            } else {
                r2 += 1;
                r2 - 2
            }
        })
        .collect()
}

fn swapped(q: &YamanouchiPath, i: usize) -> Option<YamanouchiPath> {
    let mut b = q.bits();
    if b[i] == b[i + 1] {
        return None;
    }
    b.swap(i, i + 1);
    YamanouchiPath::from_bits(&b).ok()
}

/// Orthogonal Young form of the transposition `(i, i+1)`, `1 ≤ i < n`.
pub fn yy_transposition_matrix(p: TwoRowPartition, i: usize) -> Result<IrrepMatrix> {
    if i == 0 || i >= p.n {
        return Err(KronError::Input(format!(
            "transposition index {i} out of range for n = {}",
            p.n
        )));
    }
    let tab = path_table(p);
    let f = tab.len();
    let mut entries: SurdMatrix = vec![vec![SurdSum::zero(); f]; f];
    for (col, q) in tab.paths.iter().enumerate() {
        let c = contents(q);
        let rho = c[i] - c[i - 1];
        entries[col][col] = SurdSum::from_rational(Rational::new(BigInt::one(), BigInt::from(rho)));
        if let Some(q2) = swapped(q, i - 1) {
            let row = tab.index_of(&q2).expect("swapped path in table");
            let off = Rational::new(BigInt::from(rho * rho - 1), BigInt::from(rho * rho));
            entries[row][col] = SurdSum::sqrt_of(&off)?;
        }
    }
    Ok(IrrepMatrix {
        partition: p,
        permutation: Permutation::adjacent(p.n, i - 1),
        entries,
    })
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    if n.is_negative() {
        return None;
    }
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Integer matrix `num / den` stored as triplets `(row, col, value)`.
#[derive(Clone, Debug)]
struct IntMat {
    den: BigInt,
    by_col: Vec<Vec<(usize, BigInt)>>,
    by_row: Vec<Vec<(usize, BigInt)>>,
}

/// Weighted generator `S = W^{1/2} O W^{-1/2}` for `(i, i+1)` on one part.
fn weighted_generator(p: TwoRowPartition, i: usize) -> Result<IntMat> {
    let tab = path_table(p);
    let f = tab.len();
    let mut trip: Vec<(usize, usize, Rational)> = Vec::new();
    for (col, q) in tab.paths.iter().enumerate() {
        let c = contents(q);
        let rho = c[i] - c[i - 1];
        trip.push((col, col, Rational::new(BigInt::one(), BigInt::from(rho))));
        if let Some(q2) = swapped(q, i - 1) {
            let row = tab.index_of(&q2).expect("swapped path in table");
            let ratio = Rational::new(
                BigInt::from(tab.weights[row].clone()),
                BigInt::from(tab.weights[col].clone()),
            );
            let sq = Rational::new(BigInt::from(rho * rho - 1), BigInt::from(rho * rho)) * ratio;
            let v = rational_sqrt(&sq).ok_or_else(|| {
                KronError::Verification(format!("weighted generator entry √({sq}) is irrational"))
            })?;
            trip.push((row, col, v));
        }
    }
    let den = trip
        .iter()
        .fold(BigInt::one(), |acc, (_, _, v)| acc.lcm(v.denom()));
    let mut by_col = vec![Vec::new(); f];
    let mut by_row = vec![Vec::new(); f];
    for (r, c, v) in trip {
        let num = (v * Rational::from_integer(den.clone())).to_integer();
        by_col[c].push((r, num.clone()));
        by_row[r].push((c, num));
    }
    Ok(IntMat {
        den,
        by_col,
        by_row,
    })
}

/// Diagonal action of the adjacent transpositions on a tuple.
struct Action {
    dims: Vec<usize>,
    strides: Vec<usize>,
    /// `gens[j][part]` for the transposition `(j+1, j+2)`.
    gens: Vec<Vec<IntMat>>,
    weights: Vec<BigInt>,
}

impl Action {
    fn new(t: &PartitionTuple) -> Result<Self> {
        let n = t.n;
        let parts: Vec<TwoRowPartition> = t.partitions().collect();
        let dims: Vec<usize> = parts.iter().map(|&p| path_table(p).len()).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let gens = (1..n)
            .map(|i| {
                parts
                    .iter()
                    .map(|&p| weighted_generator(p, i))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut weights = vec![BigInt::one()];
        for &p in &parts {
            let tab = path_table(p);
            weights = weights
                .iter()
                .flat_map(|a| tab.weights.iter().map(move |w| a * BigInt::from(w.clone())))
                .collect();
        }
        Ok(Action {
            dims,
            strides,
            gens,
            weights,
        })
    }

    fn side(&self) -> usize {
        self.dims.iter().product()
    }

    /// `x ↦ x·(⊗ S_j)` on a dense row vector; returns the new numerators,
    /// the denominator grows by `∏ den`.
    fn right_mul(&self, x: &[BigInt], j: usize) -> (Vec<BigInt>, BigInt) {
        let mut cur = x.to_vec();
        let mut den = BigInt::one();
        for (leg, m) in self.gens[j].iter().enumerate() {
            let (f, st) = (self.dims[leg], self.strides[leg]);
            let mut out = vec![BigInt::zero(); cur.len()];
            for base in 0..cur.len() {
                if (base / st) % f != 0 {
                    continue;
                }
                for (p, row) in m.by_row.iter().enumerate() {
                    let xp = &cur[base + p * st];
                    if xp.is_zero() {
                        continue;
                    }
                    for (q, s) in row {
                        out[base + q * st] += xp * s;
                    }
                }
            }
            cur = out;
            den *= &m.den;
        }
        (cur, den)
    }

    /// `y ↦ (⊗ S_j)·y` on a sparse vector keyed by dense index.
    fn left_mul_sparse(
        &self,
        y: &BTreeMap<usize, BigInt>,
        j: usize,
    ) -> (BTreeMap<usize, BigInt>, BigInt) {
        let mut cur = y.clone();
        let mut den = BigInt::one();
        for (leg, m) in self.gens[j].iter().enumerate() {
            let (f, st) = (self.dims[leg], self.strides[leg]);
            let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (&k, v) in &cur {
                let q = (k / st) % f;
                for (p, s) in &m.by_col[q] {
                    *out.entry(k + p * st - q * st).or_insert_with(BigInt::zero) += v * s;
                }
            }
            out.retain(|_, v| !v.is_zero());
            cur = out;
            den *= &m.den;
        }
        (cur, den)
    }

    /// Row `r` of the weighted projector as `(numerators, denominator)`.
    fn projector_row(&self, n: usize, r: usize) -> (Vec<BigInt>, BigInt) {
        let mut x = vec![BigInt::zero(); self.side()];
        x[r] = BigInt::one();
        let mut den = BigInt::one();
        // P_n = A_2 A_3 ⋯ A_n with A_k = (1/k) Σ_i s_{k−1} s_{k−2} ⋯ s_i
        for k in 2..=n {
            let mut t = x.clone();
            let mut acc = x;
            for j in (0..k - 1).rev() {
                let (next, d) = self.right_mul(&t, j);
                t = next;
                for a in acc.iter_mut() {
                    *a *= &d;
                }
                for (a, b) in acc.iter_mut().zip(&t) {
                    *a += b;
                }
                den *= d;
            }
            den *= BigInt::from(k);
            let g = acc.iter().fold(den.clone(), |g, a| g.gcd(a));
            if !g.is_one() {
                for a in acc.iter_mut() {
                    *a /= &g;
                }
                den /= &g;
            }
            x = acc;
        }
        (x, den)
    }
}

/// Dense projector onto the invariant subspace in orthonormal coordinates.
#[derive(Clone, Debug)]
pub struct ProjectorMatrix {
    pub tuple: PartitionTuple,
    pub entries: Vec<Vec<SurdSum>>,
    /// Rows of `W^{1/2} P W^{-1/2}`.
    weighted: Vec<Vec<Rational>>,
    weights: Vec<BigInt>,
}

impl ProjectorMatrix {
    /// Rows of `W^{1/2} P W^{-1/2}`, all rational.
    pub fn weighted(&self) -> &[Vec<Rational>] {
        &self.weighted
    }

    /// Path weight products `w_r` of the dense positions.
    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn side(&self) -> usize {
        self.entries.len()
    }

    /// Exact trace.
    pub fn trace(&self) -> Rational {
        (0..self.side()).map(|i| self.weighted[i][i].clone()).sum()
    }

    /// `P² = P`, checked on the weighted form.
    pub fn is_idempotent(&self) -> bool {
        let n = self.side();
        (0..n).into_par_iter().all(|i| {
            (0..n).all(|j| {
                let v: Rational = (0..n)
                    .filter(|&k| !self.weighted[i][k].is_zero())
                    .map(|k| &self.weighted[i][k] * &self.weighted[k][j])
                    .sum();
                v == self.weighted[i][j]
            })
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.side();
        (0..n).all(|i| (i + 1..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// `P·v = v` for a vector over the same tuple.
    pub fn fixes(&self, v: &SparseKronVector) -> Result<bool> {
        if v.tuple() != &self.tuple {
            return Err(KronError::Input("tuple mismatch".into()));
        }
        let mut y = vec![Rational::zero(); self.side()];
        for (&k, val) in v.keys().iter().zip(v.weighted_values()) {
            y[k as usize] = Rational::from_integer(val.clone());
        }
        Ok((0..self.side()).into_par_iter().all(|r| {
            let s: Rational = self.weighted[r]
                .iter()
                .zip(&y)
                .filter(|(_, b)| !b.is_zero())
                .map(|(a, b)| a * b)
                .sum();
            s == y[r]
        }))
    }

    /// Column `c` of the weighted projector as a weighted-coordinate vector.
    pub fn column(&self, c: usize) -> Result<SparseKronVector> {
        // P symmetric: P'[r][c] = (w_r / w_c)·P'[c][r]
        let row = &self.weighted[c];
        let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let entries = row
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(r, x)| {
                let y = (x * Rational::from_integer(den.clone())).to_integer() * &self.weights[r];
                (r as u64, y)
            });
        SparseKronVector::from_weighted(self.tuple.clone(), SurdSum::one(), entries)
    }

    /// Orthonormal basis of the column space, taking columns in order.
    pub fn basis(&self) -> Result<Vec<SparseKronVector>> {
        let cols: Vec<SparseKronVector> = (0..self.side())
            .map(|c| self.column(c))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|v| !v.is_zero())
            .collect();
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        Ok(gram_schmidt(&cols)?.vectors)
    }
}

pub fn projector(t: &PartitionTuple) -> Result<ProjectorMatrix> {
    projector_with_cap(t, PROJECTOR_CAP)
}

/// Averages the diagonal action over all of S_n. The sum is built from the
/// coset chain S_1 ⊂ S_2 ⊂ ⋯ ⊂ S_n, which equals the sum over all n! words.
pub fn projector_with_cap(t: &PartitionTuple, cap: usize) -> Result<ProjectorMatrix> {
    if t.n > PROJECTOR_MAX_N {
        return Err(KronError::Cap(format!(
            "projector needs n ≤ {PROJECTOR_MAX_N}, got {}",
            t.n
        )));
    }
    let act = Action::new(t)?;
    let side = act.side();
    if side > cap {
        return Err(KronError::Cap(format!(
            "projector side {side} exceeds {cap}"
        )));
    }
    let weighted: Vec<Vec<Rational>> = (0..side)
        .into_par_iter()
        .map(|r| {
            let (num, den) = act.projector_row(t.n, r);
            num.into_iter()
                .map(|x| Rational::new(x, den.clone()))
                .collect()
        })
        .collect();
    let entries = weighted
        .par_iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, x)| {
                    if x.is_zero() {
                        return Ok(SurdSum::zero());
                    }
                    // P[r][c] = √(w_c / w_r)·P'[r][c]
                    let ratio = Rational::new(act.weights[c].clone(), act.weights[r].clone());
                    Ok(SurdSum::sqrt_of(&ratio)?.scale(x))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = act.weights;
    Ok(ProjectorMatrix {
        tuple: t.clone(),
        entries,
        weighted,
        weights,
    })
}

/// Projector-derived orthonormal basis of the invariant subspace.
pub fn projector_basis(t: &PartitionTuple) -> Result<Vec<SparseKronVector>> {
    let p = projector(t)?;
    let b = p.basis()?;
    let k = kron_coeff_general(t) as usize;
    if b.len() != k {
        return Err(KronError::Verification(format!(
            "projector rank {} but Kronecker coefficient {k}",
            b.len()
        )));
    }
    Ok(b)
}

/// Whether every adjacent transposition fixes `v` exactly.
pub fn check_invariance(v: &SparseKronVector) -> Result<bool> {
    if v.is_zero() {
        return Ok(true);
    }
    let act = Action::new(v.tuple())?;
    let y: BTreeMap<usize, BigInt> = v
        .keys()
        .iter()
        .zip(v.weighted_values())
        .map(|(&k, x)| (k as usize, x.clone()))
        .collect();
    for j in 0..act.gens.len() {
        let (out, den) = act.left_mul_sparse(&y, j);
        if out.len() != y.len()
            || out
                .iter()
                .zip(&y)
                .any(|((ka, a), (kb, b))| ka != kb || *a != b * &den)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reduced density matrix of part `i` of a normalized vector.
pub fn reduced_density(v: &SparseKronVector, i: usize) -> Result<SurdMatrix> {
    let t = v.tuple();
    if i >= t.len() {
        return Err(KronError::Input(format!("part {i} out of range for {t}")));
    }
    let tables = v.tables();
    let f = tables[i].len();
    // group entries by the indices of the other parts
    let mut rest: BTreeMap<Vec<usize>, Vec<(usize, &BigInt)>> = BTreeMap::new();
    for (&k, y) in v.keys().iter().zip(v.weighted_values()) {
        let mut idx = v.indices_of(k);
        let a = idx.remove(i);
        rest.entry(idx).or_default().push((a, y));
    }
    let mut acc = vec![vec![Rational::zero(); f]; f];
    for (idx, list) in &rest {
        let w: BigUint = idx
            .iter()
            .enumerate()
            .map(|(p, &q)| tables[if p < i { p } else { p + 1 }].weights[q].clone())
            .product();
        let w = Rational::from_integer(BigInt::from(w));
        for (a, ya) in list {
            for (b, yb) in list {
                acc[*a][*b] += Rational::from_integer(*ya * *yb) / &w;
            }
        }
    }
    let (a, r) = v.scale();
    let s2 = a * a * Rational::from_integer(BigInt::from(r.clone()));
    let wi = &tables[i].weights;
    let mut out = vec![vec![SurdSum::zero(); f]; f];
    for x in 0..f {
        for y in 0..f {
            if acc[x][y].is_zero() {
                continue;
            }
            let ww = Rational::from_integer(BigInt::from(&wi[x] * &wi[y]));
            out[x][y] = SurdSum::sqrt_of(&ww.recip())?.scale(&(&acc[x][y] * &s2));
        }
    }
    Ok(out)
}

/// Whether two orthonormal lists span the same subspace.
pub fn span_equal(a: &[SparseKronVector], b: &[SparseKronVector]) -> Result<bool> {
    for list in [a, b] {
        for (i, u) in list.iter().enumerate() {
            for (j, w) in list.iter().enumerate().skip(i) {
                let want = if i == j {
                    SurdSum::one()
                } else {
                    SurdSum::zero()
                };
                if u.inner(w)? != want {
                    return Err(KronError::Input(
                        "span_equal needs orthonormal inputs".into(),
                    ));
                }
            }
        }
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    for u in a {
        let mut s = SurdSum::zero();
        for w in b {
            s += &u.inner(w)?.square();
        }
        if s != SurdSum::one() {
            return Ok(false);
        }
    }
    Ok(true)
}
