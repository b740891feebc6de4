//! The qubit Schur transform: stepwise GL₂ Clebsch–Gordan coefficients,
//! path products, S_n irrep matrices and two-type vectors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{KronError, Result};
use crate::numeric::{rat, Rational, SurdSum};
use crate::partitions::{enumerate_paths, factorial, TwoRowPartition, YamanouchiPath};

/// One stepwise coefficient Γ for step `n`, with `lam` and `omega` the
/// second-row length and weight after the step.
pub fn gamma_step(lam: usize, omega: usize, n: usize, q: u8, s: u8) -> SurdSum {
    let (l, w, n) = (lam as i64, omega as i64, n as i64);
    if n < 1 || w < l || w > n - l {
        return SurdSum::zero();
    }
    let (num, den, neg) = match (q, s) {
        (0, 0) => (n - l - w, n - 2 * l, false),
        (0, 1) => (w - l, n - 2 * l, false),
        (1, 0) => (w - l + 1, n - 2 * l + 2, true),
        (1, 1) => (n - l - w + 1, n - 2 * l + 2, false),
        _ => return SurdSum::zero(),
    };
    if den <= 0 || num <= 0 {
        return SurdSum::zero();
    }
    let v = SurdSum::sqrt_of(&rat(num, den)).expect("nonnegative");
    if neg {
        -v
    } else {
        v
    }
}

fn gamma_sq(lam: i64, omega: i64, n: i64, q: u8, s: u8) -> Option<(i64, i64, bool)> {
    if n < 1 || omega < lam || omega > n - lam {
        return None;
    }
    let (num, den, neg) = match (q, s) {
        (0, 0) => (n - lam - omega, n - 2 * lam, false),
        (0, 1) => (omega - lam, n - 2 * lam, false),
        (1, 0) => (omega - lam + 1, n - 2 * lam + 2, true),
        (1, 1) => (n - lam - omega + 1, n - 2 * lam + 2, false),
        _ => return None,
    };
    if den <= 0 || num <= 0 {
        return None;
    }
    Some((num, den, neg))
}

/// Product of stepwise coefficients along `q` for the qubit sequence `s`.
pub fn schur_path_coefficient(s: &[u8], q: &YamanouchiPath) -> Result<SurdSum> {
    if s.len() != q.len() {
        return Err(KronError::Input(format!(
            "sequence length {} does not match path length {}",
            s.len(),
            q.len()
        )));
    }
    // accumulate the square as a rational, the sign separately
    let mut sq = Rational::from_integer(BigInt::from(1));
    let mut negative = false;
    let (mut lam, mut omega) = (0i64, 0i64);
    for (k, &sk) in s.iter().enumerate() {
        let qk = q.bit(k);
        lam += qk as i64;
        omega += sk as i64;
        match gamma_sq(lam, omega, k as i64 + 1, qk, sk) {
            None => return Ok(SurdSum::zero()),
            Some((num, den, neg)) => {
                sq *= rat(num, den);
                negative ^= neg;
            }
        }
    }
    let v = SurdSum::sqrt_of(&sq)?;
    Ok(if negative { -v } else { v })
}

/// All nonzero Schur coefficients of a computational basis sequence.
pub fn schur_expand(s: &[u8]) -> Vec<(TwoRowPartition, YamanouchiPath, SurdSum)> {
    let n = s.len();
    let w = s.iter().filter(|&&b| b == 1).count();
    let mut out = Vec::new();
    for lam in 0..=n / 2 {
        if lam > w || w > n - lam {
            continue;
        }
        let p = TwoRowPartition { n, lam };
        for q in enumerate_paths(p) {
            let c = schur_path_coefficient(s, &q).expect("matching lengths");
            if !c.is_zero() {
                out.push((p, q, c));
            }
        }
    }
    out
}

/// A permutation of `{0, …, n−1}` in one-line notation: `k ↦ images[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(KronError::Input(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Adjacent transposition swapping positions `i` and `i+1` (0-based).
    pub fn adjacent(n: usize, i: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Permutation(v)
    }

    /// Parses cycle notation with 1-based points, e.g. `(1 2)(3 4)`, `(2,3)` or `(23)`.
    pub fn from_cycles(n: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let text = text.trim();
        if text.is_empty() || text == "()" || text == "e" {
            return Ok(Permutation(images));
        }
        let bad = || KronError::Parse(format!("bad cycle notation '{text}'"));
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(bad)?;
            if !rest[..open].trim().is_empty() {
                return Err(bad());
            }
            let close = rest.find(')').ok_or_else(bad)?;
            let body = &rest[open + 1..close];
            let points: Vec<usize> = if body.contains(',') || body.contains(' ') {
                body.split([',', ' '])
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            } else {
                body.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                    .collect::<Result<_>>()?
            };
            if points.iter().any(|&p| p == 0 || p > n) {
                return Err(KronError::Input(format!(
                    "cycle point out of range 1..{n} in '{text}'"
                )));
            }
            // products compose right to left, so the last cycle acts first
            let mut cyc: Vec<usize> = (0..n).collect();
            for w in 0..points.len() {
                cyc[points[w] - 1] = points[(w + 1) % points.len()] - 1;
            }
            images = (0..n).map(|k| images[cyc[k]]).collect();
            rest = &rest[close + 1..];
        }
        Permutation::from_images(images)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&k| self.0[k]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v] = k;
        }
        Permutation(inv)
    }

    /// Moves the entry at position `k` to position `π(k)`.
    pub fn act_on<T: Clone>(&self, s: &[T]) -> Vec<T> {
        let mut out = s.to_vec();
        for (k, x) in s.iter().enumerate() {
            out[self.0[k]] = x.clone();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", imgs.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = KronError;
    /// One-line notation with 1-based images, e.g. `[2 1 3]` or `2,1,3`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let images = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse::<usize>()
                    .ok()
                    .and_then(|v| v.checked_sub(1))
                    .ok_or_else(|| KronError::Parse(format!("bad permutation '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_images(images)
    }
}

/// Dense square matrix of exact entries.
pub type SurdMatrix = Vec<Vec<SurdSum>>;

#[derive(Clone, Debug, PartialEq)]
pub struct IrrepMatrix {
    pub partition: TwoRowPartition,
    pub permutation: Permutation,
    pub entries: SurdMatrix,
}

/// All binary sequences of length `n` with `w` ones.
pub fn sequences_of_weight(n: usize, w: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, w: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            if w == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let left = n - cur.len();
        if left > w {
            cur.push(0);
            rec(n, w, cur, out);
            cur.pop();
        }
        if w > 0 {
            cur.push(1);
            rec(n, w - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, w, &mut Vec::new(), &mut out);
    out
}

/// D^λ(π) built from Schur coefficients at the smallest admissible weight.
pub fn irrep_matrix(p: TwoRowPartition, pi: &Permutation) -> Result<IrrepMatrix> {
    irrep_matrix_at_weight(p, pi, p.lam)
}

/// D^λ(π)_{ij} = Σ_{s of weight ω} Γ_{π·s}^{q_i} Γ_s^{q_j}.
pub fn irrep_matrix_at_weight(
    p: TwoRowPartition,
    pi: &Permutation,
    omega: usize,
) -> Result<IrrepMatrix> {
    if pi.n() != p.n {
        return Err(KronError::Input(format!(
            "permutation on {} points for n = {}",
            pi.n(),
            p.n
        )));
    }
    if omega < p.lam || omega > p.n - p.lam {
        return Err(KronError::Input(format!(
            "weight {omega} not admissible for {p}"
        )));
    }
    let paths = enumerate_paths(p);
    let f = paths.len();
    let seqs = sequences_of_weight(p.n, omega);
    let columns: Vec<(Vec<SurdSum>, Vec<SurdSum>)> = seqs
        .par_iter()
        .map(|s| {
            let moved = pi.act_on(s);
            let a: Vec<SurdSum> = paths
                .iter()
                .map(|q| schur_path_coefficient(&moved, q).unwrap())
                .collect();
            let b: Vec<SurdSum> = paths
                .iter()
                .map(|q| schur_path_coefficient(s, q).unwrap())
                .collect();
            (a, b)
        })
        .collect();
    let mut entries = vec![vec![SurdSum::zero(); f]; f];
    for (a, b) in &columns {
        for i in 0..f {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..f {
                if !b[j].is_zero() {
                    entries[i][j] += &(&a[i] * &b[j]);
                }
            }
        }
    }
    Ok(IrrepMatrix {
        partition: p,
        permutation: pi.clone(),
        entries,
    })
}

pub fn mat_mul(a: &SurdMatrix, b: &SurdMatrix) -> SurdMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![SurdSum::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bk[j].is_zero() {
                    out[i][j] += &(&a[i][k] * &bk[j]);
                }
            }
        }
    }
    out
}

pub fn transpose(a: &SurdMatrix) -> SurdMatrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity_matrix(f: usize) -> SurdMatrix {
    (0..f)
        .map(|i| {
            (0..f)
                .map(|j| {
                    if i == j {
                        SurdSum::one()
                    } else {
                        SurdSum::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn trace(a: &SurdMatrix) -> SurdSum {
    a.iter().enumerate().map(|(i, r)| r[i].clone()).sum()
}

/// S_n part of the Schur transform of a two-type sequence, with the closed
/// normalization prefactor `√(λ!(1+n−λ)!/(n₀!(1+n−2λ)(n−n₀)!))`, `n₀` the number of zeros.
pub fn two_type_vector(s: &[u8], p: TwoRowPartition) -> Result<Vec<SurdSum>> {
    if s.len() != p.n {
        return Err(KronError::Input(format!(
            "sequence length {} for n = {}",
            s.len(),
            p.n
        )));
    }
    let n = p.n;
    let ones = s.iter().filter(|&&b| b == 1).count();
    let n0 = n - ones;
    if p.lam > ones || ones > n - p.lam {
        return Err(KronError::Domain(format!(
            "weight {ones} of the sequence is incompatible with {p}"
        )));
    }
    let num = factorial(p.lam) * factorial(1 + n - p.lam);
    let den = factorial(n0) * BigInt::from(1 + n - 2 * p.lam) * factorial(n - n0);
    let pref = SurdSum::sqrt_of(&Rational::new(num, den))?;
    let v = enumerate_paths(p)
        .iter()
        .map(|q| Ok(&pref * &schur_path_coefficient(s, q)?))
        .collect::<Result<Vec<_>>>()?;
    if v.iter().all(|x| x.is_zero()) {
        return Err(KronError::Domain("two-type vector vanishes".into()));
    }
    Ok(v)
}

pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(KronError::Parse(format!("bad bit string '{s}'"))),
        })
        .collect()
}

pub fn is_zero_matrix(a: &SurdMatrix) -> bool {
    a.iter().all(|r| r.iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(x: &str) -> SurdSum {
        x.parse().unwrap()
    }

    fn path(x: &str) -> YamanouchiPath {
        x.parse().unwrap()
    }

    #[test]
    fn step_values() {
        assert_eq!(gamma_step(1, 1, 2, 1, 1), sd("1/2*sqrt(2)"));
        assert_eq!(gamma_step(1, 1, 3, 0, 0), sd("1"));
        assert_eq!(gamma_step(1, 2, 5, 0, 1), sd("1/3*sqrt(3)"));
        assert_eq!(gamma_step(0, 0, 1, 0, 0), sd("1"));
        assert_eq!(gamma_step(0, 1, 1, 0, 1), sd("1"));
        assert!(gamma_step(2, 1, 4, 0, 0).is_zero());
    }

    #[test]
    fn path_products() {
        // factors √½·1·1·√⅓·√½; the step at n=4 (λ=1, ω=1, q=s=0) is exactly 1
        let c = schur_path_coefficient(&parse_bits("010011").unwrap(), &path("010001")).unwrap();
        assert_eq!(c, sd("1/6*sqrt(3)"));
        assert_eq!(
            schur_path_coefficient(&[0; 5], &path("00000")).unwrap(),
            sd("1")
        );
        assert_eq!(
            schur_path_coefficient(&[0, 1], &path("01")).unwrap(),
            sd("1/2*sqrt(2)")
        );
        assert!(schur_path_coefficient(&[0, 1, 1], &path("01")).is_err());
    }

    #[test]
    fn expand_two_qubits() {
        let e = schur_expand(&[0, 1]);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].2, sd("1/2*sqrt(2)"));
        assert_eq!(e[1].2, sd("1/2*sqrt(2)"));
        let e = schur_expand(&[1, 0]);
        assert_eq!(e[1].2, sd("-1/2*sqrt(2)"));
        let e = schur_expand(&[0, 0]);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].2, SurdSum::one());
    }

    #[test]
    fn small_irreps() {
        let p = TwoRowPartition::new(3, 1).unwrap();
        let d23 = irrep_matrix(p, &Permutation::from_cycles(3, "(2 3)").unwrap()).unwrap();
        assert_eq!(
            d23.entries,
            vec![
                vec![sd("-1/2"), sd("1/2*sqrt(3)")],
                vec![sd("1/2*sqrt(3)"), sd("1/2")]
            ]
        );
        let d12 = irrep_matrix(p, &Permutation::from_cycles(3, "(12)").unwrap()).unwrap();
        assert_eq!(
            d12.entries,
            vec![vec![sd("1"), sd("0")], vec![sd("0"), sd("-1")]]
        );
        let e = irrep_matrix(p, &Permutation::identity(3)).unwrap();
        assert_eq!(e.entries, identity_matrix(2));
    }

    #[test]
    fn appendix_vector() {
        let v = two_type_vector(
            &parse_bits("011001").unwrap(),
            TwoRowPartition::new(6, 1).unwrap(),
        )
        .unwrap();
        // the q=000001 product has no negative step, so the leading entry is positive
        let want = [
            "1/5*sqrt(5)",
            "-1/15*sqrt(30)",
            "-1/3*sqrt(2)",
            "1/3",
            "1/3*sqrt(3)",
        ];
        assert_eq!(v, want.iter().map(|x| sd(x)).collect::<Vec<_>>());
        let norm: SurdSum = v.iter().map(|x| x.square()).sum();
        assert_eq!(norm, SurdSum::one());
        let v = two_type_vector(&[0; 6], TwoRowPartition::new(6, 0).unwrap()).unwrap();
        assert_eq!(v, vec![SurdSum::one()]);
    }

    #[test]
    fn cycle_parsing() {
        let p = Permutation::from_cycles(4, "(1 2)(3 4)").unwrap();
        assert_eq!(p.0, vec![1, 0, 3, 2]);
        let p = Permutation::from_cycles(3, "(123)").unwrap();
        assert_eq!(p.0, vec![1, 2, 0]);
        assert!(Permutation::from_cycles(3, "(14)").is_err());
    }
}
