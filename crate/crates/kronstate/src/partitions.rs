//! Two-row partitions, Yamanouchi paths, polytopes, characters and
//! Kronecker coefficients.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use serde::{Deserialize, Serialize};

use crate::error::{KronError, Result};

/// Largest supported `n` (paths are packed into a `u64`).
pub const MAX_N: usize = 63;

/// λ = (n − lam, lam).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoRowPartition {
    pub n: usize,
    pub lam: usize,
}

impl TwoRowPartition {
    pub fn new(n: usize, lam: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(KronError::Input(format!(
                "n = {n} exceeds the supported maximum {MAX_N}"
            )));
        }
        if 2 * lam > n {
            return Err(KronError::Input(format!(
                "[{}, {lam}] is not a partition (2·{lam} > {n})",
                n as i64 - lam as i64
            )));
        }
        Ok(TwoRowPartition { n, lam })
    }

    pub fn rows(&self) -> (usize, usize) {
        (self.n - self.lam, self.lam)
    }
}

impl fmt::Display for TwoRowPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self.lam)
    }
}

impl FromStr for TwoRowPartition {
    type Err = KronError;
    fn from_str(s: &str) -> Result<Self> {
        let t: PartitionTuple = s.parse()?;
        if t.parts.len() != 1 {
            return Err(KronError::Parse(format!(
                "expected a single partition 'n:lam', got '{s}'"
            )));
        }
        Ok(t.part(0))
    }
}

/// An ordered tuple of two-row partitions of the same `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionTuple {
    pub n: usize,
    pub parts: Vec<usize>,
}

impl PartitionTuple {
    pub fn new(n: usize, parts: Vec<usize>) -> Result<Self> {
        for &l in &parts {
            TwoRowPartition::new(n, l)?;
        }
        Ok(PartitionTuple { n, parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, i: usize) -> TwoRowPartition {
        TwoRowPartition {
            n: self.n,
            lam: self.parts[i],
        }
    }

    pub fn partitions(&self) -> impl Iterator<Item = TwoRowPartition> + '_ {
        self.parts
            .iter()
            .map(move |&lam| TwoRowPartition { n: self.n, lam })
    }

    /// Compact label, e.g. `112` or `1,1,12` when some entry has two digits.
    pub fn label(&self) -> String {
        if self.parts.iter().all(|&l| l < 10) {
            self.parts.iter().map(|l| l.to_string()).collect()
        } else {
            self.parts
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl fmt::Display for PartitionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|l| l.to_string()).collect();
        write!(f, "{}:{}", self.n, parts.join(","))
    }
}

impl FromStr for PartitionTuple {
    type Err = KronError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || KronError::Parse(format!("expected 'n:l1,l2,...', got '{s}'"));
        let (n, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let parts = rest
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        PartitionTuple::new(n, parts)
    }
}

/// Binary lattice path; bit `k` (0-based) is the row receiving box `k+1`.
///
/// Stored most-significant-first so integer order equals lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YamanouchiPath {
    n: u8,
    bits: u64,
}

impl YamanouchiPath {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_N {
            return Err(KronError::Input("path too long".into()));
        }
        let mut packed = 0u64;
        let mut ones = 0usize;
        for (k, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(KronError::Input(format!("path digit {b} is not a bit")));
            }
            packed = (packed << 1) | b as u64;
            ones += b as usize;
            if 2 * ones > k + 1 {
                return Err(KronError::Input(format!(
                    "prefix of length {} has more ones than zeros",
                    k + 1
                )));
            }
        }
        Ok(YamanouchiPath {
            n: bits.len() as u8,
            bits: packed,
        })
    }

    /// Builds a path from packed bits without validation.
    pub fn from_packed(n: usize, bits: u64) -> Self {
        YamanouchiPath { n: n as u8, bits }
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn packed(&self) -> u64 {
        self.bits
    }

    /// Bit at step `k+1`.
    pub fn bit(&self, k: usize) -> u8 {
        ((self.bits >> (self.n as usize - 1 - k)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|k| self.bit(k)).collect()
    }

    pub fn lam(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn partition(&self) -> TwoRowPartition {
        TwoRowPartition {
            n: self.len(),
            lam: self.lam(),
        }
    }
}

impl fmt::Display for YamanouchiPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

impl fmt::Debug for YamanouchiPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{self}")
    }
}

impl FromStr for YamanouchiPath {
    type Err = KronError;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(KronError::Parse(format!("bad path '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        YamanouchiPath::from_bits(&bits)
    }
}

fn binom(n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::zero();
    }
    let k = k as usize;
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Dimension of the S_n irrep `[n − lam, lam]`.
pub fn sn_dim(p: TwoRowPartition) -> BigInt {
    binom(p.n, p.lam as i64) - binom(p.n, p.lam as i64 - 1)
}

/// `sn_dim` as a machine integer (panics only for absurd sizes).
pub fn sn_dim_usize(p: TwoRowPartition) -> usize {
    sn_dim(p)
        .to_usize()
        .expect("irrep dimension does not fit in usize")
}

/// Dimension of the GL₂ irrep `{n − lam, lam}`.
pub fn gl2_dim(p: TwoRowPartition) -> usize {
    p.n - 2 * p.lam + 1
}

/// All Yamanouchi paths of `p`, lexicographically ascending.
pub fn enumerate_paths(p: TwoRowPartition) -> Vec<YamanouchiPath> {
    fn rec(n: usize, lam: usize, k: usize, ones: usize, acc: u64, out: &mut Vec<YamanouchiPath>) {
        if k == n {
            if ones == lam {
                out.push(YamanouchiPath::from_packed(n, acc));
            }
            return;
        }
        // zero first keeps the output sorted
        if (n - k - 1) >= lam - ones {
            rec(n, lam, k + 1, ones, acc << 1, out);
        }
        if ones < lam && 2 * (ones + 1) <= k + 1 {
            rec(n, lam, k + 1, ones + 1, (acc << 1) | 1, out);
        }
    }
    let mut out = Vec::new();
    rec(p.n, p.lam, 0, 0, 0, &mut out);
    out
}

/// `D(q) = ∏_j (j − 2λ_j + 2q_j)` with `λ_j` the second-row length after step `j`.
pub fn path_weight(q: &YamanouchiPath) -> BigUint {
    let mut acc = BigUint::one();
    let mut lam = 0usize;
    for k in 0..q.len() {
        let j = k + 1;
        let b = q.bit(k) as usize;
        lam += b;
        acc *= BigUint::from(j + 2 * b - 2 * lam);
    }
    acc
}

/// Paths of a partition together with a reverse index and their weights.
#[derive(Clone, Debug)]
pub struct PathTable {
    pub partition: TwoRowPartition,
    pub paths: Vec<YamanouchiPath>,
    /// `D(q)` for each path.
    pub weights: Vec<BigUint>,
    /// lcm of all weights.
    pub weight_lcm: BigUint,
    /// `weight_lcm / D(q)`.
    pub cofactors: Vec<BigUint>,
    index: HashMap<u64, u32>,
}

impl PathTable {
    pub fn new(p: TwoRowPartition) -> Self {
        let paths = enumerate_paths(p);
        let index = paths
            .iter()
            .enumerate()
            .map(|(i, q)| (q.packed(), i as u32))
            .collect();
        let weights: Vec<BigUint> = paths.iter().map(path_weight).collect();
        let weight_lcm = weights.iter().fold(BigUint::one(), |acc, w| acc.lcm(w));
        let cofactors = weights.iter().map(|w| &weight_lcm / w).collect();
        PathTable {
            partition: p,
            paths,
            weights,
            weight_lcm,
            cofactors,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn index_of(&self, q: &YamanouchiPath) -> Option<usize> {
        if q.len() != self.partition.n {
            return None;
        }
        self.index.get(&q.packed()).map(|&i| i as usize)
    }
}

static PATH_TABLES: std::sync::LazyLock<
    Mutex<HashMap<TwoRowPartition, std::sync::Arc<PathTable>>>,
> = std::sync::LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared, cached path table.
pub fn path_table(p: TwoRowPartition) -> std::sync::Arc<PathTable> {
    let mut guard = PATH_TABLES.lock().unwrap();
    guard
        .entry(p)
        .or_insert_with(|| std::sync::Arc::new(PathTable::new(p)))
        .clone()
}

pub fn in_w_polytope(t: &PartitionTuple) -> bool {
    let sum: usize = t.parts.iter().sum();
    sum <= t.n && t.parts.iter().all(|&l| 2 * l <= sum)
}

pub fn in_kron_polytope(t: &PartitionTuple) -> bool {
    let sum: usize = t.parts.iter().sum();
    t.parts.iter().all(|&l| 2 * l <= sum)
}

/// Closed formula for three-part coefficients.
pub fn kron_coeff_triple(l1: usize, l2: usize, l3: usize, n: usize) -> u64 {
    let mut v = [l1 as i64, l2 as i64, l3 as i64];
    v.sort();
    let [a, b, c] = v;
    let x = 0.max(div_ceil(a + b + c - n as i64, 2));
    let y = div_ceil(a + b - c + 1, 2);
    if y >= x {
        (y - x) as u64
    } else {
        0
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

/// A cycle type: parts in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(pub Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(KronError::Input("cycle lengths must be positive".into()));
        }
        parts.sort_by(|a, b| b.cmp(a));
        Ok(CycleType(parts))
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// `z = ∏ k^{m_k} m_k!`, so the class has `n!/z` elements.
    pub fn centralizer_order(&self) -> BigInt {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &k in &self.0 {
            *counts.entry(k).or_default() += 1;
        }
        let mut z = BigInt::one();
        for (k, m) in counts {
            z *= BigInt::from(k).pow(m as u32) * factorial(m);
        }
        z
    }

    pub fn class_size(&self) -> BigInt {
        factorial(self.n()) / self.centralizer_order()
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// All cycle types of S_n.
pub fn cycle_types(n: usize) -> Vec<CycleType> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rem == 0 {
            out.push(CycleType(cur.clone()));
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            rec(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// χ^λ(ρ) for an arbitrary partition λ by Murnaghan–Nakayama on beta sets.
pub fn character(lambda: &[usize], rho: &[usize]) -> i64 {
    fn rec(
        beta: &mut Vec<usize>,
        rho: &[usize],
        memo: &mut HashMap<(Vec<usize>, usize), i64>,
    ) -> i64 {
        if rho.is_empty() {
            return 1;
        }
        let key = (beta.clone(), rho.len());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let k = rho[0];
        let mut total = 0i64;
        for i in 0..beta.len() {
            let b = beta[i];
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            let between = beta.iter().filter(|&&g| g > b - k && g < b).count();
            let sign = if between % 2 == 0 { 1 } else { -1 };
            beta[i] = b - k;
            total += sign * rec(beta, &rho[1..], memo);
            beta[i] = b;
        }
        memo.insert(key, total);
        total
    }
    let l = lambda.len();
    let mut beta: Vec<usize> = lambda
        .iter()
        .enumerate()
        .map(|(i, &x)| x + (l - 1 - i))
        .collect();
    let mut memo = HashMap::new();
    rec(&mut beta, rho, &mut memo)
}

pub fn character_two_row(p: TwoRowPartition, c: &CycleType) -> i64 {
    let (a, b) = p.rows();
    character(&[a, b], &c.0)
}

/// General Kronecker coefficient via the class-weighted character sum.
pub fn kron_coeff_general(t: &PartitionTuple) -> u64 {
    let n = t.n;
    let nfact = factorial(n);
    let mut acc = BigInt::zero();
    for c in cycle_types(n) {
        let mut prod = BigInt::from(1);
        for p in t.partitions() {
            prod *= character_two_row(p, &c);
            if prod.is_zero() {
                break;
            }
        }
        if !prod.is_zero() {
            acc += prod * (&nfact / c.centralizer_order());
        }
    }
    let (q, r) = acc.div_rem(&nfact);
    assert!(r.is_zero(), "character sum not divisible by n!");
    q.to_u64().expect("negative Kronecker coefficient")
}

/// Kronecker coefficient using the closed formula for triples.
pub fn kron_coeff(t: &PartitionTuple) -> u64 {
    if t.len() == 3 {
        kron_coeff_triple(t.parts[0], t.parts[1], t.parts[2], t.n)
    } else {
        kron_coeff_general(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, lam: usize) -> TwoRowPartition {
        TwoRowPartition::new(n, lam).unwrap()
    }

    fn t(s: &str) -> PartitionTuple {
        s.parse().unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(sn_dim(p(5, 2)), BigInt::from(5));
        assert_eq!(sn_dim(p(7, 0)), BigInt::from(1));
        assert_eq!(sn_dim(p(12, 4)), BigInt::from(275));
        assert_eq!(sn_dim(p(9, 3)), BigInt::from(48));
        assert_eq!(gl2_dim(p(7, 2)), 4);
        assert_eq!(gl2_dim(p(3, 0)), 4);
        assert_eq!(gl2_dim(p(6, 3)), 1);
    }

    #[test]
    fn path_listing() {
        let show = |v: Vec<YamanouchiPath>| v.iter().map(|q| q.to_string()).collect::<Vec<_>>();
        assert_eq!(show(enumerate_paths(p(3, 1))), ["001", "010"]);
        assert_eq!(
            show(enumerate_paths(p(5, 2))),
            ["00011", "00101", "00110", "01001", "01010"]
        );
        assert_eq!(show(enumerate_paths(p(2, 1))), ["01"]);
        assert!("10".parse::<YamanouchiPath>().is_err());
    }

    #[test]
    fn polytopes() {
        assert!(in_w_polytope(&t("4:1,1,2")));
        assert!(!in_w_polytope(&t("4:2,2,2")));
        assert!(!in_w_polytope(&t("2:0,0,1")));
        assert!(in_kron_polytope(&t("5:2,2,2")));
        assert!(in_kron_polytope(&t("3:1,1,1")));
        assert!("4:0,0,3".parse::<PartitionTuple>().is_err());
    }

    #[test]
    fn triple_formula() {
        assert_eq!(kron_coeff_triple(2, 2, 2, 6), 2);
        assert_eq!(kron_coeff_triple(4, 4, 4, 12), 3);
        assert_eq!(kron_coeff_triple(1, 1, 1, 3), 1);
    }

    #[test]
    fn characters() {
        let id3 = CycleType(vec![1, 1, 1]);
        assert_eq!(character_two_row(p(3, 1), &id3), 2);
        assert_eq!(character_two_row(p(3, 1), &CycleType(vec![2, 1])), 0);
        for c in cycle_types(6) {
            assert_eq!(character_two_row(p(6, 0), &c), 1);
        }
        assert_eq!(character_two_row(p(5, 2), &CycleType(vec![1; 5])), 5);
    }

    #[test]
    fn general_coefficients() {
        assert_eq!(kron_coeff_general(&t("3:1,1,1,1")), 3);
        assert_eq!(kron_coeff_general(&t("9:3,3,3,3")), 39);
        assert_eq!(kron_coeff_general(&t("6:2,2,2")), 2);
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=8 {
            let total: BigInt = cycle_types(n).iter().map(|c| c.class_size()).sum();
            assert_eq!(total, factorial(n));
        }
    }
}
