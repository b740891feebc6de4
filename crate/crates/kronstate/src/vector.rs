//! Exact sparse vectors over a tensor product of two-row irreps.
//!
//! Entries are stored in weighted coordinates: the coefficient of the path
//! tuple `q` is `a·√r · y(q) / √(∏ᵢ D(qⁱ))` with `y(q)` an integer, `a√r` a
//! global single surd and `D` the path weight of [`path_weight`]. W-Kronecker
//! coefficients, graph contractions and all rational combinations of them stay
//! in this form, so inner products are rational multiples of `a²r`.
//!
//! [`path_weight`]: crate::partitions::path_weight

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{KronError, Result};
use crate::numeric::{Rational, SurdSum};
use crate::partitions::{path_table, PartitionTuple, PathTable, YamanouchiPath};

#[derive(Clone, Debug)]
pub struct SparseKronVector {
    tuple: PartitionTuple,
    tables: Vec<Arc<PathTable>>,
    strides: Vec<u64>,
    scale: Rational,
    radicand: BigUint,
    keys: Vec<u64>,
    vals: Vec<BigInt>,
    normalized: bool,
}

/// Mixed-radix strides for the path-index tuple, first part most significant.
pub(crate) fn strides_for(tables: &[Arc<PathTable>]) -> Result<Vec<u64>> {
    let mut strides = vec![0u64; tables.len()];
    let mut acc: u64 = 1;
    for i in (0..tables.len()).rev() {
        strides[i] = acc;
        acc = acc
            .checked_mul(tables[i].len() as u64)
            .ok_or_else(|| KronError::Cap("product of irrep dimensions exceeds 2^64".into()))?;
    }
    Ok(strides)
}

pub(crate) fn tables_for(t: &PartitionTuple) -> Vec<Arc<PathTable>> {
    t.partitions().map(path_table).collect()
}

impl PartialEq for SparseKronVector {
    fn eq(&self, other: &Self) -> bool {
        self.tuple == other.tuple
            && self.normalized == other.normalized
            && self.keys == other.keys
            && self.entries_equal(other)
    }
}

impl SparseKronVector {
    /// Builds a vector from weighted integer entries and a global surd `a√r`.
    /// Keys need not be sorted; duplicates are summed and zeros dropped.
    pub fn from_weighted(
        tuple: PartitionTuple,
        scale: SurdSum,
        entries: impl IntoIterator<Item = (u64, BigInt)>,
    ) -> Result<Self> {
        let (a, r) = scale
            .as_single()
            .ok_or_else(|| KronError::Input("vector scale must be a single surd".into()))?;
        let tables = tables_for(&tuple);
        let strides = strides_for(&tables)?;
        let total: u64 = tables.iter().map(|t| t.len() as u64).product();
        let mut pairs: Vec<(u64, BigInt)> = entries.into_iter().collect();
        if let Some((k, _)) = pairs.iter().find(|(k, _)| *k >= total) {
            return Err(KronError::Input(format!("key {k} out of range")));
        }
        pairs.sort_by_key(|(k, _)| *k);
        let mut keys = Vec::with_capacity(pairs.len());
        let mut vals: Vec<BigInt> = Vec::with_capacity(pairs.len());
        for (k, v) in pairs {
            if keys.last() == Some(&k) {
                *vals.last_mut().unwrap() += v;
            } else {
                keys.push(k);
                vals.push(v);
            }
        }
        let mut out = SparseKronVector {
            tuple,
            tables,
            strides,
            scale: a,
            radicand: r,
            keys,
            vals,
            normalized: false,
        };
        out.compact();
        Ok(out)
    }

    /// The zero vector.
    pub fn zero(tuple: PartitionTuple) -> Result<Self> {
        Self::from_weighted(tuple, SurdSum::one(), std::iter::empty())
    }

    /// Drops zeros and moves the content of `y` into the scale.
    fn compact(&mut self) {
        let mut keys = Vec::with_capacity(self.keys.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for (k, v) in self.keys.drain(..).zip(self.vals.drain(..)) {
            if !v.is_zero() {
                keys.push(k);
                vals.push(v);
            }
        }
        self.keys = keys;
        self.vals = vals;
        if self.vals.is_empty() {
            self.scale = Rational::one();
            self.radicand = BigUint::one();
            return;
        }
        let mut g = BigInt::zero();
        for v in &self.vals {
            g = g.gcd(v);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() {
            for v in self.vals.iter_mut() {
                *v /= &g;
            }
            self.scale *= Rational::from_integer(g);
        }
        if self.scale.is_negative() {
            self.scale = -self.scale.clone();
            for v in self.vals.iter_mut() {
                *v = -v.clone();
            }
        }
    }

    pub fn tuple(&self) -> &PartitionTuple {
        &self.tuple
    }

    pub fn tables(&self) -> &[Arc<PathTable>] {
        &self.tables
    }

    pub fn dims(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.len()).collect()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.keys.len()
    }

    pub fn is_zero(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Global factor `(a, r)` meaning `a·√r`.
    pub fn scale(&self) -> (&Rational, &BigUint) {
        (&self.scale, &self.radicand)
    }

    pub fn scale_surd(&self) -> SurdSum {
        SurdSum::surd_unchecked(self.scale.clone(), self.radicand.clone())
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn weighted_values(&self) -> &[BigInt] {
        &self.vals
    }

    pub fn key_of(&self, paths: &[YamanouchiPath]) -> Option<u64> {
        if paths.len() != self.tables.len() {
            return None;
        }
        let mut key = 0u64;
        for (i, q) in paths.iter().enumerate() {
            key += self.tables[i].index_of(q)? as u64 * self.strides[i];
        }
        Some(key)
    }

    pub fn indices_of(&self, key: u64) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.tables)
            .map(|(s, t)| ((key / s) % t.len() as u64) as usize)
            .collect()
    }

    pub fn paths_of(&self, key: u64) -> Vec<YamanouchiPath> {
        self.indices_of(key)
            .into_iter()
            .zip(&self.tables)
            .map(|(i, t)| t.paths[i])
            .collect()
    }

    pub fn key_from_indices(&self, idx: &[usize]) -> u64 {
        idx.iter()
            .zip(&self.strides)
            .map(|(&i, s)| i as u64 * s)
            .sum()
    }

    fn weight_of_key(&self, key: u64) -> BigUint {
        self.indices_of(key)
            .into_iter()
            .zip(&self.tables)
            .map(|(i, t)| t.weights[i].clone())
            .product()
    }

    fn coefficient_at(&self, pos: usize) -> SurdSum {
        let d = self.weight_of_key(self.keys[pos]);
        let a = &self.scale * Rational::new(self.vals[pos].clone(), BigInt::from(d.clone()));
        SurdSum::surd(a, &(&self.radicand * d))
    }

    /// Exact coefficient of a path tuple (zero when absent).
    pub fn coefficient(&self, paths: &[YamanouchiPath]) -> SurdSum {
        match self
            .key_of(paths)
            .and_then(|k| self.keys.binary_search(&k).ok())
        {
            Some(pos) => self.coefficient_at(pos),
            None => SurdSum::zero(),
        }
    }

    /// Nonzero entries in lexicographic order of the path tuples.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<YamanouchiPath>, SurdSum)> + '_ {
        (0..self.keys.len()).map(move |p| (self.paths_of(self.keys[p]), self.coefficient_at(p)))
    }

    /// `Σ y(q)·y'(q) / ∏ D(qⁱ)`, the metric pairing of the integer parts.
    pub fn raw_inner(&self, other: &SparseKronVector) -> Result<Rational> {
        if self.tuple != other.tuple {
            return Err(KronError::Input(format!(
                "inner product of vectors over {} and {}",
                self.tuple, other.tuple
            )));
        }
        let n_parts = self.tables.len();
        let mut acc = BigInt::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.keys.len() && j < other.keys.len() {
            match self.keys[i].cmp(&other.keys[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let mut term = &self.vals[i] * &other.vals[j];
                    let idx = self.indices_of(self.keys[i]);
                    for p in 0..n_parts {
                        term *= BigInt::from(self.tables[p].cofactors[idx[p]].clone());
                    }
                    acc += term;
                    i += 1;
                    j += 1;
                }
            }
        }
        let den: BigUint = self.tables.iter().map(|t| t.weight_lcm.clone()).product();
        Ok(Rational::new(acc, BigInt::from(den)))
    }

    /// Exact squared norm.
    pub fn norm_sq(&self) -> Rational {
        let raw = self.raw_inner(self).expect("same tuple");
        raw * &self.scale
            * &self.scale
            * Rational::from_integer(BigInt::from(self.radicand.clone()))
    }

    /// Exact inner product (real coefficients, so the bilinear form).
    pub fn inner(&self, other: &SparseKronVector) -> Result<SurdSum> {
        let raw = self.raw_inner(other)?;
        let s = self.scale_surd() * other.scale_surd();
        Ok(s.scale(&raw))
    }

    /// Unit-norm copy with the sign fixed so the first nonzero coefficient is positive.
    pub fn normalized(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(KronError::Domain("cannot normalize the zero vector".into()));
        }
        let raw = self.raw_inner(self)?;
        // scale = 1/√raw = √(raw⁻¹)
        let s = SurdSum::sqrt_of(&raw.recip())?;
        let (a, r) = s.as_single().expect("single surd");
        let mut out = self.clone();
        out.scale = a;
        out.radicand = r;
        out.normalized = true;
        out.fix_sign();
        Ok(out)
    }

    /// Flips the sign so the lexicographically first nonzero coefficient is positive.
    pub fn fix_sign(&mut self) {
        if let Some(first) = self.vals.first() {
            if first.is_negative() {
                for v in self.vals.iter_mut() {
                    *v = -v.clone();
                }
            }
        }
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v = -v.clone();
        }
        out
    }

    /// Multiplies by a nonzero rational.
    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.scale *= c;
        out.normalized = false;
        out.compact();
        out
    }

    /// `self − c·other` for vectors sharing the same global radicand, where
    /// `c` multiplies the integer parts: the result has `y = y_self − c'·y_other`
    /// with `c'` chosen so the scales match.
    pub fn sub_scaled(&self, c: &SurdSum, other: &SparseKronVector) -> Result<Self> {
        if self.tuple != other.tuple {
            return Err(KronError::Input("tuple mismatch".into()));
        }
        if c.is_zero() || other.is_zero() {
            return Ok(self.clone());
        }
        // c·other = (c·s_o/s_self)·s_self·y_o; the ratio must be rational
        let ratio = (c * &other.scale_surd()).div_single(&self.scale_surd())?;
        let ratio = ratio
            .as_rational()
            .ok_or_else(|| KronError::IrrationalNorm(ratio.clone()))?;
        let num = ratio.numer();
        let den = ratio.denom();
        let mut merged: Vec<(u64, BigInt)> = Vec::with_capacity(self.nnz() + other.nnz());
        for (k, v) in self.keys.iter().zip(&self.vals) {
            merged.push((*k, v * den));
        }
        for (k, v) in other.keys.iter().zip(&other.vals) {
            merged.push((*k, -(v * num)));
        }
        let scale = SurdSum::surd_unchecked(
            &self.scale / Rational::from_integer(den.clone()),
            self.radicand.clone(),
        );
        Self::from_weighted(self.tuple.clone(), scale, merged)
    }

    fn entries_equal(&self, other: &SparseKronVector) -> bool {
        if self.keys != other.keys {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        // same primitive integer parts up to the shared scale
        (self.scale == other.scale && self.radicand == other.radicand && self.vals == other.vals)
            || self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }

    /// Builds a vector from explicit coefficients; every coefficient times
    /// `√∏D(qⁱ)` must lie in a common `ℚ·√r`.
    pub fn from_entries(
        tuple: PartitionTuple,
        entries: impl IntoIterator<Item = (Vec<YamanouchiPath>, SurdSum)>,
    ) -> Result<Self> {
        let tables = tables_for(&tuple);
        let strides = strides_for(&tables)?;
        let mut radicand: Option<BigUint> = None;
        let mut rows: Vec<(u64, Rational)> = Vec::new();
        for (paths, c) in entries {
            if c.is_zero() {
                continue;
            }
            if paths.len() != tables.len() {
                return Err(KronError::Input("path tuple has the wrong arity".into()));
            }
            let mut key = 0u64;
            let mut d = BigUint::one();
            for (i, q) in paths.iter().enumerate() {
                let idx = tables[i].index_of(q).ok_or_else(|| {
                    KronError::Input(format!("path {q} is not a path of {}", tables[i].partition))
                })?;
                key += idx as u64 * strides[i];
                d *= &tables[i].weights[idx];
            }
            let (a, r) = c
                .as_single()
                .ok_or_else(|| KronError::Input(format!("coefficient {c} is not a single surd")))?;
            // c·√D = a·√(r·D) = y·√R
            let lifted = SurdSum::surd(a, &(r * d));
            let (y, rr) = lifted.as_single().expect("single surd");
            match &radicand {
                None => radicand = Some(rr),
                Some(r0) if *r0 == rr => {}
                Some(_) => {
                    return Err(KronError::Input(
                        "coefficients do not share a common weighted radicand".into(),
                    ))
                }
            }
            rows.push((key, y));
        }
        let radicand = radicand.unwrap_or_else(BigUint::one);
        let lcm = rows
            .iter()
            .fold(BigInt::one(), |acc, (_, y)| acc.lcm(y.denom()));
        let lcm_q = Rational::from_integer(lcm.clone());
        let entries = rows
            .into_iter()
            .map(|(k, y)| (k, (y * &lcm_q).to_integer()));
        let scale = SurdSum::surd_unchecked(Rational::new(BigInt::one(), lcm), radicand);
        Self::from_weighted(tuple, scale, entries)
    }

    /// `Σ cᵢ·yᵢ` over the integer parts, ignoring the scales; the result has
    /// scale one.
    pub fn combine(tuple: &PartitionTuple, terms: &[(BigInt, &SparseKronVector)]) -> Result<Self> {
        let mut merged: Vec<(u64, BigInt)> =
            Vec::with_capacity(terms.iter().map(|(_, v)| v.nnz()).sum());
        for (c, v) in terms {
            if &v.tuple != tuple {
                return Err(KronError::Input(format!(
                    "cannot combine a vector over {} into {tuple}",
                    v.tuple
                )));
            }
            if c.is_zero() {
                continue;
            }
            merged.extend(v.keys.iter().zip(&v.vals).map(|(k, y)| (*k, y * c)));
        }
        Self::from_weighted(tuple.clone(), SurdSum::one(), merged)
    }

    /// Dense coefficient list in key order (small vectors only).
    pub fn to_dense(&self) -> Result<Vec<SurdSum>> {
        let total: u64 = self.tables.iter().map(|t| t.len() as u64).product();
        if total > 1 << 24 {
            return Err(KronError::Cap(format!(
                "dense expansion of {total} entries"
            )));
        }
        let mut out = vec![SurdSum::zero(); total as usize];
        for p in 0..self.keys.len() {
            out[self.keys[p] as usize] = self.coefficient_at(p);
        }
        Ok(out)
    }

    pub fn from_dense(tuple: PartitionTuple, dense: &[SurdSum]) -> Result<Self> {
        let tables = tables_for(&tuple);
        let total: usize = tables.iter().map(|t| t.len()).product();
        if dense.len() != total {
            return Err(KronError::Input(format!(
                "dense vector of length {} for dimension {total}",
                dense.len()
            )));
        }
        let strides = strides_for(&tables)?;
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let paths = strides
                    .iter()
                    .zip(&tables)
                    .map(|(s, t)| t.paths[((k as u64 / s) % t.len() as u64) as usize])
                    .collect();
                (paths, c.clone())
            });
        let mut v = Self::from_entries(tuple, entries)?;
        v.normalized = false;
        Ok(v)
    }

    pub(crate) fn mark_normalized(&mut self, flag: bool) {
        self.normalized = flag;
    }

    /// Text form: headers then one `q1;q2;…<TAB>coefficient` line per entry.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "#n={}", self.tuple.n);
        let parts: Vec<String> = self.tuple.parts.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "#tuple={}", parts.join(","));
        let _ = writeln!(s, "#normalized={}", self.normalized);
        for (paths, c) in self.iter() {
            let key: Vec<String> = paths.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(s, "{}\t{}", key.join(";"), c);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut parts: Option<Vec<usize>> = None;
        let mut normalized = false;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h
                    .split_once('=')
                    .ok_or_else(|| KronError::Parse(format!("line {}: bad header", lineno + 1)))?;
                match k.trim() {
                    "n" => {
                        n = Some(
                            v.trim()
                                .parse()
                                .map_err(|_| KronError::Parse("bad #n".into()))?,
                        )
                    }
                    "tuple" => {
                        parts = Some(
                            v.split(',')
                                .map(|x| x.trim().parse::<usize>())
                                .collect::<std::result::Result<_, _>>()
                                .map_err(|_| KronError::Parse("bad #tuple".into()))?,
                        )
                    }
                    "normalized" => normalized = v.trim() == "true",
                    _ => {}
                }
                continue;
            }
            let (key, val) = line
                .split_once('\t')
                .ok_or_else(|| KronError::Parse(format!("line {}: missing tab", lineno + 1)))?;
            let paths = key
                .split(';')
                .map(|q| q.parse::<YamanouchiPath>())
                .collect::<Result<Vec<_>>>()?;
            rows.push((paths, val.parse::<SurdSum>()?));
        }
        let n = n.ok_or_else(|| KronError::Parse("missing #n header".into()))?;
        let parts = parts.ok_or_else(|| KronError::Parse("missing #tuple header".into()))?;
        let tuple = PartitionTuple::new(n, parts)?;
        let mut v = Self::from_entries(tuple, rows)?;
        v.normalized = normalized;
        Ok(v)
    }
}
