//! Orthonormal bases of Kronecker subspaces and Clebsch-Gordan export.
//!
//! Gram-Schmidt runs on the integer parts `y` of the candidates. Each
//! accepted direction is kept as `u_k = Σ_j C_kj·y_j` with rational `C`, so
//! projections and residual norms stay rational and the only square root is
//! the final `1/√⟨u_k,u_k⟩`. Scales of the inputs only affect signs, which
//! the sign convention fixes anyway.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KronError, Result};
use crate::graph::{named_graph, sketch_vector, GraphEngine, InnerAssignment, StitchGraph};
use crate::modular::{primes_below_limit, Crt, ModP};
use crate::numeric::{Rational, SurdSum};
use crate::partitions::{
    in_w_polytope, kron_coeff_general, path_table, sn_dim, PartitionTuple, YamanouchiPath,
};
use crate::vector::SparseKronVector;
use crate::wkron::unnormalized_w_state;

/// Where a basis vector came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    W,
    Graph { graph: String, mu: String },
    Input { index: usize },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::W => write!(f, "W"),
            Provenance::Graph { graph, mu } => write!(f, "{graph}:{mu}"),
            Provenance::Input { index } => write!(f, "input:{index}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KronBasis {
    pub tuple: PartitionTuple,
    pub vectors: Vec<SparseKronVector>,
    pub provenance: Vec<Provenance>,
}

impl KronBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// True iff the vectors are exactly orthonormal.
    pub fn is_orthonormal(&self) -> Result<bool> {
        for (i, a) in self.vectors.iter().enumerate() {
            for b in &self.vectors[i..] {
                let want = if std::ptr::eq(a, b) {
                    SurdSum::one()
                } else {
                    SurdSum::zero()
                };
                if a.inner(b)? != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn inner_product(a: &SparseKronVector, b: &SparseKronVector) -> Result<SurdSum> {
    a.inner(b)
}

/// Incremental exact Gram-Schmidt on Gram data.
#[derive(Clone, Debug, Default)]
pub struct GramGs {
    coeffs: Vec<Vec<Rational>>,
    norms: Vec<Rational>,
}

impl GramGs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// Offers a candidate with `cross[j] = ⟨y, y_j⟩` against the accepted
    /// candidates and `self_norm = ⟨y, y⟩`. Returns whether it was accepted.
    pub fn offer(&mut self, cross: &[Rational], self_norm: &Rational) -> Result<bool> {
        let m = self.len();
        if cross.len() != m {
            return Err(KronError::Input(format!(
                "{} cross products for {m} accepted vectors",
                cross.len()
            )));
        }
        let mut row = vec![Rational::zero(); m + 1];
        row[m] = Rational::one();
        let mut residual = self_norm.clone();
        for k in 0..m {
            let proj: Rational = self.coeffs[k].iter().zip(cross).map(|(c, x)| c * x).sum();
            if proj.is_zero() {
                continue;
            }
            let r = &proj / &self.norms[k];
            residual -= &proj * &r;
            for (j, c) in self.coeffs[k].iter().enumerate() {
                row[j] -= &r * c;
            }
        }
        if residual.is_zero() {
            return Ok(false);
        }
        if residual.is_negative() {
            return Err(KronError::Verification(format!(
                "negative residual norm {residual}"
            )));
        }
        for r in self.coeffs.iter_mut() {
            r.push(Rational::zero());
        }
        self.coeffs.push(row);
        self.norms.push(residual);
        Ok(true)
    }

    /// `C[k][j]`: coefficient of accepted candidate `j` in direction `k`.
    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }

    /// `⟨u_k, u_k⟩`.
    pub fn norms(&self) -> &[Rational] {
        &self.norms
    }

    /// Exact unit vectors from the accepted integer parts.
    pub fn materialize(
        &self,
        tuple: &PartitionTuple,
        accepted: &[&SparseKronVector],
    ) -> Result<Vec<SparseKronVector>> {
        self.coeffs
            .iter()
            .map(|row| {
                let den = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                let terms: Vec<(BigInt, &SparseKronVector)> = row
                    .iter()
                    .zip(accepted)
                    .map(|(c, v)| ((c * Rational::from_integer(den.clone())).to_integer(), *v))
                    .collect();
                SparseKronVector::combine(tuple, &terms)?.normalized()
            })
            .collect()
    }
}

/// Classical Gram-Schmidt in input order; zero residuals are skipped.
pub fn gram_schmidt(vs: &[SparseKronVector]) -> Result<KronBasis> {
    let prov = (0..vs.len())
        .map(|index| Provenance::Input { index })
        .collect::<Vec<_>>();
    gram_schmidt_with(vs, prov)
}

/// As [`gram_schmidt`], carrying a provenance record per input.
pub fn gram_schmidt_with(
    vs: &[SparseKronVector],
    provenance: Vec<Provenance>,
) -> Result<KronBasis> {
    let Some(first) = vs.first() else {
        return Err(KronError::Input(
            "gram_schmidt needs at least one vector".into(),
        ));
    };
    let tuple = first.tuple().clone();
    let mut gs = GramGs::new();
    let mut accepted: Vec<&SparseKronVector> = Vec::new();
    let mut prov = Vec::new();
    for (v, p) in vs.iter().zip(provenance) {
        if v.tuple() != &tuple {
            return Err(KronError::Input(format!(
                "vector over {} in a basis for {tuple}",
                v.tuple()
            )));
        }
        if v.is_zero() {
            continue;
        }
        let cross = accepted
            .iter()
            .map(|a| v.raw_inner(a))
            .collect::<Result<Vec<_>>>()?;
        if gs.offer(&cross, &v.raw_inner(v)?)? {
            accepted.push(v);
            prov.push(p);
        }
    }
    let vectors = gs.materialize(&tuple, &accepted)?;
    Ok(KronBasis {
        tuple,
        vectors,
        provenance: prov,
    })
}

/// Candidate generators of a Kronecker subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Candidate {
    W,
    Graph(InnerAssignment),
}

#[derive(Clone, Debug)]
pub struct BasisOptions {
    /// Stop once the basis reaches the Kronecker coefficient.
    pub stop_at_kron: bool,
    /// Dense sizes above this use sketch screening before exact work.
    pub screen_above: u64,
    /// Cap on the dense size of any single state.
    pub entry_cap: u64,
    pub seed: u64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            stop_at_kron: true,
            screen_above: 1 << 16,
            entry_cap: crate::graph::DEFAULT_ENTRY_CAP,
            seed: 0x6b726f6e,
        }
    }
}

impl BasisOptions {
    /// Every candidate is built exactly and no early stop is taken.
    pub fn exhaustive() -> Self {
        BasisOptions {
            stop_at_kron: false,
            screen_above: u64::MAX,
            ..Default::default()
        }
    }
}

/// W first when the tuple admits it, then compatible inner labels in
/// lexicographic order.
pub fn candidates(engine: &GraphEngine) -> Result<Vec<Candidate>> {
    let t = engine.tuple();
    let mut out = Vec::new();
    if t.len() >= 2 && in_w_polytope(t) {
        out.push(Candidate::W);
    }
    out.extend(engine.assignments()?.into_iter().map(Candidate::Graph));
    Ok(out)
}

fn provenance_of(c: &Candidate, graph_name: &str) -> Provenance {
    match c {
        Candidate::W => Provenance::W,
        Candidate::Graph(mu) => Provenance::Graph {
            graph: graph_name.to_string(),
            mu: mu.to_string(),
        },
    }
}

fn weighted_candidate(engine: &GraphEngine, c: &Candidate) -> Result<SparseKronVector> {
    match c {
        Candidate::W => unnormalized_w_state(engine.tuple()),
        Candidate::Graph(mu) => engine.weighted_state(mu),
    }
}

/// Candidates whose sketches modulo a prime are independent, in order.
/// A sketch closes all legs but the widest with random vectors; sketch
/// independence implies exact independence.
pub fn screen_candidates(
    engine: &GraphEngine,
    cands: &[Candidate],
    limit: usize,
    seed: u64,
) -> Result<Vec<Candidate>> {
    let p = ModP::new(primes_below_limit(1)[0]);
    let dims: Vec<usize> = engine
        .tuple()
        .partitions()
        .map(|q| path_table(q).len())
        .collect();
    let keep = (0..dims.len())
        .max_by_key(|&i| (dims[i], std::cmp::Reverse(i)))
        .unwrap_or(0);
    let reps = if 2 * dims[keep] >= limit {
        2
    } else {
        limit.div_ceil(dims[keep]) + 1
    };
    let caps = engine.sketch_caps(keep, p, seed, reps);
    let mut echelon = Echelon::new(p);
    let mut out = Vec::new();
    for c in cands {
        let s = match c {
            Candidate::W => sketch_vector(&unnormalized_w_state(engine.tuple())?, p, &caps),
            Candidate::Graph(mu) => engine.sketch(mu, p, &caps)?,
        };
        if echelon.insert(s) {
            out.push(c.clone());
            if out.len() >= limit {
                break;
            }
        }
    }
    Ok(out)
}

/// Row echelon form modulo a prime, for incremental rank tests.
struct Echelon {
    p: ModP,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(p: ModP) -> Self {
        Echelon {
            p,
            rows: Vec::new(),
        }
    }

    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = p.sub(*x, p.mul(c, *r));
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = p.inv(v[piv]);
        for x in v.iter_mut() {
            *x = p.mul(*x, inv);
        }
        // keep earlier rows reduced in the new pivot column
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = p.sub(*x, p.mul(c, *r));
                }
            }
        }
        self.rows.push((piv, v));
        true
    }
}

/// Orthonormal basis of the subspace spanned by the W state and the graph
/// states of `graph`, in candidate order.
pub fn kron_basis_with(
    graph_name: &str,
    g: &StitchGraph,
    ext: &PartitionTuple,
    opts: &BasisOptions,
) -> Result<KronBasis> {
    let engine = GraphEngine::new(g.clone(), ext.clone())?.with_entry_cap(opts.entry_cap);
    let k = kron_coeff_general(ext) as usize;
    let limit = if opts.stop_at_kron { k } else { usize::MAX };
    let mut cands = candidates(&engine)?;
    if limit == 0 {
        cands.clear();
    } else if engine.output_len() > opts.screen_above {
        cands = screen_candidates(&engine, &cands, limit, opts.seed)?;
    }
    let screened = engine.output_len() > opts.screen_above;
    let mut gs = GramGs::new();
    let mut accepted: Vec<SparseKronVector> = Vec::new();
    let mut prov = Vec::new();
    let mut total_nnz: u64 = 0;
    for c in &cands {
        if gs.len() >= limit {
            break;
        }
        let y = weighted_candidate(&engine, c)?;
        if y.is_zero() {
            continue;
        }
        let cross = accepted
            .iter()
            .map(|a| y.raw_inner(a))
            .collect::<Result<Vec<_>>>()?;
        if gs.offer(&cross, &y.raw_inner(&y)?)? {
            total_nnz += y.nnz() as u64;
            if total_nnz > opts.entry_cap {
                return Err(KronError::Cap(format!(
                    "basis needs more than {} stored entries",
                    opts.entry_cap
                )));
            }
            accepted.push(y);
            prov.push(provenance_of(c, graph_name));
        } else if screened {
            return Err(KronError::Verification(format!(
                "screened candidate {} is dependent",
                provenance_of(c, graph_name)
            )));
        }
    }
    let refs: Vec<&SparseKronVector> = accepted.iter().collect();
    let vectors = gs.materialize(ext, &refs)?;
    Ok(KronBasis {
        tuple: ext.clone(),
        vectors,
        provenance: prov,
    })
}

pub fn kron_basis(graph_name: &str, ext: &PartitionTuple) -> Result<KronBasis> {
    kron_basis_with(
        graph_name,
        &named_graph(graph_name)?,
        ext,
        &BasisOptions::default(),
    )
}

/// Dimension spanned by the W state (when admissible) and all graph states.
pub fn effective_kron_coeff(g: &StitchGraph, ext: &PartitionTuple) -> Result<usize> {
    Ok(kron_basis_with("graph", g, ext, &BasisOptions::exhaustive())?.len())
}

/// Basis known through exact Gram data rather than explicit vectors:
/// direction `k` is `Σ_j coeffs[k][j]·y_j / √norms[k]` over the candidates.
#[derive(Clone, Debug, Serialize)]
pub struct ImplicitBasis {
    pub tuple: String,
    pub graph: String,
    pub candidates: Vec<Provenance>,
    #[serde(serialize_with = "ser_matrix")]
    pub gram: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser_matrix")]
    pub coeffs: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser_vec")]
    pub norms: Vec<Rational>,
}

fn ser_matrix<S: serde::Serializer>(
    m: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    v.serialize(s)
}

fn ser_vec<S: serde::Serializer>(m: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<String> = m.iter().map(|x| x.to_string()).collect();
    v.serialize(s)
}

impl ImplicitBasis {
    pub fn dimension(&self) -> usize {
        self.norms.len()
    }

    /// Exact check that `C·G·Cᵀ = diag(norms)` with positive norms.
    pub fn verify(&self) -> bool {
        let m = self.norms.len();
        if self.coeffs.len() != m || self.gram.len() != m {
            return false;
        }
        let gc: Vec<Vec<Rational>> = self
            .coeffs
            .iter()
            .map(|row| {
                (0..m)
                    .map(|j| row.iter().zip(&self.gram).map(|(c, g)| c * &g[j]).sum())
                    .collect()
            })
            .collect();
        for a in 0..m {
            for b in 0..m {
                let v: Rational = gc[a].iter().zip(&self.coeffs[b]).map(|(x, c)| x * c).sum();
                let want = if a == b {
                    self.norms[a].clone()
                } else {
                    Rational::zero()
                };
                if v != want {
                    return false;
                }
            }
        }
        self.norms.iter().all(|n| n.is_positive())
    }
}

/// Dense mod-p metric weights `∏ᵢ L_i/D(qⁱ)` in key order.
fn metric_residues(t: &PartitionTuple, p: ModP) -> Vec<u32> {
    let tables: Vec<_> = t.partitions().map(path_table).collect();
    let mut w = vec![1u64];
    for tab in &tables {
        let cof: Vec<u64> = tab.cofactors.iter().map(|c| p.from_biguint(c)).collect();
        w = w
            .iter()
            .flat_map(|&a| cof.iter().map(move |&c| p.mul(a, c)))
            .collect();
    }
    w.into_iter().map(|x| x as u32).collect()
}

fn metric_f64(t: &PartitionTuple) -> Vec<f64> {
    use num_traits::ToPrimitive;
    let mut w = vec![1f64];
    for part in t.partitions() {
        let tab = path_table(part);
        let cof: Vec<f64> = tab
            .cofactors
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        w = w
            .iter()
            .flat_map(|&a| cof.iter().map(move |&c| a * c))
            .collect();
    }
    w
}

fn dense_residues(v: &SparseKronVector, p: ModP, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for (&k, y) in v.keys().iter().zip(v.weighted_values()) {
        out[k as usize] = p.from_bigint(y) as u32;
    }
    out
}

fn dot_mod(a: &[u32], b: &[u32], p: ModP) -> u64 {
    let mut acc = 0u64;
    for (ca, cb) in a.chunks(15).zip(b.chunks(15)) {
        let mut s = 0u64;
        for (&x, &y) in ca.iter().zip(cb) {
            s += x as u64 * y as u64;
        }
        acc = (acc + s % p.p) % p.p;
    }
    acc
}

/// Exact Gram matrix `⟨y_i, y_j⟩` of the candidates, computed modulo
/// enough primes to cover a Cauchy-Schwarz bound from absolute values.
pub fn modular_gram(engine: &GraphEngine, cands: &[Candidate]) -> Result<Vec<Vec<Rational>>> {
    let t = engine.tuple();
    let len = engine.output_len() as usize;
    let w = metric_f64(t);
    let w_vec = if cands.contains(&Candidate::W) {
        Some(unnormalized_w_state(t)?)
    } else {
        None
    };
    let mut bounds = Vec::with_capacity(cands.len());
    for c in cands {
        let b: f64 = match c {
            Candidate::W => {
                use num_traits::ToPrimitive;
                let v = w_vec.as_ref().unwrap();
                v.keys()
                    .iter()
                    .zip(v.weighted_values())
                    .map(|(&k, y)| y.to_f64().unwrap().powi(2) * w[k as usize])
                    .sum()
            }
            Candidate::Graph(mu) => engine
                .magnitude_bounds(mu)?
                .iter()
                .zip(&w)
                .map(|(y, x)| y * y * x)
                .sum(),
        };
        bounds.push(b * 1.01);
    }
    let max = bounds.iter().copied().fold(0.0, f64::max);
    let count = Crt::primes_for_bits(max.log2().max(0.0) + 1.0);
    let primes = primes_below_limit(count);
    let m = cands.len();
    let mut residues = vec![vec![vec![0u64; count]; m]; m];
    for (pi, &prime) in primes.iter().enumerate() {
        let p = ModP::new(prime);
        let metric = metric_residues(t, p);
        let ys: Vec<Vec<u32>> = cands
            .iter()
            .map(|c| match c {
                Candidate::W => Ok(dense_residues(w_vec.as_ref().unwrap(), p, len)),
                Candidate::Graph(mu) => engine.residues(mu, p),
            })
            .collect::<Result<_>>()?;
        for i in 0..m {
            let z: Vec<u32> = ys[i]
                .iter()
                .zip(&metric)
                .map(|(&a, &b)| p.mul(a as u64, b as u64) as u32)
                .collect();
            for j in i..m {
                let d = dot_mod(&z, &ys[j], p);
                residues[i][j][pi] = d;
                residues[j][i][pi] = d;
            }
        }
    }
    let crt = Crt::new(primes);
    let den: BigInt = t
        .partitions()
        .map(|q| BigInt::from(path_table(q).weight_lcm.clone()))
        .product();
    Ok(residues
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| Rational::new(crt.reconstruct(r), den.clone()))
                .collect()
        })
        .collect())
}

/// Basis for cases too large to hold every vector: sketch screening
/// selects candidates, then the exact Gram matrix certifies them.
pub fn implicit_kron_basis(
    graph_name: &str,
    g: &StitchGraph,
    ext: &PartitionTuple,
    seed: u64,
) -> Result<ImplicitBasis> {
    let engine = GraphEngine::new(g.clone(), ext.clone())?;
    let k = kron_coeff_general(ext) as usize;
    let cands = candidates(&engine)?;
    let chosen = screen_candidates(&engine, &cands, k, seed)?;
    let gram = modular_gram(&engine, &chosen)?;
    let mut gs = GramGs::new();
    for (i, row) in gram.iter().enumerate() {
        if !gs.offer(&row[..gs.len()], &row[i])? {
            return Err(KronError::Verification(format!(
                "screened candidate {i} is dependent"
            )));
        }
    }
    let basis = ImplicitBasis {
        tuple: ext.to_string(),
        graph: graph_name.to_string(),
        candidates: chosen
            .iter()
            .map(|c| provenance_of(c, graph_name))
            .collect(),
        gram,
        coeffs: gs.coefficients().to_vec(),
        norms: gs.norms().to_vec(),
    };
    if !basis.verify() {
        return Err(KronError::Verification("Gram certificate failed".into()));
    }
    Ok(basis)
}

/// One Clebsch-Gordan coefficient: the non-pivot paths, the pivot path,
/// the multiplicity index and the value.
#[derive(Clone, Debug, PartialEq)]
pub struct CgcRecord {
    pub others: Vec<YamanouchiPath>,
    pub pivot_path: YamanouchiPath,
    pub s: usize,
    pub value: SurdSum,
}

/// `C = √f · K` for the pivot part's dimension `f`.
pub fn export_cgc(b: &KronBasis, pivot: usize) -> Result<Vec<CgcRecord>> {
    if pivot >= b.tuple.len() {
        return Err(KronError::Input(format!(
            "pivot {pivot} out of range for {}",
            b.tuple
        )));
    }
    let f = Rational::from_integer(sn_dim(b.tuple.part(pivot)));
    let root = SurdSum::sqrt_of(&f)?;
    let mut out = Vec::new();
    for (s, v) in b.vectors.iter().enumerate() {
        for (paths, c) in v.iter() {
            let mut others = paths.clone();
            let pivot_path = others.remove(pivot);
            out.push(CgcRecord {
                others,
                pivot_path,
                s,
                value: &c * &root,
            });
        }
    }
    Ok(out)
}

/// Both exact orthogonality relations available within one tuple:
/// `Σ_q C^s(q,p)·C^{s'}(q,p') = δ_{ss'}δ_{pp'}` and
/// `Σ_{q,p} C^s(q,p)·C^{s'}(q,p) = f·δ_{ss'}`.
pub fn cgc_orthogonality(records: &[CgcRecord], multiplicity: usize, f: usize) -> bool {
    use std::collections::BTreeMap;
    let mut by_key: BTreeMap<(Vec<YamanouchiPath>, usize), Vec<(usize, SurdSum)>> = BTreeMap::new();
    let mut pivots: BTreeMap<YamanouchiPath, usize> = BTreeMap::new();
    for r in records {
        let next = pivots.len();
        let pi = *pivots.entry(r.pivot_path).or_insert(next);
        by_key
            .entry((r.others.clone(), r.s))
            .or_default()
            .push((pi, r.value.clone()));
    }
    let np = pivots.len();
    let dim = np * multiplicity;
    let mut gram = vec![vec![SurdSum::zero(); dim]; dim];
    let mut others: BTreeMap<Vec<YamanouchiPath>, Vec<(usize, SurdSum)>> = BTreeMap::new();
    for ((q, s), list) in by_key {
        for (pi, v) in list {
            others.entry(q.clone()).or_default().push((s * np + pi, v));
        }
    }
    for list in others.values() {
        for (a, va) in list {
            for (b, vb) in list {
                gram[*a][*b] += &(va * vb);
            }
        }
    }
    let rel1 = (0..dim).all(|a| {
        (0..dim).all(|b| {
            gram[a][b]
                == if a == b {
                    SurdSum::one()
                } else {
                    SurdSum::zero()
                }
        })
    });
    let rel2 = (0..multiplicity).all(|s| {
        (0..multiplicity).all(|t| {
            let tot: SurdSum = (0..np).map(|p| gram[s * np + p][t * np + p].clone()).sum();
            tot == if s == t {
                SurdSum::from_int(f as i64)
            } else {
                SurdSum::zero()
            }
        })
    });
    rel1 && rel2 && np == f
}

/// Tab-separated CGC table with a header naming the irreps and the pivot.
pub fn cgc_to_tsv(tuple: &PartitionTuple, pivot: usize, records: &[CgcRecord]) -> String {
    use std::fmt::Write as _;
    let irreps: Vec<String> = tuple.partitions().map(|p| p.to_string()).collect();
    let mut s = String::new();
    let _ = writeln!(s, "# irreps={} pivot={}", irreps.join(","), pivot);
    let _ = writeln!(s, "others\tpivot\ts\tvalue");
    for r in records {
        let o: Vec<String> = r.others.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "{}\t{}\t{}\t{}", o.join(";"), r.pivot_path, r.s, r.value);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::wkron::w_kron_state;

    fn tup(s: &str) -> PartitionTuple {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_cases() {
        let w = w_kron_state(&tup("3:1,1,1")).unwrap();
        let b = gram_schmidt(std::slice::from_ref(&w)).unwrap();
        assert_eq!(b.vectors, vec![w.clone()]);
        let b2 = gram_schmidt(&[w.clone(), w.clone()]).unwrap();
        assert_eq!(b2.len(), 1);
        assert_eq!(inner_product(&w, &w).unwrap(), SurdSum::one());
        let again = gram_schmidt(&b.vectors).unwrap();
        assert_eq!(again.vectors, b.vectors);
    }

    #[test]
    fn triangle_n6_constant() {
        let t = tup("6:2,2,2");
        let tri = named_graph("triangle").unwrap();
        let w = w_kron_state(&t).unwrap();
        let g = crate::graph::graph_kron_state(&tri, &t, &"111".parse().unwrap())
            .unwrap()
            .unwrap();
        let ip = inner_product(&w, &g).unwrap();
        assert_eq!(ip.square().as_rational().unwrap(), rat(361, 1961));
        let b = gram_schmidt(&[w.clone(), g.clone()]).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.is_orthonormal().unwrap());
        // second vector is (√1961/40)(g − ⟨g,w⟩w) up to sign
        let c = SurdSum::sqrt_of(&rat(1961, 1600)).unwrap();
        let expect = g.sub_scaled(&ip, &w).unwrap();
        let e2 = &b.vectors[1];
        let lhs = inner_product(e2, &expect).unwrap().abs();
        assert_eq!(lhs * c, SurdSum::one());
        assert_eq!(e2.nnz(), 231);
        assert_eq!(w.nnz(), 192);
    }

    #[test]
    fn pair_basis_and_orthogonality() {
        let t = tup("3:1,1,1,1");
        let b = kron_basis("pair", &t).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.is_orthonormal().unwrap());
        assert_eq!(
            effective_kron_coeff(&named_graph("pair").unwrap(), &t).unwrap(),
            2
        );
        assert_eq!(
            effective_kron_coeff(&named_graph("prism47").unwrap(), &t).unwrap(),
            3
        );
        assert_eq!(
            effective_kron_coeff(&named_graph("triangle").unwrap(), &tup("6:2,2,2")).unwrap(),
            2
        );
    }

    #[test]
    fn triangle_n4_basis() {
        let b = kron_basis("triangle", &tup("4:2,2,2")).unwrap();
        assert_eq!(b.len(), 1);
        let g = crate::graph::graph_kron_state(
            &named_graph("triangle").unwrap(),
            &tup("4:2,2,2"),
            &"111".parse().unwrap(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(b.vectors[0], g);
    }

    #[test]
    fn screened_matches_exhaustive() {
        let t = tup("5:2,2,2,2");
        let g = named_graph("square").unwrap();
        let exact = kron_basis_with("square", &g, &t, &BasisOptions::exhaustive()).unwrap();
        let opts = BasisOptions {
            screen_above: 0,
            ..Default::default()
        };
        let screened = kron_basis_with("square", &g, &t, &opts).unwrap();
        assert_eq!(exact.len(), screened.len());
        assert!(crate::oracle::span_equal(&exact.vectors, &screened.vectors).unwrap());
    }

    #[test]
    fn implicit_agrees_with_explicit() {
        let t = tup("5:2,2,2,2");
        let g = named_graph("prism47").unwrap();
        let imp = implicit_kron_basis("prism47", &g, &t, 1).unwrap();
        assert!(imp.verify());
        assert_eq!(imp.dimension(), kron_coeff_general(&t) as usize);
        // candidates are raw contractions; stored states carry their content in the scale
        let engine = GraphEngine::new(g, t).unwrap();
        let ys: Vec<SparseKronVector> = imp
            .candidates
            .iter()
            .map(|p| match p {
                Provenance::W => unnormalized_w_state(engine.tuple()).unwrap(),
                Provenance::Graph { mu, .. } => {
                    engine.weighted_state(&mu.parse().unwrap()).unwrap()
                }
                Provenance::Input { .. } => unreachable!(),
            })
            .collect();
        for i in 0..ys.len() {
            for j in 0..ys.len() {
                let mut want = ys[i].raw_inner(&ys[j]).unwrap();
                for (k, y) in [(i, &ys[i]), (j, &ys[j])] {
                    if imp.candidates[k] != Provenance::W {
                        want *= y.scale().0;
                    }
                }
                assert_eq!(want, imp.gram[i][j]);
            }
        }
    }

    #[test]
    fn cgc_n4() {
        let t = tup("4:1,1,2");
        let b = gram_schmidt(&[w_kron_state(&t).unwrap()]).unwrap();
        let recs = export_cgc(&b, 2).unwrap();
        let third = SurdSum::sqrt_of(&rat(1, 3)).unwrap();
        let sixth = SurdSum::sqrt_of(&rat(1, 6)).unwrap();
        assert_eq!(recs.iter().filter(|r| r.value.abs() == third).count(), 4);
        assert_eq!(recs.iter().filter(|r| r.value.abs() == sixth).count(), 4);
        assert_eq!(recs.len(), 8);
        assert!(cgc_orthogonality(&recs, 1, 2));
        let triv = gram_schmidt(&[w_kron_state(&tup("3:0,0,0")).unwrap()]).unwrap();
        let r = export_cgc(&triv, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, SurdSum::one());
    }
}
