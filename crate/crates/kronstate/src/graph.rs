//! Stitch graphs of three-leg W vertices and their Kronecker states.
//!
//! A graph state for external labels `λ` and inner labels `μ` is the
//! contraction of one W-Kronecker tensor per vertex, with each inner edge
//! identifying the path indices of its two endpoints. In weighted
//! coordinates the integer part is
//!
//! `y(q) = Σ_a ∏_v y_v(paths at v) · ∏_e L_e / D(a_e)`
//!
//! where `L_e` is the lcm of the path weights of the edge label. Exact values
//! come from contracting modulo word-sized primes and Chinese remaindering,
//! with the number of primes fixed by a floating-point bound on `|y|`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KronError, Result};
use crate::modular::{primes_below_limit, Crt, ModP};
use crate::numeric::SurdSum;
use crate::partitions::{in_w_polytope, path_table, PartitionTuple, TwoRowPartition};
use crate::tensor::{contract_auto, F64Ring, Network, Ring, Tensor};
use crate::vector::SparseKronVector;
use crate::wkron::unnormalized_w_state;

/// `(vertex, slot)` with slot in `0..3`.
pub type Slot = (usize, usize);

/// Largest intermediate tensor (entries) before contraction is sliced.
pub const SLICE_BUDGET: f64 = (1u64 << 24) as f64;

/// Default cap on the dense size of a contracted state.
pub const DEFAULT_ENTRY_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StitchGraph {
    pub vertex_count: usize,
    pub inner_edges: Vec<(Slot, Slot)>,
    pub external_legs: Vec<Slot>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    vertices: usize,
    edges: Vec<[[usize; 2]; 2]>,
    external: Vec<[usize; 2]>,
}

impl StitchGraph {
    pub fn new(
        vertex_count: usize,
        inner_edges: Vec<(Slot, Slot)>,
        external_legs: Vec<Slot>,
    ) -> Result<Self> {
        let g = StitchGraph {
            vertex_count,
            inner_edges,
            external_legs,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![[false; 3]; self.vertex_count];
        let mut mark = |(v, s): Slot| -> Result<()> {
            if v >= self.vertex_count || s > 2 {
                return Err(KronError::Input(format!("slot ({v},{s}) out of range")));
            }
            if seen[v][s] {
                return Err(KronError::Input(format!("slot ({v},{s}) used twice")));
            }
            seen[v][s] = true;
            Ok(())
        };
        for &(a, b) in &self.inner_edges {
            if a.0 == b.0 {
                return Err(KronError::Input(format!("self-loop at vertex {}", a.0)));
            }
            mark(a)?;
            mark(b)?;
        }
        for &l in &self.external_legs {
            mark(l)?;
        }
        if let Some(v) = seen.iter().position(|s| s.iter().any(|x| !x)) {
            return Err(KronError::Input(format!("vertex {v} has an unused slot")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: GraphJson =
            serde_json::from_str(text).map_err(|e| KronError::Parse(e.to_string()))?;
        Self::from_json_value(j)
    }

    fn from_json_value(j: GraphJson) -> Result<Self> {
        let edges = j
            .edges
            .iter()
            .map(|[a, b]| ((a[0], a[1]), (b[0], b[1])))
            .collect();
        let legs = j.external.iter().map(|l| (l[0], l[1])).collect();
        Self::new(j.vertices, edges, legs)
    }

    pub fn to_json(&self) -> String {
        let j = GraphJson {
            note: None,
            vertices: self.vertex_count,
            edges: self
                .inner_edges
                .iter()
                .map(|&(a, b)| [[a.0, a.1], [b.0, b.1]])
                .collect(),
            external: self.external_legs.iter().map(|&(v, s)| [v, s]).collect(),
        };
        serde_json::to_string(&j).expect("plain data")
    }

    /// Builds a graph from vertex pairs, giving each vertex its slots in
    /// the order edges mention it; legs fill the remaining slots in order.
    pub fn from_pairs(
        vertex_count: usize,
        pairs: &[(usize, usize)],
        legs: &[usize],
    ) -> Result<Self> {
        let mut next = vec![0usize; vertex_count];
        let mut take = |v: usize| -> Result<Slot> {
            if v >= vertex_count || next[v] > 2 {
                return Err(KronError::Input(format!(
                    "vertex {v} has more than three legs"
                )));
            }
            next[v] += 1;
            Ok((v, next[v] - 1))
        };
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let sa = take(a)?;
            let sb = take(b)?;
            edges.push((sa, sb));
        }
        let ext = legs.iter().map(|&v| take(v)).collect::<Result<Vec<_>>>()?;
        Self::new(vertex_count, edges, ext)
    }

    pub fn edge_count(&self) -> usize {
        self.inner_edges.len()
    }

    pub fn arity(&self) -> usize {
        self.external_legs.len()
    }

    /// For each vertex, what sits in each slot.
    fn slot_map(&self) -> Vec<[SlotUse; 3]> {
        let mut m = vec![[SlotUse::Edge(0); 3]; self.vertex_count];
        for (e, &(a, b)) in self.inner_edges.iter().enumerate() {
            m[a.0][a.1] = SlotUse::Edge(e);
            m[b.0][b.1] = SlotUse::Edge(e);
        }
        for (i, &(v, s)) in self.external_legs.iter().enumerate() {
            m[v][s] = SlotUse::Leg(i);
        }
        m
    }

    /// Partition labels (the `lam` values) seen by every vertex in slot order.
    pub fn vertex_labels(&self, ext: &PartitionTuple, mu: &[usize]) -> Vec<[usize; 3]> {
        self.slot_map()
            .iter()
            .map(|slots| {
                slots.map(|u| match u {
                    SlotUse::Edge(e) => mu[e],
                    SlotUse::Leg(i) => ext.parts[i],
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SlotUse {
    Edge(usize),
    Leg(usize),
}

const CATALOG: &str = include_str!("../data/graphs.json");

fn catalog() -> BTreeMap<String, GraphJson> {
    serde_json::from_str(CATALOG).expect("embedded catalog parses")
}

pub fn catalog_names() -> Vec<String> {
    catalog().into_keys().collect()
}

/// Provenance note recorded for a catalog entry.
pub fn catalog_note(name: &str) -> Option<String> {
    catalog().remove(name).and_then(|j| j.note)
}

pub fn named_graph(name: &str) -> Result<StitchGraph> {
    let entry = catalog().remove(name).ok_or_else(|| {
        KronError::Input(format!(
            "unknown graph '{name}' (known: {})",
            catalog_names().join(", ")
        ))
    })?;
    StitchGraph::from_json_value(entry)
}

/// Inner labels, one per inner edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InnerAssignment {
    pub mu: Vec<usize>,
}

impl fmt::Display for InnerAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mu.iter().any(|&m| m >= 10) {
            let s: Vec<String> = self.mu.iter().map(|m| m.to_string()).collect();
            write!(f, "{}", s.join(","))
        } else {
            for m in &self.mu {
                write!(f, "{m}")?;
            }
            Ok(())
        }
    }
}

impl std::str::FromStr for InnerAssignment {
    type Err = KronError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mu = if s.contains(',') {
            s.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|e| KronError::Parse(format!("bad label '{x}': {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| KronError::Parse(format!("bad label '{c}'")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(InnerAssignment { mu })
    }
}

fn triple_ok(n: usize, t: [usize; 3]) -> bool {
    t.iter().all(|&l| 2 * l <= n)
        && in_w_polytope(&PartitionTuple {
            n,
            parts: t.to_vec(),
        })
}

fn check_arity(g: &StitchGraph, ext: &PartitionTuple) -> Result<()> {
    if ext.len() != g.arity() {
        return Err(KronError::Input(format!(
            "graph has {} legs but the tuple has {} parts",
            g.arity(),
            ext.len()
        )));
    }
    Ok(())
}

/// Every inner labelling for which each vertex triple lies in the W
/// polytope, in lexicographic order.
pub fn compatible_assignments(
    g: &StitchGraph,
    ext: &PartitionTuple,
) -> Result<Vec<InnerAssignment>> {
    check_arity(g, ext)?;
    let n = ext.n;
    let slots = g.slot_map();
    let e_count = g.edge_count();
    // vertex v can be checked once its highest-numbered edge is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); e_count];
    for (v, s) in slots.iter().enumerate() {
        let last = s
            .iter()
            .filter_map(|u| {
                if let SlotUse::Edge(e) = u {
                    Some(*e)
                } else {
                    None
                }
            })
            .max();
        match last {
            Some(e) => ready[e].push(v),
            None => {
                let t = s.map(|u| {
                    if let SlotUse::Leg(i) = u {
                        ext.parts[i]
                    } else {
                        0
                    }
                });
                if !triple_ok(n, t) {
                    return Ok(Vec::new());
                }
            }
        }
    }
    let label = |mu: &[usize], u: SlotUse| match u {
        SlotUse::Edge(e) => mu[e],
        SlotUse::Leg(i) => ext.parts[i],
    };
    let mut out = Vec::new();
    let mut mu = vec![0usize; e_count];
    fn rec(
        e: usize,
        mu: &mut Vec<usize>,
        n: usize,
        ready: &[Vec<usize>],
        slots: &[[SlotUse; 3]],
        label: &dyn Fn(&[usize], SlotUse) -> usize,
        out: &mut Vec<InnerAssignment>,
    ) {
        if e == mu.len() {
            out.push(InnerAssignment { mu: mu.clone() });
            return;
        }
        for m in 0..=n / 2 {
            mu[e] = m;
            let ok = ready[e]
                .iter()
                .all(|&v| triple_ok(n, slots[v].map(|u| label(mu, u))));
            if ok {
                rec(e + 1, mu, n, ready, slots, label, out);
            }
        }
    }
    if e_count == 0 {
        return Ok(vec![InnerAssignment { mu: vec![] }]);
    }
    rec(0, &mut mu, n, &ready, &slots, &label, &mut out);
    Ok(out)
}

/// Dense-indexable W-Kronecker tensor for one vertex triple.
struct VertexTensor {
    dims: [usize; 3],
    entries: Vec<(usize, BigInt)>,
}

/// Contraction engine for one graph and one external tuple; vertex
/// tensors are built once per triple and shared across assignments.
pub struct GraphEngine {
    graph: StitchGraph,
    ext: PartitionTuple,
    vertices: Mutex<HashMap<[usize; 3], Arc<VertexTensor>>>,
    entry_cap: u64,
}

impl GraphEngine {
    pub fn new(graph: StitchGraph, ext: PartitionTuple) -> Result<Self> {
        check_arity(&graph, &ext)?;
        Ok(GraphEngine {
            graph,
            ext,
            vertices: Mutex::new(HashMap::new()),
            entry_cap: DEFAULT_ENTRY_CAP,
        })
    }

    pub fn with_entry_cap(mut self, cap: u64) -> Self {
        self.entry_cap = cap;
        self
    }

    pub fn graph(&self) -> &StitchGraph {
        &self.graph
    }

    pub fn tuple(&self) -> &PartitionTuple {
        &self.ext
    }

    pub fn assignments(&self) -> Result<Vec<InnerAssignment>> {
        compatible_assignments(&self.graph, &self.ext)
    }

    fn check_mu(&self, mu: &InnerAssignment) -> Result<Vec<[usize; 3]>> {
        if mu.mu.len() != self.graph.edge_count() {
            return Err(KronError::Input(format!(
                "{} inner labels for a graph with {} inner edges",
                mu.mu.len(),
                self.graph.edge_count()
            )));
        }
        let labels = self.graph.vertex_labels(&self.ext, &mu.mu);
        for (v, t) in labels.iter().enumerate() {
            if !triple_ok(self.ext.n, *t) {
                return Err(KronError::Input(format!(
                    "inner labels {mu} are incompatible: vertex {v} sees {:?} outside the W polytope",
                    t
                )));
            }
        }
        Ok(labels)
    }

    fn vertex(&self, t: [usize; 3]) -> Result<Arc<VertexTensor>> {
        if let Some(v) = self.vertices.lock().unwrap().get(&t) {
            return Ok(v.clone());
        }
        let tuple = PartitionTuple::new(self.ext.n, t.to_vec())?;
        let w = unnormalized_w_state(&tuple)?;
        let dims = w.dims();
        let entries = w
            .keys()
            .iter()
            .zip(w.weighted_values())
            .map(|(&k, y)| (k as usize, y.clone()))
            .collect();
        let vt = Arc::new(VertexTensor {
            dims: [dims[0], dims[1], dims[2]],
            entries,
        });
        self.vertices.lock().unwrap().insert(t, vt.clone());
        Ok(vt)
    }

    /// The network for `mu` over the integers, open legs in leg order.
    pub fn integer_network(&self, mu: &InnerAssignment) -> Result<Network<BigInt>> {
        let labels = self.check_mu(mu)?;
        self.network(
            &crate::tensor::IntRing,
            &labels,
            mu,
            &|y| y.clone(),
            &self.no_caps(),
        )
    }

    /// Dense size of the contracted state.
    pub fn output_len(&self) -> u64 {
        self.ext
            .partitions()
            .map(|p| path_table(p).len() as u64)
            .product()
    }

    /// The network for `mu`: inner edge `e` is leg `e`, external leg `i` is
    /// leg `E + i`. Legs with a cap vector are closed against it.
    fn network<R: Ring>(
        &self,
        ring: &R,
        labels: &[[usize; 3]],
        mu: &InnerAssignment,
        conv: &dyn Fn(&BigInt) -> R::Elem,
        caps: &[Option<Vec<R::Elem>>],
    ) -> Result<Network<R::Elem>> {
        let e_count = self.graph.edge_count();
        let slots = self.graph.slot_map();
        // edge factor vectors, applied at the first endpoint
        let factors: Vec<Vec<R::Elem>> = mu
            .mu
            .iter()
            .map(|&m| {
                let table = path_table(TwoRowPartition {
                    n: self.ext.n,
                    lam: m,
                });
                table
                    .cofactors
                    .iter()
                    .map(|c| conv(&BigInt::from(c.clone())))
                    .collect()
            })
            .collect();
        let mut tensors = Vec::with_capacity(self.graph.vertex_count + caps.len());
        for (v, t) in labels.iter().enumerate() {
            let vt = self.vertex(*t)?;
            let legs: Vec<usize> = slots[v]
                .iter()
                .map(|u| match *u {
                    SlotUse::Edge(e) => e,
                    SlotUse::Leg(i) => e_count + i,
                })
                .collect();
            let scaled: Vec<(usize, &Vec<R::Elem>)> = (0..3)
                .filter_map(|s| match slots[v][s] {
                    SlotUse::Edge(e) if self.graph.inner_edges[e].0 == (v, s) => {
                        Some((s, &factors[e]))
                    }
                    _ => None,
                })
                .collect();
            let [d0, d1, d2] = vt.dims;
            let strides = [d1 * d2, d2, 1];
            let mut data = vec![ring.zero(); d0 * d1 * d2];
            for (idx, y) in &vt.entries {
                let mut x = conv(y);
                for (s, f) in &scaled {
                    x = ring.mul(&x, &f[(idx / strides[*s]) % vt.dims[*s]]);
                }
                data[*idx] = x;
            }
            tensors.push(Tensor::new(legs, vt.dims.to_vec(), data)?);
        }
        let mut open = Vec::new();
        for (i, cap) in caps.iter().enumerate() {
            match cap {
                Some(vec) => tensors.push(Tensor::new(
                    vec![e_count + i],
                    vec![vec.len()],
                    vec.clone(),
                )?),
                None => open.push(e_count + i),
            }
        }
        Ok(Network { tensors, open })
    }

    fn no_caps<T>(&self) -> Vec<Option<Vec<T>>> {
        (0..self.graph.arity()).map(|_| None).collect()
    }

    fn check_cap(&self) -> Result<()> {
        let len = self.output_len();
        if len > self.entry_cap {
            return Err(KronError::Cap(format!(
                "state has {len} dense entries, cap is {}",
                self.entry_cap
            )));
        }
        Ok(())
    }

    /// The integer part `y` modulo `p`, dense and row-major over the legs.
    pub fn residues(&self, mu: &InnerAssignment, p: ModP) -> Result<Vec<u32>> {
        self.check_cap()?;
        let labels = self.check_mu(mu)?;
        let net = self.network(&p, &labels, mu, &|y| p.from_bigint(y), &self.no_caps())?;
        let t = contract_auto(&p, &net, SLICE_BUDGET)?;
        Ok(t.data.into_iter().map(|x| x as u32).collect())
    }

    /// Entrywise upper bounds on `|y|` from the contraction of absolute values.
    pub fn magnitude_bounds(&self, mu: &InnerAssignment) -> Result<Vec<f64>> {
        self.check_cap()?;
        let labels = self.check_mu(mu)?;
        let conv = |y: &BigInt| y.abs().to_f64().unwrap_or(f64::INFINITY);
        let net = self.network(&F64Ring, &labels, mu, &conv, &self.no_caps())?;
        let t = contract_auto(&F64Ring, &net, SLICE_BUDGET)?;
        // rounding in sums of nonnegative terms is far below this margin
        Ok(t.data.into_iter().map(|x| x * 1.01).collect())
    }

    /// Number of primes needed to recover entries bounded by `bounds`.
    pub fn primes_needed(bounds: &[f64]) -> Option<usize> {
        let max = bounds.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return None;
        }
        Some(Crt::primes_for_bits(max.log2().max(0.0) + 1.0))
    }

    /// The unnormalized graph state in weighted coordinates (possibly zero).
    pub fn weighted_state(&self, mu: &InnerAssignment) -> Result<SparseKronVector> {
        self.check_mu(mu)?;
        let bounds = self.magnitude_bounds(mu)?;
        let Some(k) = Self::primes_needed(&bounds) else {
            return SparseKronVector::zero(self.ext.clone());
        };
        let primes = primes_below_limit(k);
        let residues: Vec<Vec<u32>> = primes
            .iter()
            .map(|&p| self.residues(mu, ModP::new(p)))
            .collect::<Result<_>>()?;
        let crt = Crt::new(primes);
        let mut entries = Vec::new();
        let mut buf = vec![0u64; k];
        for idx in 0..bounds.len() {
            if bounds[idx] == 0.0 {
                continue;
            }
            for (b, r) in buf.iter_mut().zip(&residues) {
                *b = r[idx] as u64;
            }
            if buf.iter().all(|&x| x == 0) {
                continue;
            }
            entries.push((idx as u64, crt.reconstruct(&buf)));
        }
        SparseKronVector::from_weighted(self.ext.clone(), SurdSum::one(), entries)
    }

    /// Normalized graph state, or `None` when the contraction vanishes.
    pub fn state(&self, mu: &InnerAssignment) -> Result<Option<SparseKronVector>> {
        let w = self.weighted_state(mu)?;
        if w.is_zero() {
            return Ok(None);
        }
        Ok(Some(w.normalized()?))
    }

    /// Random vectors closing every leg except `keep`, one set per repetition.
    pub fn sketch_caps(
        &self,
        keep: usize,
        p: ModP,
        seed: u64,
        reps: usize,
    ) -> Vec<Vec<Option<Vec<u64>>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..reps)
            .map(|_| {
                self.ext
                    .partitions()
                    .enumerate()
                    .map(|(i, part)| {
                        if i == keep {
                            None
                        } else {
                            let f = path_table(part).len();
                            Some((0..f).map(|_| rng.gen_range(1..p.p)).collect())
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `y` modulo `p` with all but one leg closed against the given caps;
    /// the repetitions are concatenated.
    pub fn sketch(
        &self,
        mu: &InnerAssignment,
        p: ModP,
        caps: &[Vec<Option<Vec<u64>>>],
    ) -> Result<Vec<u64>> {
        let labels = self.check_mu(mu)?;
        let mut out = Vec::new();
        for c in caps {
            let net = self.network(&p, &labels, mu, &|y| p.from_bigint(y), c)?;
            out.extend(contract_auto(&p, &net, SLICE_BUDGET)?.data);
        }
        Ok(out)
    }
}

/// Sketch of an explicit weighted vector with the same caps as
/// [`GraphEngine::sketch`].
pub fn sketch_vector(v: &SparseKronVector, p: ModP, caps: &[Vec<Option<Vec<u64>>>]) -> Vec<u64> {
    let dims = v.dims();
    let mut out = Vec::new();
    for c in caps {
        let keep = c.iter().position(|x| x.is_none()).expect("one open leg");
        let mut acc = vec![0u64; dims[keep]];
        for (&k, y) in v.keys().iter().zip(v.weighted_values()) {
            let idx = v.indices_of(k);
            let mut x = p.from_bigint(y);
            for (i, cap) in c.iter().enumerate() {
                if let Some(r) = cap {
                    x = p.mul(x, r[idx[i]]);
                }
            }
            acc[idx[keep]] = p.add(acc[idx[keep]], x);
        }
        out.extend(acc);
    }
    out
}

/// Normalized graph-Kronecker state for a named or explicit graph.
pub fn graph_kron_state(
    g: &StitchGraph,
    ext: &PartitionTuple,
    mu: &InnerAssignment,
) -> Result<Option<SparseKronVector>> {
    GraphEngine::new(g.clone(), ext.clone())?.state(mu)
}

/// All connected loopless multigraphs with `vertices` vertices, `edges`
/// edges and maximum degree three, one per isomorphism class. Each free
/// slot becomes an external leg, ordered by vertex.
pub fn enumerate_graphs(vertices: usize, edges: usize) -> Vec<StitchGraph> {
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|a| (a + 1..vertices).map(move |b| (a, b)))
        .collect();
    let perms = permutations(vertices);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        left: usize,
        pairs: &[(usize, usize)],
        deg: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if left == 0 {
            emit(chosen);
            return;
        }
        for i in start..pairs.len() {
            let (a, b) = pairs[i];
            if deg[a] < 3 && deg[b] < 3 {
                deg[a] += 1;
                deg[b] += 1;
                chosen.push(i);
                // multi-edges: the same pair may be chosen again
                rec(i, left - 1, pairs, deg, chosen, emit);
                chosen.pop();
                deg[a] -= 1;
                deg[b] -= 1;
            }
        }
    }
    let mut deg = vec![0usize; vertices];
    let mut emit = |sel: &[usize]| {
        let es: Vec<(usize, usize)> = sel.iter().map(|&i| pairs[i]).collect();
        if !connected(vertices, &es) {
            return;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = es
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                e.sort();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            let mut d = vec![0usize; vertices];
            for &(a, b) in &es {
                d[a] += 1;
                d[b] += 1;
            }
            let legs: Vec<usize> = (0..vertices)
                .flat_map(|v| std::iter::repeat_n(v, 3 - d[v]))
                .collect();
            if let Ok(g) = StitchGraph::from_pairs(vertices, &es, &legs) {
                out.push(g);
            }
        }
    };
    rec(0, edges, &pairs, &mut deg, &mut chosen, &mut emit);
    out
}

fn connected(v: usize, es: &[(usize, usize)]) -> bool {
    let mut comp: Vec<usize> = (0..v).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(a, b) in es {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    let r = find(&mut comp, 0);
    (0..v).all(|x| find(&mut comp, x) == r)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// Integer `y` of a graph state computed without the modular engine, by
/// exact summation of vertex products. Only for small cases and tests.
pub fn weighted_state_exact(
    g: &StitchGraph,
    ext: &PartitionTuple,
    mu: &InnerAssignment,
) -> Result<SparseKronVector> {
    let engine = GraphEngine::new(g.clone(), ext.clone())?;
    let net = engine.integer_network(mu)?;
    let t = contract_auto(&crate::tensor::IntRing, &net, SLICE_BUDGET)?;
    let entries = t
        .data
        .into_iter()
        .enumerate()
        .filter(|(_, y)| !y.is_zero())
        .map(|(i, y)| (i as u64, y));
    SparseKronVector::from_weighted(ext.clone(), SurdSum::one(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_paths, YamanouchiPath};
    use crate::wkron::w_kron_coefficient;

    fn tup(s: &str) -> PartitionTuple {
        s.parse().unwrap()
    }

    fn mu(s: &str) -> InnerAssignment {
        s.parse().unwrap()
    }

    /// Direct sum over inner paths of products of W coefficients, each
    /// inner edge contributing the bipartite identification.
    fn oracle(
        g: &StitchGraph,
        ext: &PartitionTuple,
        m: &InnerAssignment,
    ) -> Option<SparseKronVector> {
        let n = ext.n;
        let labels = g.vertex_labels(ext, &m.mu);
        let ext_paths: Vec<Vec<YamanouchiPath>> = ext.partitions().map(enumerate_paths).collect();
        let inner_paths: Vec<Vec<YamanouchiPath>> =
            m.mu.iter()
                .map(|&l| enumerate_paths(TwoRowPartition { n, lam: l }))
                .collect();
        let slots = g.slot_map();
        let mut entries = Vec::new();
        let mut qi = vec![0usize; ext.len()];
        loop {
            let mut total = SurdSum::zero();
            let mut ai = vec![0usize; m.mu.len()];
            loop {
                let mut prod = SurdSum::one();
                for (v, t) in labels.iter().enumerate() {
                    let paths: Vec<YamanouchiPath> = slots[v]
                        .iter()
                        .map(|u| match *u {
                            SlotUse::Edge(e) => inner_paths[e][ai[e]],
                            SlotUse::Leg(i) => ext_paths[i][qi[i]],
                        })
                        .collect();
                    let tt = PartitionTuple {
                        n,
                        parts: t.to_vec(),
                    };
                    prod *= &w_kron_coefficient(&tt, &paths).unwrap();
                    if prod.is_zero() {
                        break;
                    }
                }
                total += &prod;
                if !odometer(
                    &mut ai,
                    &inner_paths.iter().map(|p| p.len()).collect::<Vec<_>>(),
                ) {
                    break;
                }
            }
            if !total.is_zero() {
                entries.push((
                    (0..ext.len())
                        .map(|i| ext_paths[i][qi[i]])
                        .collect::<Vec<_>>(),
                    total,
                ));
            }
            if !odometer(
                &mut qi,
                &ext_paths.iter().map(|p| p.len()).collect::<Vec<_>>(),
            ) {
                break;
            }
        }
        if entries.is_empty() {
            return None;
        }
        Some(
            SparseKronVector::from_entries(ext.clone(), entries)
                .unwrap()
                .normalized()
                .unwrap(),
        )
    }

    fn odometer(idx: &mut [usize], dims: &[usize]) -> bool {
        for d in (0..idx.len()).rev() {
            idx[d] += 1;
            if idx[d] < dims[d] {
                return true;
            }
            idx[d] = 0;
        }
        false
    }

    #[test]
    fn catalog_shapes() {
        for name in ["pair", "triangle", "square", "bowtie", "prism47"] {
            let g = named_graph(name).unwrap();
            assert_eq!(3 * g.vertex_count, 2 * g.edge_count() + g.arity(), "{name}");
            assert!(catalog_note(name).is_some());
        }
        let pair = named_graph("pair").unwrap();
        assert_eq!(pair.inner_edges, vec![((0, 2), (1, 2))]);
        assert_eq!(pair.external_legs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(named_graph("nope").is_err());
        let bowtie = named_graph("bowtie").unwrap();
        assert_eq!(
            (bowtie.vertex_count, bowtie.edge_count(), bowtie.arity()),
            (6, 7, 4)
        );
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = named_graph("square").unwrap();
        assert_eq!(StitchGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(StitchGraph::from_json(
            r#"{"vertices":1,"edges":[[[0,0],[0,1]]],"external":[[0,2]]}"#
        )
        .is_err());
        assert!(StitchGraph::from_json(
            r#"{"vertices":2,"edges":[[[0,2],[1,2]]],"external":[[0,0],[0,1],[1,0]]}"#
        )
        .is_err());
        assert!(StitchGraph::from_json(
            r#"{"vertices":2,"edges":[[[0,2],[1,2]]],"external":[[0,0],[0,0],[1,0],[1,1]]}"#
        )
        .is_err());
    }

    #[test]
    fn assignments() {
        let tri = named_graph("triangle").unwrap();
        assert_eq!(
            compatible_assignments(&tri, &tup("4:2,2,2")).unwrap(),
            vec![mu("111")]
        );
        let got: Vec<String> = compatible_assignments(&tri, &tup("6:2,2,2"))
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect();
        let sorted_sets: std::collections::BTreeSet<String> = got
            .iter()
            .map(|s| {
                let mut c: Vec<char> = s.chars().collect();
                c.sort();
                c.into_iter().collect()
            })
            .collect();
        let want: std::collections::BTreeSet<String> = ["022", "111", "112", "113", "122", "222"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(sorted_sets, want);
        let pair = named_graph("pair").unwrap();
        assert_eq!(
            compatible_assignments(&pair, &tup("3:1,1,1,1")).unwrap(),
            vec![mu("0"), mu("1")]
        );
        assert!(compatible_assignments(&pair, &tup("3:1,1,1")).is_err());
    }

    #[test]
    fn pair_states() {
        let pair = named_graph("pair").unwrap();
        let t = tup("3:1,1,1,1");
        let s1 = graph_kron_state(&pair, &t, &mu("1")).unwrap().unwrap();
        let signs = [
            ("0000", 1),
            ("0011", -1),
            ("0101", 1),
            ("0110", 1),
            ("1001", 1),
            ("1010", 1),
            ("1100", -1),
            ("1111", 1),
        ];
        // path index 0 is 001 and 1 is 010
        let dense = s1.to_dense().unwrap();
        let amp = SurdSum::sqrt_of(&crate::numeric::rat(1, 8)).unwrap();
        let mut want = vec![SurdSum::zero(); 16];
        for (bits, s) in signs {
            let k = usize::from_str_radix(bits, 2).unwrap();
            want[k] = if s > 0 { amp.clone() } else { -amp.clone() };
        }
        assert!(dense == want || dense.iter().zip(&want).all(|(a, b)| *a == -b.clone()));
        let s0 = graph_kron_state(&pair, &t, &mu("0")).unwrap().unwrap();
        let half = SurdSum::from(crate::numeric::rat(1, 2));
        let dense = s0.to_dense().unwrap();
        for (k, x) in dense.iter().enumerate() {
            let on = [0b0000, 0b0011, 0b1100, 0b1111].contains(&k);
            assert_eq!(
                *x,
                if on { half.clone() } else { SurdSum::zero() },
                "entry {k}"
            );
        }
        assert!(s0.inner(&s1).unwrap().is_zero());
    }

    #[test]
    fn triangle_state_n4() {
        let tri = named_graph("triangle").unwrap();
        let s = graph_kron_state(&tri, &tup("4:2,2,2"), &mu("111"))
            .unwrap()
            .unwrap();
        let half = SurdSum::from(crate::numeric::rat(1, 2));
        let d = s.to_dense().unwrap();
        // paths 0011 and 0101 are indices 0 and 1
        let want = [(0b000, 1), (0b011, -1), (0b101, -1), (0b110, -1)];
        let sign = if d[0].signum() > 0 { 1 } else { -1 };
        for k in 0..8 {
            let w = want
                .iter()
                .find(|(i, _)| *i == k)
                .map(|(_, s)| *s)
                .unwrap_or(0);
            let expect = match w * sign {
                1 => half.clone(),
                -1 => -half.clone(),
                _ => SurdSum::zero(),
            };
            assert_eq!(d[k], expect, "entry {k}");
        }
    }

    #[test]
    fn modular_engine_matches_oracle() {
        let cases = [
            ("pair", "4:1,2,1,2"),
            ("pair", "5:2,1,2,2"),
            ("triangle", "5:2,2,1"),
            ("triangle", "6:2,2,2"),
            ("square", "4:1,2,1,2"),
            ("bowtie", "4:1,1,2,2"),
            ("prism47", "4:2,2,2,2"),
        ];
        for (name, t) in cases {
            let g = named_graph(name).unwrap();
            let t = tup(t);
            for m in compatible_assignments(&g, &t).unwrap().into_iter().take(6) {
                let fast = graph_kron_state(&g, &t, &m).unwrap();
                let slow = oracle(&g, &t, &m);
                assert_eq!(fast, slow, "{name} {t} {m}");
                let exact = weighted_state_exact(&g, &t, &m).unwrap();
                let modular = GraphEngine::new(g.clone(), t.clone())
                    .unwrap()
                    .weighted_state(&m)
                    .unwrap();
                assert_eq!(exact, modular, "{name} {t} {m}");
            }
        }
    }

    #[test]
    fn incompatible_mu_is_rejected() {
        let tri = named_graph("triangle").unwrap();
        assert!(graph_kron_state(&tri, &tup("4:2,2,2"), &mu("222")).is_err());
        assert!(graph_kron_state(&tri, &tup("4:2,2,2"), &mu("11")).is_err());
    }

    #[test]
    fn sketches_agree() {
        let g = named_graph("square").unwrap();
        let t = tup("5:2,1,2,2");
        let engine = GraphEngine::new(g, t).unwrap();
        let p = ModP::new(primes_below_limit(1)[0]);
        let caps = engine.sketch_caps(0, p, 7, 2);
        for m in engine.assignments().unwrap().into_iter().take(4) {
            // stored vectors carry their integer content in the scale
            let v = engine.weighted_state(&m).unwrap();
            let a = engine.sketch(&m, p, &caps).unwrap();
            let b = sketch_vector(&v, p, &caps);
            let i = a.iter().position(|&x| x != 0).unwrap();
            assert!(a
                .iter()
                .zip(&b)
                .all(|(&x, &y)| p.mul(x, b[i]) == p.mul(y, a[i])));
        }
    }

    #[test]
    fn graph_enumeration() {
        // a single edge; the triangle and a double edge with a pendant
        assert_eq!(enumerate_graphs(2, 1).len(), 1);
        assert_eq!(enumerate_graphs(3, 3).len(), 2);
        let six = enumerate_graphs(6, 7);
        assert!(six.iter().all(|g| g.arity() == 4));
        assert!(six.len() > 10);
    }
}
