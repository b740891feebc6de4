//! Floating-point qubit tensors: W-vertex stitching, epsilon contractions
//! and the identities used to push stitch parameters around a graph.
//!
//! Basis index convention: qubit 0 is the most significant bit.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KronError, Result};
use crate::graph::StitchGraph;

pub type C64 = Complex64;

/// A 2x2 complex matrix, row major.
pub type StitchMatrix = [[C64; 2]; 2];

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity2() -> StitchMatrix {
    [[c(1.0), c(0.0)], [c(0.0), c(1.0)]]
}

pub fn sigma_x() -> StitchMatrix {
    [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
}

/// Upper triangular unit-determinant matrix `[[v, w], [0, 1/v]]`.
pub fn u_matrix(v: C64, w: C64) -> StitchMatrix {
    [[v, w], [c(0.0), v.inv()]]
}

pub fn mat2_mul(a: &StitchMatrix, b: &StitchMatrix) -> StitchMatrix {
    let mut out = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose2(a: &StitchMatrix) -> StitchMatrix {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn det2(a: &StitchMatrix) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitTensor {
    pub n_qubits: usize,
    pub amplitudes: Vec<C64>,
}

impl QubitTensor {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(KronError::Input(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(KronError::Input("non-finite amplitude".into()));
        }
        Ok(QubitTensor {
            n_qubits,
            amplitudes,
        })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        QubitTensor {
            n_qubits,
            amplitudes: vec![c(0.0); 1 << n_qubits],
        }
    }

    /// Basis state from a bit string such as `"0110"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let n = bits.len();
        let idx = usize::from_str_radix(bits, 2)
            .map_err(|e| KronError::Parse(format!("bad bit string {bits:?}: {e}")))?;
        let mut t = Self::zeros(n);
        t.amplitudes[idx] = c(1.0);
        Ok(t)
    }

    /// Sum of basis states with real weights, e.g. `[("00", 1.0), ("11", 1.0)]`.
    pub fn from_terms(n_qubits: usize, terms: &[(&str, C64)]) -> Result<Self> {
        let mut t = Self::zeros(n_qubits);
        for (bits, a) in terms {
            if bits.len() != n_qubits {
                return Err(KronError::Input(format!(
                    "term {bits} for {n_qubits} qubits"
                )));
            }
            let idx =
                usize::from_str_radix(bits, 2).map_err(|e| KronError::Parse(e.to_string()))?;
            t.amplitudes[idx] += a;
        }
        Ok(t)
    }

    pub fn random(n_qubits: usize, rng: &mut impl Rng) -> Self {
        let amplitudes = (0..1 << n_qubits)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QubitTensor {
            n_qubits,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(c(1.0 / n))
    }

    pub fn scaled(&self, s: C64) -> Self {
        QubitTensor {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }

    pub fn amplitude(&self, bits: &[u8]) -> C64 {
        self.amplitudes[bits.iter().fold(0usize, |acc, &b| acc * 2 + b as usize)]
    }

    /// Applies `m` to qubit `q` (as an operator, `|x⟩ ↦ Σ_y m[y][x]|y⟩`).
    pub fn apply(&self, q: usize, m: &StitchMatrix) -> Self {
        let bit = 1 << (self.n_qubits - 1 - q);
        let mut out = Self::zeros(self.n_qubits);
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let x = usize::from(idx & bit != 0);
            let base = idx & !bit;
            for y in 0..2 {
                out.amplitudes[base | if y == 1 { bit } else { 0 }] += m[y][x] * a;
            }
        }
        out
    }

    /// Applies one matrix per qubit.
    pub fn apply_local(&self, ms: &[StitchMatrix]) -> Self {
        ms.iter()
            .enumerate()
            .fold(self.clone(), |t, (q, m)| t.apply(q, m))
    }

    pub fn max_diff(&self, other: &QubitTensor) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unnormalized `|W_N⟩`: amplitude one on each weight-one basis state.
pub fn w_tensor(n: usize) -> Result<QubitTensor> {
    if n < 2 {
        return Err(KronError::Input(
            "W tensor needs at least two qubits".into(),
        ));
    }
    let mut t = QubitTensor::zeros(n);
    for q in 0..n {
        t.amplitudes[1 << q] = c(1.0);
    }
    Ok(t)
}

/// Contracts one `W_3` per vertex with a stitch bra per inner edge. The
/// stitch on an edge `(a, b)` is `⟨Φ⁺|(ς ⊗ I)` with `ς` on endpoint `a`, or
/// `⟨Ψ⁺|(ς ⊗ I)` when `use_psi` is set. Free legs follow the graph's leg
/// order.
pub fn stitch_contract(
    g: &StitchGraph,
    stitches: &[StitchMatrix],
    use_psi: &[bool],
) -> Result<QubitTensor> {
    let e_count = g.edge_count();
    if stitches.len() != e_count || use_psi.len() != e_count {
        return Err(KronError::Input(format!(
            "graph has {e_count} inner edges but {} stitches and {} flags were given",
            stitches.len(),
            use_psi.len()
        )));
    }
    // coefficient of ⟨x_a x_b|: ⟨Φ⁺|(ς⊗I)|x_a x_b⟩ = ς[x_b][x_a]
    let bra: Vec<StitchMatrix> = stitches
        .iter()
        .zip(use_psi)
        .map(|(s, &psi)| if psi { mat2_mul(&sigma_x(), s) } else { *s })
        .collect();
    let legs = g.arity();
    let mut roles = vec![[SlotRole::Leg(0); 3]; g.vertex_count];
    for (e, &(a, b)) in g.inner_edges.iter().enumerate() {
        roles[a.0][a.1] = SlotRole::EdgeFirst(e);
        roles[b.0][b.1] = SlotRole::EdgeSecond(e);
    }
    for (i, &(v, s)) in g.external_legs.iter().enumerate() {
        roles[v][s] = SlotRole::Leg(i);
    }
    let mut out = QubitTensor::zeros(legs);
    // each edge carries one index per endpoint: bits of `first` and `second`
    for first in 0..1usize << e_count {
        for second in 0..1usize << e_count {
            let mut w = c(1.0);
            for (e, m) in bra.iter().enumerate() {
                w *= m[(second >> e) & 1][(first >> e) & 1];
            }
            if w == c(0.0) {
                continue;
            }
            for ext in 0..1usize << legs {
                let ok = roles.iter().all(|r| {
                    r.iter()
                        .map(|role| match *role {
                            SlotRole::EdgeFirst(e) => (first >> e) & 1,
                            SlotRole::EdgeSecond(e) => (second >> e) & 1,
                            SlotRole::Leg(i) => (ext >> (legs - 1 - i)) & 1,
                        })
                        .sum::<usize>()
                        == 1
                });
                if ok {
                    out.amplitudes[ext] += w;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
enum SlotRole {
    EdgeFirst(usize),
    EdgeSecond(usize),
    Leg(usize),
}

/// Per-part perfect matchings on `copies` copies of a state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionPattern {
    pub copies: usize,
    /// `parts[i]` lists the matched copy pairs `(a, b)` for qubit `i`, 0-based.
    pub parts: Vec<Vec<(usize, usize)>>,
}

impl ContractionPattern {
    pub fn new(copies: usize, parts: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if !copies.is_multiple_of(2) {
            return Err(KronError::Input(format!(
                "epsilon contraction needs an even number of copies, got {copies}"
            )));
        }
        for (i, m) in parts.iter().enumerate() {
            let mut seen = vec![false; copies];
            for &(a, b) in m {
                for x in [a, b] {
                    if x >= copies || seen[x] {
                        return Err(KronError::Input(format!(
                            "part {i} is not a perfect matching"
                        )));
                    }
                    seen[x] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(KronError::Input(format!(
                    "part {i} is not a perfect matching"
                )));
            }
        }
        Ok(ContractionPattern { copies, parts })
    }

    /// Two copies, every part matched across them.
    pub fn b0(n_qubits: usize) -> Self {
        ContractionPattern {
            copies: 2,
            parts: vec![vec![(0, 1)]; n_qubits],
        }
    }

    /// Four copies arranged as in Cayley's hyperdeterminant.
    pub fn hyperdeterminant() -> Self {
        ContractionPattern {
            copies: 4,
            parts: vec![
                vec![(0, 1), (2, 3)],
                vec![(0, 1), (2, 3)],
                vec![(0, 2), (1, 3)],
            ],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: ContractionPattern =
            serde_json::from_str(text).map_err(|e| KronError::Parse(e.to_string()))?;
        Self::new(p.copies, p.parts)
    }
}

fn epsilon(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Full contraction of `copies` copies of `t` with one epsilon per matched
/// pair per part.
pub fn epsilon_invariant(t: &QubitTensor, pat: &ContractionPattern) -> Result<C64> {
    let pat = ContractionPattern::new(pat.copies, pat.parts.clone())?;
    if pat.parts.len() != t.n_qubits {
        return Err(KronError::Input(format!(
            "pattern has {} parts for a {}-qubit state",
            pat.parts.len(),
            t.n_qubits
        )));
    }
    let n = t.n_qubits;
    let k = pat.copies;
    // a pair fixes the second index as the flip of the first, so each part
    // contributes 2^(k/2) index choices with sign ±1
    let pairs_per_part = k / 2;
    let free = n * pairs_per_part;
    let mut total = c(0.0);
    let mut idx = vec![vec![0u8; n]; k];
    for choice in 0..1usize << free {
        let mut sign = 1.0;
        for (i, m) in pat.parts.iter().enumerate() {
            for (j, &(a, b)) in m.iter().enumerate() {
                let x = (choice >> (i * pairs_per_part + j)) & 1;
                idx[a][i] = x as u8;
                idx[b][i] = (1 - x) as u8;
                sign *= epsilon(x, 1 - x);
            }
        }
        let mut prod = c(sign);
        for copy in &idx {
            prod *= t.amplitude(copy);
            if prod == c(0.0) {
                break;
            }
        }
        total += prod;
    }
    Ok(total)
}

/// `2·|hyperdeterminant contraction|` of a three-qubit state.
pub fn three_tangle(t: &QubitTensor) -> Result<f64> {
    if t.n_qubits != 3 {
        return Err(KronError::Input(format!(
            "three-tangle needs 3 qubits, got {}",
            t.n_qubits
        )));
    }
    Ok(2.0 * epsilon_invariant(t, &ContractionPattern::hyperdeterminant())?.norm())
}

/// `|2·det(c)|` of a two-qubit state.
pub fn concurrence(t: &QubitTensor) -> Result<f64> {
    if t.n_qubits != 2 {
        return Err(KronError::Input(format!(
            "concurrence needs 2 qubits, got {}",
            t.n_qubits
        )));
    }
    let a = &t.amplitudes;
    Ok((c(2.0) * (a[0] * a[3] - a[1] * a[2])).norm())
}

/// Residual of `u(v,w)⊗I⊗I|W₃⟩ = v·I⊗u(1/v,w)⊗u(1/v,0)|W₃⟩`.
pub fn verify_push_rule(v: C64, w: C64) -> Result<f64> {
    if v == c(0.0) {
        return Err(KronError::Domain("push rule needs v ≠ 0".into()));
    }
    let w3 = w_tensor(3)?;
    let lhs = w3.apply(0, &u_matrix(v, w));
    let rhs = w3
        .apply(1, &u_matrix(v.inv(), w))
        .apply(2, &u_matrix(v.inv(), c(0.0)))
        .scaled(v);
    Ok(lhs.max_diff(&rhs))
}

/// Residual of `⟨Φ⁺|A⊗I = ⟨Φ⁺|I⊗Aᵀ` as bras on two qubits.
pub fn phi_transpose_residual(a: &StitchMatrix) -> f64 {
    // ⟨Φ⁺|(M⊗N)|xy⟩ = Σ_k M[k][x]·N[k][y]
    let bra = |m: &StitchMatrix, n: &StitchMatrix| -> [C64; 4] {
        let mut out = [c(0.0); 4];
        for x in 0..2 {
            for y in 0..2 {
                out[2 * x + y] = (0..2).map(|k| m[k][x] * n[k][y]).sum();
            }
        }
        out
    };
    let l = bra(a, &identity2());
    let r = bra(&identity2(), &transpose2(a));
    l.iter()
        .zip(&r)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Random complex matrix with unit determinant.
pub fn random_sl2(rng: &mut impl Rng) -> StitchMatrix {
    loop {
        let mut m = [[c(0.0); 2]; 2];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let d = det2(&m);
        if d.norm() > 0.1 {
            let s = d.sqrt().inv();
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x *= s;
                }
            }
            return m;
        }
    }
}

/// Parses a state file with `index:re,im` lines (blank and `#` lines skipped).
pub fn parse_state(text: &str, n_qubits: usize) -> Result<QubitTensor> {
    let mut t = QubitTensor::zeros(n_qubits);
    for line in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let (idx, val) = line
            .split_once(':')
            .ok_or_else(|| KronError::Parse(format!("expected index:re,im in {line:?}")))?;
        let idx: usize = if idx.chars().all(|ch| ch == '0' || ch == '1') && idx.len() == n_qubits {
            usize::from_str_radix(idx, 2).map_err(|e| KronError::Parse(e.to_string()))?
        } else {
            idx.trim()
                .parse()
                .map_err(|e| KronError::Parse(format!("bad index {idx:?}: {e}")))?
        };
        let (re, im) = val.split_once(',').unwrap_or((val, "0"));
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|e| KronError::Parse(format!("bad real part {re:?}: {e}")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|e| KronError::Parse(format!("bad imaginary part {im:?}: {e}")))?;
        if idx >= t.amplitudes.len() {
            return Err(KronError::Input(format!(
                "index {idx} out of range for {n_qubits} qubits"
            )));
        }
        t.amplitudes[idx] = C64::new(re, im);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn terms(n: usize, bits: &[&str]) -> QubitTensor {
        let t: Vec<(&str, C64)> = bits.iter().map(|b| (*b, c(1.0))).collect();
        QubitTensor::from_terms(n, &t).unwrap()
    }

    #[test]
    fn w_states() {
        assert_eq!(
            w_tensor(3)
                .unwrap()
                .amplitudes
                .iter()
                .filter(|a| a.norm() > 0.0)
                .count(),
            3
        );
        assert_eq!(w_tensor(2).unwrap(), terms(2, &["01", "10"]));
        assert!(w_tensor(1).is_err());
    }

    #[test]
    fn pair_with_phi_stitch() {
        let (v, w) = (C64::new(2.0, 1.0), C64::new(-0.5, 3.0));
        let g = named_graph("pair").unwrap();
        let got = stitch_contract(&g, &[u_matrix(v, w)], &[false]).unwrap();
        let mut want = QubitTensor::zeros(4);
        for b in ["1010", "1001", "0110", "0101"] {
            want.amplitudes[usize::from_str_radix(b, 2).unwrap()] = v;
        }
        for b in ["0010", "0001"] {
            want.amplitudes[usize::from_str_radix(b, 2).unwrap()] = w;
        }
        want.amplitudes[0] = v.inv();
        assert!(got.max_diff(&want) < 1e-12);
        let clean = stitch_contract(&g, &[identity2()], &[false]).unwrap();
        assert_eq!(clean, terms(4, &["0000", "0101", "0110", "1001", "1010"]));
        let psi = stitch_contract(&g, &[identity2()], &[true]).unwrap();
        assert_eq!(psi, w_tensor(4).unwrap());
    }

    #[test]
    fn triangle_is_ghz_class() {
        let g = named_graph("triangle").unwrap();
        let t = stitch_contract(&g, &[identity2(); 3], &[false; 3]).unwrap();
        assert_eq!(t, terms(3, &["001", "010", "100", "111"]));
        assert!(three_tangle(&t.normalized()).unwrap() > 0.1);
        // (σ_z H)^{⊗3} maps it to √2(|000⟩ + |111⟩)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zh = [[c(s), c(s)], [c(-s), c(s)]];
        let ghz = t.apply_local(&[zh, zh, zh]);
        let want = terms(3, &["000", "111"]).scaled(c(std::f64::consts::SQRT_2));
        assert!(ghz.max_diff(&want) < 1e-12, "{:?}", ghz.amplitudes);
    }

    #[test]
    fn invariants() {
        let phi = terms(2, &["00", "11"]);
        assert!(
            (epsilon_invariant(&phi, &ContractionPattern::b0(2)).unwrap() - c(2.0)).norm() < 1e-12
        );
        let one = QubitTensor::basis("11").unwrap();
        assert!(
            epsilon_invariant(&one, &ContractionPattern::b0(2))
                .unwrap()
                .norm()
                < 1e-12
        );
        let w = w_tensor(3).unwrap();
        assert!(
            epsilon_invariant(&w, &ContractionPattern::hyperdeterminant())
                .unwrap()
                .norm()
                < 1e-12
        );
        assert!(three_tangle(&w.normalized()).unwrap() < 1e-12);
        assert!(three_tangle(&QubitTensor::basis("000").unwrap()).unwrap() < 1e-12);
        assert!(ContractionPattern::new(3, vec![]).is_err());
        assert!(ContractionPattern::new(2, vec![vec![(0, 0)]]).is_err());
    }

    #[test]
    fn concurrence_values() {
        assert!((concurrence(&terms(2, &["00", "11"]).normalized()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            concurrence(&QubitTensor::basis("00").unwrap()).unwrap(),
            0.0
        );
        assert!(concurrence(&w_tensor(3).unwrap()).is_err());
    }

    #[test]
    fn push_rules() {
        assert_eq!(verify_push_rule(c(1.0), c(0.0)).unwrap(), 0.0);
        assert!(verify_push_rule(C64::new(2.0, 1.0), c(-3.0)).unwrap() < 1e-9);
        assert!(verify_push_rule(c(0.0), c(1.0)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_sl2(&mut rng);
            assert!(phi_transpose_residual(&a) < 1e-12);
        }
    }

    #[test]
    fn state_file() {
        let t = parse_state("# bell\n00:1,0\n3:1\n", 2).unwrap();
        assert_eq!(t, terms(2, &["00", "11"]));
        assert!(parse_state("9:1,0", 2).is_err());
    }
}
