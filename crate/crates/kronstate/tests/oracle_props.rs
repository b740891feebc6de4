mod common;

use common::{part, tup, tuples};
use kronstate::numeric::rat;
use kronstate::oracle::{projector, projector_with_cap, span_equal, yy_transposition_matrix};
use kronstate::partitions::{in_w_polytope, kron_coeff_general};
use kronstate::schur::{irrep_matrix, Permutation};
use kronstate::subspace::{gram_schmidt, kron_basis};
use kronstate::wkron::w_kron_state;
use kronstate::{named_graph, GraphEngine, PartitionTuple, Rational, SparseKronVector, SurdSum};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn side(t: &PartitionTuple) -> usize {
    t.partitions()
        .map(kronstate::partitions::sn_dim_usize)
        .product()
}

#[test]
fn projector_is_idempotent_with_trace_k() {
    let mut checked = 0;
    for n in 1..=6 {
        for parts in 2..=4 {
            for t in tuples(n, parts) {
                if side(&t) > 512 || !t.parts.windows(2).all(|w| w[0] <= w[1]) {
                    continue;
                }
                let p = projector_with_cap(&t, 512).unwrap();
                assert!(p.is_idempotent(), "{t}");
                assert!(p.is_symmetric(), "{t}");
                assert_eq!(p.trace(), rat(kron_coeff_general(&t) as i64, 1), "{t}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn young_yamanouchi_agrees_with_schur_irreps() {
    for n in 2..=6 {
        for lam in 0..=n / 2 {
            for i in 1..n {
                let yy = yy_transposition_matrix(part(n, lam), i).unwrap();
                let d = irrep_matrix(part(n, lam), &Permutation::adjacent(n, i - 1)).unwrap();
                assert_eq!(yy.entries, d.entries, "{n}:{lam} s{i}");
            }
        }
    }
}

#[test]
fn constructed_states_are_fixed() {
    for t in ["4:1,1,2", "5:1,2,2", "6:2,2,2", "6:2,3,3", "7:1,3,3"] {
        let t = tup(t);
        let p = projector(&t).unwrap();
        if in_w_polytope(&t) {
            assert!(p.fixes(&w_kron_state(&t).unwrap()).unwrap(), "{t}");
        }
        for v in kron_basis("triangle", &t).unwrap().vectors {
            assert!(p.fixes(&v).unwrap(), "{t}");
        }
    }
    for t in ["4:1,1,1,1", "4:2,2,2,2", "5:1,2,2,2", "5:2,2,2,2"] {
        let t = tup(t);
        let p = projector(&t).unwrap();
        for g in ["pair", "square", "bowtie", "prism47"] {
            let e = GraphEngine::new(named_graph(g).unwrap(), t.clone()).unwrap();
            for mu in e.assignments().unwrap() {
                if let Some(v) = e.state(&mu).unwrap() {
                    assert!(p.fixes(&v).unwrap(), "{g} {t} {mu}");
                }
            }
        }
    }
}

/// `P·x` for `x_c = z_c/√w_c`: entry `r` is `(Σ_c P'[r][c]·z_c)/√w_r`.
fn project(p: &kronstate::ProjectorMatrix, z: &[i64]) -> Vec<SurdSum> {
    p.weighted()
        .iter()
        .zip(p.weights())
        .map(|(row, w)| {
            let y: Rational = row.iter().zip(z).map(|(a, &c)| a * rat(c, 1)).sum();
            SurdSum::sqrt_of(&Rational::new(1.into(), w.clone()))
                .unwrap()
                .scale(&y)
        })
        .collect()
}

#[test]
fn random_projections_span_the_sufficient_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 3..=5 {
        for t in tuples(n, 4) {
            if !t.parts.windows(2).all(|w| w[0] <= w[1]) || t.parts.contains(&0) {
                continue;
            }
            let k = kron_coeff_general(&t) as usize;
            if k == 0 {
                continue;
            }
            let p = projector(&t).unwrap();
            let mut vs = Vec::new();
            while vs.len() < k + 2 {
                let x: Vec<i64> = (0..p.side()).map(|_| rng.gen_range(-3..=3)).collect();
                let v = SparseKronVector::from_dense(t.clone(), &project(&p, &x)).unwrap();
                if !v.is_zero() {
                    vs.push(v);
                }
            }
            let from_p = gram_schmidt(&vs).unwrap();
            assert_eq!(from_p.len(), k, "{t}");
            let b = kron_basis("prism47", &t).unwrap();
            assert!(span_equal(&from_p.vectors, &b.vectors).unwrap(), "{t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn w_states_are_fixed(n in 2usize..=6, raw in prop::collection::vec(0usize..=3, 3..=4)) {
        let parts: Vec<usize> = raw.iter().map(|l| l % (n / 2 + 1)).collect();
        let t = PartitionTuple::new(n, parts).unwrap();
        prop_assume!(in_w_polytope(&t) && side(&t) <= 1000);
        let p = projector(&t).unwrap();
        prop_assert!(p.fixes(&w_kron_state(&t).unwrap()).unwrap());
    }
}
