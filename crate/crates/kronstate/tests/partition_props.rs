mod common;

use common::{part, tuples};
use kronstate::partitions::{
    enumerate_paths, gl2_dim, in_kron_polytope, kron_coeff, kron_coeff_general, kron_coeff_triple,
    sn_dim,
};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Hook lengths for two rows: f = n!·(r1 − r2 + 1) / ((r1 + 1)!·r2!).
fn hook_dim(n: usize, lam: usize) -> BigInt {
    let fact = |k: usize| (1..=k).fold(BigInt::from(1), |a, i| a * i);
    let (r1, r2) = (n - lam, lam);
    fact(n) * BigInt::from(r1 - r2 + 1) / (fact(r1 + 1) * fact(r2))
}

#[test]
fn path_counts_match_hook_formula() {
    for n in 0..=14 {
        for lam in 0..=n / 2 {
            let p = part(n, lam);
            let paths = enumerate_paths(p);
            assert_eq!(BigInt::from(paths.len()), sn_dim(p), "{p}");
            assert_eq!(sn_dim(p), hook_dim(n, lam), "{p}");
            assert!(paths.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn schur_weyl_dimension_count() {
    for n in 0..=14 {
        let total: BigInt = (0..=n / 2)
            .map(|lam| BigInt::from(gl2_dim(part(n, lam))) * sn_dim(part(n, lam)))
            .sum();
        assert_eq!(total, BigInt::from(1u64 << n), "n={n}");
    }
}

#[test]
fn triple_formula_agrees_with_characters() {
    for n in 0..=10 {
        for t in tuples(n, 3) {
            assert_eq!(
                kron_coeff_triple(t.parts[0], t.parts[1], t.parts[2], n),
                kron_coeff_general(&t),
                "{t}"
            );
            assert_eq!(kron_coeff(&t), kron_coeff_general(&t));
        }
    }
}

#[test]
fn positive_coefficient_lies_in_polytope() {
    for n in 1..=8 {
        for parts in 2..=4 {
            for t in tuples(n, parts) {
                if kron_coeff_general(&t) > 0 {
                    assert!(in_kron_polytope(&t), "{t}");
                }
            }
        }
    }
}

#[test]
fn two_parts_are_a_delta() {
    for n in 1..=8 {
        for t in tuples(n, 2) {
            assert_eq!(
                kron_coeff_general(&t),
                u64::from(t.parts[0] == t.parts[1]),
                "{t}"
            );
        }
    }
}

proptest! {
    #[test]
    fn coefficient_is_symmetric(n in 2usize..=8, raw in prop::collection::vec(0usize..=4, 3..=4), rot in 0usize..4) {
        let parts: Vec<usize> = raw.iter().map(|l| l % (n / 2 + 1)).collect();
        let t = kronstate::PartitionTuple::new(n, parts.clone()).unwrap();
        let mut p2 = parts.clone();
        p2.rotate_left(rot % parts.len());
        let t2 = kronstate::PartitionTuple::new(n, p2).unwrap();
        prop_assert_eq!(kron_coeff_general(&t), kron_coeff_general(&t2));
    }

    #[test]
    fn trivial_part_drops_out(n in 2usize..=8, a in 0usize..=4, b in 0usize..=4, c in 0usize..=4) {
        let h = n / 2;
        let (a, b, c) = (a % (h + 1), b % (h + 1), c % (h + 1));
        let t4 = kronstate::PartitionTuple::new(n, vec![0, a, b, c]).unwrap();
        let t3 = kronstate::PartitionTuple::new(n, vec![a, b, c]).unwrap();
        prop_assert_eq!(kron_coeff_general(&t4), kron_coeff_general(&t3));
    }
}
