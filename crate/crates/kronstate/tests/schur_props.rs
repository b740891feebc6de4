mod common;

use common::part;
use kronstate::numeric::rat;
use kronstate::partitions::{character_two_row, enumerate_paths, CycleType};
use kronstate::schur::{
    identity_matrix, irrep_matrix, irrep_matrix_at_weight, mat_mul, schur_expand,
    schur_path_coefficient, trace, transpose, Permutation,
};
use kronstate::{SurdSum, TwoRowPartition};
use proptest::prelude::*;

fn bits(n: usize, x: u32) -> Vec<u8> {
    (0..n).map(|k| ((x >> (n - 1 - k)) & 1) as u8).collect()
}

fn all_perms(n: usize) -> Vec<Permutation> {
    fn rec(pre: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        if pre.len() == used.len() {
            out.push(Permutation(pre.clone()));
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                pre.push(k);
                rec(pre, used, out);
                pre.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_type(p: &Permutation) -> CycleType {
    let n = p.n();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for s in 0..n {
        let mut k = s;
        let mut len = 0;
        while !seen[k] {
            seen[k] = true;
            k = p.0[k];
            len += 1;
        }
        if len > 0 {
            lens.push(len);
        }
    }
    CycleType::new(lens).unwrap()
}

fn irreps(n: usize) -> Vec<TwoRowPartition> {
    (0..=n / 2).map(|l| part(n, l)).collect()
}

#[test]
fn transform_is_unitary() {
    for n in 1..=10 {
        for x in 0..1u32 << n {
            let total: SurdSum = schur_expand(&bits(n, x))
                .iter()
                .map(|(_, _, c)| c.square())
                .sum();
            assert_eq!(total, SurdSum::one(), "n={n} s={x:b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rows_are_orthonormal(n in 1usize..=10, a in any::<u32>(), b in any::<u32>()) {
        let (s, t) = (bits(n, a % (1 << n)), bits(n, b % (1 << n)));
        let mut dot = SurdSum::zero();
        // basis states also carry the weight, so different weights never overlap
        let weight = |x: &[u8]| x.iter().filter(|&&b| b == 1).count();
        for p in irreps(n).into_iter().filter(|_| weight(&s) == weight(&t)) {
            for q in enumerate_paths(p) {
                let x = schur_path_coefficient(&s, &q).unwrap();
                if !x.is_zero() {
                    dot += &(&x * &schur_path_coefficient(&t, &q).unwrap());
                }
            }
        }
        let want = if s == t { SurdSum::one() } else { SurdSum::zero() };
        prop_assert_eq!(dot, want);
    }

    #[test]
    fn irreps_compose(n in 2usize..=6, w1 in prop::collection::vec(0usize..5, 0..5), w2 in prop::collection::vec(0usize..5, 0..5)) {
        let word = |w: &[usize]| w.iter().fold(Permutation::identity(n), |acc, &i| acc.compose(&Permutation::adjacent(n, i % (n - 1))));
        let (a, b) = (word(&w1), word(&w2));
        for p in irreps(n) {
            let da = irrep_matrix(p, &a).unwrap().entries;
            let db = irrep_matrix(p, &b).unwrap().entries;
            let dab = irrep_matrix(p, &a.compose(&b)).unwrap().entries;
            prop_assert_eq!(mat_mul(&da, &db), dab);
        }
    }
}

#[test]
fn adjacent_pairs_compose() {
    for n in 2..=6 {
        for p in irreps(n) {
            let id = identity_matrix(enumerate_paths(p).len());
            for i in 0..n - 1 {
                let a = Permutation::adjacent(n, i);
                let da = irrep_matrix(p, &a).unwrap().entries;
                assert_eq!(mat_mul(&da, &da), id);
                assert_eq!(transpose(&da), da);
                for j in 0..n - 1 {
                    let b = Permutation::adjacent(n, j);
                    let db = irrep_matrix(p, &b).unwrap().entries;
                    let dab = irrep_matrix(p, &a.compose(&b)).unwrap().entries;
                    assert_eq!(mat_mul(&da, &db), dab, "{p} {i} {j}");
                }
            }
        }
    }
}

#[test]
fn character_orthogonality() {
    for n in 1..=5 {
        let perms = all_perms(n);
        let reps = irreps(n);
        let chars: Vec<Vec<SurdSum>> = reps
            .iter()
            .map(|&p| {
                perms
                    .iter()
                    .map(|pi| trace(&irrep_matrix(p, pi).unwrap().entries))
                    .collect()
            })
            .collect();
        for (a, p) in reps.iter().enumerate() {
            for (pi, x) in perms.iter().zip(&chars[a]) {
                assert_eq!(
                    *x,
                    SurdSum::from_int(character_two_row(*p, &cycle_type(pi)))
                );
            }
            for b in 0..reps.len() {
                let s: SurdSum = chars[a].iter().zip(&chars[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { perms.len() as i64 } else { 0 };
                assert_eq!(s, SurdSum::from_rational(rat(want, 1)), "n={n}");
            }
        }
    }
}

#[test]
fn weight_choice_does_not_matter() {
    for n in 2..=6 {
        let perms: Vec<Permutation> = (0..n - 1)
            .map(|i| Permutation::adjacent(n, i))
            .chain(std::iter::once(Permutation(
                (1..n).chain(std::iter::once(0)).collect(),
            )))
            .collect();
        for p in irreps(n) {
            for pi in &perms {
                let base = irrep_matrix(p, pi).unwrap();
                for omega in p.lam..=n - p.lam {
                    assert_eq!(
                        irrep_matrix_at_weight(p, pi, omega).unwrap().entries,
                        base.entries,
                        "{p} ω={omega}"
                    );
                }
            }
        }
    }
}
