#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use kronstate::partitions::{enumerate_paths, in_w_polytope, sn_dim_usize};
use kronstate::schur::{irrep_matrix, Permutation};
use kronstate::{
    PartitionTuple, Rational, SparseKronVector, SurdSum, TwoRowPartition, YamanouchiPath,
};

pub fn tup(s: &str) -> PartitionTuple {
    s.parse().unwrap()
}

/// Every tuple of `parts` labels with 0 ≤ λ ≤ n/2 (not sorted).
pub fn tuples(n: usize, parts: usize) -> Vec<PartitionTuple> {
    let h = n / 2;
    let mut out = vec![vec![]];
    for _ in 0..parts {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| (0..=h).map(move |l| [p.clone(), vec![l]].concat()))
            .collect();
    }
    out.into_iter()
        .map(|p| PartitionTuple::new(n, p).unwrap())
        .collect()
}

/// Sorted tuples inside the W polytope.
pub fn w_tuples(n: usize, parts: usize) -> Vec<PartitionTuple> {
    tuples(n, parts)
        .into_iter()
        .filter(|t| t.parts.windows(2).all(|w| w[0] <= w[1]) && in_w_polytope(t))
        .collect()
}

pub type Dense = HashMap<Vec<usize>, SurdSum>;

fn index_maps(t: &PartitionTuple) -> Vec<HashMap<YamanouchiPath, usize>> {
    t.partitions()
        .map(|p| {
            enumerate_paths(p)
                .into_iter()
                .enumerate()
                .map(|(i, q)| (q, i))
                .collect()
        })
        .collect()
}

/// Entries keyed by position in `enumerate_paths` order of each part.
pub fn dense(v: &SparseKronVector) -> Dense {
    let maps = index_maps(v.tuple());
    v.iter()
        .map(|(paths, c)| (paths.iter().zip(&maps).map(|(q, m)| m[q]).collect(), c))
        .collect()
}

thread_local! {
    static IRREPS: std::cell::RefCell<HashMap<(TwoRowPartition, Vec<usize>), std::rc::Rc<Vec<Vec<SurdSum>>>>> =
        std::cell::RefCell::new(HashMap::new());
}

fn cached_irrep(p: TwoRowPartition, pi: &Permutation) -> std::rc::Rc<Vec<Vec<SurdSum>>> {
    IRREPS.with(|c| {
        c.borrow_mut()
            .entry((p, pi.0.clone()))
            .or_insert_with(|| std::rc::Rc::new(irrep_matrix(p, pi).unwrap().entries))
            .clone()
    })
}

/// Applies `D(π) ⊗ ⋯ ⊗ D(π)` using the irrep matrices of the Schur module.
pub fn apply_diagonal(t: &PartitionTuple, x: &Dense, pi: &Permutation) -> Dense {
    let mats: Vec<_> = t.partitions().map(|p| cached_irrep(p, pi)).collect();
    let mut cur = x.clone();
    for (i, m) in mats.iter().enumerate() {
        let mut next: Dense = HashMap::new();
        for (idx, c) in &cur {
            for (r, row) in m.iter().enumerate() {
                let a = &row[idx[i]];
                if a.is_zero() {
                    continue;
                }
                let mut k = idx.clone();
                k[i] = r;
                let e = next.entry(k).or_insert_with(SurdSum::zero);
                *e = &*e + &(a * c);
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
    }
    cur
}

pub fn invariant_under_adjacent(v: &SparseKronVector) -> bool {
    let t = v.tuple();
    let x = dense(v);
    (0..t.n - 1).all(|i| apply_diagonal(t, &x, &Permutation::adjacent(t.n, i)) == x)
}

/// `ρ_i = I/f` for every part, from the dense entries.
pub fn locally_maximally_mixed(v: &SparseKronVector) -> bool {
    let t = v.tuple();
    let x = dense(v);
    (0..t.len()).all(|i| {
        let f = sn_dim_usize(t.part(i));
        let mut by_rest: BTreeMap<Vec<usize>, Vec<(usize, &SurdSum)>> = BTreeMap::new();
        for (idx, c) in &x {
            let mut rest = idx.clone();
            let a = rest.remove(i);
            by_rest.entry(rest).or_default().push((a, c));
        }
        let mut rho: HashMap<(usize, usize), SurdSum> = HashMap::new();
        for list in by_rest.values() {
            for (a, ca) in list {
                for (b, cb) in list {
                    let e = rho.entry((*a, *b)).or_insert_with(SurdSum::zero);
                    *e = &*e + &(*ca * *cb);
                }
            }
        }
        let d = SurdSum::from_rational(Rational::new(1.into(), (f as i64).into()));
        (0..f).all(|a| {
            (0..f).all(|b| {
                let got = rho.get(&(a, b)).cloned().unwrap_or_else(SurdSum::zero);
                if a == b {
                    got == d
                } else {
                    got.is_zero()
                }
            })
        })
    })
}

pub fn part(n: usize, lam: usize) -> TwoRowPartition {
    TwoRowPartition::new(n, lam).unwrap()
}
