//! Dense tensor networks over a pluggable scalar ring, contracted pairwise.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{KronError, Result};
use crate::modular::ModP;

pub type LegId = usize;

/// Scalars a network can be contracted over.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem);

    /// `C = A·B` for row-major `A` (m×k) and `B` (k×n).
    fn matmul(
        &self,
        a: &[Self::Elem],
        b: &[Self::Elem],
        m: usize,
        k: usize,
        n: usize,
    ) -> Vec<Self::Elem> {
        let mut c = vec![self.zero(); m * n];
        for i in 0..m {
            let row = &mut c[i * n..(i + 1) * n];
            for l in 0..k {
                let x = &a[i * k + l];
                if self.is_zero(x) {
                    continue;
                }
                for (cj, bj) in row.iter_mut().zip(&b[l * n..(l + 1) * n]) {
                    if !self.is_zero(bj) {
                        self.add_assign(cj, &self.mul(x, bj));
                    }
                }
            }
        }
        c
    }
}

impl Ring for ModP {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ModP::mul(*self, *a, *b)
    }

    fn add_assign(&self, acc: &mut u64, x: &u64) {
        *acc = ModP::add(*self, *acc, *x);
    }

    fn matmul(&self, a: &[u64], b: &[u64], m: usize, k: usize, n: usize) -> Vec<u64> {
        // residues below 2^30: sixteen products fit in a u64 accumulator
        let p = self.p;
        let mut c = vec![0u64; m * n];
        for i in 0..m {
            let row = &mut c[i * n..(i + 1) * n];
            let mut pending = 0;
            for l in 0..k {
                let x = a[i * k + l];
                if x == 0 {
                    continue;
                }
                let x32 = x as u32 as u64;
                for (cj, &bj) in row.iter_mut().zip(&b[l * n..(l + 1) * n]) {
                    // both factors are below 2^30
                    *cj += x32 * (bj as u32 as u64);
                }
                pending += 1;
                if pending == 15 {
                    row.iter_mut().for_each(|v| *v %= p);
                    pending = 0;
                }
            }
            row.iter_mut().for_each(|v| *v %= p);
        }
        c
    }
}

/// Floating-point contraction (used for magnitude bounds on absolute values).
#[derive(Clone, Copy, Debug, Default)]
pub struct F64Ring;

impl Ring for F64Ring {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }

    fn is_zero(&self, x: &f64) -> bool {
        *x == 0.0
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }

    fn add_assign(&self, acc: &mut f64, x: &f64) {
        *acc += x;
    }

    fn matmul(&self, a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            let row = &mut c[i * n..(i + 1) * n];
            for l in 0..k {
                let x = a[i * k + l];
                if x == 0.0 {
                    continue;
                }
                for (cj, &bj) in row.iter_mut().zip(&b[l * n..(l + 1) * n]) {
                    *cj += x * bj;
                }
            }
        }
        c
    }
}

/// Exact integer contraction (small networks and cross-checks).
#[derive(Clone, Copy, Debug, Default)]
pub struct IntRing;

impl Ring for IntRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn add_assign(&self, acc: &mut BigInt, x: &BigInt) {
        *acc += x;
    }
}

/// Dense tensor with labelled legs, row-major over `legs`.
#[derive(Clone, Debug)]
pub struct Tensor<T> {
    pub legs: Vec<LegId>,
    pub dims: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Clone> Tensor<T> {
    pub fn new(legs: Vec<LegId>, dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if legs.len() != dims.len() {
            return Err(KronError::Input("legs and dims differ in length".into()));
        }
        let size: usize = dims.iter().product();
        if size != data.len() {
            return Err(KronError::Input(format!(
                "tensor data has {} entries, dims give {size}",
                data.len()
            )));
        }
        let distinct: BTreeSet<_> = legs.iter().collect();
        if distinct.len() != legs.len() {
            return Err(KronError::Input("repeated leg within one tensor".into()));
        }
        Ok(Tensor { legs, dims, data })
    }

    pub fn scalar(x: T) -> Self {
        Tensor {
            legs: vec![],
            dims: vec![],
            data: vec![x],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn strides(dims: &[usize]) -> Vec<usize> {
        let mut s = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    }

    /// Reorders the legs so the result has `legs[order[0]], legs[order[1]], …`.
    pub fn permuted(&self, order: &[usize]) -> Tensor<T> {
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return self.clone();
        }
        let old_strides = Self::strides(&self.dims);
        let dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let legs: Vec<LegId> = order.iter().map(|&o| self.legs[o]).collect();
        let src_strides: Vec<usize> = order.iter().map(|&o| old_strides[o]).collect();
        let total = self.data.len();
        let mut data = Vec::with_capacity(total);
        let r = dims.len();
        let mut idx = vec![0usize; r];
        let mut src = 0usize;
        for _ in 0..total {
            data.push(self.data[src].clone());
            // odometer increment
            let mut d = r;
            while d > 0 {
                d -= 1;
                idx[d] += 1;
                src += src_strides[d];
                if idx[d] < dims[d] {
                    break;
                }
                src -= src_strides[d] * dims[d];
                idx[d] = 0;
            }
        }
        Tensor { legs, dims, data }
    }

    /// Puts the legs in the given order (all legs must be listed).
    pub fn with_leg_order(&self, legs: &[LegId]) -> Result<Tensor<T>> {
        if legs.len() != self.legs.len() {
            return Err(KronError::Input("leg order must list every leg".into()));
        }
        let order = legs
            .iter()
            .map(|l| {
                self.legs
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| KronError::Input(format!("leg {l} not present")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.permuted(&order))
    }
}

/// Contracts every leg shared by `a` and `b`.
pub fn contract_pair<R: Ring>(
    ring: &R,
    a: &Tensor<R::Elem>,
    b: &Tensor<R::Elem>,
) -> Tensor<R::Elem> {
    let shared: Vec<LegId> = a
        .legs
        .iter()
        .copied()
        .filter(|l| b.legs.contains(l))
        .collect();
    let free_a: Vec<usize> = (0..a.legs.len())
        .filter(|&i| !shared.contains(&a.legs[i]))
        .collect();
    let free_b: Vec<usize> = (0..b.legs.len())
        .filter(|&i| !shared.contains(&b.legs[i]))
        .collect();
    let sh_a: Vec<usize> = shared
        .iter()
        .map(|l| a.legs.iter().position(|x| x == l).unwrap())
        .collect();
    let sh_b: Vec<usize> = shared
        .iter()
        .map(|l| b.legs.iter().position(|x| x == l).unwrap())
        .collect();
    let m: usize = free_a.iter().map(|&i| a.dims[i]).product();
    let k: usize = sh_a.iter().map(|&i| a.dims[i]).product();
    let n: usize = free_b.iter().map(|&i| b.dims[i]).product();
    // the sparser operand drives the outer loop
    let zeros = |t: &Tensor<R::Elem>| {
        t.data.iter().filter(|x| ring.is_zero(x)).count() as f64 / t.data.len().max(1) as f64
    };
    if zeros(b) > zeros(a) {
        let bt = b.permuted(&[free_b.clone(), sh_b].concat());
        let at = a.permuted(&[sh_a, free_a.clone()].concat());
        let data = ring.matmul(&bt.data, &at.data, n, k, m);
        let legs = free_b
            .iter()
            .map(|&i| b.legs[i])
            .chain(free_a.iter().map(|&i| a.legs[i]))
            .collect();
        let dims = free_b
            .iter()
            .map(|&i| b.dims[i])
            .chain(free_a.iter().map(|&i| a.dims[i]))
            .collect();
        return Tensor { legs, dims, data };
    }
    let at = a.permuted(&[free_a.clone(), sh_a].concat());
    let bt = b.permuted(&[sh_b, free_b.clone()].concat());
    let data = ring.matmul(&at.data, &bt.data, m, k, n);
    let legs = free_a
        .iter()
        .map(|&i| a.legs[i])
        .chain(free_b.iter().map(|&i| b.legs[i]))
        .collect();
    let dims = free_a
        .iter()
        .map(|&i| a.dims[i])
        .chain(free_b.iter().map(|&i| b.dims[i]))
        .collect();
    Tensor { legs, dims, data }
}

/// A contraction schedule: each step merges two live tensors (by slot) into
/// the first slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionOrder {
    pub steps: Vec<(usize, usize)>,
}

/// Shape-only view of a network used for planning.
#[derive(Clone, Debug)]
pub struct NetworkShape {
    pub tensors: Vec<Vec<LegId>>,
    pub dim: std::collections::BTreeMap<LegId, usize>,
    pub open: Vec<LegId>,
}

impl NetworkShape {
    fn leg_sets(&self) -> Vec<BTreeSet<LegId>> {
        self.tensors
            .iter()
            .map(|t| t.iter().copied().collect())
            .collect()
    }

    /// Legs of the merged subset that remain uncontracted.
    fn boundary(&self, sets: &[BTreeSet<LegId>], mask: u32) -> BTreeSet<LegId> {
        let mut inside: BTreeSet<LegId> = BTreeSet::new();
        for (i, s) in sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                inside.extend(s.iter().copied());
            }
        }
        inside
            .into_iter()
            .filter(|l| {
                self.open.contains(l)
                    || sets
                        .iter()
                        .enumerate()
                        .any(|(i, s)| mask >> i & 1 == 0 && s.contains(l))
            })
            .collect()
    }

    fn size_of(&self, legs: &BTreeSet<LegId>) -> f64 {
        legs.iter().map(|l| self.dim[l] as f64).product()
    }

    /// Flop-optimal pairwise order by dynamic programming over subsets.
    pub fn optimal_order(&self) -> ContractionOrder {
        let t = self.tensors.len();
        if t > 14 {
            return self.greedy_order();
        }
        let sets = self.leg_sets();
        let full = (1u32 << t) - 1;
        let bounds: Vec<BTreeSet<LegId>> = (0..=full).map(|m| self.boundary(&sets, m)).collect();
        let mut cost = vec![f64::INFINITY; (full + 1) as usize];
        let mut split = vec![0u32; (full + 1) as usize];
        for i in 0..t {
            cost[1 << i] = 0.0;
        }
        for mask in 1..=full {
            if mask.count_ones() < 2 {
                continue;
            }
            // enumerate proper submasks containing the lowest set bit
            let low = mask & mask.wrapping_neg();
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                if sub & low != 0 {
                    let other = mask ^ sub;
                    let c0 = cost[sub as usize] + cost[other as usize];
                    if c0 < cost[mask as usize] {
                        let union: BTreeSet<LegId> = bounds[sub as usize]
                            .union(&bounds[other as usize])
                            .copied()
                            .collect();
                        let c = c0 + self.size_of(&union);
                        if c < cost[mask as usize] {
                            cost[mask as usize] = c;
                            split[mask as usize] = sub;
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        let mut steps = Vec::new();
        fn emit(mask: u32, split: &[u32], steps: &mut Vec<(usize, usize)>) -> usize {
            if mask.count_ones() == 1 {
                return mask.trailing_zeros() as usize;
            }
            let a = split[mask as usize];
            let b = mask ^ a;
            let sa = emit(a, split, steps);
            let sb = emit(b, split, steps);
            steps.push((sa, sb));
            sa
        }
        emit(full, &split, &mut steps);
        ContractionOrder { steps }
    }

    /// Repeatedly merges the connected pair with the smallest result.
    pub fn greedy_order(&self) -> ContractionOrder {
        let mut live: Vec<Option<BTreeSet<LegId>>> =
            self.leg_sets().into_iter().map(Some).collect();
        let mut steps = Vec::new();
        loop {
            let alive: Vec<usize> = (0..live.len()).filter(|&i| live[i].is_some()).collect();
            if alive.len() < 2 {
                break;
            }
            let mut best: Option<(f64, usize, usize, BTreeSet<LegId>)> = None;
            for (x, &i) in alive.iter().enumerate() {
                for &j in &alive[x + 1..] {
                    let a = live[i].as_ref().unwrap();
                    let b = live[j].as_ref().unwrap();
                    let connected = a.intersection(b).next().is_some();
                    let result: BTreeSet<LegId> = a
                        .symmetric_difference(b)
                        .copied()
                        .chain(a.intersection(b).copied().filter(|l| self.open.contains(l)))
                        .collect();
                    let score = self.size_of(&result) * if connected { 1.0 } else { 1e12 };
                    if best.as_ref().is_none_or(|(s, ..)| score < *s) {
                        best = Some((score, i, j, result));
                    }
                }
            }
            let (_, i, j, result) = best.unwrap();
            live[i] = Some(result);
            live[j] = None;
            steps.push((i, j));
        }
        ContractionOrder { steps }
    }

    /// Largest intermediate (in entries) produced along `order`.
    pub fn peak_size(&self, order: &ContractionOrder) -> f64 {
        let mut live: Vec<Option<BTreeSet<LegId>>> =
            self.leg_sets().into_iter().map(Some).collect();
        let mut peak = live
            .iter()
            .flatten()
            .map(|s| self.size_of(s))
            .fold(0.0, f64::max);
        for &(i, j) in &order.steps {
            let (Some(a), Some(b)) = (live[i].take(), live[j].take()) else {
                return f64::INFINITY;
            };
            let result: BTreeSet<LegId> = a.symmetric_difference(&b).copied().collect();
            peak = peak.max(self.size_of(&result));
            live[i] = Some(result);
        }
        peak
    }

    /// Merges tensors strictly left to right.
    pub fn sequential_order(&self) -> ContractionOrder {
        ContractionOrder {
            steps: (1..self.tensors.len()).map(|j| (0, j)).collect(),
        }
    }
}

/// A network of tensors with a designated ordered list of open legs.
#[derive(Clone, Debug)]
pub struct Network<T> {
    pub tensors: Vec<Tensor<T>>,
    pub open: Vec<LegId>,
}

impl<T: Clone> Network<T> {
    pub fn shape(&self) -> NetworkShape {
        let mut dim = std::collections::BTreeMap::new();
        for t in &self.tensors {
            for (l, d) in t.legs.iter().zip(&t.dims) {
                dim.insert(*l, *d);
            }
        }
        NetworkShape {
            tensors: self.tensors.iter().map(|t| t.legs.clone()).collect(),
            dim,
            open: self.open.clone(),
        }
    }
}

/// Contracts the network along `order`; the result has the open legs in order.
pub fn contract_network<R: Ring>(
    ring: &R,
    net: &Network<R::Elem>,
    order: &ContractionOrder,
) -> Result<Tensor<R::Elem>> {
    if net.tensors.is_empty() {
        return Err(KronError::Input("empty network".into()));
    }
    let mut live: Vec<Option<Tensor<R::Elem>>> = net.tensors.iter().cloned().map(Some).collect();
    for &(i, j) in &order.steps {
        let a = live[i]
            .take()
            .ok_or_else(|| KronError::Input(format!("slot {i} already merged")))?;
        let b = live[j]
            .take()
            .ok_or_else(|| KronError::Input(format!("slot {j} already merged")))?;
        // legs shared but open must survive: rename one side temporarily
        let keep: Vec<LegId> = a
            .legs
            .iter()
            .copied()
            .filter(|l| b.legs.contains(l) && net.open.contains(l))
            .collect();
        if !keep.is_empty() {
            return Err(KronError::Input(format!(
                "open leg {} is shared by two tensors",
                keep[0]
            )));
        }
        live[i] = Some(contract_pair(ring, &a, &b));
    }
    let rest: Vec<Tensor<R::Elem>> = live.into_iter().flatten().collect();
    let mut acc = rest
        .into_iter()
        .reduce(|a, b| contract_pair(ring, &a, &b))
        .expect("at least one tensor");
    acc = acc.with_leg_order(&net.open)?;
    Ok(acc)
}

impl<T: Clone> Tensor<T> {
    /// Copy with `leg` moved to the front, so fixing it selects a contiguous block.
    fn leading(&self, leg: LegId) -> Tensor<T> {
        let pos = self
            .legs
            .iter()
            .position(|&l| l == leg)
            .expect("leg present");
        let order: Vec<usize> = std::iter::once(pos)
            .chain((0..self.legs.len()).filter(|&i| i != pos))
            .collect();
        self.permuted(&order)
    }

    fn block(&self, idx: usize) -> Tensor<T> {
        let inner: usize = self.dims[1..].iter().product();
        Tensor {
            legs: self.legs[1..].to_vec(),
            dims: self.dims[1..].to_vec(),
            data: self.data[idx * inner..(idx + 1) * inner].to_vec(),
        }
    }
}

/// Contracts with the flop-optimal order, slicing over the first open leg
/// while the largest intermediate would exceed `budget` entries. The
/// result is laid out exactly as an unsliced contraction would be.
pub fn contract_auto<R: Ring>(
    ring: &R,
    net: &Network<R::Elem>,
    budget: f64,
) -> Result<Tensor<R::Elem>> {
    let shape = net.shape();
    let order = shape.optimal_order();
    if shape.peak_size(&order) <= budget || net.open.is_empty() {
        return contract_network(ring, net, &order);
    }
    let leg = net.open[0];
    let dim = shape.dim[&leg];
    let prepared: Vec<(bool, Tensor<R::Elem>)> = net
        .tensors
        .iter()
        .map(|t| {
            if t.legs.contains(&leg) {
                (true, t.leading(leg))
            } else {
                (false, t.clone())
            }
        })
        .collect();
    let open_rest: Vec<LegId> = net.open[1..].to_vec();
    let mut data = Vec::new();
    let mut out_dims = vec![dim];
    for idx in 0..dim {
        let tensors: Vec<Tensor<R::Elem>> = prepared
            .iter()
            .map(|(has, t)| if *has { t.block(idx) } else { t.clone() })
            .collect();
        let sub = Network {
            tensors,
            open: open_rest.clone(),
        };
        let part = contract_auto(ring, &sub, budget)?;
        if idx == 0 {
            out_dims.extend(part.dims.iter().copied());
            data.reserve(part.data.len() * dim);
        }
        data.extend(part.data);
    }
    Tensor::new(net.open.clone(), out_dims, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::primes_below_limit;

    fn t(legs: &[usize], dims: &[usize], data: &[i64]) -> Tensor<BigInt> {
        Tensor::new(
            legs.to_vec(),
            dims.to_vec(),
            data.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn matrix_chain() {
        // A(0,1)·B(1,2)·C(2,3)
        let a = t(&[0, 1], &[2, 3], &[1, 2, 3, 4, 5, 6]);
        let b = t(&[1, 2], &[3, 2], &[1, 0, 0, 1, 1, 1]);
        let c = t(&[2, 3], &[2, 1], &[2, -1]);
        let net = Network {
            tensors: vec![a, b, c],
            open: vec![0, 3],
        };
        let shape = net.shape();
        let r1 = contract_network(&IntRing, &net, &shape.optimal_order()).unwrap();
        let r2 = contract_network(&IntRing, &net, &shape.greedy_order()).unwrap();
        let r3 = contract_network(&IntRing, &net, &shape.sequential_order()).unwrap();
        // A·B = [[4,5],[10,11]]; ·C = [3, 9]
        assert_eq!(r1.data, vec![BigInt::from(3), BigInt::from(9)]);
        assert_eq!(r1.data, r2.data);
        assert_eq!(r1.data, r3.data);
    }

    #[test]
    fn sliced_matches_direct() {
        let a = t(
            &[0, 1, 2],
            &[3, 2, 2],
            &(0..12).map(|x| x * 3 - 7).collect::<Vec<_>>(),
        );
        let b = t(&[2, 3], &[2, 4], &[1, -2, 0, 5, 3, 1, -1, 2]);
        let c = t(&[1, 4], &[2, 3], &[2, 0, -1, 1, 4, 1]);
        let net = Network {
            tensors: vec![a, b, c],
            open: vec![0, 3, 4],
        };
        let direct = contract_network(&IntRing, &net, &net.shape().sequential_order()).unwrap();
        let sliced = contract_auto(&IntRing, &net, 1.0).unwrap();
        assert_eq!(direct.dims, sliced.dims);
        assert_eq!(direct.data, sliced.data);
    }

    #[test]
    fn permute_round_trip() {
        let a = t(&[7, 8, 9], &[2, 3, 4], &(0..24).collect::<Vec<_>>());
        let p = a.with_leg_order(&[9, 7, 8]).unwrap();
        assert_eq!(p.dims, vec![4, 2, 3]);
        // element (i=1, j=2, k=3) of a sits at (3, 1, 2) in p
        assert_eq!(p.data[3 * 6 + 3 + 2], a.data[12 + 2 * 4 + 3]);
        let back = p.with_leg_order(&[7, 8, 9]).unwrap();
        assert_eq!(back.data, a.data);
    }

    #[test]
    fn modular_matches_integer() {
        let p = ModP::new(primes_below_limit(1)[0]);
        let a: Vec<i64> = (0..60).map(|x| (x * 7919) % 23 - 11).collect();
        let b: Vec<i64> = (0..60).map(|x| (x * 104729) % 31 - 15).collect();
        let ta = t(&[0, 1, 2], &[3, 4, 5], &a);
        let tb = t(&[2, 1, 3], &[5, 4, 3], &b);
        let exact = contract_pair(&IntRing, &ta, &tb);
        let ma = Tensor::new(
            ta.legs.clone(),
            ta.dims.clone(),
            a.iter().map(|&x| p.from_i64(x)).collect(),
        )
        .unwrap();
        let mb = Tensor::new(
            tb.legs.clone(),
            tb.dims.clone(),
            b.iter().map(|&x| p.from_i64(x)).collect(),
        )
        .unwrap();
        let m = contract_pair(&p, &ma, &mb);
        let m = m.with_leg_order(&exact.legs).unwrap();
        for (x, y) in exact.data.iter().zip(&m.data) {
            assert_eq!(p.from_bigint(x), *y);
        }
    }
}
