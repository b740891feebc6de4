mod common;

use common::{invariant_under_adjacent, locally_maximally_mixed, tup, tuples, w_tuples};
use kronstate::graph::{compatible_assignments, weighted_state_exact, GraphEngine};
use kronstate::partitions::kron_coeff_general;
use kronstate::subspace::effective_kron_coeff;
use kronstate::tensor::{contract_network, IntRing};
use kronstate::{named_graph, PartitionTuple};

const FOUR_LEG: [&str; 4] = ["pair", "square", "bowtie", "prism47"];

fn sorted_tuples(n: usize, parts: usize) -> Vec<PartitionTuple> {
    tuples(n, parts)
        .into_iter()
        .filter(|t| t.parts.windows(2).all(|w| w[0] <= w[1]))
        .collect()
}

/// Checks up to eight labellings spread over the compatible list.
fn check_states(name: &str, t: &PartitionTuple) {
    let e = GraphEngine::new(named_graph(name).unwrap(), t.clone()).unwrap();
    let all = e.assignments().unwrap();
    let step = all.len().div_ceil(8).max(1);
    for mu in all.into_iter().step_by(step) {
        if let Some(v) = e.state(&mu).unwrap() {
            assert!(invariant_under_adjacent(&v), "{name} {t} {mu}");
            assert!(locally_maximally_mixed(&v), "{name} {t} {mu}");
        }
    }
}

#[test]
fn triangle_states_are_kronecker_states() {
    for n in 2..=6 {
        for t in sorted_tuples(n, 3) {
            check_states("triangle", &t);
        }
    }
}

#[test]
fn four_leg_states_are_kronecker_states() {
    for n in 2..=5 {
        for t in sorted_tuples(n, 4) {
            for g in FOUR_LEG {
                check_states(g, &t);
            }
        }
    }
    for t in ["6:2,2,2,2", "6:1,2,2,3", "6:3,3,3,3"] {
        for g in FOUR_LEG {
            check_states(g, &tup(t));
        }
    }
}

/// States whose labels differ on the reducible edge are orthogonal.
fn check_reducible_edge(name: &str, edge: usize, nmax: usize) {
    let g = named_graph(name).unwrap();
    for n in 2..=nmax {
        for t in sorted_tuples(n, 4) {
            let e = GraphEngine::new(g.clone(), t.clone()).unwrap();
            let states: Vec<_> = e
                .assignments()
                .unwrap()
                .into_iter()
                .filter_map(|mu| {
                    e.weighted_state(&mu)
                        .ok()
                        .filter(|v| !v.is_zero())
                        .map(|v| (mu, v))
                })
                .collect();
            for (i, (ma, a)) in states.iter().enumerate() {
                for (mb, b) in &states[i + 1..] {
                    if ma.mu[edge] != mb.mu[edge] {
                        assert!(
                            num_traits::Zero::is_zero(&a.raw_inner(b).unwrap()),
                            "{name} {t} {ma} {mb}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn reducible_edge_orthogonality_pair() {
    check_reducible_edge("pair", 0, 6);
}

#[test]
fn reducible_edge_orthogonality_bowtie() {
    check_reducible_edge("bowtie", 6, 6);
}

#[test]
fn graphs_never_exceed_the_coefficient() {
    for n in 2..=6 {
        for t in w_tuples(n, 4).into_iter().chain(sorted_tuples(n, 4)) {
            let k = kron_coeff_general(&t) as usize;
            for g in ["pair", "square", "bowtie"] {
                assert!(
                    effective_kron_coeff(&named_graph(g).unwrap(), &t).unwrap() <= k,
                    "{g} {t}"
                );
            }
        }
        for t in sorted_tuples(n, 3) {
            let k = kron_coeff_general(&t) as usize;
            assert!(
                effective_kron_coeff(&named_graph("triangle").unwrap(), &t).unwrap() <= k,
                "{t}"
            );
        }
    }
}

#[test]
fn contraction_order_does_not_matter() {
    let cases = [
        ("triangle", "6:2,3,3"),
        ("square", "5:2,2,2,2"),
        ("bowtie", "5:1,2,2,2"),
        ("prism47", "6:3,3,3,3"),
    ];
    for (g, t) in cases {
        let t = tup(t);
        let e = GraphEngine::new(named_graph(g).unwrap(), t.clone()).unwrap();
        for mu in compatible_assignments(e.graph(), &t)
            .unwrap()
            .into_iter()
            .take(4)
        {
            let net = e.integer_network(&mu).unwrap();
            let shape = net.shape();
            let results: Vec<_> = [
                shape.optimal_order(),
                shape.greedy_order(),
                shape.sequential_order(),
            ]
            .iter()
            .map(|o| contract_network(&IntRing, &net, o).unwrap().data)
            .collect();
            assert_eq!(results[0], results[1], "{g} {mu}");
            assert_eq!(results[0], results[2], "{g} {mu}");
            // the modular engine agrees with the integer one
            assert_eq!(
                e.weighted_state(&mu).unwrap(),
                weighted_state_exact(e.graph(), &t, &mu).unwrap()
            );
        }
    }
}
