mod common;

use proptest::prelude::*;

use wopn::graph::WeightedGraph;
use wopn::graphdist::{
    diffusion_distance, matrix_power, normalize, shortest_unweighted_path, shortest_weighted_path,
    transition_matrix, weighted_shortest_path, DistanceMethod,
};

fn graph(weights: &'static [u64]) -> impl Strategy<Value = WeightedGraph> {
    (2usize..=12, 0usize..12, any::<u64>())
        .prop_map(move |(n, extra, seed)| common::random_connected_graph(&mut common::rng(seed), n, extra, weights))
}

fn to_rows(a: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

const DYADIC: &[u64] = &[1, 2, 4, 8];
const SMALL: &[u64] = &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

proptest! {
    #[test]
    fn supd_matches_floyd_warshall(g in graph(SMALL)) {
        prop_assert_eq!(to_rows(&shortest_unweighted_path(&g).unwrap().values), common::floyd_hops(&g));
    }

    // Power-of-two weights keep every inverse-weight sum exact, so the
    // enumerated optimum and its tie-break are unambiguous.
    #[test]
    fn weighted_paths_match_enumeration(g in graph(DYADIC).prop_filter("small", |g| g.vertex_count() <= 8)) {
        let (hops, sums) = common::enumerate_inverse_weight_paths(&g);
        prop_assert_eq!(to_rows(&shortest_weighted_path(&g).unwrap().values), hops);
        prop_assert_eq!(to_rows(&weighted_shortest_path(&g).unwrap().values), sums);
    }

    #[test]
    fn diffusion_matches_dense_definition(g in graph(SMALL), t in 1usize..=10) {
        let fast = diffusion_distance(&g, t).unwrap();
        let slow = common::naive_diffusion(&g, t);
        for (a, row) in slow.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                prop_assert!((fast.values[[a, b]] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diffusion_is_a_pseudometric(g in graph(SMALL), t in 1usize..=10) {
        let d = diffusion_distance(&g, t).unwrap();
        d.validate().unwrap();
        let n = g.vertex_count();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    prop_assert!(d.values[[a, c]] <= d.values[[a, b]] + d.values[[b, c]] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn every_method_is_symmetric_with_zero_diagonal(g in graph(SMALL)) {
        for m in DistanceMethod::ALL {
            m.compute(&g, None).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn powers_stay_stochastic(g in graph(SMALL), t in 1usize..=10) {
        for lazy in [false, true] {
            let p = transition_matrix(&g, lazy).unwrap();
            if lazy {
                prop_assert!((0..g.vertex_count()).all(|i| p.values[[i, i]] >= 0.5));
            }
            for row in matrix_power(&p.values, t).rows() {
                prop_assert!((row.sum() - 1.0).abs() <= 1e-12);
                prop_assert!(row.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(g in graph(SMALL)) {
        for m in DistanceMethod::ALL {
            let d = m.compute(&g, None).unwrap();
            if d.max() == 0.0 {
                continue;
            }
            let once = normalize(&d).unwrap();
            prop_assert_eq!(once.max(), 1.0);
            prop_assert_eq!(&normalize(&once).unwrap().values, &once.values);
            let argmax = |x: &ndarray::Array2<f64>| {
                x.indexed_iter().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).unwrap().0
            };
            prop_assert_eq!(argmax(&d.values), argmax(&once.values));
        }
    }

    #[test]
    fn uniform_weights_collapse_the_path_methods(g in graph(&[3])) {
        let supd = shortest_unweighted_path(&g).unwrap().values;
        prop_assert_eq!(&shortest_weighted_path(&g).unwrap().values, &supd);
        prop_assert_eq!(weighted_shortest_path(&g).unwrap().values, supd * 3.0);
    }

    #[test]
    fn parallel_rows_are_reproducible(g in graph(SMALL)) {
        for m in DistanceMethod::ALL {
            prop_assert_eq!(m.compute(&g, None).unwrap(), m.compute(&g, None).unwrap());
        }
    }
}

/// SWPD and WSPD pick paths by inverse weight and report a different
/// quantity along them, so they need not satisfy the triangle inequality.
#[test]
fn path_methods_can_break_the_triangle_inequality() {
    // Chord a–c of weight 1, a detour a–b–c of weights 1, and a heavy
    // 8-edge a→c path of weight 10 whose inverse cost 0.8 beats the chord.
    let mut g = WeightedGraph::new(10);
    g.add_weight(0, 1, 1).unwrap();
    g.add_weight(1, 2, 1).unwrap();
    g.add_weight(0, 2, 1).unwrap();
    let heavy = [0, 3, 4, 5, 6, 7, 8, 9, 2];
    for e in heavy.windows(2) {
        g.add_weight(e[0], e[1], 10).unwrap();
    }
    let swpd = shortest_weighted_path(&g).unwrap();
    assert_eq!(swpd.get(0, 2), 8.0);
    assert_eq!(swpd.get(0, 1) + swpd.get(1, 2), 2.0);
    let wspd = weighted_shortest_path(&g).unwrap();
    assert_eq!(wspd.get(0, 2), 80.0);
    assert_eq!(wspd.get(0, 1) + wspd.get(1, 2), 2.0);
}
