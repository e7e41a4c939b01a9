mod common;

use proptest::prelude::*;

use wopn::graphdist::DistanceMatrix;
use wopn::persistence::{rips_persistence, rips_persistence_capped};
use wopn::Error;

fn pairs_of(d: &[Vec<f64>]) -> common::Pairs {
    let diag = rips_persistence(&DistanceMatrix::from_rows(d).unwrap(), 1).unwrap();
    common::sorted(diag.pairs.iter().map(|p| (p.dimension, p.birth, p.death)).collect())
}

fn matrix(grid: bool) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=8, any::<u64>()).prop_map(move |(n, seed)| common::random_matrix(&mut common::rng(seed), n, grid))
}

proptest! {
    #[test]
    fn matches_naive_reduction_with_ties(d in matrix(true)) {
        prop_assert_eq!(pairs_of(&d), common::naive_persistence(&d));
    }

    #[test]
    fn matches_naive_reduction_generic(d in matrix(false)) {
        prop_assert_eq!(pairs_of(&d), common::naive_persistence(&d));
    }

    #[test]
    fn relabeling_vertices_keeps_the_diagram(d in matrix(true), seed in any::<u64>()) {
        let n = d.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r = seed;
        for i in (1..n).rev() {
            r = r.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (r >> 33) as usize % (i + 1));
        }
        let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d[perm[i]][perm[j]]).collect()).collect();
        prop_assert_eq!(pairs_of(&d), pairs_of(&q));
    }

    #[test]
    fn one_essential_class_and_finite_loops(d in matrix(false)) {
        let p = pairs_of(&d);
        prop_assert_eq!(p.iter().filter(|x| x.2.is_infinite()).count(), 1);
        prop_assert!(p.iter().filter(|x| x.0 == 1).all(|x| x.2.is_finite() && x.2 > x.1));
        // With distinct positive distances every vertex but one dies in H0.
        prop_assert_eq!(p.iter().filter(|x| x.0 == 0).count(), d.len());
    }
}

#[test]
fn vertex_cap() {
    let d = DistanceMatrix::from_rows(&common::random_matrix(&mut common::rng(1), 5, false)).unwrap();
    assert!(matches!(rips_persistence_capped(&d, 1, 4), Err(Error::Size { n: 5, cap: 4 })));
    assert!(rips_persistence_capped(&d, 1, 5).is_ok());
}

#[test]
fn larger_matrices_match_too() {
    let mut rng = common::rng(99);
    for n in [12, 16] {
        for grid in [true, false] {
            let d = common::random_matrix(&mut rng, n, grid);
            assert_eq!(pairs_of(&d), common::naive_persistence(&d), "n = {n}, grid = {grid}");
        }
    }
}
