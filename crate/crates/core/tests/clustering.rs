mod common;

use meshplan::clustering::{
    balanced_assign, cluster, cluster_sizes, constrained_assignment, kmeans_init, AssignMode,
    ClusterConfig, ClusterError,
};
use meshplan::matrix::Matrix;
use meshplan::spectral::Embedding;
use proptest::prelude::*;
use rand::Rng;

fn embedding(points: Matrix<f64>) -> Embedding<f64> {
    let d = points.cols();
    Embedding {
        coords: points,
        eigenvalues: vec![],
        d,
    }
}

#[test]
fn beats_random_feasible_assignments() {
    let mut rng = common::rng(31);
    let (n, k, d) = (40, 4, 3);
    let points = Matrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
    let centroids = Matrix::from_fn(k, d, |_, _| rng.random_range(-1.0..1.0));
    let cfg = ClusterConfig::new(k);
    let (_, best) = constrained_assignment(&points, &centroids, &cfg).unwrap();
    for _ in 0..1000 {
        // random labeling with exactly 10 per cluster
        let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.random_range(0..=i));
        }
        let cost: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &c)| common::sq_dist(points.row(i), centroids.row(c)))
            .sum();
        assert!(best <= cost + 1e-12);
    }
}

#[test]
fn small_instances_reach_partition_optimum() {
    // two well separated clouds: the alternating loop should find the global
    // size-bounded optimum
    let mut rng = common::rng(32);
    for _ in 0..25 {
        let n = rng.random_range(4..=8);
        let offset = 10.0;
        let points = Matrix::from_fn(n, 2, |i, _| {
            rng.random_range(-1.0..1.0) + if i % 2 == 0 { offset } else { 0.0 }
        });
        let cfg = ClusterConfig::new(2);
        let (lower, upper) = cfg.bounds(n).unwrap();
        let a = cluster(&embedding(points.clone()), &cfg).unwrap();
        let best = common::brute_force_partition(&points, 2, lower, upper);
        let got = common::partition_inertia(&points, &a.labels, 2);
        assert!((got - best).abs() < 1e-9, "{got} vs {best}");
    }
}

#[test]
fn single_cluster_and_singletons() {
    let points = Matrix::from_fn(5, 2, |i, j| (i * 3 + j) as f64);
    let one = cluster(&embedding(points.clone()), &ClusterConfig::new(1)).unwrap();
    assert_eq!(one.labels, vec![0; 5]);
    let all = cluster(&embedding(points), &ClusterConfig::new(5)).unwrap();
    let mut sorted = all.labels.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    assert!(all.inertia.abs() < 1e-12);
}

#[test]
fn infeasible_configs() {
    let points = Matrix::<f64>::zeros(7, 1);
    let mut cfg = ClusterConfig::new(3);
    cfg.capacity = Some(2);
    assert!(matches!(
        cluster(&embedding(points.clone()), &cfg),
        Err(ClusterError::Infeasible { .. })
    ));
    assert!(matches!(
        cluster(&embedding(Matrix::zeros(2, 1)), &ClusterConfig::new(3)),
        Err(ClusterError::TooFewPoints { .. })
    ));
}

#[test]
fn greedy_respects_capacity_only() {
    let mut rng = common::rng(33);
    for _ in 0..50 {
        let n = rng.random_range(3..=30);
        let k = rng.random_range(1..=n.min(5));
        let points = Matrix::from_fn(n, 2, |_, _| rng.random_range(0.0..1.0));
        let mut cfg = ClusterConfig::new(k);
        cfg.mode = AssignMode::Greedy;
        cfg.lower_bound = false;
        cfg.capacity = Some(n.div_ceil(k));
        let a = cluster(&embedding(points), &cfg).unwrap();
        assert!(a.sizes().iter().all(|&m| m <= n.div_ceil(k)));
        assert_eq!(a.labels.len(), n);
    }
}

#[test]
fn identical_seeds_identical_results() {
    let mut rng = common::rng(34);
    let points = Matrix::from_fn(60, 3, |_, _| rng.random_range(-1.0..1.0));
    let mut cfg = ClusterConfig::new(6);
    cfg.seed = 99;
    let a = cluster(&embedding(points.clone()), &cfg).unwrap();
    let b = cluster(&embedding(points), &cfg).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sizes_within_bounds_and_history_monotone(
        seed in any::<u64>(),
        n in 2usize..40,
        k in 1usize..6,
        slack in 0usize..4,
    ) {
        prop_assume!(k <= n);
        let mut rng = common::rng(seed);
        let points = Matrix::from_fn(n, 3, |_, _| rng.random_range(-1.0..1.0));
        let mut cfg = ClusterConfig::new(k);
        cfg.capacity = Some((n.div_ceil(k) + slack).min(n));
        cfg.seed = seed;
        cfg.restarts = 3;
        let (lower, upper) = cfg.bounds(n).unwrap();
        let init = kmeans_init(&points, &cfg).unwrap();
        let a = balanced_assign(&points, &init, &cfg).unwrap();
        for m in cluster_sizes(&a.labels, k) {
            prop_assert!(m >= lower && m <= upper);
        }
        for w in a.inertia_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{:?}", a.inertia_history);
        }
    }
}
