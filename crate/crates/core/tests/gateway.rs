mod common;

use meshplan::gateway::{
    build_gateway_plan, gateway_scores, inter_cluster_filter, restrict_to_gateways, GatewayError,
    Role,
};
use meshplan::matrix::Matrix;
use proptest::prelude::*;

fn labels_for(n: usize, k: usize, seed: u64) -> Vec<usize> {
    use rand::Rng;
    let mut rng = common::rng(seed);
    let mut labels: Vec<usize> = (0..n)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    labels
}

#[test]
fn score_is_row_sum_minus_within() {
    let mut rng = common::rng(41);
    for seed in 0..50 {
        let s = common::random_similarity(&mut rng, 20, 0.3);
        let labels = labels_for(20, 4, seed);
        let scores = gateway_scores(&s, &labels).unwrap();
        for i in 0..20 {
            let row: f64 = (0..20).map(|j| s.get(i, j)).sum();
            let within: f64 = (0..20)
                .filter(|&j| labels[j] == labels[i])
                .map(|j| s.get(i, j))
                .sum();
            assert!((scores[i] - (row - within)).abs() < 1e-12);
        }
    }
}

#[test]
fn roles_cover_gateway_set() {
    let mut rng = common::rng(42);
    let s = common::random_similarity(&mut rng, 25, 0.1);
    let labels = labels_for(25, 5, 7);
    let plan = build_gateway_plan(&s, &labels).unwrap();
    assert_eq!(plan.gateway_set.len(), 10);
    for c in &plan.clusters {
        assert_eq!(plan.role_of(c.primary), Role::Primary);
        assert_eq!(plan.role_of(c.secondary.unwrap()), Role::Secondary);
    }
    let members = (0..25).filter(|&i| plan.role_of(i) == Role::Member).count();
    assert_eq!(members, 15);
}

#[test]
fn restriction_rejects_bad_indices() {
    let m = Matrix::<f64>::zeros(3, 3);
    assert!(matches!(
        restrict_to_gateways(&m, &[0, 3]),
        Err(GatewayError::OutOfRange { index: 3, .. })
    ));
    assert!(matches!(
        restrict_to_gateways(&m, &[1, 1]),
        Err(GatewayError::Duplicate(1))
    ));
}

#[test]
fn empty_cluster_is_an_error() {
    let mut rng = common::rng(43);
    let s = common::random_similarity(&mut rng, 4, 0.0);
    assert!(matches!(
        build_gateway_plan(&s, &[0, 0, 2, 2]),
        Err(GatewayError::EmptyCluster(1))
    ));
}

proptest! {
    #[test]
    fn inter_filter_keeps_only_cross_entries(seed in any::<u64>(), n in 1usize..25, k in 1usize..5) {
        prop_assume!(k <= n);
        let mut rng = common::rng(seed);
        let s = common::random_similarity(&mut rng, n, 0.3);
        let labels = labels_for(n, k, seed);
        let f = inter_cluster_filter(&s, &labels).unwrap();
        prop_assert!(f.is_symmetric());
        for i in 0..n {
            for j in 0..n {
                let want = if labels[i] == labels[j] { 0.0 } else { s.get(i, j) };
                prop_assert_eq!(f[(i, j)], want);
            }
        }
        let plan = build_gateway_plan(&s, &labels).unwrap();
        prop_assert!(plan.s_g.is_symmetric());
        for a in 0..plan.gateway_set.len() {
            prop_assert_eq!(plan.s_g[(a, a)], 0.0);
            prop_assert!(plan.s_inter_g[(a, a)] == 0.0);
        }
    }
}
