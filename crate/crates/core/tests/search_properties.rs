mod common;

use approx::assert_abs_diff_eq;
use common::{b, random_space, rng};
use emcomm_core::consistency::semantic_consistency;
use emcomm_core::model::game::GameSpec;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::protocol::Protocol;
use emcomm_core::objectives::reco_objective;
use emcomm_core::optimize::{balanced_partition, exhaustive_search, kmeans_alternation, KmeansInit, PartitionFlavor};
use rand::Rng;

#[test]
fn kmeans_on_b_from_given_centroids() {
    let result = kmeans_alternation(&b(), 2, KmeansInit::Centroids(vec![vec![0.4], vec![2.6]]), 50, 0.0).unwrap();
    assert!(result.converged);
    assert!(result.rounds <= 2);
    assert_eq!(result.protocol.assignment(), &[0, 0, 1, 1]);
    assert_abs_diff_eq!(*result.trace.last().unwrap(), 0.25, epsilon = 1e-12);
    for w in result.trace.windows(2) {
        assert!(w[1] <= w[0]);
    }
    let messages = MessageSpace::scalars(&[0.0, 1.0]).unwrap();
    let best = exhaustive_search(&b(), &messages, &GameSpec::reconstruction()).unwrap();
    assert_abs_diff_eq!(best.value, 0.25, epsilon = 1e-12);
}

#[test]
fn kmeans_trace_never_increases() {
    let mut r = rng(21);
    for i in 0..100 {
        let n = r.gen_range(2..=12);
        let k = r.gen_range(1..=n.min(4));
        let uniform = r.gen_bool(0.5);
        let space = random_space(&mut r, n, 2, uniform);
        let result = kmeans_alternation(&space, k, KmeansInit::Seeded(i), 100, 1e-12).unwrap();
        for w in result.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{:?}", result.trace);
        }
        assert_abs_diff_eq!(
            *result.trace.last().unwrap(),
            reco_objective(&result.protocol, &space),
            epsilon = 1e-10
        );
        if n <= 7 {
            let messages = MessageSpace::scalars(&(0..k).map(|m| m as f64).collect::<Vec<_>>()).unwrap();
            let best = exhaustive_search(&space, &messages, &GameSpec::reconstruction()).unwrap();
            assert!(*result.trace.last().unwrap() >= best.value - 1e-10);
        }
    }
}

#[test]
fn reconstruction_optima_are_semantically_consistent() {
    let mut r = rng(22);
    let mut instances = 0;
    while instances < 50 {
        let n = r.gen_range(3..=6);
        let k = r.gen_range(2..=3.min(n - 1));
        let uniform = r.gen_bool(0.5);
        let dim = r.gen_range(1..=2);
        let space = random_space(&mut r, n, dim, uniform);
        let messages = MessageSpace::scalars(&(0..k).map(|m| m as f64).collect::<Vec<_>>()).unwrap();
        let result = exhaustive_search(&space, &messages, &GameSpec::reconstruction()).unwrap();
        for p in &result.optimal {
            assert!(semantic_consistency(p, &space).consistent);
        }
        instances += 1;
    }
}

#[test]
fn adversarial_split_on_b_is_optimal_but_inconsistent() {
    let anti = balanced_partition(&b(), 2, PartitionFlavor::AdversarialAntipodal).unwrap();
    assert_eq!(anti.equivalence_classes(), vec![vec![0, 3], vec![1, 2]]);
    let messages = MessageSpace::scalars(&[0.0, 1.0]).unwrap();
    let best = exhaustive_search(&b(), &messages, &GameSpec::discrimination(2)).unwrap();
    assert_abs_diff_eq!(best.simplified.unwrap(), 0.5, epsilon = 1e-12);
    assert!(best.optimal.contains(&anti));
    let sc = semantic_consistency(&anti, &b());
    assert!(!sc.consistent);
    assert_abs_diff_eq!(sc.explained, 0.0, epsilon = 1e-12);
    let split = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
    assert!(semantic_consistency(&split, &b()).consistent);
}

#[test]
fn greedy_partition_balances_mass() {
    let space = emcomm_core::model::input::InputSpace::from_masses(
        vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
        &[0.4, 0.3, 0.2, 0.1],
    )
    .unwrap();
    let p = balanced_partition(&space, 2, PartitionFlavor::GreedyUniform).unwrap();
    assert_eq!(p.equivalence_classes(), vec![vec![0, 3], vec![1, 2]]);
}
