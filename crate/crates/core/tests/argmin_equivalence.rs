mod common;

use approx::assert_abs_diff_eq;
use common::{all_protocols, argmin_set, balanced_labels, random_space, rng};
use emcomm_core::games::{eval_game, synchronized_receiver};
use emcomm_core::model::game::GameSpec;
use emcomm_core::model::input::InputSpace;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::stats::{input_variance, variance_split};
use emcomm_core::objectives::{convexity_check, objective, supervised_objective};
use emcomm_core::optimize::{balanced_partition, exhaustive_search, PartitionFlavor};
use rand::Rng;

fn exact_loss(protocol: &emcomm_core::model::protocol::Protocol, space: &InputSpace, spec: &GameSpec) -> f64 {
    let receiver = synchronized_receiver(protocol, space, spec).unwrap();
    eval_game(protocol, &receiver, space, spec).unwrap().expected.expect_finite()
}

fn check_game(space: &InputSpace, k: usize, spec: &GameSpec) {
    let protocols: Vec<_> = all_protocols(space.len(), k).collect();
    let losses: Vec<f64> = protocols.iter().map(|p| exact_loss(p, space, spec)).collect();
    let objectives: Vec<f64> = protocols.iter().map(|p| objective(p, space, spec).unwrap()).collect();
    assert_eq!(argmin_set(&losses, 1e-9), argmin_set(&objectives, 1e-9), "{:?}", spec.kind);
}

#[test]
fn argmin_sets_agree_for_every_game() {
    let mut r = rng(11);
    for _ in 0..12 {
        let n = 2 * r.gen_range(1..=3);
        let k = r.gen_range(1..=3);
        let dim = r.gen_range(1..=2);
        let space = random_space(&mut r, n, dim, true);
        let labels = balanced_labels(&mut r, n, 2);
        check_game(&space, k, &GameSpec::reconstruction());
        check_game(&space, k, &GameSpec::discrimination(2));
        check_game(&space, k, &GameSpec::discrimination(3));
        check_game(&space, k, &GameSpec::global());
        check_game(&space, k, &GameSpec::supervised(2, labels.clone()));
        check_game(&space, k, &GameSpec::classification(labels));
    }
}

#[test]
fn argmin_sets_agree_on_weighted_spaces() {
    let mut r = rng(12);
    for _ in 0..12 {
        let n = r.gen_range(2..=6);
        let k = r.gen_range(1..=3);
        let space = random_space(&mut r, n, 2, false);
        check_game(&space, k, &GameSpec::reconstruction());
        check_game(&space, k, &GameSpec::discrimination(2));
        check_game(&space, k, &GameSpec::discrimination(3));
        check_game(&space, k, &GameSpec::global());
    }
}

#[test]
fn unexplained_plus_explained_is_total() {
    let mut r = rng(13);
    for _ in 0..200 {
        let n = r.gen_range(2..=8);
        let space = random_space(&mut r, n, 3, false);
        let protocol = common::random_protocol(&mut r, n, 4);
        let split = variance_split(&protocol, &space);
        let reco = objective(&protocol, &space, &GameSpec::reconstruction()).unwrap();
        assert_abs_diff_eq!(reco + split.explained, input_variance(&space), epsilon = 1e-10);
    }
}

#[test]
fn equal_mass_partitions_are_discrimination_optimal() {
    let space = InputSpace::uniform_scalars(&[0.0, 1.0, 2.5, 4.0, 7.0, 11.0]).unwrap();
    let messages = MessageSpace::scalars(&[0.0, 1.0, 2.0]).unwrap();
    for d in [2, 3] {
        let result = exhaustive_search(&space, &messages, &GameSpec::discrimination(d)).unwrap();
        let equal: Vec<_> = all_protocols(6, 3).filter(|p| p.class_sizes() == vec![2, 2, 2]).collect();
        assert_eq!(equal.len(), 90);
        for p in &equal {
            assert!(result.optimal.contains(p));
        }
        assert_eq!(result.optimal.len(), equal.len());
        assert!(result.uniform_optimum);
    }
    for d in [2, 3, 5, 41] {
        assert!(convexity_check(d, 1e-3).unwrap());
    }
}

#[test]
fn antipodal_partitions_attain_the_discrimination_optimum() {
    let mut r = rng(14);
    for _ in 0..20 {
        let k = r.gen_range(1..=3);
        let space = random_space(&mut r, 2 * k, 2, true);
        let protocol = balanced_partition(&space, k, PartitionFlavor::AdversarialAntipodal).unwrap();
        let messages = MessageSpace::scalars(&(0..k).map(|m| m as f64).collect::<Vec<_>>()).unwrap();
        for d in [2, 3] {
            let spec = GameSpec::discrimination(d);
            let best = exhaustive_search(&space, &messages, &spec).unwrap();
            assert_abs_diff_eq!(objective(&protocol, &space, &spec).unwrap(), best.value, epsilon = 1e-12);
        }
    }
}

#[test]
fn supervised_objective_is_nonnegative_and_zero_only_when_pure() {
    let mut r = rng(15);
    for _ in 0..10 {
        let space = random_space(&mut r, 6, 1, true);
        let labels = balanced_labels(&mut r, 6, 2);
        for p in all_protocols(6, 3) {
            let s = supervised_objective(&p, &space, &labels).unwrap();
            assert!(s.value >= -1e-15);
            let pure = p
                .equivalence_classes()
                .iter()
                .all(|c| c.iter().all(|&x| labels.label(x) == labels.label(c[0])));
            assert_eq!(s.value.abs() < 1e-12, pure);
        }
    }
}
