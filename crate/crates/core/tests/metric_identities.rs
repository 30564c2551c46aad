mod common;

use approx::assert_abs_diff_eq;
use common::{all_protocols, b, random_protocol, random_space, rng};
use emcomm_core::metrics::{
    cluster_variance, disentanglement, discrimination_accuracy_exact, message_variance, purity, random_baseline,
    topsim, AccuracyReceiver, DisentanglementKind, PurityMode,
};
use emcomm_core::model::input::InputSpace;
use emcomm_core::model::labels::LabelMap;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::protocol::Protocol;
use emcomm_core::objectives::reco_objective;
use emcomm_core::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn message_variance_equals_unexplained_variance_on_uniform_spaces() {
    let mut r = rng(41);
    for _ in 0..200 {
        let n = r.gen_range(2..=10);
        let space = random_space(&mut r, n, 3, true);
        let p = random_protocol(&mut r, n, 4);
        assert_abs_diff_eq!(message_variance(&p, &space), reco_objective(&p, &space), epsilon = 1e-10);
    }
}

/// Messages whose symbols all come from one group of a random vocabulary split.
fn grouped_messages(r: &mut impl Rng, count: usize, vocab: u32, len: usize) -> (MessageSpace, Vec<Vec<u32>>) {
    let mut symbols: Vec<u32> = (0..vocab).collect();
    symbols.shuffle(r);
    let cut = r.gen_range(1..vocab as usize);
    let groups = vec![symbols[..cut].to_vec(), symbols[cut..].to_vec()];
    let mut msgs: Vec<Vec<u32>> = Vec::new();
    while msgs.len() < count {
        let g = &groups[r.gen_range(0..2)];
        let m: Vec<u32> = (0..len).map(|_| g[r.gen_range(0..g.len())]).collect();
        if !msgs.contains(&m) {
            msgs.push(m);
        }
    }
    (MessageSpace::symbols(vocab, msgs).unwrap(), groups)
}

#[test]
fn cluster_variance_dominates_message_variance() {
    let mut r = rng(42);
    for _ in 0..100 {
        let n = r.gen_range(2..=10);
        let k = r.gen_range(1..=5);
        let uniform = r.gen_bool(0.5);
        let space = random_space(&mut r, n, 2, uniform);
        let p = random_protocol(&mut r, n, k);
        let (messages, groups) = grouped_messages(&mut r, k, 4, 3);
        let cv = cluster_variance(&p, &space, &messages, &groups).unwrap();
        assert!(cv >= message_variance(&p, &space) - 1e-12);
        let single = MessageSpace::symbols(k as u32, (0..k as u32).map(|s| vec![s]).collect()).unwrap();
        let singletons: Vec<Vec<u32>> = (0..k as u32).map(|s| vec![s]).collect();
        assert_abs_diff_eq!(
            cluster_variance(&p, &space, &single, &singletons).unwrap(),
            message_variance(&p, &space),
            epsilon = 1e-12
        );
    }
}

#[test]
fn topsim_examples() {
    let space = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0]).unwrap();
    let messages = MessageSpace::symbols(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
    let id = Protocol::identity(3);
    assert_abs_diff_eq!(topsim(&id, &space, &messages).unwrap(), 1.0, epsilon = 1e-12);

    let space = InputSpace::uniform_scalars(&[0.0, 1.0, 3.0, 7.0, 15.0]).unwrap();
    let scaled = MessageSpace::scalars(&[0.0, 2.0, 6.0, 14.0, 30.0]).unwrap();
    assert_abs_diff_eq!(topsim(&Protocol::identity(5), &space, &scaled).unwrap(), 1.0, epsilon = 1e-12);

    let constant = Protocol::constant(5, 1);
    let err = topsim(&constant, &space, &scaled).unwrap_err();
    assert!(matches!(err, Error::ZeroVariance(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn topsim_is_invariant_under_isometric_relabeling(
        seed in any::<u64>(),
        perm in Just((0u32..4).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=8);
        let k = r.gen_range(2..=6);
        let space = random_space(&mut r, n, 2, true);
        let p = random_protocol(&mut r, n, k);
        let base = MessageSpace::first_sequences(4, 3, k).unwrap();
        let relabeled = MessageSpace::symbols(
            4,
            (0..k)
                .map(|m| base.symbols_of(m).unwrap().iter().map(|&s| perm[s as usize]).collect())
                .collect(),
        )
        .unwrap();
        match (topsim(&p, &space, &base), topsim(&p, &space, &relabeled)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn disentanglement_scores_lie_in_unit_interval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=12);
        let k = r.gen_range(1..=6);
        let p = random_protocol(&mut r, n, k);
        let messages = MessageSpace::first_sequences(3, 3, k).unwrap();
        let attrs: Vec<LabelMap> = (0..r.gen_range(2..=3))
            .map(|_| LabelMap::from_indices((0..n).map(|_| r.gen_range(0..3)).collect()).unwrap())
            .collect();
        for kind in [DisentanglementKind::PosDis, DisentanglementKind::BosDis, DisentanglementKind::SPosDis] {
            let v = disentanglement(&p, &messages, &attrs, kind).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{kind:?} = {v}");
        }
    }
}

#[test]
fn purity_examples() {
    let aabb = LabelMap::from_strings(&["A", "A", "B", "B"]).unwrap();
    let split = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
    let anti = Protocol::new(vec![0, 1, 1, 0], 2).unwrap();
    let attrs = std::slice::from_ref(&aabb);
    assert_abs_diff_eq!(purity(&split, attrs, PurityMode::Attribute(0)).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(purity(&anti, attrs, PurityMode::Attribute(0)).unwrap(), 0.5, epsilon = 1e-12);
    let aabb_b = LabelMap::from_strings(&["A", "A", "B", "B"]).unwrap();
    let three_one = Protocol::new(vec![0, 0, 0, 1], 2).unwrap();
    assert_abs_diff_eq!(
        purity(&three_one, &[aabb_b.clone()], PurityMode::Attribute(0)).unwrap(),
        0.75,
        epsilon = 1e-12
    );
    let other = LabelMap::from_strings(&["x", "y", "x", "y"]).unwrap();
    assert_abs_diff_eq!(purity(&split, &[other, aabb_b], PurityMode::Max).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn baseline_never_beats_optimal_reconstruction() {
    let mut r = rng(43);
    for i in 0..20 {
        let n = r.gen_range(3..=6);
        let k = r.gen_range(2..=3);
        let space = random_space(&mut r, n, 2, true);
        let best = all_protocols(n, k)
            .min_by(|a, b| reco_objective(a, &space).total_cmp(&reco_objective(b, &space)))
            .unwrap();
        let report = random_baseline(&best, &space, |p| Ok(message_variance(p, &space)), 30, i).unwrap();
        assert!(report.mean >= message_variance(&best, &space) - 1e-12);
    }
}

#[test]
fn split_accuracy_on_b_is_three_quarters() {
    let split = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
    let report = discrimination_accuracy_exact(&split, &b(), AccuracyReceiver::Synchronized, 2).unwrap();
    assert!(report.exact);
    assert_eq!(report.accuracy, 0.75);
}
