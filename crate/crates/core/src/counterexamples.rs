//! The explicit instances behind the negative results: the six-message
//! discrimination receiver that is simple-looking and non-degenerate yet
//! induces a spatially meaningless sender, and the antipodal optimal
//! protocol that is not semantically consistent.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::consistency::{
    non_degeneracy, optimal_constant_receiver, receiver_simplicity, semantic_consistency,
    spatial_meaningfulness, ReceiverTable, ThresholdStatus,
};
use crate::error::{Error, Result};
use crate::games::eval::eval_discrimination;
use crate::games::receiver::{DenseDiscriminationTable, DiscriminationReceiver, Receiver};
use crate::games::sync::synchronized_sender;
use crate::model::game::{EvalMode, GameSpec};
use crate::model::input::InputSpace;
use crate::model::message::MessageSpace;
use crate::model::protocol::Protocol;
use crate::model::stats::{all_conditional_stats, input_variance, message_probabilities};
use crate::objectives::{binomial_log_moment, disc_objective, reco_objective};
use crate::optimize::{balanced_partition, exhaustive_search_with, search_size, PartitionFlavor};

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Thm5Instance {
    /// Uniform over 1..6 then -1..-6.
    pub space: InputSpace,
    /// Messages 1..6 as scalars.
    pub messages: MessageSpace,
    pub receiver: Receiver,
    /// ±k ↦ message k.
    pub protocol: Protocol,
}

/// Which set A_k = {k, -k} an input belongs to (0-based k).
fn block(space: &InputSpace, x: usize) -> usize {
    space.point(x)[0].abs() as usize - 1
}

pub fn build_thm5_instance() -> Thm5Instance {
    let values: Vec<f64> = (1..=6).map(f64::from).chain((1..=6).map(|k| -f64::from(k))).collect();
    let space = InputSpace::uniform_scalars(&values).expect("valid space");
    let messages = MessageSpace::scalars(&(1..=6).map(f64::from).collect::<Vec<_>>()).expect("valid messages");
    let protocol = Protocol::new((0..12).map(|x| block(&space, x)).collect(), 6).expect("valid protocol");
    let table = DenseDiscriminationTable::tabulate(6, 12, 2, |m, c| {
        match (block(&space, c[0]) == m, block(&space, c[1]) == m) {
            (true, false) => vec![1.0, 0.0],
            (false, true) => vec![0.0, 1.0],
            // both in A_m, or neither: no information
            _ => vec![0.5, 0.5],
        }
    })
    .expect("6 × 12 × 12 rows");
    Thm5Instance {
        space,
        messages,
        receiver: Receiver::Discrimination(DiscriminationReceiver::Dense(table)),
        protocol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub step: char,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub instance: String,
    pub steps: Vec<Step>,
    pub all_passed: bool,
}

impl Verdict {
    fn new(instance: &str, steps: Vec<Step>) -> Self {
        let all_passed = steps.iter().all(|s| s.passed);
        Self {
            instance: instance.into(),
            steps,
            all_passed,
        }
    }

    pub fn step(&self, id: char) -> Option<&Step> {
        self.steps.iter().find(|s| s.step == id)
    }

    /// The first failing step, if any.
    pub fn first_failure(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.passed)
    }
}

fn step(id: char, name: &str, passed: bool, detail: Value) -> Step {
    Step {
        step: id,
        name: name.into(),
        passed,
        detail,
    }
}

/// Reproduces every numeric claim about the six-message instance, in order.
///
/// Step (a) reports both the constant comparison k > 1/√2 and the full
/// pairwise Lipschitz check over the dense table; only the latter decides
/// the step.
pub fn verify_thm5() -> Result<Verdict> {
    let inst = build_thm5_instance();
    let spec = GameSpec::discrimination(2);
    let disc = inst.receiver.as_discrimination()?;
    let var = input_variance(&inst.space);
    let epsilon_m = inst.messages.epsilon_m()?;
    let mut steps = Vec::new();

    // (a) simplicity
    let table = ReceiverTable::discrimination(disc, &inst.messages, &inst.space, 2)?;
    let simple = receiver_simplicity(&table, epsilon_m, &inst.space)?;
    let claimed_spread = std::f64::consts::FRAC_1_SQRT_2;
    let witness = simple.witness.map(|(a, b)| {
        json!({
            "domain": [table.domain[a], table.domain[b]],
            "outputs": [table.outputs[a], table.outputs[b]],
        })
    });
    steps.push(step(
        'a',
        "receiver simplicity",
        simple.simple,
        json!({
            "variance": var,
            "epsilon0": epsilon_m,
            "k": simple.k,
            "k_exceeds_claimed_spread": simple.k > claimed_spread,
            "claimed_spread": claimed_spread,
            "worst_ratio": simple.worst_ratio,
            "witness": witness,
            "embedding": simple.embedding,
        }),
    ));

    // (b) synchronized sender
    let sender = synchronized_sender(&inst.receiver, &inst.space, &spec)?;
    steps.push(step(
        'b',
        "synchronized sender reproduces ±k ↦ k",
        sender == inst.protocol,
        json!({ "sender": sender.assignment(), "expected": inst.protocol.assignment() }),
    ));

    // (c) exact loss
    let loss = eval_discrimination(&inst.protocol, disc, &inst.space, 2, EvalMode::Exact)?.expected;
    let target = std::f64::consts::LN_2 / 6.0;
    steps.push(step(
        'c',
        "exact synchronized loss",
        loss.value().is_some_and(|l| (l - target).abs() <= TOL),
        json!({ "loss": loss.value(), "expected": target }),
    ));

    // (d) constant receiver and non-degeneracy
    let (constant, constant_loss) = optimal_constant_receiver(&inst.space, &spec)?;
    let oracle_constant = eval_discrimination(
        &Protocol::constant(12, 1),
        constant.as_discrimination()?,
        &inst.space,
        2,
        EvalMode::Exact,
    )?
    .expected;
    let nd = non_degeneracy(&inst.receiver, &inst.space, &spec)?;
    steps.push(step(
        'd',
        "optimal constant loss and non-degeneracy",
        nd.non_degenerate
            && (constant_loss - std::f64::consts::LN_2).abs() <= TOL
            && oracle_constant.value().is_some_and(|l| (l - constant_loss).abs() <= TOL),
        json!({
            "constant_loss": constant_loss,
            "constant_loss_oracle": oracle_constant.value(),
            "sup_loss": nd.sup_loss.value(),
            "quarter_constant": constant_loss / 4.0,
            "non_degenerate": nd.non_degenerate,
        }),
    ));

    // (e) optimality: uniform masses reach the convexity lower bound K·f(1/K)
    let p = message_probabilities(&inst.protocol, &inst.space);
    let value = disc_objective(&inst.protocol, &inst.space, 2)?.value;
    let bound = 6.0 * binomial_log_moment(1.0 / 6.0, 2);
    steps.push(step(
        'e',
        "optimal by uniform message masses",
        p.iter().all(|&pm| (pm - 1.0 / 6.0).abs() <= TOL) && (value - bound).abs() <= TOL,
        json!({ "masses": p, "objective": value, "lower_bound": bound }),
    ));

    // (f) semantic consistency
    let sc = semantic_consistency(&inst.protocol, &inst.space);
    let means: Vec<f64> = all_conditional_stats(&inst.protocol, &inst.space)
        .into_iter()
        .flatten()
        .map(|s| s.mean[0])
        .collect();
    steps.push(step(
        'f',
        "not semantically consistent",
        !sc.consistent && sc.explained.abs() <= TOL && means.iter().all(|m| m.abs() <= TOL),
        json!({ "explained": sc.explained, "unexplained": sc.unexplained, "conditional_means": means }),
    ));

    // (g) spatial meaningfulness
    let spatial = spatial_meaningfulness(&inst.protocol, &inst.space, &inst.messages, epsilon_m)?;
    let below_one: Vec<_> = spatial.checks.iter().filter(|c| c.epsilon < 1.0).collect();
    let equality_below_one = !below_one.is_empty()
        && below_one
            .iter()
            .all(|c| c.status == ThresholdStatus::Boundary);
    steps.push(step(
        'g',
        "not spatially meaningful",
        !spatial.meaningful && equality_below_one,
        json!({
            "meaningful": spatial.meaningful,
            "equality_below_one": equality_below_one,
            "checks": spatial.checks,
        }),
    ));

    Ok(Verdict::new("discrimination-spatial", steps))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnticonsistentReport {
    pub protocol: Protocol,
    pub objective: f64,
    pub simplified: f64,
    /// Optimal value, by enumeration when within budget, else by the
    /// uniform-mass lower bound.
    pub optimum: f64,
    pub optimal: bool,
    pub semantically_consistent: bool,
    pub explained: f64,
}

/// The farthest-pair protocol, checked for two-candidate optimality and
/// semantic consistency.
pub fn build_anticonsistent_optimal(space: &InputSpace, k: usize) -> Result<AnticonsistentReport> {
    if space.len() != 2 * k || !space.is_uniform(TOL) {
        return Err(Error::InvalidGame(
            "antipodal construction needs a uniform prior and N = 2K".into(),
        ));
    }
    let protocol = balanced_partition(space, k, PartitionFlavor::AdversarialAntipodal)?;
    let obj = disc_objective(&protocol, space, 2)?;
    let optimum = match search_size(space.len(), k) {
        Ok(_) => exhaustive_search_with(space, k, &GameSpec::discrimination(2), Default::default())?.value,
        Err(_) => k as f64 * binomial_log_moment(1.0 / k as f64, 2),
    };
    let sc = semantic_consistency(&protocol, space);
    Ok(AnticonsistentReport {
        objective: obj.value,
        simplified: obj.simplified.unwrap_or(f64::NAN),
        optimal: (obj.value - optimum).abs() <= TOL,
        semantically_consistent: sc.consistent,
        explained: sc.explained,
        optimum,
        protocol,
    })
}

/// The desk-scale optimality-without-consistency check on {0, 1, 2, 3}.
pub fn verify_thm2() -> Result<Verdict> {
    let space = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0])?;
    let report = build_anticonsistent_optimal(&space, 2)?;
    let best_reco = exhaustive_search_with(&space, 2, &GameSpec::reconstruction(), Default::default())?;
    let reco_consistent = best_reco
        .optimal
        .iter()
        .all(|p| semantic_consistency(p, &space).consistent);
    let steps = vec![
        step(
            'a',
            "antipodal protocol is discrimination-optimal",
            report.optimal && (report.simplified - 0.5).abs() <= TOL,
            json!({
                "protocol": report.protocol.assignment(),
                "objective": report.objective,
                "simplified": report.simplified,
                "optimum": report.optimum,
            }),
        ),
        step(
            'b',
            "antipodal protocol is not semantically consistent",
            !report.semantically_consistent && report.explained.abs() <= TOL,
            json!({ "explained": report.explained }),
        ),
        step(
            'c',
            "reconstruction optima are semantically consistent",
            reco_consistent,
            json!({
                "value": best_reco.value,
                "optimal": best_reco.canonical,
                "objective_check": reco_objective(&best_reco.optimal[0], &space),
            }),
        ),
    ];
    Ok(Verdict::new("discrimination-consistency", steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_shape() {
        let inst = build_thm5_instance();
        assert!((input_variance(&inst.space) - 91.0 / 6.0).abs() < 1e-12);
        assert_eq!(inst.messages.epsilon_m().unwrap(), 1.0);
        for p in message_probabilities(&inst.protocol, &inst.space) {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
        let Receiver::Discrimination(DiscriminationReceiver::Dense(t)) = &inst.receiver else {
            panic!("dense table expected");
        };
        assert_eq!(t.len(), 6 * 12 * 12);
    }

    #[test]
    fn six_block_steps() {
        let v = verify_thm5().unwrap();
        for id in ['b', 'c', 'd', 'e', 'f', 'g'] {
            assert!(v.step(id).unwrap().passed, "step {id} failed: {:?}", v.step(id));
        }
        let a = v.step('a').unwrap();
        assert_eq!(a.detail["k_exceeds_claimed_spread"], true);
        let k = (std::f64::consts::SQRT_2 - 1.0) / 2.0 * (91.0f64 / 6.0).sqrt();
        assert!((a.detail["k"].as_f64().unwrap() - k).abs() < 1e-12);
        assert!((k - 0.806_57).abs() < 1e-5);
        // outputs (1,0) and (0,1) sit on domain points one unit apart
        assert!(!a.passed);
        assert!((a.detail["worst_ratio"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(!v.all_passed);
        assert_eq!(v.first_failure().unwrap().step, 'a');
    }

    #[test]
    fn six_block_thresholds() {
        let v = verify_thm5().unwrap();
        let checks = v.step('g').unwrap().detail["checks"].as_array().unwrap().clone();
        assert_eq!(checks.len(), 2);
        assert_eq!(checks[0]["status"], "boundary");
        // at ε = 1 adjacent messages pool and the inequality holds
        assert_eq!(checks[1]["status"], "pass");
        assert!((checks[1]["conditional"].as_f64().unwrap() - 29.5).abs() < 1e-12);
    }

    #[test]
    fn anticonsistent_examples() {
        let b = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let r = build_anticonsistent_optimal(&b, 2).unwrap();
        assert_eq!(r.protocol.assignment(), &[0, 1, 1, 0]);
        assert!(r.optimal && !r.semantically_consistent);
        assert!((r.simplified - 0.5).abs() < 1e-12);

        let sym = InputSpace::uniform_scalars(&[-2.0, -1.0, 1.0, 2.0]).unwrap();
        let r = build_anticonsistent_optimal(&sym, 2).unwrap();
        assert_eq!(r.protocol.assignment(), &[0, 1, 1, 0]);
        assert!(!r.semantically_consistent);

        let two = InputSpace::uniform_scalars(&[0.0, 1.0]).unwrap();
        let r = build_anticonsistent_optimal(&two, 1).unwrap();
        assert!(r.optimal && !r.semantically_consistent);

        assert!(build_anticonsistent_optimal(&b, 3).is_err());
    }

    #[test]
    fn antipodal_verdict() {
        assert!(verify_thm2().unwrap().all_passed);
    }
}
