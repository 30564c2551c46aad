//! Closed-form objectives equivalent to each game's optimal loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{conditional_entropy, entropy, joint_table, mutual_information};
use crate::model::game::{GameKind, GameSpec};
use crate::model::input::InputSpace;
use crate::model::labels::LabelMap;
use crate::model::protocol::Protocol;
use crate::model::stats::{all_conditional_stats, message_probabilities};

/// Σ_m p_m Var[X | m]: the unexplained variance.
pub fn reco_objective(protocol: &Protocol, space: &InputSpace) -> f64 {
    all_conditional_stats(protocol, space)
        .into_iter()
        .flatten()
        .map(|s| s.probability * s.variance)
        .sum()
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// f(p) = p · E log(1 + Binomial(d - 1, p)), summed exactly over k.
pub fn binomial_log_moment(p: f64, d: usize) -> f64 {
    assert!(d >= 2, "binomial_log_moment needs d ≥ 2");
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 {
        return 0.0;
    }
    let n = d - 1;
    if p == 1.0 {
        return (d as f64).ln();
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let expectation: f64 = (1..=n)
        .map(|k| {
            let log_pmf = ln_choose(n, k) + k as f64 * lp + (n - k) as f64 * lq;
            log_pmf.exp() * ((k + 1) as f64).ln()
        })
        .sum();
    p * expectation
}

/// Discrimination objective in binomial form, plus Σ p_m² when d = 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscObjective {
    pub value: f64,
    pub simplified: Option<f64>,
}

pub fn disc_objective(protocol: &Protocol, space: &InputSpace, d: usize) -> Result<DiscObjective> {
    if d < 2 {
        return Err(Error::InvalidGame("discrimination needs d ≥ 2".into()));
    }
    let p = message_probabilities(protocol, space);
    Ok(disc_objective_from_probabilities(&p, d))
}

pub fn disc_objective_from_probabilities(p: &[f64], d: usize) -> DiscObjective {
    DiscObjective {
        value: p.iter().map(|&pm| binomial_log_moment(pm, d)).sum(),
        simplified: (d == 2).then(|| p.iter().map(|pm| pm * pm).sum()),
    }
}

/// -I(X; S(X)), which is -H(S(X)) for a deterministic sender.
pub fn global_objective(protocol: &Protocol, space: &InputSpace) -> f64 {
    -entropy(&message_probabilities(protocol, space))
}

/// H(X | S(X)): the expected optimal global loss.
pub fn global_conditional_entropy(protocol: &Protocol, space: &InputSpace) -> f64 {
    let ids: Vec<usize> = (0..space.len()).collect();
    let joint = joint_table(
        space.weights(),
        protocol.assignment(),
        protocol.num_messages(),
        &ids,
        space.len(),
    );
    conditional_entropy(&joint)
}

/// The two-term supervised objective and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupervisedObjective {
    pub value: f64,
    /// Σ_m P(m)²
    pub diversity: f64,
    /// Σ_{m,y} P(m, y)²
    pub purity: f64,
}

pub fn supervised_objective(
    protocol: &Protocol,
    space: &InputSpace,
    labels: &LabelMap,
) -> Result<SupervisedObjective> {
    labels.check_inputs(space.len())?;
    protocol.check_inputs(space.len())?;
    let joint = message_label_joint(protocol, space, labels);
    let diversity: f64 = joint.iter().map(|r| r.iter().sum::<f64>().powi(2)).sum();
    let purity: f64 = joint.iter().flatten().map(|v| v * v).sum();
    Ok(SupervisedObjective {
        value: diversity - purity,
        diversity,
        purity,
    })
}

/// Factor turning the supervised objective into the exact two-candidate
/// loss of the synchronized receiver on balanced labels: log 2 · |Y| / (|Y| - 1).
pub fn supervised_loss_scale(num_labels: usize) -> f64 {
    let y = num_labels as f64;
    std::f64::consts::LN_2 * y / (y - 1.0)
}

/// -I(Y; S(X)).
pub fn classification_objective(protocol: &Protocol, space: &InputSpace, labels: &LabelMap) -> Result<f64> {
    labels.check_inputs(space.len())?;
    Ok(-mutual_information(&message_label_joint(protocol, space, labels)))
}

/// H(Y | S(X)): the expected optimal classification loss.
pub fn label_conditional_entropy(protocol: &Protocol, space: &InputSpace, labels: &LabelMap) -> Result<f64> {
    labels.check_inputs(space.len())?;
    Ok(conditional_entropy(&message_label_joint(protocol, space, labels)))
}

fn message_label_joint(protocol: &Protocol, space: &InputSpace, labels: &LabelMap) -> Vec<Vec<f64>> {
    joint_table(
        space.weights(),
        protocol.assignment(),
        protocol.num_messages(),
        labels.labels(),
        labels.num_labels(),
    )
}

/// The closed-form objective for any game (supervised needs d = 2).
pub fn objective(protocol: &Protocol, space: &InputSpace, spec: &GameSpec) -> Result<f64> {
    spec.validate()?;
    match spec.kind {
        GameKind::Reconstruction => Ok(reco_objective(protocol, space)),
        GameKind::Discrimination => Ok(disc_objective(protocol, space, spec.candidates)?.value),
        GameKind::Global => Ok(global_objective(protocol, space)),
        GameKind::Supervised if spec.candidates == 2 => {
            Ok(supervised_objective(protocol, space, spec.labels()?)?.value)
        }
        GameKind::Supervised => Err(Error::Unsupported(
            "the supervised closed form covers two candidates only".into(),
        )),
        GameKind::Classification => classification_objective(protocol, space, spec.labels()?),
    }
}

/// Smallest central second difference of f over a grid on [0, 1].
pub fn min_second_difference(d: usize, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let f: Vec<f64> = (0..=n)
        .map(|i| binomial_log_moment(i as f64 / n as f64, d))
        .collect();
    f.windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min)
}

/// Convexity of f on a grid: every second difference is ≥ -1e-9.
pub fn convexity_check(d: usize, step: f64) -> Result<bool> {
    if d < 2 {
        return Err(Error::InvalidGame("convexity check needs d ≥ 2".into()));
    }
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::InvalidGame("grid step must lie in (0, 1e-3]".into()));
    }
    Ok(min_second_difference(d, step) >= -1e-9)
}
