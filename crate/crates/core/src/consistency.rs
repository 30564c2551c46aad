//! Decision procedures for semantic consistency, spatial meaningfulness,
//! receiver simplicity and non-degeneracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{ordered_sum, Exec};
use crate::games::loss::Loss;
use crate::games::receiver::{DiscriminationReceiver, Receiver, ReconstructionReceiver};
use crate::games::sync::{argmin_message, message_losses};
use crate::model::game::{GameKind, GameSpec};
use crate::model::input::{dist, sq_dist, InputSpace};
use crate::model::message::MessageSpace;
use crate::model::protocol::Protocol;
use crate::model::stats::{input_variance, message_probabilities, variance_split};

/// Differences within this margin count as equality, which fails a strict
/// inequality.
pub const STRICT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticConsistency {
    pub consistent: bool,
    /// Unexplained variance equals the total within the tolerance.
    pub boundary: bool,
    pub total: f64,
    pub explained: f64,
    pub unexplained: f64,
}

pub fn semantic_consistency(protocol: &Protocol, space: &InputSpace) -> SemanticConsistency {
    semantic_consistency_with(protocol, space, STRICT_TOLERANCE)
}

pub fn semantic_consistency_with(protocol: &Protocol, space: &InputSpace, tolerance: f64) -> SemanticConsistency {
    let split = variance_split(protocol, space);
    let gap = split.total - split.unexplained;
    SemanticConsistency {
        consistent: gap > tolerance,
        boundary: gap.abs() <= tolerance,
        total: split.total,
        explained: split.explained,
        unexplained: split.unexplained,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdStatus {
    Pass,
    /// Conditional equals unconditional: fails the strict inequality.
    Boundary,
    Fail,
    /// Empty conditioning event; skipped.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    /// 0 stands for the limit ε → 0⁺ (same-message pairs only).
    pub epsilon: f64,
    pub conditional: Option<f64>,
    pub unconditional: f64,
    pub status: ThresholdStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialReport {
    pub meaningful: bool,
    pub epsilon0: f64,
    pub epsilon_m: Option<f64>,
    pub checks: Vec<ThresholdCheck>,
    pub warnings: Vec<String>,
}

/// Pairwise statistics of a protocol aggregated by message pair.
#[derive(Debug, Clone)]
pub struct PairTable {
    /// Σ w w' ‖x − x'‖² over input pairs with messages (a, b).
    sqdist: Vec<Vec<f64>>,
    /// p_a p_b
    mass: Vec<Vec<f64>>,
    unconditional: f64,
}

impl PairTable {
    /// Exact weighted double sum over input pairs, row-parallel with a
    /// fixed-order reduction.
    pub fn new(protocol: &Protocol, space: &InputSpace, exec: Exec) -> Self {
        let k = protocol.num_messages();
        let n = space.len();
        let rows = exec.map_range(n, |x| {
            let mut row = vec![0.0; k];
            for y in 0..n {
                row[protocol.message_of(y)] +=
                    space.weight(x) * space.weight(y) * sq_dist(space.point(x), space.point(y));
            }
            row
        });
        let mut sqdist = vec![vec![0.0; k]; k];
        for (x, row) in rows.iter().enumerate() {
            let a = protocol.message_of(x);
            for (b, v) in row.iter().enumerate() {
                sqdist[a][b] += v;
            }
        }
        let p = message_probabilities(protocol, space);
        let mass = p.iter().map(|pa| p.iter().map(|pb| pa * pb).collect()).collect();
        let unconditional = ordered_sum(rows.iter().flatten().copied());
        Self {
            sqdist,
            mass,
            unconditional,
        }
    }

    pub fn unconditional(&self) -> f64 {
        self.unconditional
    }

    /// Conditional expectation over pairs whose message pair satisfies `keep`;
    /// `None` when the event has probability zero.
    pub fn conditional(&self, keep: impl Fn(usize, usize) -> bool) -> Option<f64> {
        let k = self.mass.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for a in 0..k {
            for b in 0..k {
                if keep(a, b) {
                    num += self.sqdist[a][b];
                    den += self.mass[a][b];
                }
            }
        }
        (den > 0.0).then(|| num / den)
    }
}

/// Conditional E‖x₁ − x₂‖² given d_M(S(x₁), S(x₂)) ≤ ε (ε = 0: same message).
pub fn conditional_pairwise_sqdist(
    protocol: &Protocol,
    space: &InputSpace,
    messages: &MessageSpace,
    epsilon: f64,
) -> Result<Option<f64>> {
    check_message_space(protocol, messages)?;
    let table = PairTable::new(protocol, space, Exec::default());
    Ok(table.conditional(|a, b| messages.distance(a, b) <= epsilon))
}

fn check_message_space(protocol: &Protocol, messages: &MessageSpace) -> Result<()> {
    if protocol.num_messages() > messages.len() {
        return Err(Error::InvalidProtocol(format!(
            "protocol uses {} message slots, message space has {}",
            protocol.num_messages(),
            messages.len()
        )));
    }
    Ok(())
}

pub fn spatial_meaningfulness(
    protocol: &Protocol,
    space: &InputSpace,
    messages: &MessageSpace,
    epsilon0: f64,
) -> Result<SpatialReport> {
    spatial_meaningfulness_with(protocol, space, messages, epsilon0, STRICT_TOLERANCE, Exec::default())
}

/// Checks the strict inequality at ε → 0⁺ and at every realized distance
/// between used messages in (0, ε₀]; the conditional expectation is constant
/// between consecutive realized distances.
pub fn spatial_meaningfulness_with(
    protocol: &Protocol,
    space: &InputSpace,
    messages: &MessageSpace,
    epsilon0: f64,
    tolerance: f64,
    exec: Exec,
) -> Result<SpatialReport> {
    protocol.check_inputs(space.len())?;
    check_message_space(protocol, messages)?;
    let mut warnings = Vec::new();
    let epsilon_m = messages.epsilon_m().ok();
    if let Some(em) = epsilon_m {
        if epsilon0 < em {
            warnings.push(format!("ε0 = {epsilon0} is below ε_M = {em}"));
        }
    }
    let table = PairTable::new(protocol, space, exec);
    let used: Vec<usize> = (0..protocol.num_messages())
        .filter(|&m| protocol.assignment().contains(&m))
        .collect();
    let mut thresholds = vec![0.0];
    for (i, &a) in used.iter().enumerate() {
        for &b in &used[i + 1..] {
            let d = messages.distance(a, b);
            if d > 0.0 && d <= epsilon0 {
                thresholds.push(d);
            }
        }
    }
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let unconditional = table.unconditional();
    let checks: Vec<ThresholdCheck> = thresholds
        .into_iter()
        .map(|eps| {
            let conditional = table.conditional(|a, b| messages.distance(a, b) <= eps);
            let status = match conditional {
                None => {
                    warnings.push(format!("conditioning event empty at ε = {eps}; skipped"));
                    ThresholdStatus::Vacuous
                }
                Some(c) if (unconditional - c).abs() <= tolerance => ThresholdStatus::Boundary,
                Some(c) if c < unconditional => ThresholdStatus::Pass,
                Some(_) => ThresholdStatus::Fail,
            };
            ThresholdCheck {
                epsilon: eps,
                conditional,
                unconditional,
                status,
            }
        })
        .collect();
    let meaningful = checks
        .iter()
        .all(|c| matches!(c.status, ThresholdStatus::Pass | ThresholdStatus::Vacuous));
    Ok(SpatialReport {
        meaningful,
        epsilon0,
        epsilon_m,
        checks,
        warnings,
    })
}

/// A finite receiver written out as (domain embedding, output embedding) rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverTable {
    pub domain: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    /// How the domain was embedded.
    pub embedding: String,
}

impl ReceiverTable {
    pub fn new(domain: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>, embedding: impl Into<String>) -> Result<Self> {
        if domain.len() != outputs.len() {
            return Err(Error::InvalidReceiver("domain and output row counts differ".into()));
        }
        Ok(Self {
            domain,
            outputs,
            embedding: embedding.into(),
        })
    }

    /// Domain: the vector form of each message the receiver is defined on.
    pub fn reconstruction(receiver: &ReconstructionReceiver, messages: &MessageSpace) -> Result<Self> {
        let mut domain = Vec::new();
        let mut outputs = Vec::new();
        for m in 0..receiver.num_messages().min(messages.len()) {
            if let Some(o) = receiver.output(m) {
                domain.push(message_vector(messages, m)?);
                outputs.push(o.to_vec());
            }
        }
        Self::new(domain, outputs, "message")
    }

    /// Domain: message vector concatenated with the candidate points, over
    /// every (message, candidate tuple).
    pub fn discrimination(
        receiver: &DiscriminationReceiver,
        messages: &MessageSpace,
        space: &InputSpace,
        d: usize,
    ) -> Result<Self> {
        let n = space.len();
        let k = receiver.num_messages().min(messages.len());
        let per_message = (n as u64)
            .checked_pow(d as u32)
            .filter(|&c| c * k as u64 <= 1_000_000)
            .ok_or_else(|| Error::Unsupported("receiver table too large for a simplicity check".into()))?;
        let mut domain = Vec::new();
        let mut outputs = Vec::new();
        let mut tuple = vec![0usize; d];
        for m in 0..k {
            let mv = message_vector(messages, m)?;
            for idx in 0..per_message {
                let mut rest = idx;
                for slot in tuple.iter_mut().rev() {
                    *slot = (rest % n as u64) as usize;
                    rest /= n as u64;
                }
                let mut row = mv.clone();
                for &c in &tuple {
                    row.extend_from_slice(space.point(c));
                }
                domain.push(row);
                outputs.push(receiver.probabilities(m, &tuple));
            }
        }
        Self::new(domain, outputs, "message ⊕ candidates")
    }
}

fn message_vector(messages: &MessageSpace, m: usize) -> Result<Vec<f64>> {
    messages
        .embedding(m)
        .ok_or_else(|| Error::Unsupported(format!("message {m} has no vector form")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub simple: bool,
    /// sup ‖R(a) − R(b)‖ / ‖a − b‖ over domain pairs.
    pub worst_ratio: f64,
    pub k: f64,
    /// Domain rows attaining the worst ratio.
    pub witness: Option<(usize, usize)>,
    /// Two rows share an embedding but differ in output.
    pub duplicate_conflict: bool,
    pub embedding: String,
}

/// k = (√2 − 1) / (2 ε₀) · √Var[X].
pub fn simplicity_constant(epsilon0: f64, space: &InputSpace) -> f64 {
    (std::f64::consts::SQRT_2 - 1.0) / (2.0 * epsilon0) * input_variance(space).sqrt()
}

pub fn receiver_simplicity(table: &ReceiverTable, epsilon0: f64, space: &InputSpace) -> Result<SimplicityReport> {
    receiver_simplicity_with(table, epsilon0, space, Exec::default())
}

pub fn receiver_simplicity_with(
    table: &ReceiverTable,
    epsilon0: f64,
    space: &InputSpace,
    exec: Exec,
) -> Result<SimplicityReport> {
    if !(epsilon0 > 0.0) {
        return Err(Error::InvalidGame("ε0 must be positive".into()));
    }
    let k = simplicity_constant(epsilon0, space);
    let n = table.domain.len();
    // per row: (worst ratio, partner, violated, conflict)
    let rows = exec.map_range(n, |a| {
        let mut worst = 0.0f64;
        let mut partner = None;
        let mut violated = false;
        let mut conflict = false;
        for b in (a + 1)..n {
            let dd = dist(&table.domain[a], &table.domain[b]);
            let dr = dist(&table.outputs[a], &table.outputs[b]);
            if dd == 0.0 {
                if dr > 0.0 {
                    conflict = true;
                    violated = true;
                    if worst < f64::INFINITY {
                        worst = f64::INFINITY;
                        partner = Some(b);
                    }
                }
                continue;
            }
            let ratio = dr / dd;
            if dr > k * dd + STRICT_TOLERANCE {
                violated = true;
            }
            if ratio > worst {
                worst = ratio;
                partner = Some(b);
            }
        }
        (worst, partner, violated, conflict)
    });
    let mut report = SimplicityReport {
        simple: true,
        worst_ratio: 0.0,
        k,
        witness: None,
        duplicate_conflict: false,
        embedding: table.embedding.clone(),
    };
    for (a, (worst, partner, violated, conflict)) in rows.into_iter().enumerate() {
        report.simple &= !violated;
        report.duplicate_conflict |= conflict;
        if worst > report.worst_ratio {
            report.worst_ratio = worst;
            report.witness = partner.map(|b| (a, b));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonDegeneracyReport {
    pub non_degenerate: bool,
    pub sup_loss: Loss,
    pub constant_loss: f64,
    /// The canonical (lowest-index) synchronized sender.
    pub sender: Protocol,
}

/// Best constant receiver and its expected loss.
pub fn optimal_constant_receiver(space: &InputSpace, spec: &GameSpec) -> Result<(Receiver, f64)> {
    match spec.kind {
        GameKind::Reconstruction => Ok((
            Receiver::Reconstruction(ReconstructionReceiver::constant(space.mean(), 1)),
            input_variance(space),
        )),
        GameKind::Discrimination => {
            let d = spec.candidates;
            if d < 2 {
                return Err(Error::InvalidGame("discrimination needs d ≥ 2".into()));
            }
            Ok((
                Receiver::Discrimination(DiscriminationReceiver::uniform(d, 1)),
                (d as f64).ln(),
            ))
        }
        other => Err(Error::Unsupported(format!(
            "no constant receiver defined for the {} game",
            other.name()
        ))),
    }
}

/// Worst per-input loss under a synchronized sender against a quarter of
/// the best constant receiver's loss. The per-input minimum over messages
/// is the same for every synchronized sender.
pub fn non_degeneracy(receiver: &Receiver, space: &InputSpace, spec: &GameSpec) -> Result<NonDegeneracyReport> {
    let (_, constant_loss) = optimal_constant_receiver(space, spec)?;
    let table = message_losses(receiver, space, spec)?;
    let k = table.first().map_or(0, Vec::len);
    let choices: Vec<usize> = table.iter().map(|row| argmin_message(row)).collect();
    let sup_loss = table
        .iter()
        .zip(&choices)
        .map(|(row, &m)| row[m])
        .max_by(|a, b| a.total_cmp(b))
        .unwrap_or(Loss::Finite(0.0));
    let non_degenerate = match sup_loss {
        Loss::Finite(s) => s <= 0.25 * constant_loss + STRICT_TOLERANCE,
        Loss::Infinite => false,
    };
    Ok(NonDegeneracyReport {
        non_degenerate,
        sup_loss,
        constant_loss,
        sender: Protocol::new(choices, k.max(1))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::sync::synchronized_receiver;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    fn split() -> Protocol {
        Protocol::new(vec![0, 0, 1, 1], 2).unwrap()
    }

    #[test]
    fn semantic_examples() {
        let s = semantic_consistency(&split(), &b());
        assert!(s.consistent);
        assert!((s.explained - 1.0).abs() < 1e-12 && (s.unexplained - 0.25).abs() < 1e-12);
        let a = semantic_consistency(&Protocol::new(vec![0, 1, 1, 0], 2).unwrap(), &b());
        assert!(!a.consistent && a.boundary);
        assert!(a.explained.abs() < 1e-12 && (a.unexplained - 1.25).abs() < 1e-12);
        let l = semantic_consistency(&Protocol::identity(4), &b());
        assert!(l.consistent && l.unexplained.abs() < 1e-12);
    }

    #[test]
    fn spatial_examples() {
        let near = MessageSpace::scalars(&[0.0, 1.0]).unwrap();
        let r = spatial_meaningfulness(&split(), &b(), &near, 1.0).unwrap();
        assert!(!r.meaningful);
        assert_eq!(r.checks.len(), 2);
        assert_eq!(r.checks[0].status, ThresholdStatus::Pass);
        assert_eq!(r.checks[1].status, ThresholdStatus::Boundary);

        let far = MessageSpace::scalars(&[0.0, 4.0]).unwrap();
        let r = spatial_meaningfulness(&split(), &b(), &far, 1.0).unwrap();
        assert!(r.meaningful);
        assert_eq!(r.checks.len(), 1);
        assert!((r.checks[0].conditional.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.checks[0].unconditional - 2.5).abs() < 1e-12);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn simplicity_examples() {
        let space = InputSpace::uniform_scalars(&[0.0, 2.0]).unwrap();
        let t = ReceiverTable::new(
            vec![vec![0.0], vec![1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            "message",
        )
        .unwrap();
        let r = receiver_simplicity(&t, 1.0, &space).unwrap();
        assert!(!r.simple);
        assert!((r.worst_ratio - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((r.k - (std::f64::consts::SQRT_2 - 1.0) / 2.0).abs() < 1e-12);

        let c = ReceiverTable::new(vec![vec![0.0], vec![1.0]], vec![vec![0.5, 0.5]; 2], "message").unwrap();
        assert!(receiver_simplicity(&c, 1.0, &space).unwrap().simple);

        let dup = ReceiverTable::new(vec![vec![0.0], vec![0.0]], vec![vec![1.0], vec![0.0]], "message").unwrap();
        let r = receiver_simplicity(&dup, 1.0, &space).unwrap();
        assert!(!r.simple && r.duplicate_conflict && r.worst_ratio.is_infinite());
    }

    #[test]
    fn simplicity_modes_agree() {
        let space = InputSpace::uniform_scalars(&[0.0, 1.0, 3.0, 7.0]).unwrap();
        let domain: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.37).sin(), i as f64]).collect();
        let outputs: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 1.3).cos()]).collect();
        let t = ReceiverTable::new(domain, outputs, "test").unwrap();
        let a = receiver_simplicity_with(&t, 1.0, &space, Exec::Sequential).unwrap();
        let c = receiver_simplicity_with(&t, 1.0, &space, Exec::Parallel).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn constant_receiver_examples() {
        let (r, l) = optimal_constant_receiver(&b(), &GameSpec::reconstruction()).unwrap();
        assert_eq!(r.as_reconstruction().unwrap().output(0).unwrap(), &[1.5]);
        assert!((l - 1.25).abs() < 1e-12);
        let (_, l) = optimal_constant_receiver(&b(), &GameSpec::discrimination(4)).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-15);
        assert!(optimal_constant_receiver(&b(), &GameSpec::global()).is_err());
    }

    #[test]
    fn non_degeneracy_examples() {
        let (r, _) = optimal_constant_receiver(&b(), &GameSpec::reconstruction()).unwrap();
        let rep = non_degeneracy(&r, &b(), &GameSpec::reconstruction()).unwrap();
        assert!(!rep.non_degenerate);
        assert_eq!(rep.sup_loss, Loss::Finite(2.25));

        let spec = GameSpec::reconstruction();
        let exact = synchronized_receiver(&Protocol::identity(4), &b(), &spec).unwrap();
        let rep = non_degeneracy(&exact, &b(), &spec).unwrap();
        assert!(rep.non_degenerate);
        assert_eq!(rep.sup_loss, Loss::Finite(0.0));
    }
}
