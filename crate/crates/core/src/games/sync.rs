//! Synchronized receivers and senders.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::games::eval::{check_balanced, CandidateGame};
use crate::games::loss::Loss;
use crate::games::receiver::{
    DiscriminationReceiver, GlobalReceiver, Receiver, ReconstructionReceiver,
};
use crate::model::game::{GameKind, GameSpec};
use crate::model::input::{sq_dist, InputSpace};
use crate::model::protocol::Protocol;
use crate::model::stats::all_conditional_stats;

/// Loss differences below this are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The receiver that is optimal for a fixed `protocol`.
pub fn synchronized_receiver(
    protocol: &Protocol,
    space: &InputSpace,
    spec: &GameSpec,
) -> Result<Receiver> {
    spec.validate()?;
    protocol.check_inputs(space.len())?;
    let k = protocol.num_messages();
    Ok(match spec.kind {
        GameKind::Reconstruction => {
            let outputs = all_conditional_stats(protocol, space)
                .into_iter()
                .map(|s| s.map(|s| s.mean))
                .collect();
            Receiver::Reconstruction(ReconstructionReceiver::new(outputs)?)
        }
        GameKind::Global => {
            let probs = crate::model::stats::message_probabilities(protocol, space);
            let distributions = (0..k)
                .map(|m| {
                    (probs[m] > 0.0).then(|| {
                        (0..space.len())
                            .map(|x| {
                                if protocol.message_of(x) == m {
                                    space.weight(x) / probs[m]
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                })
                .collect();
            Receiver::Global(GlobalReceiver::new(distributions)?)
        }
        GameKind::Discrimination => Receiver::Discrimination(DiscriminationReceiver::synchronized(
            protocol.assignment().to_vec(),
            k,
        )),
        GameKind::Supervised => {
            let labels = spec.labels()?;
            labels.check_inputs(space.len())?;
            check_balanced(space, labels)?;
            Receiver::Discrimination(DiscriminationReceiver::SupervisedSynchronized {
                assignment: protocol.assignment().to_vec(),
                labels: labels.labels().to_vec(),
                num_messages: k,
            })
        }
        GameKind::Classification => {
            let labels = spec.labels()?;
            labels.check_inputs(space.len())?;
            let ny = labels.num_labels();
            let mut joint = vec![vec![0.0; ny]; k];
            for x in 0..space.len() {
                joint[protocol.message_of(x)][labels.label(x)] += space.weight(x);
            }
            let posterior = joint
                .into_iter()
                .map(|row| {
                    let total: f64 = row.iter().sum();
                    if total > 0.0 {
                        row.into_iter().map(|v| v / total).collect()
                    } else {
                        vec![1.0 / ny as f64; ny]
                    }
                })
                .collect();
            Receiver::Discrimination(DiscriminationReceiver::LabelPosterior { posterior })
        }
    })
}

/// Expected loss of sending each message for each input (N × K).
pub fn message_losses(receiver: &Receiver, space: &InputSpace, spec: &GameSpec) -> Result<Vec<Vec<Loss>>> {
    message_losses_with(receiver, space, spec, Exec::default())
}

pub fn message_losses_with(
    receiver: &Receiver,
    space: &InputSpace,
    spec: &GameSpec,
    exec: Exec,
) -> Result<Vec<Vec<Loss>>> {
    spec.validate()?;
    match spec.kind {
        GameKind::Reconstruction => {
            let r = receiver.as_reconstruction()?;
            Ok(exec.map_range(space.len(), |x| {
                (0..r.num_messages())
                    .map(|m| match r.output(m) {
                        Some(o) => Loss::Finite(sq_dist(o, space.point(x))),
                        None => Loss::Infinite,
                    })
                    .collect()
            }))
        }
        GameKind::Global => {
            let r = receiver.as_global()?;
            Ok(exec.map_range(space.len(), |x| {
                (0..r.num_messages())
                    .map(|m| match r.distribution(m) {
                        Some(d) => Loss::neg_log(d.get(x).copied().unwrap_or(0.0)),
                        None => Loss::Infinite,
                    })
                    .collect()
            }))
        }
        GameKind::Discrimination => {
            let r = receiver.as_discrimination()?;
            CandidateGame::discrimination(space, r, spec.candidates)?
                .message_losses(spec.eval_mode(), exec)
        }
        GameKind::Supervised => {
            let r = receiver.as_discrimination()?;
            CandidateGame::supervised(space, r, spec.labels()?, spec.candidates)?
                .message_losses(spec.eval_mode(), exec)
        }
        GameKind::Classification => {
            let r = receiver.as_discrimination()?;
            CandidateGame::classification(space, r, spec.labels()?)?
                .message_losses(spec.eval_mode(), exec)
        }
    }
}

/// Lowest-index message whose loss is within [`TIE_TOLERANCE`] of the minimum.
pub fn argmin_message(losses: &[Loss]) -> usize {
    let best = losses
        .iter()
        .copied()
        .min_by(|a, b| a.total_cmp(b))
        .unwrap_or(Loss::Finite(0.0));
    losses
        .iter()
        .position(|l| l.approx_eq(best, TIE_TOLERANCE))
        .unwrap_or(0)
}

/// The sender that is optimal for a fixed receiver; ties go to the lowest
/// message index.
pub fn synchronized_sender(receiver: &Receiver, space: &InputSpace, spec: &GameSpec) -> Result<Protocol> {
    let table = message_losses(receiver, space, spec)?;
    let k = table.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidReceiver("receiver has no messages".into()));
    }
    Protocol::new(table.iter().map(|row| argmin_message(row)).collect(), k)
}

/// Comparison of the synchronized receiver with its candidate-unaware
/// indicator-score form.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateUnawareReport {
    pub equivalent: bool,
    pub queries: u64,
    pub max_gap: f64,
    pub synchronized_loss: Loss,
    pub candidate_unaware_loss: Loss,
}

/// Checks that scoring each candidate by 1{S(x)=m} and normalizing reproduces
/// the synchronized receiver on every reachable query.
pub fn candidate_unaware_equivalence(
    protocol: &Protocol,
    space: &InputSpace,
    d: usize,
) -> Result<CandidateUnawareReport> {
    protocol.check_inputs(space.len())?;
    let n = space.len();
    let k = protocol.num_messages();
    let total = (n as f64).powi(d as i32);
    if total > crate::games::eval::EXACT_TERM_LIMIT {
        return Err(Error::BudgetExceeded {
            required: total,
            budget: crate::games::eval::EXACT_TERM_LIMIT,
        });
    }
    let sync = DiscriminationReceiver::synchronized(protocol.assignment().to_vec(), k);
    let scores = (0..k)
        .map(|m| {
            (0..n)
                .map(|x| f64::from(u8::from(protocol.message_of(x) == m)))
                .collect()
        })
        .collect();
    let unaware = DiscriminationReceiver::CandidateUnaware { scores };

    let mut tuple = vec![0usize; d];
    let mut queries = 0u64;
    let mut max_gap: f64 = 0.0;
    for idx in 0..total as u64 {
        let mut rest = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        let mut seen = vec![false; k];
        for &c in &tuple {
            let m = protocol.message_of(c);
            if std::mem::replace(&mut seen[m], true) {
                continue;
            }
            queries += 1;
            let a = sync.probabilities(m, &tuple);
            let b = unaware.probabilities(m, &tuple);
            for (p, q) in a.iter().zip(&b) {
                max_gap = max_gap.max((p - q).abs());
            }
        }
    }
    let mode = crate::model::game::EvalMode::Exact;
    let synchronized_loss =
        crate::games::eval::eval_discrimination(protocol, &sync, space, d, mode)?.expected;
    let candidate_unaware_loss =
        crate::games::eval::eval_discrimination(protocol, &unaware, space, d, mode)?.expected;
    let equivalent = max_gap <= TIE_TOLERANCE
        && synchronized_loss.approx_eq(candidate_unaware_loss, TIE_TOLERANCE);
    Ok(CandidateUnawareReport {
        equivalent,
        queries,
        max_gap,
        synchronized_loss,
        candidate_unaware_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::labels::LabelMap;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    fn split() -> Protocol {
        Protocol::new(vec![0, 0, 1, 1], 2).unwrap()
    }

    fn anti() -> Protocol {
        Protocol::new(vec![0, 1, 1, 0], 2).unwrap()
    }

    #[test]
    fn reconstruction_receiver_is_conditional_means() {
        let r = synchronized_receiver(&split(), &b(), &GameSpec::reconstruction()).unwrap();
        let r = r.as_reconstruction().unwrap();
        assert_eq!(r.output(0).unwrap(), &[0.5]);
        assert_eq!(r.output(1).unwrap(), &[2.5]);
    }

    #[test]
    fn discrimination_receiver_prefers_matching_candidate() {
        let r = synchronized_receiver(&split(), &b(), &GameSpec::discrimination(2)).unwrap();
        let r = r.as_discrimination().unwrap();
        assert_eq!(r.probabilities(0, &[1, 3]), vec![1.0, 0.0]);
    }

    #[test]
    fn classification_receiver_is_label_posterior() {
        let labels = LabelMap::from_strings(&["A", "A", "B", "B"]).unwrap();
        let spec = GameSpec::classification(labels);
        let r = synchronized_receiver(&anti(), &b(), &spec).unwrap();
        let r = r.as_discrimination().unwrap();
        assert_eq!(r.probabilities(0, &[0, 2]), vec![0.5, 0.5]);
        assert_eq!(r.probabilities(1, &[1, 3]), vec![0.5, 0.5]);
    }

    #[test]
    fn sender_projects_onto_receiver_images() {
        let r = Receiver::Reconstruction(
            ReconstructionReceiver::total(vec![vec![0.5], vec![2.5]]).unwrap(),
        );
        let p = synchronized_sender(&r, &b(), &GameSpec::reconstruction()).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn constant_receiver_sender_uses_lowest_index() {
        let r = Receiver::Reconstruction(ReconstructionReceiver::constant(vec![1.5], 3));
        let p = synchronized_sender(&r, &b(), &GameSpec::reconstruction()).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 0]);
        let r = Receiver::Discrimination(DiscriminationReceiver::uniform(2, 3));
        let spec = GameSpec::discrimination(2);
        let p = synchronized_sender(&r, &b(), &spec).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 0]);
    }

    #[test]
    fn unused_message_costs_infinity() {
        let r = synchronized_receiver(&Protocol::constant(4, 2), &b(), &GameSpec::reconstruction())
            .unwrap();
        let table = message_losses(&r, &b(), &GameSpec::reconstruction()).unwrap();
        assert!(table.iter().all(|row| row[1] == Loss::Infinite));
    }

    #[test]
    fn candidate_unaware_examples() {
        for p in [split(), anti(), Protocol::identity(4)] {
            let rep = candidate_unaware_equivalence(&p, &b(), 2).unwrap();
            assert!(rep.equivalent);
            assert!(rep.queries > 0);
        }
    }
}
