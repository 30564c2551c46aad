//! Ground-truth loss evaluation for every game.
//!
//! Candidate games are evaluated per (target input, sent message) pair: the
//! expected loss averages over the uniform target position and the
//! distractor law of the game. The same per-pair routine feeds both the
//! evaluators and the synchronized sender.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{ordered_sum, Exec};
use crate::games::loss::{Evaluation, Loss, LossAccumulator, LossReport};
use crate::games::receiver::{DiscriminationReceiver, GlobalReceiver, ReconstructionReceiver, Receiver};
use crate::model::game::{EvalMode, GameKind, GameSpec};
use crate::model::input::{sample_index, sq_dist, InputSpace};
use crate::model::labels::LabelMap;
use crate::model::protocol::Protocol;
use crate::rng;

/// Above this many elementary terms exact enumeration is refused.
pub const EXACT_TERM_LIMIT: f64 = 1e8;

/// Label balance tolerance for the supervised game.
pub const BALANCE_TOLERANCE: f64 = 1e-9;

/// A sampling slot: a finite distribution over input indices.
#[derive(Debug, Clone)]
pub(crate) struct Slot {
    items: Vec<usize>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Slot {
    fn new(items: Vec<usize>, masses: Vec<f64>) -> Option<Self> {
        let total: f64 = masses.iter().sum();
        if items.is_empty() || total <= 0.0 {
            return None;
        }
        let probs: Vec<f64> = masses.iter().map(|m| m / total).collect();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Some(Self {
            items,
            probs,
            cumulative,
        })
    }

    fn all(space: &InputSpace) -> Self {
        Self::new((0..space.len()).collect(), space.weights().to_vec()).expect("non-empty")
    }

    fn restricted(space: &InputSpace, keep: impl Fn(usize) -> bool) -> Option<Self> {
        let items: Vec<usize> = (0..space.len()).filter(|&i| keep(i)).collect();
        let masses = items.iter().map(|&i| space.weight(i)).collect();
        Self::new(items, masses)
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.items[sample_index(&self.cumulative, rng.gen::<f64>())]
    }
}

/// Candidate law for one target input.
#[derive(Debug, Clone)]
pub(crate) enum EpisodeLaw {
    /// Target at a uniform position among `d`; `d - 1` i.i.d. distractors.
    WithTarget { distractors: Slot, d: usize },
    /// One candidate per label; the correct answer is the target's label.
    PerLabel { slots: Vec<Slot>, answer: usize },
}

impl EpisodeLaw {
    fn terms(&self) -> f64 {
        match self {
            EpisodeLaw::WithTarget { distractors, d } => {
                *d as f64 * (distractors.len() as f64).powi(*d as i32 - 1)
            }
            EpisodeLaw::PerLabel { slots, .. } => slots.iter().map(|s| s.len() as f64).product(),
        }
    }

    /// Exact expected loss of sending `message` for `target`.
    fn exact(&self, receiver: &DiscriminationReceiver, target: usize, message: usize) -> Loss {
        let mut acc = LossAccumulator::default();
        match self {
            EpisodeLaw::WithTarget { distractors, d } => {
                let slots = vec![distractors; d - 1];
                let mut cands = vec![0usize; *d];
                for_each_tuple(&slots, |tuple, prob| {
                    for t in 0..*d {
                        insert_target(tuple, target, t, &mut cands);
                        let p = receiver.probabilities(message, &cands)[t];
                        acc.add(prob / *d as f64, Loss::neg_log(p));
                    }
                });
            }
            EpisodeLaw::PerLabel { slots, answer } => {
                let refs: Vec<&Slot> = slots.iter().collect();
                for_each_tuple(&refs, |tuple, prob| {
                    let p = receiver.probabilities(message, tuple)[*answer];
                    acc.add(prob, Loss::neg_log(p));
                });
            }
        }
        acc.finish()
    }

    /// Monte-Carlo estimate: (mean, sample variance) over `n` episodes.
    fn sampled<R: Rng>(
        &self,
        receiver: &DiscriminationReceiver,
        target: usize,
        message: usize,
        n: u64,
        rng: &mut R,
    ) -> (Loss, f64) {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut infinite = false;
        let draw = |rng: &mut R| -> Loss {
            match self {
                EpisodeLaw::WithTarget { distractors, d } => {
                    let t = rng.gen_range(0..*d);
                    let cands: Vec<usize> = (0..*d)
                        .map(|j| if j == t { target } else { distractors.sample(rng) })
                        .collect();
                    Loss::neg_log(receiver.probabilities(message, &cands)[t])
                }
                EpisodeLaw::PerLabel { slots, answer } => {
                    let cands: Vec<usize> = slots.iter().map(|s| s.sample(rng)).collect();
                    Loss::neg_log(receiver.probabilities(message, &cands)[*answer])
                }
            }
        };
        for _ in 0..n {
            match draw(rng) {
                Loss::Finite(v) => {
                    sum += v;
                    sum_sq += v * v;
                }
                Loss::Infinite => infinite = true,
            }
        }
        if infinite {
            return (Loss::Infinite, f64::INFINITY);
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        (Loss::Finite(mean), var)
    }
}

fn insert_target(distractors: &[usize], target: usize, position: usize, out: &mut [usize]) {
    let mut k = 0;
    for (j, slot) in out.iter_mut().enumerate() {
        if j == position {
            *slot = target;
        } else {
            *slot = distractors[k];
            k += 1;
        }
    }
}

/// Calls `f(tuple, probability)` for every tuple in the product of `slots`.
fn for_each_tuple<F: FnMut(&[usize], f64)>(slots: &[&Slot], mut f: F) {
    let k = slots.len();
    let mut pos = vec![0usize; k];
    let mut tuple: Vec<usize> = slots.iter().map(|s| s.items[0]).collect();
    loop {
        let prob: f64 = slots.iter().zip(&pos).map(|(s, &p)| s.probs[p]).product();
        f(&tuple, prob);
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < slots[j].len() {
                tuple[j] = slots[j].items[pos[j]];
                break;
            }
            pos[j] = 0;
            tuple[j] = slots[j].items[0];
        }
    }
}

/// Candidate-game context: the space, the per-target laws and the receiver.
pub(crate) struct CandidateGame<'a> {
    space: &'a InputSpace,
    receiver: &'a DiscriminationReceiver,
    laws: Vec<EpisodeLaw>,
}

impl<'a> CandidateGame<'a> {
    pub fn discrimination(
        space: &'a InputSpace,
        receiver: &'a DiscriminationReceiver,
        d: usize,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidGame("discrimination needs d ≥ 2".into()));
        }
        let slot = Slot::all(space);
        let laws = (0..space.len())
            .map(|_| EpisodeLaw::WithTarget {
                distractors: slot.clone(),
                d,
            })
            .collect();
        Ok(Self {
            space,
            receiver,
            laws,
        })
    }

    pub fn supervised(
        space: &'a InputSpace,
        receiver: &'a DiscriminationReceiver,
        labels: &LabelMap,
        d: usize,
    ) -> Result<Self> {
        labels.check_inputs(space.len())?;
        if labels.num_labels() < 2 {
            return Err(Error::InvalidGame("supervised game needs ≥2 labels".into()));
        }
        if d < 2 || d > labels.num_labels() {
            return Err(Error::InvalidGame(format!(
                "supervised game needs 2 ≤ d ≤ |Y| = {}",
                labels.num_labels()
            )));
        }
        check_balanced(space, labels)?;
        let laws = (0..space.len())
            .map(|x| {
                let y = labels.label(x);
                Slot::restricted(space, |i| labels.label(i) != y)
                    .map(|distractors| EpisodeLaw::WithTarget { distractors, d })
                    .ok_or_else(|| {
                        Error::InvalidLabels(format!("label {y} has zero complementary mass"))
                    })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            space,
            receiver,
            laws,
        })
    }

    pub fn classification(
        space: &'a InputSpace,
        receiver: &'a DiscriminationReceiver,
        labels: &LabelMap,
    ) -> Result<Self> {
        labels.check_inputs(space.len())?;
        let slots = (0..labels.num_labels())
            .map(|y| {
                Slot::restricted(space, |i| labels.label(i) == y)
                    .ok_or_else(|| Error::InvalidLabels(format!("label {y} has no inputs")))
            })
            .collect::<Result<Vec<_>>>()?;
        let laws = (0..space.len())
            .map(|x| EpisodeLaw::PerLabel {
                slots: slots.clone(),
                answer: labels.label(x),
            })
            .collect();
        Ok(Self {
            space,
            receiver,
            laws,
        })
    }

    /// Total elementary terms for one message per input.
    pub fn exact_terms(&self) -> f64 {
        self.laws.iter().map(|l| l.terms()).sum()
    }

    fn resolve(&self, mode: EvalMode, evaluations_per_input: usize) -> Result<Option<(u64, u64)>> {
        let cost = self.exact_terms() * evaluations_per_input as f64;
        match mode {
            EvalMode::Exact if cost > EXACT_TERM_LIMIT => Err(Error::BudgetExceeded {
                required: cost,
                budget: EXACT_TERM_LIMIT,
            }),
            EvalMode::Exact => Ok(None),
            EvalMode::Auto { samples, seed } if cost > EXACT_TERM_LIMIT => Ok(Some((samples, seed))),
            EvalMode::Auto { .. } => Ok(None),
            EvalMode::MonteCarlo { samples, seed } => Ok(Some((samples, seed))),
        }
    }

    fn per_input_samples(&self, samples: u64) -> u64 {
        samples.div_ceil(self.space.len() as u64).max(1)
    }

    /// Loss report for a protocol.
    pub fn evaluate(&self, protocol: &Protocol, mode: EvalMode, exec: Exec) -> Result<LossReport> {
        protocol.check_inputs(self.space.len())?;
        check_messages(protocol, self.receiver.num_messages())?;
        match self.resolve(mode, 1)? {
            None => {
                let per_input = exec.map_range(self.space.len(), |x| {
                    self.laws[x].exact(self.receiver, x, protocol.message_of(x))
                });
                Ok(LossReport::exact(per_input, self.space.weights()))
            }
            Some((samples, seed)) => {
                let n = self.per_input_samples(samples);
                let stats = exec.map_range(self.space.len(), |x| {
                    let mut rng = rng::substream(seed, rng::MONTE_CARLO, x as u64);
                    self.laws[x].sampled(self.receiver, x, protocol.message_of(x), n, &mut rng)
                });
                Ok(monte_carlo_report(stats, self.space.weights(), n, seed))
            }
        }
    }

    /// Expected loss of every (input, message) choice. Monte-Carlo mode uses
    /// common random numbers across messages for a given input.
    pub fn message_losses(&self, mode: EvalMode, exec: Exec) -> Result<Vec<Vec<Loss>>> {
        let k = self.receiver.num_messages();
        match self.resolve(mode, k)? {
            None => Ok(exec.map_range(self.space.len(), |x| {
                (0..k).map(|m| self.laws[x].exact(self.receiver, x, m)).collect()
            })),
            Some((samples, seed)) => {
                let n = self.per_input_samples(samples);
                Ok(exec.map_range(self.space.len(), |x| {
                    (0..k)
                        .map(|m| {
                            let mut rng = rng::substream(seed, rng::MONTE_CARLO, x as u64);
                            self.laws[x].sampled(self.receiver, x, m, n, &mut rng).0
                        })
                        .collect()
                }))
            }
        }
    }
}

fn monte_carlo_report(stats: Vec<(Loss, f64)>, weights: &[f64], n: u64, seed: u64) -> LossReport {
    let infinite = stats.iter().any(|(l, _)| !l.is_finite());
    let expected = if infinite {
        Loss::Infinite
    } else {
        Loss::Finite(ordered_sum(
            stats.iter().zip(weights).map(|((l, _), w)| w * l.expect_finite()),
        ))
    };
    let std_error = (!infinite).then(|| {
        ordered_sum(stats.iter().zip(weights).map(|((_, v), w)| w * w * v / n as f64)).sqrt()
    });
    LossReport {
        expected,
        per_input: stats.into_iter().map(|(l, _)| l).collect(),
        evaluation: Evaluation::MonteCarlo {
            samples: n * weights.len() as u64,
            seed,
        },
        std_error,
    }
}

fn check_messages(protocol: &Protocol, receiver_messages: usize) -> Result<()> {
    if let Some(&m) = protocol.assignment().iter().find(|&&m| m >= receiver_messages) {
        return Err(Error::InvalidReceiver(format!(
            "receiver is not defined on message {m}"
        )));
    }
    Ok(())
}

pub(crate) fn check_balanced(space: &InputSpace, labels: &LabelMap) -> Result<()> {
    let mut mass = vec![0.0; labels.num_labels()];
    for i in 0..space.len() {
        mass[labels.label(i)] += space.weight(i);
    }
    let target = 1.0 / labels.num_labels() as f64;
    if mass.iter().any(|m| (m - target).abs() > BALANCE_TOLERANCE) {
        return Err(Error::InvalidLabels(format!(
            "supervised game assumes balanced labels; label masses are {mass:?}"
        )));
    }
    Ok(())
}

/// Squared-error loss of every input under `protocol` and `receiver`.
pub fn eval_reconstruction(
    protocol: &Protocol,
    receiver: &ReconstructionReceiver,
    space: &InputSpace,
) -> Result<LossReport> {
    protocol.check_inputs(space.len())?;
    let per_input = (0..space.len())
        .map(|x| {
            let m = protocol.message_of(x);
            receiver
                .output(m)
                .map(|r| Loss::Finite(sq_dist(r, space.point(x))))
                .ok_or_else(|| Error::InvalidReceiver(format!("receiver missing message {m}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LossReport::exact(per_input, space.weights()))
}

/// Negative log-likelihood of the true input under the receiver's distribution.
pub fn eval_global(
    protocol: &Protocol,
    receiver: &GlobalReceiver,
    space: &InputSpace,
) -> Result<LossReport> {
    protocol.check_inputs(space.len())?;
    let per_input = (0..space.len())
        .map(|x| {
            let m = protocol.message_of(x);
            let dist = receiver
                .distribution(m)
                .ok_or_else(|| Error::InvalidReceiver(format!("receiver missing message {m}")))?;
            if dist.len() != space.len() {
                return Err(Error::InvalidReceiver(format!(
                    "distribution over {} inputs, space has {}",
                    dist.len(),
                    space.len()
                )));
            }
            Ok(Loss::neg_log(dist[x]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LossReport::exact(per_input, space.weights()))
}

/// d-candidate discrimination loss with i.i.d. distractors drawn from X.
pub fn eval_discrimination(
    protocol: &Protocol,
    receiver: &DiscriminationReceiver,
    space: &InputSpace,
    d: usize,
    mode: EvalMode,
) -> Result<LossReport> {
    eval_discrimination_with(protocol, receiver, space, d, mode, Exec::default())
}

pub fn eval_discrimination_with(
    protocol: &Protocol,
    receiver: &DiscriminationReceiver,
    space: &InputSpace,
    d: usize,
    mode: EvalMode,
    exec: Exec,
) -> Result<LossReport> {
    CandidateGame::discrimination(space, receiver, d)?.evaluate(protocol, mode, exec)
}

/// Supervised discrimination: distractors never share the target's label.
pub fn eval_supervised(
    protocol: &Protocol,
    receiver: &DiscriminationReceiver,
    space: &InputSpace,
    labels: &LabelMap,
    d: usize,
    mode: EvalMode,
) -> Result<LossReport> {
    CandidateGame::supervised(space, receiver, labels, d)?.evaluate(protocol, mode, Exec::default())
}

/// Classification discrimination: one candidate per label; the receiver must
/// pick the candidate with the target's label.
pub fn eval_classification(
    protocol: &Protocol,
    receiver: &DiscriminationReceiver,
    space: &InputSpace,
    labels: &LabelMap,
    mode: EvalMode,
) -> Result<LossReport> {
    CandidateGame::classification(space, receiver, labels)?.evaluate(
        protocol,
        mode,
        Exec::default(),
    )
}

/// Dispatches on the game kind.
pub fn eval_game(
    protocol: &Protocol,
    receiver: &Receiver,
    space: &InputSpace,
    spec: &GameSpec,
) -> Result<LossReport> {
    spec.validate()?;
    let mode = spec.eval_mode();
    match spec.kind {
        GameKind::Reconstruction => eval_reconstruction(protocol, receiver.as_reconstruction()?, space),
        GameKind::Global => eval_global(protocol, receiver.as_global()?, space),
        GameKind::Discrimination => eval_discrimination(
            protocol,
            receiver.as_discrimination()?,
            space,
            spec.candidates,
            mode,
        ),
        GameKind::Supervised => eval_supervised(
            protocol,
            receiver.as_discrimination()?,
            space,
            spec.labels()?,
            spec.candidates,
            mode,
        ),
        GameKind::Classification => eval_classification(
            protocol,
            receiver.as_discrimination()?,
            space,
            spec.labels()?,
            mode,
        ),
    }
}
