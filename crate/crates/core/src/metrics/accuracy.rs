//! Referential discrimination accuracy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::eval::EXACT_TERM_LIMIT;
use crate::model::input::{sample_index, sq_dist, InputSpace};
use crate::model::protocol::Protocol;
use crate::model::stats::all_conditional_stats;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccuracyReceiver {
    /// Picks among candidates sharing the target's message.
    Synchronized,
    /// Picks the candidate nearest the conditional-mean reconstruction.
    ReconstructionNearest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub accuracy: f64,
    pub std_error: Option<f64>,
    pub episodes: u64,
    pub exact: bool,
}

struct Picker<'a> {
    protocol: &'a Protocol,
    space: &'a InputSpace,
    kind: AccuracyReceiver,
    means: Vec<Option<Vec<f64>>>,
}

impl<'a> Picker<'a> {
    fn new(protocol: &'a Protocol, space: &'a InputSpace, kind: AccuracyReceiver) -> Result<Self> {
        protocol.check_inputs(space.len())?;
        let means = all_conditional_stats(protocol, space)
            .into_iter()
            .map(|s| s.map(|s| s.mean))
            .collect();
        Ok(Self {
            protocol,
            space,
            kind,
            means,
        })
    }

    /// Candidate positions the receiver ties between.
    fn best(&self, message: usize, candidates: &[usize]) -> Vec<usize> {
        match self.kind {
            AccuracyReceiver::Synchronized => (0..candidates.len())
                .filter(|&j| self.protocol.message_of(candidates[j]) == message)
                .collect(),
            AccuracyReceiver::ReconstructionNearest => {
                let r = self.means[message].as_deref().expect("message of an input is used");
                let d: Vec<f64> = candidates.iter().map(|&c| sq_dist(r, self.space.point(c))).collect();
                let min = d.iter().copied().fold(f64::INFINITY, f64::min);
                (0..d.len()).filter(|&j| d[j] <= min + 1e-12).collect()
            }
        }
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidGame("accuracy needs d ≥ 2".into()));
    }
    Ok(())
}

/// Monte-Carlo accuracy: `trials` episodes per input with a uniform target
/// position and i.i.d. distractors; ties are broken uniformly at random.
pub fn discrimination_accuracy(
    protocol: &Protocol,
    space: &InputSpace,
    kind: AccuracyReceiver,
    d: usize,
    seed: u64,
    trials: u64,
) -> Result<AccuracyReport> {
    check_d(d)?;
    if trials == 0 {
        return Err(Error::InvalidGame("accuracy needs at least one trial".into()));
    }
    let picker = Picker::new(protocol, space, kind)?;
    let cumulative = space.cumulative_weights();
    let per_input = crate::exec::Exec::default().map_range(space.len(), |x| {
        let mut r = rng::substream(seed, rng::ACCURACY, x as u64);
        let m = protocol.message_of(x);
        let mut hits = 0u64;
        let mut cands = vec![0usize; d];
        for _ in 0..trials {
            let t = r.gen_range(0..d);
            for (j, c) in cands.iter_mut().enumerate() {
                *c = if j == t { x } else { sample_index(&cumulative, r.gen::<f64>()) };
            }
            let best = picker.best(m, &cands);
            if best[r.gen_range(0..best.len())] == t {
                hits += 1;
            }
        }
        hits as f64 / trials as f64
    });
    let accuracy = per_input.iter().zip(space.weights()).map(|(a, w)| w * a).sum();
    let n = trials as f64;
    let var: f64 = per_input
        .iter()
        .zip(space.weights())
        .map(|(a, w)| w * w * a * (1.0 - a) / n)
        .sum();
    Ok(AccuracyReport {
        accuracy,
        std_error: Some(var.sqrt()),
        episodes: trials * space.len() as u64,
        exact: false,
    })
}

/// Exact accuracy by enumerating every target position and distractor tuple.
pub fn discrimination_accuracy_exact(
    protocol: &Protocol,
    space: &InputSpace,
    kind: AccuracyReceiver,
    d: usize,
) -> Result<AccuracyReport> {
    check_d(d)?;
    let picker = Picker::new(protocol, space, kind)?;
    let n = space.len();
    let tuples = (n as f64).powi(d as i32 - 1);
    let cost = tuples * (n * d) as f64;
    if cost > EXACT_TERM_LIMIT {
        return Err(Error::BudgetExceeded {
            required: cost,
            budget: EXACT_TERM_LIMIT,
        });
    }
    let per_input = crate::exec::Exec::default().map_range(n, |x| {
        let m = protocol.message_of(x);
        let mut acc = 0.0;
        let mut distractors = vec![0usize; d - 1];
        let mut cands = vec![0usize; d];
        for idx in 0..tuples as u64 {
            let mut rest = idx;
            let mut prob = 1.0;
            for slot in distractors.iter_mut() {
                *slot = (rest % n as u64) as usize;
                rest /= n as u64;
                prob *= space.weight(*slot);
            }
            for t in 0..d {
                let mut k = 0;
                for (j, c) in cands.iter_mut().enumerate() {
                    if j == t {
                        *c = x;
                    } else {
                        *c = distractors[k];
                        k += 1;
                    }
                }
                let best = picker.best(m, &cands);
                if best.contains(&t) {
                    acc += prob / d as f64 / best.len() as f64;
                }
            }
        }
        acc
    });
    Ok(AccuracyReport {
        accuracy: per_input.iter().zip(space.weights()).map(|(a, w)| w * a).sum(),
        std_error: None,
        episodes: (tuples as u64) * (n * d) as u64,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn split_exact_accuracy() {
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        let r = discrimination_accuracy_exact(&p, &b(), AccuracyReceiver::Synchronized, 2).unwrap();
        assert!((r.accuracy - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lossless_accuracy_loses_only_target_duplicates() {
        // with replacement the distractor equals the target w.p. 1/4
        let r = discrimination_accuracy_exact(&Protocol::identity(4), &b(), AccuracyReceiver::Synchronized, 2)
            .unwrap();
        assert!((r.accuracy - 0.875).abs() < 1e-15);
        let r = discrimination_accuracy_exact(
            &Protocol::identity(4),
            &b(),
            AccuracyReceiver::ReconstructionNearest,
            2,
        )
        .unwrap();
        assert!((r.accuracy - 0.875).abs() < 1e-15);
    }

    #[test]
    fn constant_protocol_guesses() {
        let p = Protocol::constant(4, 1);
        for d in [2, 3, 5] {
            let r = discrimination_accuracy(&p, &b(), AccuracyReceiver::Synchronized, d, 11, 20_000).unwrap();
            let expect = 1.0 / d as f64;
            assert!((r.accuracy - expect).abs() < 4.0 * r.std_error.unwrap());
        }
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        let r = discrimination_accuracy(&p, &b(), AccuracyReceiver::ReconstructionNearest, 3, 5, 50_000).unwrap();
        let e = discrimination_accuracy_exact(&p, &b(), AccuracyReceiver::ReconstructionNearest, 3).unwrap();
        assert!((r.accuracy - e.accuracy).abs() < 4.0 * r.std_error.unwrap());
    }
}
