//! Size-preserving random baselines for protocol metrics.

use log::warn;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::input::InputSpace;
use crate::model::protocol::Protocol;
use crate::rng;

/// Most arrangements the exhaustive baseline will enumerate.
pub const EXHAUSTIVE_BASELINE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub mean: f64,
    /// Population standard deviation over repeats.
    pub std: f64,
    pub repeats: u64,
    pub warnings: Vec<String>,
}

fn summarize(values: &[f64], warnings: Vec<String>) -> BaselineReport {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    BaselineReport {
        mean,
        std: var.sqrt(),
        repeats: values.len() as u64,
        warnings,
    }
}

fn weight_warning(space: &InputSpace) -> Vec<String> {
    if space.is_uniform(1e-12) {
        return Vec::new();
    }
    let msg = "non-uniform weights: the baseline preserves class sizes, not class masses".to_string();
    warn!("{msg}");
    vec![msg]
}

/// Applies `metric` to `repeats` seeded shuffles of the assignment (class
/// sizes preserved). Repeat `r` draws from its own substream.
pub fn random_baseline<F>(
    protocol: &Protocol,
    space: &InputSpace,
    metric: F,
    repeats: u64,
    seed: u64,
) -> Result<BaselineReport>
where
    F: Fn(&Protocol) -> Result<f64> + Sync + Send,
{
    if repeats == 0 {
        return Err(Error::InvalidGame("baseline needs at least one repeat".into()));
    }
    protocol.check_inputs(space.len())?;
    let values = Exec::default()
        .map_range(repeats as usize, |r| {
            let mut assignment = protocol.assignment().to_vec();
            assignment.shuffle(&mut rng::substream(seed, rng::BASELINE, r as u64));
            metric(&Protocol::new(assignment, protocol.num_messages())?)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&values, weight_warning(space)))
}

/// Next lexicographic permutation in place; false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Number of distinct size-preserving arrangements: N! / Π |[m]|!.
pub fn arrangement_count(protocol: &Protocol) -> f64 {
    let ln_fact = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
    let ln = ln_fact(protocol.len()) - protocol.class_sizes().iter().map(|&s| ln_fact(s)).sum::<f64>();
    ln.exp().round()
}

/// The baseline over every distinct size-preserving arrangement.
pub fn random_baseline_exhaustive<F>(protocol: &Protocol, space: &InputSpace, metric: F) -> Result<BaselineReport>
where
    F: Fn(&Protocol) -> Result<f64>,
{
    protocol.check_inputs(space.len())?;
    let count = arrangement_count(protocol);
    if count > EXHAUSTIVE_BASELINE_LIMIT as f64 {
        return Err(Error::BudgetExceeded {
            required: count,
            budget: EXHAUSTIVE_BASELINE_LIMIT as f64,
        });
    }
    let mut arrangement = protocol.assignment().to_vec();
    arrangement.sort_unstable();
    let mut values = Vec::new();
    loop {
        values.push(metric(&Protocol::new(arrangement.clone(), protocol.num_messages())?)?);
        if !next_permutation(&mut arrangement) {
            break;
        }
    }
    Ok(summarize(&values, weight_warning(space)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::variance::message_variance;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn single_class_baseline_is_exact() {
        let p = Protocol::constant(4, 1);
        let r = random_baseline(&p, &b(), |q| Ok(message_variance(q, &b())), 5, 1).unwrap();
        assert!((r.mean - 1.25).abs() < 1e-12);
        assert_eq!(r.std, 0.0);
    }

    #[test]
    fn exhaustive_split_baseline() {
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        let r = random_baseline_exhaustive(&p, &b(), |q| Ok(message_variance(q, &b()))).unwrap();
        assert_eq!(r.repeats, 6);
        assert!((r.mean - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(arrangement_count(&p), 6.0);
    }

    #[test]
    fn lossless_baseline_is_zero() {
        let p = Protocol::identity(4);
        let r = random_baseline(&p, &b(), |q| Ok(message_variance(q, &b())), 10, 7).unwrap();
        assert_eq!(r.mean, 0.0);
    }

    #[test]
    fn seeded_baseline_is_reproducible() {
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        let f = |q: &Protocol| Ok(message_variance(q, &b()));
        assert_eq!(random_baseline(&p, &b(), f, 50, 3).unwrap(), random_baseline(&p, &b(), f, 50, 3).unwrap());
    }

    #[test]
    fn weighted_space_warns() {
        let w = InputSpace::new(vec![vec![0.0], vec![1.0]], vec![0.3, 0.7]).unwrap();
        let p = Protocol::identity(2);
        let r = random_baseline(&p, &w, |_| Ok(0.0), 2, 0).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }
}
