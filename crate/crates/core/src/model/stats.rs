//! Elementary statistics of protocols over weighted input spaces.

use crate::error::{Error, Result};
use crate::model::input::{sq_dist, weighted_mean, InputSpace};
use crate::model::protocol::Protocol;

/// p_m = P(S(X) = m) for every message.
pub fn message_probabilities(protocol: &Protocol, space: &InputSpace) -> Vec<f64> {
    let mut p = vec![0.0; protocol.num_messages()];
    for (i, &m) in protocol.assignment().iter().enumerate() {
        p[m] += space.weight(i);
    }
    p
}

/// Var[X] = E||X - EX||^2 (trace of the weighted covariance).
pub fn input_variance(space: &InputSpace) -> f64 {
    let mean = space.mean();
    space
        .points()
        .iter()
        .zip(space.weights())
        .map(|(x, w)| w * sq_dist(x, &mean))
        .sum()
}

/// Conditional mean and scalar variance of X given S(X) = m.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalStats {
    pub probability: f64,
    pub mean: Vec<f64>,
    pub variance: f64,
}

pub fn conditional_stats(
    protocol: &Protocol,
    space: &InputSpace,
    message: usize,
) -> Result<ConditionalStats> {
    let members: Vec<usize> = (0..protocol.len())
        .filter(|&i| protocol.message_of(i) == message)
        .collect();
    class_stats(space, &members).ok_or(Error::EmptyClass(message))
}

/// Stats of an explicit class; `None` when the class is empty.
pub(crate) fn class_stats(space: &InputSpace, members: &[usize]) -> Option<ConditionalStats> {
    let mean = weighted_mean(space, members.iter().copied())?;
    let probability: f64 = members.iter().map(|&i| space.weight(i)).sum();
    let variance = members
        .iter()
        .map(|&i| space.weight(i) * sq_dist(space.point(i), &mean))
        .sum::<f64>()
        / probability;
    Some(ConditionalStats {
        probability,
        mean,
        variance,
    })
}

/// Stats for every used message (`None` for unused ones).
pub fn all_conditional_stats(protocol: &Protocol, space: &InputSpace) -> Vec<Option<ConditionalStats>> {
    protocol
        .equivalence_classes()
        .iter()
        .map(|c| class_stats(space, c))
        .collect()
}

/// E||x1 - x2||^2 for independent x1, x2 ~ X, via the identity 2 Var[X].
pub fn expected_pairwise_sqdist(space: &InputSpace) -> f64 {
    2.0 * input_variance(space)
}

/// The same quantity by direct weighted double sum.
pub fn pairwise_sqdist_direct(space: &InputSpace) -> f64 {
    let n = space.len();
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            total += space.weight(a) * space.weight(b) * sq_dist(space.point(a), space.point(b));
        }
    }
    total
}

/// Split of Var[X] into unexplained (E_m Var[X|m]) and explained
/// (Var_m E[X|m]) parts, each computed from its own definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceSplit {
    pub total: f64,
    pub unexplained: f64,
    pub explained: f64,
}

pub fn variance_split(protocol: &Protocol, space: &InputSpace) -> VarianceSplit {
    let global = space.mean();
    let mut unexplained = 0.0;
    let mut explained = 0.0;
    for s in all_conditional_stats(protocol, space).into_iter().flatten() {
        unexplained += s.probability * s.variance;
        explained += s.probability * sq_dist(&s.mean, &global);
    }
    VarianceSplit {
        total: input_variance(space),
        unexplained,
        explained,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn probability_examples() {
        let split = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(message_probabilities(&split, &b()), vec![0.5, 0.5]);
        let constant = Protocol::constant(4, 3);
        assert_eq!(message_probabilities(&constant, &b()), vec![1.0, 0.0, 0.0]);
        let weighted = InputSpace::new(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let p = message_probabilities(&split, &weighted);
        assert!((p[0] - 0.3).abs() < 1e-12 && (p[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let a = InputSpace::uniform_scalars(&[0.0, 1.0]).unwrap();
        assert!((input_variance(&a) - 0.25).abs() < 1e-12);
        assert!((input_variance(&b()) - 1.25).abs() < 1e-12);
        let vals: Vec<f64> = (1..=6).flat_map(|k| [k as f64, -(k as f64)]).collect();
        let thm = InputSpace::uniform_scalars(&vals).unwrap();
        assert!((input_variance(&thm) - 91.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_examples() {
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        let s = conditional_stats(&p, &b(), 0).unwrap();
        assert!((s.mean[0] - 0.5).abs() < 1e-12 && (s.variance - 0.25).abs() < 1e-12);
        let anti = Protocol::new(vec![0, 1, 1, 0], 2).unwrap();
        let s = conditional_stats(&anti, &b(), 0).unwrap();
        assert!((s.mean[0] - 1.5).abs() < 1e-12 && (s.variance - 2.25).abs() < 1e-12);
        let single = Protocol::new(vec![0, 1, 1, 1], 2).unwrap();
        assert_eq!(conditional_stats(&single, &b(), 0).unwrap().variance, 0.0);
    }

    #[test]
    fn empty_class_is_an_error() {
        let p = Protocol::constant(4, 2);
        assert_eq!(conditional_stats(&p, &b(), 1), Err(Error::EmptyClass(1)));
    }

    #[test]
    fn pairwise_examples() {
        let a = InputSpace::uniform_scalars(&[0.0, 1.0]).unwrap();
        assert!((expected_pairwise_sqdist(&a) - 0.5).abs() < 1e-12);
        assert!((expected_pairwise_sqdist(&b()) - 2.5).abs() < 1e-12);
        assert!((pairwise_sqdist_direct(&b()) - 2.5).abs() < 1e-12);
        let single = InputSpace::uniform_scalars(&[4.0]).unwrap();
        assert_eq!(expected_pairwise_sqdist(&single), 0.0);
    }
}
