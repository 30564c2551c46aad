use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// A finite weighted point set in R^d: the input random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpace {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl InputSpace {
    /// Builds a space with explicit probabilities.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInputSpace("no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidInputSpace(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInputSpace("zero-dimensional points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInputSpace(format!(
                    "point {i} has dimension {} (expected {dim})",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInputSpace(format!("point {i} is not finite")));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInputSpace(format!(
                    "weight {i} = {w} is not strictly positive"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidInputSpace(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Uniform prior over the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInputSpace("no points".into()));
        }
        Self::new(points, vec![1.0 / n as f64; n])
    }

    /// Builds a space from unnormalized positive masses.
    pub fn from_masses(points: Vec<Vec<f64>>, masses: &[f64]) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidInputSpace("masses must have positive sum".into()));
        }
        Self::new(points, masses.iter().map(|m| m / total).collect())
    }

    /// Uniform space over scalar points.
    pub fn uniform_scalars(values: &[f64]) -> Result<Self> {
        Self::uniform(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// True when every weight equals 1/N within `tol`.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - u).abs() <= tol)
    }

    /// Weighted mean E[X].
    pub fn mean(&self) -> Vec<f64> {
        weighted_mean(self, 0..self.len()).expect("weights are positive")
    }

    /// Cumulative weights, used for inverse-CDF sampling.
    pub fn cumulative_weights(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect()
    }
}

/// Squared Euclidean distance.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

/// Weighted mean of a subset; `None` when the subset has no mass.
pub(crate) fn weighted_mean(
    space: &InputSpace,
    members: impl IntoIterator<Item = usize>,
) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; space.dim()];
    let mut mass = 0.0;
    for i in members {
        let w = space.weight(i);
        mass += w;
        for (a, v) in acc.iter_mut().zip(space.point(i)) {
            *a += w * v;
        }
    }
    if mass <= 0.0 {
        return None;
    }
    acc.iter_mut().for_each(|a| *a /= mass);
    Some(acc)
}

/// Draws an index from cumulative weights given u in [0, 1).
pub(crate) fn sample_index(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("non-empty");
    let target = u * total;
    match cumulative.binary_search_by(|c| c.partial_cmp(&target).expect("finite")) {
        Ok(i) => (i + 1).min(cumulative.len() - 1),
        Err(i) => i.min(cumulative.len() - 1),
    }
}
