use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A non-negative loss value; infinity is a distinct state, never a float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    Finite(f64),
    Infinite,
}

impl Loss {
    /// -ln(p), infinite when p is zero.
    pub fn neg_log(p: f64) -> Self {
        if p > 0.0 {
            Loss::Finite(-p.ln())
        } else {
            Loss::Infinite
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Loss::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Loss::Finite(v) => Some(v),
            Loss::Infinite => None,
        }
    }

    /// Finite value or panics; for callers that already ruled out infinity.
    pub fn expect_finite(self) -> f64 {
        self.value().expect("loss is infinite")
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Loss::Finite(a), Loss::Finite(b)) => a.total_cmp(b),
            (Loss::Finite(_), Loss::Infinite) => Ordering::Less,
            (Loss::Infinite, Loss::Finite(_)) => Ordering::Greater,
            (Loss::Infinite, Loss::Infinite) => Ordering::Equal,
        }
    }

    /// Equal within `tol` (two infinities are equal).
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (Loss::Finite(a), Loss::Finite(b)) => (a - b).abs() <= tol,
            (Loss::Infinite, Loss::Infinite) => true,
            _ => false,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        match self {
            Loss::Finite(v) => Loss::Finite(v * factor),
            Loss::Infinite => Loss::Infinite,
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::Finite(v) => write!(f, "{v}"),
            Loss::Infinite => f.write_str("inf"),
        }
    }
}

/// Accumulates probability-weighted loss terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct LossAccumulator {
    sum: f64,
    infinite: bool,
}

impl LossAccumulator {
    pub fn add(&mut self, weight: f64, loss: Loss) {
        if weight <= 0.0 {
            return;
        }
        match loss {
            Loss::Finite(v) => self.sum += weight * v,
            Loss::Infinite => self.infinite = true,
        }
    }

    pub fn finish(self) -> Loss {
        if self.infinite {
            Loss::Infinite
        } else {
            Loss::Finite(self.sum)
        }
    }
}

/// How a report was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Evaluation {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Expected loss of a sender/receiver pair, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub expected: Loss,
    pub per_input: Vec<Loss>,
    pub evaluation: Evaluation,
    /// Standard error of `expected` (Monte-Carlo only).
    pub std_error: Option<f64>,
}

impl LossReport {
    /// Weight-averages per-input losses into an exact report.
    pub fn exact(per_input: Vec<Loss>, weights: &[f64]) -> Self {
        let mut acc = LossAccumulator::default();
        for (l, &w) in per_input.iter().zip(weights) {
            acc.add(w, *l);
        }
        Self {
            expected: acc.finish(),
            per_input,
            evaluation: Evaluation::Exact,
            std_error: None,
        }
    }

    /// Converts nats to bits.
    pub fn to_bits(&self) -> Self {
        let f = 1.0 / std::f64::consts::LN_2;
        Self {
            expected: self.expected.scale(f),
            per_input: self.per_input.iter().map(|l| l.scale(f)).collect(),
            evaluation: self.evaluation,
            std_error: self.std_error.map(|s| s * f),
        }
    }

    /// Worst per-input loss.
    pub fn sup(&self) -> Loss {
        self.per_input
            .iter()
            .copied()
            .max_by(|a, b| a.total_cmp(b))
            .unwrap_or(Loss::Finite(0.0))
    }
}
