//! Receiver representations for the five games.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::message::MessageSpace;

/// Dense tables beyond this many rows exist only in memory.
pub const MAX_SERIALIZED_ROWS: u64 = 1_000_000;

/// Maps each message to a point; `None` for messages it is undefined on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReceiver {
    outputs: Vec<Option<Vec<f64>>>,
}

impl ReconstructionReceiver {
    pub fn new(outputs: Vec<Option<Vec<f64>>>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidReceiver("no messages".into()));
        }
        let dim = outputs.iter().flatten().map(|o| o.len()).next();
        if outputs
            .iter()
            .flatten()
            .any(|o| Some(o.len()) != dim || o.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidReceiver(
                "outputs must be finite and of equal dimension".into(),
            ));
        }
        Ok(Self { outputs })
    }

    /// Receiver defined on every message.
    pub fn total(outputs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(outputs.into_iter().map(Some).collect())
    }

    /// Receiver that outputs `point` for each of `k` messages.
    pub fn constant(point: Vec<f64>, k: usize) -> Self {
        Self {
            outputs: vec![Some(point); k.max(1)],
        }
    }

    pub fn num_messages(&self) -> usize {
        self.outputs.len()
    }

    pub fn output(&self, message: usize) -> Option<&[f64]> {
        self.outputs.get(message).and_then(|o| o.as_deref())
    }

    pub fn outputs(&self) -> &[Option<Vec<f64>>] {
        &self.outputs
    }

    pub fn to_json(&self, messages: Option<&MessageSpace>) -> Value {
        let table: serde_json::Map<String, Value> = self
            .outputs
            .iter()
            .enumerate()
            .filter_map(|(m, o)| o.as_ref().map(|o| (message_key(m, messages), json!(o))))
            .collect();
        json!({ "kind": "reconstruction", "table": table })
    }
}

/// Maps each message to a distribution over input indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReceiver {
    distributions: Vec<Option<Vec<f64>>>,
}

impl GlobalReceiver {
    pub fn new(distributions: Vec<Option<Vec<f64>>>) -> Result<Self> {
        for d in distributions.iter().flatten() {
            check_distribution(d)?;
        }
        Ok(Self { distributions })
    }

    pub fn num_messages(&self) -> usize {
        self.distributions.len()
    }

    pub fn distribution(&self, message: usize) -> Option<&[f64]> {
        self.distributions.get(message).and_then(|o| o.as_deref())
    }

    pub fn to_json(&self, messages: Option<&MessageSpace>) -> Value {
        let table: serde_json::Map<String, Value> = self
            .distributions
            .iter()
            .enumerate()
            .filter_map(|(m, o)| o.as_ref().map(|o| (message_key(m, messages), json!(o))))
            .collect();
        json!({ "kind": "global", "table": table })
    }
}

/// Receiver for the candidate games: (message, candidate tuple) -> distribution
/// over candidate positions. Candidates are input indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "form")]
pub enum DiscriminationReceiver {
    /// Uniform over candidate positions whose input maps to the message.
    Synchronized {
        assignment: Vec<usize>,
        num_messages: usize,
    },
    /// Supervised-game posterior: positions mapping to the message whose
    /// label differs from every other candidate's label.
    SupervisedSynchronized {
        assignment: Vec<usize>,
        labels: Vec<usize>,
        num_messages: usize,
    },
    /// P(Y = j | message), independent of the candidates.
    LabelPosterior { posterior: Vec<Vec<f64>> },
    /// Always outputs the same distribution.
    Constant { probs: Vec<f64>, num_messages: usize },
    /// Per-candidate scores normalized over the tuple.
    CandidateUnaware { scores: Vec<Vec<f64>> },
    Dense(DenseDiscriminationTable),
}

impl DiscriminationReceiver {
    /// Constant uniform receiver over `d` positions for `num_messages` messages.
    pub fn uniform(d: usize, num_messages: usize) -> Self {
        DiscriminationReceiver::Constant {
            probs: vec![1.0 / d as f64; d],
            num_messages,
        }
    }

    pub fn synchronized(assignment: Vec<usize>, num_messages: usize) -> Self {
        DiscriminationReceiver::Synchronized {
            assignment,
            num_messages,
        }
    }

    /// Number of messages the receiver is defined on.
    pub fn num_messages(&self) -> usize {
        match self {
            DiscriminationReceiver::Synchronized { num_messages, .. }
            | DiscriminationReceiver::SupervisedSynchronized { num_messages, .. }
            | DiscriminationReceiver::Constant { num_messages, .. } => *num_messages,
            DiscriminationReceiver::LabelPosterior { posterior } => posterior.len(),
            DiscriminationReceiver::CandidateUnaware { scores } => scores.len(),
            DiscriminationReceiver::Dense(t) => t.num_messages(),
        }
    }

    /// Output distribution over the positions of `candidates`.
    pub fn probabilities(&self, message: usize, candidates: &[usize]) -> Vec<f64> {
        let d = candidates.len();
        match self {
            DiscriminationReceiver::Synchronized { assignment, .. } => normalize_or_uniform(
                candidates
                    .iter()
                    .map(|&c| f64::from(u8::from(assignment[c] == message)))
                    .collect(),
            ),
            DiscriminationReceiver::SupervisedSynchronized {
                assignment, labels, ..
            } => {
                let scores: Vec<f64> = (0..d)
                    .map(|j| {
                        let c = candidates[j];
                        let ok = assignment[c] == message
                            && candidates
                                .iter()
                                .enumerate()
                                .all(|(i, &o)| i == j || labels[o] != labels[c]);
                        f64::from(u8::from(ok))
                    })
                    .collect();
                if scores.iter().any(|&s| s > 0.0) {
                    normalize_or_uniform(scores)
                } else {
                    // unreachable under the supervised law; fall back to the
                    // unsupervised posterior
                    normalize_or_uniform(
                        candidates
                            .iter()
                            .map(|&c| f64::from(u8::from(assignment[c] == message)))
                            .collect(),
                    )
                }
            }
            DiscriminationReceiver::LabelPosterior { posterior } => posterior[message].clone(),
            DiscriminationReceiver::Constant { probs, .. } => probs.clone(),
            DiscriminationReceiver::CandidateUnaware { scores } => {
                normalize_or_uniform(candidates.iter().map(|&c| scores[message][c]).collect())
            }
            DiscriminationReceiver::Dense(t) => t.row(message, candidates).to_vec(),
        }
    }
}

fn normalize_or_uniform(mut scores: Vec<f64>) -> Vec<f64> {
    let total: f64 = scores.iter().sum();
    if total > 0.0 {
        scores.iter_mut().for_each(|s| *s /= total);
    } else {
        let u = 1.0 / scores.len() as f64;
        scores.iter_mut().for_each(|s| *s = u);
    }
    scores
}

fn check_distribution(d: &[f64]) -> Result<()> {
    if d.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidReceiver("negative or non-finite probability".into()));
    }
    let total: f64 = d.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidReceiver(format!("probabilities sum to {total}")));
    }
    Ok(())
}

fn message_key(m: usize, messages: Option<&MessageSpace>) -> String {
    match messages {
        Some(s) if m < s.len() => s.message(m).to_string(),
        _ => m.to_string(),
    }
}

/// Explicit table over every (message, candidate tuple) query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseDiscriminationTable {
    num_messages: usize,
    num_inputs: usize,
    candidates: usize,
    rows: Vec<Vec<f64>>,
}

impl DenseDiscriminationTable {
    /// Row count K * N^d, or `None` on overflow.
    pub fn row_count(num_messages: usize, num_inputs: usize, candidates: usize) -> Option<u64> {
        (num_inputs as u64)
            .checked_pow(candidates as u32)?
            .checked_mul(num_messages as u64)
    }

    /// Tabulates `f(message, candidates)` over every query.
    pub fn tabulate<F>(num_messages: usize, num_inputs: usize, candidates: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, &[usize]) -> Vec<f64>,
    {
        let count = Self::row_count(num_messages, num_inputs, candidates)
            .filter(|&c| c <= 50_000_000)
            .ok_or_else(|| Error::InvalidReceiver("dense table is too large".into()))?;
        let per_message = count / num_messages as u64;
        let mut rows = Vec::with_capacity(count as usize);
        let mut tuple = vec![0usize; candidates];
        for m in 0..num_messages {
            for idx in 0..per_message {
                decode_tuple(idx, num_inputs, &mut tuple);
                let row = f(m, &tuple);
                if row.len() != candidates {
                    return Err(Error::InvalidReceiver(format!(
                        "row has {} entries, expected {candidates}",
                        row.len()
                    )));
                }
                check_distribution(&row)?;
                rows.push(row);
            }
        }
        Ok(Self {
            num_messages,
            num_inputs,
            candidates,
            rows,
        })
    }

    pub fn from_receiver(
        receiver: &DiscriminationReceiver,
        num_messages: usize,
        num_inputs: usize,
        candidates: usize,
    ) -> Result<Self> {
        Self::tabulate(num_messages, num_inputs, candidates, |m, c| {
            receiver.probabilities(m, c)
        })
    }

    pub fn num_messages(&self) -> usize {
        self.num_messages
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_index(&self, message: usize, candidates: &[usize]) -> usize {
        let tuple = candidates
            .iter()
            .fold(0usize, |acc, &c| acc * self.num_inputs + c);
        message * self.num_inputs.pow(self.candidates as u32) + tuple
    }

    pub fn row(&self, message: usize, candidates: &[usize]) -> &[f64] {
        &self.rows[self.row_index(message, candidates)]
    }

    /// Iterates `(message, candidate tuple, output)` over all rows.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Vec<usize>, &[f64])> + '_ {
        let per_message = self.num_inputs.pow(self.candidates as u32);
        self.rows.iter().enumerate().map(move |(r, row)| {
            let mut tuple = vec![0; self.candidates];
            decode_tuple((r % per_message) as u64, self.num_inputs, &mut tuple);
            (r / per_message, tuple, row.as_slice())
        })
    }

    /// Overwrites one row, after validating it.
    pub fn set_row(&mut self, index: usize, row: Vec<f64>) -> Result<()> {
        if row.len() != self.candidates {
            return Err(Error::InvalidReceiver("row length mismatch".into()));
        }
        check_distribution(&row)?;
        self.rows[index] = row;
        Ok(())
    }

    /// JSON form; refuses tables above [`MAX_SERIALIZED_ROWS`].
    pub fn to_json(&self, messages: Option<&MessageSpace>) -> Result<Value> {
        if self.rows.len() as u64 > MAX_SERIALIZED_ROWS {
            return Err(Error::Unsupported(format!(
                "{} rows exceed the serialization limit",
                self.rows.len()
            )));
        }
        let rows: Vec<Value> = self
            .iter()
            .map(|(m, c, p)| json!({ "message": message_key(m, messages), "candidates": c, "probs": p }))
            .collect();
        Ok(json!({
            "kind": "discrimination",
            "candidates": self.candidates,
            "num_inputs": self.num_inputs,
            "rows": rows,
        }))
    }
}

fn decode_tuple(mut idx: u64, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % base as u64) as usize;
        idx /= base as u64;
    }
}

/// Receiver for any of the five games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Receiver {
    Reconstruction(ReconstructionReceiver),
    Discrimination(DiscriminationReceiver),
    Global(GlobalReceiver),
}

impl Receiver {
    pub fn as_reconstruction(&self) -> Result<&ReconstructionReceiver> {
        match self {
            Receiver::Reconstruction(r) => Ok(r),
            _ => Err(Error::InvalidReceiver("expected a reconstruction receiver".into())),
        }
    }

    pub fn as_discrimination(&self) -> Result<&DiscriminationReceiver> {
        match self {
            Receiver::Discrimination(r) => Ok(r),
            _ => Err(Error::InvalidReceiver("expected a discrimination receiver".into())),
        }
    }

    pub fn as_global(&self) -> Result<&GlobalReceiver> {
        match self {
            Receiver::Global(r) => Ok(r),
            _ => Err(Error::InvalidReceiver("expected a global receiver".into())),
        }
    }
}
