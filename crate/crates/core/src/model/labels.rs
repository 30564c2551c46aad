use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic labelling of inputs into a finite label set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    labels: Vec<usize>,
    names: Vec<String>,
}

impl LabelMap {
    /// Labels given as indices into `names`.
    pub fn new(labels: Vec<usize>, names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidLabels("label set is empty".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= names.len()) {
            return Err(Error::InvalidLabels(format!(
                "label index {bad} outside {} labels",
                names.len()
            )));
        }
        Ok(Self { labels, names })
    }

    /// Interns string labels in order of first appearance.
    pub fn from_strings<S: AsRef<str>>(raw: &[S]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let labels = raw
            .iter()
            .map(|s| {
                let s = s.as_ref();
                match names.iter().position(|n| n == s) {
                    Some(i) => i,
                    None => {
                        names.push(s.to_string());
                        names.len() - 1
                    }
                }
            })
            .collect();
        Self::new(labels, names)
    }

    /// Labels given directly as indices; the label set is `0..=max`.
    pub fn from_indices(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, (0..k).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.names.len()
    }

    pub fn label(&self, input: usize) -> usize {
        self.labels[input]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Inputs grouped by label.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_labels()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn check_inputs(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::InvalidLabels(format!(
                "{} labels for {n} inputs",
                self.len()
            )));
        }
        Ok(())
    }
}
