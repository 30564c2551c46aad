use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::labels::LabelMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    Reconstruction,
    Discrimination,
    Global,
    Supervised,
    Classification,
}

impl GameKind {
    pub const ALL: [GameKind; 5] = [
        GameKind::Reconstruction,
        GameKind::Discrimination,
        GameKind::Global,
        GameKind::Supervised,
        GameKind::Classification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Reconstruction => "reconstruction",
            GameKind::Discrimination => "discrimination",
            GameKind::Global => "global",
            GameKind::Supervised => "supervised",
            GameKind::Classification => "classification",
        }
    }
}

impl std::str::FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GameKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidGame(format!("unknown game `{s}`")))
    }
}

/// How a game loss is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EvalMode {
    /// Enumerate when affordable, otherwise fall back to Monte-Carlo with
    /// the given budget.
    Auto { samples: u64, seed: u64 },
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Auto {
            samples: 200_000,
            seed: 0,
        }
    }
}

/// Game kind plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub kind: GameKind,
    /// Candidate count (discrimination and supervised games).
    pub candidates: usize,
    pub labels: Option<LabelMap>,
    pub seed: u64,
    pub samples: u64,
}

impl GameSpec {
    pub fn reconstruction() -> Self {
        Self {
            kind: GameKind::Reconstruction,
            candidates: 2,
            labels: None,
            seed: 0,
            samples: 200_000,
        }
    }

    pub fn discrimination(d: usize) -> Self {
        Self {
            kind: GameKind::Discrimination,
            candidates: d,
            ..Self::reconstruction()
        }
    }

    pub fn global() -> Self {
        Self {
            kind: GameKind::Global,
            ..Self::reconstruction()
        }
    }

    pub fn supervised(d: usize, labels: LabelMap) -> Self {
        Self {
            kind: GameKind::Supervised,
            candidates: d,
            labels: Some(labels),
            ..Self::reconstruction()
        }
    }

    pub fn classification(labels: LabelMap) -> Self {
        Self {
            kind: GameKind::Classification,
            candidates: labels.num_labels(),
            labels: Some(labels),
            ..Self::reconstruction()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn eval_mode(&self) -> EvalMode {
        EvalMode::Auto {
            samples: self.samples,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            GameKind::Discrimination if self.candidates < 2 => Err(Error::InvalidGame(
                "discrimination needs at least 2 candidates".into(),
            )),
            GameKind::Supervised => {
                let labels = self
                    .labels
                    .as_ref()
                    .ok_or_else(|| Error::InvalidGame("supervised game needs labels".into()))?;
                if labels.num_labels() < 2 {
                    return Err(Error::InvalidGame("supervised game needs ≥2 labels".into()));
                }
                if self.candidates < 2 || self.candidates > labels.num_labels() {
                    return Err(Error::InvalidGame(format!(
                        "supervised game needs 2 ≤ d ≤ |Y| = {}",
                        labels.num_labels()
                    )));
                }
                Ok(())
            }
            GameKind::Classification if self.labels.is_none() => Err(Error::InvalidGame(
                "classification game needs labels".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn labels(&self) -> Result<&LabelMap> {
        self.labels
            .as_ref()
            .ok_or_else(|| Error::InvalidGame(format!("{} game needs labels", self.kind.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supervised_requires_enough_labels() {
        let one = LabelMap::from_strings(&["a", "a"]).unwrap();
        let err = GameSpec::supervised(2, one).validate().unwrap_err();
        assert!(err.to_string().contains("≥2 labels"));
        let two = LabelMap::from_strings(&["a", "b"]).unwrap();
        assert!(GameSpec::supervised(3, two.clone()).validate().is_err());
        assert!(GameSpec::supervised(2, two).validate().is_ok());
        assert!(GameSpec::discrimination(1).validate().is_err());
    }

    #[test]
    fn kind_parses() {
        assert_eq!("global".parse::<GameKind>().unwrap(), GameKind::Global);
        assert!("nope".parse::<GameKind>().is_err());
    }
}
