use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::input::dist;

/// A single message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MessageAtom {
    /// Sequence of symbols drawn from `0..V`.
    Symbols(Vec<u32>),
    /// Point in a message vector space.
    Vector(Vec<f64>),
    /// Opaque label; distances come from an explicit table.
    Named(String),
}

impl fmt::Display for MessageAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageAtom::Symbols(s) => f.write_str(&symbols_to_string(s)),
            MessageAtom::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            MessageAtom::Named(n) => f.write_str(n),
        }
    }
}

/// Renders symbols as a compact string. Symbols below 36 use one base-36
/// character each; larger vocabularies fall back to a `-`-separated list.
pub fn symbols_to_string(symbols: &[u32]) -> String {
    if symbols.iter().all(|&s| s < 36) {
        symbols
            .iter()
            .map(|&s| char::from_digit(s, 36).expect("digit < 36"))
            .collect()
    } else {
        let parts: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
        parts.join("-")
    }
}

/// Parses the inverse of [`symbols_to_string`].
pub fn parse_symbols(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::InvalidMessageSpace("empty message string".into()));
    }
    if text.contains('-') || text.contains(' ') {
        text.split(['-', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::InvalidMessageSpace(format!("bad symbol `{s}`")))
            })
            .collect()
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(36)
                    .ok_or_else(|| Error::InvalidMessageSpace(format!("bad symbol `{c}`")))
            })
            .collect()
    }
}

/// Distance used between messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MessageMetric {
    /// Hamming distance on equal-length symbol sequences.
    Hamming,
    /// Levenshtein distance on symbol sequences of any length.
    Edit,
    Euclidean,
    /// Explicit symmetric K x K table.
    Table(Vec<Vec<f64>>),
}

/// A finite message set with a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageSpace {
    messages: Vec<MessageAtom>,
    metric: MessageMetric,
    vocab: Option<u32>,
}

impl MessageSpace {
    pub fn new(messages: Vec<MessageAtom>, metric: MessageMetric) -> Result<Self> {
        if messages.is_empty() {
            return Err(Error::InvalidMessageSpace("no messages".into()));
        }
        let space = Self {
            messages,
            metric,
            vocab: None,
        };
        space.validate()?;
        Ok(space)
    }

    /// Explicit symbol sequences under Hamming distance (the default metric).
    pub fn symbols(vocab: u32, messages: Vec<Vec<u32>>) -> Result<Self> {
        Self::symbols_with_metric(vocab, messages, MessageMetric::Hamming)
    }

    pub fn symbols_with_metric(
        vocab: u32,
        messages: Vec<Vec<u32>>,
        metric: MessageMetric,
    ) -> Result<Self> {
        if vocab == 0 {
            return Err(Error::InvalidMessageSpace("vocabulary is empty".into()));
        }
        if let Some(bad) = messages.iter().flatten().find(|&&s| s >= vocab) {
            return Err(Error::InvalidMessageSpace(format!(
                "symbol {bad} outside vocabulary of size {vocab}"
            )));
        }
        let mut space = Self::new(
            messages.into_iter().map(MessageAtom::Symbols).collect(),
            metric,
        )?;
        space.vocab = Some(vocab);
        Ok(space)
    }

    /// All V^L sequences of length L, in lexicographic order.
    pub fn all_sequences(vocab: u32, len: usize) -> Result<Self> {
        let count = (vocab as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
        if count > 10_000_000 {
            return Err(Error::InvalidMessageSpace(format!(
                "V^L = {count} messages is too many to materialize"
            )));
        }
        let msgs = (0..count).map(|i| index_to_symbols(i, vocab, len)).collect();
        Self::symbols(vocab, msgs)
    }

    /// First `k` sequences of length `len` in lexicographic order.
    pub fn first_sequences(vocab: u32, len: usize, k: usize) -> Result<Self> {
        let cap = (vocab as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
        if (k as u64) > cap {
            return Err(Error::InvalidMessageSpace(format!(
                "cannot fit {k} messages in V={vocab}, L={len}"
            )));
        }
        let msgs = (0..k as u64).map(|i| index_to_symbols(i, vocab, len)).collect();
        Self::symbols(vocab, msgs)
    }

    /// Scalar messages embedded on the real line.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| MessageAtom::Vector(vec![v])).collect(),
            MessageMetric::Euclidean,
        )
    }

    pub fn vectors(values: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            values.into_iter().map(MessageAtom::Vector).collect(),
            MessageMetric::Euclidean,
        )
    }

    /// Named messages with an explicit distance table.
    pub fn table(names: Vec<String>, distances: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            names.into_iter().map(MessageAtom::Named).collect(),
            MessageMetric::Table(distances),
        )
    }

    /// Replaces Hamming with the one-hot Euclidean distance sqrt(2 * Hamming).
    pub fn one_hot_euclidean(&self) -> Result<Self> {
        let k = self.len();
        let table = (0..k)
            .map(|a| (0..k).map(|b| (2.0 * self.distance(a, b)).sqrt()).collect())
            .collect();
        let mut space = Self::new(self.messages.clone(), MessageMetric::Table(table))?;
        space.vocab = self.vocab;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn messages(&self) -> &[MessageAtom] {
        &self.messages
    }

    pub fn message(&self, i: usize) -> &MessageAtom {
        &self.messages[i]
    }

    pub fn metric(&self) -> &MessageMetric {
        &self.metric
    }

    pub fn vocab(&self) -> Option<u32> {
        self.vocab
    }

    /// Symbol sequence of message `i`, if the space is symbolic.
    pub fn symbols_of(&self, i: usize) -> Option<&[u32]> {
        match &self.messages[i] {
            MessageAtom::Symbols(s) => Some(s),
            _ => None,
        }
    }

    /// Message length when every message is a symbol sequence of equal length.
    pub fn fixed_length(&self) -> Option<usize> {
        let first = self.symbols_of(0)?.len();
        (0..self.len())
            .all(|i| self.symbols_of(i).map(|s| s.len()) == Some(first))
            .then_some(first)
    }

    /// Real-vector embedding of message `i`: the vector itself, or the symbol
    /// values read as coordinates.
    pub fn embedding(&self, i: usize) -> Option<Vec<f64>> {
        match &self.messages[i] {
            MessageAtom::Vector(v) => Some(v.clone()),
            MessageAtom::Symbols(s) => Some(s.iter().map(|&x| x as f64).collect()),
            MessageAtom::Named(_) => None,
        }
    }

    pub fn position(&self, atom: &MessageAtom) -> Option<usize> {
        self.messages.iter().position(|m| m == atom)
    }

    /// Distance between messages `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        match &self.metric {
            MessageMetric::Table(t) => t[a][b],
            MessageMetric::Euclidean => match (&self.messages[a], &self.messages[b]) {
                (MessageAtom::Vector(x), MessageAtom::Vector(y)) => dist(x, y),
                _ => f64::NAN,
            },
            MessageMetric::Hamming => match (&self.messages[a], &self.messages[b]) {
                (MessageAtom::Symbols(x), MessageAtom::Symbols(y)) => hamming(x, y) as f64,
                _ => f64::NAN,
            },
            MessageMetric::Edit => match (&self.messages[a], &self.messages[b]) {
                (MessageAtom::Symbols(x), MessageAtom::Symbols(y)) => levenshtein(x, y) as f64,
                _ => f64::NAN,
            },
        }
    }

    /// Minimum distance between distinct messages.
    pub fn epsilon_m(&self) -> Result<f64> {
        let k = self.len();
        if k < 2 {
            return Err(Error::EpsilonUndefined);
        }
        // integer metrics cannot go below 1 on distinct sequences
        let floor = match self.metric {
            MessageMetric::Hamming | MessageMetric::Edit => 1.0,
            _ => 0.0,
        };
        let mut best = f64::INFINITY;
        for a in 0..k {
            for b in (a + 1)..k {
                best = best.min(self.distance(a, b));
                if best <= floor {
                    return Ok(best);
                }
            }
        }
        Ok(best)
    }

    fn validate(&self) -> Result<()> {
        let k = self.len();
        match &self.metric {
            MessageMetric::Hamming | MessageMetric::Edit => {
                let mut seen = HashSet::new();
                for (i, m) in self.messages.iter().enumerate() {
                    let MessageAtom::Symbols(s) = m else {
                        return Err(Error::InvalidMessageSpace(format!(
                            "message {i} is not a symbol sequence"
                        )));
                    };
                    if !seen.insert(s.clone()) {
                        return Err(Error::InvalidMessageSpace(format!(
                            "duplicate message {}",
                            symbols_to_string(s)
                        )));
                    }
                }
                if matches!(self.metric, MessageMetric::Hamming) {
                    let len = self.fixed_length();
                    if len.is_none() {
                        return Err(Error::InvalidMessageSpace(
                            "Hamming distance needs equal-length messages".into(),
                        ));
                    }
                }
            }
            MessageMetric::Euclidean => {
                let dim = match &self.messages[0] {
                    MessageAtom::Vector(v) => v.len(),
                    _ => 0,
                };
                for (i, m) in self.messages.iter().enumerate() {
                    match m {
                        MessageAtom::Vector(v) if v.len() == dim && v.iter().all(|x| x.is_finite()) => {}
                        _ => {
                            return Err(Error::InvalidMessageSpace(format!(
                                "message {i} is not a finite vector of dimension {dim}"
                            )))
                        }
                    }
                }
                self.check_positive_distances()?;
            }
            MessageMetric::Table(t) => {
                if t.len() != k || t.iter().any(|row| row.len() != k) {
                    return Err(Error::InvalidMessageSpace(format!(
                        "distance table must be {k}x{k}"
                    )));
                }
                for a in 0..k {
                    if t[a][a] != 0.0 {
                        return Err(Error::InvalidMessageSpace("table diagonal must be 0".into()));
                    }
                    for b in 0..k {
                        if (t[a][b] - t[b][a]).abs() > 1e-12 {
                            return Err(Error::InvalidMessageSpace("table is not symmetric".into()));
                        }
                    }
                }
                self.check_positive_distances()?;
            }
        }
        Ok(())
    }

    fn check_positive_distances(&self) -> Result<()> {
        let k = self.len();
        for a in 0..k {
            for b in (a + 1)..k {
                let d = self.distance(a, b);
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::InvalidMessageSpace(format!(
                        "messages {a} and {b} are at distance {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Base-`vocab` digits of `index`, most significant first, padded to `len`.
pub fn index_to_symbols(mut index: u64, vocab: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % vocab as u64) as u32;
        index /= vocab as u64;
    }
    out
}

pub fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len())
}

/// Levenshtein distance with unit costs.
pub fn levenshtein(a: &[u32], b: &[u32]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        let s = MessageSpace::all_sequences(3, 4).unwrap();
        assert_eq!(s.epsilon_m().unwrap(), 1.0);
        let s = MessageSpace::scalars(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(s.epsilon_m().unwrap(), 1.0);
        let s = MessageSpace::vectors(vec![vec![0.0, 0.0], vec![0.0, 3.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(s.epsilon_m().unwrap(), 3.0);
    }

    #[test]
    fn epsilon_needs_two_messages() {
        let s = MessageSpace::scalars(&[1.0]).unwrap();
        assert_eq!(s.epsilon_m(), Err(Error::EpsilonUndefined));
    }

    #[test]
    fn rejects_duplicates() {
        assert!(MessageSpace::symbols(2, vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(MessageSpace::scalars(&[1.0, 1.0]).is_err());
        assert!(MessageSpace::symbols(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn one_hot_distance_is_sqrt_two_hamming() {
        let s = MessageSpace::symbols(4, vec![vec![0, 0], vec![0, 1], vec![2, 3]]).unwrap();
        let e = s.one_hot_euclidean().unwrap();
        assert!((e.distance(0, 2) - 2.0).abs() < 1e-12);
        assert!((e.distance(0, 1) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein(&[1, 2, 3], &[1, 2, 3]), 0);
        assert_eq!(levenshtein(&[1, 2, 3], &[1, 3]), 1);
        assert_eq!(levenshtein(&[], &[4, 4]), 2);
        assert_eq!(levenshtein(&[1, 2], &[2, 1]), 2);
    }

    #[test]
    fn symbol_strings_round_trip() {
        assert_eq!(parse_symbols("0371").unwrap(), vec![0, 3, 7, 1]);
        assert_eq!(symbols_to_string(&[0, 3, 7, 1]), "0371");
        assert_eq!(parse_symbols("12-40-3").unwrap(), vec![12, 40, 3]);
        assert_eq!(symbols_to_string(&[12, 40, 3]), "12-40-3");
        assert!(parse_symbols("0?").is_err());
    }
}
