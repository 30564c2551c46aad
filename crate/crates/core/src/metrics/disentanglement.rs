//! Mutual-information-gap disentanglement scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{entropy, joint_table, mutual_information};
use crate::model::labels::LabelMap;
use crate::model::message::MessageSpace;
use crate::model::protocol::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisentanglementKind {
    /// Units are message positions.
    PosDis,
    /// Units are per-symbol occurrence counts.
    BosDis,
    /// Units are attributes; the gap is over positions.
    SPosDis,
}

/// A discrete variable over inputs: value codes and their alphabet size.
struct Variable {
    codes: Vec<usize>,
    arity: usize,
}

impl Variable {
    fn new(raw: Vec<usize>) -> Self {
        let arity = raw.iter().max().map_or(1, |m| m + 1);
        Self { codes: raw, arity }
    }

    fn entropy(&self, weights: &[f64]) -> f64 {
        let mut p = vec![0.0; self.arity];
        for (w, &c) in weights.iter().zip(&self.codes) {
            p[c] += w;
        }
        entropy(&p)
    }
}

fn mi(a: &Variable, b: &Variable, weights: &[f64]) -> f64 {
    mutual_information(&joint_table(weights, &a.codes, a.arity, &b.codes, b.arity))
}

/// (largest − second largest) / normaliser, or 0 when the normaliser is 0.
fn gap(mut values: Vec<f64>, norm: f64) -> f64 {
    if norm <= 0.0 || values.len() < 2 {
        return 0.0;
    }
    values.sort_by(|a, b| b.total_cmp(a));
    ((values[0] - values[1]) / norm).clamp(0.0, 1.0)
}

/// Mean over units of the normalized MI gap; plug-in estimates with every
/// input counted once.
pub fn disentanglement(
    protocol: &Protocol,
    messages: &MessageSpace,
    attributes: &[LabelMap],
    kind: DisentanglementKind,
) -> Result<f64> {
    if attributes.len() < 2 {
        return Err(Error::InvalidLabels(
            "disentanglement needs at least two attributes".into(),
        ));
    }
    let n = protocol.len();
    for a in attributes {
        a.check_inputs(n)?;
    }
    let weights = vec![1.0 / n as f64; n];
    let symbols: Vec<&[u32]> = protocol
        .assignment()
        .iter()
        .map(|&m| {
            messages
                .symbols_of(m)
                .ok_or_else(|| Error::InvalidMessageSpace("disentanglement needs symbol messages".into()))
        })
        .collect::<Result<_>>()?;
    let attrs: Vec<Variable> = attributes.iter().map(|a| Variable::new(a.labels().to_vec())).collect();

    let positions = || -> Result<Vec<Variable>> {
        let len = symbols.first().map_or(0, |s| s.len());
        if symbols.iter().any(|s| s.len() != len) {
            return Err(Error::InvalidMessageSpace("positional scores need fixed-length messages".into()));
        }
        Ok((0..len)
            .map(|j| Variable::new(symbols.iter().map(|s| s[j] as usize).collect()))
            .collect())
    };

    let scores: Vec<f64> = match kind {
        DisentanglementKind::PosDis => positions()?
            .iter()
            .map(|pos| gap(attrs.iter().map(|a| mi(pos, a, &weights)).collect(), pos.entropy(&weights)))
            .collect(),
        DisentanglementKind::BosDis => {
            let vocab = messages
                .vocab()
                .ok_or_else(|| Error::InvalidMessageSpace("missing vocabulary".into()))?;
            (0..vocab)
                .map(|v| {
                    let counts = Variable::new(
                        symbols.iter().map(|s| s.iter().filter(|&&x| x == v).count()).collect(),
                    );
                    gap(attrs.iter().map(|a| mi(&counts, a, &weights)).collect(), counts.entropy(&weights))
                })
                .collect()
        }
        DisentanglementKind::SPosDis => {
            let pos = positions()?;
            attrs
                .iter()
                .map(|a| gap(pos.iter().map(|p| mi(p, a, &weights)).collect(), a.entropy(&weights)))
                .collect()
        }
    };
    if scores.is_empty() {
        return Ok(0.0);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Entropy of each message position (diagnostic).
pub fn position_entropies(protocol: &Protocol, messages: &MessageSpace) -> Option<Vec<f64>> {
    let len = messages.fixed_length()?;
    let n = protocol.len();
    let weights = vec![1.0 / n as f64; n];
    (0..len)
        .map(|j| {
            let codes: Option<Vec<usize>> = protocol
                .assignment()
                .iter()
                .map(|&m| messages.symbols_of(m).map(|s| s[j] as usize))
                .collect();
            Some(Variable::new(codes?).entropy(&weights))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs() -> Vec<LabelMap> {
        vec![
            LabelMap::from_indices(vec![0, 0, 1, 1]).unwrap(),
            LabelMap::from_indices(vec![0, 1, 0, 1]).unwrap(),
        ]
    }

    #[test]
    fn positional_code() {
        let messages = MessageSpace::symbols(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let p = Protocol::identity(4);
        let pos = disentanglement(&p, &messages, &attrs(), DisentanglementKind::PosDis).unwrap();
        assert!((pos - 1.0).abs() < 1e-12);
        let spos = disentanglement(&p, &messages, &attrs(), DisentanglementKind::SPosDis).unwrap();
        assert!((spos - 1.0).abs() < 1e-12);
        let h = position_entropies(&p, &messages).unwrap();
        assert!((h[0] - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn constant_protocol_scores_zero() {
        let messages = MessageSpace::symbols(2, vec![vec![0, 1]]).unwrap();
        let p = Protocol::constant(4, 1);
        for kind in [DisentanglementKind::PosDis, DisentanglementKind::BosDis, DisentanglementKind::SPosDis] {
            assert_eq!(disentanglement(&p, &messages, &attrs(), kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn xor_code_scores_zero() {
        // both symbols carry a0 XOR a1
        let messages = MessageSpace::symbols(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let p = Protocol::new(vec![0, 1, 1, 0], 2).unwrap();
        let pos = disentanglement(&p, &messages, &attrs(), DisentanglementKind::PosDis).unwrap();
        assert!(pos.abs() < 1e-12);
    }

    #[test]
    fn single_attribute_is_an_error() {
        let messages = MessageSpace::symbols(2, vec![vec![0, 1]]).unwrap();
        let p = Protocol::constant(4, 1);
        let one = &attrs()[..1];
        assert!(disentanglement(&p, &messages, one, DisentanglementKind::PosDis).is_err());
    }
}
