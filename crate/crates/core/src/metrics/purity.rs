//! Message purity against one or more attributes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::labels::LabelMap;
use crate::model::protocol::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PurityMode {
    /// Purity against attribute `i`.
    Attribute(usize),
    /// Per message, the best purity over attributes.
    Max,
}

fn message_purities(protocol: &Protocol, labels: &LabelMap) -> Vec<Option<f64>> {
    protocol
        .equivalence_classes()
        .iter()
        .map(|class| {
            if class.is_empty() {
                return None;
            }
            let mut counts = vec![0usize; labels.num_labels()];
            for &x in class {
                counts[labels.label(x)] += 1;
            }
            Some(*counts.iter().max().expect("non-empty label set") as f64 / class.len() as f64)
        })
        .collect()
}

/// Class-size-weighted average of per-message majority fractions.
pub fn purity(protocol: &Protocol, attributes: &[LabelMap], mode: PurityMode) -> Result<f64> {
    for a in attributes {
        a.check_inputs(protocol.len())?;
    }
    let per_attr: Vec<Vec<Option<f64>>> = match mode {
        PurityMode::Attribute(i) => vec![message_purities(
            protocol,
            attributes
                .get(i)
                .ok_or_else(|| Error::InvalidLabels(format!("no attribute {i}")))?,
        )],
        PurityMode::Max => {
            if attributes.is_empty() {
                return Err(Error::InvalidLabels("no attributes".into()));
            }
            attributes.iter().map(|a| message_purities(protocol, a)).collect()
        }
    };
    let sizes = protocol.class_sizes();
    let n = protocol.len() as f64;
    Ok((0..protocol.num_messages())
        .filter_map(|m| {
            let best = per_attr
                .iter()
                .filter_map(|p| p[m])
                .fold(f64::NEG_INFINITY, f64::max);
            (sizes[m] > 0).then(|| sizes[m] as f64 / n * best)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aabb() -> LabelMap {
        LabelMap::from_strings(&["A", "A", "B", "B"]).unwrap()
    }

    #[test]
    fn purity_examples() {
        let split = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(purity(&split, &[aabb()], PurityMode::Attribute(0)).unwrap(), 1.0);
        let anti = Protocol::new(vec![0, 1, 1, 0], 2).unwrap();
        assert_eq!(purity(&anti, &[aabb()], PurityMode::Attribute(0)).unwrap(), 0.5);
        let uneven = Protocol::new(vec![0, 0, 0, 1], 2).unwrap();
        let labels = LabelMap::from_strings(&["A", "A", "B", "B"]).unwrap();
        assert!((purity(&uneven, &[labels], PurityMode::Attribute(0)).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn max_purity_takes_best_attribute_per_message() {
        let anti = Protocol::new(vec![0, 1, 1, 0], 2).unwrap();
        let other = LabelMap::from_strings(&["x", "y", "y", "x"]).unwrap();
        let attrs = [aabb(), other];
        assert_eq!(purity(&anti, &attrs, PurityMode::Max).unwrap(), 1.0);
        assert!(purity(&anti, &attrs, PurityMode::Attribute(2)).is_err());
    }
}
