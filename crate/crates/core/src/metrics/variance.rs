//! Message variance and cluster variance.

use crate::error::{Error, Result};
use crate::model::input::{sq_dist, InputSpace};
use crate::model::message::{symbols_to_string, MessageSpace};
use crate::model::protocol::Protocol;

/// Empirical message variance: (1/2N) Σ_m (1/|[m]|) Σ_{x₁,x₂∈[m]} ‖x₁ − x₂‖²,
/// over ordered pairs including self-pairs. Counts inputs, ignoring weights.
pub fn message_variance(protocol: &Protocol, space: &InputSpace) -> f64 {
    let n = space.len() as f64;
    let total: f64 = protocol
        .equivalence_classes()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|class| {
            let local: f64 = class
                .iter()
                .flat_map(|&a| class.iter().map(move |&b| (a, b)))
                .map(|(a, b)| sq_dist(space.point(a), space.point(b)))
                .sum();
            local / class.len() as f64
        })
        .sum();
    total / (2.0 * n)
}

/// Message variance after merging messages whose symbols share a group.
pub fn cluster_variance(
    protocol: &Protocol,
    space: &InputSpace,
    messages: &MessageSpace,
    symbol_groups: &[Vec<u32>],
) -> Result<f64> {
    let merged = merge_by_group(protocol, messages, symbol_groups)?;
    Ok(message_variance(&merged, space))
}

/// Maps every input to the symbol group of its message.
pub fn merge_by_group(protocol: &Protocol, messages: &MessageSpace, symbol_groups: &[Vec<u32>]) -> Result<Protocol> {
    let vocab = messages
        .vocab()
        .ok_or_else(|| Error::InvalidMessageSpace("cluster variance needs symbol messages".into()))?;
    let mut group_of = vec![usize::MAX; vocab as usize];
    for (g, group) in symbol_groups.iter().enumerate() {
        for &s in group {
            let slot = group_of.get_mut(s as usize).ok_or_else(|| {
                Error::InvalidMessageSpace(format!("symbol {s} outside vocabulary of size {vocab}"))
            })?;
            if *slot != usize::MAX {
                return Err(Error::InvalidMessageSpace(format!("symbol {s} appears in two groups")));
            }
            *slot = g;
        }
    }
    if let Some(s) = group_of.iter().position(|&g| g == usize::MAX) {
        return Err(Error::InvalidMessageSpace(format!("symbol {s} is in no group")));
    }
    let mut message_group = vec![None; protocol.num_messages()];
    for &m in protocol.assignment() {
        if message_group[m].is_some() {
            continue;
        }
        let symbols = messages
            .symbols_of(m)
            .ok_or_else(|| Error::InvalidMessageSpace(format!("message {m} is not a symbol sequence")))?;
        let first = symbols.first().map_or(0, |&s| group_of[s as usize]);
        if symbols.iter().any(|&s| group_of[s as usize] != first) {
            return Err(Error::InvalidMessageSpace(format!(
                "message {} mixes symbol groups",
                symbols_to_string(symbols)
            )));
        }
        message_group[m] = Some(first);
    }
    let assignment = protocol
        .assignment()
        .iter()
        .map(|&m| message_group[m].expect("set above"))
        .collect();
    Protocol::new(assignment, symbol_groups.len().max(1))
}
