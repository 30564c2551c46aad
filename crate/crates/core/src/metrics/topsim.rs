//! Topographic similarity.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::input::{dist, InputSpace};
use crate::model::message::MessageSpace;
use crate::model::protocol::Protocol;

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    (va > 0.0 && vb > 0.0).then(|| (cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation with average-rank ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::ZeroVariance("spearman correlation"));
    }
    pearson(&average_ranks(a), &average_ranks(b)).ok_or(Error::ZeroVariance("topsim"))
}

/// Spearman correlation between input distances and message distances over
/// all unordered input pairs.
pub fn topsim(protocol: &Protocol, space: &InputSpace, messages: &MessageSpace) -> Result<f64> {
    topsim_with(protocol, space, messages, Exec::default())
}

pub fn topsim_with(protocol: &Protocol, space: &InputSpace, messages: &MessageSpace, exec: Exec) -> Result<f64> {
    protocol.check_inputs(space.len())?;
    if protocol.num_messages() > messages.len() {
        return Err(Error::InvalidProtocol("protocol references messages outside the space".into()));
    }
    let n = space.len();
    if n < 2 {
        return Err(Error::ZeroVariance("topsim"));
    }
    let rows = exec.map_range(n, |a| {
        ((a + 1)..n)
            .map(|b| {
                (
                    dist(space.point(a), space.point(b)),
                    messages.distance(protocol.message_of(a), protocol.message_of(b)),
                )
            })
            .collect::<Vec<_>>()
    });
    let (inputs, msgs): (Vec<f64>, Vec<f64>) = rows.into_iter().flatten().unzip();
    spearman(&inputs, &msgs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn topsim_examples() {
        let space = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0]).unwrap();
        let messages = MessageSpace::symbols(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let id = Protocol::identity(3);
        assert!((topsim(&id, &space, &messages).unwrap() - 1.0).abs() < 1e-12);

        let err = topsim(&Protocol::constant(3, 1), &space, &messages).unwrap_err();
        assert_eq!(err.to_string(), "topsim undefined (zero variance)");
    }

    #[test]
    fn monotone_code_scores_one() {
        let space = InputSpace::uniform_scalars(&[0.0, 1.0, 3.0, 7.0]).unwrap();
        let messages = MessageSpace::scalars(&[0.0, 2.0, 6.0, 14.0]).unwrap();
        let t = topsim(&Protocol::identity(4), &space, &messages).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }
}
