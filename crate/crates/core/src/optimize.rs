//! Protocol search: exhaustive enumeration, k-means alternation and
//! balanced-partition constructors.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::games::receiver::{Receiver, ReconstructionReceiver};
use crate::games::sync::{synchronized_receiver, synchronized_sender};
use crate::model::game::{GameKind, GameSpec};
use crate::model::input::{dist, sq_dist, InputSpace};
use crate::model::message::MessageSpace;
use crate::model::protocol::Protocol;
use crate::model::stats::message_probabilities;
use crate::objectives::{objective, reco_objective};
use crate::rng;

/// Largest protocol count `exhaustive_search` will enumerate.
pub const SEARCH_LIMIT: u64 = 10_000_000;

/// Objective values within this distance of the optimum are ties.
pub const VALUE_TOLERANCE: f64 = 1e-12;

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Optimal closed-form objective (binomial form for discrimination).
    pub value: f64,
    /// Σ p_m² at the optimum, for two-candidate discrimination.
    pub simplified: Option<f64>,
    /// Every optimal protocol, in enumeration order.
    pub optimal: Vec<Protocol>,
    /// Distinct optimal protocols up to message relabeling, sorted.
    pub canonical: Vec<Vec<usize>>,
    pub evaluated: u64,
    /// Some optimal protocol spreads mass uniformly over all K messages.
    pub uniform_optimum: bool,
}

/// K^N, or an error when it exceeds [`SEARCH_LIMIT`].
pub fn search_size(n: usize, k: usize) -> Result<u64> {
    (k as u64)
        .checked_pow(n as u32)
        .filter(|&c| c <= SEARCH_LIMIT)
        .ok_or(Error::BudgetExceeded {
            required: (k as f64).powi(n as i32),
            budget: SEARCH_LIMIT as f64,
        })
}

/// All protocols minimizing the game's closed-form objective.
pub fn exhaustive_search(space: &InputSpace, messages: &MessageSpace, spec: &GameSpec) -> Result<SearchResult> {
    exhaustive_search_with(space, messages.len(), spec, Exec::default())
}

pub fn exhaustive_search_with(
    space: &InputSpace,
    num_messages: usize,
    spec: &GameSpec,
    exec: Exec,
) -> Result<SearchResult> {
    spec.validate()?;
    if num_messages == 0 {
        return Err(Error::InvalidMessageSpace("no messages".into()));
    }
    let n = space.len();
    let total = search_size(n, num_messages)?;
    // fail early on unsupported objectives
    objective(&Protocol::constant(n, num_messages), space, spec)?;

    let chunks = exec.map_chunks(total, CHUNK, |start, end| {
        let mut best = f64::INFINITY;
        let mut hits: Vec<(u64, f64)> = Vec::new();
        for idx in start..end {
            let p = Protocol::from_index(idx, n, num_messages);
            let v = objective(&p, space, spec).expect("objective checked above");
            if v < best - VALUE_TOLERANCE {
                best = v;
                hits.retain(|&(_, h)| h <= best + VALUE_TOLERANCE);
            }
            if v <= best + VALUE_TOLERANCE {
                best = best.min(v);
                hits.push((idx, v));
            }
        }
        (best, hits)
    });
    let value = chunks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let optimal: Vec<Protocol> = chunks
        .into_iter()
        .flat_map(|(_, hits)| hits)
        .filter(|&(_, v)| v <= value + VALUE_TOLERANCE)
        .map(|(idx, _)| Protocol::from_index(idx, n, num_messages))
        .collect();
    let mut canonical: Vec<Vec<usize>> = optimal.iter().map(Protocol::canonical).collect();
    canonical.sort();
    canonical.dedup();
    let uniform = 1.0 / num_messages as f64;
    let uniform_optimum = optimal.iter().any(|p| {
        message_probabilities(p, space)
            .iter()
            .all(|&pm| (pm - uniform).abs() <= VALUE_TOLERANCE)
    });
    let simplified = (spec.kind == GameKind::Discrimination && spec.candidates == 2).then(|| {
        message_probabilities(&optimal[0], space)
            .iter()
            .map(|p| p * p)
            .sum()
    });
    Ok(SearchResult {
        value,
        simplified,
        optimal,
        canonical,
        evaluated: total,
        uniform_optimum,
    })
}

/// Centroid initialization for [`kmeans_alternation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KmeansInit {
    /// K distinct data points drawn with the given seed.
    Seeded(u64),
    Centroids(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansResult {
    pub protocol: Protocol,
    pub receiver: ReconstructionReceiver,
    /// Unexplained variance after each update step.
    pub trace: Vec<f64>,
    /// Assignment steps performed.
    pub rounds: usize,
    pub converged: bool,
    /// Centroids re-seeded because their cluster emptied.
    pub reseeds: usize,
}

/// Alternates the synchronized sender (nearest centroid) and the
/// synchronized receiver (class means). Empty clusters are re-seeded to the
/// point farthest from its nearest centroid.
pub fn kmeans_alternation(
    space: &InputSpace,
    k: usize,
    init: KmeansInit,
    max_iters: usize,
    tol: f64,
) -> Result<KmeansResult> {
    let n = space.len();
    if k == 0 || k > n {
        return Err(Error::InvalidGame(format!("k-means needs 1 ≤ K ≤ N, got K = {k}, N = {n}")));
    }
    let mut centroids = match init {
        KmeansInit::Seeded(seed) => {
            let mut r = rng::substream(seed, rng::KMEANS, 0);
            sample(&mut r, n, k)
                .into_iter()
                .map(|i| space.point(i).to_vec())
                .collect()
        }
        KmeansInit::Centroids(c) => {
            if c.len() != k || c.iter().any(|v| v.len() != space.dim()) {
                return Err(Error::InvalidGame(
                    "need K initial centroids of the input dimension".into(),
                ));
            }
            c
        }
    };
    let spec = GameSpec::reconstruction();
    let mut trace: Vec<f64> = Vec::new();
    let mut previous: Option<Protocol> = None;
    let mut reseeds = 0;
    let mut rounds = 0;
    let mut converged = false;
    let mut receiver = ReconstructionReceiver::total(centroids.clone())?;
    while rounds < max_iters {
        rounds += 1;
        let mut protocol = assign(&centroids, space, &spec)?;
        for _ in 0..k {
            let sizes = protocol.class_sizes();
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                break;
            };
            let far = (0..n)
                .max_by(|&a, &b| {
                    let da = sq_dist(space.point(a), &centroids[protocol.message_of(a)]);
                    let db = sq_dist(space.point(b), &centroids[protocol.message_of(b)]);
                    da.total_cmp(&db).then(b.cmp(&a))
                })
                .expect("non-empty space");
            centroids[empty] = space.point(far).to_vec();
            reseeds += 1;
            protocol = assign(&centroids, space, &spec)?;
        }
        if previous.as_ref() == Some(&protocol) {
            converged = true;
            break;
        }
        let Receiver::Reconstruction(r) = synchronized_receiver(&protocol, space, &spec)? else {
            unreachable!("reconstruction spec yields a reconstruction receiver");
        };
        for (m, c) in centroids.iter_mut().enumerate() {
            if let Some(o) = r.output(m) {
                *c = o.to_vec();
            }
        }
        receiver = r;
        let value = reco_objective(&protocol, space);
        let stalled = trace.last().is_some_and(|&last| last - value < tol);
        trace.push(value);
        previous = Some(protocol);
        if stalled {
            converged = true;
            break;
        }
    }
    let protocol = match previous {
        Some(p) => p,
        None => assign(&centroids, space, &spec)?,
    };
    Ok(KmeansResult {
        protocol,
        receiver,
        trace,
        rounds,
        converged,
        reseeds,
    })
}

fn assign(centroids: &[Vec<f64>], space: &InputSpace, spec: &GameSpec) -> Result<Protocol> {
    let receiver = Receiver::Reconstruction(ReconstructionReceiver::total(centroids.to_vec())?);
    synchronized_sender(&receiver, space, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionFlavor {
    /// Heaviest remaining input into the lightest message.
    GreedyUniform,
    /// Farthest unmatched pairs share a message; needs N = 2K, uniform prior.
    AdversarialAntipodal,
}

pub fn balanced_partition(space: &InputSpace, k: usize, flavor: PartitionFlavor) -> Result<Protocol> {
    let n = space.len();
    if k == 0 {
        return Err(Error::InvalidGame("need at least one message".into()));
    }
    match flavor {
        PartitionFlavor::GreedyUniform => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| space.weight(b).total_cmp(&space.weight(a)).then(a.cmp(&b)));
            let mut mass = vec![0.0; k];
            let mut assignment = vec![0; n];
            for i in order {
                let lightest = mass.iter().copied().fold(f64::INFINITY, f64::min);
                let m = mass
                    .iter()
                    .position(|&v| v <= lightest + VALUE_TOLERANCE)
                    .expect("k ≥ 1");
                mass[m] += space.weight(i);
                assignment[i] = m;
            }
            Protocol::new(assignment, k)
        }
        PartitionFlavor::AdversarialAntipodal => {
            if n != 2 * k {
                return Err(Error::InvalidGame(format!(
                    "antipodal pairing needs N = 2K, got N = {n}, K = {k}"
                )));
            }
            if !space.is_uniform(1e-12) {
                return Err(Error::InvalidGame("antipodal pairing needs a uniform prior".into()));
            }
            let mut open: Vec<usize> = (0..n).collect();
            let mut assignment = vec![0; n];
            for m in 0..k {
                let mut best = (f64::NEG_INFINITY, 0, 0);
                for (ai, &a) in open.iter().enumerate() {
                    for (bi, &b) in open.iter().enumerate().skip(ai + 1) {
                        let d = dist(space.point(a), space.point(b));
                        if d > best.0 {
                            best = (d, ai, bi);
                        }
                    }
                }
                let (_, ai, bi) = best;
                assignment[open[ai]] = m;
                assignment[open[bi]] = m;
                open.remove(bi);
                open.remove(ai);
            }
            Protocol::new(assignment, k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> InputSpace {
        InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn exhaustive_reconstruction_on_b() {
        let r = exhaustive_search_with(&b(), 2, &GameSpec::reconstruction(), Exec::Parallel).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        assert_eq!(r.optimal.len(), 2);
        assert_eq!(r.canonical, vec![vec![0, 0, 1, 1]]);
        assert_eq!(r.evaluated, 16);
    }

    #[test]
    fn exhaustive_discrimination_on_b() {
        let r = exhaustive_search_with(&b(), 2, &GameSpec::discrimination(2), Exec::Sequential).unwrap();
        assert_eq!(r.optimal.len(), 6);
        assert!((r.simplified.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.value - 0.5 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(r.uniform_optimum);
    }

    #[test]
    fn exhaustive_single_input() {
        let one = InputSpace::uniform_scalars(&[3.0]).unwrap();
        let r = exhaustive_search_with(&one, 3, &GameSpec::reconstruction(), Exec::Parallel).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.optimal.len(), 3);
    }

    #[test]
    fn exhaustive_budget() {
        let pts: Vec<f64> = (0..24).map(f64::from).collect();
        let s = InputSpace::uniform_scalars(&pts).unwrap();
        let err = exhaustive_search_with(&s, 2, &GameSpec::reconstruction(), Exec::Parallel).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn kmeans_examples() {
        let r = kmeans_alternation(&b(), 2, KmeansInit::Centroids(vec![vec![0.4], vec![2.6]]), 50, 1e-12)
            .unwrap();
        assert_eq!(r.protocol.assignment(), &[0, 0, 1, 1]);
        assert_eq!(r.receiver.output(0).unwrap(), &[0.5]);
        assert_eq!(r.receiver.output(1).unwrap(), &[2.5]);
        assert_eq!(r.trace, vec![0.25]);
        assert!(r.rounds <= 2 && r.converged);

        let r = kmeans_alternation(&b(), 2, KmeansInit::Centroids(vec![vec![1.4], vec![1.6]]), 50, 1e-12)
            .unwrap();
        assert_eq!(r.protocol.canonical(), vec![0, 0, 1, 1]);
        assert!((r.trace.last().unwrap() - 0.25).abs() < 1e-12);

        let r = kmeans_alternation(&b(), 4, KmeansInit::Seeded(3), 50, 1e-12).unwrap();
        assert_eq!(r.trace[0], 0.0);
    }

    #[test]
    fn kmeans_reseeds_empty_clusters() {
        // both centroids start far right: cluster 1 is empty after the first assignment
        let r = kmeans_alternation(&b(), 2, KmeansInit::Centroids(vec![vec![10.0], vec![10.0]]), 50, 1e-12)
            .unwrap();
        assert!(r.reseeds >= 1);
        assert_eq!(r.protocol.unique_messages(), 2);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn partition_examples() {
        let a = balanced_partition(&b(), 2, PartitionFlavor::AdversarialAntipodal).unwrap();
        assert_eq!(a.assignment(), &[0, 1, 1, 0]);

        let six = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let g = balanced_partition(&six, 3, PartitionFlavor::GreedyUniform).unwrap();
        for p in message_probabilities(&g, &six) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }

        let w = InputSpace::new(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0.4, 0.3, 0.2, 0.1],
        )
        .unwrap();
        let g = balanced_partition(&w, 2, PartitionFlavor::GreedyUniform).unwrap();
        assert_eq!(g.assignment(), &[0, 1, 1, 0]);
    }

    #[test]
    fn adversarial_preconditions() {
        let odd = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0]).unwrap();
        assert!(balanced_partition(&odd, 1, PartitionFlavor::AdversarialAntipodal).is_err());
        let w = InputSpace::new(vec![vec![0.0], vec![1.0]], vec![0.3, 0.7]).unwrap();
        assert!(balanced_partition(&w, 1, PartitionFlavor::AdversarialAntipodal).is_err());
    }
}
