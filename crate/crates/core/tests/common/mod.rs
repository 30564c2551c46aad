#![allow(dead_code)]

use emcomm_core::model::input::InputSpace;
use emcomm_core::model::labels::LabelMap;
use emcomm_core::model::protocol::Protocol;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn b() -> InputSpace {
    InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random space with integer-ish coordinates and positive weights.
pub fn random_space(r: &mut impl Rng, n: usize, dim: usize, uniform: bool) -> InputSpace {
    let points = (0..n)
        .map(|_| (0..dim).map(|_| r.gen_range(-5.0..5.0)).collect())
        .collect();
    if uniform {
        InputSpace::uniform(points).unwrap()
    } else {
        let masses: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..1.0)).collect();
        InputSpace::from_masses(points, &masses).unwrap()
    }
}

pub fn random_protocol(r: &mut impl Rng, n: usize, k: usize) -> Protocol {
    Protocol::new((0..n).map(|_| r.gen_range(0..k)).collect(), k).unwrap()
}

/// Balanced labels: every label holds the same mass on a uniform space.
pub fn balanced_labels(r: &mut impl Rng, n: usize, num_labels: usize) -> LabelMap {
    let mut labels: Vec<usize> = (0..n).map(|i| i % num_labels).collect();
    for i in (1..n).rev() {
        labels.swap(i, r.gen_range(0..=i));
    }
    LabelMap::from_indices(labels).unwrap()
}

pub fn space_strategy(max_n: usize, max_dim: usize) -> impl Strategy<Value = InputSpace> {
    (2..=max_n, 1..=max_dim).prop_flat_map(|(n, dim)| {
        (
            prop::collection::vec(prop::collection::vec(-10i32..10, dim), n),
            prop::collection::vec(1u32..10, n),
        )
            .prop_map(|(pts, w)| {
                let points = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
                let masses: Vec<f64> = w.into_iter().map(f64::from).collect();
                InputSpace::from_masses(points, &masses).unwrap()
            })
    })
}

/// A space together with a protocol over it.
pub fn space_and_protocol(max_n: usize, max_dim: usize, max_k: usize) -> impl Strategy<Value = (InputSpace, Protocol)> {
    (space_strategy(max_n, max_dim), 1..=max_k).prop_flat_map(|(space, k)| {
        let n = space.len();
        (Just(space), prop::collection::vec(0..k, n).prop_map(move |a| Protocol::new(a, k).unwrap()))
    })
}

pub fn all_protocols(n: usize, k: usize) -> impl Iterator<Item = Protocol> {
    (0..(k as u64).pow(n as u32)).map(move |i| Protocol::from_index(i, n, k))
}

/// Indices within `tol` of the minimum.
pub fn argmin_set(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    (0..values.len()).filter(|&i| values[i] <= best + tol).collect()
}
