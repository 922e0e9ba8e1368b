//! Synthetic instances for tests and benchmarks.
//!
//! Points are drawn uniformly from the square [0, 100]^2 with the depot at
//! the center, using unrounded Euclidean distances so the metric satisfies
//! the triangle inequality exactly. Everything is a pure function of the
//! seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Constraint, Instance};

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<(u64, f64, f64)> {
    (1..=n as u64)
        .map(|id| (id, rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect()
}

/// Random capacity instance: demands uniform in 1..=max_demand.
pub fn random_capacity(
    name: &str,
    n: usize,
    capacity: u64,
    max_demand: u64,
    seed: u64,
) -> Instance {
    assert!(n >= 1, "need at least one delivery");
    assert!(
        (1..=capacity).contains(&max_demand),
        "demands must fit a vehicle: 1 <= max_demand <= capacity"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(n, &mut rng);
    let demands: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_demand)).collect();
    Instance::from_points(
        name,
        (50.0, 50.0),
        &points,
        Some(&demands),
        false,
        Constraint::Capacity(capacity),
    )
    .expect("generated capacity instance is always servable")
}

/// Random route-length-limited instance. `slack >= 1` scales the bound off
/// the farthest delivery's round trip, so every delivery stays servable and
/// roughly `slack` far-out stops fit one route.
pub fn random_maxlen(name: &str, n: usize, slack: f64, seed: u64) -> Instance {
    assert!(n >= 1, "need at least one delivery");
    assert!(slack >= 1.0, "slack below 1 makes the farthest delivery unservable");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(n, &mut rng);
    let max_round_trip = points
        .iter()
        .map(|&(_, x, y)| 2.0 * ((x - 50.0).powi(2) + (y - 50.0).powi(2)).sqrt())
        .fold(0.0, f64::max);
    Instance::from_points(
        name,
        (50.0, 50.0),
        &points,
        None,
        false,
        Constraint::MaxRouteLength(slack * max_round_trip),
    )
    .expect("generated length-limited instance is always servable")
}
