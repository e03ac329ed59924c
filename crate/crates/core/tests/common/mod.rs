//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riskindex::scenario::{EmpiricalDistribution, ScenarioSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector with `n` strictly positive entries.
pub fn probs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

pub fn values(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Space with up to `max_states` states carrying `X`, `Y` and a strictly
/// positive asset payoff `S`.
pub fn space(rng: &mut impl Rng, max_states: usize) -> ScenarioSpace {
    let n = rng.random_range(1..=max_states);
    let x = values(rng, n, 10.0);
    let y = values(rng, n, 10.0);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
    ScenarioSpace::new(probs(rng, n))
        .unwrap()
        .with_var("X", x)
        .unwrap()
        .with_var("Y", y)
        .unwrap()
        .with_var("S", s)
        .unwrap()
}

/// Random discrete law on a small grid, so atoms can coincide across laws.
pub fn grid_law(rng: &mut impl Rng, max_atoms: usize) -> EmpiricalDistribution {
    let n = rng.random_range(1..=max_atoms);
    let pts: Vec<(f64, f64)> =
        probs(rng, n).into_iter().map(|w| (rng.random_range(-8..=8) as f64 * 0.25, w)).collect();
    EmpiricalDistribution::new(&pts).unwrap()
}

pub fn law(space: &ScenarioSpace, var: &str) -> EmpiricalDistribution {
    space.law_of(var).unwrap()
}

pub fn expectation(space: &ScenarioSpace, var: &str) -> f64 {
    space.probs().iter().zip(space.var(var).unwrap()).map(|(p, v)| p * v).sum()
}
