//! Synthetic edge flows from random walks, plus additive Gaussian noise.
//!
//! Each walk runs on the undirected 1-skeleton, picking an incident edge
//! uniformly at every step, and is absorbed at its target. Walk `i` draws
//! from its own ChaCha stream, so results do not depend on how walks are
//! scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::boundary::Cochain;
use crate::complex::{CellComplex, EdgeId, NodeId, Sign, SignedEdgeRef};
use crate::error::{Error, Result};

pub const MAX_RESTARTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub num_walks: usize,
    /// Step cap per attempt; `None` means `50 · N₀`.
    #[serde(default)]
    pub max_steps: Option<usize>,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn validate(&self, complex: &CellComplex) -> Result<()> {
        if self.sources.is_empty() || self.sinks.is_empty() {
            return Err(Error::InvalidConfig("sources and sinks must be nonempty".into()));
        }
        let n0 = complex.num_nodes();
        if let Some(v) = self.sources.iter().chain(&self.sinks).find(|&&v| v >= n0) {
            return Err(Error::DanglingReference(format!("node {v} but the complex has {n0} nodes")));
        }
        if let Some(v) = self.sources.iter().find(|v| self.sinks.contains(v)) {
            return Err(Error::InvalidConfig(format!("node {v} is both a source and a sink")));
        }
        Ok(())
    }

    pub fn step_cap(&self, complex: &CellComplex) -> usize {
        self.max_steps.unwrap_or(50 * complex.num_nodes())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("noise sigma {sigma} must be finite and nonnegative")));
        }
        Ok(NoiseModel { sigma, seed })
    }
}

/// One walk from `source` until it first hits a node in `sinks`. An attempt
/// that exceeds `max_steps` is discarded and the walk restarts, at most
/// [`MAX_RESTARTS`] times.
pub fn random_walk<R: Rng + ?Sized>(
    complex: &CellComplex,
    source: NodeId,
    sinks: &[NodeId],
    max_steps: usize,
    rng: &mut R,
) -> Result<Vec<SignedEdgeRef>> {
    if sinks.contains(&source) {
        return Err(Error::InvalidConfig(format!("walk source {} is a sink", source.0)));
    }
    let incidence = complex.incidence();
    walk_on(complex, &incidence, source, sinks, max_steps, rng)
}

fn walk_on<R: Rng + ?Sized>(
    complex: &CellComplex,
    incidence: &[Vec<EdgeId>],
    source: NodeId,
    sinks: &[NodeId],
    max_steps: usize,
    rng: &mut R,
) -> Result<Vec<SignedEdgeRef>> {
    let mut walk = Vec::new();
    for _ in 0..=MAX_RESTARTS {
        walk.clear();
        let mut at = source;
        while walk.len() < max_steps {
            let around = &incidence[at.0];
            if around.is_empty() {
                return Err(Error::WalkFailed { start: source.0, restarts: 0 });
            }
            let e = around[rng.gen_range(0..around.len())];
            let edge = complex.edge(e);
            let sign = if edge.tail == at { Sign::Plus } else { Sign::Minus };
            at = edge.traverse(sign).1;
            walk.push(SignedEdgeRef { edge: e, sign });
            if sinks.contains(&at) {
                return Ok(walk);
            }
        }
    }
    Err(Error::WalkFailed { start: source.0, restarts: MAX_RESTARTS })
}

/// Signed traversal counts summed over all walks. Opposite traversals of
/// one edge cancel.
pub fn trajectory_counts(complex: &CellComplex, config: &TrajectoryConfig) -> Result<Vec<i64>> {
    config.validate(complex)?;
    let incidence = complex.incidence();
    let cap = config.step_cap(complex);
    let mut counts = vec![0i64; complex.num_edges()];
    for i in 0..config.num_walks {
        let mut rng = walk_rng(config.seed, i);
        let source = NodeId(config.sources[rng.gen_range(0..config.sources.len())]);
        let sink = NodeId(config.sinks[rng.gen_range(0..config.sinks.len())]);
        for step in walk_on(complex, &incidence, source, &[sink], cap, &mut rng)? {
            counts[step.edge.0] += step.sign.as_i8() as i64;
        }
    }
    Ok(counts)
}

/// `f*`: the trajectory flow as a 1-cochain.
pub fn trajectory_flow(complex: &CellComplex, config: &TrajectoryConfig) -> Result<Cochain> {
    let counts = trajectory_counts(complex, config)?;
    Ok(Cochain::new(1, counts.into_iter().map(|c| c as f64).collect()))
}

/// The generator used for walk `index` under `seed`.
pub fn walk_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `f + ε` with `ε` i.i.d. `N(0, σ²)` per entry.
pub fn add_noise(f: &Cochain, noise: &NoiseModel) -> Cochain {
    let mut values = f.values().to_vec();
    add_noise_in_place(&mut values, noise);
    Cochain::new(f.dim(), values)
}

pub fn add_noise_in_place(values: &mut [f64], noise: &NoiseModel) {
    if noise.sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma).expect("sigma validated");
    for v in values.iter_mut() {
        *v += normal.sample(&mut rng);
    }
}
