//! Monte Carlo estimation of the time constant, plus the oracle harnesses
//! that certify the frontier recursion.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainRun, Engine, GenericFrontier};
use crate::graph::{
    classify, frontier_oracle, sample_ladder_with, stream_rng, GraphFamily, Vertex, WeightedLadder,
};
use crate::{Error, Result};

pub const MIN_STEPS: usize = 10_000;
pub const MIN_BURN_IN: usize = 1_000;
pub const DEFAULT_BURN_IN: usize = 10_000;

/// Absolute tolerance when comparing recursion and Dijkstra times.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Operator,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Operator => "operator",
            Self::MonteCarlo => "monte-carlo",
        })
    }
}

/// A time-constant value with where it came from.
///
/// `std_error` is positive exactly for Monte Carlo estimates. It is
/// serialized as `uncertainty`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub family: GraphFamily,
    pub method: Method,
    pub value: f64,
    #[serde(rename = "uncertainty")]
    pub std_error: f64,
    pub n_steps: usize,
    pub n_shards: usize,
    pub seed: u64,
}

impl RateEstimate {
    /// A deterministic value (closed form or operator numerics).
    pub fn deterministic(family: GraphFamily, method: Method, value: f64) -> Self {
        Self {
            family,
            method,
            value,
            std_error: 0.0,
            n_steps: 0,
            n_shards: 0,
            seed: 0,
        }
    }
}

/// Parameters of a sharded Monte Carlo run. `n_steps` counts measured
/// layers per shard, after `burn_in` discarded ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub n_steps: usize,
    pub n_shards: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub engine: Option<Engine>,
}

impl McConfig {
    pub fn new(n_steps: usize, n_shards: usize, seed: u64) -> Self {
        Self {
            n_steps,
            n_shards,
            burn_in: DEFAULT_BURN_IN,
            seed,
            engine: None,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// Forces a recursion; by default the generic one.
    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = Some(engine);
        self
    }
}

/// Per-shard slopes, kept for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ShardedEstimate {
    pub estimate: RateEstimate,
    pub shard_values: Vec<f64>,
}

/// Stream index of shard `k`; stream 0 belongs to `sample_ladder`.
fn shard_stream(shard: usize) -> u64 {
    shard as u64 + 1
}

fn run_shard(family: GraphFamily, config: &McConfig, shard: usize) -> Result<f64> {
    let engine = config.engine.unwrap_or(Engine::Generic);
    let rng = stream_rng(config.seed, shard_stream(shard));
    let mut run = ChainRun::new(family, engine, config.n_steps, rng)?;
    run.skip_layers(config.burn_in);
    let start = run.l();
    for _ in run.by_ref() {}
    let value = (run.l() - start) / config.n_steps as f64;
    if !value.is_finite() || !run.frontier_is_finite() {
        return Err(Error::DegenerateShard { shard });
    }
    Ok(value)
}

pub fn estimate_chi(family: GraphFamily, config: &McConfig) -> Result<RateEstimate> {
    estimate_chi_sharded(family, config).map(|s| s.estimate)
}

/// Runs `n_shards` independent chains; the estimate is the mean of the
/// per-shard slopes and the standard error their sample standard deviation
/// over `sqrt(n_shards)`. Shards run in parallel but are reduced in shard
/// order, so results are bit-reproducible.
pub fn estimate_chi_sharded(family: GraphFamily, config: &McConfig) -> Result<ShardedEstimate> {
    if !classify(family).is_nontrivial() {
        return Err(Error::UnsupportedFamily {
            family,
            reason: "Monte Carlo estimation is for the six non-trivial families",
        });
    }
    if config.n_steps < MIN_STEPS {
        return Err(Error::InvalidParameter(format!(
            "n_steps = {} < {MIN_STEPS}",
            config.n_steps
        )));
    }
    if config.burn_in < MIN_BURN_IN {
        return Err(Error::InvalidParameter(format!(
            "burn_in = {} < {MIN_BURN_IN}",
            config.burn_in
        )));
    }
    if config.n_shards < 2 {
        return Err(Error::InvalidParameter(
            "at least two shards are needed for a standard error".into(),
        ));
    }

    let shard_values = (0..config.n_shards)
        .into_par_iter()
        .map(|shard| run_shard(family, config, shard))
        .collect::<Result<Vec<f64>>>()?;

    let k = shard_values.len() as f64;
    let mean = shard_values.iter().sum::<f64>() / k;
    let var = shard_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(ShardedEstimate {
        estimate: RateEstimate {
            family,
            method: Method::MonteCarlo,
            value: mean,
            std_error: var.sqrt() / k.sqrt(),
            n_steps: config.n_steps,
            n_shards: config.n_shards,
            seed: config.seed,
        },
        shard_values,
    })
}

/// Outcome of [`validate_recursion`].
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionReport {
    pub family: GraphFamily,
    pub trials: usize,
    pub failures: usize,
    pub max_discrepancy: f64,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn agree(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite() && a.signum() == b.signum())
        || (a - b).abs() <= ORACLE_TOLERANCE
}

fn discrepancy(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() && a.signum() == b.signum() {
        0.0
    } else {
        (a - b).abs()
    }
}

/// Frontier times `(d0, d1)` from the generic recursion on a stored ladder.
pub fn recursion_frontier(ladder: &WeightedLadder) -> (f64, f64) {
    let front = ladder
        .layers
        .iter()
        .fold(GenericFrontier::origin(ladder.z0), |front, layer| {
            crate::chain::generic_step(front, layer, ladder.family)
        });
    (front.d0(), front.d1())
}

/// Samples `trials` ladders of uniformly random length in `1..=max_n` and
/// compares the generic recursion against Dijkstra at both frontier
/// vertices.
pub fn validate_recursion(
    family: GraphFamily,
    trials: usize,
    max_n: usize,
    seed: u64,
) -> Result<RecursionReport> {
    if trials == 0 || max_n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need trials >= 1 and max_n >= 2, got {trials} and {max_n}"
        )));
    }
    let mut rng = stream_rng(seed, 0x5EED_0000);
    let mut failures = 0;
    let mut max_discrepancy: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.random_range(1..=max_n);
        let ladder = sample_ladder_with(family, n, &mut rng)?;
        let (r0, r1) = recursion_frontier(&ladder);
        let (o0, o1) = frontier_oracle(&ladder);
        max_discrepancy = max_discrepancy
            .max(discrepancy(r0, o0))
            .max(discrepancy(r1, o1));
        if !(agree(r0, o0) && agree(r1, o1)) {
            failures += 1;
        }
    }
    Ok(RecursionReport {
        family,
        trials,
        failures,
        max_discrepancy,
    })
}

/// Outcome of [`subadditivity_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct SubadditivityReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest `l_{0->n} - (l_{0->m} + l_{m->n})` seen; never positive
    /// beyond rounding.
    pub max_excess: f64,
}

/// `l_{a->b}` restricted to columns `a..=b`; `0` when `a == b`.
fn restricted_time(ladder: &WeightedLadder, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let seg = ladder.segment(a, b)?;
    Ok(crate::graph::dijkstra_oracle(&seg, Vertex::new(seg.n, 0)).unwrap_or(f64::INFINITY))
}

/// Checks `l_{0->n} <= l_{0->m} + l_{m->n}` on `trials` sampled ladders.
pub fn subadditivity_probe(
    family: GraphFamily,
    trials: usize,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<SubadditivityReport> {
    if m > n || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= m <= n and n >= 1, got m = {m}, n = {n}"
        )));
    }
    let mut rng = stream_rng(seed, 0xADD_0000);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..trials {
        let ladder = sample_ladder_with(family, n, &mut rng)?;
        let whole = restricted_time(&ladder, 0, n)?;
        let split = restricted_time(&ladder, 0, m)? + restricted_time(&ladder, m, n)?;
        if whole.is_infinite() && split.is_infinite() {
            continue;
        }
        let excess = whole - split;
        max_excess = max_excess.max(excess);
        if excess > 1e-12 * (1.0 + split.abs()) {
            violations += 1;
        }
    }
    Ok(SubadditivityReport {
        trials,
        violations,
        max_excess,
    })
}
