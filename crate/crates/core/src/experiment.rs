//! The flow-denoising benchmark: operators × noise levels × trials.
//!
//! One ground-truth flow `f*` is generated per configuration. For every
//! noise level and trial a single noisy observation is drawn and handed to
//! every operator's denoiser, so operators are compared on identical inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::Cochain;
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::filters::{build_shift_operator, lowpass_denoiser_with, LowpassDenoiser, ShiftOperatorKind};
use crate::flowgen::{add_noise_in_place, trajectory_flow, NoiseModel, TrajectoryConfig};
use crate::seed::derive_seed;
use crate::spectral::PowerIteration;

pub const CSV_HEADER: &str = "operator,sigma,mean_mse,std_mse,trials";

/// Noise levels to sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaGrid {
    /// `points` levels whose per-edge SNR `‖f*‖ / (σ √N₁)` is log-spaced from 10 down to 0.1.
    Auto { points: usize },
    Explicit(Vec<f64>),
}

impl SigmaGrid {
    pub fn resolve(&self, flow: &Cochain) -> Result<Vec<f64>> {
        let sigmas = match self {
            SigmaGrid::Explicit(s) => s.clone(),
            SigmaGrid::Auto { points } => {
                let scale = flow.norm() / (flow.len() as f64).sqrt();
                (0..*points)
                    .map(|i| {
                        let t = if *points > 1 { i as f64 / (*points - 1) as f64 } else { 0.0 };
                        scale / 10f64.powf(1.0 - 2.0 * t)
                    })
                    .collect()
            }
        };
        if sigmas.is_empty() {
            return Err(Error::InvalidConfig("sigma grid is empty".into()));
        }
        if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidConfig(format!("sigma {s} must be finite and nonnegative")));
        }
        Ok(sigmas)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub complex_name: String,
    pub trajectory: TrajectoryConfig,
    pub operators: Vec<ShiftOperatorKind>,
    pub sigmas: SigmaGrid,
    pub trials: usize,
    pub filter_order: usize,
    pub master_seed: u64,
    /// Worker threads; the report does not depend on this.
    pub jobs: usize,
}

impl BenchConfig {
    pub fn new(complex_name: impl Into<String>, trajectory: TrajectoryConfig, master_seed: u64) -> Self {
        BenchConfig {
            complex_name: complex_name.into(),
            trajectory,
            operators: ShiftOperatorKind::BENCHMARK.to_vec(),
            sigmas: SigmaGrid::Auto { points: 8 },
            trials: 500,
            filter_order: 3,
            master_seed,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.operators.is_empty() {
            return Err(Error::InvalidConfig("no operators selected".into()));
        }
        let empty = match &self.sigmas {
            SigmaGrid::Auto { points } => *points == 0,
            SigmaGrid::Explicit(s) => s.is_empty(),
        };
        if empty {
            return Err(Error::InvalidConfig("sigma grid is empty".into()));
        }
        Ok(())
    }
}

/// JSON form of a benchmark configuration:
/// `{"sources": [...], "sinks": [...], "num_walks": n, "seed": s, "sigma_grid": "auto" | [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfigJson {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub num_walks: usize,
    pub seed: u64,
    #[serde(default)]
    pub sigma_grid: Option<SigmaGridJson>,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaGridJson {
    Auto(String),
    Explicit(Vec<f64>),
}

impl BenchConfigJson {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: BenchConfigJson = serde_json::from_str(text)?;
        raw.sigma_grid()?;
        Ok(raw)
    }

    pub fn trajectory(&self) -> TrajectoryConfig {
        TrajectoryConfig {
            sources: self.sources.clone(),
            sinks: self.sinks.clone(),
            num_walks: self.num_walks,
            max_steps: self.max_steps,
            seed: self.seed,
        }
    }

    pub fn sigma_grid(&self) -> Result<Option<SigmaGrid>> {
        match &self.sigma_grid {
            None => Ok(None),
            Some(SigmaGridJson::Auto(s)) if s == "auto" => Ok(Some(SigmaGrid::Auto { points: 8 })),
            Some(SigmaGridJson::Auto(s)) => Err(Error::Parse(format!("sigma_grid must be \"auto\" or a list, got {s:?}"))),
            Some(SigmaGridJson::Explicit(v)) => Ok(Some(SigmaGrid::Explicit(v.clone()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub operator: ShiftOperatorKind,
    pub sigma: f64,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchMetadata {
    pub complex_name: String,
    pub counts: (usize, usize, usize),
    pub master_seed: u64,
    pub trajectory_seed: u64,
    pub num_walks: usize,
    pub filter_order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub metadata: BenchMetadata,
    /// Sigma-major, operators in configuration order.
    pub rows: Vec<BenchRow>,
}

/// A violated ordering claim at one noise level.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingViolation {
    pub sigma: f64,
    pub better: ShiftOperatorKind,
    pub worse: ShiftOperatorKind,
    pub better_mse: f64,
    pub worse_mse: f64,
}

impl BenchReport {
    pub fn sigmas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.sigma) {
                out.push(r.sigma);
            }
        }
        out
    }

    pub fn mean(&self, operator: ShiftOperatorKind, sigma: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.operator == operator && r.sigma == sigma).map(|r| r.mean_mse)
    }

    /// Checks cellular < simplicial, cellular < edge and edge < linegraph at
    /// every sigma in the upper half of the grid. Pairs whose operators are
    /// absent from the report are skipped.
    pub fn ordering_violations(&self) -> Vec<OrderingViolation> {
        use ShiftOperatorKind::*;
        let claims = [(CellularL1, SimplicialL1), (CellularL1, EdgeLaplacian), (EdgeLaplacian, LineGraphLaplacian)];
        let mut sigmas = self.sigmas();
        sigmas.sort_by(f64::total_cmp);
        let upper = &sigmas[sigmas.len() / 2..];
        let mut out = Vec::new();
        for &sigma in upper {
            for (better, worse) in claims {
                if let (Some(b), Some(w)) = (self.mean(better, sigma), self.mean(worse, sigma)) {
                    if b >= w {
                        out.push(OrderingViolation { sigma, better, worse, better_mse: b, worse_mse: w });
                    }
                }
            }
        }
        out
    }

    /// CSV with `#` metadata lines followed by `operator,sigma,mean_mse,std_mse,trials`.
    pub fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# complex={}", m.complex_name);
        let _ = writeln!(out, "# counts={},{},{}", m.counts.0, m.counts.1, m.counts.2);
        let _ = writeln!(out, "# master_seed={}", m.master_seed);
        let _ = writeln!(out, "# trajectory_seed={}", m.trajectory_seed);
        let _ = writeln!(out, "# num_walks={}", m.num_walks);
        let _ = writeln!(out, "# filter_order={}", m.filter_order);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.operator, r.sigma, r.mean_mse, r.std_mse, r.trials);
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<BenchReport> {
        let mut meta = BenchMetadata {
            complex_name: String::new(),
            counts: (0, 0, 0),
            master_seed: 0,
            trajectory_seed: 0,
            num_walks: 0,
            filter_order: 0,
        };
        let mut rows = Vec::new();
        let mut header_seen = false;
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("metadata line without `=`: {line:?}")))?;
                let int = |v: &str| v.parse::<u64>().map_err(|_| Error::Parse(format!("bad {key} value {v:?}")));
                match key {
                    "complex" => meta.complex_name = value.to_string(),
                    "counts" => {
                        let parts: Vec<usize> = value
                            .split(',')
                            .map(|p| p.parse::<usize>().map_err(|_| Error::Parse(format!("bad counts {value:?}"))))
                            .collect::<Result<_>>()?;
                        let [a, b, c] = parts[..] else {
                            return Err(Error::Parse(format!("bad counts {value:?}")));
                        };
                        meta.counts = (a, b, c);
                    }
                    "master_seed" => meta.master_seed = int(value)?,
                    "trajectory_seed" => meta.trajectory_seed = int(value)?,
                    "num_walks" => meta.num_walks = int(value)? as usize,
                    "filter_order" => meta.filter_order = int(value)? as usize,
                    _ => return Err(Error::Parse(format!("unknown metadata key {key:?}"))),
                }
                continue;
            }
            if !header_seen {
                if line != CSV_HEADER {
                    return Err(Error::Parse(format!("expected header {CSV_HEADER:?}, got {line:?}")));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let [op, sigma, mean, std, trials] = fields[..] else {
                return Err(Error::Parse(format!("expected 5 fields in {line:?}")));
            };
            let float = |v: &str| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {v:?}")));
            rows.push(BenchRow {
                operator: op.parse()?,
                sigma: float(sigma)?,
                mean_mse: float(mean)?,
                std_mse: float(std)?,
                trials: trials.parse().map_err(|_| Error::Parse(format!("bad trial count {trials:?}")))?,
            });
        }
        if !header_seen {
            return Err(Error::Parse("missing CSV header".into()));
        }
        Ok(BenchReport { metadata: meta, rows })
    }
}

/// Writes the report CSV; I/O errors are returned unchanged.
pub fn emit_report(report: &BenchReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_csv())?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<BenchReport> {
    BenchReport::parse_csv(&fs::read_to_string(path)?)
}

/// Mean of squared entry differences.
pub fn mse(a: &Cochain, b: &Cochain) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(mse_slices(a.values(), b.values()))
}

fn mse_slices(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Seed of the noise draw for `(trial, sigma index)`.
pub fn trial_noise_seed(master: u64, trial: usize, sigma_index: usize) -> u64 {
    derive_seed(master, &[trial as u64, sigma_index as u64])
}

/// Everything fixed across trials: the clean flow, the sigma grid and one
/// denoiser per operator.
#[derive(Clone, Debug)]
pub struct PreparedBench {
    pub clean: Cochain,
    pub sigmas: Vec<f64>,
    pub denoisers: Vec<(ShiftOperatorKind, LowpassDenoiser)>,
    pub master_seed: u64,
}

impl PreparedBench {
    pub fn new(complex: &CellComplex, config: &BenchConfig) -> Result<Self> {
        config.validate()?;
        let clean = trajectory_flow(complex, &config.trajectory)?;
        let sigmas = config.sigmas.resolve(&clean)?;
        let mut denoisers = Vec::with_capacity(config.operators.len());
        for &kind in &config.operators {
            if kind.cell_dim() != 1 {
                return Err(Error::IncompatibleKind {
                    kind: kind.to_string(),
                    reason: "the benchmark filters edge flows".into(),
                });
            }
            let shift = build_shift_operator(complex, kind)?;
            let power = PowerIteration { seed: config.master_seed, ..PowerIteration::default() };
            let denoiser = lowpass_denoiser_with(&shift, config.filter_order, power).map_err(|e| match e {
                Error::InvalidConfig(reason) => Error::IncompatibleKind { kind: kind.to_string(), reason },
                other => other,
            })?;
            denoisers.push((kind, denoiser));
        }
        Ok(PreparedBench { clean, sigmas, denoisers, master_seed: config.master_seed })
    }

    pub fn noisy_observation(&self, sigma_index: usize, trial: usize) -> Cochain {
        let mut values = self.clean.values().to_vec();
        let noise = NoiseModel { sigma: self.sigmas[sigma_index], seed: trial_noise_seed(self.master_seed, trial, sigma_index) };
        add_noise_in_place(&mut values, &noise);
        Cochain::new(1, values)
    }

    /// MSE of every operator on one shared noisy observation.
    pub fn trial_mses(&self, sigma_index: usize, trial: usize) -> Vec<f64> {
        let noisy = self.noisy_observation(sigma_index, trial).to_vector();
        let clean = DVector::from_column_slice(self.clean.values());
        self.denoisers
            .iter()
            .map(|(_, d)| {
                let estimate = d.apply_vec(&noisy);
                mse_slices(estimate.as_slice(), clean.as_slice())
            })
            .collect()
    }
}

/// Runs the sweep. The output is identical for any `jobs` value.
pub fn run_denoising_bench(complex: &CellComplex, config: &BenchConfig) -> Result<BenchReport> {
    let prepared = PreparedBench::new(complex, config)?;
    let cells: Vec<(usize, usize)> =
        (0..prepared.sigmas.len()).flat_map(|s| (0..config.trials).map(move |t| (s, t))).collect();
    let run = || -> Vec<Vec<f64>> { cells.par_iter().map(|&(s, t)| prepared.trial_mses(s, t)).collect() };
    let per_trial = if config.jobs <= 1 {
        cells.iter().map(|&(s, t)| prepared.trial_mses(s, t)).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run)
    };

    let mut rows = Vec::new();
    for (s, &sigma) in prepared.sigmas.iter().enumerate() {
        let block = &per_trial[s * config.trials..(s + 1) * config.trials];
        for (o, (kind, _)) in prepared.denoisers.iter().enumerate() {
            let (mean, std) = mean_std(block.iter().map(|m| m[o]));
            rows.push(BenchRow { operator: *kind, sigma, mean_mse: mean, std_mse: std, trials: config.trials });
        }
    }
    Ok(BenchReport {
        metadata: BenchMetadata {
            complex_name: config.complex_name.clone(),
            counts: complex.counts(),
            master_seed: config.master_seed,
            trajectory_seed: config.trajectory.seed,
            num_walks: config.trajectory.num_walks,
            filter_order: config.filter_order,
        },
        rows,
    })
}

/// Welford mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    for x in values {
        n += 1;
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let std = if n > 1 { (m2 / (n - 1) as f64).max(0.0).sqrt() } else { 0.0 };
    (mean, std)
}
