//! `cellhodge` command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use cellhodge::boundary::{boundary_matrix_1, boundary_matrix_2, Cochain};
use cellhodge::cocnn::{gradcheck, LayerKind, Nonlinearity};
use cellhodge::complex::{parse_complex_json, CellComplex};
use cellhodge::experiment::{run_denoising_bench, BenchConfig, BenchConfigJson, SigmaGrid};
use cellhodge::filters::{build_shift_operator, frequency_response_csv, lowpass_denoiser, ShiftOperatorKind};
use cellhodge::fixtures::{Fixture, SIOUX_FALLS_SINKS, SIOUX_FALLS_SOURCES};
use cellhodge::flowgen::TrajectoryConfig;
use cellhodge::spectral::{betti_numbers, betti_numbers_numerical, eigendecompose, hodge_decompose, hodge_laplacian};
use clap::{Args, Parser, Subcommand, ValueEnum};

const FIXTURE_ENV: &str = "CELLHODGE_FIXTURES";

#[derive(Debug, Parser)]
#[command(name = "cellhodge", version, about = "Hodge Laplacians and flow filtering on cell complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a JSON complex and print its cell counts.
    Build {
        /// Complex JSON file or built-in fixture name.
        complex: String,
    },
    /// Emit the Hodge Laplacian L_k (or its spectrum) as CSV.
    Laplacian(LaplacianArgs),
    /// Split an edge flow into gradient, curl and harmonic parts.
    Decompose {
        /// Complex JSON file or built-in fixture name.
        complex: String,
        /// Edge flow in `dim,index,value` CSV.
        #[arg(long)]
        flow: PathBuf,
        /// Output CSV (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the low-pass denoiser (I - S/lambda_max)^order to an edge flow.
    Filter(FilterArgs),
    /// Run the flow-denoising benchmark.
    DenoiseBench(BenchArgs),
    /// Compare analytic and finite-difference gradients of a layer.
    NnGradcheck(GradcheckArgs),
    /// List or write the built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
    /// Print Betti numbers as `b0,b1,b2`.
    Betti {
        /// Complex JSON file or built-in fixture name.
        complex: String,
        /// Also count zero eigenvalues of each L_k and fail if they disagree.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Args)]
struct LaplacianArgs {
    /// Complex JSON file or built-in fixture name.
    complex: String,
    /// Cell dimension (0, 1 or 2).
    #[arg(short, long, default_value_t = 1)]
    k: usize,
    /// Which summand to emit.
    #[arg(long, value_enum, default_value_t = Part::Full)]
    part: Part,
    /// Emit `index,eigenvalue` instead of matrix triplets.
    #[arg(long)]
    spectrum: bool,
    /// Emit the boundary matrix B_k (k = 1 or 2) instead of a Laplacian.
    #[arg(long)]
    boundary: bool,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Part {
    Full,
    Lower,
    Upper,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Complex JSON file or built-in fixture name.
    complex: String,
    /// Edge flow in `dim,index,value` CSV.
    #[arg(long)]
    flow: PathBuf,
    /// Shift operator.
    #[arg(long, value_enum, default_value_t = OperatorArg::Cellular)]
    operator: OperatorArg,
    /// Exponent of the low-pass filter.
    #[arg(long, default_value_t = 3)]
    filter_order: usize,
    /// Seed of the power iteration that estimates lambda_max.
    #[arg(long)]
    seed: u64,
    /// Write the frequency response `lambda,response` on a 101-point grid here.
    #[arg(long)]
    response: Option<PathBuf>,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    Cellular,
    Simplicial,
    Edge,
    Linegraph,
}

impl From<OperatorArg> for ShiftOperatorKind {
    fn from(a: OperatorArg) -> Self {
        match a {
            OperatorArg::Cellular => ShiftOperatorKind::CellularL1,
            OperatorArg::Simplicial => ShiftOperatorKind::SimplicialL1,
            OperatorArg::Edge => ShiftOperatorKind::EdgeLaplacian,
            OperatorArg::Linegraph => ShiftOperatorKind::LineGraphLaplacian,
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Complex JSON file or built-in fixture name.
    #[arg(long)]
    complex: String,
    /// Flow configuration JSON (`sources`, `sinks`, `num_walks`, `seed`, `sigma_grid`).
    /// Required unless the complex is the Sioux Falls fixture.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Noisy trials per noise level.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// `auto` or a comma-separated list of noise standard deviations.
    #[arg(long, default_value = "auto")]
    sigmas: String,
    /// Operators to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [OperatorArg::Cellular, OperatorArg::Simplicial, OperatorArg::Edge, OperatorArg::Linegraph])]
    operator: Vec<OperatorArg>,
    /// Exponent of the low-pass filter.
    #[arg(long, default_value_t = 3)]
    filter_order: usize,
    /// Master seed for noise draws and power iteration.
    #[arg(long)]
    seed: u64,
    /// Worker threads; the report does not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Exit with status 1 unless cellular < simplicial, cellular < edge and
    /// edge < linegraph at every noise level in the upper half of the grid.
    #[arg(long)]
    assert_ordering: bool,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    /// Layer form.
    #[arg(long, value_enum)]
    layer: LayerArg,
    /// Seed of the random instance.
    #[arg(long)]
    seed: u64,
    /// Pointwise nonlinearity.
    #[arg(long, value_enum, default_value_t = ActivationArg::Tanh)]
    activation: ActivationArg,
    /// Number of instances (seeds seed, seed+1, ...); the worst error is printed.
    #[arg(long, default_value_t = 1)]
    instances: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LayerArg {
    Eq5,
    Eq6,
    Eq7,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ActivationArg {
    Identity,
    Relu,
    Tanh,
}

#[derive(Debug, Subcommand)]
enum FixturesAction {
    /// Print fixture names and cell counts.
    List,
    /// Write every fixture as JSON into a directory.
    Emit {
        /// Target directory; defaults to $CELLHODGE_FIXTURES or `fixtures`.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// Failure that should exit with status 1.
#[derive(Debug)]
struct Failure(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build { complex } => {
            let c = load_complex(&complex)?;
            let (n0, n1, n2) = c.counts();
            println!("N=({n0},{n1},{n2})");
        }
        Command::Laplacian(args) => laplacian(args)?,
        Command::Decompose { complex, flow, out } => {
            let c = load_complex(&complex)?;
            let f = load_flow(&flow)?;
            let parts = hodge_decompose(&c, &f)?;
            write_output(out.as_deref(), &parts.to_csv())?;
        }
        Command::Filter(args) => filter(args)?,
        Command::DenoiseBench(args) => bench(args)?,
        Command::NnGradcheck(args) => {
            let kind = match args.layer {
                LayerArg::Eq5 => LayerKind::Eq5,
                LayerArg::Eq6 => LayerKind::Eq6,
                LayerArg::Eq7 => LayerKind::Eq7,
            };
            let nl = match args.activation {
                ActivationArg::Identity => Nonlinearity::Identity,
                ActivationArg::Relu => Nonlinearity::Relu,
                ActivationArg::Tanh => Nonlinearity::Tanh,
            };
            let mut worst: f64 = 0.0;
            for i in 0..args.instances.max(1) {
                worst = worst.max(gradcheck(kind, nl, args.seed.wrapping_add(i))?);
            }
            println!("# seed={}", args.seed);
            println!("max_rel_error={worst:e}");
        }
        Command::Fixtures { action } => match action {
            FixturesAction::List => {
                println!("name,file,n0,n1,n2");
                for f in Fixture::ALL {
                    let (a, b, c) = f.build().counts();
                    println!("{},{},{a},{b},{c}", f.name(), f.file_name());
                }
            }
            FixturesAction::Emit { dir } => {
                let dir = dir
                    .or_else(|| std::env::var_os(FIXTURE_ENV).map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from("fixtures"));
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                for f in Fixture::ALL {
                    let path = dir.join(f.file_name());
                    fs::write(&path, f.build().to_json()).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {}", path.display());
                }
            }
        },
        Command::Betti { complex, check } => {
            let c = load_complex(&complex)?;
            let (b0, b1, b2) = betti_numbers(&c)?;
            if check {
                let numeric = betti_numbers_numerical(&c, cellhodge::spectral::DEFAULT_ZERO_TOL)?;
                if numeric != (b0, b1, b2) {
                    return Err(anyhow::anyhow!(
                        "integer ranks give ({b0},{b1},{b2}) but Laplacian kernels give {numeric:?}"
                    )
                    .into());
                }
            }
            println!("{b0},{b1},{b2}");
        }
    }
    Ok(())
}

/// Reads a complex from a path, or resolves a fixture name (from
/// `$CELLHODGE_FIXTURES` when set, else the built-in copy).
fn load_complex(arg: &str) -> anyhow::Result<CellComplex> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return parse_complex_json(&text).with_context(|| format!("invalid complex in {arg}"));
    }
    let Ok(fixture) = arg.parse::<Fixture>() else {
        bail!("{arg}: no such file or fixture");
    };
    if let Some(dir) = std::env::var_os(FIXTURE_ENV) {
        let path = Path::new(&dir).join(fixture.file_name());
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        return parse_complex_json(&text).with_context(|| format!("invalid complex in {}", path.display()));
    }
    Ok(fixture.build())
}

fn load_flow(path: &Path) -> anyhow::Result<Cochain> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Cochain::parse_csv(&text).with_context(|| format!("invalid flow in {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn laplacian(args: LaplacianArgs) -> anyhow::Result<()> {
    let c = load_complex(&args.complex)?;
    if args.boundary {
        let b = match args.k {
            1 => boundary_matrix_1(&c),
            2 => boundary_matrix_2(&c),
            k => bail!("no boundary matrix B_{k}; use k = 1 or 2"),
        };
        return write_output(args.out.as_deref(), &b.to_csv());
    }
    let l = hodge_laplacian(&c, args.k)?;
    let m = match args.part {
        Part::Full => l.full,
        Part::Lower => l.lower,
        Part::Upper => l.upper,
    };
    let text = if args.spectrum {
        eigendecompose(&m, cellhodge::spectral::DEFAULT_ZERO_TOL)?.to_csv()
    } else {
        let mut out = String::from("row,col,value\n");
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != 0.0 {
                    out.push_str(&format!("{i},{j},{}\n", m[(i, j)]));
                }
            }
        }
        out
    };
    write_output(args.out.as_deref(), &text)
}

fn filter(args: FilterArgs) -> anyhow::Result<()> {
    let c = load_complex(&args.complex)?;
    let f = load_flow(&args.flow)?;
    f.check_on(&c, 1)?;
    let shift = build_shift_operator(&c, args.operator.into())?;
    let denoiser = lowpass_denoiser(&shift, args.filter_order, args.seed)?;
    let out = denoiser.apply(&f)?;
    let text = format!("# seed={} lambda_max={}\n{}", args.seed, denoiser.lambda_max(), out.to_csv());
    write_output(args.out.as_deref(), &text)?;
    if let Some(path) = args.response {
        let grid: Vec<f64> = (0..=100).map(|i| denoiser.lambda_max() * i as f64 / 100.0).collect();
        fs::write(&path, frequency_response_csv(&denoiser.to_poly_filter(), &grid))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let c = load_complex(&args.complex)?;
    let (trajectory, file_grid) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let raw = BenchConfigJson::parse(&text).with_context(|| format!("invalid config {}", path.display()))?;
            (raw.trajectory(), raw.sigma_grid()?)
        }
        None if c == Fixture::SiouxFalls.build() => (sioux_falls_trajectory(args.seed), None),
        None => bail!("--config is required for complexes other than the Sioux Falls fixture"),
    };
    let sigmas = match args.sigmas.as_str() {
        "auto" => file_grid.unwrap_or(SigmaGrid::Auto { points: 8 }),
        list => SigmaGrid::Explicit(
            list.split(',')
                .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad sigma {s:?}")))
                .collect::<anyhow::Result<_>>()?,
        ),
    };
    let config = BenchConfig {
        complex_name: args.complex.clone(),
        trajectory,
        operators: args.operator.iter().map(|&o| o.into()).collect(),
        sigmas,
        trials: args.trials,
        filter_order: args.filter_order,
        master_seed: args.seed,
        jobs: args.jobs.max(1),
    };
    let report = run_denoising_bench(&c, &config)?;
    cellhodge::experiment::emit_report(&report, &args.out)?;
    eprintln!("# seed={} wrote {} rows to {}", args.seed, report.rows.len(), args.out.display());
    if args.assert_ordering {
        let violations = report.ordering_violations();
        if !violations.is_empty() {
            for v in &violations {
                eprintln!(
                    "ordering violated at sigma={}: {} ({}) is not below {} ({})",
                    v.sigma, v.better, v.better_mse, v.worse, v.worse_mse
                );
            }
            bail!("{} ordering violations", violations.len());
        }
        eprintln!("ordering holds at every upper-half sigma");
    }
    Ok(())
}

/// Default Sioux Falls flow: 1000 walks from the northern rows to the southern row.
fn sioux_falls_trajectory(seed: u64) -> TrajectoryConfig {
    TrajectoryConfig {
        sources: SIOUX_FALLS_SOURCES.to_vec(),
        sinks: SIOUX_FALLS_SINKS.to_vec(),
        num_walks: 1000,
        max_steps: None,
        seed,
    }
}
