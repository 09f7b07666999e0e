//! Command-line front end: convergence sweeps, covariance symmetrization
//! and the channel invariance check, with CSV or JSON output.
//!
//! Every command is deterministic given its configuration and seed. Exit
//! codes: 0 success, 2 configuration or input errors, 3 requested numeric
//! check failed.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use cvsym_core::channel::{channel_check_run, ChannelModel};
use cvsym_core::classical::classical_sweep;
use cvsym_core::definetti::{definetti_sweep, Arithmetic as CoreArithmetic};
use cvsym_core::phase_space::{
    haar_symplectic_orthogonal, mc_symmetrize, replicate_pairs, symmetrize_covariance,
    CovarianceMatrix,
};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "cvsym", version, about = "Phase-space symmetrization numerics")]
struct Cli {
    /// TOML configuration file; explicit flags win over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the reduced-state vs thermal-state trace distance and its
    /// likelihood-ratio bound over (kept, total, photons) grids.
    DefinettiSweep(DefinettiArgs),
    /// Symmetrize a two-party covariance: closed-form averaging plus a
    /// Monte-Carlo cross-check under random conjugate rotations.
    Symmetrize(SymmetrizeArgs),
    /// Sweep the sphere-marginal to Gaussian variation distance.
    ClassicalSweep(ClassicalArgs),
    /// Simulate the Gaussian channel and report estimator invariance under
    /// joint random rotations.
    ChannelCheck(ChannelArgs),
    /// Emit one Haar-random symplectic orthogonal matrix as JSON.
    HaarSample(HaarArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Arithmetic {
    Exact,
    Float,
}

impl From<Arithmetic> for CoreArithmetic {
    fn from(a: Arithmetic) -> Self {
        match a {
            Arithmetic::Exact => CoreArithmetic::Exact,
            Arithmetic::Float => CoreArithmetic::Float,
        }
    }
}

#[derive(Args)]
struct DefinettiArgs {
    /// Kept mode counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    kept: Option<Vec<u64>>,
    /// Total mode counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    total: Option<Vec<u64>>,
    /// Total photon numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    photons: Option<Vec<u64>>,
    /// Arithmetic path (exact rationals or log-domain floats).
    #[arg(long, value_enum)]
    arithmetic: Option<Arithmetic>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SymmetrizeArgs {
    /// Covariance matrix JSON file (4x4, interleaved ordering).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Number of i.i.d. pair copies to tile before the Monte-Carlo run.
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Verify the uncertainty relation on the input and fail (exit 3) if
    /// it does not hold.
    #[arg(long)]
    check_physical: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassicalArgs {
    /// Ambient dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Retained coordinates (1 or 2).
    #[arg(long)]
    retained: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelArgs {
    /// Transmission factor t.
    #[arg(long)]
    transmission: Option<f64>,
    /// Additive noise variance.
    #[arg(long)]
    noise_variance: Option<f64>,
    /// Alice modulation variance.
    #[arg(long)]
    modulation_variance: Option<f64>,
    /// Channel uses per run.
    #[arg(long)]
    uses: Option<usize>,
    /// Number of independent runs (one CSV row each).
    #[arg(long)]
    runs: Option<u64>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HaarArgs {
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Optional TOML configuration, merged under explicit flags.
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    seed: Option<u64>,
    format: Option<OutputFormat>,
    definetti_sweep: Option<DefinettiFile>,
    symmetrize: Option<SymmetrizeFile>,
    classical_sweep: Option<ClassicalFile>,
    channel_check: Option<ChannelFile>,
    haar_sample: Option<HaarFile>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct DefinettiFile {
    kept: Option<Vec<u64>>,
    total: Option<Vec<u64>>,
    photons: Option<Vec<u64>>,
    arithmetic: Option<Arithmetic>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct SymmetrizeFile {
    input: Option<PathBuf>,
    samples: Option<u64>,
    copies: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ClassicalFile {
    dims: Option<Vec<usize>>,
    retained: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ChannelFile {
    transmission: Option<f64>,
    noise_variance: Option<f64>,
    modulation_variance: Option<f64>,
    uses: Option<usize>,
    runs: Option<u64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct HaarFile {
    modes: Option<usize>,
}

enum CliError {
    /// Bad configuration or unreadable/malformed input: exit 2.
    Config(String),
    /// A requested numeric check failed: exit 3.
    Numeric(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<cvsym_core::Error> for CliError {
    fn from(e: cvsym_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let outcome = match cli.command {
        Command::DefinettiSweep(args) => run_definetti(args, &config),
        Command::Symmetrize(args) => run_symmetrize(args, &config),
        Command::ClassicalSweep(args) => run_classical(args, &config),
        Command::ChannelCheck(args) => run_channel(args, &config),
        Command::HaarSample(args) => run_haar(args, &config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Config(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        CliError::Numeric(msg) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_config(path: Option<&std::path::Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, contents)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn require<T>(value: Option<T>, what: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("missing required value: {what}")))
}

// ---------------------------------------------------------------------------
// definetti-sweep
// ---------------------------------------------------------------------------

fn run_definetti(args: DefinettiArgs, config: &FileConfig) -> CliResult<()> {
    let file = config.definetti_sweep.as_ref();
    let kept = require(
        args.kept.or_else(|| file.and_then(|f| f.kept.clone())),
        "--kept",
    )?;
    let total = require(
        args.total.or_else(|| file.and_then(|f| f.total.clone())),
        "--total",
    )?;
    let photons = require(
        args.photons.or_else(|| file.and_then(|f| f.photons.clone())),
        "--photons",
    )?;
    if kept.is_empty() || total.is_empty() || photons.is_empty() {
        return Err(CliError::config("parameter ranges must be non-empty"));
    }
    let arithmetic = args
        .arithmetic
        .or(file.and_then(|f| f.arithmetic))
        .unwrap_or(Arithmetic::Exact);
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Csv);

    let rows = definetti_sweep(&kept, &total, &photons, arithmetic.into())?;
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(
                "n,N,k,trace_distance_exact,trace_distance,sup_bound_exact,sup_bound,argmax,\
                 asymptote,bound_times_N_over_n\n",
            );
            for r in &rows {
                let td_exact = r
                    .trace_distance_exact
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let sup_exact = r
                    .sup_bound_exact
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.kept_modes,
                    r.total_modes,
                    r.total_photons,
                    td_exact,
                    r.trace_distance,
                    sup_exact,
                    opt(r.sup_bound),
                    r.argmax.map(|v| v.to_string()).unwrap_or_default(),
                    r.asymptote,
                    opt(r.bound_scaled),
                )
                .expect("string write");
            }
        }
        OutputFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.kept_modes,
                        "N": r.total_modes,
                        "k": r.total_photons,
                        "trace_distance_exact":
                            r.trace_distance_exact.as_ref().map(|v| v.to_string()),
                        "trace_distance": r.trace_distance,
                        "sup_bound_exact": r.sup_bound_exact.as_ref().map(|v| v.to_string()),
                        "sup_bound": r.sup_bound,
                        "argmax": r.argmax,
                        "asymptote": r.asymptote,
                        "bound_times_N_over_n": r.bound_scaled,
                    })
                })
                .collect();
            out = serde_json::to_string_pretty(&items).expect("serializable");
            out.push('\n');
        }
    }
    write_output(args.output.as_ref(), &out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// symmetrize
// ---------------------------------------------------------------------------

fn run_symmetrize(args: SymmetrizeArgs, config: &FileConfig) -> CliResult<()> {
    let file = config.symmetrize.as_ref();
    let input = require(
        args.input.or_else(|| file.and_then(|f| f.input.clone())),
        "--input",
    )?;
    let samples = args
        .samples
        .or(file.and_then(|f| f.samples))
        .unwrap_or(100_000);
    let copies = args.copies.or(file.and_then(|f| f.copies)).unwrap_or(1);
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);

    let text = fs::read_to_string(&input)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", input.display())))?;
    let cov = CovarianceMatrix::from_json(&text)?;
    if cov.modes() != 2 {
        return Err(CliError::config(format!(
            "symmetrize expects a two-party single-pair (4x4) covariance, got {} modes",
            cov.modes()
        )));
    }

    let physical = cov.is_physical(1e-9);
    let closed = symmetrize_covariance(&cov)?;
    let target = closed.assemble();

    let tiled = replicate_pairs(&cov, copies)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mc = mc_symmetrize(&tiled, samples, &mut rng)?;

    let mut deviations = [[0.0f64; 4]; 4];
    let mut max_dev: f64 = 0.0;
    for q in 0..4 {
        for r in 0..4 {
            let gap = mc.mean[(q, r)] - target.entries()[(q, r)];
            // Floor the scale so exact fixed points (zero-variance entries)
            // do not divide rounding noise by rounding noise.
            let dev = gap / mc.std_err[(q, r)].max(1e-12);
            deviations[q][r] = dev;
            max_dev = max_dev.max(dev.abs());
        }
    }

    let flat = |m: &cvsym_core::nalgebra::Matrix4<f64>| -> Vec<f64> {
        (0..4)
            .flat_map(|q| (0..4).map(move |r| (q, r)))
            .map(|(q, r)| m[(q, r)])
            .collect()
    };
    let report = json!({
        "closed_form": {
            "alice_variance": closed.alice_variance,
            "bob_variance": closed.bob_variance,
            "correlation": closed.correlation,
        },
        "assembled": serde_json::from_str::<serde_json::Value>(&target.to_json())
            .expect("valid json"),
        "monte_carlo": {
            "samples": mc.samples,
            "copies": copies,
            "seed": seed,
            "mean": flat(&mc.mean),
            "std_err": flat(&mc.std_err),
            "deviation_std_errs": deviations.iter().flatten().collect::<Vec<_>>(),
            "max_deviation_std_errs": max_dev,
        },
        "physical": physical,
    });
    let mut out = serde_json::to_string_pretty(&report).expect("serializable");
    out.push('\n');
    write_output(args.output.as_ref(), &out)?;

    if args.check_physical && !physical {
        return Err(CliError::Numeric(
            "input covariance violates the uncertainty relation".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// classical-sweep
// ---------------------------------------------------------------------------

fn run_classical(args: ClassicalArgs, config: &FileConfig) -> CliResult<()> {
    let file = config.classical_sweep.as_ref();
    let dims = require(
        args.dims.or_else(|| file.and_then(|f| f.dims.clone())),
        "--dims",
    )?;
    if dims.is_empty() {
        return Err(CliError::config("parameter ranges must be non-empty"));
    }
    let retained = args
        .retained
        .or(file.and_then(|f| f.retained))
        .unwrap_or(1);
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Csv);

    let rows = classical_sweep(&dims, retained)?;
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str("n,k,tv,tv_n_over_k\n");
            for r in &rows {
                writeln!(out, "{},{},{},{}", r.dimension, r.retained, r.tv, r.tv_scaled)
                    .expect("string write");
            }
        }
        OutputFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.dimension,
                        "k": r.retained,
                        "tv": r.tv,
                        "tv_n_over_k": r.tv_scaled,
                    })
                })
                .collect();
            out = serde_json::to_string_pretty(&items).expect("serializable");
            out.push('\n');
        }
    }
    write_output(args.output.as_ref(), &out)
}

// ---------------------------------------------------------------------------
// channel-check
// ---------------------------------------------------------------------------

fn run_channel(args: ChannelArgs, config: &FileConfig) -> CliResult<()> {
    let file = config.channel_check.as_ref();
    let transmission = args
        .transmission
        .or(file.and_then(|f| f.transmission))
        .unwrap_or(0.8);
    let noise_variance = args
        .noise_variance
        .or(file.and_then(|f| f.noise_variance))
        .unwrap_or(0.5);
    let modulation_variance = args
        .modulation_variance
        .or(file.and_then(|f| f.modulation_variance))
        .unwrap_or(4.0);
    let uses = args.uses.or(file.and_then(|f| f.uses)).unwrap_or(256);
    let runs = args.runs.or(file.and_then(|f| f.runs)).unwrap_or(20);
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);

    let model = ChannelModel::new(transmission, noise_variance, modulation_variance, uses)?;
    let mut out = String::from("seed,n,t,sigma2,t_hat,sigma2_hat,invariance_residual\n");
    for i in 0..runs {
        let row_seed = seed.wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(row_seed);
        let run = channel_check_run(&model, &mut rng)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row_seed,
            uses,
            transmission,
            noise_variance,
            run.estimate.transmission,
            run.estimate.noise_variance,
            run.invariance_residual,
        )
        .expect("string write");
    }
    write_output(args.output.as_ref(), &out)
}

// ---------------------------------------------------------------------------
// haar-sample
// ---------------------------------------------------------------------------

fn run_haar(args: HaarArgs, config: &FileConfig) -> CliResult<()> {
    let file = config.haar_sample.as_ref();
    let modes = args.modes.or(file.and_then(|f| f.modes)).unwrap_or(1);
    if modes == 0 {
        return Err(CliError::config("modes must be positive"));
    }
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = haar_symplectic_orthogonal(modes, &mut rng);
    let mut out = s.to_json();
    out.push('\n');
    write_output(args.output.as_ref(), &out)
}
