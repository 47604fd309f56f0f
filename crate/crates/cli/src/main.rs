use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tsallis_qc::coherence::{c_alpha, c_tilde_alpha, luders_c, luders_c_tilde};
use tsallis_qc::correlations::{isotropic_n, q_alpha, q_tilde_alpha, werner_n, Measure};
use tsallis_qc::entropies::{tsallis_relative, tsallis_relative_modified};
use tsallis_qc::io::{parse_matrix, parse_measurement, MatrixFile, StateFile};
use tsallis_qc::linalg::identity;
use tsallis_qc::oracle::{run_suite, Suite};
use tsallis_qc::states::{isotropic, werner, BipartiteState};
use tsallis_qc::{AlphaParam, Error, ExtendedReal, OptimizerOptions};

#[derive(Parser)]
#[command(name = "tsallis-qc", version, about = "Tsallis-divergence correlation and coherence measures")]
struct Cli {
    /// Worker threads (defaults to the number of available processors).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a state file.
    Compute(ComputeArgs),
    /// Closed-form sweep over a Werner or isotropic family, written as CSV.
    Sweep(SweepArgs),
    /// Run the verification suites and print JSON reports.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureCode {
    #[value(name = "D")]
    D,
    #[value(name = "Dm")]
    Dm,
    #[value(name = "Q")]
    Q,
    #[value(name = "Qt")]
    Qt,
    #[value(name = "C")]
    C,
    #[value(name = "Ct")]
    Ct,
    #[value(name = "CL")]
    Cl,
    #[value(name = "CLt")]
    Clt,
}

impl MeasureCode {
    fn code(self) -> &'static str {
        match self {
            MeasureCode::D => "D",
            MeasureCode::Dm => "Dm",
            MeasureCode::Q => "Q",
            MeasureCode::Qt => "Qt",
            MeasureCode::C => "C",
            MeasureCode::Ct => "Ct",
            MeasureCode::Cl => "CL",
            MeasureCode::Clt => "CLt",
        }
    }
}

#[derive(clap::Args)]
struct ComputeArgs {
    #[arg(long, value_enum)]
    measure: MeasureCode,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    state: PathBuf,
    /// Second state, for D and Dm.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Reference basis (columns) for C and Ct; computational basis if absent.
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Lüders measurement for CL and CLt.
    #[arg(long)]
    measurement: Option<PathBuf>,
    /// Override the subsystem dimensions of the state file.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Optimizer function tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the loaded state back out (round-trip check).
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Werner,
    Isotropic,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    x_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    x_to: f64,
    #[arg(long)]
    steps: usize,
    /// Output CSV path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Debug)]
enum Failure {
    Verification,
    Parse(String),
    Validation(String),
    Infinite,
    Mismatch(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Infinite => 4,
            Failure::Mismatch(_) => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::ParamOutOfRange(_) => Failure::Parse(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct Record {
    measure: &'static str,
    alpha: f64,
    value: ExtendedReal,
    converged: bool,
    restarts_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<MatrixFile>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path, dims: Option<&[usize]>) -> CliResult<BipartiteState> {
    let mut file = StateFile::from_json(&read(path)?)?;
    if let Some(&[a, b]) = dims {
        file.dim_a = a;
        file.dim_b = b;
    }
    Ok(file.to_state()?)
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str, measure: MeasureCode) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Failure::Parse(format!("--{flag} is required for measure {}", measure.code())))
}

fn compute(args: &ComputeArgs) -> CliResult<()> {
    let alpha = AlphaParam::new(args.alpha)?;
    let rho = load_state(&args.state, args.dims.as_deref())?;
    if let Some(path) = &args.dump_state {
        fs::write(path, StateFile::from_state(&rho).to_json())
            .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    }
    let mut opts = OptimizerOptions::with_seed(args.seed);
    if let Some(r) = args.restarts {
        opts.restarts = r;
    }
    if let Some(t) = args.tol {
        opts.f_tol = t;
    }

    let scalar = |value: ExtendedReal| Record {
        measure: args.measure.code(),
        alpha: args.alpha,
        value,
        converged: true,
        restarts_used: 0,
        basis: None,
    };
    let record = match args.measure {
        MeasureCode::D | MeasureCode::Dm => {
            let sigma = load_state(required(&args.sigma, "sigma", args.measure)?, None)?;
            let value = match args.measure {
                MeasureCode::D => tsallis_relative(rho.state(), sigma.state(), alpha)?,
                _ => tsallis_relative_modified(rho.state(), sigma.state(), alpha)?,
            };
            scalar(value)
        }
        MeasureCode::Q | MeasureCode::Qt => {
            let result = match args.measure {
                MeasureCode::Q => q_alpha(&rho, alpha, &opts)?,
                _ => q_tilde_alpha(&rho, alpha, &opts)?,
            };
            Record {
                measure: args.measure.code(),
                alpha: args.alpha,
                value: ExtendedReal::Finite(result.value),
                converged: result.converged,
                restarts_used: result.restarts_used,
                basis: Some(MatrixFile::from_matrix(&result.basis)),
            }
        }
        MeasureCode::C | MeasureCode::Ct => {
            let basis = match &args.basis {
                Some(path) => parse_matrix(&read(path)?)?,
                None => identity(rho.state().dim()),
            };
            let value = match args.measure {
                MeasureCode::C => c_alpha(rho.state(), &basis, alpha)?,
                _ => c_tilde_alpha(rho.state(), &basis, alpha)?,
            };
            scalar(ExtendedReal::Finite(value))
        }
        MeasureCode::Cl | MeasureCode::Clt => {
            let measurement = parse_measurement(&read(required(&args.measurement, "measurement", args.measure)?)?)?;
            let value = match args.measure {
                MeasureCode::Cl => luders_c(rho.state(), &measurement, alpha)?,
                _ => luders_c_tilde(rho.state(), &measurement, alpha)?,
            };
            scalar(ExtendedReal::Finite(value))
        }
    };
    println!("{}", serde_json::to_string(&record).expect("plain data serializes"));
    if record.value.is_finite() {
        Ok(())
    } else {
        Err(Failure::Infinite)
    }
}

/// 17 significant digits; negative zero prints as zero.
fn fmt17(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

fn sweep(args: &SweepArgs) -> CliResult<()> {
    let alpha = AlphaParam::new(args.alpha)?;
    if args.steps < 2 {
        return Err(Failure::Parse("--steps must be at least 2".into()));
    }
    if args.d < 2 {
        return Err(Failure::Parse("--d must be at least 2".into()));
    }
    let (lo, hi) = match args.family {
        Family::Werner => (-1.0, 1.0),
        Family::Isotropic => (0.0, 1.0),
    };
    for x in [args.x_from, args.x_to] {
        if !(lo..=hi).contains(&x) {
            return Err(Failure::Parse(format!("x = {x} outside the family domain [{lo}, {hi}]")));
        }
    }

    let opts = OptimizerOptions::with_seed(args.seed);
    let mut rows = Vec::with_capacity(args.steps);
    for k in 0..args.steps {
        let x = args.x_from + (args.x_to - args.x_from) * k as f64 / (args.steps - 1) as f64;
        let (n, state) = match args.family {
            Family::Werner => (werner_n(args.d, x, alpha)?, werner(args.d, x)),
            Family::Isotropic => (isotropic_n(args.d, x, alpha)?, isotropic(args.d, x)),
        };
        let q = Measure::Standard.from_n(n, alpha);
        if k % 10 == 0 {
            let numeric = q_alpha(&state?, alpha, &opts)?.value;
            if (numeric - q).abs() > 1e-8 {
                return Err(Failure::Mismatch(format!(
                    "row {k} (x = {x}): closed form {q} vs optimized {numeric}"
                )));
            }
        }
        rows.push([x, n, q, Measure::Modified.from_n(n, alpha)]);
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            fs::File::create(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let io_err = |e: csv::Error| Failure::Parse(e.to_string());
    writer.write_record(["x", "n", "q_alpha", "q_tilde_alpha"]).map_err(io_err)?;
    for row in rows {
        writer.write_record(row.map(fmt17)).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Failure::Parse(e.to_string()))?;
    Ok(())
}

fn verify(args: &VerifyArgs) -> CliResult<()> {
    let suite: Suite = args.suite.parse().map_err(Failure::Parse)?;
    let reports = run_suite(suite, args.seed, args.trials)?;
    for report in &reports {
        println!("{}", report.to_json());
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure thread pool: {e}");
        }
    }
    let outcome = match &cli.command {
        Command::Compute(args) => compute(args),
        Command::Sweep(args) => sweep(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Parse(msg) | Failure::Validation(msg) | Failure::Mismatch(msg) => {
                    log::error!("{msg}")
                }
                Failure::Verification => log::error!("verification failed"),
                Failure::Infinite => {}
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
