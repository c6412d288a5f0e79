use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde_json::{Map, Value};

use chsh_meter::{build, DensityMatrix, MeasurementSettings, StateSpec};
use chsh_meter_cli::error::{CliError, Result, EXIT_OK};
use chsh_meter_cli::input::{family_spec, StateFile};
use chsh_meter_cli::render::{self, Format};
use chsh_meter_cli::simulate::{simulate, SettingsSource};
use chsh_meter_cli::sweep::{sweep, SweepFamily};
use chsh_meter_cli::verify::{self, verify};
use chsh_meter_cli::{analyze, AnalyzeOptions, THREADS_ENV};

/// CHSH maxima, entanglement degree and measurement geometry of two-qubit states.
#[derive(Debug, Parser)]
#[command(name = "chsh-meter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze one state.
    Analyze(AnalyzeArgs),
    /// Tabulate a one-parameter family.
    Sweep(SweepArgs),
    /// Cross-check analytic results against the optimizer on random states.
    Verify(VerifyArgs),
    /// Estimate the CHSH value from simulated measurement shots.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct StateArgs {
    /// JSON state file: {"family": ..., "params": {...}} or {"matrix": [[[re, im], ...], ...]}.
    #[arg(long, visible_alias = "matrix-file", value_name = "PATH", conflicts_with = "family")]
    file: Option<PathBuf>,
    /// bell, bell_psi_plus, ..., pure_01_10, pure_00_11, werner, product, random_mixed.
    #[arg(long)]
    family: Option<String>,
    /// Bell state for `--family bell`: psi_plus, psi_minus, phi_plus, phi_minus.
    #[arg(long)]
    which: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k1: Option<f64>,
    /// Defaults to √(1 − k1²).
    #[arg(long, allow_hyphen_values = true)]
    k2: Option<f64>,
    /// Bloch vector of particle a for `product`, as x,y,z.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u: Option<Vec<f64>>,
    /// Bloch vector of particle b for `product`, as x,y,z.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<f64>>,
    /// Seed for `random_mixed`.
    #[arg(long)]
    state_seed: Option<u64>,
    /// Number of mixed pure states for `random_mixed`.
    #[arg(long)]
    size: Option<u64>,
}

impl StateArgs {
    fn resolve(&self) -> Result<(StateSpec, DensityMatrix)> {
        let spec = match (&self.file, &self.family) {
            (Some(path), _) => StateFile::read(path)?.to_spec()?,
            (None, Some(family)) => family_spec(family, &self.params())?,
            (None, None) => return Err(CliError::input("give a state with --file/--matrix-file or --family")),
        };
        let rho = build(&spec)?;
        Ok((spec, rho))
    }

    fn params(&self) -> Map<String, Value> {
        let mut p = Map::new();
        if let Some(w) = &self.which {
            p.insert("which".into(), w.clone().into());
        }
        for (key, value) in [("alpha", self.alpha), ("k1", self.k1), ("k2", self.k2)] {
            if let Some(x) = value {
                p.insert(key.into(), x.into());
            }
        }
        for (key, value) in [("u", &self.u), ("v", &self.v)] {
            if let Some(x) = value {
                p.insert(key.into(), x.clone().into());
            }
        }
        if let Some(s) = self.state_seed {
            p.insert("seed".into(), s.into());
        }
        if let Some(s) = self.size {
            p.insert("size".into(), s.into());
        }
        p
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format for stdout and, unless the extension says otherwise, for --output.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Also write the report to this file (.json and .csv select their format).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Cross-check the maxima with the numerical optimizer.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Also estimate F at the optimal settings with this many shots per term.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// werner, pure_01_10 or pure_00_11.
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    step: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = verify::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measure at the analytic F-maximizing settings.
    #[arg(long, conflicts_with_all = ["n", "n_prime", "m", "m_prime"])]
    optimal_f: bool,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    n: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    n_prime: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m_prime: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

impl SimulateArgs {
    fn source(&self) -> Result<SettingsSource> {
        if self.optimal_f {
            return Ok(SettingsSource::OptimalF);
        }
        let get = |name: &str, v: &Option<Vec<f64>>| -> Result<Vector3<f64>> {
            match v.as_deref() {
                Some([x, y, z]) => Ok(Vector3::new(*x, *y, *z)),
                Some(_) => Err(CliError::input(format!("--{name}: expected x,y,z"))),
                None => Err(CliError::input(format!(
                    "--{name} is required unless --optimal-f is given"
                ))),
            }
        };
        let s = MeasurementSettings::new(
            get("n", &self.n)?,
            get("n-prime", &self.n_prime)?,
            get("m", &self.m)?,
            get("m-prime", &self.m_prime)?,
        )?;
        Ok(SettingsSource::Explicit(s))
    }
}

fn emit(text: &str, out: &OutputArgs, file_text: impl FnOnce(Format) -> Result<String>) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    // A closed pipe is not an error worth reporting.
    let _ = stdout.write_all(text.as_bytes());
    let _ = stdout.flush();
    if let Some(path) = &out.output {
        write_file(path, &file_text(Format::for_path(path, out.format))?)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("{THREADS_ENV}={raw}: expected a positive integer")))?;
    // Fails only if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    configure_threads()?;
    match cli.command {
        Command::Analyze(a) => {
            let (spec, rho) = a.state.resolve()?;
            let doc = analyze(
                &spec,
                &rho,
                &AnalyzeOptions {
                    seed: a.seed,
                    oracle_restarts: a.oracle.then_some(a.restarts),
                    shots: a.shots,
                },
            );
            emit(&render::analysis(&doc, a.out.format)?, &a.out, |f| render::analysis(&doc, f))?;
        }
        Command::Sweep(s) => {
            let family = SweepFamily::parse(&s.family)?;
            let rows = sweep(family, s.from, s.to, s.step)?;
            let name = family.parameter_name();
            emit(&render::sweep(&rows, name, s.out.format)?, &s.out, |f| render::sweep(&rows, name, f))?;
        }
        Command::Verify(v) => {
            if v.count == 0 {
                return Err(CliError::input("--count must be at least 1"));
            }
            if v.restarts == 0 {
                return Err(CliError::input("--restarts must be at least 1"));
            }
            let summary = verify(v.count, v.seed, v.tolerance, v.restarts);
            emit(&render::verify(&summary, v.out.format)?, &v.out, |f| render::verify(&summary, f))?;
            if !summary.passed() {
                return Err(CliError::VerificationFailed(format!(
                    "{} check(s) exceeded tolerance {:e}",
                    summary.failures.len(),
                    v.tolerance
                )));
            }
        }
        Command::Simulate(s) => {
            let source = s.source()?;
            let (spec, rho) = s.state.resolve()?;
            let report = simulate(&spec, &rho, &source, s.shots, s.seed)?;
            emit(&render::simulation(&report, s.out.format)?, &s.out, |f| {
                render::simulation(&report, f)
            })?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("chsh-meter: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
