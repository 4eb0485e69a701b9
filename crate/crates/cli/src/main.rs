use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relbell::audit::{audit, load_distribution, Verdict, DEFAULT_ALARM_THRESHOLD};
use relbell::bell::{chsh_value, fig1, fig2, fig3, ChshSettings, FIG2_DEFAULT_BETAS};
use relbell::dirac::{build_context, context_reports, random_suite};
use relbell::observables::{eprb_closed_form, eprb_oracle};
use relbell::{BeamVelocity, Direction, Error, Vec3};

mod selftest;

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_FALSE_ALARM: u8 = 3;

/// Relativistic EPR-Bohm correlations, CHSH scans and Dirac operator checks.
#[derive(Parser, Debug)]
#[command(name = "relbell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form and matrix-oracle singlet correlation.
    Correlate {
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        a: [f64; 3],
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        b: [f64; 3],
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        beta: [f64; 3],
        #[command(flatten)]
        output: Output,
    },
    /// CHSH value at one beam velocity.
    Chsh {
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        beta: [f64; 3],
        /// a, a', b, b' as twelve comma-separated floats.
        #[arg(long, value_parser = parse_settings, allow_hyphen_values = true)]
        settings: Option<[f64; 12]>,
        #[command(flatten)]
        output: Output,
    },
    /// Orthogonal-setting correlation against the proper-time shift over β ∈ [0, 1].
    Fig1 {
        #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[command(flatten)]
        output: Output,
    },
    /// CHSH over beam directions (θ, φ) at fixed speeds.
    Fig2 {
        #[arg(long, default_value_t = 91, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        /// Speeds to scan, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        beta_mag: Vec<f64>,
        #[arg(long, value_parser = parse_settings, allow_hyphen_values = true)]
        settings: Option<[f64; 12]>,
        #[command(flatten)]
        output: Output,
    },
    /// CHSH over in-plane beam velocities (β, φ).
    Fig3 {
        #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[arg(long, value_parser = parse_settings, allow_hyphen_values = true)]
        settings: Option<[f64; 12]>,
        #[command(flatten)]
        output: Output,
    },
    /// Numerical checks of the Dirac spin operator identities.
    DiracCheck {
        /// Single momentum to check; random momenta are used when absent.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        p: Option<[f64; 3]>,
        #[arg(long, default_value_t = 1.0, requires = "p")]
        m: f64,
        /// Spin axis for the single-momentum check.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,1")]
        a: [f64; 3],
        #[arg(long, default_value_t = 100, conflicts_with = "p")]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Expected CHSH under a beam velocity distribution.
    CryptoAudit {
        /// CSV with header beta_x,beta_y,beta_z,weight.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALARM_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_parser = parse_settings, allow_hyphen_values = true)]
        settings: Option<[f64; 12]>,
        #[command(flatten)]
        output: Output,
    },
    /// Oracle-equivalence and Tsirelson-bound suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Compute(Error),
    Io(std::io::Error),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{}`: {e}", t.trim()))
        })
        .collect()
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_floats(s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected 3 comma-separated values, got {}", v.len()))
}

fn parse_settings(s: &str) -> Result<[f64; 12], String> {
    let v = parse_floats(s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected 12 comma-separated values, got {}", v.len()))
}

fn direction(name: &str, v: [f64; 3]) -> Result<Direction, Error> {
    let d = Direction::normalize(Vec3::from(v))?;
    let norm = Vec3::from(v).norm();
    if (norm - 1.0).abs() > 1e-12 {
        eprintln!("warning: --{name} has length {norm}, normalized");
    }
    Ok(d)
}

fn settings(raw: Option<[f64; 12]>) -> Result<ChshSettings, Error> {
    let Some(v) = raw else {
        return Ok(ChshSettings::standard());
    };
    let d = |name, k: usize| direction(name, [v[3 * k], v[3 * k + 1], v[3 * k + 2]]);
    Ok(ChshSettings::new(d("settings a", 0)?, d("settings a'", 1)?, d("settings b", 2)?, d("settings b'", 3)?))
}

fn velocity(v: [f64; 3]) -> Result<BeamVelocity, Error> {
    BeamVelocity::new(Vec3::from(v))
}

/// Writes to `path` through a temporary file in the same directory, or to
/// standard output.
fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(content.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Correlate { a, b, beta, output } => {
            let (a, b, beta) = (direction("a", a)?, direction("b", b)?, velocity(beta)?);
            let closed = eprb_closed_form(&a, &b, &beta)?;
            let oracle = eprb_oracle(&a, &b, &beta)?;
            let text = format!(
                "closed_form: {closed}\noracle: {oracle}\ndifference: {}\n",
                closed - oracle
            );
            emit(output.out.as_deref(), &text)?;
        }
        Command::Chsh { beta, settings: raw, output } => {
            let c = chsh_value(&settings(raw)?, &velocity(beta)?)?;
            emit(output.out.as_deref(), &format!("{c}\n"))?;
        }
        Command::Fig1 { grid, output } => {
            emit(output.out.as_deref(), &fig1(grid as usize)?.to_csv_string())?;
        }
        Command::Fig2 { grid, beta_mag, settings: raw, output } => {
            let mags = if beta_mag.is_empty() {
                FIG2_DEFAULT_BETAS.to_vec()
            } else {
                beta_mag
            };
            let table = fig2(&settings(raw)?, grid as usize, &mags)?;
            emit(output.out.as_deref(), &table.to_csv_string())?;
        }
        Command::Fig3 { grid, settings: raw, output } => {
            let table = fig3(&settings(raw)?, grid as usize)?;
            emit(output.out.as_deref(), &table.to_csv_string())?;
        }
        Command::DiracCheck { p, m, a, trials, seed, output } => {
            let reports = match p {
                Some(p) => context_reports(&build_context(Vec3::from(p), m)?, &direction("a", a)?),
                None => random_suite(trials, seed)?,
            };
            emit(output.out.as_deref(), &json(&reports))?;
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.pass)
                .map(|r| r.check.clone())
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Checks(failed));
            }
        }
        Command::CryptoAudit { dist, threshold, settings: raw, output } => {
            let d = load_distribution(File::open(&dist)?)?;
            let report = audit(&d, &settings(raw)?, threshold)?;
            let mut text = report.to_json();
            text.push('\n');
            emit(output.out.as_deref(), &text)?;
            if report.verdict == Verdict::FalseAlarmRisk {
                return Ok(ExitCode::from(EXIT_FALSE_ALARM));
            }
        }
        Command::Selftest { seed, output } => {
            let reports = selftest::run(seed)?;
            emit(output.out.as_deref(), &json(&reports))?;
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.pass)
                .map(|r| r.check.clone())
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Checks(failed));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Compute(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(EXIT_COMPUTATION)
        }
        Err(Failure::Io(e)) => {
            eprintln!("IoError: {e}");
            ExitCode::from(EXIT_COMPUTATION)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("CheckFailed: {}", names.join(", "));
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}
