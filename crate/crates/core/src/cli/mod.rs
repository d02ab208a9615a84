//! Command-line front end for the `mpsh` binary.
//!
//! Every subcommand writes its report under `--out` and exits with
//! 0 on success, 2 when a check or certificate fails, 3 on bad input and
//! 4 on numerical failure.

pub mod commands;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::mps::{Caps, EvalOptions, LocalObservable, MpsChain};
use crate::models::{depolarizing_model, ghz_model, random_gauge_chain, DepolarizingParams, Layout};
use crate::{tolerance, Error, Result};

pub use commands::{Check, ConvergeRun, ConvergeSource};
pub use crate::channel::ConvergenceRow;
pub use report::{Report, ReportRecord, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Ghz,
    Depolarizing,
    Random,
}

#[derive(Debug, Parser)]
#[command(name = "mpsh", version, about = "Heisenberg-picture matrix product state toolkit")]
pub struct Cli {
    /// Agreement and consistency tolerance.
    #[arg(long, global = true, env = "MPSH_TOL", default_value_t = tolerance::DEFAULT_TOL)]
    pub tol: f64,
    /// Cap on brute-force amplitudes and observable entries.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub cap: usize,
    /// Directory for report files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Output format; defaults to JSON for reports and CSV for traces.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GHZ chain: closed form, projective limit and brute force side by side.
    Ghz {
        #[arg(long, default_value_t = 3)]
        sites: usize,
        /// JSON file with one observable or an array of them.
        #[arg(long)]
        observables: Option<PathBuf>,
    },
    /// Depolarizing chain: kappa, theta, fixed point, phi_1 against phi,
    /// projectivity verdict and convergence trace.
    Depolarizing {
        #[arg(long)]
        p: f64,
        #[arg(long = "n-max", default_value_t = 50)]
        n_max: usize,
    },
    /// Random gauge-fixed chain, exported as JSON and checked against oracles.
    Random {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "D", default_value_t = 2)]
        bond: usize,
        /// Number of independent sites; omit for a translation-invariant chain.
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify a chain file: gauge, consistency and spectral classification.
    Verify {
        chain: PathBuf,
        /// Checks to run (repeatable); defaults to gauge and consistency.
        #[arg(long = "check", value_enum)]
        checks: Vec<Check>,
    },
    /// Convergence trace of the transfer channel against its mixing bound.
    Converge {
        #[arg(long, value_enum, default_value = "depolarizing")]
        model: Model,
        /// Depolarizing parameter; repeat or comma-separate for a sweep.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        p: Vec<f64>,
        /// Translation-invariant chain file used instead of `--model`.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long = "n-max", default_value_t = 50)]
        n_max: usize,
    },
    /// Projectivity probe comparing phi_{n+1} with phi_n.
    Probe {
        #[arg(long, value_enum, default_value = "ghz")]
        model: Model,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "D", default_value_t = 2)]
        bond: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long = "n-max", default_value_t = 3)]
        n_max: usize,
    },
}

/// Exit code for an error that escaped a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoErgodicityCertificate(_)
        | Error::NotErgodic(_)
        | Error::NotMixing(_)
        | Error::NotProjective(_)
        | Error::NotTracePreserving(_) => EXIT_VALIDATION,
        Error::Json(_)
        | Error::Io(_)
        | Error::ParameterOutOfRange { .. }
        | Error::InvalidChain(_)
        | Error::InvalidObservable(_)
        | Error::InvalidDensity(_)
        | Error::DimensionMismatch { .. }
        | Error::NotSquare { .. }
        | Error::NotHermitian(_)
        | Error::EmptyFamily
        | Error::EmptySearchGrid
        | Error::ClosedFormMismatch(_)
        | Error::CapExceeded { .. } => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_chain(path: &Path) -> Result<MpsChain> {
    MpsChain::from_json(&read(path)?)
}

fn write_report(report: &Report, out: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => report.write_json(&out.join(format!("{}.json", report.command))),
        Format::Csv => report.write_csv(&out.join(format!("{}.csv", report.command))),
    }
}

fn write_trace(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(report::csv_error)?;
    for row in rows {
        w.serialize(row).map_err(report::csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn run_command(cli: &Cli, opts: &EvalOptions) -> Result<i32> {
    let out = &cli.out;
    std::fs::create_dir_all(out)?;
    let report_format = cli.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::Ghz { sites, observables } => {
            let labelled: Vec<(String, LocalObservable)> = match observables {
                Some(path) => commands::parse_observables(&read(path)?)?
                    .into_iter()
                    .enumerate()
                    .map(|(k, x)| (format!("observable_{k}"), x))
                    .collect(),
                None => Vec::new(),
            };
            let report = commands::cmd_ghz(*sites, &labelled, opts)?;
            write_report(&report, out, report_format)?;
            Ok(report.exit_code())
        }
        Command::Depolarizing { p, n_max } => {
            let output = commands::cmd_depolarizing(*p, *n_max, opts)?;
            write_report(&output.report, out, report_format)?;
            if !output.trace.is_empty() {
                write_trace(&output.trace, &out.join("depolarizing_convergence.csv"))?;
            }
            Ok(output.report.exit_code())
        }
        Command::Random { d, bond, sites, seed } => {
            let (report, chain) = commands::cmd_random(*d, *bond, *sites, *seed, opts)?;
            std::fs::write(out.join("random_chain.json"), chain.to_json()? + "\n")?;
            write_report(&report, out, report_format)?;
            Ok(report.exit_code())
        }
        Command::Verify { chain, checks } => {
            let checks = if checks.is_empty() {
                vec![Check::Gauge, Check::Consistency]
            } else {
                checks.clone()
            };
            let report = commands::cmd_verify(&read(chain)?, &checks, opts)?;
            write_report(&report, out, report_format)?;
            Ok(report.exit_code())
        }
        Command::Converge { model, p, chain, n_max } => {
            let source = match (chain, model) {
                (Some(path), _) => ConvergeSource::Chain(read_chain(path)?),
                (None, Model::Depolarizing) => ConvergeSource::Depolarizing(p.clone()),
                (None, Model::Ghz) => ConvergeSource::Chain(ghz_model().chain),
                (None, Model::Random) => {
                    return Err(Error::InvalidChain(
                        "converge on a random chain needs --chain (see `mpsh random`)".into(),
                    ))
                }
            };
            let runs = commands::cmd_converge(&source, *n_max)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv if runs.len() == 1 => write_trace(&runs[0].rows, &out.join("converge.csv"))?,
                Format::Csv => {
                    for run in &runs {
                        write_trace(&run.rows, &out.join(format!("converge_{}.csv", run.label)))?;
                    }
                }
                Format::Json => {
                    let value: Vec<_> = runs
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "label": r.label,
                                "theta": r.theta,
                                "kappa_trace": r.kappa.kappa_trace,
                                "exactness": r.kappa.exactness,
                                "rows": r.rows,
                            })
                        })
                        .collect();
                    std::fs::write(
                        out.join("converge.json"),
                        serde_json::to_string_pretty(&serde_json::json!({ "runs": value }))? + "\n",
                    )?;
                }
            }
            let violated = runs.iter().flat_map(|r| &r.rows).any(|row| row.tv_distance > row.bound + opts.tol);
            Ok(if violated { EXIT_VALIDATION } else { EXIT_OK })
        }
        Command::Probe { model, p, d, bond, seed, chain, n_max } => {
            let chain = match (chain, model) {
                (Some(path), _) => read_chain(path)?,
                (None, Model::Ghz) => ghz_model().chain,
                (None, Model::Depolarizing) => depolarizing_model(DepolarizingParams::new(*p)?).chain,
                (None, Model::Random) => random_gauge_chain(*d, *bond, Layout::TranslationInvariant, *seed)?,
            };
            let report = commands::cmd_probe(&chain, *n_max, opts)?;
            write_report(&report, out, report_format)?;
            Ok(report.exit_code())
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Ghz { .. } => "ghz",
        Command::Depolarizing { .. } => "depolarizing",
        Command::Random { .. } => "random",
        Command::Verify { .. } => "verify",
        Command::Converge { .. } => "converge",
        Command::Probe { .. } => "probe",
    }
}

/// Runs a parsed command line and returns the process exit code. Errors are
/// printed to stderr and, when the output directory is usable, written to
/// `error.json`.
pub fn run(cli: Cli) -> i32 {
    if !tolerance::set_default_tol(cli.tol) {
        eprintln!("error: --tol must be positive and finite, got {}", cli.tol);
        return EXIT_INPUT;
    }
    if cli.cap == 0 {
        eprintln!("error: --cap must be positive");
        return EXIT_INPUT;
    }
    let opts = EvalOptions {
        caps: Caps::uniform(cli.cap),
        tol: cli.tol,
    };
    match run_command(&cli, &opts) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            let record = serde_json::json!({
                "command": command_name(&cli.command),
                "status": "error",
                "exit_code": code,
                "message": e.to_string(),
            });
            if let Ok(text) = serde_json::to_string_pretty(&record) {
                let _ = std::fs::write(cli.out.join("error.json"), text + "\n");
            }
            code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
