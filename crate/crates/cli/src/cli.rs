use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Failure, Output};
use crate::config::Config;
use crate::error::CliError;
use crate::report::Engine;

#[derive(Debug, Parser)]
#[command(
    name = "qdeform",
    version,
    about = "Checks deformed Heisenberg algebra identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with thresholds and defaults (falls back to $QDEFORM_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one identity and report a verdict.
    Verify(VerifyArgs),
    /// Tabulate a check over a grid.
    Scan(ScanArgs),
    /// Print a truncated series in canonical form.
    Expand(ExpandArgs),
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    /// Truncation degree in (mu, nu).
    #[arg(long)]
    pub degree: Option<u32>,
    /// Basis size N.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Projection size M < N.
    #[arg(long)]
    pub interior: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Clock-shift level k, 1 <= k < N.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    /// Comma-separated basis sizes.
    #[arg(long)]
    pub dims: Option<String>,
    /// Contraction path: q-to-1, hbar-to-0 or omega-to-0.
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub interior: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Index range `a..b` (inclusive) or `n` for `0..n`.
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "eq8-rhs")]
    CentralRhs,
    #[value(name = "eq9")]
    FirstOrder,
    Prefactor,
    #[value(name = "P")]
    P,
    #[value(name = "X")]
    X,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::CentralRhs => "eq8-rhs",
            Target::FirstOrder => "eq9",
            Target::Prefactor => "prefactor",
            Target::P => "P",
            Target::X => "X",
        }
    }
}

/// Runs the command, then renders and writes its output.
/// Returns the exit status: 0 pass, 1 fail, 2 error or usage.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = std::panic::catch_unwind(|| execute(&cli));
    match outcome {
        Ok(Ok(output)) => match emit(&cli, &output) {
            Ok(()) => output.exit_code(),
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Ok(Err((e, report))) => {
            eprintln!("error: {e}");
            if let Some(report) = report {
                let _ = emit(&cli, &Output::Report(*report));
            }
            2
        }
        Err(_) => {
            eprintln!("error: internal failure");
            2
        }
    }
}

/// Loads configuration and dispatches. Errors carry an error-verdict report
/// when the engine is known.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let config = Config::load(cli.config.as_deref()).map_err(|e| (e, None))?;
    match &cli.command {
        Command::Verify(a) => commands::verify(a, &config),
        Command::Scan(a) => commands::scan(a, &config),
        Command::Expand(a) => commands::expand(a, &config).map_err(|e| (e, None)),
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<(), CliError> {
    let text = output.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                })
        }
    }
}
