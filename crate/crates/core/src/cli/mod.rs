//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 propagation
//! error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{CompareMode, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ftpe",
    version,
    about = "Frequency-modulated two-photon excitation of a quantum-dot biexciton"
)]
pub struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Assert that no random numbers are used (always true; recorded in metadata).
    #[arg(long, global = true)]
    pub seedless: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time evolution of the occupations.
    Simulate,
    /// Effective fields and Bloch trajectories of the stroboscopic model.
    Fields,
    /// Two-parameter map of the final biexciton occupation.
    Sweep,
    /// Full propagation against a reference prediction.
    Compare {
        /// Overrides `compare.mode` of the configuration.
        #[arg(long, value_enum)]
        mode: Option<CompareMode>,
    },
    /// Pulse area of the first occupation maximum.
    Optimize,
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Propagation(crate::Error),
    Io(String),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Propagation(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Propagation(e) => write!(f, "propagation error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    if let Command::Config = cli.command {
        print!("{}", cfg.to_toml());
        return Ok(Vec::new());
    }
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let ctx = commands::Context {
        cfg: &cfg,
        out: &cli.out,
        workers,
        seedless: cli.seedless,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Fields => commands::fields(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Compare { mode } => commands::compare(&ctx, *mode),
        Command::Optimize => commands::optimize(&ctx),
        Command::Config => unreachable!("handled above"),
    })
}

/// Parses `args` and runs the selected command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("ftpe: {e}");
            e.exit_code()
        }
    }
}
