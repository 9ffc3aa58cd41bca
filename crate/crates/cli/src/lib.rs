//! The `sq2lab` command line: every computation of the `sqrt2-collatz`
//! crate as text, CSV or JSON.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use output::{export_table, Cell, Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const THREADS_ENV: &str = "SQ2LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// A module error, by variant name and message.
    Domain { name: String, message: String },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain { .. } | CliError::Io(_) => EXIT_DOMAIN,
        }
    }

    pub fn domain<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        let debug = format!("{e:?}");
        let name = debug
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .next()
            .unwrap_or("Error")
            .to_owned();
        CliError::Domain {
            name,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Domain { name, message } => write!(f, "{name}: {message}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::domain(e)
            }
        }
    )*};
}

domain_errors!(
    sqrt2_collatz::MapError,
    sqrt2_collatz::predecessors::PredecessorError,
    sqrt2_collatz::parity::ParityError,
    sqrt2_collatz::duffing::DuffingError
);

#[derive(Debug, Parser)]
#[command(name = "sq2lab", version, about = "Orbits, cycles, predecessors and parity statistics of n -> floor(n*sqrt(2)^(+-1))")]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// File of `key = value` defaults (format, output, threads, quiet, cap, node_cap).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; overrides SQ2LAB_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// No progress messages on stderr.
    #[arg(long, short = 'q', global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: commands::Command,
}

/// Settings shared by all commands after merging flags, config and environment.
#[derive(Debug, Clone)]
pub struct Context {
    pub quiet: bool,
    pub cap: Option<u64>,
    pub node_cap: Option<usize>,
}

impl Context {
    pub fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("sq2lab: {}", msg.as_ref());
        }
    }
}

fn thread_count(cli: &Cli, file: &config::FileConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = cli.threads.or(file.threads) {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sq2lab: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => config::FileConfig::default(),
    };
    if let Some(n) = thread_count(&cli, &file)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = cli.format.or(file.format).unwrap_or_default();
    let output = cli.output.clone().or(file.output.clone());
    let ctx = Context {
        quiet: cli.quiet || file.quiet.unwrap_or(false),
        cap: file.cap,
        node_cap: file.node_cap,
    };
    commands::validate(&cli.command)?;
    let report = commands::dispatch(&cli.command, &ctx)?;
    let bytes = report.render(format);
    match output {
        Some(path) => std::fs::write(&path, bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub use commands::Command;
