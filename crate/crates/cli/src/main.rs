use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bwshift::presets::load_preset;
use bwshift::{ExperimentConfig, Schedule, Window};

mod commands;

/// Exit code for configuration and usage errors.
const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical failures.
const EXIT_NUMERIC: u8 = 3;

/// Bilateral weighted backward shifts on weighted spaces of analytic
/// functions on an annulus.
#[derive(Parser, Debug)]
#[command(name = "bwshift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Write the output to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the index window, e.g. -64:64
    #[arg(long, global = true, value_name = "MIN:MAX", allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<Window>,

    /// Largest power examined by the dynamical checks
    #[arg(long, global = true, value_name = "N")]
    horizon: Option<usize>,

    /// Sample the `for all n` conditions at n = 1..=N
    #[arg(long, global = true, value_name = "N")]
    nmax: Option<i64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Experiment config (JSON)
    #[arg(value_name = "CONFIG", required_unless_present = "preset")]
    config: Option<PathBuf>,

    /// Use a bundled preset instead of a config file
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every dynamical check and print the verdict document
    Analyze {
        #[command(flatten)]
        source: Source,
    },
    /// Follow the orbit of a vector under powers of the shift
    Orbit {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: OrbitOpts,
    },
    /// Dump the truncated matrix of a power and the decomposition of the shift
    Matrix {
        #[command(flatten)]
        source: Source,
        /// Power of the shift to assemble
        #[arg(long, value_name = "NU")]
        power: Option<i64>,
        /// Number of strictly lower diagonals in the decomposition
        #[arg(long = "i-max", value_name = "N")]
        i_max: Option<usize>,
    },
    /// Norms of Laurent monomials z^nu
    Norms {
        #[command(flatten)]
        source: Source,
        /// Exponent range, e.g. -4:4
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true, value_parser = parse_range)]
        range: Option<(i64, i64)>,
    },
    /// Check the standing assumptions and estimate the annulus radii
    Validate {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args, Debug, Clone)]
pub struct OrbitOpts {
    /// Start vector as inline JSON {"basis", "entries"} or @FILE
    #[arg(long, value_name = "JSON|@FILE")]
    vector: Option<String>,
    /// Largest power to visit
    #[arg(long, value_name = "N")]
    steps: Option<u64>,
    /// Which powers to visit
    #[arg(long, value_parser = parse_schedule, value_name = "all|powers_of_two")]
    schedule: Option<Schedule>,
    /// Extra candidate limit points as an inline JSON list or @FILE
    #[arg(long, value_name = "JSON|@FILE")]
    candidates: Option<String>,
    /// Distance below which a record counts as a hit
    #[arg(long, value_name = "EPS")]
    tolerance: Option<f64>,
}

fn split_pair(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let (lo, hi) = split_pair(s)?;
    Window::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = split_pair(s)?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_schedule(s: &str) -> std::result::Result<Schedule, String> {
    s.parse().map_err(|e: bwshift::Error| e.to_string())
}

/// Bad input that is not a library error: unreadable files, malformed flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Reads inline text or `@path`.
pub fn inline_or_file(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => {
            fs::read_to_string(path).map_err(|e| usage(format!("cannot read `{path}`: {e}")))
        }
        None => Ok(arg.to_string()),
    }
}

fn load_config(source: &Source, global: &GlobalOpts) -> Result<ExperimentConfig> {
    let mut cfg = match (&source.preset, &source.config) {
        (Some(name), _) => load_preset(name)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read `{}`: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)
                .with_context(|| format!("in `{}`", path.display()))?
        }
        (None, None) => return Err(usage("no config given")),
    };
    if let Some(w) = global.window {
        cfg.shift.params.window = w;
    }
    if let Some(h) = global.horizon {
        cfg.analysis.horizon = h;
    }
    if let Some(n) = global.nmax {
        cfg.analysis.n_max = n;
    }
    Ok(cfg)
}

fn emit(global: &GlobalOpts, text: &str) -> Result<()> {
    match &global.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let global = cli.global;
    if let Some(n) = global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("--threads: {e}")))?;
    }
    let text = match &cli.command {
        Command::Analyze { source } => {
            commands::analyze(&load_config(source, &global)?, global.format)?
        }
        Command::Orbit { source, opts } => {
            commands::orbit(&load_config(source, &global)?, opts, global.format)?
        }
        Command::Matrix {
            source,
            power,
            i_max,
        } => commands::matrix(
            &load_config(source, &global)?,
            *power,
            *i_max,
            global.format,
        )?,
        Command::Norms { source, range } => {
            commands::norms(&load_config(source, &global)?, *range, global.format)?
        }
        Command::Validate { source } => {
            commands::validate(&load_config(source, &global)?, global.format)?
        }
    };
    emit(&global, &text)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<bwshift::Error>() {
            return if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERIC
            };
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_CONFIG;
        }
    }
    EXIT_NUMERIC
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
