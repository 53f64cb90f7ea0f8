//! Command-line front end. Each subcommand returns its output documents in
//! memory; `main` decides where they go.

mod commands;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::subshifts::{catalog, SubshiftSystem, SystemConfig};

pub use commands::execute;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cantorspec", version, about = "Lyapunov exponents and spectra over substitution and Sturmian subshifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Built-in system label
    #[arg(long, conflicts_with = "config")]
    pub system: Option<String>,
    /// JSON system configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file, or directory for commands emitting several files
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record elapsed wall time in the metadata (output is then no longer reproducible byte for byte)
    #[arg(long)]
    pub wall_time: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the canonical window of a system
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        length: usize,
    },
    /// Lyapunov profile gamma_N(E) with the uniformity spread
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short = 'N', default_value_t = 10_000)]
        n: usize,
        /// Factor length for the spread column
        #[arg(long, default_value_t = 64)]
        spread_n: usize,
        /// Window multiplier for the spread column
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Finite-section, trace and Lyapunov-zero-set spectra with comparisons
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short = 'N', default_value_t = 10_000)]
        n: usize,
        /// Zero-set threshold; defaults to max(0.02, 4 ln N / N)
        #[arg(long)]
        epsilon: Option<f64>,
        /// Finite-section size
        #[arg(long, default_value_t = 1024)]
        length: usize,
        /// Approximant depth for the trace method; defaults to the first approximant at least as long as the finite section
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        interior_filter: bool,
    },
    /// Zero-set measure and gap count across word lengths
    Measure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// Word lengths, coarsest first (repeatable)
        #[arg(short = 'N', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Repetitivity, positive-weight and uniformity tables
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        /// Window length for the weight table
        #[arg(long, default_value_t = 100_000)]
        length: usize,
        /// Longest test word for the weight table
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Factor lengths for the uniformity table (repeatable)
        #[arg(short = 'N', default_values_t = [64, 256, 1024])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Compare two spectrum JSON files on the same grid
    Compare {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Generate { common, .. }
            | Command::Lyapunov { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Measure { common, .. }
            | Command::Diagnose { common, .. }
            | Command::Compare { common, .. } => common,
        }
    }
}

/// One output document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

pub(crate) fn load_system(common: &Common) -> Result<SubshiftSystem> {
    match (&common.system, &common.config) {
        (Some(name), None) => catalog(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            SystemConfig::from_json(&text)?.build()
        }
        (None, None) => Err(Error::InvalidArgument(
            "one of --system or --config is required".into(),
        )),
        (Some(_), Some(_)) => Err(Error::InvalidArgument(
            "--system and --config are mutually exclusive".into(),
        )),
    }
}

pub(crate) fn resolve_grid(args: &GridArgs, system: &SubshiftSystem) -> Result<EnergyGrid> {
    let default = EnergyGrid::default_for(system.potential());
    EnergyGrid::new(
        args.emin.unwrap_or(default.e_min()),
        args.emax.unwrap_or(default.e_max()),
        args.points.unwrap_or(default.points()),
    )
}

/// Writes the documents: a single one to `--out` (or stdout), several into
/// the `--out` directory (or stdout, each preceded by a `## name` line).
pub fn write_outputs(files: &[OutputFile], out: Option<&Path>) -> Result<()> {
    use std::io::Write;
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if files.len() == 1 {
                lock.write_all(files[0].contents.as_bytes())?;
            } else {
                for f in files {
                    writeln!(lock, "## {}", f.name)?;
                    lock.write_all(f.contents.as_bytes())?;
                }
            }
        }
        Some(path) if files.len() == 1 && !path.is_dir() => {
            std::fs::write(path, &files[0].contents)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            for f in files {
                let p = dir.join(&f.name);
                std::fs::write(&p, &f.contents)
                    .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command on a pool of `--threads` workers and
/// writes the outputs. Returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let common = cli.command.common().clone();
    let result = (|| -> Result<()> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = common.threads {
            if t == 0 {
                return Err(Error::InvalidArgument("--threads must be >= 1".into()));
            }
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        let files = pool.install(|| execute(&cli.command))?;
        write_outputs(&files, common.out.as_deref())
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
