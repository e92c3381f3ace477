//! `corelens` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 file or parse error, 3 analysis
//! or rendering error. Human-readable output goes to stdout, errors to
//! stderr.

mod commands;
mod error;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "corelens", version, about = "Inspect, compare and visualize NRDF reactor files")]
pub struct Cli {
    /// Directory for outputs given as relative paths and for analysis
    /// artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Print progress and timings to stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the node tree of an NRDF file.
    Dump {
        file: PathBuf,
        /// Include every array element.
        #[arg(long)]
        full: bool,
    },
    /// Summarize reactors: types, sizes, features, times and axial levels.
    Info { file: PathBuf },
    /// Build an NRDF file from another format.
    Convert {
        #[command(subcommand)]
        format: ConvertFormat,
    },
    /// Percent difference of normalized pin data against a reference.
    Diff {
        input: PathBuf,
        reference: PathBuf,
        #[arg(long)]
        feature: String,
        /// Comma-separated pin labels; all data-bearing pins when omitted.
        #[arg(long, value_delimiter = ',')]
        pins: Vec<String>,
        /// Write the difference series as an SVG plot.
        #[arg(long, value_name = "SVG")]
        plot: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        #[command(flatten)]
        select: Select,
    },
    /// Cluster pins by their axial profiles with k-means.
    Cluster {
        file: PathBuf,
        #[arg(long)]
        feature: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = corelens::analysis::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        #[command(flatten)]
        select: Select,
    },
    /// Render a core, assembly or rod view as SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        view: View,
        #[arg(short, long, value_name = "SVG")]
        output: PathBuf,
        /// Data feature; selects the data view for assemblies and adds the
        /// axial overlay for rods.
        #[arg(long)]
        feature: Option<String>,
        /// Axial level, 1-based.
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Norm::SelectedLevel)]
        norm: Norm,
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        /// Pin label for the rod view.
        #[arg(long)]
        pin: Option<String>,
        /// Height of the rod cross-section in cm; mid-height by default.
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,
        #[command(flatten)]
        select: Select,
    },
    /// Write a synthetic sample reactor.
    GenSample {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(short, long, value_name = "NRDF")]
        output: PathBuf,
    },
    /// Time writing and reading a large synthetic core.
    Bench {
        #[arg(long, default_value_t = 50_000)]
        pins: usize,
        #[arg(long, default_value_t = 50)]
        levels: usize,
    },
    /// Serve files over the local JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConvertFormat {
    /// Pin data from CSV onto a skeleton reactor's layout.
    Csv {
        csv: PathBuf,
        #[arg(long, value_name = "NRDF")]
        reactor_spec: PathBuf,
        #[arg(short, long, value_name = "NRDF")]
        output: PathBuf,
    },
}

/// Which reactor and assembly a command works on.
#[derive(Debug, Clone, Args)]
pub struct Select {
    /// Reactor name; required when a file holds several.
    #[arg(long)]
    pub reactor: Option<String>,
    /// Core cell label such as B2; the first placed fuel assembly by default.
    #[arg(long)]
    pub assembly: Option<String>,
    /// Assembly type grid; with none, the first type present at the cell.
    #[arg(long = "type", value_name = "TYPE")]
    pub assembly_type: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    Core,
    Assembly,
    Rod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    SelectedLevel,
    WholeAssembly,
    AllAssemblies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "3a")]
    Pwr3a,
    Sfr7,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// `path` under `--out-dir` when relative and an output directory is set.
pub(crate) fn output_path(cli: &Cli, path: &Path) -> PathBuf {
    match &cli.out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
