//! Command-line front door: argument parsing, configuration echo, dispatch
//! to the core modules and artifact emission.

mod commands;
mod io;
mod reproduce;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::PathBuf;

use stabfar_core::{Error, GroupKind};

/// Exit code for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a failed acceptance check.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "stabfar", version, about = "Stabilizer MUBs and frame potentials toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Globals {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Hilbert space dimension.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Group kind: single or bipartite (defaults from the dimension).
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// JSON config file whose fields override the flags.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stabilizer MUB inspection.
    Mub {
        #[command(subcommand)]
        cmd: MubCmd,
    },
    /// Frame potential evaluation.
    Potentials {
        #[command(subcommand)]
        cmd: PotentialsCmd,
    },
    /// Special state catalogs and searches.
    States {
        #[command(subcommand)]
        cmd: StatesCmd,
    },
    /// Sampling, averages and optimization.
    Explore {
        #[command(subcommand)]
        cmd: ExploreCmd,
    },
    /// Higher-level reproductions.
    Analysis {
        #[command(subcommand)]
        cmd: AnalysisCmd,
    },
    /// Full pipeline for one figure or table, with PASS/FAIL checks.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand, Debug)]
pub enum MubCmd {
    /// Emit the bases of one stabilizer MUB as JSON.
    Dump {
        /// Flower index in canonical order.
        #[arg(long, default_value_t = 0)]
        flower: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PotentialsCmd {
    /// Evaluate both potentials and the inequality for a state file.
    Eval {
        /// JSON file holding the state as a list of [re, im] pairs.
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum StatesCmd {
    /// Emit the named states of a dimension with evaluated potentials.
    Catalog {
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
    /// Search for MUB-balanced states and emit vectors + defects as CSV.
    Balanced {
        #[arg(long, default_value_t = 2000)]
        restarts: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExploreCmd {
    /// Scatter dataset of (f_mus, f_sic) pairs.
    Scatter {
        /// Total points when no explicit mixture is given.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Mixture spec: comma-separated label:count[:eps] entries, labels in
        /// {uniform, stabilizer, sic, alltop, balanced, pair}.
        #[arg(long)]
        mix: Option<String>,
    },
    /// Run an optimization problem described by a JSON file.
    Optimize {
        /// Problem description (see ProblemSpec).
        #[arg(long)]
        problem: PathBuf,
    },
    /// Monte Carlo Fubini-Study average of a potential.
    FsAverage {
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// fsic or fmus.
        #[arg(long)]
        functional: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum AnalysisCmd {
    /// Stereographic f_SIC map of the real Zauner subspace.
    ZaunerMap {
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = 300)]
        restarts: usize,
    },
    /// Orthogonality graph of states read from a CSV file.
    Graph {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Closed-form table verification for one prime dimension.
    Table1 {
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
    /// Classification of the 15 petal eigenbases at d=4.
    ClassifyD4,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Figure number, 2 through 7.
    #[arg(long)]
    pub figure: Option<u32>,
    /// Table number, 1 or 2.
    #[arg(long)]
    pub table: Option<u32>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Sample count for scatter figures.
    #[arg(long, default_value_t = 60_000)]
    pub n: usize,
}

/// Optional JSON overrides for the global flags.
#[derive(Debug, Default, Deserialize)]
pub struct SpecOverrides {
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub kind: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn parse_kind(globals: &Globals, dim: usize) -> Result<GroupKind, Error> {
    match globals.kind.as_deref() {
        None => Ok(if dim == 4 { GroupKind::Bipartite } else { GroupKind::Single }),
        Some("single") => Ok(GroupKind::Single),
        Some("bipartite") => Ok(GroupKind::Bipartite),
        Some(other) => Err(Error::Config(format!("unknown group kind `{other}`"))),
    }
}

fn apply_spec_file(globals: &mut Globals) -> Result<(), Error> {
    let Some(path) = &globals.spec else { return Ok(()) };
    let text = io::read_to_string(path)?;
    let overrides: SpecOverrides =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad spec file: {e}")))?;
    if let Some(seed) = overrides.seed {
        globals.seed = seed;
    }
    if let Some(dim) = overrides.dim {
        globals.dim = Some(dim);
    }
    if let Some(kind) = overrides.kind {
        globals.kind = Some(kind);
    }
    if let Some(out) = overrides.out {
        globals.out = Some(out);
    }
    Ok(())
}

/// Parses and runs one invocation; returns the process exit code.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    let mut globals = cli.globals.clone();
    if let Err(e) = apply_spec_file(&mut globals) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    match commands::run(&globals, &cli.command) {
        Ok(code) => code,
        Err(e @ Error::Config(_))
        | Err(e @ Error::UnsupportedDimension { .. })
        | Err(e @ Error::UnknownAnchorState(_)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CHECK_FAILED
        }
    }
}
