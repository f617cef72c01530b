//! `ahodge`: validate models, solve for harmonic spaces, compare them, check symbols.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_MODEL: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ahodge", version, about = "Exact harmonic forms on invariant almost-Hermitian 4-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check structure equations, metric and deck rules of a model.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20_240_611)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Harmonic space of one system in one bidegree.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        #[arg(long)]
        system: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact comparison of two harmonic spaces.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        /// Two systems, comma separated, e.g. `bc,delbar`.
        #[arg(long)]
        systems: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Principal-symbol invertibility of a Laplacian at seeded covectors.
    Symbol {
        #[command(flatten)]
        model: ModelArgs,
        /// One of d, del, delbar, bc, aeppli (or the lap_* names).
        #[arg(long)]
        laplacian: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lattice points on the circle of centre (δ, 0) and radius δ.
    Circle {
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lee form, Gauduchon defect and duality identities.
    Diagnostics {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Builtin name (kt, hyperelliptic, torus4) or path to a model file.
    #[arg(long)]
    pub model: String,
    /// Exact rational such as `1/2`; overrides the model file's value.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
}

#[derive(Args, Debug)]
pub struct SectorArgs {
    /// `p,q`; omit for the anti-self-dual system.
    #[arg(long)]
    pub bidegree: Option<String>,
    #[arg(long = "box", default_value_t = 4)]
    pub box_radius: u32,
    /// Defaults to the system's shift reach on the model.
    #[arg(long)]
    pub margin: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall-clock time in reports.
    #[arg(long)]
    pub timing: bool,
}

fn init_threads() {
    if let Some(n) = std::env::var("AHODGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool built earlier in the process wins; nothing to do then
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return ExitCode::from(code);
        }
    };
    init_threads();
    let result = match cli.command {
        Command::Validate { model, samples, seed, out } => commands::validate(&model, samples, seed, &out),
        Command::Solve { model, sector, system, out } => commands::solve(&model, &sector, &system, &out),
        Command::Compare { model, sector, systems, out } => commands::compare(&model, &sector, &systems, &out),
        Command::Symbol { model, laplacian, samples, seed, out } => commands::symbol(&model, &laplacian, samples, seed, &out),
        Command::Circle { delta, out } => commands::circle(&delta, &out),
        Command::Diagnostics { model, samples, seed, out } => commands::diagnostics(&model, samples, seed, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
