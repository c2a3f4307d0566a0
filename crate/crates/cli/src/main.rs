mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Word problem, lcm calculus, local deltas and census for quadratic
/// divisibility monoids.
#[derive(Debug, Parser)]
#[command(name = "divmon", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Presentation file (text or JSON).
    #[arg(short, long, global = true, value_name = "FILE")]
    pub presentation: Option<PathBuf>,

    /// Presentation given inline; `;` separates lines.
    #[arg(long, global = true, value_name = "TEXT", conflicts_with = "presentation")]
    pub inline: Option<String>,

    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "dot")]
    pub json: bool,

    /// Emit Graphviz DOT where a lattice is produced.
    #[arg(long, global = true)]
    pub dot: bool,

    /// Skip validation and use the enumeration engine.
    #[arg(long, global = true)]
    pub unchecked: bool,

    /// Maximum congruence class size.
    #[arg(long, global = true, value_name = "WORDS")]
    pub budget_class: Option<usize>,

    /// Wall-clock budget for the census.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub budget_time: Option<u64>,

    /// Census worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Seed for property sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a presentation defines a divisibility monoid.
    Validate {
        /// Presentation file; alternative to `--presentation`.
        file: Option<PathBuf>,
    },
    /// Canonical form of a word.
    Nf { word: String },
    /// Whether two words represent the same element.
    Eq { a: String, b: String },
    /// Product of words.
    Mul {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Right lcm, or `none`.
    Lcm { a: String, b: String },
    /// Left gcd.
    Gcd { a: String, b: String },
    /// Residue `a\b`, or `none`.
    Residue { a: String, b: String },
    /// Left (or right) divisors of an element.
    Divisors {
        word: String,
        #[arg(long)]
        right: bool,
    },
    /// Divisor lattice of an element.
    Lattice { word: String },
    /// Local delta of an element, or of every generator.
    Delta { word: Option<String> },
    /// Minimal generating set of the quasi-center.
    Quasicenter,
    /// Garside detection and minimal Garside element.
    Garside,
    /// Enumerate and classify presentations of a rank.
    Census {
        rank: usize,
        /// Write each entry's presentation and simple-element lattice here.
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
    },
    /// Whether a lattice given as JSON is a hypercube.
    Hypercube { file: PathBuf },
    /// Run the sampled property suite.
    Check {
        /// Number of random products added to the sample pool.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
