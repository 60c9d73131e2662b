//! `rgc`: a compiler from measurement patterns on a topological cluster
//! state to logical gates.
//!
//! Subcommands:
//!
//! * `build` — lattice spec → cluster diagram;
//! * `compile` — pattern → carve, measure, extract, regroup, recognise;
//!   prints a [`report::Report`];
//! * `verify` — diagram vs a library gate or a tensor file;
//! * `rewrite` — one rule application or full normalisation, with trace;
//! * `export-dot` — Graphviz rendering;
//! * `tensor` — dense tensor dump.
//!
//! Exit codes are shared by all subcommands: 0 success or equivalent,
//! 1 not equivalent or unrecognised, 2 input error, 3 resource or budget
//! limit.

pub mod commands;
pub mod dot;
pub mod error;
pub mod library;
pub mod recognize;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use redgreen::lattice::{Convention, DEFAULT_SITE_CAP};
use redgreen::rewrite::DEFAULT_BUDGET;
use redgreen::semantics::{DEFAULT_RANK_CAP, DEFAULT_TOLERANCE};

pub use commands::run;
pub use error::{CliError, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, EXIT_RESOURCE};

#[derive(Debug, Parser)]
#[command(name = "rgc", version, about = "Compile cluster-state measurement patterns to logical gates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    RedCentre,
    GreenCentre,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::RedCentre => Convention::RedCentre,
            ConventionArg::GreenCentre => Convention::GreenCentre,
        }
    }
}

/// Which measurement outcomes `compile` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutcomesArg {
    /// Whatever the pattern file says.
    Pattern,
    /// Every outcome +1.
    AllPlus,
    /// A parity-valid random assignment from `--seed` (default 0).
    Seed,
}

#[derive(Debug, Clone, Args)]
pub struct Numerics {
    /// Tolerance for tensor equivalence.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Largest intermediate tensor, in amplitudes.
    #[arg(long, default_value_t = DEFAULT_RANK_CAP)]
    pub rank_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the two-coloured cluster diagram of a lattice spec.
    Build {
        /// Lattice spec JSON: {"cells": [nx, ny, nz], "convention": ...}.
        spec: PathBuf,
        /// Output diagram file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[arg(long, default_value_t = DEFAULT_SITE_CAP)]
        site_cap: usize,
    },
    /// Compile a measurement pattern and recognise the logical gate.
    Compile {
        /// Pattern JSON file.
        pattern: PathBuf,
        #[arg(long, value_enum)]
        outcomes: Option<OutcomesArg>,
        /// Seed for random parity-valid outcomes.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        /// Rewrite step budget.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_SITE_CAP)]
        site_cap: usize,
        /// Write the normalisation trace here (also on budget failure).
        #[arg(long)]
        emit_trace: Option<PathBuf>,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the normal-form diagram here.
        #[arg(long)]
        normal: Option<PathBuf>,
        /// Write the regrouped logical diagram here.
        #[arg(long)]
        logical: Option<PathBuf>,
        /// Directory of extra gate files.
        #[arg(long)]
        library: Option<PathBuf>,
        /// Also compile this many consecutive seeds (from --seed, default 0)
        /// in parallel and report each.
        #[arg(long, default_value_t = 0)]
        sweep: u64,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Check a diagram against a library gate or a tensor file.
    Verify {
        diagram: PathBuf,
        /// Gate name (identity, Z_L, X_L, CZ, CNOT, ...) or tensor JSON path.
        #[arg(long)]
        expect: String,
        #[arg(long)]
        library: Option<PathBuf>,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Apply one rewrite rule or normalise a diagram.
    Rewrite {
        diagram: PathBuf,
        /// Rule name, e.g. spider-fuse, hh-cancel, color-change.
        #[arg(long)]
        rule: Option<String>,
        /// Anchor vertex ids (comma-separated); default: first match.
        #[arg(long, value_delimiter = ',')]
        anchor: Vec<usize>,
        /// Normalise (after the rule, if one is given).
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Render a diagram as Graphviz DOT.
    ExportDot {
        diagram: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a diagram to its dense tensor.
    Tensor {
        diagram: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RANK_CAP)]
        rank_cap: usize,
    },
}
