//! The `catlens` command: validate, build, compose and enumerate finite
//! categories, functors, cofunctors and lenses stored as JSON files.

pub mod commands;
pub mod format;
mod output;

use std::path::PathBuf;

use catlens::enumerate::DEFAULT_MAX_CANDIDATES;
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_STRUCTURAL: u8 = 2;
pub const EXIT_GUARD: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "catlens", version, about = "Finite categories, cofunctors and lenses, checked exhaustively")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the main output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap on candidate assignments tried by searches.
    #[arg(long, global = true, env = "CATLENS_MAX_CANDIDATES", default_value_t = DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: u64,
    /// Seed for randomized checks; when set, `validate` also runs a sampled
    /// associativity pass on categories.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every law for the structure in a file.
    Validate { path: PathBuf },
    /// Construct a structure and emit it as a file.
    Build {
        #[command(subcommand)]
        what: Build,
    },
    /// Compose two structures, left first.
    Compose {
        #[arg(value_enum)]
        kind: ComposeKind,
        left: PathBuf,
        right: PathBuf,
    },
    /// Count (and optionally list) structures between two categories.
    Enumerate {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        kind: EnumerateKind,
        /// Include every structure found, in canonical order.
        #[arg(long)]
        list: bool,
    },
    /// Test a predicate on a functor or c-lens.
    Check {
        #[arg(value_enum)]
        predicate: Predicate,
        path: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Build {
    /// Codiscrete category on the given objects, or on 0..N for a single number.
    Codiscrete { objects: Vec<String> },
    /// Discrete category on the given objects, or on 0..N for a single number.
    Discrete { objects: Vec<String> },
    /// The total order 0 → 1 → … → N.
    Interval { n: usize },
    /// Arrow category of a category file.
    Arrow { category: PathBuf },
    /// Apex of the pullback of two functors with a common target.
    Pullback { left: PathBuf, right: PathBuf },
    /// Comma category F/B of a functor F: A → B.
    Comma { functor: PathBuf },
    /// Double category of commuting squares of a category.
    Squares { category: PathBuf },
    /// Category of anchored updates of a cofunctor.
    Lambda { cofunctor: PathBuf },
    /// Span representation of a cofunctor.
    Span { cofunctor: PathBuf },
    /// Triangle representation of a lens.
    Triangle { lens: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComposeKind {
    Functors,
    Cofunctors,
    Lenses,
    StateLenses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumerateKind {
    Lens,
    Cofunctor,
    Dopf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Predicate {
    /// Discrete opfibration.
    Dopf,
    /// Identity on objects.
    Ioo,
    /// Split opfibration given by the lifts of a c-lens.
    SplitOpfib,
}
