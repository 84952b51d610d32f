//! `zsphere`: command-line front end for the circular Z-curve projection.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use zsphere_core::catalog::{Grouping, DEFAULT_SPLIT_TOLERANCE, DEFAULT_TIGHT_TOLERANCE};

use cache::CatalogCache;

#[derive(Parser, Debug)]
#[command(name = "zsphere", version, about = "Circular projection of the Z-curve onto the D-sphere")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "ZSPHERE_THREADS", default_value_t = 0)]
    threads: usize,

    /// Directory for cached catalogs; caching is off when unset.
    #[arg(long, global = true, env = "ZSPHERE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// How codes are grouped into equal-radius subsets.
    #[arg(long, global = true, value_enum, default_value_t = GroupingMode::Exact)]
    grouping: GroupingMode,

    /// Gap above which sorted radii start a new subset (tolerance grouping).
    #[arg(long, global = true, default_value_t = DEFAULT_SPLIT_TOLERANCE)]
    tolerance_split: f64,

    /// Gaps in (tight, split] are rejected as ambiguous (tolerance grouping).
    #[arg(long, global = true, default_value_t = DEFAULT_TIGHT_TOLERANCE)]
    tolerance_tight: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupingMode {
    Exact,
    Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Curve {
    /// Dimension D.
    #[arg(long)]
    pub dim: u32,
    /// Scaling factor K.
    #[arg(long)]
    pub k: u32,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Pick {
    /// Select the subset whose radius is nearest to this value.
    #[arg(long, conflicts_with = "all")]
    pub radius: Option<f64>,
    /// Select the subset containing this code.
    #[arg(long, conflicts_with_all = ["all", "radius"])]
    pub member: Option<u64>,
    /// Every subset of the catalog.
    #[arg(long)]
    pub all: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Project one code and print its coordinates as JSON.
    Project {
        #[command(flatten)]
        curve: Curve,
        #[arg(long)]
        value: u64,
        /// Include the per-level BitDistance trace.
        #[arg(long)]
        trace: bool,
    },
    /// Emit `value,coord_0,…,radius` rows for every code.
    Cloud {
        #[command(flatten)]
        curve: Curve,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the equal-radius subsets of X^D_K.
    Subsets {
        #[command(flatten)]
        curve: Curve,
        /// Write the catalog as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print the number of subsets per size.
        #[arg(long)]
        histogram: bool,
        /// Check every subset sum and Σ|T|/2^D = Υ.
        #[arg(long)]
        verify: bool,
    },
    /// Map a code of X^D_S to its equivalent position in X^D_B.
    Phi {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long)]
        value: u64,
    },
    /// Map every subset of X^D_S and count images that are subsets of X^D_B.
    PhiVerify {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        /// Restrict the table to these subset sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// The coplanes through a code and their mirrors.
    Coplanes {
        #[command(flatten)]
        curve: Curve,
        #[arg(long)]
        value: u64,
    },
    /// Reflection-orbit decomposition and sum checks.
    Orthotopes {
        #[command(flatten)]
        curve: Curve,
        #[command(flatten)]
        pick: Pick,
    },
    /// Subset generators in grid form.
    Sg {
        #[command(flatten)]
        curve: Curve,
        #[command(flatten)]
        pick: Pick,
        /// Match each generator against the known generator catalog.
        #[arg(long)]
        check_appendix: bool,
    },
    /// Cayley graphs of the dictionaries of X^D_K.
    DictGraph {
        #[command(flatten)]
        curve: Curve,
        #[command(flatten)]
        pick: Pick,
        /// Include canonical slot assignments.
        #[arg(long)]
        classify: bool,
        /// Sweep X^D_1 … X^D_K and check isomorphism within each size.
        #[arg(long)]
        all_pairs: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Run every verifier for K = 1..K_max.
    VerifyAll {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        k_max: u32,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        markdown: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn grouping(cli: &Cli) -> Result<Grouping> {
    Ok(match cli.grouping {
        GroupingMode::Exact => Grouping::Exact,
        GroupingMode::Tolerance => Grouping::tolerance(cli.tolerance_split, cli.tolerance_tight)?,
    })
}

fn run(cli: Cli) -> Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    let cache = CatalogCache::new(cli.cache_dir.clone(), grouping(&cli)?);
    match cli.command {
        Command::Project { curve, value, trace } => commands::project(curve, value, trace),
        Command::Cloud { curve, out } => commands::cloud(curve, out.as_deref()),
        Command::Subsets { curve, json, histogram, verify } => {
            commands::subsets(&cache, curve, json.as_deref(), histogram, verify)
        }
        Command::Phi { dim, from, to, value } => commands::phi(dim, from, to, value),
        Command::PhiVerify { dim, from, to, sizes, format } => commands::phi_verify(&cache, dim, from, to, &sizes, format),
        Command::Coplanes { curve, value } => commands::coplanes(&cache, curve, value),
        Command::Orthotopes { curve, pick } => commands::orthotopes(&cache, curve, pick),
        Command::Sg { curve, pick, check_appendix } => commands::sg(&cache, curve, pick, check_appendix),
        Command::DictGraph { curve, pick, classify, all_pairs, format } => {
            if all_pairs && pick.any() {
                bail!("--all-pairs sweeps whole catalogs and takes no subset selection");
            }
            commands::dict_graph(&cache, curve, pick, classify, all_pairs, format)
        }
        Command::VerifyAll { dim, k_max, json, markdown, csv } => {
            commands::verify_all(cache.grouping(), dim, k_max, json.as_deref(), markdown.as_deref(), csv.as_deref())
        }
    }
}

impl Pick {
    pub fn any(&self) -> bool {
        self.all || self.radius.is_some() || self.member.is_some()
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
