//! `cantorfold` command-line front end.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use cantorfold::error::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "cantorfold",
    version,
    about = "Cantor set, horseshoe and fold-family analyses"
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Not echoed: results do not depend on it.
    #[serde(skip)]
    #[arg(long, global = true, default_value_t = 0, env = "CANTORFOLD_THREADS")]
    pub threads: usize,
    /// Directory for report files; the JSON report goes to stdout otherwise.
    #[serde(skip)]
    #[arg(long, global = true, env = "CANTORFOLD_OUT")]
    pub out: Option<PathBuf>,
    /// Seed recorded in the report; every current analysis is deterministic.
    #[arg(long, global = true, default_value_t = 0, env = "CANTORFOLD_SEED")]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// One-dimensional Cantor set analyses.
    #[command(subcommand)]
    Cantor(CantorCmd),
    /// Parameter scans over pairs of Cantor sets.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Affine horseshoes and the toy fold family.
    #[command(subcommand)]
    Horseshoe(HorseshoeCmd),
    /// Parameter exclusion and covering estimates.
    #[command(subcommand)]
    Py(PyCmd),
    /// Built-in and file models.
    #[command(subcommand)]
    Model(ModelCmd),
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArg {
    /// Built-in model (`ternary`, `middle_alpha:1/5`, ...) or JSON file.
    #[arg(long, env = "CANTORFOLD_MODEL")]
    pub model: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// One or two models; a single model is paired with itself.
    #[arg(long, num_args = 1..=2, required = true, env = "CANTORFOLD_MODEL", value_delimiter = ',')]
    pub model: Vec<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CantorCmd {
    /// Hausdorff dimension bracket.
    Dim {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 1e-6, env = "CANTORFOLD_TOL")]
        tol: f64,
    },
    /// Thickness bracket.
    Thickness {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 8, env = "CANTORFOLD_DEPTH")]
        depth: usize,
    },
    /// Bounded gaps present at a depth.
    Gaps {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 4, env = "CANTORFOLD_DEPTH")]
        depth: usize,
    },
    /// Cover of the arithmetic difference `K ⊖ λK′`.
    Diff {
        #[command(flatten)]
        #[serde(flatten)]
        models: PairArgs,
        #[arg(long, default_value = "1", env = "CANTORFOLD_LAMBDA")]
        lambda: String,
        #[arg(long, default_value_t = 8, env = "CANTORFOLD_DEPTH")]
        depth: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanCmd {
    /// Difference-set measure over a grid of `λ`.
    Marstrand {
        #[command(flatten)]
        #[serde(flatten)]
        models: PairArgs,
        #[arg(long, default_value_t = 10, env = "CANTORFOLD_DEPTH")]
        depth: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda_min: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Threshold for the reported fraction of `λ` with positive measure.
        #[arg(long, default_value_t = 0.1)]
        floor: f64,
    },
    /// Density of near-tangency translation parameters in `(0, t]`.
    TangencyDensity {
        #[command(flatten)]
        #[serde(flatten)]
        models: PairArgs,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-4, 1e-5])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorseshoeCmd {
    /// Stable and unstable dimensions with a box-counting cross-check.
    Dims {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 1e-8, env = "CANTORFOLD_TOL")]
        tol: f64,
        /// Cylinder depth of the box-counting estimate.
        #[arg(long, default_value_t = 8, env = "CANTORFOLD_DEPTH")]
        depth: usize,
    },
    /// Cone-field check on a sample grid.
    Conefield {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Required expansion.
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        /// Include the fold region of a toy family at parameter `t`.
        #[arg(long)]
        with_fold: bool,
        #[arg(long, default_value_t = 0.1)]
        t: f64,
    },
    /// Sink search over a grid of `μ` for the fold map or the limit map.
    SinkScan {
        /// `limit` or a toy family (`toy_het[:ρ:b]`).
        #[arg(long, default_value = "toy_het", env = "CANTORFOLD_MODEL")]
        model: String,
        #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
        mu_min: f64,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        mu_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, default_value_t = 8)]
        max_period: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 8)]
        seeds: usize,
        /// Half-width of the search box around the origin.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct SchemeArgs {
    #[arg(long, default_value = "1/1000", env = "CANTORFOLD_EPS0")]
    pub eps0: String,
    #[arg(long, default_value_t = 0.05, env = "CANTORFOLD_ETA")]
    pub eta: f64,
    #[arg(long, default_value_t = 0.2, env = "CANTORFOLD_TAU")]
    pub tau: f64,
    /// Regularity exponent; defaults to the smallest multiple of 0.05 with
    /// `β(1−η)/(1+τ) ≥ 1.05`.
    #[arg(long, env = "CANTORFOLD_BETA")]
    pub beta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct IntervalArgs {
    #[arg(long, default_value = "1/10")]
    pub t_lo: String,
    #[arg(long, default_value = "1001/10000")]
    pub t_hi: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PyCmd {
    /// Saturated catalog of affine-like elements over a parameter interval.
    Catalog {
        #[arg(long, default_value = "toy_het", env = "CANTORFOLD_MODEL")]
        model: String,
        #[command(flatten)]
        #[serde(flatten)]
        interval: IntervalArgs,
        #[command(flatten)]
        #[serde(flatten)]
        scheme: SchemeArgs,
        /// Largest element length `n`.
        #[arg(long, default_value_t = 6, env = "CANTORFOLD_DEPTH")]
        depth: usize,
        #[arg(long, default_value_t = 0.0)]
        w_min: f64,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Breadth-first parameter exclusion.
    Exclude {
        #[arg(long, default_value = "toy_het", env = "CANTORFOLD_MODEL")]
        model: String,
        #[command(flatten)]
        #[serde(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 2)]
        generations: u32,
        #[arg(long, default_value_t = 8, env = "CANTORFOLD_DEPTH")]
        depth: usize,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Admissible chains with fitted link constants and covering bounds.
    Chains {
        #[arg(long, default_value = "toy_het", env = "CANTORFOLD_MODEL")]
        model: String,
        #[command(flatten)]
        #[serde(flatten)]
        interval: IntervalArgs,
        #[command(flatten)]
        #[serde(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 6, env = "CANTORFOLD_DEPTH")]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Covering dimension `d`.
        #[arg(long, default_value_t = 1.9)]
        d: f64,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Dimension bound for the exceptional set.
    MpyBound {
        #[arg(long)]
        ds: f64,
        #[arg(long)]
        du: f64,
        #[command(flatten)]
        #[serde(flatten)]
        scheme: SchemeArgs,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelCmd {
    /// Built-in models.
    List,
    /// Parses and validates a model.
    Validate {
        #[command(flatten)]
        #[serde(flatten)]
        model: ModelArg,
    },
}

impl Command {
    /// `group sub`, e.g. `cantor dim`.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cantor(c) => match c {
                CantorCmd::Dim { .. } => "cantor dim",
                CantorCmd::Thickness { .. } => "cantor thickness",
                CantorCmd::Gaps { .. } => "cantor gaps",
                CantorCmd::Diff { .. } => "cantor diff",
            },
            Command::Scan(c) => match c {
                ScanCmd::Marstrand { .. } => "scan marstrand",
                ScanCmd::TangencyDensity { .. } => "scan tangency-density",
            },
            Command::Horseshoe(c) => match c {
                HorseshoeCmd::Dims { .. } => "horseshoe dims",
                HorseshoeCmd::Conefield { .. } => "horseshoe conefield",
                HorseshoeCmd::SinkScan { .. } => "horseshoe sink-scan",
            },
            Command::Py(c) => match c {
                PyCmd::Catalog { .. } => "py catalog",
                PyCmd::Exclude { .. } => "py exclude",
                PyCmd::Chains { .. } => "py chains",
                PyCmd::MpyBound { .. } => "py mpy-bound",
            },
            Command::Model(c) => match c {
                ModelCmd::List => "model list",
                ModelCmd::Validate { .. } => "model validate",
            },
        }
    }
}

/// Validation problems exit with 2, resolution and budget limits with 3.
fn exit_code(e: &Error) -> u8 {
    if e.is_resource_limit() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let command = cli.command.name();
    let config = serde_json::to_value(&cli).expect("config serializes");
    let out = match pool.install(|| commands::run(&cli.command)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cli.out {
        Some(dir) => match out.write(dir, command, &config) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: cannot write reports to {}: {e}", dir.display());
                return ExitCode::from(2);
            }
        },
        None => print!("{}", out.document(command, &config)),
    }
    eprintln!("{}", out.summary);
    ExitCode::SUCCESS
}
