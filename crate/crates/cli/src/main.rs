//! `stenzel`: verification suites, trajectories, surveys and plot-ready
//! tables for invariant instantons on the Stenzel manifold.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stenzel_spin7::ivp::SolveOptions;

use grid::Grid;

#[derive(Parser, Debug)]
#[command(name = "stenzel", version, about = "Invariant Spin(7) instantons on T*S^4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV (or instead of the verify table).
    #[arg(long, global = true)]
    json: bool,
}

/// Integration settings shared by `solve`, `survey` and `critical`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Numerics {
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    /// Taylor order of the bootstrap series.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[arg(long = "t-switch", default_value_t = 1e-3)]
    pub t_switch: f64,
}

impl Numerics {
    pub fn options(&self) -> SolveOptions {
        SolveOptions { horizon: self.horizon, order: self.order, t_switch: self.t_switch, ..SolveOptions::default() }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Run the identity suite and print one line per identity.
    Verify {
        /// Mutation hook: reverse the sign of the so(3) bracket.
        #[arg(long, hide = true)]
        flip_bracket_sign: bool,
    },
    /// Profiles and metric coefficients on a radius grid, or the blowup threshold curve.
    Geometry {
        /// Radius grid `lo:hi:n` (or `t` grid with --threshold).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Emit the threshold curve 𝓡(t) instead of the geometry table.
        #[arg(long)]
        threshold: bool,
    },
    /// Integrate one trajectory from the singular orbit.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        a0: f64,
        /// Output times `lo:hi:n`; defaults to multiples of 0.1 up to the horizon.
        #[arg(long)]
        grid: Option<Grid>,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Classify every initial slope of an `a0` grid.
    Survey {
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Bisect for the critical slope separating global solutions from blowup.
    Critical {
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Tabulate the explicit `b_ν` family.
    Family {
        /// Single ν values; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        nu: Vec<f64>,
        /// ν grid `lo:hi:n`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Time grid `lo:hi:n`.
        #[arg(long = "t-grid", default_value = "0.1:5:50")]
        t_grid: Grid,
    },
}

/// A failure with its exit status.
#[derive(Debug)]
pub enum Failure {
    /// A verification check failed.
    Check(String),
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        use stenzel_spin7::Error as E;
        match e.downcast_ref::<E>() {
            Some(E::InvalidOptions(_) | E::Domain { .. } | E::InsufficientOrder { .. }) => Failure::Usage(e),
            _ => Failure::Numeric(e),
        }
    }
}

impl From<stenzel_spin7::Error> for Failure {
    fn from(e: stenzel_spin7::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SPIN7_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("SPIN7_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("SPIN7_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match commands::run(&cli.command, cli.out.as_deref(), cli.json) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
