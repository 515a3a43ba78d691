mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Device parameters, interaction catalogue and squeezing dynamics of a
/// dc-SQUID coupled to two nanomechanical resonators.
#[derive(Debug, Parser)]
#[command(name = "sqnamr", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON device configuration (SI units); the built-in preset when omitted
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// write the artifact into this directory instead of stdout
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// subcommand-specific tolerance (RWA width in rad/s, oracle gate, ...)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// recorded in the manifest; no subcommand draws random numbers
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Comparison {
    Steady,
    Ideal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived parameters and feasibility numbers
    Params,
    /// Potential surface U(φ, Φ_X)/E_J
    Potential {
        #[arg(long, default_value_t = 161)]
        phi_points: usize,
        #[arg(long, default_value_t = 41)]
        flux_points: usize,
        /// override I_b as a fraction of I_c
        #[arg(long)]
        bias_ratio: Option<f64>,
    },
    /// Interaction terms and their rotating frequencies
    Catalog,
    /// Lossless squeezing of the vacuum
    Ideal {
        #[arg(long, allow_hyphen_values = true)]
        gamma_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma_max: Option<f64>,
        /// end of the time grid (s); defaults to 1/ξ
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Damped steady state at one parameter point
    Steady {
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        kappa_l: Option<f64>,
        #[arg(long)]
        kappa_r: Option<f64>,
    },
    /// Steady-state variance over a κ_L/ξ × κ_R/ξ grid
    Sweep {
        #[arg(long, default_value_t = 2.05)]
        min: f64,
        #[arg(long, default_value_t = 20.0)]
        max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Truncated Fock-space check of the analytic results
    Oracle {
        #[arg(long, value_enum, default_value_t = Comparison::Steady)]
        compare: Comparison,
        /// Fock levels per resonator
        #[arg(long)]
        levels: Option<usize>,
        /// coupling in units of the smaller damping rate
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        kappa_l: Option<f64>,
        #[arg(long)]
        kappa_r: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
        gamma: f64,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SQNAMR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("SQNAMR_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("SQNAMR_THREADS must be a positive integer, got 0".to_string());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
