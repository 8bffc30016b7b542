use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "nrc",
    version,
    about = "Numerical ranges of composition operators with finite-order elliptic symbols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the symbol's Moebius matrix, multiplier and order residual.
    Symbol(Common),
    /// Write the truncated composition matrix as JSON.
    Matrix(Common),
    /// Numeric support sweep as CSV `alpha,lambda,x,y`.
    Range(Common),
    /// Closed-form boundary samples, or the sextic coefficients.
    Closedform {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Numeric sweep against the closed form.
    Compare(Common),
    /// Sextic curve for a given constant `L` with its structural checks.
    Curve {
        #[command(flatten)]
        common: Common,
        #[arg(long = "L", value_name = "L")]
        l: f64,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Run a check suite and print its report.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Render boundary CSV files as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Numeric boundary CSV with `x` and `y` columns.
        #[arg(long)]
        input: PathBuf,
        /// Closed-form boundary CSV drawn on top.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Sextic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Observations,
    Identities,
    Order2,
    Order3,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Fixed point as two reals.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true, default_values_t = [0.5, 0.0])]
    pub a: Vec<f64>,
    /// Order p of the symbol.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Multiplier index: the symbol rotates by e^{2 pi i k/p} about a.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Truncation order; defaults by |a|.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 720)]
    pub angles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Output file, written atomically; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
