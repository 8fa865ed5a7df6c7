use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "explab", version, about = "Discretized expanding-polynomial laboratory")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Significant digits for floating-point output.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=17), global = true)]
    pub precision: u32,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "EXPLAB_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a polynomial in x, y is a special form or an expander.
    Classify {
        /// Polynomial in x, y
        poly: String,
    },
    /// The polynomial M_P whose vanishing characterizes special forms.
    Mp {
        /// Polynomial in x, y
        poly: String,
    },
    /// The bracket H_F for F = P(x, y) - P(xp, yp), or for a general F with --general.
    Hf {
        /// Polynomial in x, y (or in x, xp, y, yp with --general)
        poly: String,
        /// Read the argument as F(x, xp, y, yp).
        #[arg(long)]
        general: bool,
    },
    /// Blaschke curvature of the web (phi1, phi2, phi3) at a point.
    ///
    /// Maps are polynomials in x, y, `pin:a,b` (distance to (a, b)) or
    /// `line:theta` (projection onto the direction theta).
    Curvature {
        #[arg(long, default_value = "x")]
        phi1: String,
        #[arg(long, default_value = "y")]
        phi2: String,
        #[arg(long)]
        phi3: String,
        /// Point `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Covering number of a set at a coarser scale.
    Cover {
        #[command(flatten)]
        set: SetArgs,
        /// Coarse scale k' (defaults to the set's own scale).
        #[arg(long)]
        coarse: Option<u32>,
    },
    /// Non-concentration exponent of a set.
    Nonconc {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        kappa: f64,
        /// Target dimension (defaults to log2 |A| / k).
        #[arg(long)]
        target: Option<f64>,
    },
    /// Covering number of the image P(A, A).
    Image {
        /// Polynomial in x, y
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Energy (collision count) of P on A x A.
    Energy {
        /// Polynomial in x, y
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        set: SetArgs,
        /// Drop quadruples where |H_F| stays below this value.
        #[arg(long)]
        hf_min: Option<f64>,
    },
    /// Whitney decomposition of a region.
    Whitney {
        /// `square`, `empty` or `punctured:x,y`.
        #[arg(long, default_value = "square")]
        region: String,
        #[arg(long)]
        k_max: u32,
    },
    /// Band partition of the full grid for a list of functions.
    Bands {
        /// Function to track (repeatable); same syntax as curvature maps.
        #[arg(long = "f", required = true)]
        fs: Vec<String>,
        #[arg(long)]
        w: f64,
        #[arg(long)]
        k: u32,
        /// Print the cube decomposition instead of the summary (text format).
        #[arg(long)]
        decomposition: bool,
    },
    /// Extract a large product set from a planar set.
    Extract {
        /// File in the gridset2d text format.
        #[arg(long)]
        set_file: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
    },
    /// Run a builtin scenario or a scenario file.
    Scenario {
        /// Builtin name or path to a scenario file.
        name: String,
        /// Also write one CSV file per table into this directory.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
        /// Also write gnuplot two-column data files into this directory.
        #[arg(long)]
        gnuplot_dir: Option<PathBuf>,
        /// Exit with status 1 when an expectation fails.
        #[arg(long)]
        strict: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// List the builtin scenarios.
    ListScenarios,
}

/// A one-dimensional set: generated, or read from a gridset file.
#[derive(Args, Debug)]
pub struct SetArgs {
    /// Generator: ap, cantor or full.
    #[arg(long = "gen", value_enum, default_value_t = Generator::Ap)]
    pub generator: Generator,
    /// Scale k (ap and full).
    #[arg(long)]
    pub k: Option<u32>,
    /// Dimension of the progression (ap).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Extra spacing exponent (ap).
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Allowed digits, comma separated (cantor).
    #[arg(long)]
    pub pattern: Option<String>,
    /// Digit base, a power of two (cantor).
    #[arg(long)]
    pub base: Option<u64>,
    /// Number of digits (cantor).
    #[arg(long)]
    pub depth: Option<u32>,
    /// Read the set from a file in the gridset text format instead.
    #[arg(long)]
    pub set_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Ap,
    Cantor,
    Full,
}
