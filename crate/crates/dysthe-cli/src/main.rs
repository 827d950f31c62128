//! `dysthe`: command-line front end for the verification experiments.
//!
//! One subcommand per experiment; every randomized run requires an explicit
//! seed and replays byte-identically at any `--threads` setting. Exit code 0
//! means the run's own check (when it has one) passed, 1 means the check
//! failed, 2 means the invocation or its files were unusable.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl From<dysthe_core::error::CoreError> for CliError {
    fn from(e: dysthe_core::error::CoreError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Divisor,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Projected,
    Unprojected,
    ProductX,
    ProductZ,
}

#[derive(Parser)]
#[command(
    name = "dysthe",
    version,
    about = "verification experiments for a periodic dispersive model"
)]
struct Cli {
    /// TOML file whose keys mirror the subcommand's long flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Artifact format
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,

    /// Artifact path; stdout when omitted. Relative paths land in
    /// $DYSTHE_OUT_DIR when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Two-column plot-data CSV path
    #[arg(long, global = true)]
    plot: Option<PathBuf>,

    /// Worker threads for the inner sweeps; 1 is the reproducibility baseline
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count interaction pairs in one (n, j) bucket by either route
    #[command(allow_negative_numbers = true)]
    Resonance {
        /// Pair bandlimit
        #[arg(long = "N")]
        bandlimit: Option<i64>,
        /// Total mode of the bucket
        #[arg(long)]
        n: Option<i64>,
        /// Total frequency of the bucket
        #[arg(long)]
        j: Option<i64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Sixth-power space-time norm of evolved data against the Sobolev norm
    StrichartzL6 {
        #[arg(long)]
        seed: Option<u64>,
        /// Regularity margin on the data norm
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Bandlimit sweep
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<i64>>,
        /// Spectral decay exponent of the random data
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Higher even-power variant with the exponent-dependent Sobolev index
    StrichartzLr {
        #[arg(long)]
        seed: Option<u64>,
        /// Even integrability exponent, at least 6
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<i64>>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Fourth-power norm against the 1/3-weighted space
    L4 {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Bandlimit sweep (ignored when --spreads is given)
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<i64>>,
        /// Sweep modulation spreads at fixed bandlimit instead
        #[arg(long, value_delimiter = ',')]
        spreads: Option<Vec<i64>>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Modulation spread of the random fields
        #[arg(long)]
        spread: Option<i64>,
        /// Fixed bandlimit for the spread sweep
        #[arg(long)]
        bandlimit: Option<i64>,
    },
    /// Shell-pair product bound over a (j, k) sweep
    Dyadic {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        fields: Option<usize>,
        #[arg(long)]
        j_max: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        bandlimit: Option<i64>,
        /// Modes drawn per shell in each test field
        #[arg(long)]
        per_level: Option<usize>,
        /// Largest admissible lhs/bound ratio
        #[arg(long)]
        max_ratio: Option<f64>,
    },
    /// Bilinear product estimate in the weighted spaces
    #[command(allow_negative_numbers = true)]
    Bilinear {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<i64>>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        spread: Option<i64>,
    },
    /// Time-localized cubic estimate across window scales
    #[command(allow_negative_numbers = true)]
    Trilinear {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        bandlimit: Option<i64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        spread: Option<i64>,
    },
    /// Third iterate of the three-mode packet, with a quadrature cross-check
    #[command(allow_negative_numbers = true)]
    Picard {
        /// Packet height
        #[arg(long)]
        m: Option<i64>,
        /// Data regularity
        #[arg(long)]
        s: Option<f64>,
        /// Evaluation time
        #[arg(long)]
        t: Option<f64>,
        /// Gauss-Legendre node count for the cross-check
        #[arg(long)]
        quadrature: Option<usize>,
        /// Largest admissible exact-vs-quadrature relative gap
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Packet experiment: peak growth against the closed-form reference
    #[command(allow_negative_numbers = true)]
    Illposed {
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        s: Option<f64>,
        /// Evaluation time as a fraction of 1/m
        #[arg(long)]
        t_factor: Option<f64>,
        /// Sweep several heights and fit the growth exponent
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<i64>>,
        /// Largest admissible deviation from the closed form
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Damped time stepping with trajectory output
    Viscous {
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Galerkin cutoff for the cubic term
        #[arg(long)]
        cutoff: Option<i64>,
        /// Drop the nonlinear term entirely
        #[arg(long)]
        linear: bool,
        /// Seed for random data; a fixed three-mode packet when omitted
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        bandlimit: Option<i64>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Energy pairing on the two-parameter counterexample family
    #[command(allow_negative_numbers = true)]
    Energy {
        /// Slow mode
        #[arg(long)]
        n: Option<i64>,
        /// Fast mode
        #[arg(long)]
        f: Option<i64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool setup failed: {e}")))?;

    let cfg = FileConfig::load(cli.config.as_deref())?;
    let out = commands::dispatch(cli.command, &cfg, cli.format)?;

    output::write_artifact(cli.out.as_deref(), &out.artifact)?;
    if let Some(plot) = cli.plot.as_deref() {
        output::emit_plotdata(plot, out.plot_labels.0, out.plot_labels.1, &out.plot)?;
    }
    Ok(out.exit)
}
