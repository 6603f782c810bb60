//! Command-line front end. Every subcommand is a thin shell over one library
//! entry point: it builds an [`ExperimentConfig`], runs it, and writes the
//! module's artifacts plus a run manifest into the output directory.
//!
//! Determinism contract: identical config (including seed and stream count)
//! produces byte-identical data artifacts, regardless of the `--threads`
//! knob. Only the `wall_time` field of `manifest.json` varies between runs.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a resource cap was hit,
//! 4 a solver failed to converge (its residuals go to stderr).

mod config;
mod exec;

pub use config::{Command, ExperimentConfig, DEFAULT_OUT, DEFAULT_SEED, DEFAULT_STREAMS};
pub use exec::{config_hash, run, RunOutput};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::continuous::ContinuousError;
use crate::embed::EmbedError;
use crate::group::GroupError;
use crate::perimeter::PerimeterError;
use crate::poincare::PoincareError;
use crate::sdp::SdpError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Failures bucketed by exit code rather than by module.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or semantically invalid input; exits 2.
    #[error("{0}")]
    Invalid(String),
    /// A size or budget cap was exceeded; exits 3.
    #[error("{0}")]
    Cap(String),
    /// A numeric solver gave up; exits 4 and dumps residuals when available.
    #[error("{message}")]
    Solver {
        message: String,
        residual_dump: Option<String>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Solver { .. } => EXIT_SOLVER,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(err: GroupError) -> CliError {
        match err {
            GroupError::NodeBudget { .. } => CliError::Cap(err.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<PerimeterError> for CliError {
    fn from(err: PerimeterError) -> CliError {
        CliError::Invalid(err.to_string())
    }
}

impl From<PoincareError> for CliError {
    fn from(err: PoincareError) -> CliError {
        match err {
            PoincareError::Group(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(err: EmbedError) -> CliError {
        match err {
            EmbedError::TooManyPoints { .. } => CliError::Cap(err.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<SdpError> for CliError {
    fn from(err: SdpError) -> CliError {
        match err {
            SdpError::TooManyPoints { .. } => CliError::Cap(err.to_string()),
            SdpError::NonConvergence { ref residuals, .. } => CliError::Solver {
                message: err.to_string(),
                residual_dump: serde_json::to_string_pretty(residuals).ok(),
            },
            SdpError::Solver(_) | SdpError::Lp(_) => CliError::Solver {
                message: err.to_string(),
                residual_dump: None,
            },
            SdpError::Embed(inner) => inner.into(),
            SdpError::Group(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<ContinuousError> for CliError {
    fn from(err: ContinuousError) -> CliError {
        match err {
            ContinuousError::BudgetExhausted { .. } => CliError::Cap(err.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "heis",
    version,
    about = "Workbench for Heisenberg lattice geometry, vertical perimeter, \
             and sparsest-cut relaxations"
)]
struct Cli {
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Root seed for every sampled quantity.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sampling streams; part of the run identity.
    #[arg(long, global = true)]
    streams: Option<usize>,
    /// Worker-pool size; changes speed only, never output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Enumerate a word ball; exports `a,b,c,d,e,dist` rows.
    Ball {
        radius: u32,
        /// Lattice: h3 or h5.
        #[arg(long, default_value = "h5")]
        lattice: String,
        /// Search node budget.
        #[arg(long, default_value_t = 20_000_000)]
        budget: usize,
    },
    /// Perimeter report for one lattice set (a file of `a b c d e` lines,
    /// or ball:<r>, box:<a,b,c,d,e>, segment:<n>, random:<cells,seed>).
    Perimeter { source: String },
    /// Isoperimetry scan over the built-in corpus of sets.
    IsoScan,
    /// Vertical Poincare report for an embedding file
    /// (`a b c d e : v1 v2 ...` lines).
    Poincare {
        phi: String,
        /// Norm exponent on the right-hand side.
        #[arg(long, default_value_t = 4.0)]
        p: f64,
    },
    /// Compression-rate integral for a modulus
    /// (linear:D=.., power:eps=..,D=.., table:<path>).
    Criterion {
        omega: String,
        /// Upper scale, plain or as R=<value>.
        r: String,
        /// Lower integration cutoff as a fraction of R, in (0, 1).
        #[arg(long, default_value_t = 0.25)]
        cutoff: f64,
    },
    /// Exact least-distortion embedding into L1 with a cut certificate.
    C1 {
        metric: String,
        /// Allow zero distances between distinct points.
        #[arg(long)]
        semimetric: bool,
    },
    /// Negative-type verdict with a witness vector when it fails.
    Negtype {
        metric: String,
        /// Allow zero distances between distinct points.
        #[arg(long)]
        semimetric: bool,
    },
    /// LP, SDP, and exact optimum for a sparsest-cut instance file.
    Gap { instance: String },
    /// Word-ball pipeline: metric, negative type, distortion, relaxations.
    HeisGap {
        radius: u32,
        /// Lattice: h3 or h5.
        #[arg(long, default_value = "h5")]
        lattice: String,
        /// Metric transform: raw, sqrt, or snowflake:<eps>.
        #[arg(long, default_value = "raw")]
        transform: String,
    },
    /// Vertical-perimeter curve of a set sampled over a region
    /// (ball:<r>, ballh3:<r>, box:<h1,h2,h3,h4,hz>).
    Vbar {
        region: String,
        /// Set: upper-z, quasiball:<r>, or halfspace:<family>.
        #[arg(long, default_value = "upper-z")]
        set: String,
        /// Vertical cutoff radius; defaults to the region circumradius.
        #[arg(long)]
        r: Option<f64>,
        /// Samples per curve point.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Left end of the scale grid.
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        s_min: f64,
        /// Grid spacing, at most 0.25.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        /// Upper cutoff multiplier: the grid stops at log2(comparability * r).
        #[arg(long, default_value_t = 4.0)]
        comparability: f64,
    },
    /// Intrinsic graph pipeline: Lipschitz estimate, then the perimeter
    /// curve of its half-space over a ball of the given radius.
    Lipgraph {
        /// zero, constant:v, linear:a,c,d,e, bump:amp,width, sinusoid:amp,freq.
        family: String,
        /// Ball radius, plain or as r=<value>.
        r: String,
        /// Samples per curve point.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Sample pairs for the Lipschitz estimate.
        #[arg(long, default_value_t = 60_000)]
        lip_budget: usize,
        /// Calibrate a sinusoid amplitude to this Lipschitz estimate.
        #[arg(long)]
        target_lambda: Option<f64>,
    },
    /// Execute a config file holding one `[subcommand]` section.
    Run {
        #[arg(long)]
        config: String,
    },
}

/// Accepts `100`, `R=100`, or `r=100`.
fn parse_scale_arg(raw: &str) -> Result<f64, CliError> {
    let body = raw.strip_prefix("R=").or_else(|| raw.strip_prefix("r=")).unwrap_or(raw);
    body.parse()
        .map_err(|_| CliError::Invalid(format!("cannot parse scale argument {raw:?}")))
}

fn build_config(cli: Cli) -> Result<(ExperimentConfig, Option<usize>), CliError> {
    let Cli { out, seed, streams, threads, command } = cli;
    let mut cfg = match command {
        CliCommand::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Invalid(format!("cannot read {config}: {e}")))?;
            ExperimentConfig::parse(&text)?
        }
        CliCommand::Ball { radius, lattice, budget } => {
            ExperimentConfig::new(Command::Ball { radius, lattice, budget })
        }
        CliCommand::Perimeter { source } => {
            ExperimentConfig::new(Command::Perimeter { source })
        }
        CliCommand::IsoScan => ExperimentConfig::new(Command::IsoScan),
        CliCommand::Poincare { phi, p } => ExperimentConfig::new(Command::Poincare { phi, p }),
        CliCommand::Criterion { omega, r, cutoff } => ExperimentConfig::new(Command::Criterion {
            omega,
            r: parse_scale_arg(&r)?,
            cutoff,
        }),
        CliCommand::C1 { metric, semimetric } => {
            ExperimentConfig::new(Command::C1 { metric, semimetric })
        }
        CliCommand::Negtype { metric, semimetric } => {
            ExperimentConfig::new(Command::Negtype { metric, semimetric })
        }
        CliCommand::Gap { instance } => ExperimentConfig::new(Command::Gap { instance }),
        CliCommand::HeisGap { radius, lattice, transform } => {
            ExperimentConfig::new(Command::HeisGap { radius, lattice, transform })
        }
        CliCommand::Vbar { region, set, r, budget, s_min, step, comparability } => {
            ExperimentConfig::new(Command::Vbar {
                region,
                set,
                r,
                budget,
                s_min,
                step,
                comparability,
            })
        }
        CliCommand::Lipgraph { family, r, budget, lip_budget, target_lambda } => {
            ExperimentConfig::new(Command::Lipgraph {
                family,
                r: parse_scale_arg(&r)?,
                budget,
                lip_budget,
                target_lambda,
            })
        }
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(streams) = streams {
        cfg.streams = streams;
    }
    if let Some(out) = out {
        cfg.out = out;
    }
    Ok((cfg, threads))
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Covers --help and --version (exit 0) as well as usage errors.
            let code = if err.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    let (cfg, threads) = match build_config(cli) {
        Ok(pair) => pair,
        Err(err) => {
            report_error(&err);
            return err.exit_code();
        }
    };
    if let Some(n) = threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the worker pool: {err}");
            return EXIT_INVALID;
        }
    }
    match run(&cfg) {
        Ok(output) => {
            print!("{}", output.stdout);
            EXIT_OK
        }
        Err(err) => {
            report_error(&err);
            err.exit_code()
        }
    }
}

fn report_error(err: &CliError) {
    eprintln!("error: {err}");
    if let CliError::Solver { residual_dump: Some(dump), .. } = err {
        eprintln!("residuals:");
        eprintln!("{dump}");
    }
}
