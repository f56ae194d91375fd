//! Flag definitions and their resolution against an optional config file.
//!
//! Every parameter flag is optional at the clap level so that a config file
//! (`--config`, plain `key = value` lines mirroring the long flag names)
//! can supply defaults; explicit flags always win. Requiredness is enforced
//! after merging, so a missing parameter is reported with the flag name
//! whether or not a config file is in play.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use effcap::Method;

use crate::config::Config;

// ---------------------------------------------------------------------
// Command tree
// ---------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "effcap",
    version,
    about = "Effective capacity of kappa-mu shadowed fading links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate the effective capacity at a single parameter point
    Capacity(CapacityArgs),
    /// Sweep one axis (or run a preset) and emit a table
    Sweep(SweepArgs),
    /// Draw instantaneous-SNR samples from the channel model
    Sample(SampleArgs),
    /// Run the cross-method agreement grid and report every discrepancy
    Validate(ValidateArgs),
}

#[derive(Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub point: PointFlags,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Axis to sweep: snr-db, snr, kappa, mu, m, or A
    #[arg(long)]
    pub sweep: Option<String>,
    /// Comma-separated axis values (strictly increasing)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Vec<f64>,
    /// Axis range start:stop:step, inclusive of both ends
    #[arg(long)]
    pub range: Option<String>,
    /// Comma-separated list of methods to run per axis value
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Built-in table preset: fig1 or fig2
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub point: PointFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Number of draws
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub run: RunFlags,
}

// ---------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------

/// The physical parameter point. SNR is given either linearly (`--snr`) or
/// in dB (`--snr-db`); the delay exponent either directly (`--A`) or as the
/// theta/block-length/bandwidth triple.
#[derive(Args)]
pub struct PointFlags {
    /// Dominant-to-scattered power ratio (kappa >= 0)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Number of multipath clusters (mu > 0)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Shadowing severity of the dominant components (m > 0)
    #[arg(long)]
    pub m: Option<f64>,
    /// Average SNR on a linear scale
    #[arg(long)]
    pub snr: Option<f64>,
    /// Average SNR in dB (linear = 10^(dB/10))
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Delay quality-of-service exponent A = theta * T * B / ln 2
    #[arg(long = "A")]
    pub a_cap: Option<f64>,
    /// Delay exponent theta in 1/bit; needs --block-t and --bandwidth
    #[arg(long)]
    pub theta: Option<f64>,
    /// Block duration T in seconds (with --theta)
    #[arg(long)]
    pub block_t: Option<f64>,
    /// Bandwidth B in Hz (with --theta)
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

/// Evaluation and output controls.
#[derive(Args)]
pub struct RunFlags {
    /// Method: auto, quadrature, exact, series, m-eq-mu, rician-shadowed,
    /// high-snr, monte-carlo (underscores accepted; egbmgf = exact)
    #[arg(long)]
    pub method: Option<String>,
    /// Relative tolerance for series and contour refinement
    #[arg(long)]
    pub tol: Option<f64>,
    /// RNG seed for Monte Carlo and sampling
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo draw count
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Output format
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file with key = value lines mirroring the long flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cross-check every result against the quadrature oracle
    #[arg(long)]
    pub paranoid: bool,
}

// ---------------------------------------------------------------------
// Errors and merged settings
// ---------------------------------------------------------------------

/// A fatal CLI error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

/// Output format after merging flags and config.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// How the average SNR was specified; the dB form is remembered so output
/// can echo the user's unit.
#[derive(Clone, Copy)]
pub enum SnrSpec {
    Db(f64),
    Linear(f64),
}

impl SnrSpec {
    pub fn linear(&self) -> f64 {
        match *self {
            SnrSpec::Db(db) => 10f64.powf(db / 10.0),
            SnrSpec::Linear(v) => v,
        }
    }

    /// Column name and value for the record's SNR field.
    pub fn axis(&self) -> (&'static str, f64) {
        match *self {
            SnrSpec::Db(db) => ("snr_db", db),
            SnrSpec::Linear(v) => ("mean_snr", v),
        }
    }
}

/// Merge an optional flag with a config key, flag winning.
fn merged_f64(flag: Option<f64>, cfg: &Config, key: &str) -> Result<Option<f64>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get_f64(key),
    }
}

/// Channel-parameter flags after config merging; SNR may legitimately be
/// absent (when it is the swept axis), so it stays optional here.
pub struct PointValues {
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
    pub m: Option<f64>,
    pub snr: Option<SnrSpec>,
    pub a_cap: Option<f64>,
}

impl PointFlags {
    pub fn merge(&self, cfg: &Config) -> Result<PointValues, CliError> {
        let snr_lin = merged_f64(self.snr, cfg, "snr")?;
        let snr_db = merged_f64(self.snr_db, cfg, "snr-db")?;
        let snr = match (snr_lin, snr_db) {
            (Some(_), Some(_)) => {
                return Err(CliError::domain(
                    "give the average SNR once: either --snr or --snr-db",
                ))
            }
            (Some(v), None) => Some(SnrSpec::Linear(v)),
            (None, Some(db)) => Some(SnrSpec::Db(db)),
            (None, None) => None,
        };

        let a_direct = merged_f64(self.a_cap, cfg, "a")?;
        let theta = merged_f64(self.theta, cfg, "theta")?;
        let block_t = merged_f64(self.block_t, cfg, "block-t")?;
        let bandwidth = merged_f64(self.bandwidth, cfg, "bandwidth")?;
        let a_cap = match (a_direct, theta, block_t, bandwidth) {
            (Some(_), Some(_), _, _) => {
                return Err(CliError::domain(
                    "give the delay exponent once: either --A or the \
                     --theta/--block-t/--bandwidth triple",
                ))
            }
            (Some(a), None, _, _) => Some(a),
            (None, Some(t), Some(tb), Some(b)) => {
                let a = t * tb * b / std::f64::consts::LN_2;
                eprintln!(
                    "effcap: converted theta = {t}, block T = {tb}, bandwidth = {b} \
                     to delay exponent A = {a}"
                );
                Some(a)
            }
            (None, Some(_), _, _) => {
                return Err(CliError::domain(
                    "--theta needs --block-t and --bandwidth to form A",
                ))
            }
            (None, None, _, _) => None,
        };

        Ok(PointValues {
            kappa: merged_f64(self.kappa, cfg, "kappa")?,
            mu: merged_f64(self.mu, cfg, "mu")?,
            m: merged_f64(self.m, cfg, "m")?,
            snr,
            a_cap,
        })
    }
}

/// Evaluation/output settings after config merging.
pub struct RunValues {
    pub method: Option<Method>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub paranoid: bool,
}

impl RunFlags {
    pub fn merge(&self, cfg: &Config) -> Result<RunValues, CliError> {
        let method = match self.method.as_deref().map(str::to_owned).or_else(|| {
            cfg.get("method").map(str::to_owned)
        }) {
            Some(name) => Some(parse_method(&name)?),
            None => None,
        };
        let format = match self
            .format
            .as_deref()
            .or_else(|| cfg.get("format"))
            .unwrap_or("csv")
        {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(CliError::domain(format!(
                    "unknown output format {other:?}; expected csv or json"
                )))
            }
        };
        let out = self
            .out
            .clone()
            .or_else(|| cfg.get("out").map(PathBuf::from));
        Ok(RunValues {
            method,
            tol: merged_f64(self.tol, cfg, "tol")?,
            seed: match self.seed {
                Some(s) => Some(s),
                None => cfg.get_u64("seed")?,
            },
            mc_samples: match self.mc_samples {
                Some(n) => Some(n),
                None => cfg.get_u64("mc-samples")?.map(|n| n as usize),
            },
            format,
            out,
            paranoid: self.paranoid || cfg.get_bool("paranoid")?.unwrap_or(false),
        })
    }
}

// ---------------------------------------------------------------------
// Method names
// ---------------------------------------------------------------------

/// Parse a method name. Hyphen and underscore spellings are both accepted,
/// and `egbmgf` is an alias for the exact bivariate-contour route.
pub fn parse_method(name: &str) -> Result<Method, CliError> {
    let norm = name.trim().to_ascii_lowercase().replace('_', "-");
    if norm == "egbmgf" {
        return Ok(Method::Exact);
    }
    norm.parse::<Method>()
        .map_err(|e| CliError::domain(e.to_string()))
}

/// Method identifier used in output records (stable snake_case column
/// values, e.g. `m_eq_mu`).
pub fn method_field(method: Method) -> &'static str {
    match method {
        Method::Auto => "auto",
        Method::Quadrature => "quadrature",
        Method::Exact => "exact",
        Method::Series => "series",
        Method::MEqMu => "m_eq_mu",
        Method::RicianShadowed => "rician_shadowed",
        Method::HighSnr => "high_snr",
        Method::MonteCarlo => "monte_carlo",
    }
}
