//! Property suites run against brute-force oracles, with deterministic reports.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlin::DEFAULT_OVERSAMPLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suite {
    Transforms,
    Sparsity,
    ConvEquivariance,
    ConvOracle,
    Nonlin,
    Se2,
    Se3,
    Gradients,
    All,
}

impl Suite {
    pub const NAMED: [Suite; 8] = [
        Suite::Transforms,
        Suite::Sparsity,
        Suite::ConvEquivariance,
        Suite::ConvOracle,
        Suite::Nonlin,
        Suite::Se2,
        Suite::Se3,
        Suite::Gradients,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Transforms => "transforms",
            Suite::Sparsity => "sparsity",
            Suite::ConvEquivariance => "conv-equivariance",
            Suite::ConvOracle => "conv-oracle",
            Suite::Nonlin => "nonlin",
            Suite::Se2 => "se2",
            Suite::Se3 => "se3",
            Suite::Gradients => "gradients",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::NAMED
            .iter()
            .chain([&Suite::All])
            .find(|x| x.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::NAMED.iter().map(|x| x.as_str()).collect();
                Error::Parse(format!("unknown suite {s:?} (expected one of {}, all)", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub bandwidth: usize,
    pub seed: u64,
    /// Random draws (rotations, inputs) per check.
    pub trials: usize,
    /// Activation grid oversampling for the nonlinearity checks.
    pub oversample: usize,
    /// Per-check tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    /// Record wall time per check. Off by default so reports are byte-stable.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            bandwidth: 8,
            seed: 42,
            trials: 20,
            oversample: DEFAULT_OVERSAMPLE,
            tolerances: BTreeMap::new(),
            timings: false,
        }
    }
}

impl SuiteConfig {
    /// Field orders exercised by the order-indexed checks.
    pub fn orders(&self) -> Vec<i64> {
        (-2i64..=2).filter(|m| m.unsigned_abs() < self.bandwidth as u64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// `null` in JSON when the check errored.
    pub measured_error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub bandwidth: usize,
    pub seed: u64,
    pub trials: usize,
    pub oversample: usize,
    pub orders: Vec<i64>,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per check after a header.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "name", "measured_error", "tolerance", "passed", "seed", "wall_time_ms", "error"])?;
        for c in &self.checks {
            w.write_record([
                self.suite.clone(),
                c.name.clone(),
                c.measured_error.map_or(String::new(), |e| format!("{e:e}")),
                format!("{:e}", c.tolerance),
                c.passed.to_string(),
                c.seed.to_string(),
                c.wall_time_ms.map_or(String::new(), |t| format!("{t:.3}")),
                c.error.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Parse(format!("unknown report format {s:?} (expected json or csv)"))),
        }
    }
}

pub fn emit_report(report: &CheckReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report.to_csv()?,
    };
    fs::write(path, text)?;
    Ok(())
}

type CheckFn = fn(&mut ChaCha8Rng, &SuiteConfig) -> Result<f64>;

pub(crate) struct CheckDef {
    pub name: String,
    pub tolerance: f64,
    pub run: Box<dyn Fn(&mut ChaCha8Rng, &SuiteConfig) -> Result<f64> + Send + Sync>,
}

impl CheckDef {
    pub fn new(name: impl Into<String>, tolerance: f64, run: CheckFn) -> Self {
        Self {
            name: name.into(),
            tolerance,
            run: Box::new(run),
        }
    }

    pub fn with(
        name: impl Into<String>,
        tolerance: f64,
        run: impl Fn(&mut ChaCha8Rng, &SuiteConfig) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            tolerance,
            run: Box::new(run),
        }
    }
}

/// Stable 64-bit FNV-1a, used to derive per-check seeds from names.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for one check: independent of which other checks run.
pub fn check_seed(seed: u64, suite: Suite, check: &str) -> u64 {
    let mut z = seed ^ fnv1a(format!("{suite}/{check}").as_bytes());
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Names of every check a suite runs, in report order.
pub fn check_names(suite: Suite, config: &SuiteConfig) -> Vec<String> {
    let mut names: Vec<String> = suites(suite)
        .into_iter()
        .flat_map(|s| checks::registry(s, config).into_iter().map(|c| c.name))
        .collect();
    names.sort();
    names
}

fn suites(suite: Suite) -> Vec<Suite> {
    match suite {
        Suite::All => Suite::NAMED.to_vec(),
        s => vec![s],
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<CheckReport> {
    if config.bandwidth < 2 {
        return Err(Error::Parse("suites need bandwidth of at least 2".into()));
    }
    if config.trials == 0 || config.oversample == 0 {
        return Err(Error::Parse("trials and oversample must be positive".into()));
    }
    let defs: Vec<(Suite, CheckDef)> = suites(suite)
        .into_iter()
        .flat_map(|s| checks::registry(s, config).into_iter().map(move |c| (s, c)))
        .collect();
    for name in config.tolerances.keys() {
        if !defs.iter().any(|(_, d)| &d.name == name) {
            return Err(Error::Parse(format!("tolerance override for unknown check {name:?}")));
        }
    }
    let mut checks: Vec<CheckResult> = defs
        .par_iter()
        .map(|(s, def)| {
            let seed = check_seed(config.seed, *s, &def.name);
            let tolerance = config.tolerances.get(&def.name).copied().unwrap_or(def.tolerance);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = Instant::now();
            let outcome = (def.run)(&mut rng, config);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let (measured_error, error) = match outcome {
                Ok(e) if e.is_finite() => (Some(e), None),
                Ok(e) => (None, Some(format!("non-finite error {e}"))),
                Err(e) => (None, Some(e.to_string())),
            };
            CheckResult {
                name: def.name.clone(),
                passed: measured_error.is_some_and(|e| e <= tolerance),
                measured_error,
                tolerance,
                seed,
                wall_time_ms: config.timings.then_some(elapsed),
                error,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(CheckReport {
        suite: suite.to_string(),
        config: ConfigEcho {
            bandwidth: config.bandwidth,
            seed: config.seed,
            trials: config.trials,
            oversample: config.oversample,
            orders: config.orders(),
            tolerance_overrides: config.tolerances.clone(),
        },
        checks,
    })
}
