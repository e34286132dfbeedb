//! Versioned JSON config schemas, one per subcommand. Every config parses
//! and validates fully before any work starts.

use privsbm_core::experiments::{Constants, SweepCell, SweepGrid, TruthMode};
use privsbm_core::mechanism::{FallbackPolicy, SamplerKind};
use privsbm_core::verify::SuiteKind;
use privsbm_core::SbmParams;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmBlock {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
}

impl SbmBlock {
    pub fn params(&self) -> Result<SbmParams, String> {
        SbmParams::new(self.n, self.k, self.a, self.b, self.beta).map_err(|e| e.to_string())
    }
}

fn check_schema(found: &str, expected: &str) -> Result<(), String> {
    if found == expected {
        Ok(())
    } else {
        Err(format!("config schema {found:?}, expected {expected:?}"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub schema: String,
    #[serde(flatten)]
    pub sbm: SbmBlock,
    pub seed: u64,
    /// 1-based truth labels; the maximally balanced labeling when absent.
    pub truth: Option<Vec<usize>>,
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/sample/v1")?;
        self.sbm.params().map(|_| ())
    }
}

fn default_chain_steps() -> usize {
    100_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub schema: String,
    #[serde(flatten)]
    pub sbm: SbmBlock,
    pub epsilon: f64,
    pub envelope_c: f64,
    pub sampler: SamplerKind,
    #[serde(default = "default_chain_steps")]
    pub chain_steps: usize,
    pub fallback: Option<FallbackPolicy>,
    pub lambda_w: Option<f64>,
    /// Graph in the text format (path resolved relative to the cwd).
    pub graph_path: String,
    pub seed: u64,
}

impl EstimateConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/estimate/v1")?;
        self.sbm.params().map(|_| ())
    }
}

fn default_n_cap() -> usize {
    6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub schema: String,
    #[serde(flatten)]
    pub sbm: SbmBlock,
    pub epsilon: f64,
    pub envelope_c: f64,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    /// Diagnostic hook: decalibrate the inverse temperature.
    pub eta_override: Option<f64>,
    /// Also run the all-pairs group-privacy audit (slower).
    #[serde(default)]
    pub group: bool,
}

impl AuditConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/audit/v1")?;
        self.sbm.params().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundMode {
    Exact,
    MonteCarlo,
}

fn default_replicates() -> u64 {
    10_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    pub schema: String,
    #[serde(flatten)]
    pub sbm: SbmBlock,
    pub epsilons: Vec<f64>,
    pub envelope_c: f64,
    pub mode: LowerBoundMode,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    pub seed: u64,
}

impl LowerBoundConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/lower-bound/v1")?;
        if self.epsilons.is_empty() {
            return Err("epsilons must be nonempty".into());
        }
        self.sbm.params().map(|_| ())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub schema: String,
    /// Defaults to every suite.
    pub suites: Option<Vec<SuiteKind>>,
    /// Diagnostic hook: replace the calibrated penalty.
    pub lambda_override: Option<f64>,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/verify/v1")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCommandConfig {
    pub schema: String,
    pub grid: Option<SweepGrid>,
    pub cells: Option<Vec<SweepCell>>,
    pub replicates: u64,
    pub seed: u64,
    pub truth_mode: TruthMode,
    #[serde(default)]
    pub constants: Option<Constants>,
    pub lambda_w: Option<f64>,
}

impl SweepCommandConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_schema(&self.schema, "privsbm/sweep/v1")?;
        if self.grid.is_none() && self.cells.is_none() {
            return Err("either grid or cells required".into());
        }
        Ok(())
    }

    pub fn expand_cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        if let Some(grid) = &self.grid {
            cells.extend(grid.expand());
        }
        if let Some(extra) = &self.cells {
            cells.extend(extra.iter().cloned());
        }
        cells
    }
}
