use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{DesignSpec, MixtureSpec, RegressionFunction, MIN_RATE_N};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Point-test rejection frequency under `function`.
    Size,
    /// Point-test power at `b = m * rate(n, beta)` for each multiplier `m`.
    Power,
    /// As `power`, with multipliers measured in units of `C*`.
    Adaptation,
    /// Frequency of `g(0) >= c_hat_star` under `function`.
    Coverage,
    /// RD-test rejection frequency under `function` plus a jump of `tau0`.
    RdSize,
    /// RD-test power under the sign embedding of a bump, multipliers in units of `C*`.
    RdPower,
    /// `pi0` test rejection frequency under `mixture`.
    PiSize,
    /// `pi0` test power with `f_p(1) = pi0 - m * rate(n, beta)`.
    PiPower,
    /// CDF of `T_n(pi0)` under `mixture` against the least-favorable law.
    LfDominance,
    /// Average power minus size in the Gaussian sequence model.
    LemmaBound,
    /// Frequency of the design-regularity event.
    AnFrequency,
    /// Critical values against the iterated-logarithm envelope.
    LilTrend,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Size => "size",
            Experiment::Power => "power",
            Experiment::Adaptation => "adaptation",
            Experiment::Coverage => "coverage",
            Experiment::RdSize => "rd_size",
            Experiment::RdPower => "rd_power",
            Experiment::PiSize => "pi_size",
            Experiment::PiPower => "pi_power",
            Experiment::LfDominance => "lf_dominance",
            Experiment::LemmaBound => "lemma_bound",
            Experiment::AnFrequency => "an_frequency",
            Experiment::LilTrend => "lil_trend",
        }
    }

    fn uses_beta_grid(&self) -> bool {
        matches!(
            self,
            Experiment::Power | Experiment::Adaptation | Experiment::RdPower | Experiment::PiPower
        )
    }
}

/// Family used for power alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltFamily {
    #[default]
    Bump,
    HolderAlt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaParams {
    pub n_coords: usize,
    pub m_lower: u32,
    pub m_upper: u32,
    pub c: f64,
    /// Coordinate standard deviations; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams {
            n_coords: 256,
            m_lower: 1,
            m_upper: 8,
            c: 0.5,
            s: None,
        }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_alpha() -> f64 {
    0.05
}
fn default_beta_grid() -> Vec<f64> {
    vec![0.25, 0.5, 0.75, 1.0]
}
fn default_multipliers() -> Vec<f64> {
    vec![1.0]
}
fn default_one() -> f64 {
    1.0
}
fn default_half() -> f64 {
    0.5
}
fn default_critval_reps() -> usize {
    crate::critval::DEFAULT_REPS
}
fn default_quantile_levels() -> usize {
    20
}
fn default_envelope() -> f64 {
    2.0
}

/// A JSON-configurable experiment. Omitted fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub experiment: Experiment,
    pub n_values: Vec<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub replications: usize,
    #[serde(default = "default_beta_grid")]
    pub beta_grid: Vec<f64>,
    #[serde(default = "default_multipliers")]
    pub multipliers: Vec<f64>,
    /// Hölder constant `L` of the alternatives.
    #[serde(default = "default_one")]
    pub lipschitz: f64,
    #[serde(default = "DesignSpec::standard")]
    pub design: DesignSpec,
    /// True regression function for `size`, `coverage` and `rd_size`.
    #[serde(default = "zero_function")]
    pub function: RegressionFunction,
    #[serde(default)]
    pub family: AltFamily,
    /// Data-generating mixture for `pi_size` and `lf_dominance`; the
    /// least-favorable law at `pi0` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureSpec>,
    #[serde(default = "default_half")]
    pub pi0: f64,
    #[serde(default)]
    pub tau0: f64,
    #[serde(default = "default_critval_reps")]
    pub critval_reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lemma: LemmaParams,
    #[serde(default = "default_quantile_levels")]
    pub quantile_levels: usize,
    #[serde(default = "default_envelope")]
    pub lil_envelope: f64,
}

fn zero_function() -> RegressionFunction {
    RegressionFunction::Zero
}

impl ExperimentConfig {
    /// Defaults for everything but the experiment, sample sizes and replications.
    pub fn new(experiment: Experiment, n_values: Vec<usize>, replications: usize) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            experiment,
            n_values,
            alpha: default_alpha(),
            replications,
            beta_grid: default_beta_grid(),
            multipliers: default_multipliers(),
            lipschitz: 1.0,
            design: DesignSpec::standard(),
            function: RegressionFunction::Zero,
            family: AltFamily::Bump,
            mixture: None,
            pi0: 0.5,
            tau0: 0.0,
            critval_reps: default_critval_reps(),
            seed: 0,
            lemma: LemmaParams::default(),
            quantile_levels: default_quantile_levels(),
            lil_envelope: default_envelope(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if self.experiment != Experiment::LemmaBound {
            if self.n_values.is_empty() {
                return Err(invalid("n_values", "must be nonempty"));
            }
            if self.n_values.contains(&0) {
                return Err(invalid("n_values", "sample sizes must be positive"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if self.critval_reps == 0 {
            return Err(invalid("critval_reps", "must be at least 1"));
        }
        if self.experiment.uses_beta_grid() {
            if self.beta_grid.is_empty() {
                return Err(invalid("beta_grid", "must be nonempty"));
            }
            if self.multipliers.is_empty() {
                return Err(invalid("multipliers", "must be nonempty"));
            }
            if let Some(b) = self.beta_grid.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
                return Err(invalid("beta_grid", format!("{b} outside (0, 1]")));
            }
            if let Some(&n) = self.n_values.iter().find(|&&n| (n as u64) < MIN_RATE_N) {
                return Err(invalid(
                    "n_values",
                    format!("rates need n >= {MIN_RATE_N}, got {n}"),
                ));
            }
        }
        if !(self.lipschitz.is_finite() && self.lipschitz > 0.0) {
            return Err(invalid("lipschitz", "must be positive"));
        }
        if matches!(self.experiment, Experiment::LfDominance) && self.quantile_levels == 0 {
            return Err(invalid("quantile_levels", "must be at least 1"));
        }
        if matches!(self.experiment, Experiment::LilTrend) {
            if let Some(&n) = self.n_values.iter().find(|&&n| (n as u64) < MIN_RATE_N) {
                return Err(invalid(
                    "n_values",
                    format!("log log n needs n >= {MIN_RATE_N}, got {n}"),
                ));
            }
        }
        if let Some(m) = &self.mixture {
            m.validate()?;
        }
        self.function.validate()?;
        self.design.validate()
    }
}
