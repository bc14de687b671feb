//! Level-`alpha` tests and confidence bounds built on the adaptive statistics.
//!
//! Every test rejects when its statistic strictly exceeds the critical value.

use serde::{Deserialize, Serialize};

use crate::critval::{CriticalValueSource, StatisticKind};
use crate::error::{invalid, Result};
use crate::estimators::{check_pi0, pi_statistic, pi_statistic_sorted, rd_statistic, tn_statistic};
use crate::model::{DesignSpec, RdDesignSpec, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_argmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_argmax: Option<f64>,
    /// For the RD test, the smaller of the two sides' `kbar`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kbar: Option<usize>,
}

impl TestOutcome {
    fn new(statistic: f64, critical_value: f64, alpha: f64) -> Self {
        TestOutcome {
            statistic,
            critical_value,
            alpha,
            reject: statistic > critical_value,
            k_argmax: None,
            lambda_argmax: None,
            kbar: None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// Tests `g(0) <= theta0` with `T_n(theta0)`.
///
/// The design must describe how the sample was generated; that is not checked.
pub fn point_test(
    sample: &Sample,
    theta0: f64,
    alpha: f64,
    design: &DesignSpec,
    source: &dyn CriticalValueSource,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let (stat, trace) = tn_statistic(sample, theta0, design.truncation_radius())?;
    let cv = source.critical_value(StatisticKind::Point, sample.len(), alpha, Some(design))?;
    let mut out = TestOutcome::new(stat, cv, alpha);
    out.k_argmax = Some(trace.k_argmax);
    out.kbar = Some(trace.kbar);
    Ok(out)
}

/// One-sided bound `[c_hat_star, inf)` for `g(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerConfidenceBound {
    /// `-inf` (serialized as `null`) when no observation is inside the radius.
    #[serde(with = "neg_inf_as_null")]
    pub c_hat_star: f64,
    pub alpha: f64,
    pub kbar: usize,
    pub critical_value: f64,
    pub degenerate: bool,
}

mod neg_inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

/// `max_{k <= kbar} (g_k - c / sqrt(k))`: the smallest `theta0` that
/// [`point_test`] fails to reject.
pub fn lower_confidence_bound(
    sample: &Sample,
    alpha: f64,
    design: &DesignSpec,
    source: &dyn CriticalValueSource,
) -> Result<LowerConfidenceBound> {
    check_alpha(alpha)?;
    let (_, trace) = tn_statistic(sample, 0.0, design.truncation_radius())?;
    let cv = source.critical_value(StatisticKind::Point, sample.len(), alpha, Some(design))?;
    let c_hat_star = trace.gk[..trace.kbar]
        .iter()
        .enumerate()
        .map(|(i, g)| g - cv / ((i + 1) as f64).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LowerConfidenceBound {
        c_hat_star,
        alpha,
        kbar: trace.kbar,
        critical_value: cv,
        degenerate: trace.kbar == 0,
    })
}

/// Tests that the jump at 0 is at most `tau0`.
pub fn rd_test(
    sample: &Sample,
    tau0: f64,
    alpha: f64,
    design: &RdDesignSpec,
    source: &dyn CriticalValueSource,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let d = design.design();
    let (stat, left, right) = rd_statistic(sample, tau0, d.truncation_radius())?;
    let cv = source.critical_value(StatisticKind::Rd, sample.len(), alpha, Some(d))?;
    let mut out = TestOutcome::new(stat, cv, alpha);
    out.k_argmax = Some(left.k_argmax);
    out.kbar = Some(left.kbar.min(right.kbar));
    Ok(out)
}

/// Tests that the proportion of true nulls is at least `pi0`.
pub fn pi_test(pvals: &[f64], pi0: f64, alpha: f64, source: &dyn CriticalValueSource) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let stat = pi_statistic(pvals, pi0)?;
    let cv = source.critical_value(StatisticKind::Pi0 { pi0 }, pvals.len(), alpha, None)?;
    let mut out = TestOutcome::new(stat.value, cv, alpha);
    out.lambda_argmax = Some(stat.lambda_argmax);
    Ok(out)
}

pub const DEFAULT_PI_STEP: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiUpperBound {
    pub bound: f64,
    pub alpha: f64,
    pub step: f64,
    /// No grid point was accepted; `bound` is then 0.
    pub all_rejected: bool,
}

/// `{step, 2 step, ...}` up to 1, with 1 appended when `1/step` is not an integer.
pub fn pi_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid("step", format!("must lie in (0, 1], got {step}")));
    }
    let m = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (1..=m).map(|j| (j as f64 * step).min(1.0)).collect();
    if grid.last().is_none_or(|&g| g < 1.0 - 1e-12) {
        grid.push(1.0);
    }
    Ok(grid)
}

/// Largest `pi0` on the grid that [`pi_test`] does not reject.
///
/// Scans downward from 1 and stops at the first accepted value, so the result
/// is the supremum of accepted grid points.
pub fn pi_upper_ci(
    pvals: &[f64],
    alpha: f64,
    source: &dyn CriticalValueSource,
    step: f64,
) -> Result<PiUpperBound> {
    check_alpha(alpha)?;
    pi_statistic(pvals, 1.0)?;
    let mut sorted = pvals.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let grid = pi_grid(step)?;
    const CHUNK: usize = 64;
    for chunk in grid
        .rchunks(CHUNK)
        .map(|c| c.iter().rev().copied().collect::<Vec<f64>>())
    {
        for &p in &chunk {
            check_pi0(p)?;
        }
        let cvs = source.pi_critical_values(pvals.len(), alpha, &chunk)?;
        for (&pi0, cv) in chunk.iter().zip(cvs) {
            if pi_statistic_sorted(&sorted, pi0).value <= cv {
                return Ok(PiUpperBound {
                    bound: pi0,
                    alpha,
                    step,
                    all_rejected: false,
                });
            }
        }
    }
    Ok(PiUpperBound {
        bound: 0.0,
        alpha,
        step,
        all_rejected: true,
    })
}
