//! Nearest-neighbour estimators of `g(0)` and the adaptive test statistics.
//!
//! The statistics search over every bandwidth at once: `T_n(theta0)` takes the
//! maximum of the normalized k-NN estimates `sqrt(k)(g_k - theta0)` over `k`,
//! and `T_n(pi0)` the maximum of normalized Storey estimates over `lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{distance_order, Sample};

/// Per-k estimates from one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnTrace {
    /// `gk[k - 1]` is the estimate using the `k` nearest observations.
    pub gk: Vec<f64>,
    /// Largest `k` with `|X_(k)| < eta`.
    pub kbar: usize,
    /// `k` attaining the statistic's maximum (smallest on ties).
    pub k_argmax: usize,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(invalid("eta", format!("must be positive, got {eta}")))
    }
}

/// Running means of `ys` (already in nearest-first order) up to `kbar`, zero after.
fn truncated_means(ys: &[f64], kbar: usize) -> Vec<f64> {
    let mut sum = 0.0;
    ys.iter()
        .enumerate()
        .map(|(i, &y)| {
            if i < kbar {
                sum += y;
                sum / (i + 1) as f64
            } else {
                0.0
            }
        })
        .collect()
}

fn trace_for(sample: &Sample, eta: f64) -> KnnTrace {
    let ys: Vec<f64> = sample.sorted().map(|(_, y)| y).collect();
    let kbar = sample.sorted().take_while(|(x, _)| x.abs() < eta).count();
    KnnTrace {
        gk: truncated_means(&ys, kbar),
        kbar,
        k_argmax: 0,
    }
}

/// `max_k sqrt(k)(g_k - theta0)` with the `k > kbar` terms fixed at 0.
///
/// Returns the value and the smallest maximizing `k`.
pub(crate) fn max_normalized(ys_sorted: &[f64], kbar: usize, theta0: f64) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    let mut sum = 0.0;
    for (i, &y) in ys_sorted.iter().take(kbar).enumerate() {
        sum += y;
        let k = (i + 1) as f64;
        let term = k.sqrt() * (sum / k - theta0);
        if term > best {
            best = term;
            arg = i + 1;
        }
    }
    if kbar < ys_sorted.len() && 0.0 > best {
        best = 0.0;
        arg = kbar + 1;
    }
    (best, arg)
}

/// The k-NN estimate of `g(0)`: the mean of the `k` nearest responses when
/// `|X_(k)| < eta`, 0 otherwise.
pub fn knn_estimate(sample: &Sample, k: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let n = sample.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let (xk, _) = sample.sorted().nth(k - 1).expect("k <= n");
    if xk.abs() >= eta {
        return Ok(0.0);
    }
    Ok(sample.sorted().take(k).map(|(_, y)| y).sum::<f64>() / k as f64)
}

/// `T_n(theta0) = max_k sqrt(k)(g_k - theta0)`, with terms past `kbar` equal to 0.
pub fn tn_statistic(sample: &Sample, theta0: f64, eta: f64) -> Result<(f64, KnnTrace)> {
    check_eta(eta)?;
    if !theta0.is_finite() {
        return Err(invalid("theta0", "must be finite"));
    }
    let mut trace = trace_for(sample, eta);
    let ys: Vec<f64> = sample.sorted().map(|(_, y)| y).collect();
    let (value, arg) = max_normalized(&ys, trace.kbar, theta0);
    trace.k_argmax = arg;
    Ok((value, trace))
}

/// Responses of one side of 0 in nearest-first order, plus that side's `kbar`.
pub(crate) fn split_sides(pairs: &[(f64, f64)], eta: f64) -> ((Vec<f64>, usize), (Vec<f64>, usize)) {
    let mut left: Vec<(f64, f64, usize)> = Vec::new();
    let mut right: Vec<(f64, f64, usize)> = Vec::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        if x <= 0.0 {
            left.push((x, y, i));
        } else {
            right.push((x, y, i));
        }
    }
    let finish = |mut side: Vec<(f64, f64, usize)>| {
        side.sort_unstable_by(|a, b| distance_order((a.0, a.2), (b.0, b.2)));
        let kbar = side.iter().take_while(|p| p.0.abs() < eta).count();
        (side.into_iter().map(|p| p.1).collect::<Vec<_>>(), kbar)
    };
    (finish(left), finish(right))
}

/// `max_k sqrt(k)(g2_k - g1_k - tau)` over `k <= min(kbar1, kbar2)`, floored at 0
/// when some `k <= min(n1, n2)` lies past that range.
pub(crate) fn rd_max(
    left: &[f64],
    kbar_left: usize,
    right: &[f64],
    kbar_right: usize,
    tau: f64,
) -> (f64, usize) {
    let active = kbar_left.min(kbar_right);
    let span = left.len().min(right.len());
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in 0..active {
        s1 += left[i];
        s2 += right[i];
        let k = (i + 1) as f64;
        let term = k.sqrt() * (s2 / k - s1 / k - tau);
        if term > best {
            best = term;
            arg = i + 1;
        }
    }
    if active < span && 0.0 > best {
        best = 0.0;
        arg = active + 1;
    }
    (best, arg)
}

/// Regression-discontinuity statistic at threshold 0.
///
/// Observations with `x <= 0` form the left side and `x > 0` the right side;
/// each side's k-NN estimate is taken toward 0. Terms with `k` beyond either
/// side's `kbar` are 0, so `tau` enters only where both estimates are live.
pub fn rd_statistic(sample: &Sample, tau: f64, eta: f64) -> Result<(f64, KnnTrace, KnnTrace)> {
    check_eta(eta)?;
    if !tau.is_finite() {
        return Err(invalid("tau", "must be finite"));
    }
    let ((left, kbar_left), (right, kbar_right)) = split_sides(sample.pairs(), eta);
    if left.is_empty() || right.is_empty() {
        return Err(Error::OneSidedSample {
            left: left.len(),
            right: right.len(),
        });
    }
    let (value, arg) = rd_max(&left, kbar_left, &right, kbar_right, tau);
    let trace = |ys: &[f64], kbar| KnnTrace {
        gk: truncated_means(ys, kbar),
        kbar,
        k_argmax: arg,
    };
    Ok((value, trace(&left, kbar_left), trace(&right, kbar_right)))
}

fn check_pvalues(pvals: &[f64]) -> Result<()> {
    if pvals.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = pvals.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Parse {
            line: i + 1,
            reason: format!("p-value {} outside [0, 1]", pvals[i]),
        });
    }
    Ok(())
}

/// Storey's estimate `#{p > lambda} / (n (1 - lambda))`.
pub fn storey_estimate(pvals: &[f64], lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("must lie in [0, 1), got {lambda}")));
    }
    check_pvalues(pvals)?;
    let above = pvals.iter().filter(|&&p| p > lambda).count() as f64;
    Ok(above / (pvals.len() as f64 * (1.0 - lambda)))
}

/// Value and maximizing `lambda` of `T_n(pi0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiStatistic {
    pub value: f64,
    pub lambda_argmax: f64,
}

/// `T_n(pi0)` from p-values sorted ascending.
///
/// The count `#{p > lambda}` is constant on `[p_(i), p_(i+1))`, where the
/// objective increases in `1 - lambda`; hence the maximum sits on
/// `{0} u {p_(i) < 1}`.
pub(crate) fn pi_statistic_sorted(sorted: &[f64], pi0: f64) -> PiStatistic {
    let n = sorted.len();
    let nf = n as f64;
    let objective = |lambda: f64, above: usize| {
        let nu = nf * (1.0 - lambda);
        nu.sqrt() * (pi0 - above as f64 / nu)
    };
    let mut best = PiStatistic {
        value: objective(0.0, n - sorted.partition_point(|&p| p <= 0.0)),
        lambda_argmax: 0.0,
    };
    let mut i = 0;
    while i < n {
        let lambda = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == lambda {
            j += 1;
        }
        if lambda >= 1.0 {
            break;
        }
        if lambda > 0.0 {
            let v = objective(lambda, n - j);
            if v > best.value {
                best = PiStatistic {
                    value: v,
                    lambda_argmax: lambda,
                };
            }
        }
        i = j;
    }
    best
}

/// `T_n(pi0) = max_{0 <= lambda < 1} sqrt(n(1 - lambda)) [pi0 - pihat(lambda)]`.
pub fn pi_statistic(pvals: &[f64], pi0: f64) -> Result<PiStatistic> {
    check_pi0(pi0)?;
    check_pvalues(pvals)?;
    let mut sorted = pvals.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(pi_statistic_sorted(&sorted, pi0))
}

pub(crate) fn check_pi0(pi0: f64) -> Result<()> {
    if pi0 > 0.0 && pi0 <= 1.0 {
        Ok(())
    } else {
        Err(invalid("pi0", format!("must lie in (0, 1], got {pi0}")))
    }
}
