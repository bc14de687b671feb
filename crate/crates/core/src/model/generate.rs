//! Seeded data-generating processes.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DesignSpec, MixtureSpec, RegressionFunction, Sample};
use crate::error::{invalid, Result};
use crate::rng::{stream_rng, tag};

/// Draws `n` pairs `X ~ F_X`, `Y = g(X) + sigma(X) Z` without validating inputs.
pub(crate) fn draw_pairs<R: Rng + ?Sized>(
    n: usize,
    g: &RegressionFunction,
    design: &DesignSpec,
    rng: &mut R,
) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let x = design.fx.quantile(rng.random::<f64>());
            let z: f64 = rng.sample(StandardNormal);
            (x, g.eval(x) + design.variance.sd(x) * z)
        })
        .collect()
}

/// `n` i.i.d. observations from the regression model; a pure function of its
/// arguments.
pub fn gen_regression_sample(
    n: usize,
    g: &RegressionFunction,
    design: &DesignSpec,
    seed: u64,
) -> Result<Sample> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    design.validate()?;
    g.validate()?;
    let mut rng = stream_rng(seed, tag::REGRESSION);
    Sample::new(draw_pairs(n, g, design, &mut rng))
}

/// `n` p-values from the mixture.
pub fn gen_pvalue_sample(n: usize, mix: &MixtureSpec, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    mix.validate()?;
    let mut rng = stream_rng(seed, tag::PVALUES);
    Ok((0..n).map(|_| mix.draw(&mut rng)).collect())
}

/// Whether `eta t/2 <= #{|X_i| <= t}/n <= 2t/eta` for every `t` in
/// `((ln n)/n, eta)`.
///
/// The empirical count is a right-continuous step function, so it suffices to
/// test the upper bound at the left end and at each jump, and the lower bound
/// just before each jump and just before `eta`.
pub fn check_an_event(sample: &Sample, eta: f64) -> Result<bool> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    let mut abs: Vec<f64> = sample.pairs().iter().map(|(x, _)| x.abs()).collect();
    abs.sort_unstable_by(f64::total_cmp);
    Ok(an_event_sorted(&abs, eta))
}

pub(crate) fn an_event_sorted(abs_sorted: &[f64], eta: f64) -> bool {
    let n = abs_sorted.len();
    let nf = n as f64;
    let lo = nf.ln() / nf;
    if lo >= eta {
        return true;
    }
    let count_le = |t: f64| abs_sorted.partition_point(|&a| a <= t) as f64;
    let count_lt = |t: f64| abs_sorted.partition_point(|&a| a < t) as f64;

    if count_le(lo) / nf > 2.0 * lo / eta {
        return false;
    }
    let start = abs_sorted.partition_point(|&a| a <= lo);
    let mut i = start;
    while i < n && abs_sorted[i] < eta {
        let d = abs_sorted[i];
        let below = i as f64; // #{|X| < d}
        let mut j = i;
        while j < n && abs_sorted[j] == d {
            j += 1;
        }
        let at = j as f64; // #{|X| <= d}
        if at / nf > 2.0 * d / eta || below / nf < eta * d / 2.0 {
            return false;
        }
        i = j;
    }
    count_lt(eta) / nf >= eta * eta / 2.0
}
