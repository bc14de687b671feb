//! Closed-form theoretical quantities and the Gaussian sequence-model check.
//!
//! All logarithms are natural.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::MIN_RATE_N;
use crate::parallel::map_indexed;
use crate::rng::{derive_seed, stream_rng, tag};

/// `B(C, M) = sqrt((M^{C^2} - 1)/M + 2 C^2 ln(M) M^{C^2/sqrt 2} / (M (sqrt 2 - 1)))`.
pub fn lemma_bound(c: f64, m: u64) -> Result<f64> {
    if m < 2 {
        return Err(invalid("M", format!("must be >= 2, got {m}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(invalid("C", format!("must be finite and >= 0, got {c}")));
    }
    let mf = m as f64;
    let c2 = c * c;
    let sqrt2 = std::f64::consts::SQRT_2;
    let first = mf.powf(c2).exp_m1_safe() / mf;
    let second = 2.0 / (mf * (sqrt2 - 1.0)) * c2 * mf.ln() * mf.powf(c2 / sqrt2);
    Ok((first + second).sqrt())
}

trait ExpM1Safe {
    fn exp_m1_safe(self) -> f64;
}

impl ExpM1Safe for f64 {
    /// `self - 1` for a power `M^{C^2}`, computed as `expm1(C^2 ln M)` when the
    /// power is close to 1.
    fn exp_m1_safe(self) -> f64 {
        if (self - 1.0).abs() < 0.5 {
            self.ln().exp_m1()
        } else {
            self - 1.0
        }
    }
}

fn check_n_beta(n: u64, beta: f64) -> Result<()> {
    if n < MIN_RATE_N {
        return Err(invalid("n", format!("must be >= {MIN_RATE_N}, got {n}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta", format!("must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

/// `C (n / log log n)^{-beta/(2 beta + 1)}`.
pub fn rate_bound(n: u64, beta: f64, c: f64) -> Result<f64> {
    check_n_beta(n, beta)?;
    let nf = n as f64;
    Ok(c * (nf / nf.ln().ln()).powf(-beta / (2.0 * beta + 1.0)))
}

/// 512 points, geometric from 0.01 to 1.
pub fn default_beta_grid() -> Vec<f64> {
    let m = 512;
    let (lo, hi): (f64, f64) = (0.01, 1.0);
    let ratio = (hi / lo).ln();
    (0..m)
        .map(|i| {
            if i == m - 1 {
                hi
            } else {
                lo * (ratio * i as f64 / (m - 1) as f64).exp()
            }
        })
        .collect()
}

/// One term of the sup defining C*.
pub fn cstar_term(sigma_sup: f64, k: f64, l: f64, beta: f64) -> f64 {
    let base = std::f64::consts::SQRT_2 * sigma_sup * 2.0 * k.powf(1.5);
    base.powf(2.0 / (2.0 + 1.0 / beta))
        * 2f64.powf(2.0 / (2.0 * beta + 1.0))
        * l.powf(1.0 / (2.0 * beta + 1.0))
}

/// Sup over `beta_grid` of [`cstar_term`]: the power constant for the adaptive
/// test, where `2/K` lower-bounds `(F(t) - F(-t))/t`.
pub fn cstar_constant(sigma_sup: f64, k: f64, l: f64, beta_grid: &[f64]) -> Result<f64> {
    if beta_grid.is_empty() {
        return Err(invalid("beta_grid", "must be nonempty"));
    }
    for (name, v) in [("sigma_sup", sigma_sup), ("K", k), ("L", l)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid("cstar", format!("{name} must be positive, got {v}")));
        }
    }
    if let Some(b) = beta_grid.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
        return Err(invalid("beta_grid", format!("{b} outside (0, 1]")));
    }
    Ok(beta_grid
        .iter()
        .map(|&b| cstar_term(sigma_sup, k, l, b))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Whether `|f(x) - f(x')| <= L |x - x'|^beta` for every pair of grid points.
///
/// A relative slack of `1e-12` absorbs rounding for functions that meet the
/// modulus with equality.
pub fn holder_certify<F: Fn(f64) -> f64>(f: F, beta: f64, l: f64, grid: &[f64]) -> bool {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let lhs = (vals[i] - vals[j]).abs();
            let rhs = l * (grid[i] - grid[j]).abs().powf(beta);
            if lhs > rhs + 1e-12 * (1.0 + vals[i].abs().max(vals[j].abs())) {
                return false;
            }
        }
    }
    true
}

/// Uniform grid of `points` over `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![(lo + hi) / 2.0],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Gaussian sequence model `W_i ~ N(m_{i,k}, s_i^2)` under `P_k`, with the
/// alternatives `P_{2^j}` for `j` in `m_lower..=m_upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub n_coords: usize,
    pub m_lower: u32,
    pub m_upper: u32,
    pub c: f64,
    pub s: Vec<f64>,
    /// `means[j - m_lower][i]` is `m_{i+1, 2^j}`.
    pub means: Vec<Vec<f64>>,
}

impl LemmaConfig {
    /// The mean profile saturating the bound: `m_{i,2^j} = C s_i sqrt(ln M)/sqrt(2^j)`
    /// for `i <= 2^j`, zero beyond.
    pub fn extremal(n_coords: usize, m_lower: u32, m_upper: u32, c: f64, s: Vec<f64>) -> Result<Self> {
        let m = (m_upper as i64 - m_lower as i64 + 1).max(0) as f64;
        let means = (m_lower..=m_upper)
            .map(|j| {
                let k = 1usize << j;
                (0..n_coords)
                    .map(|i| {
                        if i < k {
                            c * s[i] * m.ln().sqrt() / (k as f64).sqrt()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let cfg = LemmaConfig {
            n_coords,
            m_lower,
            m_upper,
            c,
            s,
            means,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `M = m_upper - m_lower + 1`.
    pub fn m(&self) -> u64 {
        (self.m_upper - self.m_lower + 1) as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_upper <= self.m_lower || self.m_upper >= usize::BITS {
            return Err(invalid("m_upper", "need m_lower < m_upper"));
        }
        if (1usize << self.m_upper) > self.n_coords {
            return Err(invalid(
                "m_upper",
                format!("2^{} exceeds N = {}", self.m_upper, self.n_coords),
            ));
        }
        if self.s.len() != self.n_coords || self.s.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid("s", "need N positive standard deviations"));
        }
        if self.means.len() != self.m() as usize || self.means.iter().any(|r| r.len() != self.n_coords) {
            return Err(invalid("means", "need one row of N means per alternative"));
        }
        let ln_m = (self.m() as f64).ln();
        for (row, j) in self.means.iter().zip(self.m_lower..) {
            let k = 1usize << j;
            let cap = self.c * ln_m.sqrt() / (k as f64).sqrt();
            for (i, &mu) in row.iter().enumerate() {
                if i >= k && mu != 0.0 {
                    return Err(invalid(
                        "means",
                        format!("m_{{{},{}}} must be 0 beyond k", i + 1, k),
                    ));
                }
                if (mu / self.s[i]).abs() > cap * (1.0 + 1e-12) {
                    return Err(invalid(
                        "means",
                        format!("|m_{{{},{}}}/s| exceeds C sqrt(ln M)/sqrt(k)", i + 1, k),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Standardized means `mu_{i,j} = m_{i,2^j} / s_i`.
    fn standardized(&self) -> Vec<Vec<f64>> {
        self.means
            .iter()
            .map(|row| row.iter().zip(&self.s).map(|(m, s)| m / s).collect())
            .collect()
    }
}

/// A test on the Gaussian sequence, returning a rejection probability in `[0, 1]`.
pub trait GaussianTest: Sync {
    fn reject_prob(&self, w: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64 + Sync> GaussianTest for F {
    fn reject_prob(&self, w: &[f64]) -> f64 {
        self(w)
    }
}

/// Rejects when the average likelihood ratio over the alternatives exceeds
/// `threshold`; with threshold 1 it maximizes average power minus size.
#[derive(Debug, Clone)]
pub struct LikelihoodRatioTest {
    mu: Vec<Vec<f64>>,
    s: Vec<f64>,
    threshold: f64,
}

impl LikelihoodRatioTest {
    pub fn new(config: &LemmaConfig, threshold: f64) -> Self {
        LikelihoodRatioTest {
            mu: config.standardized(),
            s: config.s.clone(),
            threshold,
        }
    }
}

impl GaussianTest for LikelihoodRatioTest {
    fn reject_prob(&self, w: &[f64]) -> f64 {
        let avg = self
            .mu
            .iter()
            .map(|row| {
                let log_lr: f64 = row
                    .iter()
                    .zip(w.iter().zip(&self.s))
                    .filter(|(mu, _)| **mu != 0.0)
                    .map(|(mu, (wi, si))| mu * wi / si - mu * mu / 2.0)
                    .sum();
                log_lr.exp()
            })
            .sum::<f64>()
            / self.mu.len() as f64;
        if avg > self.threshold {
            1.0
        } else {
            0.0
        }
    }
}

/// Monte-Carlo average power minus size, with its standard error and the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaGap {
    pub gap: f64,
    pub se: f64,
    pub bound: f64,
    pub size: f64,
    /// Power under each `P_{2^j}`, in `j` order.
    pub powers: Vec<f64>,
    pub reps: usize,
}

/// Estimates `(1/M) sum_j E_{2^j} phi - E_0 phi` with `reps` draws per measure.
pub fn lemma_power_gap<T: GaussianTest>(
    config: &LemmaConfig,
    test: &T,
    reps: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<LemmaGap> {
    config.validate()?;
    if reps == 0 {
        return Err(invalid("reps", "must be at least 1"));
    }
    let bound = lemma_bound(config.c, config.m())?;
    // measure 0 is P_0, measure j + 1 is the j-th alternative
    let measures = config.means.len() + 1;
    let mean_prob = |measure: usize| -> Result<f64> {
        let means = if measure == 0 {
            None
        } else {
            Some(&config.means[measure - 1])
        };
        let probs = map_indexed(reps, workers, |r| {
            let mut rng = stream_rng(derive_seed(seed, &[measure as u64, r as u64]), tag::LEMMA);
            let w: Vec<f64> = (0..config.n_coords)
                .map(|i| {
                    let z: f64 = rng.sample(StandardNormal);
                    means.map_or(0.0, |m| m[i]) + config.s[i] * z
                })
                .collect();
            test.reject_prob(&w)
        })?;
        Ok(probs.iter().sum::<f64>() / reps as f64)
    };
    let size = mean_prob(0)?;
    let powers = (1..measures).map(mean_prob).collect::<Result<Vec<_>>>()?;
    let m = powers.len() as f64;
    let r = reps as f64;
    let gap = powers.iter().sum::<f64>() / m - size;
    let var = powers.iter().map(|p| p * (1.0 - p) / r).sum::<f64>() / (m * m) + size * (1.0 - size) / r;
    Ok(LemmaGap {
        gap,
        se: var.sqrt(),
        bound,
        size,
        powers,
        reps,
    })
}
