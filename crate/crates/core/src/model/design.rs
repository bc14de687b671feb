//! Design distributions `F_X` and conditional variance functions.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};

/// Grid density used when certifying the design bounds.
pub const DEFAULT_CHECK_GRID: usize = 512;

// Bounds are certified on a grid; this absorbs rounding when a design sits
// exactly on a bound (e.g. uniform on (-eta, eta)).
const BOUND_SLACK: f64 = 1e-9;

/// Distribution of the design points `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FxKind {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Piecewise-linear quantile function with `knots[i] = Q(i / (m - 1))`.
    Quantile { knots: Vec<f64> },
}

impl FxKind {
    pub fn symmetric_unit() -> Self {
        FxKind::Uniform { lo: -1.0, hi: 1.0 }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            FxKind::Uniform { lo, hi } => (*lo, *hi),
            FxKind::Quantile { knots } => (knots[0], knots[knots.len() - 1]),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FxKind::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(invalid("fx", format!("uniform bounds [{lo}, {hi}]")));
                }
            }
            FxKind::Quantile { knots } => {
                if knots.len() < 2 {
                    return Err(invalid("fx", "quantile needs at least two knots"));
                }
                if knots.iter().any(|k| !k.is_finite()) {
                    return Err(invalid("fx", "quantile knots must be finite"));
                }
                if let Some(i) = knots.windows(2).position(|w| w[0] >= w[1]) {
                    return Err(invalid(
                        "fx",
                        format!("quantile knots must increase strictly (knot {})", i + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Quantile function for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            FxKind::Uniform { lo, hi } => lo + (hi - lo) * u,
            FxKind::Quantile { knots } => {
                let segments = (knots.len() - 1) as f64;
                let pos = (u.clamp(0.0, 1.0) * segments).min(segments);
                let i = (pos.floor() as usize).min(knots.len() - 2);
                let frac = pos - i as f64;
                knots[i] + frac * (knots[i + 1] - knots[i])
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            FxKind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            FxKind::Quantile { knots } => {
                let last = knots.len() - 1;
                if x <= knots[0] {
                    return 0.0;
                }
                if x >= knots[last] {
                    return 1.0;
                }
                // First knot strictly above x.
                let j = knots.partition_point(|&k| k <= x);
                let i = j - 1;
                let frac = (x - knots[i]) / (knots[j] - knots[i]);
                (i as f64 + frac) / last as f64
            }
        }
    }
}

/// Conditional variance `sigma^2(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarianceFn {
    Constant {
        value: f64,
    },
    /// Piecewise linear through `(xs[i], values[i])`, flat outside the knots.
    Grid {
        xs: Vec<f64>,
        values: Vec<f64>,
    },
}

impl VarianceFn {
    pub fn unit() -> Self {
        VarianceFn::Constant { value: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        match self {
            VarianceFn::Constant { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(invalid("variance", format!("constant {value}")));
                }
            }
            VarianceFn::Grid { xs, values } => {
                if xs.is_empty() || xs.len() != values.len() {
                    return Err(invalid("variance", "grid needs matching nonempty xs/values"));
                }
                if xs
                    .windows(2)
                    .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
                {
                    return Err(invalid("variance", "grid xs must increase strictly"));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(invalid("variance", "grid values must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    pub fn variance(&self, x: f64) -> f64 {
        match self {
            VarianceFn::Constant { value } => *value,
            VarianceFn::Grid { xs, values } => {
                let last = xs.len() - 1;
                if x <= xs[0] {
                    return values[0];
                }
                if x >= xs[last] {
                    return values[last];
                }
                let j = xs.partition_point(|&k| k <= x);
                let i = j - 1;
                let frac = (x - xs[i]) / (xs[j] - xs[i]);
                values[i] + frac * (values[j] - values[i])
            }
        }
    }

    #[inline]
    pub fn sd(&self, x: f64) -> f64 {
        self.variance(x).sqrt()
    }

    /// Exact supremum of `sigma(x)` over `[lo, hi]` (piecewise linear, so the
    /// maximum sits at a knot or an endpoint).
    pub fn sup_sd(&self, lo: f64, hi: f64) -> f64 {
        match self {
            VarianceFn::Constant { value } => value.sqrt(),
            VarianceFn::Grid { xs, .. } => xs
                .iter()
                .copied()
                .filter(|x| (lo..=hi).contains(x))
                .chain([lo, hi])
                .map(|x| self.variance(x))
                .fold(0.0, f64::max)
                .sqrt(),
        }
    }
}

/// Known design: `F_X`, `sigma^2(.)` and the regularity constant `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub fx: FxKind,
    pub variance: VarianceFn,
    pub eta: f64,
    /// Estimator truncation radius; defaults to `eta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
    #[serde(default = "default_grid")]
    pub check_grid: usize,
}

fn default_grid() -> usize {
    DEFAULT_CHECK_GRID
}

impl DesignSpec {
    pub fn new(fx: FxKind, variance: VarianceFn, eta: f64) -> Self {
        DesignSpec {
            fx,
            variance,
            eta,
            truncation: None,
            check_grid: DEFAULT_CHECK_GRID,
        }
    }

    /// Uniform on `[-1, 1]`, unit variance, `eta = 0.5`.
    pub fn standard() -> Self {
        DesignSpec::new(FxKind::symmetric_unit(), VarianceFn::unit(), 0.5)
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation = Some(radius);
        self
    }

    /// Radius used by the k-NN estimator.
    pub fn truncation_radius(&self) -> f64 {
        self.truncation.unwrap_or(self.eta)
    }

    pub fn sigma_sup(&self) -> f64 {
        let (lo, hi) = self.fx.support();
        self.variance.sup_sd(lo, hi)
    }

    /// `inf (F(t) - F(-t)) / t` over the check grid on `(0, eta)`.
    pub fn min_mass_ratio(&self) -> f64 {
        self.t_grid()
            .map(|t| self.symmetric_mass(t) / t)
            .fold(f64::INFINITY, f64::min)
    }

    /// The constant `K` for which `2/K` lower-bounds `(F(t) - F(-t)) / t`.
    pub fn mass_constant_k(&self) -> f64 {
        2.0 / self.min_mass_ratio()
    }

    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("design serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }

    fn symmetric_mass(&self, t: f64) -> f64 {
        (self.fx.cdf(t) - self.fx.cdf(-t)).abs()
    }

    fn t_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.check_grid;
        (1..=m).map(move |j| self.eta * j as f64 / (m + 1) as f64)
    }

    /// Grid over `(-eta, eta)` restricted to the support.
    fn x_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.check_grid;
        let (lo, hi) = self.fx.support();
        (0..m)
            .map(move |j| -self.eta + 2.0 * self.eta * (j as f64 + 0.5) / m as f64)
            .filter(move |x| (lo..=hi).contains(x))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(invalid("eta", format!("must be positive, got {}", self.eta)));
        }
        if let Some(r) = self.truncation {
            if !(r.is_finite() && r > 0.0) {
                return Err(invalid("truncation", format!("must be positive, got {r}")));
            }
        }
        if self.check_grid == 0 {
            return Err(invalid("check_grid", "must be at least 1"));
        }
        self.fx.validate()?;
        self.variance.validate()?;
        let eta = self.eta;
        for t in self.t_grid() {
            let mass = self.symmetric_mass(t);
            if mass < eta * t * (1.0 - BOUND_SLACK) {
                return Err(Error::DesignViolation {
                    bound: "eta*t <= F(t)-F(-t)",
                    at: t,
                    value: mass,
                });
            }
            if mass > t / eta * (1.0 + BOUND_SLACK) {
                return Err(Error::DesignViolation {
                    bound: "F(t)-F(-t) <= t/eta",
                    at: t,
                    value: mass,
                });
            }
        }
        self.check_variance_bounds()
    }

    fn check_variance_bounds(&self) -> Result<()> {
        let eta = self.eta;
        for x in self.x_grid() {
            let v = self.variance.variance(x);
            if v < eta * (1.0 - BOUND_SLACK) {
                return Err(Error::DesignViolation {
                    bound: "eta <= sigma^2(x)",
                    at: x,
                    value: v,
                });
            }
            if v > (1.0 / eta) * (1.0 + BOUND_SLACK) {
                return Err(Error::DesignViolation {
                    bound: "sigma^2(x) <= 1/eta",
                    at: x,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Design for the discontinuity model, with one-sided mass bounds at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RdDesignSpec(pub DesignSpec);

impl RdDesignSpec {
    pub fn design(&self) -> &DesignSpec {
        &self.0
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.0;
        d.validate()?;
        let eta = d.eta;
        let f0 = d.fx.cdf(0.0);
        for t in d.t_grid() {
            let right = d.fx.cdf(t) - f0;
            let left = f0 - d.fx.cdf(-t);
            for (bound_lo, bound_hi, mass) in [
                ("eta*t <= F(t)-F(0)", "F(t)-F(0) <= t/eta", right),
                ("eta*t <= F(0)-F(-t)", "F(0)-F(-t) <= t/eta", left),
            ] {
                if mass < eta * t * (1.0 - BOUND_SLACK) {
                    return Err(Error::DesignViolation {
                        bound: bound_lo,
                        at: t,
                        value: mass,
                    });
                }
                if mass > t / eta * (1.0 + BOUND_SLACK) {
                    return Err(Error::DesignViolation {
                        bound: bound_hi,
                        at: t,
                        value: mass,
                    });
                }
            }
        }
        Ok(())
    }
}
