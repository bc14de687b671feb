//! Regression functions used as nulls and alternatives.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Smallest sample size for which `log log n` is positive enough to use in
/// rate formulas.
pub const MIN_RATE_N: u64 = 16;

/// A regression function `g`, evaluable pointwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressionFunction {
    Zero,
    Constant {
        b: f64,
    },
    /// `max{c [(log log n)/n]^(beta/(2 beta + 1)) - l |x|^beta, 0}`.
    HolderAlt {
        beta: f64,
        l: f64,
        c: f64,
        n: u64,
    },
    /// `max{b - l |x|^beta, 0}`.
    Bump {
        b: f64,
        beta: f64,
        l: f64,
    },
    /// `b - l |x|^beta` without clipping; `b = 0` gives a composite-null member.
    Cusp {
        b: f64,
        beta: f64,
        l: f64,
    },
    /// Piecewise linear through `(xs[i], ys[i])`, flat outside the knots.
    Grid {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    /// `x -> base(x) sgn(x) - 2 base(0) 1{x > 0}`, with `sgn(0) = -1`.
    SignEmbedded {
        base: Box<RegressionFunction>,
    },
    /// `x -> base(x) + tau 1{x > 0}`.
    Jump {
        base: Box<RegressionFunction>,
        tau: f64,
    },
}

fn check_holder_params(beta: f64, l: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta", format!("must lie in (0, 1], got {beta}")));
    }
    if !(l.is_finite() && l >= 0.0) {
        return Err(invalid("l", format!("must be finite and >= 0, got {l}")));
    }
    Ok(())
}

/// `[(log log n) / n]^(beta/(2 beta + 1))`.
pub(crate) fn loglog_rate(n: u64, beta: f64) -> f64 {
    let n = n as f64;
    (n.ln().ln() / n).powf(beta / (2.0 * beta + 1.0))
}

impl RegressionFunction {
    pub fn holder_alt(beta: f64, l: f64, c: f64, n: u64) -> Result<Self> {
        let g = RegressionFunction::HolderAlt { beta, l, c, n };
        g.validate()?;
        Ok(g)
    }

    pub fn bump(b: f64, beta: f64, l: f64) -> Result<Self> {
        let g = RegressionFunction::Bump { b, beta, l };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RegressionFunction::Zero => Ok(()),
            RegressionFunction::Constant { b } => {
                if b.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("b", "must be finite"))
                }
            }
            RegressionFunction::HolderAlt { beta, l, c, n } => {
                check_holder_params(*beta, *l)?;
                if *n < MIN_RATE_N {
                    return Err(invalid("n", format!("must be >= {MIN_RATE_N}, got {n}")));
                }
                if !c.is_finite() {
                    return Err(invalid("c", "must be finite"));
                }
                Ok(())
            }
            RegressionFunction::Bump { b, beta, l } | RegressionFunction::Cusp { b, beta, l } => {
                check_holder_params(*beta, *l)?;
                if b.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("b", "must be finite"))
                }
            }
            RegressionFunction::Grid { xs, ys } => {
                if xs.is_empty() || xs.len() != ys.len() {
                    return Err(invalid("grid", "needs matching nonempty xs/ys"));
                }
                if xs
                    .windows(2)
                    .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
                {
                    return Err(invalid("grid", "xs must increase strictly"));
                }
                if ys.iter().any(|y| !y.is_finite()) {
                    return Err(invalid("grid", "ys must be finite"));
                }
                Ok(())
            }
            RegressionFunction::SignEmbedded { base } => base.validate(),
            RegressionFunction::Jump { base, tau } => {
                if !tau.is_finite() {
                    return Err(invalid("tau", "must be finite"));
                }
                base.validate()
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RegressionFunction::Zero => 0.0,
            RegressionFunction::Constant { b } => *b,
            RegressionFunction::HolderAlt { beta, l, c, n } => {
                (c * loglog_rate(*n, *beta) - l * x.abs().powf(*beta)).max(0.0)
            }
            RegressionFunction::Bump { b, beta, l } => (b - l * x.abs().powf(*beta)).max(0.0),
            RegressionFunction::Cusp { b, beta, l } => b - l * x.abs().powf(*beta),
            RegressionFunction::Grid { xs, ys } => {
                let last = xs.len() - 1;
                if x <= xs[0] {
                    return ys[0];
                }
                if x >= xs[last] {
                    return ys[last];
                }
                let j = xs.partition_point(|&k| k <= x);
                let i = j - 1;
                let frac = (x - xs[i]) / (xs[j] - xs[i]);
                ys[i] + frac * (ys[j] - ys[i])
            }
            RegressionFunction::SignEmbedded { base } => {
                let g0 = base.eval(0.0);
                if x > 0.0 {
                    base.eval(x) - 2.0 * g0
                } else {
                    -base.eval(x)
                }
            }
            RegressionFunction::Jump { base, tau } => base.eval(x) + if x > 0.0 { *tau } else { 0.0 },
        }
    }
}

/// Embeds `g` into the discontinuity model: returns `(m_g, tau)` with
/// `m_g(x) + tau 1{x > 0} = g(x) sgn(x)` and `tau = 2 g(0)`.
pub fn rd_embed(g: &RegressionFunction) -> Result<(RegressionFunction, f64)> {
    g.validate()?;
    let g0 = g.eval(0.0);
    if !g0.is_finite() {
        return Err(invalid("g", "g(0) must be finite"));
    }
    Ok((
        RegressionFunction::SignEmbedded {
            base: Box::new(g.clone()),
        },
        2.0 * g0,
    ))
}
