//! The p-value mixture `f_p(x) = pi 1[0,1](x) + (1 - pi) f1(x)`.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::Continuous;

use crate::error::{invalid, Result};

/// Alternative p-value density `f1` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AltDensity {
    /// Unit mass at 0.
    PointMassAtZero,
    /// Beta(a, b); decreasing when `a <= 1 <= b` and not both equal to 1.
    Beta { a: f64, b: f64 },
    /// `floor + (1 - floor)(beta + 1)(1 - x)^beta`: Hölder-`beta`, minimized at 1.
    HolderTail { beta: f64, floor: f64 },
}

impl AltDensity {
    fn validate(&self) -> Result<()> {
        match self {
            AltDensity::PointMassAtZero => Ok(()),
            AltDensity::Beta { a, b } => {
                if a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0 {
                    Ok(())
                } else {
                    Err(invalid("f1", format!("beta parameters ({a}, {b})")))
                }
            }
            AltDensity::HolderTail { beta, floor } => {
                if !(*beta > 0.0 && *beta <= 1.0) {
                    return Err(invalid("f1", format!("holder_tail beta {beta} outside (0, 1]")));
                }
                if !(*floor >= 0.0 && *floor < 1.0) {
                    return Err(invalid("f1", format!("holder_tail floor {floor} outside [0, 1)")));
                }
                Ok(())
            }
        }
    }

    /// Density on `(0, 1)`; `None` for the atom at 0.
    pub fn density(&self, x: f64) -> Option<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Some(0.0);
        }
        match self {
            AltDensity::PointMassAtZero => None,
            AltDensity::Beta { a, b } => {
                Some(statrs::distribution::Beta::new(*a, *b).expect("validated").pdf(x))
            }
            AltDensity::HolderTail { beta, floor } => {
                Some(floor + (1.0 - floor) * (beta + 1.0) * (1.0 - x).powf(*beta))
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            AltDensity::PointMassAtZero => 0.0,
            AltDensity::Beta { a, b } => Beta::new(*a, *b).expect("validated").sample(rng),
            AltDensity::HolderTail { beta, floor } => {
                let v: f64 = rng.random();
                let u: f64 = rng.random();
                if v < *floor {
                    u
                } else {
                    1.0 - (1.0 - u).powf(1.0 / (beta + 1.0))
                }
            }
        }
    }

    /// `int_0^1 f1` by composite Simpson after the substitution `x = t^m`,
    /// which tames an integrable singularity at 0.
    pub fn total_mass(&self) -> f64 {
        let m = match self {
            AltDensity::PointMassAtZero => return 1.0,
            AltDensity::Beta { a, .. } if *a < 1.0 => (2.0 / a).ceil(),
            _ => 1.0,
        };
        let panels = 20_000;
        let h = 1.0 / panels as f64;
        let integrand = |t: f64| {
            if t == 0.0 && m > 1.0 {
                return 0.0;
            }
            let x = t.powf(m);
            self.density(x).unwrap_or(0.0) * m * t.powf(m - 1.0)
        };
        let mut acc = integrand(0.0) + integrand(1.0);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(i as f64 * h);
        }
        acc * h / 3.0
    }
}

/// Mixture weight `pi` on the uniform component plus the alternative `f1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub pi: f64,
    pub f1: AltDensity,
}

impl MixtureSpec {
    pub fn new(pi: f64, f1: AltDensity) -> Result<Self> {
        let m = MixtureSpec { pi, f1 };
        m.validate()?;
        Ok(m)
    }

    /// `pi0 unif(0,1) + (1 - pi0) delta_0`.
    pub fn least_favorable(pi0: f64) -> Result<Self> {
        MixtureSpec::new(pi0, AltDensity::PointMassAtZero)
    }

    /// A member of the alternative with `f_p(1) = pi0 - b` and `f_p` Hölder
    /// with exponent `beta` and constant `(1 - pi)(beta + 1)`, which must not
    /// exceed `l`.
    pub fn holder_alternative(pi0: f64, b: f64, beta: f64, l: f64) -> Result<Self> {
        if !(b > 0.0 && b < pi0) {
            return Err(invalid("b", format!("must lie in (0, pi0 = {pi0}), got {b}")));
        }
        let m = MixtureSpec::new(pi0 - b, AltDensity::HolderTail { beta, floor: 0.0 })?;
        let constant = m.holder_constant().expect("holder tail");
        if constant > l * (1.0 + 1e-12) {
            return Err(invalid(
                "pi0",
                format!("f_p needs Hölder constant {constant:.4} > l = {l}; raise pi0 or lower b"),
            ));
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi >= 0.0 && self.pi <= 1.0) {
            return Err(invalid("pi", format!("must lie in [0, 1], got {}", self.pi)));
        }
        self.f1.validate()
    }

    /// Hölder constant of `f_p` for a [`AltDensity::HolderTail`] alternative.
    pub fn holder_constant(&self) -> Option<f64> {
        match self.f1 {
            AltDensity::HolderTail { beta, floor } => Some((1.0 - self.pi) * (1.0 - floor) * (beta + 1.0)),
            _ => None,
        }
    }

    /// Density `f_p(x)`; `None` when `f1` has an atom.
    pub fn density(&self, x: f64) -> Option<f64> {
        let f1 = self.f1.density(x)?;
        let unif = if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 };
        Some(self.pi * unif + (1.0 - self.pi) * f1)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.random();
        if v < self.pi {
            rng.random()
        } else {
            self.f1.draw(rng)
        }
    }
}
