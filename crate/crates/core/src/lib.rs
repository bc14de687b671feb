//! Adaptive one-sided tests and confidence bounds for a regression function at
//! a point, a regression-discontinuity variant, and the analogous test for the
//! proportion of true null hypotheses among p-values.
//!
//! Critical values come from Monte-Carlo simulation of each statistic's null
//! law ([`critval`]); [`sim`] runs seeded experiments that check size, power,
//! coverage and the closed-form bounds in [`theory`].

pub mod critval;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod model;
pub mod parallel;
pub mod rng;
pub mod sim;
pub mod theory;

pub use critval::{
    lil_reference, mc_quantile, CritValSpec, CriticalValue, CriticalValueSource, FixedCriticalValue,
    MonteCarloSource, StatisticKind,
};
pub use error::{Error, Result};
pub use estimators::{knn_estimate, pi_statistic, rd_statistic, storey_estimate, tn_statistic};
pub use inference::{
    lower_confidence_bound, pi_test, pi_upper_ci, point_test, rd_test, LowerConfidenceBound, TestOutcome,
};
pub use model::{DesignSpec, MixtureSpec, RdDesignSpec, RegressionFunction, Sample};
