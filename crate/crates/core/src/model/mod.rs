//! Domain types for the regression and p-value mixture models, and their
//! seeded data-generating processes.

mod design;
mod function;
mod generate;
mod mixture;
mod sample;

pub use design::{DesignSpec, FxKind, RdDesignSpec, VarianceFn, DEFAULT_CHECK_GRID};
pub use function::{rd_embed, RegressionFunction, MIN_RATE_N};
pub use generate::{check_an_event, gen_pvalue_sample, gen_regression_sample};
pub use mixture::{AltDensity, MixtureSpec};
pub use sample::Sample;

pub(crate) use generate::{an_event_sorted, draw_pairs};
pub(crate) use sample::distance_order;
