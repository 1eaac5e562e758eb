//! Group summaries, one-way ANOVA and Tukey HSD contrasts.

mod anova;
mod quadrature;
mod srange;
mod summary;
mod tukey;

use thiserror::Error;

pub use anova::{one_way_anova, total_sum_of_squares};
pub use quadrature::{integrate, NotConverged};
pub use srange::{srange_cdf, srange_quantile, Df, LARGE_DF};
pub use summary::{expand_mark_distribution, group_points, group_summary, summarize_groups};
pub use tukey::{tukey_hsd, DEFAULT_ALPHA};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("group has no records")]
    EmptyGroup,
    #[error("numerical integration did not converge: {what}")]
    ConvergenceFailure { what: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
