//! Special functions used by the fractional operators and analytic solutions.

mod gamma;
mod mittag_leffler;
pub(crate) mod quadrature;

pub use gamma::{gamma, ln_gamma, rgamma};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_negative_axis, mittag_leffler_series, MlSeriesConfig,
    SeriesEvaluation,
};
