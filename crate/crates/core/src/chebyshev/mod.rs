//! Chebyshev trace moments, linearization coefficients and sinc statistics.

pub mod linearize;
pub mod moments;
pub mod trace;

pub use linearize::{linearize_generic, linearize_power, Coefficients, Linearization};
pub use moments::{
    chebyshev_power_moment, cumulants_from_moments, matched_order, mixed_chebyshev_moment, moment_table,
    moments_from_cumulants, sample_spectra, sinc_statistic, Estimate, MomentRequest, MomentTable, Subset,
};
pub use trace::{chebyshev_trace, chebyshev_trace_eig, chebyshev_u, trace_from_powers, trace_powers};
