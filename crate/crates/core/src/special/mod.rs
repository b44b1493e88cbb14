//! Analytic reference objects.

pub mod edge;
pub mod gamma;
pub mod limit;
pub mod sinc;
pub mod skellam;
pub mod stable;
pub mod theta;

pub use edge::{reference_cdf, CdfValue, ReferenceLaw};
pub use limit::limit_coeff;
pub use sinc::{is_standard_sinc_order, sinc_test_function};
pub use skellam::{bessel_i, skellam_kernel, Side};
pub use stable::StableLaw;
pub use theta::{ThetaRoute, THETA_CROSSOVER};
