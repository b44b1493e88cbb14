//! Variance-profile kernels and their powers.

mod fft;
pub mod kernel;
pub mod powers;
pub mod profile;

pub use kernel::{build_variance_profile, ChainStructure, TorusChain};
pub use powers::{
    dense_power, hankel_step, n_step_fft, n_step_fft_all, n_step_power, n_step_power_capped, wegner_block_kernel,
    HankelStep, PowerTable, DENSE_CAP,
};
pub use profile::{BaseKind, ProfileKind, ProfileSpec};
