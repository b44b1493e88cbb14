//! Numerical laboratory for inhomogeneous random matrices with Markov variance
//! profiles.

pub mod chain;
pub mod chebyshev;
pub mod comparison;
pub mod diagrams;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod output;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod spike;
pub mod zeta;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
