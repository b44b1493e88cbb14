//! Matrix ensembles, edge observables and deviation bounds.

pub mod deviation;
pub mod edge;
pub mod sample;
pub mod samples;
pub mod spec;
pub mod tridiagonal;

pub use crate::spike::SpikeOperator as SpikeSpec;
pub use deviation::{deviation_bound_curve, deviation_exponents, DeviationCurve};
pub use edge::{edge_observables, edge_scale, ks_distance, ks_two_sample, EdgeObservables, EdgeRegime, EdgeScale};
pub use sample::{sample_matrix, Ensemble, SampledMatrix};
pub use samples::{simulate_edge, EdgeRecord, EdgeSampleSet};
pub use spec::{EnsembleSpec, EntryLaw};
