//! Ribbon diagrams: validation, exact diagram functions, bounds, constraint
//! volumes, lattice constants and limiting diagram functions.

pub mod exact;
pub mod graph;
pub mod limit;
pub mod volume;

pub use crate::spike::SpikeOperator;
pub use exact::{
    diagram_function, diagram_function_brute, diagram_function_capped, diagram_upper_bound, split_orders,
    upper_bound_b, DEFAULT_CAP,
};
pub use graph::{catalog, catalog_diagram, catalog_names, validate_diagram, Diagram, ValidationReport, Violation};
pub use limit::{crossover_to_sub, crossover_to_super, limiting_diagram_function, LimitEstimate, LimitRequest, Regime};
pub use volume::{
    constraint_volume, lattice_constant_c, predicted_lattice_constant, volume_auto, LatticeConstant, Volume,
    VolumeMethod,
};
