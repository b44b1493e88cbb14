//! Config-driven experiments, sweeps and plot exports.

pub mod config;
pub mod emit;
pub mod run;
pub mod sweep;

pub use config::{parse_config, ExperimentConfig, Kind, Params, DEFAULT_BUDGET};
pub use emit::{emit_plot_data, empirical_cdf, histogram, PlotKind};
pub use run::{check_budget, edge_cost, run, wegner_vs_skellam, RunReport, DEFAULT_OUT};
pub use sweep::{load_summary, phase_table_rows, run_sweep, PhaseRegime, Signal, SweepPoint, SweepResult};
