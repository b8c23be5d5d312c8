//! Experiment driver: TOML-declared benchmark sweeps over the solvers,
//! executed under a shared evaluation budget and written out as CSV.
//!
//! [`spec`] defines the configuration schema, [`runner`] enumerates the
//! parameter grid, runs every (cell, repeat) job, and writes `runs.csv`,
//! `summary.csv`, `curves/<algorithm>.csv`, and (for grid searches)
//! `grid_best.csv`.

pub mod runner;
pub mod spec;

pub use runner::{
    grid_search, run_experiment, CellConfig, CellSummary, ExperimentReport, GridBestRow,
    GridReport,
};
pub use spec::{
    load_spec, AlgorithmKind, AlgorithmSpec, ExperimentSpec, ParamGrid, ProblemSpec, StartSpec,
};
