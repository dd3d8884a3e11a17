//! Scenario configuration, the experiment protocols and their file outputs.

pub mod export;
pub mod protocol;
pub mod scenario;

pub use export::{format_g9, GeodesicsExport, PathExport, TraceExport};
pub use protocol::{
    default_convergence_samples, Algorithm, CompareRow, ConvergenceRow, Experiment, OracleResult, RepeatResult,
    RunRecord, RunStatus, SummaryStats,
};
pub use scenario::{load_scenario, GeodesicDefaults, PlannerDefaults, ScenarioConfig, PRESETS};
