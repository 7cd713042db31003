//! Scenario files, built-in presets and the table runners behind the
//! `saddle-outage` binary.

pub mod presets;
pub mod run;
pub mod scenario;

pub use presets::{preset, PRESETS};
pub use run::{
    run_compare, run_curve, run_solve, CompareReport, CompareThresholds, CurveTable, PairReport,
};
pub use scenario::{
    parse_scenario, parse_scenario_file, BranchEntry, Grid, MethodName, OutputFormat, OutputSpec,
    PaperMode, ScenarioFlags, ScenarioRequest,
};
