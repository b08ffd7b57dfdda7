//! Scenario files, scene assembly and the experiment runners behind the
//! command-line tool.
//!
//! A scenario is a TOML document; see [`ScenarioConfig`] for the keys.
//! [`build_scene`] turns it into a [`Scene`](crate::channel::Scene) and an
//! optional receiver [`Trajectory`], and [`run_experiment`] produces a
//! [`ResultTable`] with one row per location and method.

mod build;
mod config;
mod experiment;
mod output;

pub use build::{build_scene, element_offsets, load_dps, load_pattern, BuiltScenario, Trajectory};
pub use config::{
    AntennaConfig, ControllerConfig, DpsConfig, DpsSource, LinkConfig, NoiseConfig, OrientationMode, PatternConfig,
    PatternKind, RisConfig, ScenarioConfig, SmConfig, TrackingConfig, TrajectoryConfig,
};
pub use experiment::{
    evaluate_states, fit_dps_input, is_unimodal_with_lower_tail, optimize, quality_pmf, run_experiment,
    sweep_seed, track, tracking_method, DpsFitReport, Experiment, PmfBin, PMF_BIN_DB,
};
pub use output::{write_outputs, ExperimentOutput, ResultRow, ResultTable, RunManifest, SideTable, RESULT_CSV_HEADER};

/// Parses and validates a scenario file.
pub fn load_config(path: impl AsRef<std::path::Path>) -> crate::Result<ScenarioConfig> {
    ScenarioConfig::load(path)
}
