//! Verification harness: named initial data, the independent reference
//! integrator, cross-checks, experiment configuration and the runner.

pub mod algebra;
pub mod compare;
pub mod config;
pub mod presets;
pub mod reference;
pub mod run;
pub mod scaling;

pub use algebra::{algebra_suite, AlgebraReport};
pub use compare::{compare_mild_vs_reference, ComparisonReport};
pub use config::{ExperimentConfig, ExperimentKind};
pub use presets::{DataSpec, Preset};
pub use reference::{reference_solve, ReferenceRun};
pub use run::{error_exit_code, run_experiment, RunOutcome, Verdict};
pub use scaling::{compare_scaled, rescale, scaling_covariance, ScalingReport};
