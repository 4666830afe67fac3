//! Mild solutions: critical norms, Duhamel bilinear operators and the Picard
//! iteration for `𝒖 = 𝒂 + 𝑩(𝒖, 𝒖)`.

mod config;
mod contraction;
mod duhamel;
mod norms;
mod picard;
mod time;

pub use config::{ExponentConfig, SolverConfig};
pub use contraction::{
    contraction_estimate, contraction_sweep, heat_flow_ensemble, leibniz_constant,
    random_state_data, ContractionEstimate, ContractionSweep, LeibnizReport,
};
pub use duhamel::{coupled_apply, coupled_forcing, gauss_legendre, Bilinear, DuhamelPlan, State};
pub use norms::{critical_norm, critical_norm_upto, critical_norms, CriticalNorm, CriticalNorms, NormKind};
pub use picard::{
    initial_terms, initial_terms_on, l3_continuity_check, picard_solve, prepare_initial_data,
    ContinuityReport, MildSolution, SolveSummary, AUTO_PROJECT_DEFECT,
};
pub use time::{TimeGrid, Trajectory};
