use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{MhdError, Result};
use crate::hodge::{leray_p, q_proj};
use crate::lambda3::Grade;
use crate::mild::config::{ExponentConfig, SolverConfig};
use crate::mild::duhamel::{coupled_apply, DuhamelPlan, State};
use crate::mild::norms::critical_norms;
use crate::mild::time::{TimeGrid, Trajectory};
use crate::spectral::{interior_product, random_bandlimited, FormField, Grid};

/// Empirical bound for `‖𝑩(𝒖,𝒗)‖ ≤ C‖𝒖‖‖𝒗‖` in `𝒰_T × ℬ_T`.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionEstimate {
    pub horizon: f64,
    /// `max ‖𝑩(𝒖,𝒗)‖ / (‖𝒖‖‖𝒗‖)` over the ensemble.
    pub c_hat: f64,
    /// `1/(4Ĉ)`.
    pub eps_hat: f64,
    pub ratios: Vec<f64>,
}

fn state_norm(s: &State, exps: &ExponentConfig) -> Result<f64> {
    Ok(critical_norms(&s.u, &s.b, exps)?.total())
}

pub fn contraction_estimate(
    ensemble: &[(State, State)],
    plan: &DuhamelPlan,
    exps: &ExponentConfig,
) -> Result<ContractionEstimate> {
    if ensemble.is_empty() {
        return Err(MhdError::EmptyEnsemble);
    }
    let mut ratios = Vec::with_capacity(ensemble.len());
    for (x, y) in ensemble {
        let (nx, ny) = (state_norm(x, exps)?, state_norm(y, exps)?);
        if nx == 0.0 || ny == 0.0 {
            return Err(MhdError::InvalidParameter("ensemble contains a zero trajectory".into()));
        }
        ratios.push(state_norm(&coupled_apply(plan, x, y)?, exps)? / (nx * ny));
    }
    let c_hat = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ContractionEstimate {
        horizon: plan.times().horizon(),
        c_hat,
        eps_hat: if c_hat > 0.0 { 0.25 / c_hat } else { f64::INFINITY },
        ratios,
    })
}

/// Random band-limited divergence-free `u₀` and exact `b₀`, unit `L²` norm each.
pub fn random_state_data(grid: &Grid, kmax: u32, rng: &mut ChaCha8Rng) -> Result<(FormField, FormField)> {
    let u = leray_p(&random_bandlimited(grid, Grade::ONE, kmax, rng))?;
    let b = q_proj(&random_bandlimited(grid, Grade::TWO, kmax, rng))?;
    let (nu, nb) = (u.l2_norm(), b.l2_norm());
    Ok((u.scale(1.0 / nu), b.scale(1.0 / nb)))
}

/// Pairs of heat flows of random band-limited data.
pub fn heat_flow_ensemble(
    grid: &Grid,
    times: &TimeGrid,
    count: usize,
    kmax: u32,
    seed: u64,
) -> Result<Vec<(State, State)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = || -> Result<State> {
        let (u0, b0) = random_state_data(grid, kmax, &mut rng)?;
        Ok(State {
            u: Trajectory::heat_flow(times, &u0)?,
            b: Trajectory::heat_flow(times, &b0)?,
        })
    };
    (0..count).map(|_| Ok((state()?, state()?))).collect()
}

/// Contraction estimates over several horizons with the same random data.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionSweep {
    pub estimates: Vec<ContractionEstimate>,
    /// `(max Ĉ - min Ĉ) / min Ĉ` over the horizons.
    pub spread: f64,
}

pub fn contraction_sweep(
    grid: &Grid,
    horizons: &[f64],
    config: &SolverConfig,
    count: usize,
    kmax: u32,
    seed: u64,
) -> Result<ContractionSweep> {
    config.validate()?;
    if horizons.is_empty() || count == 0 {
        return Err(MhdError::EmptyEnsemble);
    }
    let mut estimates = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        let times = TimeGrid::new(horizon, config.nodes, config.gamma)?;
        let plan = DuhamelPlan::new(grid, &times);
        let ensemble = heat_flow_ensemble(grid, &times, count, kmax, seed)?;
        estimates.push(contraction_estimate(&ensemble, &plan, &config.exponents)?);
    }
    let lo = estimates.iter().map(|e| e.c_hat).fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().map(|e| e.c_hat).fold(0.0, f64::max);
    Ok(ContractionSweep { estimates, spread: (hi - lo) / lo })
}

/// Empirical constant of `‖d(ω₁⌟ω₂)‖_{q/2} ≤ C_q(‖Dω₁‖_q‖ω₂‖_q + ‖ω₁‖_q‖Dω₂‖_q)`
/// with `D = d + d*`, over random band-limited 1-forms `ω₁` and 2-forms `ω₂`.
#[derive(Clone, Debug, Serialize)]
pub struct LeibnizReport {
    pub q: f64,
    pub samples: usize,
    pub c_q: f64,
    pub mean_ratio: f64,
}

pub fn leibniz_constant(grid: &Grid, q: f64, samples: usize, kmax: u32, seed: u64) -> Result<LeibnizReport> {
    if samples == 0 {
        return Err(MhdError::EmptyEnsemble);
    }
    if !(q >= 2.0 && q.is_finite()) {
        return Err(MhdError::InvalidParameter(format!("q = {q} must be finite and ≥ 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w1 = random_bandlimited(grid, Grade::ONE, kmax, &mut rng);
        let w2 = random_bandlimited(grid, Grade::TWO, kmax, &mut rng);
        let lhs = interior_product(&w1, &w2)?.d().lq_norm(0.5 * q)?;
        let dw1 = w1.d().add(&w1.delta())?;
        let dw2 = w2.d().add(&w2.delta())?;
        let rhs = dw1.lq_norm(q)? * w2.lq_norm(q)? + w1.lq_norm(q)? * dw2.lq_norm(q)?;
        ratios.push(lhs / rhs);
    }
    Ok(LeibnizReport {
        q,
        samples,
        c_q: ratios.iter().copied().fold(0.0, f64::max),
        mean_ratio: ratios.iter().sum::<f64>() / samples as f64,
    })
}
