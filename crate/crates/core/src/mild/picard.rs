use serde::Serialize;

use crate::error::{MhdError, Result};
use crate::hodge::{leray_p, magnetic_defect, q_proj, velocity_defect};
use crate::lambda3::Grade;
use crate::mild::config::SolverConfig;
use crate::mild::duhamel::{coupled_forcing, DuhamelPlan, State};
use crate::mild::norms::{critical_norms, CriticalNorms};
use crate::mild::time::{TimeGrid, Trajectory};
use crate::propagators::heat_table;
use crate::spectral::FormField;

/// Relative subspace defect below which initial data are projected silently.
pub const AUTO_PROJECT_DEFECT: f64 = 1e-6;

/// Iterate norms beyond this are treated as a blow-up of the iteration.
const BLOWUP_NORM: f64 = 1e12;

/// Check `u₀ ∈ N(d*)` and `b₀ ∈ R(d)` and project away defects below
/// [`AUTO_PROJECT_DEFECT`]. Both outputs are spectral.
pub fn prepare_initial_data(u0: &FormField, b0: &FormField) -> Result<(FormField, FormField)> {
    u0.ensure_grade(Grade::ONE, "u₀")?;
    b0.ensure_grade(Grade::TWO, "b₀")?;
    if u0.grid() != b0.grid() {
        return Err(MhdError::SizeMismatch("u₀ and b₀ on different grids".into()));
    }
    let du = velocity_defect(u0)?;
    if du > AUTO_PROJECT_DEFECT {
        return Err(MhdError::SubspaceViolation(du));
    }
    let db = magnetic_defect(b0)?;
    if db > AUTO_PROJECT_DEFECT {
        return Err(MhdError::SubspaceViolation(db));
    }
    Ok((leray_p(u0)?, q_proj(b0)?))
}

/// `a₁(t) = e^{-tS}u₀` and `a₂(t) = e^{-tM}b₀` at the nodes of `times`.
pub fn initial_terms_on(u0: &FormField, b0: &FormField, times: &TimeGrid) -> Result<(Trajectory, Trajectory)> {
    let (u0, b0) = prepare_initial_data(u0, b0)?;
    Ok((Trajectory::heat_flow(times, &u0)?, Trajectory::heat_flow(times, &b0)?))
}

/// As [`initial_terms_on`] on the node set of `config` with horizon `horizon`.
pub fn initial_terms(
    u0: &FormField,
    b0: &FormField,
    horizon: f64,
    config: &SolverConfig,
) -> Result<(Trajectory, Trajectory)> {
    config.validate()?;
    initial_terms_on(u0, b0, &TimeGrid::new(horizon, config.nodes, config.gamma)?)
}

/// Converged (or last) Picard iterate together with its history.
#[derive(Clone, Debug)]
pub struct MildSolution {
    pub config: SolverConfig,
    /// Projected initial data, spectral.
    pub u0: FormField,
    pub b0: FormField,
    pub u: Trajectory,
    pub b: Trajectory,
    /// Number of Picard updates performed.
    pub iterations: usize,
    /// `‖𝒖⁽ⁿ⁾ - 𝒖⁽ⁿ⁻¹⁾‖` per iteration.
    pub residuals: Vec<f64>,
    /// `‖𝒖⁽ⁿ⁾‖` per iteration.
    pub iterate_norms: Vec<f64>,
    /// Critical norm of the initial term `𝒂`.
    pub data_norm: f64,
    /// `max_n ‖𝑩(𝒖⁽ⁿ⁾,𝒖⁽ⁿ⁾)‖ / ‖𝒖⁽ⁿ⁾‖²` over the iterates.
    pub c_hat: f64,
    /// `1/(4Ĉ)`.
    pub eps_hat: f64,
    pub converged: bool,
    plan: DuhamelPlan,
    /// Nodal forcing of the iterate preceding the final one.
    forcing: State,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub horizon: f64,
    pub nodes: usize,
    pub gamma: f64,
    pub q: f64,
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Vec<f64>,
    pub iterate_norms: Vec<f64>,
    pub max_ratio: Option<f64>,
    pub data_norm: f64,
    pub c_hat: f64,
    pub eps_hat: f64,
    pub norm_u: f64,
    pub norm_b: f64,
}

impl MildSolution {
    pub fn times(&self) -> &TimeGrid {
        self.u.times()
    }

    pub fn plan(&self) -> &DuhamelPlan {
        &self.plan
    }

    /// Successive residual ratios `r_n / r_{n-1}`.
    pub fn ratios(&self) -> Vec<f64> {
        self.residuals.windows(2).map(|w| w[1] / w[0]).collect()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios().into_iter().reduce(f64::max)
    }

    /// `u(t) = e^{-tS}u₀ + B(t)` at an arbitrary `t ∈ [0, T]`.
    pub fn u_at(&self, t: f64) -> Result<FormField> {
        self.times().check_time(t)?;
        let heat = self.u0.apply_shell_multiplier(&heat_table(self.u0.grid(), t));
        heat.add(&self.plan.integrate_at(&self.forcing.u, t)?)
    }

    /// `b(t) = e^{-tM}b₀ + B₃(t)` at an arbitrary `t ∈ [0, T]`.
    pub fn b_at(&self, t: f64) -> Result<FormField> {
        self.times().check_time(t)?;
        let heat = self.b0.apply_shell_multiplier(&heat_table(self.b0.grid(), t));
        heat.add(&self.plan.integrate_at(&self.forcing.b, t)?)
    }

    pub fn norms(&self) -> Result<CriticalNorms> {
        critical_norms(&self.u, &self.b, &self.config.exponents)
    }

    /// `‖u - a₁ - B₁(u,u) - B₂(b,b)‖_{𝒰_T} + ‖b - a₂ - B₃(u,b)‖_{ℬ_T}`.
    pub fn fixed_point_residual(&self) -> Result<f64> {
        let times = self.times();
        let a = State {
            u: Trajectory::heat_flow(times, &self.u0)?,
            b: Trajectory::heat_flow(times, &self.b0)?,
        };
        let cur = State { u: self.u.clone(), b: self.b.clone() };
        let f = coupled_forcing(&cur, &cur)?;
        let image = State {
            u: a.u.add(&self.plan.integrate(&f.u)?)?,
            b: a.b.add(&self.plan.integrate(&f.b)?)?,
        };
        let diff = cur.axpy(-1.0, &image)?;
        Ok(critical_norms(&diff.u, &diff.b, &self.config.exponents)?.total())
    }

    pub fn summary(&self) -> Result<SolveSummary> {
        let norms = self.norms()?;
        Ok(SolveSummary {
            horizon: self.times().horizon(),
            nodes: self.config.nodes,
            gamma: self.config.gamma,
            q: self.config.exponents.q(),
            alpha: self.config.exponents.alpha(),
            tol: self.config.tol,
            max_iter: self.config.max_iter,
            iterations: self.iterations,
            converged: self.converged,
            residuals: self.residuals.clone(),
            iterate_norms: self.iterate_norms.clone(),
            max_ratio: self.max_ratio(),
            data_norm: self.data_norm,
            c_hat: self.c_hat,
            eps_hat: self.eps_hat,
            norm_u: norms.norm_u,
            norm_b: norms.norm_b,
        })
    }
}

fn grew_three_times(r: &[f64]) -> bool {
    r.len() >= 4 && r[r.len() - 4..].windows(2).all(|w| w[1] > w[0])
}

/// Picard iteration `𝒖⁽ⁿ⁺¹⁾ = 𝒂 + 𝑩(𝒖⁽ⁿ⁾, 𝒖⁽ⁿ⁾)` from `𝒖⁽⁰⁾ = 𝒂`.
///
/// Stops when the residual drops below `config.tol` or after `config.max_iter`
/// updates (returning an unconverged solution). Fails with
/// [`MhdError::Divergence`] when the residual grows over three consecutive
/// iterations or the iterates blow up.
pub fn picard_solve(u0: &FormField, b0: &FormField, horizon: f64, config: &SolverConfig) -> Result<MildSolution> {
    config.validate()?;
    let times = TimeGrid::new(horizon, config.nodes, config.gamma)?;
    let (u0, b0) = prepare_initial_data(u0, b0)?;
    let plan = DuhamelPlan::new(u0.grid(), &times);
    let exps = &config.exponents;
    let a = State {
        u: Trajectory::heat_flow(&times, &u0)?,
        b: Trajectory::heat_flow(&times, &b0)?,
    };
    let data_norm = critical_norms(&a.u, &a.b, exps)?.total();
    let mut cur = a.clone();
    let mut cur_norm = data_norm;
    let mut residuals = Vec::new();
    let mut norms = Vec::new();
    let mut c_hat = 0.0f64;
    let mut converged = false;
    let mut forcing = None;
    for n in 1..=config.max_iter {
        let f = coupled_forcing(&cur, &cur)?;
        let image = State {
            u: plan.integrate(&f.u)?,
            b: plan.integrate(&f.b)?,
        };
        let image_norm = critical_norms(&image.u, &image.b, exps)?.total();
        if cur_norm > 0.0 {
            c_hat = c_hat.max(image_norm / (cur_norm * cur_norm));
        }
        let next = a.axpy(1.0, &image)?;
        let diff = next.axpy(-1.0, &cur)?;
        let r = critical_norms(&diff.u, &diff.b, exps)?.total();
        let next_norm = critical_norms(&next.u, &next.b, exps)?.total();
        residuals.push(r);
        norms.push(next_norm);
        if !r.is_finite() || !next_norm.is_finite() || next_norm > BLOWUP_NORM || grew_three_times(&residuals) {
            return Err(MhdError::Divergence { iterations: n, residuals, norms });
        }
        cur = next;
        cur_norm = next_norm;
        forcing = Some(f);
        if r < config.tol {
            converged = true;
            break;
        }
    }
    let iterations = residuals.len();
    Ok(MildSolution {
        config: *config,
        u0,
        b0,
        u: cur.u,
        b: cur.b,
        iterations,
        residuals,
        iterate_norms: norms,
        data_norm,
        c_hat,
        eps_hat: if c_hat > 0.0 { 0.25 / c_hat } else { f64::INFINITY },
        converged,
        plan,
        forcing: forcing.expect("max_iter ≥ 1"),
    })
}

/// `L³` boundedness and continuity samples of a solution.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    /// Dyadic sample times `T·2^{-k}`, ascending.
    pub times: Vec<f64>,
    pub l3_u: Vec<f64>,
    pub l3_b: Vec<f64>,
    /// `‖u₀‖₃ + ‖b₀‖₃`.
    pub data_norm: f64,
    /// `max_t ‖u(t)‖₃ + ‖b(t)‖₃`.
    pub sup: f64,
    /// Time at which the supremum is attained.
    pub argmax: f64,
    /// `‖u(t_{k+1}) - u(t_k)‖₃ + ‖b(t_{k+1}) - b(t_k)‖₃` between consecutive samples.
    pub increments: Vec<f64>,
    /// `‖u(t_min) - u₀‖₃ + ‖b(t_min) - b₀‖₃`.
    pub initial_gap: f64,
}

impl ContinuityReport {
    /// `sup ≤ k·(‖u₀‖₃ + ‖b₀‖₃ + 1)`.
    pub fn bounded(&self, k: f64) -> bool {
        self.sup.is_finite() && self.sup <= k * (self.data_norm + 1.0)
    }

    /// The gap to the initial data at the smallest sampled time is below
    /// `rel·(‖u₀‖₃ + ‖b₀‖₃)` (or exactly zero for zero data).
    pub fn continuous_at_zero(&self, rel: f64) -> bool {
        self.initial_gap <= rel * self.data_norm
    }
}

/// Sample `‖u(t)‖₃`, `‖b(t)‖₃` at `t = T·2^{-k}`, `k = 0..=levels`.
pub fn l3_continuity_check(sol: &MildSolution, levels: usize) -> Result<ContinuityReport> {
    let horizon = sol.times().horizon();
    let times: Vec<f64> = (0..=levels).rev().map(|k| horizon * 0.5f64.powi(k as i32)).collect();
    let mut samples = Vec::with_capacity(times.len());
    for &t in &times {
        samples.push((sol.u_at(t)?.into_physical(), sol.b_at(t)?.into_physical()));
    }
    let l3_u = samples.iter().map(|s| s.0.lq_norm(3.0)).collect::<Result<Vec<_>>>()?;
    let l3_b = samples.iter().map(|s| s.1.lq_norm(3.0)).collect::<Result<Vec<_>>>()?;
    let mut increments = Vec::with_capacity(times.len().saturating_sub(1));
    for w in samples.windows(2) {
        increments.push(w[1].0.sub(&w[0].0)?.lq_norm(3.0)? + w[1].1.sub(&w[0].1)?.lq_norm(3.0)?);
    }
    let (sup, argmax) = l3_u
        .iter()
        .zip(&l3_b)
        .zip(&times)
        .map(|((a, b), &t)| (a + b, t))
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let initial_gap =
        samples[0].0.sub(&sol.u0)?.lq_norm(3.0)? + samples[0].1.sub(&sol.b0)?.lq_norm(3.0)?;
    Ok(ContinuityReport {
        data_norm: sol.u0.lq_norm(3.0)? + sol.b0.lq_norm(3.0)?,
        times,
        l3_u,
        l3_b,
        sup,
        argmax,
        increments,
        initial_gap,
    })
}
