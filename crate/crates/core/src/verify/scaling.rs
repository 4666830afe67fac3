//! Cross-grid check of the parabolic scaling `u_λ(t,x) = λu(λ²t, λx)`.
//!
//! The problem on the torus of period `L` with horizon `T` is compared with the
//! problem on period `L/λ` with horizon `T/λ²` and data `λu₀(λx)`, on grids with
//! the same number of points. Node `j` of the second run corresponds to node
//! `j` of the first.

use serde::Serialize;

use crate::error::{MhdError, Result};
use crate::mild::{picard_solve, MildSolution, SolverConfig};
use crate::spectral::{FormField, Grid};

/// The field with samples (or coefficients) multiplied by `factor`, moved to a
/// grid with the same `n`. Sample `i` of the result represents `factor·f(x_i)`,
/// so on a grid of period `L/λ` and `factor = λ` this is `λf(λx)`.
pub fn rescale(f: &FormField, grid: &Grid, factor: f64) -> Result<FormField> {
    if grid.n() != f.grid().n() {
        return Err(MhdError::SizeMismatch("rescaling needs grids with equal n".into()));
    }
    let buffers = f
        .blades()
        .map(|i| f.component(i).expect("blade in mask").iter().map(|z| z * factor).collect())
        .collect();
    FormField::from_components(grid, f.mask(), f.representation(), buffers)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub horizon: f64,
    pub period: f64,
    /// `max_j ‖(u_λ, b_λ)(t_j/λ²) - λ(u, b)(t_j)‖ / max_j ‖λ(u, b)(t_j)‖`, compared
    /// sample by sample.
    pub field_error: f64,
    /// `max_j |N_λ(j) - N(j)| / max_j N(j)` with `N = ‖u‖₃ + ‖b‖₃`.
    pub l3_error: f64,
    pub iterations: (usize, usize),
    pub converged: bool,
}

fn pair_norm(u: &FormField, b: &FormField) -> f64 {
    (u.l2_norm().powi(2) + b.l2_norm().powi(2)).sqrt()
}

pub fn compare_scaled(base: &MildSolution, scaled: &MildSolution, lambda: f64) -> Result<ScalingReport> {
    let grid_s = scaled.u0.grid().clone();
    let count = base.times().count();
    if scaled.times().count() != count {
        return Err(MhdError::SizeMismatch("runs with different node counts".into()));
    }
    let (mut diff, mut size, mut l3_diff, mut l3_size) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j in 0..=count {
        let u = rescale(base.u.field(j), &grid_s, lambda)?;
        let b = rescale(base.b.field(j), &grid_s, lambda)?;
        let (us, bs) = (scaled.u.field(j), scaled.b.field(j));
        diff = diff.max(pair_norm(&us.sub(&u)?, &bs.sub(&b)?));
        size = size.max(pair_norm(&u, &b));
        let n = base.u.field(j).lq_norm(3.0)? + base.b.field(j).lq_norm(3.0)?;
        let ns = us.lq_norm(3.0)? + bs.lq_norm(3.0)?;
        l3_diff = l3_diff.max((ns - n).abs());
        l3_size = l3_size.max(n);
    }
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    Ok(ScalingReport {
        lambda,
        horizon: base.times().horizon(),
        period: base.u0.grid().period(),
        field_error: rel(diff, size),
        l3_error: rel(l3_diff, l3_size),
        iterations: (base.iterations, scaled.iterations),
        converged: base.converged && scaled.converged,
    })
}

/// Solve on `(L, n, T)` and on `(L/λ, n, T/λ²)` and compare.
pub fn scaling_covariance(
    u0: &FormField,
    b0: &FormField,
    horizon: f64,
    lambda: f64,
    config: &SolverConfig,
) -> Result<ScalingReport> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(MhdError::InvalidParameter(format!("scaling factor {lambda} must be positive")));
    }
    let grid = u0.grid();
    let small = Grid::new(grid.n(), grid.period() / lambda)?;
    let base = picard_solve(u0, b0, horizon, config)?;
    let scaled = picard_solve(
        &rescale(u0, &small, lambda)?,
        &rescale(b0, &small, lambda)?,
        horizon / (lambda * lambda),
        config,
    )?;
    compare_scaled(&base, &scaled, lambda)
}
