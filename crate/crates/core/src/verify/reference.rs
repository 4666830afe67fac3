//! Method-of-lines reference integrator: integrating-factor RK4 on the
//! projected spectral ODE
//!
//! ```text
//! ∂ₜû = -|k|²û + P̂(-u⌟du - d*b⌟b),   ∂ₜb̂ = -|k|²b̂ - (d(u⌟b))ˆ,
//! ```
//!
//! with its own vector-form projection. It uses only the grid, transform and
//! product primitives and none of the Duhamel machinery.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{MhdError, Result};
use crate::lambda3::{Grade, Multivector};
use crate::spectral::{pointwise_product, FormField, Grid, ProductKind};

/// Abort when `‖u‖ + ‖b‖` exceeds this multiple of its initial value.
pub const GROWTH_LIMIT: f64 = 1e3;

/// Snapshots of an IF-RK4 run.
#[derive(Clone, Debug)]
pub struct ReferenceRun {
    /// Largest step actually used.
    pub dt: f64,
    pub horizon: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub u: Vec<FormField>,
    pub b: Vec<FormField>,
    /// Largest relative constraint defect `‖d*u‖/(κ‖u‖) + ‖db‖/(κ‖b‖)` seen.
    pub max_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceSummary {
    pub dt: f64,
    pub horizon: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub max_defect: f64,
}

impl ReferenceRun {
    /// Snapshot index at time `t` (to relative `1e-12`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * self.horizon.max(1.0))
    }

    pub fn summary(&self) -> ReferenceSummary {
        ReferenceSummary {
            dt: self.dt,
            horizon: self.horizon,
            steps: self.steps,
            times: self.times.clone(),
            max_defect: self.max_defect,
        }
    }
}

/// Divergence-free part of a 1-form, `v̂ - k(k·v̂)/|k|²`.
fn project_velocity(u: &FormField) -> FormField {
    let grid = u.grid().clone();
    u.map_modes(u.mask(), |flat, m| {
        let k2 = grid.symbol_sq(flat);
        if k2 == 0.0 {
            return *m;
        }
        let k = grid.symbol(flat);
        let v = m.vector_part();
        let dot = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        Multivector::vector([v[0] - dot * k[0], v[1] - dot * k[1], v[2] - dot * k[2]])
    })
}

/// Exact part of a 2-form: divergence-free, mean-free vector proxy.
fn project_magnetic(b: &FormField) -> FormField {
    let grid = b.grid().clone();
    b.map_modes(b.mask(), |flat, m| {
        let k2 = grid.symbol_sq(flat);
        if k2 == 0.0 {
            return Multivector::zero();
        }
        let k = grid.symbol(flat);
        let c = m.coeffs;
        // blades e12, e13, e23 sit at 4, 5, 6; proxy (c23, -c13, c12)
        let v = [c[6], -c[5], c[4]];
        let dot = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        let p = [v[0] - dot * k[0], v[1] - dot * k[1], v[2] - dot * k[2]];
        let mut out = Multivector::<Complex64>::zero();
        out.coeffs[4] = p[2];
        out.coeffs[5] = -p[1];
        out.coeffs[6] = p[0];
        out
    })
}

fn defect(u: &FormField, b: &FormField) -> f64 {
    let kappa = u.grid().kappa();
    let rel = |num: f64, den: f64| if den > 0.0 { num / (kappa * den) } else { 0.0 };
    let mean_b = b.mean().norm() * u.grid().volume().sqrt();
    rel(u.delta().l2_norm(), u.l2_norm()) + rel(b.d().l2_norm() + kappa * mean_b, b.l2_norm())
}

#[derive(Clone)]
struct Pair {
    u: FormField,
    b: FormField,
}

impl Pair {
    fn axpy(&self, a: f64, o: &Pair) -> Result<Pair> {
        Ok(Pair { u: self.u.axpy(a, &o.u)?, b: self.b.axpy(a, &o.b)? })
    }

    fn decay(&self, table: &[f64]) -> Pair {
        Pair {
            u: self.u.apply_shell_multiplier(table),
            b: self.b.apply_shell_multiplier(table),
        }
    }

    fn norm(&self) -> f64 {
        self.u.l2_norm() + self.b.l2_norm()
    }
}

fn nonlinear(y: &Pair) -> Result<Pair> {
    let rotation = pointwise_product(ProductKind::InteriorUDu, &y.u, &y.u.d())?;
    let lorentz = pointwise_product(ProductKind::InteriorDstarbB, &y.b.delta(), &y.b)?;
    Ok(Pair {
        u: project_velocity(&rotation.add(&lorentz)?.scale(-1.0)),
        b: pointwise_product(ProductKind::InteriorUB, &y.u, &y.b)?.d().scale(-1.0),
    })
}

fn decay_table(grid: &Grid, t: f64) -> Vec<f64> {
    let k2 = grid.kappa().powi(2);
    (0..=grid.max_shell()).map(|s| (-t * k2 * s as f64).exp()).collect()
}

fn rk4_step(y: &Pair, h: f64) -> Result<Pair> {
    let grid = y.u.grid();
    let (half, full) = (decay_table(grid, 0.5 * h), decay_table(grid, h));
    let k1 = nonlinear(y)?;
    let k2 = nonlinear(&y.axpy(0.5 * h, &k1)?.decay(&half))?;
    let k3 = nonlinear(&y.decay(&half).axpy(0.5 * h, &k2)?)?;
    let k4 = nonlinear(&y.decay(&full).axpy(h, &k3.decay(&half))?)?;
    let mid = k2.axpy(1.0, &k3)?.decay(&half);
    let incr = k1.decay(&full).axpy(2.0, &mid)?.axpy(1.0, &k4)?;
    y.decay(&full).axpy(h / 6.0, &incr)
}

/// Integrate from `(u₀, b₀)` to `horizon` with steps of at most `dt`, keeping
/// snapshots at `t = 0`, at every entry of `snapshot_times` and at `horizon`.
pub fn reference_solve(
    u0: &FormField,
    b0: &FormField,
    horizon: f64,
    dt: f64,
    snapshot_times: &[f64],
) -> Result<ReferenceRun> {
    u0.ensure_grade(Grade::ONE, "u₀")?;
    b0.ensure_grade(Grade::TWO, "b₀")?;
    if u0.grid() != b0.grid() {
        return Err(MhdError::SizeMismatch("u₀ and b₀ on different grids".into()));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(MhdError::InvalidParameter(format!("horizon {horizon} must be positive")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(MhdError::InvalidParameter(format!("time step {dt} must be positive")));
    }
    let mut targets: Vec<f64> = snapshot_times.to_vec();
    if targets.iter().any(|&t| !(t > 0.0 && t <= horizon)) {
        return Err(MhdError::InvalidParameter("snapshot times must lie in (0, T]".into()));
    }
    targets.push(horizon);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let mut y = Pair {
        u: project_velocity(u0),
        b: project_magnetic(b0),
    };
    let initial = y.norm();
    let limit = GROWTH_LIMIT * initial.max(f64::MIN_POSITIVE);
    let mut max_defect = defect(&y.u, &y.b);
    let mut times = vec![0.0];
    let mut us = vec![y.u.clone()];
    let mut bs = vec![y.b.clone()];
    let (mut t, mut steps, mut used) = (0.0, 0usize, 0.0f64);
    for &target in &targets {
        let n = ((target - t) / dt).ceil().max(1.0) as usize;
        let h = (target - t) / n as f64;
        used = used.max(h);
        for i in 0..n {
            y = rk4_step(&y, h)?;
            steps += 1;
            let norm = y.norm();
            let now = t + h * (i + 1) as f64;
            if !norm.is_finite() || norm > limit {
                return Err(MhdError::Unstable { t: now, norm, limit });
            }
            max_defect = max_defect.max(defect(&y.u, &y.b));
        }
        t = target;
        times.push(t);
        us.push(y.u.clone());
        bs.push(y.b.clone());
    }
    Ok(ReferenceRun {
        dt: used,
        horizon,
        steps,
        times,
        u: us,
        b: bs,
        max_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge::{leray_p, q_proj};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projections_agree_with_hodge() {
        let g = Grid::standard(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = FormField::one_form(&g, |_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let b = FormField::two_form(&g, |_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        assert!(project_velocity(&u).sub(&leray_p(&u).unwrap()).unwrap().l2_norm() < 1e-13);
        assert!(project_magnetic(&b).sub(&q_proj(&b).unwrap()).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid::standard(8).unwrap();
        let z1 = FormField::one_form(&g, |_| [0.0; 3]);
        let z2 = FormField::two_form(&g, |_| [0.0; 3]);
        let run = reference_solve(&z1, &z2, 0.1, 0.01, &[]).unwrap();
        assert_eq!(run.u.last().unwrap().max_abs(), 0.0);
        assert_eq!(run.b.last().unwrap().max_abs(), 0.0);
        assert_eq!(run.steps, 10);
    }

    #[test]
    fn shear_mode_decays_exactly() {
        let g = Grid::standard(16).unwrap();
        let u0 = FormField::one_form(&g, |x| [0.3 * x[1].sin(), 0.0, 0.0]);
        let b0 = FormField::two_form(&g, |_| [0.0; 3]);
        let run = reference_solve(&u0, &b0, 1.0, 1e-3, &[0.5]).unwrap();
        assert_eq!(run.times, vec![0.0, 0.5, 1.0]);
        let exact = u0.scale((-1.0f64).exp());
        let err = run.u[2].sub(&exact).unwrap().l2_norm() / exact.l2_norm();
        assert!(err < 1e-10, "{err}");
        assert!(run.max_defect < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = Grid::standard(8).unwrap();
        let u0 = FormField::one_form(&g, |_| [0.0; 3]);
        let b0 = FormField::two_form(&g, |_| [0.0; 3]);
        assert!(reference_solve(&u0, &b0, 1.0, 0.0, &[]).is_err());
        assert!(reference_solve(&u0, &b0, -1.0, 0.1, &[]).is_err());
        assert!(reference_solve(&u0, &b0, 1.0, 0.1, &[2.0]).is_err());
        assert!(reference_solve(&b0, &u0, 1.0, 0.1, &[]).is_err());
    }
}
