//! Duhamel integrals `∫₀ᵗ e^{-(t-s)A} F(s) ds` for the heat semigroups and the
//! bilinear operators `B₁`, `B₂`, `B₃` built on them.
//!
//! The forcing is sampled at the time nodes and interpolated by 4-point
//! Lagrange cubics in `σ = (t/T)^{1/γ}`. Between consecutive nodes the integral
//! is advanced exactly in the semigroup,
//!
//! ```text
//! I(t_m) = e^{-(t_m - t_{m-1})λ} I(t_{m-1}) + Σ_i w_i(λ) F(t_{s+i}),
//! ```
//!
//! with `λ = |k|²` and weights `w_i` tabulated once per shell by Gauss–Legendre
//! quadrature in `σ` on panels graded toward the right end of the interval.
//! Since `ℙ` and `ℚ` commute with the multiplier, one plan serves both
//! semigroups.

use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::OnceLock;

use crate::error::{MhdError, Result};
use crate::hodge::leray_p;
use crate::lambda3::{Grade, GradeMask};
use crate::mild::time::{TimeGrid, Trajectory};
use crate::spectral::{pointwise_product, FormField, Grid, ProductKind, Representation};

const GL_POINTS: usize = 8;
const CHUNK: usize = 4096;
/// Beyond `λ(t - s)` of this size the kernel is below `e^{-40}`.
const STIFF_CUTOFF: f64 = 40.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// `(e^{-(t_end - t_{m-1})λ}, w)` for interval `m` truncated at `t_end`.
fn interval_weights(times: &TimeGrid, lambda: f64, m: usize, t_end: f64) -> (f64, [f64; 4]) {
    let t0 = times.node(m - 1);
    let s0 = times.sigma(m - 1);
    let s1 = if t_end == times.node(m) { times.sigma(m) } else { times.sigma_of(t_end) };
    let start = times.stencil(m);
    let (horizon, gamma) = (times.horizon(), times.gamma());
    let stiff = lambda * (t_end - t0);
    let (gx, gw) = gl8();
    let mut w = [0.0; 4];
    let mut accumulate = |sigma: f64, weight: f64| {
        let l = times.lagrange(start, sigma);
        for i in 0..4 {
            w[i] += weight * l[i];
        }
    };
    // Inside the boundary layer integrate in the lag r = t_end - s, on panels
    // of exponent width ≤ 2; the rest in σ.
    let mut sigma_end = s1;
    if stiff > 2.0 {
        let layer = (STIFF_CUTOFF / lambda).min(t_end - t0);
        let steps = (lambda * layer / 2.0).ceil() as usize;
        for k in 0..steps {
            let (ra, rb) = (layer * k as f64 / steps as f64, layer * (k + 1) as f64 / steps as f64);
            let (mid, half) = (0.5 * (ra + rb), 0.5 * (rb - ra));
            for (x, wx) in gx.iter().zip(gw) {
                let r = mid + half * x;
                accumulate(times.sigma_of(t_end - r), half * wx * (-lambda * r).exp());
            }
        }
        sigma_end = if layer < t_end - t0 { times.sigma_of(t_end - layer) } else { s0 };
    }
    if sigma_end > s0 {
        let (mid, half) = (0.5 * (s0 + sigma_end), 0.5 * (sigma_end - s0));
        for (x, wx) in gx.iter().zip(gw) {
            let sigma = mid + half * x;
            let s = horizon * sigma.powf(gamma);
            let jac = horizon * gamma * sigma.powf(gamma - 1.0);
            accumulate(sigma, half * wx * jac * (-lambda * (t_end - s).max(0.0)).exp());
        }
    }
    ((-stiff).exp(), w)
}

/// Precomputed per-shell decay factors and interpolation weights for every
/// interval of a time grid.
#[derive(Clone, Debug)]
pub struct DuhamelPlan {
    grid: Grid,
    times: TimeGrid,
    /// Slot of each shell value, `usize::MAX` if the shell does not occur.
    slot: Vec<usize>,
    lambdas: Vec<f64>,
    decay: Vec<Vec<f64>>,
    weights: Vec<Vec<[f64; 4]>>,
}

impl DuhamelPlan {
    pub fn new(grid: &Grid, times: &TimeGrid) -> Self {
        let mut present = vec![false; grid.max_shell() as usize + 1];
        for &s in grid.shells() {
            present[s as usize] = true;
        }
        let mut slot = vec![usize::MAX; present.len()];
        let mut lambdas = Vec::new();
        let k2 = grid.kappa().powi(2);
        for (s, &p) in present.iter().enumerate() {
            if p {
                slot[s] = lambdas.len();
                lambdas.push(s as f64 * k2);
            }
        }
        let rows: Vec<(Vec<f64>, Vec<[f64; 4]>)> = (1..=times.count())
            .into_par_iter()
            .map(|m| {
                lambdas
                    .iter()
                    .map(|&l| interval_weights(times, l, m, times.node(m)))
                    .unzip()
            })
            .collect();
        let (decay, weights) = rows.into_iter().unzip();
        DuhamelPlan {
            grid: grid.clone(),
            times: times.clone(),
            slot,
            lambdas,
            decay,
            weights,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    fn check_forcing(&self, forcing: &Trajectory) -> Result<()> {
        if *forcing.times() != self.times || *forcing.grid() != self.grid {
            return Err(MhdError::SizeMismatch("forcing sampled on a different grid".into()));
        }
        Ok(())
    }

    fn step(
        &self,
        prev: &FormField,
        forcing: &Trajectory,
        m: usize,
        decay: &[f64],
        weights: &[[f64; 4]],
    ) -> FormField {
        let start = self.times.stencil(m);
        let mask = prev.mask();
        let shells = self.grid.shells();
        let mut out = FormField::zeros(&self.grid, mask, Representation::Spectral);
        let blades: Vec<usize> = out.blades().collect();
        for blade in blades {
            let p = prev.component(blade).expect("mask checked");
            let f: [&[Complex64]; 4] = std::array::from_fn(|i| {
                forcing.field(start + i).component(blade).expect("mask checked")
            });
            let dst = out.component_mut(blade).expect("allocated");
            dst.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (off, z) in chunk.iter_mut().enumerate() {
                    let flat = base + off;
                    let k = self.slot[shells[flat] as usize];
                    let w = &weights[k];
                    *z = p[flat] * decay[k]
                        + f[0][flat] * w[0]
                        + f[1][flat] * w[1]
                        + f[2][flat] * w[2]
                        + f[3][flat] * w[3];
                }
            });
        }
        out
    }

    /// `∫₀^{t_j} e^{-(t_j - s)|k|²} F(s) ds` at every node.
    pub fn integrate(&self, forcing: &Trajectory) -> Result<Trajectory> {
        self.check_forcing(forcing)?;
        let grade = forcing.grade();
        let mut out = Vec::with_capacity(self.times.count() + 1);
        out.push(FormField::zeros(&self.grid, GradeMask::single(grade), Representation::Spectral));
        for m in 1..=self.times.count() {
            let next = self.step(&out[m - 1], forcing, m, &self.decay[m - 1], &self.weights[m - 1]);
            out.push(next);
        }
        Trajectory::new(self.times.clone(), grade, out)
    }

    /// The same integral at an arbitrary `t ∈ [0, T]`.
    pub fn integrate_at(&self, forcing: &Trajectory, t: f64) -> Result<FormField> {
        self.check_forcing(forcing)?;
        self.times.check_time(t)?;
        let mask = GradeMask::single(forcing.grade());
        let mut acc = FormField::zeros(&self.grid, mask, Representation::Spectral);
        if t == 0.0 {
            return Ok(acc);
        }
        let last = self.times.locate(t);
        for m in 1..last {
            acc = self.step(&acc, forcing, m, &self.decay[m - 1], &self.weights[m - 1]);
        }
        let (decay, weights): (Vec<f64>, Vec<[f64; 4]>) = self
            .lambdas
            .par_iter()
            .map(|&l| interval_weights(&self.times, l, last, t))
            .unzip();
        Ok(self.step(&acc, forcing, last, &decay, &weights))
    }
}

/// The three Duhamel bilinear operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bilinear {
    /// `B₁(u, v) = ∫ e^{-(t-s)S} ℙ(-u⌟dv) ds`, 1-forms to 1-form.
    B1,
    /// `B₂(b, b') = ∫ e^{-(t-s)S} ℙ(-d*b⌟b') ds`, 2-forms to 1-form.
    B2,
    /// `B₃(u, b) = ∫ e^{-(t-s)M} (-d(u⌟b)) ds`, 1-form and 2-form to 2-form.
    B3,
}

impl Bilinear {
    fn grades(self) -> (Grade, Grade) {
        match self {
            Bilinear::B1 => (Grade::ONE, Grade::ONE),
            Bilinear::B2 => (Grade::TWO, Grade::TWO),
            Bilinear::B3 => (Grade::ONE, Grade::TWO),
        }
    }

    /// The integrand `F(s)` at a single time.
    pub fn integrand(self, x: &FormField, y: &FormField) -> Result<FormField> {
        let (gx, gy) = self.grades();
        x.ensure_grade(gx, "first argument")?;
        y.ensure_grade(gy, "second argument")?;
        match self {
            Bilinear::B1 => leray_p(&pointwise_product(ProductKind::InteriorUDu, x, &y.d())?.scale(-1.0)),
            Bilinear::B2 => leray_p(&pointwise_product(ProductKind::InteriorDstarbB, &x.delta(), y)?.scale(-1.0)),
            Bilinear::B3 => Ok(pointwise_product(ProductKind::InteriorUB, x, y)?.d().scale(-1.0)),
        }
    }

    /// The integrand sampled at every node.
    pub fn forcing(self, x: &Trajectory, y: &Trajectory) -> Result<Trajectory> {
        if x.times() != y.times() {
            return Err(MhdError::SizeMismatch("arguments on different time grids".into()));
        }
        let out_grade = if self == Bilinear::B3 { Grade::TWO } else { Grade::ONE };
        let fields = x
            .fields()
            .par_iter()
            .zip(y.fields())
            .map(|(a, b)| self.integrand(a, b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(x.times().clone(), out_grade, fields)
    }

    /// The operator at every node.
    pub fn apply(self, plan: &DuhamelPlan, x: &Trajectory, y: &Trajectory) -> Result<Trajectory> {
        plan.integrate(&self.forcing(x, y)?)
    }

    /// The operator at an arbitrary `t ∈ [0, T]`.
    pub fn apply_at(self, plan: &DuhamelPlan, x: &Trajectory, y: &Trajectory, t: f64) -> Result<FormField> {
        plan.times().check_time(t)?;
        plan.integrate_at(&self.forcing(x, y)?, t)
    }
}

/// A velocity/magnetic pair of trajectories.
#[derive(Clone, Debug)]
pub struct State {
    pub u: Trajectory,
    pub b: Trajectory,
}

impl State {
    pub fn axpy(&self, a: f64, other: &State) -> Result<State> {
        Ok(State {
            u: self.u.axpy(a, &other.u)?,
            b: self.b.axpy(a, &other.b)?,
        })
    }

    pub fn scale(&self, s: f64) -> State {
        State { u: self.u.scale(s), b: self.b.scale(s) }
    }
}

/// Nodal forcing of the coupled operator
/// `𝑩((u,b),(u',b')) = (B₁(u,u') + B₂(b,b'), B₃(u,b'))`.
pub fn coupled_forcing(x: &State, y: &State) -> Result<State> {
    let times = x.u.times();
    if x.b.times() != times || y.u.times() != times || y.b.times() != times {
        return Err(MhdError::SizeMismatch("state components on different time grids".into()));
    }
    let pairs = (0..=times.count())
        .into_par_iter()
        .map(|j| {
            let (u, b) = (x.u.field(j), x.b.field(j));
            let (v, c) = (y.u.field(j), y.b.field(j));
            let rotation = pointwise_product(ProductKind::InteriorUDu, u, &v.d())?;
            let lorentz = pointwise_product(ProductKind::InteriorDstarbB, &b.delta(), c)?;
            let fu = leray_p(&rotation.add(&lorentz)?.scale(-1.0))?;
            let fb = pointwise_product(ProductKind::InteriorUB, u, c)?.d().scale(-1.0);
            Ok((fu, fb))
        })
        .collect::<Result<Vec<_>>>()?;
    let (fu, fb): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(State {
        u: Trajectory::new(times.clone(), Grade::ONE, fu)?,
        b: Trajectory::new(times.clone(), Grade::TWO, fb)?,
    })
}

/// `𝑩(x, y)` at every node.
pub fn coupled_apply(plan: &DuhamelPlan, x: &State, y: &State) -> Result<State> {
    let f = coupled_forcing(x, y)?;
    Ok(State {
        u: plan.integrate(&f.u)?,
        b: plan.integrate(&f.b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_15() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn weights_integrate_exponentials() {
        let tg = TimeGrid::new(1.0, 16, 2.0).unwrap();
        // F ≡ 1: Σ w_i = (1 - e^{-λΔt})/λ
        for lambda in [0.0, 1.0, 50.0, 5e3, 1e6] {
            for m in [1, 2, 9, 16] {
                let (dec, w) = interval_weights(&tg, lambda, m, tg.node(m));
                let dt = tg.node(m) - tg.node(m - 1);
                let exact = if lambda == 0.0 { dt } else { -(-lambda * dt).exp_m1() / lambda };
                let err = (w.iter().sum::<f64>() - exact).abs() / exact;
                assert!(err <= 1e-12, "λ={lambda} m={m} err={err:e}");
                assert!((dec - (-lambda * dt).exp()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn integrates_constant_forcing_exactly() {
        let g = Grid::standard(8).unwrap();
        let tg = TimeGrid::new(0.5, 16, 2.0).unwrap();
        let f0 = FormField::one_form(&g, |x| [0.0, 0.0, (2.0 * x[0]).cos()]);
        let forcing = Trajectory::from_fn(&tg, Grade::ONE, |_| Ok(f0.clone())).unwrap();
        let plan = DuhamelPlan::new(&g, &tg);
        let out = plan.integrate(&forcing).unwrap();
        for j in [1, 7, 16] {
            let t = tg.node(j);
            let exact = f0.scale(-(-4.0 * t as f64).exp_m1() / 4.0);
            let err = out.field(j).sub(&exact).unwrap().l2_norm() / exact.l2_norm();
            assert!(err < 1e-13, "node {j}: {err}");
        }
        let t = 0.3;
        let exact = f0.scale(-(-4.0 * t as f64).exp_m1() / 4.0);
        let err = plan.integrate_at(&forcing, t).unwrap().sub(&exact).unwrap().l2_norm() / exact.l2_norm();
        assert!(err < 1e-13);
        assert!(plan.integrate_at(&forcing, 0.6).is_err());
    }

    #[test]
    fn cubic_forcing_in_sigma_is_exact() {
        let g = Grid::standard(8).unwrap();
        let tg = TimeGrid::new(2.0, 12, 2.0).unwrap();
        let f0 = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]);
        // F(s) = s = Tσ², a polynomial in σ
        let forcing = Trajectory::from_fn(&tg, Grade::ONE, |s| Ok(f0.scale(s))).unwrap();
        let plan = DuhamelPlan::new(&g, &tg);
        let out = plan.integrate(&forcing).unwrap();
        let t: f64 = tg.node(12);
        // ∫₀ᵗ e^{-(t-s)} s ds = t - 1 + e^{-t}
        let exact = f0.scale(t - 1.0 + (-t).exp());
        assert!(out.field(12).sub(&exact).unwrap().l2_norm() < 1e-13 * exact.l2_norm());
    }
}
