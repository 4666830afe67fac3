//! Hodge decomposition of periodic fields and the associated projections and
//! potential operators.
//!
//! On the torus every operator here is a Fourier multiplier built from the
//! symbols of `d` (`(ik)∧`) and `d*` (`-(ik)⌟`). For a mode with `k ≠ 0`,
//!
//! ```text
//! k∧(k⌟f̂) + k⌟(k∧f̂) = |k|² f̂
//! ```
//!
//! so the exact and coexact pieces `k∧(k⌟f̂)/|k|²` and `k⌟(k∧f̂)/|k|²` are
//! complementary orthogonal projections. Modes where the derivative symbol
//! vanishes (the mean, and the pure-Nyquist modes) form the harmonic part.

use num_complex::Complex64;

use crate::error::Result;
use crate::lambda3::{Grade, Multivector};
use crate::spectral::{ik, FormField, Grid};

/// `f = exact + coexact + harmonic` with `exact ∈ R(d)`, `coexact ∈ R(d*)` and
/// `harmonic` supported on the kernel modes.
#[derive(Clone, Debug)]
pub struct HodgeSplit {
    pub exact: FormField,
    pub coexact: FormField,
    pub harmonic: FormField,
}

impl HodgeSplit {
    pub fn reconstruct(&self) -> FormField {
        self.exact
            .add(&self.coexact)
            .and_then(|s| s.add(&self.harmonic))
            .expect("parts share a grid")
    }
}

fn real_k(grid: &Grid, flat: usize) -> [Complex64; 3] {
    grid.symbol(flat).map(|k| Complex64::new(k, 0.0))
}

fn exact_part(grid: &Grid, flat: usize, m: &Multivector<Complex64>) -> Multivector<Complex64> {
    if grid.is_kernel_mode(flat) {
        return Multivector::zero();
    }
    let k = real_k(grid, flat);
    m.interior_by(k).wedge_by(k).scale(1.0 / grid.symbol_sq(flat))
}

fn coexact_part(grid: &Grid, flat: usize, m: &Multivector<Complex64>) -> Multivector<Complex64> {
    if grid.is_kernel_mode(flat) {
        return Multivector::zero();
    }
    let k = real_k(grid, flat);
    m.wedge_by(k).interior_by(k).scale(1.0 / grid.symbol_sq(flat))
}

pub fn hodge_decompose(f: &FormField) -> HodgeSplit {
    let grid = f.grid().clone();
    let mask = f.mask();
    HodgeSplit {
        exact: f.map_modes(mask, |flat, m| exact_part(&grid, flat, m)),
        coexact: f.map_modes(mask, |flat, m| coexact_part(&grid, flat, m)),
        harmonic: compact_k(f),
    }
}

/// Helmholtz–Leray projection of 1-forms onto `N(d*)`: removes the exact part.
pub fn leray_p(f: &FormField) -> Result<FormField> {
    f.ensure_grade(Grade::ONE, "ℙ")?;
    let grid = f.grid().clone();
    Ok(f.map_modes(f.mask(), |flat, m| *m - exact_part(&grid, flat, m)))
}

/// Orthogonal projection of 2-forms onto `R(d)`: keeps the exact part only.
pub fn q_proj(f: &FormField) -> Result<FormField> {
    f.ensure_grade(Grade::TWO, "ℚ")?;
    let grid = f.grid().clone();
    Ok(f.map_modes(f.mask(), |flat, m| exact_part(&grid, flat, m)))
}

/// Potential `R` with `dR + Rd = I - K`; symbol `-(ik)⌟ / |k|²`.
pub fn homotopy_r(f: &FormField) -> FormField {
    let grid = f.grid().clone();
    f.map_modes(f.mask().lowered(), |flat, m| {
        if grid.is_kernel_mode(flat) {
            Multivector::zero()
        } else {
            -m.interior_by(ik(&grid, flat)).scale(1.0 / grid.symbol_sq(flat))
        }
    })
}

/// Potential `S` with `d*S + Sd* = I - K*`; symbol `(ik)∧ / |k|²`.
pub fn homotopy_s(f: &FormField) -> FormField {
    let grid = f.grid().clone();
    f.map_modes(f.mask().raised(), |flat, m| {
        if grid.is_kernel_mode(flat) {
            Multivector::zero()
        } else {
            m.wedge_by(ik(&grid, flat)).scale(1.0 / grid.symbol_sq(flat))
        }
    })
}

/// Finite-rank projection onto the kernel modes of the derivative symbol.
pub fn compact_k(f: &FormField) -> FormField {
    let grid = f.grid().clone();
    f.apply_multiplier(|flat| if grid.is_kernel_mode(flat) { 1.0 } else { 0.0 })
}

/// On the torus `K* = K`.
pub fn compact_kstar(f: &FormField) -> FormField {
    compact_k(f)
}

/// Relative distance of a 1-form from `N(d*)`.
pub fn velocity_defect(u: &FormField) -> Result<f64> {
    let norm = u.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(u.sub(&leray_p(u)?)?.l2_norm() / norm)
}

/// Relative distance of a 2-form from `R(d)`.
pub fn magnetic_defect(b: &FormField) -> Result<f64> {
    let norm = b.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(b.sub(&q_proj(b)?)?.l2_norm() / norm)
}

/// Output of [`reconstruct_pq`].
#[derive(Clone, Debug)]
pub struct PqReconstruction {
    /// `ℙ(R du + K u)`.
    pub u: FormField,
    /// `ℚ(S d*b + K* b)`.
    pub b: FormField,
    /// Relative distance of the input `u` from `N(d*)`.
    pub u_defect: f64,
    /// Relative distance of the input `b` from `R(d)`.
    pub b_defect: f64,
}

/// Recover `u ∈ N(d*)` from `du` and `b ∈ R(d)` from `d*b` through the potentials.
///
/// Inputs outside the subspaces are not rejected; their defects are reported.
pub fn reconstruct_pq(u: &FormField, b: &FormField) -> Result<PqReconstruction> {
    u.ensure_grade(Grade::ONE, "u")?;
    b.ensure_grade(Grade::TWO, "b")?;
    let ru = homotopy_r(&u.d()).add(&compact_k(u))?;
    let sb = homotopy_s(&b.delta()).add(&compact_kstar(b))?;
    Ok(PqReconstruction {
        u: leray_p(&ru.grade_part(Grade::ONE))?,
        b: q_proj(&sb.grade_part(Grade::TWO))?,
        u_defect: velocity_defect(u)?,
        b_defect: magnetic_defect(b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda3::GradeMask;
    use crate::spectral::{pointwise_product, ProductKind, Representation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, mask: GradeMask, seed: u64) -> FormField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FormField::from_fn(grid, mask, |_| {
            Multivector::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
        })
    }

    fn rel(a: &FormField, b: &FormField) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
    }

    #[test]
    fn gradient_is_exact() {
        let g = Grid::standard(16).unwrap();
        let f = FormField::scalar(&g, |x| x[0].sin()).d();
        let s = hodge_decompose(&f);
        assert!(rel(&s.exact, &f) < 1e-14);
        assert!(s.coexact.l2_norm() < 1e-14 && s.harmonic.l2_norm() < 1e-14);
    }

    #[test]
    fn constant_is_harmonic() {
        let g = Grid::standard(8).unwrap();
        let f = FormField::one_form(&g, |_| [1.0, -2.0, 0.5]);
        let s = hodge_decompose(&f);
        assert!(rel(&s.harmonic, &f) < 1e-14);
        assert!(s.exact.l2_norm() < 1e-14 && s.coexact.l2_norm() < 1e-14);
    }

    #[test]
    fn random_split_is_orthogonal_and_complete() {
        let g = Grid::standard(16).unwrap();
        let f = random_field(&g, GradeMask::ALL, 7);
        let s = hodge_decompose(&f);
        assert!(rel(&s.reconstruct(), &f) < 1e-13);
        let n2 = f.l2_norm().powi(2);
        for (a, b) in [(&s.exact, &s.coexact), (&s.exact, &s.harmonic), (&s.coexact, &s.harmonic)] {
            assert!(a.l2_inner(b).unwrap().abs() <= 1e-12 * n2);
        }
        // harmonic part lives on kernel modes only
        let h = s.harmonic.to_spectral();
        for flat in 0..g.len() {
            if !g.is_kernel_mode(flat) {
                assert_eq!(h.fiber(flat).norm(), 0.0);
            }
        }
    }

    #[test]
    fn leray_cases() {
        let g = Grid::standard(16).unwrap();
        let shear = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]);
        assert!(rel(&leray_p(&shear).unwrap(), &shear) < 1e-14);
        let grad = FormField::scalar(&g, |x| x[0].sin()).d();
        assert!(leray_p(&grad).unwrap().l2_norm() < 1e-14);
        let rot = pointwise_product(ProductKind::InteriorUDu, &shear, &shear.d()).unwrap();
        assert!(rot.l2_norm() > 1.0);
        assert!(leray_p(&rot).unwrap().l2_norm() < 1e-14);
        assert!(leray_p(&FormField::scalar(&g, |_| 1.0)).is_err());
    }

    #[test]
    fn leray_properties() {
        let g = Grid::standard(16).unwrap();
        let f = random_field(&g, Grade::ONE.into(), 11).grade_part(Grade::ONE);
        let p = leray_p(&f).unwrap();
        assert!(p.delta().l2_norm() <= 1e-12 * f.d().l2_norm().max(f.delta().l2_norm()));
        assert!(rel(&leray_p(&p).unwrap(), &p) < 1e-13);
        let other = random_field(&g, Grade::ONE.into(), 12).grade_part(Grade::ONE);
        let lhs = p.l2_inner(&other).unwrap();
        let rhs = f.l2_inner(&leray_p(&other).unwrap()).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * f.l2_norm() * other.l2_norm());
        // commutes with the Laplacian
        let a = leray_p(&f.laplacian()).unwrap();
        let b = leray_p(&f).unwrap().laplacian();
        assert!(rel(&a, &b) < 1e-13);
    }

    #[test]
    fn q_cases() {
        let g = Grid::standard(16).unwrap();
        let b = FormField::one_form(&g, |x| [0.0, x[0].sin(), 0.0]).d();
        assert!(rel(&q_proj(&b).unwrap(), &b) < 1e-14);
        let c = FormField::two_form(&g, |_| [1.0, 2.0, 3.0]);
        assert!(q_proj(&c).unwrap().l2_norm() < 1e-14);
        let f = random_field(&g, Grade::TWO.into(), 13).grade_part(Grade::TWO);
        let q = q_proj(&f).unwrap();
        assert!(rel(&q_proj(&q).unwrap(), &q) < 1e-13);
        let orth = q.l2_inner(&f.sub(&q).unwrap()).unwrap();
        assert!(orth.abs() <= 1e-12 * f.l2_norm().powi(2));
        assert!(q.d().l2_norm() <= 1e-12 * f.l2_norm() * g.kappa() * g.n() as f64);
        assert!(q.mean().norm() == 0.0);
        assert!(q_proj(&FormField::scalar(&g, |_| 1.0)).is_err());
    }

    #[test]
    fn potential_identities() {
        let g = Grid::standard(16).unwrap();
        let f = random_field(&g, GradeMask::ALL, 17);
        let id_r = f.sub(&compact_k(&f)).unwrap();
        let lhs = homotopy_r(&f).d().add(&homotopy_r(&f.d())).unwrap();
        assert!(rel(&lhs, &id_r) < 1e-13);
        let lhs = homotopy_s(&f).delta().add(&homotopy_s(&f.delta())).unwrap();
        assert!(rel(&lhs, &id_r) < 1e-13);
        assert!(compact_k(&f).d().l2_norm() == 0.0);
        assert!(compact_kstar(&f).delta().l2_norm() == 0.0);
        let exact = f.d();
        assert!(compact_k(&exact).l2_norm() < 1e-14 * exact.l2_norm());
        assert!(rel(&homotopy_r(&exact).d(), &exact) < 1e-13);
        let coexact = f.delta();
        assert!(compact_kstar(&coexact).l2_norm() < 1e-14 * coexact.l2_norm());
        assert!(rel(&homotopy_s(&coexact).delta(), &coexact) < 1e-13);
    }

    #[test]
    fn potentials_on_examples() {
        let g = Grid::standard(16).unwrap();
        let u = FormField::one_form(&g, |x| [0.0, x[0].sin(), 0.0]).d();
        assert!(rel(&homotopy_r(&u).d(), &u) < 1e-14);
        let c = FormField::from_fn(&g, GradeMask::ALL, |_| Multivector::new([1.0; 8]));
        assert!(rel(&compact_k(&c), &c) < 1e-14);
        assert!(homotopy_r(&c).l2_norm() == 0.0);
    }

    #[test]
    fn reconstruction_from_potentials() {
        let g = Grid::standard(16).unwrap();
        let u = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let b = FormField::one_form(&g, |x| [0.0, x[0].sin(), 0.0]).d();
        let r = reconstruct_pq(&u, &b).unwrap();
        assert!(rel(&r.u, &u) < 1e-14 && rel(&r.b, &b) < 1e-14);
        assert!(r.u_defect < 1e-14 && r.b_defect < 1e-14);
        let c = FormField::one_form(&g, |_| [0.5, 0.0, -1.0]);
        let zero_b = FormField::zeros(&g, Grade::TWO.into(), Representation::Physical);
        let r = reconstruct_pq(&c, &zero_b).unwrap();
        assert!(rel(&r.u, &c) < 1e-14);
        // a gradient is reported, not rejected
        let grad = FormField::scalar(&g, |x| x[2].cos()).d();
        let r = reconstruct_pq(&grad, &zero_b).unwrap();
        assert!(r.u_defect > 0.99);
    }
}
