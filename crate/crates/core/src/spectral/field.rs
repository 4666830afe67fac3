use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{MhdError, Result};
use crate::lambda3::{blade_grade, Grade, GradeMask, Multivector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which space the samples of a [`FormField`] live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Real samples on the grid points (imaginary parts are zero).
    Physical,
    /// Fourier coefficients, `f(x) = Σ_k f̂(k) e^{ik·x}`.
    Spectral,
}

/// Λ-valued field on a periodic grid.
///
/// Only the blades whose grade is in the mask carry storage; every other
/// component is identically zero. Operations never mutate their inputs.
#[derive(Clone, Debug)]
pub struct FormField {
    grid: Grid,
    mask: GradeMask,
    repr: Representation,
    comps: [Option<Vec<Complex64>>; 8],
}

impl FormField {
    pub fn zeros(grid: &Grid, mask: GradeMask, repr: Representation) -> Self {
        let comps = std::array::from_fn(|i| {
            mask.contains_blade(i).then(|| vec![ZERO; grid.len()])
        });
        FormField {
            grid: grid.clone(),
            mask,
            repr,
            comps,
        }
    }

    /// Sample `f` at the grid points, keeping only the blades allowed by `mask`.
    pub fn from_fn(grid: &Grid, mask: GradeMask, mut f: impl FnMut([f64; 3]) -> Multivector) -> Self {
        let mut out = Self::zeros(grid, mask, Representation::Physical);
        for flat in 0..grid.len() {
            let m = f(grid.point(flat));
            for (i, c) in out.comps.iter_mut().enumerate() {
                if let Some(c) = c {
                    c[flat] = Complex64::new(m.coeffs[i], 0.0);
                }
            }
        }
        out
    }

    /// 1-form with the given vector-valued profile.
    pub fn one_form(grid: &Grid, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        Self::from_fn(grid, Grade::ONE.into(), |x| Multivector::vector(f(x)))
    }

    /// 2-form whose vector proxy is the given profile.
    pub fn two_form(grid: &Grid, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        Self::from_fn(grid, Grade::TWO.into(), |x| crate::lambda3::two_form(f(x)))
    }

    /// 0-form with the given scalar profile.
    pub fn scalar(grid: &Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, Grade::SCALAR.into(), |x| Multivector::scalar(f(x)))
    }

    /// Build from explicit buffers, one per blade allowed by `mask` in canonical order.
    pub fn from_components(
        grid: &Grid,
        mask: GradeMask,
        repr: Representation,
        buffers: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let blades: Vec<usize> = (0..8).filter(|&i| mask.contains_blade(i)).collect();
        if blades.len() != buffers.len() {
            return Err(MhdError::SizeMismatch(format!(
                "{} buffers for {} blades",
                buffers.len(),
                blades.len()
            )));
        }
        let mut comps: [Option<Vec<Complex64>>; 8] = Default::default();
        for (i, buf) in blades.into_iter().zip(buffers) {
            if buf.len() != grid.len() {
                return Err(MhdError::SizeMismatch(format!(
                    "component of {} samples on a grid of {}",
                    buf.len(),
                    grid.len()
                )));
            }
            comps[i] = Some(buf);
        }
        Ok(FormField {
            grid: grid.clone(),
            mask,
            repr,
            comps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> GradeMask {
        self.mask
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    /// The grade of the field if its mask holds exactly one grade.
    pub fn grade(&self) -> Option<Grade> {
        self.mask.single_grade()
    }

    pub fn component(&self, blade: usize) -> Option<&[Complex64]> {
        self.comps[blade].as_deref()
    }

    pub fn component_mut(&mut self, blade: usize) -> Option<&mut [Complex64]> {
        self.comps[blade].as_deref_mut()
    }

    /// Blades with storage, in canonical order.
    pub fn blades(&self) -> impl Iterator<Item = usize> + '_ {
        (0..8).filter(|&i| self.comps[i].is_some())
    }

    /// Value of the field at one sample or mode.
    pub fn fiber(&self, flat: usize) -> Multivector<Complex64> {
        let mut m = Multivector::zero();
        for (i, c) in self.comps.iter().enumerate() {
            if let Some(c) = c {
                m.coeffs[i] = c[flat];
            }
        }
        m
    }

    /// Real fiber at a physical sample.
    pub fn real_fiber(&self, flat: usize) -> Multivector {
        let mut m = Multivector::zero();
        for (i, c) in self.comps.iter().enumerate() {
            if let Some(c) = c {
                m.coeffs[i] = c[flat].re;
            }
        }
        m
    }

    pub fn ensure_grade(&self, grade: Grade, what: &str) -> Result<()> {
        if self.grade() == Some(grade) {
            Ok(())
        } else {
            Err(MhdError::GradeMismatch {
                expected: format!("{what}: grade {grade}"),
                found: format!("mask {:04b}", self.mask.bits()),
            })
        }
    }

    fn check_compatible(&self, other: &FormField) -> Result<()> {
        if self.grid != other.grid {
            return Err(MhdError::SizeMismatch(format!(
                "grids {:?} and {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    // ---- representation changes ----

    pub fn into_spectral(mut self) -> Self {
        if self.repr == Representation::Spectral {
            return self;
        }
        for c in self.comps.iter_mut().flatten() {
            self.grid.fft_forward(c).expect("buffer sized by its grid");
        }
        self.repr = Representation::Spectral;
        self
    }

    pub fn into_physical(mut self) -> Self {
        if self.repr == Representation::Physical {
            return self;
        }
        for c in self.comps.iter_mut().flatten() {
            self.grid.fft_inverse(c).expect("buffer sized by its grid");
            c.iter_mut().for_each(|z| z.im = 0.0);
        }
        self.repr = Representation::Physical;
        self
    }

    pub fn to_spectral(&self) -> Self {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Self {
        self.clone().into_physical()
    }

    fn same_repr_as(&self, other: &FormField) -> FormField {
        match self.repr {
            Representation::Spectral => other.to_spectral(),
            Representation::Physical => other.to_physical(),
        }
    }

    // ---- linear structure ----

    /// Widen the mask, allocating zero components as needed.
    pub fn with_mask(mut self, mask: GradeMask) -> Self {
        let mask = self.mask.union(mask);
        for i in 0..8 {
            if mask.contains_blade(i) && self.comps[i].is_none() {
                self.comps[i] = Some(vec![ZERO; self.grid.len()]);
            }
        }
        self.mask = mask;
        self
    }

    /// `self + a·other`, in the representation of `self`.
    pub fn axpy(&self, a: f64, other: &FormField) -> Result<FormField> {
        self.check_compatible(other)?;
        let other = if other.repr == self.repr {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(self.same_repr_as(other))
        };
        let mut out = self.clone().with_mask(other.mask);
        for i in 0..8 {
            if let (Some(dst), Some(src)) = (out.comps[i].as_mut(), other.comps[i].as_ref()) {
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += s * a);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> FormField {
        let mut out = self.clone();
        for c in out.comps.iter_mut().flatten() {
            c.iter_mut().for_each(|z| *z *= s);
        }
        out
    }

    /// Restriction to one grade.
    pub fn grade_part(&self, grade: Grade) -> FormField {
        let mut out = self.clone();
        for i in 0..8 {
            if blade_grade(i) != grade.value() {
                out.comps[i] = None;
            }
        }
        out.mask = GradeMask::single(grade);
        out.with_mask(GradeMask::single(grade))
    }

    // ---- spectral maps ----

    /// Apply a fiberwise linear map mode by mode; result is spectral with `out_mask`.
    pub fn map_modes(
        &self,
        out_mask: GradeMask,
        f: impl Fn(usize, &Multivector<Complex64>) -> Multivector<Complex64>,
    ) -> FormField {
        let src = match self.repr {
            Representation::Spectral => std::borrow::Cow::Borrowed(self),
            Representation::Physical => std::borrow::Cow::Owned(self.to_spectral()),
        };
        let mut out = FormField::zeros(&self.grid, out_mask, Representation::Spectral);
        let out_blades: Vec<usize> = out.blades().collect();
        for flat in 0..self.grid.len() {
            let m = f(flat, &src.fiber(flat));
            for &i in &out_blades {
                out.comps[i].as_mut().unwrap()[flat] = m.coeffs[i];
            }
        }
        out
    }

    /// Multiply every mode by a real scalar symbol; result is spectral.
    pub fn apply_multiplier(&self, symbol: impl Fn(usize) -> f64) -> FormField {
        let mut out = self.to_spectral();
        for c in out.comps.iter_mut().flatten() {
            for (flat, z) in c.iter_mut().enumerate() {
                *z *= symbol(flat);
            }
        }
        out
    }

    /// Multiply every mode by `table[shell(k)]`; result is spectral.
    pub fn apply_shell_multiplier(&self, table: &[f64]) -> FormField {
        let shells = self.grid.shells();
        self.apply_multiplier(|flat| table[shells[flat] as usize])
    }

    /// Zero every mode outside the 2/3-rule box; result is spectral.
    pub fn dealias(&self) -> FormField {
        let keep = self.grid.dealias_mask();
        self.apply_multiplier(|flat| if keep[flat] { 1.0 } else { 0.0 })
    }

    /// Exterior derivative, `(df)ˆ(k) = (ik) ∧ f̂(k)`.
    pub fn d(&self) -> FormField {
        let grid = self.grid.clone();
        self.map_modes(self.mask.raised(), |flat, m| {
            m.wedge_by(ik(&grid, flat))
        })
    }

    /// Co-derivative `δ = -∇⌟`, `(δf)ˆ(k) = -(ik) ⌟ f̂(k)`; the L² adjoint of `d`.
    pub fn delta(&self) -> FormField {
        let grid = self.grid.clone();
        self.map_modes(self.mask.lowered(), |flat, m| {
            -m.interior_by(ik(&grid, flat))
        })
    }

    /// Hodge–Laplacian `Δ = -(dδ + δd)`, symbol `-|k|²`.
    pub fn laplacian(&self) -> FormField {
        let grid = self.grid.clone();
        self.apply_multiplier(|flat| -grid.symbol_sq(flat))
    }

    /// Fiberwise Hodge star; keeps the representation.
    pub fn hodge_star(&self) -> FormField {
        let mut out = FormField {
            grid: self.grid.clone(),
            mask: self.mask.dual(),
            repr: self.repr,
            comps: Default::default(),
        };
        for i in 0..8 {
            if let Some(c) = &self.comps[i] {
                let star = Multivector::<f64>::basis(i, 1.0).hodge_star();
                let j = (0..8).find(|&j| star.coeffs[j] != 0.0).unwrap();
                let sign = star.coeffs[j];
                out.comps[j] = Some(c.iter().map(|z| z * sign).collect());
            }
        }
        out
    }

    /// The `k = 0` fiber (mean value).
    pub fn mean(&self) -> Multivector<Complex64> {
        match self.repr {
            Representation::Spectral => self.fiber(0),
            Representation::Physical => self.to_spectral().fiber(0),
        }
    }

    // ---- norms ----

    /// Discrete `L^q` norm `(h³ Σ_x |f(x)|^q)^{1/q}` with the fiberwise Euclidean norm;
    /// `q = ∞` gives the maximum.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q < 1.0 {
            return Err(MhdError::InvalidParameter(format!("L^q norm needs q ≥ 1, got {q}")));
        }
        let phys = match self.repr {
            Representation::Physical => std::borrow::Cow::Borrowed(self),
            Representation::Spectral => std::borrow::Cow::Owned(self.to_physical()),
        };
        Ok(phys.lq_norm_physical(q))
    }

    fn lq_norm_physical(&self, q: f64) -> f64 {
        let comps: Vec<&[Complex64]> = self.comps.iter().flatten().map(|c| c.as_slice()).collect();
        let sq = |flat: usize| comps.iter().map(|c| c[flat].re * c[flat].re).sum::<f64>();
        let len = self.grid.len();
        if q.is_infinite() {
            return (0..len).map(&sq).fold(0.0, f64::max).sqrt();
        }
        let h3 = self.grid.spacing().powi(3);
        if q == 2.0 {
            return (h3 * (0..len).map(sq).sum::<f64>()).sqrt();
        }
        let half_q = 0.5 * q;
        let s: f64 = (0..len).map(|f| sq(f).powf(half_q)).sum();
        (h3 * s).powf(1.0 / q)
    }

    /// Real `L²` inner product `∫ ⟨f, g⟩ dx`.
    pub fn l2_inner(&self, other: &FormField) -> Result<f64> {
        self.check_compatible(other)?;
        let a = self.to_spectral();
        let b = other.to_spectral();
        let mut acc = 0.0;
        for i in 0..8 {
            if let (Some(x), Some(y)) = (&a.comps[i], &b.comps[i]) {
                acc += x.iter().zip(y).map(|(p, q)| (p.conj() * q).re).sum::<f64>();
            }
        }
        Ok(acc * self.grid.volume())
    }

    pub fn l2_norm(&self) -> f64 {
        match self.repr {
            Representation::Spectral => {
                let s: f64 = self
                    .comps
                    .iter()
                    .flatten()
                    .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
                    .sum();
                (s * self.grid.volume()).sqrt()
            }
            Representation::Physical => self.lq_norm_physical(2.0),
        }
    }

    /// Largest coefficient modulus in the current representation.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// `max |f̂(k) - conj f̂(-k)|`; zero for the transform of real samples.
    pub fn hermitian_defect(&self) -> f64 {
        let s = self.to_spectral();
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for c in s.comps.iter().flatten() {
            for flat in 0..self.grid.len() {
                let [a, b, d] = self.grid.unflatten(flat);
                let neg = self.grid.flatten([(n - a) % n, (n - b) % n, (n - d) % n]);
                worst = worst.max((c[flat] - c[neg].conj()).norm());
            }
        }
        worst
    }
}

/// `i·k` as a complex 1-vector for the derivative symbol of mode `flat`.
pub(crate) fn ik(grid: &Grid, flat: usize) -> [Complex64; 3] {
    grid.symbol(flat).map(|k| Complex64::new(0.0, k))
}

/// Forward transform as a free function.
pub fn fft_forward(f: &FormField) -> Result<FormField> {
    if f.representation() != Representation::Physical {
        return Err(MhdError::InvalidParameter("forward transform of a spectral field".into()));
    }
    Ok(f.to_spectral())
}

/// Inverse transform as a free function.
pub fn fft_inverse(f: &FormField) -> Result<FormField> {
    if f.representation() != Representation::Spectral {
        return Err(MhdError::InvalidParameter("inverse transform of a physical field".into()));
    }
    Ok(f.to_physical())
}

/// Nonlinear terms of the MHD system; every one is `(1-form) ⌟ (2-form) → 1-form`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// `u ⌟ du = ω × u`, the rotation-form transport term.
    InteriorUDu,
    /// `d*b ⌟ b`, the Lorentz force.
    InteriorDstarbB,
    /// `u ⌟ b`, whose `d` drives the induction equation.
    InteriorUB,
}

/// Dealiased `f ⌟ g` for the given kind, returned spectral and truncated.
pub fn pointwise_product(kind: ProductKind, f: &FormField, g: &FormField) -> Result<FormField> {
    let what = match kind {
        ProductKind::InteriorUDu => "u⌟du",
        ProductKind::InteriorDstarbB => "d*b⌟b",
        ProductKind::InteriorUB => "u⌟b",
    };
    f.ensure_grade(Grade::ONE, what)?;
    g.ensure_grade(Grade::TWO, what)?;
    interior_product(f, g)
}

/// Dealiased fieldwise interior product `a ⌟ v` for a 1-form `a`.
///
/// Both inputs are truncated by the 2/3 rule, multiplied at the grid points and
/// the product truncated again, so quadratic products of band-limited inputs are
/// alias-free.
pub fn interior_product(a: &FormField, v: &FormField) -> Result<FormField> {
    a.ensure_grade(Grade::ONE, "left operand of ⌟")?;
    a.check_compatible(v)?;
    let a_phys = a.dealias().into_physical();
    let v_phys = v.dealias().into_physical();
    let grid = a.grid();
    let mut out = FormField::zeros(grid, v.mask.lowered(), Representation::Physical);
    let out_blades: Vec<usize> = out.blades().collect();
    let (a1, a2, a3) = (
        a_phys.comps[1].as_ref().unwrap(),
        a_phys.comps[2].as_ref().unwrap(),
        a_phys.comps[3].as_ref().unwrap(),
    );
    for flat in 0..grid.len() {
        let vec = [a1[flat].re, a2[flat].re, a3[flat].re];
        let m = v_phys.real_fiber(flat).interior_by(vec);
        for &i in &out_blades {
            out.comps[i].as_mut().unwrap()[flat] = Complex64::new(m.coeffs[i], 0.0);
        }
    }
    Ok(out.into_spectral().dealias())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda3::{translate_form_to_vec, Proxy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Grid, mask: GradeMask, seed: u64) -> FormField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FormField::from_fn(grid, mask, |_| {
            Multivector::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
        })
    }

    fn vec_at(f: &FormField, flat: usize, grade: Grade) -> [f64; 3] {
        match translate_form_to_vec(&f.real_fiber(flat).grade_part(grade), grade).unwrap() {
            Proxy::Vector(v) => v,
            Proxy::Scalar(_) => unreachable!(),
        }
    }

    #[test]
    fn constant_field_is_single_mode() {
        let g = Grid::standard(8).unwrap();
        let f = FormField::scalar(&g, |_| 2.5).to_spectral();
        let c = f.component(0).unwrap();
        assert!((c[0] - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::standard(32).unwrap();
        let f = random_field(&g, GradeMask::ALL, 1);
        let back = f.to_spectral().to_physical();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
        let spec = f.to_spectral();
        assert!((spec.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        assert!(spec.hermitian_defect() < 1e-14);
    }

    #[test]
    fn free_transforms_check_representation() {
        let g = Grid::standard(8).unwrap();
        let f = FormField::scalar(&g, |x| x[0].sin());
        assert!(fft_inverse(&f).is_err());
        let s = fft_forward(&f).unwrap();
        assert!(fft_forward(&s).is_err());
        assert!(fft_inverse(&s).unwrap().sub(&f).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn d_of_constant_vanishes() {
        let g = Grid::standard(8).unwrap();
        let f = FormField::from_fn(&g, GradeMask::ALL, |_| Multivector::new([1.0; 8]));
        assert!(f.d().max_abs() < 1e-15);
        assert!(f.delta().max_abs() < 1e-15);
        assert!(f.laplacian().max_abs() < 1e-15);
    }

    #[test]
    fn gradient_and_curl() {
        let g = Grid::standard(16).unwrap();
        let grad = FormField::scalar(&g, |x| x[0].sin()).d().to_physical();
        assert_eq!(grad.grade(), Some(Grade::ONE));
        for flat in 0..g.len() {
            let x = g.point(flat);
            let v = vec_at(&grad, flat, Grade::ONE);
            assert!((v[0] - x[0].cos()).abs() < 1e-13 && v[1].abs() < 1e-13 && v[2].abs() < 1e-13);
        }
        let curl = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]).d().to_physical();
        assert_eq!(curl.grade(), Some(Grade::TWO));
        for flat in 0..g.len() {
            let x = g.point(flat);
            let v = vec_at(&curl, flat, Grade::TWO);
            assert!(v[0].abs() < 1e-13 && v[1].abs() < 1e-13);
            assert!((v[2] + x[1].cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn delta_is_minus_divergence_and_curl_on_two_forms() {
        let g = Grid::standard(16).unwrap();
        let div = FormField::one_form(&g, |x| [x[0].sin(), 0.0, 0.0]).delta().to_physical();
        for flat in 0..g.len() {
            let x = g.point(flat);
            assert!((div.real_fiber(flat).coeffs[0] + x[0].cos()).abs() < 1e-13);
        }
        // δ of the 2-form with proxy (0,0,sin x₁) has proxy curl(0,0,sin x₁) = (0,-cos x₁,0)
        let b = FormField::two_form(&g, |x| [0.0, 0.0, x[0].sin()]);
        let db = b.delta().to_physical();
        for flat in 0..g.len() {
            let x = g.point(flat);
            let v = vec_at(&db, flat, Grade::ONE);
            assert!(v[0].abs() < 1e-13 && v[2].abs() < 1e-13);
            assert!((v[1] + x[0].cos()).abs() < 1e-13);
        }
        // and it satisfies ⋆δb = (-1)^2 d(⋆b)
        let lhs = b.delta().hodge_star();
        let rhs = b.hodge_star().d();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn laplacian_single_mode_and_identity() {
        let g = Grid::standard(16).unwrap();
        let f = FormField::one_form(&g, |x| [x[0].sin(), 0.0, 0.0]);
        let lap = f.laplacian();
        assert!(lap.add(&f).unwrap().max_abs() < 1e-14);
        let r = random_field(&g, GradeMask::ALL, 3);
        let hodge = r.delta().d().add(&r.d().delta()).unwrap();
        let resid = r.laplacian().add(&hodge).unwrap().l2_norm();
        assert!(resid <= 1e-12 * r.laplacian().l2_norm());
    }

    #[test]
    fn interior_product_rotation_term() {
        let g = Grid::standard(16).unwrap();
        let u = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let p = pointwise_product(ProductKind::InteriorUDu, &u, &u.d()).unwrap().to_physical();
        for flat in 0..g.len() {
            let x = g.point(flat);
            let v = vec_at(&p, flat, Grade::ONE);
            assert!(v[0].abs() < 1e-13 && v[2].abs() < 1e-13);
            assert!((v[1] + x[1].sin() * x[1].cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn interior_product_constant_and_zero() {
        let g = Grid::standard(8).unwrap();
        let u = FormField::one_form(&g, |_| [1.0, 0.0, 0.0]);
        let b = FormField::two_form(&g, |_| [0.0, 1.0, 0.0]);
        let p = pointwise_product(ProductKind::InteriorUB, &u, &b).unwrap().to_physical();
        for flat in 0..g.len() {
            let v = vec_at(&p, flat, Grade::ONE);
            assert!((v[0]).abs() < 1e-14 && v[1].abs() < 1e-14 && (v[2] + 1.0).abs() < 1e-14);
        }
        let zero = FormField::zeros(&g, Grade::TWO.into(), Representation::Physical);
        let p = pointwise_product(ProductKind::InteriorDstarbB, &u, &zero).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert!(pointwise_product(ProductKind::InteriorUB, &b, &u).is_err());
    }

    #[test]
    fn norms() {
        let g = Grid::standard(16).unwrap();
        let c = FormField::scalar(&g, |_| 3.0);
        let v = g.volume();
        for q in [1.0, 2.0, 3.0, 4.5] {
            assert!((c.lq_norm(q).unwrap() - 3.0 * v.powf(1.0 / q)).abs() < 1e-11);
        }
        assert!((c.lq_norm(f64::INFINITY).unwrap() - 3.0).abs() < 1e-15);
        let s = FormField::scalar(&g, |x| x[0].sin());
        let expect = (4.0 * PI.powi(3)).sqrt();
        assert!((s.lq_norm(2.0).unwrap() - expect).abs() < 1e-12);
        assert!((s.lq_norm(2.0).unwrap() - 11.1366).abs() < 1e-4);
        assert!(s.lq_norm(0.5).is_err());
        let a = random_field(&g, GradeMask::ALL, 5);
        let b = random_field(&g, GradeMask::ALL, 6);
        for q in [1.0, 3.0, f64::INFINITY] {
            let lhs = a.add(&b).unwrap().lq_norm(q).unwrap();
            assert!(lhs <= a.lq_norm(q).unwrap() + b.lq_norm(q).unwrap() + 1e-12);
        }
    }

    #[test]
    fn adjointness_on_random_fields() {
        for n in [8, 16] {
            let g = Grid::standard(n).unwrap();
            let u = random_field(&g, GradeMask::ALL, 10 + n as u64);
            let v = random_field(&g, GradeMask::ALL, 20 + n as u64);
            let lhs = u.d().l2_inner(&v).unwrap();
            let rhs = u.l2_inner(&v.delta()).unwrap();
            let scale = u.d().l2_norm() * v.l2_norm();
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }
}
