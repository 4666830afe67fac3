//! Randomized checks of the exterior-algebra and exterior-calculus identities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::lambda3::{Grade, GradeMask, Multivector};
use crate::spectral::{FormField, Grid, Representation};

/// Largest relative residual per identity over all cases.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub cases: usize,
    /// `⟨a∧u, v⟩ = ⟨u, a⌟v⟩`.
    pub adjunction: f64,
    /// `d d f = 0`.
    pub d_squared: f64,
    /// `δ δ f = 0`.
    pub delta_squared: f64,
    /// `⋆δu = (-1)^ℓ d(⋆u)` for `u` of grade `ℓ`.
    pub star_intertwining: f64,
}

impl AlgebraReport {
    pub fn max_residual(&self) -> f64 {
        self.adjunction
            .max(self.d_squared)
            .max(self.delta_squared)
            .max(self.star_intertwining)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

fn random_mv(rng: &mut ChaCha8Rng) -> Multivector {
    Multivector::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

/// Random complex coefficients on every mode and blade of `mask`.
fn random_spectral(grid: &Grid, mask: GradeMask, rng: &mut ChaCha8Rng) -> FormField {
    let buffers = (0..8)
        .filter(|&i| mask.contains_blade(i))
        .map(|_| {
            (0..grid.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    FormField::from_components(grid, mask, Representation::Spectral, buffers).expect("sized by grid")
}

fn rel(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Run `cases` randomized cases of each identity. The calculus identities act on
/// random spectral fields on `8³` grids of varying period.
pub fn algebra_suite(cases: usize, seed: u64) -> Result<AlgebraReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AlgebraReport {
        cases,
        adjunction: 0.0,
        d_squared: 0.0,
        delta_squared: 0.0,
        star_intertwining: 0.0,
    };
    for _ in 0..cases {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let (u, v) = (random_mv(&mut rng), random_mv(&mut rng));
        let lhs = u.wedge_by(a).inner(&v);
        let rhs = u.inner(&v.interior_by(a));
        let an = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        report.adjunction = report.adjunction.max(rel((lhs - rhs).abs(), an * u.norm() * v.norm()));
    }
    let grids = [0.5, 1.0, 2.0 * std::f64::consts::PI, 10.0].map(|l| Grid::new(8, l));
    let grids = grids.into_iter().collect::<Result<Vec<_>>>()?;
    for case in 0..cases {
        let grid = &grids[case % grids.len()];
        let f = random_spectral(grid, GradeMask::ALL, &mut rng);
        let scale = f.laplacian().l2_norm();
        report.d_squared = report.d_squared.max(rel(f.d().d().l2_norm(), scale));
        report.delta_squared = report.delta_squared.max(rel(f.delta().delta().l2_norm(), scale));
        let grade = Grade::new((case % 4) as u8)?;
        let u = random_spectral(grid, GradeMask::single(grade), &mut rng);
        let sign = if grade.value() % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = u.delta().hodge_star();
        let rhs = u.hodge_star().d().scale(sign);
        let scale = u.d().l2_norm() + u.delta().l2_norm();
        report.star_intertwining = report.star_intertwining.max(rel(lhs.sub(&rhs)?.l2_norm(), scale));
    }
    Ok(report)
}
