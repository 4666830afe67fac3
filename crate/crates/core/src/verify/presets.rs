//! Named initial data. With `κ = 2π/L` and amplitude `a`:
//!
//! | preset                   | `u₀`                         | proxy of `b₀`                 |
//! |--------------------------|------------------------------|-------------------------------|
//! | `zero`                   | `0`                          | `0`                           |
//! | `shear`                  | `a·sin(κx₂) e₁`              | `0`                           |
//! | `two-mode`               | `a·(sin κx₂, sin κx₃, 0)`    | `a·(0, sin κx₁, cos κx₂)`     |
//! | `orszag-tang-like`       | `a·(-sin κx₂, sin κx₁, 0)`   | `a·(-sin κx₂, sin 2κx₁, 0)`   |
//! | `random-bandlimited`     | seeded, see below            | seeded, see below             |
//!
//! The 2-form `b₀` is `⋆` of its proxy. The random preset draws uniform
//! Fourier coefficients on `0 < |m|² ≤ kmax²` from `ChaCha8Rng(seed)` (first
//! `u₀`, then `b₀`), projects onto `N(d*)` and `R(d)`, and scales so that
//! `‖u₀‖₃ = ‖b₀‖₃ = a/2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};
use crate::hodge::{leray_p, q_proj};
use crate::lambda3::Grade;
use crate::spectral::{random_bandlimited, FormField, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Zero,
    Shear,
    TwoMode,
    OrszagTangLike,
    RandomBandlimited,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Zero,
        Preset::Shear,
        Preset::TwoMode,
        Preset::OrszagTangLike,
        Preset::RandomBandlimited,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::Shear => "shear",
            Preset::TwoMode => "two-mode",
            Preset::OrszagTangLike => "orszag-tang-like",
            Preset::RandomBandlimited => "random-bandlimited",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| MhdError::Config(format!("unknown preset `{name}`")))
    }

    /// Amplitude used when none is configured.
    pub fn default_amplitude(self) -> f64 {
        match self {
            Preset::Zero => 0.0,
            Preset::Shear => 0.1,
            Preset::TwoMode => 0.5,
            Preset::OrszagTangLike => 0.01,
            Preset::RandomBandlimited => 0.1,
        }
    }
}

/// Recipe for initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub preset: Preset,
    pub amplitude: f64,
    pub seed: u64,
    pub kmax: u32,
}

impl DataSpec {
    pub fn new(preset: Preset) -> Self {
        DataSpec {
            preset,
            amplitude: preset.default_amplitude(),
            seed: 0,
            kmax: 3,
        }
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        DataSpec { amplitude, ..self }
    }

    /// Sample `(u₀, b₀)` on `grid`, physical representation.
    pub fn build(&self, grid: &Grid) -> Result<(FormField, FormField)> {
        let a = self.amplitude;
        if !a.is_finite() {
            return Err(MhdError::InvalidParameter(format!("amplitude {a} is not finite")));
        }
        let k = grid.kappa();
        let zero_b = || FormField::two_form(grid, |_| [0.0; 3]);
        Ok(match self.preset {
            Preset::Zero => (FormField::one_form(grid, |_| [0.0; 3]), zero_b()),
            Preset::Shear => (FormField::one_form(grid, |x| [a * (k * x[1]).sin(), 0.0, 0.0]), zero_b()),
            Preset::TwoMode => (
                FormField::one_form(grid, |x| [a * (k * x[1]).sin(), a * (k * x[2]).sin(), 0.0]),
                FormField::two_form(grid, |x| [0.0, a * (k * x[0]).sin(), a * (k * x[1]).cos()]),
            ),
            Preset::OrszagTangLike => (
                FormField::one_form(grid, |x| [-a * (k * x[1]).sin(), a * (k * x[0]).sin(), 0.0]),
                FormField::two_form(grid, |x| [-a * (k * x[1]).sin(), a * (2.0 * k * x[0]).sin(), 0.0]),
            ),
            Preset::RandomBandlimited => {
                if self.kmax == 0 {
                    return Err(MhdError::InvalidParameter("kmax must be positive".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let u = leray_p(&random_bandlimited(grid, Grade::ONE, self.kmax, &mut rng))?.into_physical();
                let b = q_proj(&random_bandlimited(grid, Grade::TWO, self.kmax, &mut rng))?.into_physical();
                let (nu, nb) = (u.lq_norm(3.0)?, b.lq_norm(3.0)?);
                (u.scale(0.5 * a / nu), b.scale(0.5 * a / nb))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge::{magnetic_defect, velocity_defect};

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(Preset::parse(p.name()).unwrap(), p);
        }
        assert!(Preset::parse("vortex").is_err());
    }

    #[test]
    fn presets_lie_in_the_subspaces() {
        let g = Grid::new(16, 3.0).unwrap();
        for p in Preset::ALL {
            let spec = DataSpec { seed: 4, ..DataSpec::new(p).with_amplitude(0.7) };
            let (u, b) = spec.build(&g).unwrap();
            assert!(velocity_defect(&u).unwrap() < 1e-14, "{}", p.name());
            assert!(magnetic_defect(&b).unwrap() < 1e-14, "{}", p.name());
        }
        let (u, b) = DataSpec { seed: 4, ..DataSpec::new(Preset::RandomBandlimited).with_amplitude(0.7) }
            .build(&g)
            .unwrap();
        assert!((u.lq_norm(3.0).unwrap() - 0.35).abs() < 1e-14);
        assert!((b.lq_norm(3.0).unwrap() - 0.35).abs() < 1e-14);
    }

    #[test]
    fn shear_values() {
        let g = Grid::standard(8).unwrap();
        let (u, b) = DataSpec::new(Preset::Shear).with_amplitude(2.0).build(&g).unwrap();
        let flat = g.flatten([0, 2, 0]);
        assert!((u.real_fiber(flat).coeffs[1] - 2.0).abs() < 1e-15);
        assert_eq!(b.max_abs(), 0.0);
    }
}
