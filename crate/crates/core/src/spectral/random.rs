use num_complex::Complex64;
use rand::Rng;

use crate::lambda3::{Grade, GradeMask};
use crate::spectral::{FormField, Grid, Representation};

/// Real random field of one grade with independent uniform Fourier
/// coefficients on the modes `0 < |m|² ≤ kmax²`, returned spectral.
///
/// Coefficients are drawn in flat-index order, so a seeded generator gives
/// reproducible fields.
pub fn random_bandlimited(grid: &Grid, grade: Grade, kmax: u32, rng: &mut impl Rng) -> FormField {
    let n = grid.n();
    let half = n as i64 / 2;
    let mut out = FormField::zeros(grid, GradeMask::single(grade), Representation::Spectral);
    let blades: Vec<usize> = grade.blades().collect();
    let cap = kmax * kmax;
    for flat in 0..grid.len() {
        let m = grid.int_mode(flat);
        if m.contains(&-half) || grid.shell(flat) == 0 || grid.shell(flat) > cap {
            continue;
        }
        let [a, b, c] = grid.unflatten(flat);
        let neg = grid.flatten([(n - a) % n, (n - b) % n, (n - c) % n]);
        if neg < flat {
            continue;
        }
        for &blade in &blades {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let comp = out.component_mut(blade).expect("allocated");
            comp[flat] = z;
            comp[neg] = z.conj();
        }
    }
    out
}
