//! Heat semigroups of the Hodge–Stokes operator `S = d*d` on `N(d*)` (1-forms)
//! and the Hodge–Maxwell operator `M = dd*` on `R(d)` (2-forms), their negative
//! fractional powers, and empirical `L^p → L^q` smoothing measurements.
//!
//! On the torus both semigroups act by the multiplier `e^{-t|k|²}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};
use crate::hodge::{compact_k, leray_p, q_proj};
use crate::lambda3::{two_form, Grade};
use crate::spectral::{FormField, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemigroupOperator {
    /// `S = d*d` on divergence-free 1-forms.
    Stokes,
    /// `M = dd*` on exact 2-forms.
    Maxwell,
}

impl SemigroupOperator {
    pub fn grade(self) -> Grade {
        match self {
            SemigroupOperator::Stokes => Grade::ONE,
            SemigroupOperator::Maxwell => Grade::TWO,
        }
    }

    /// Project onto the operator's domain subspace.
    pub fn project(self, f: &FormField) -> Result<FormField> {
        match self {
            SemigroupOperator::Stokes => leray_p(f),
            SemigroupOperator::Maxwell => q_proj(f),
        }
    }

    /// The first-order operator paired with the semigroup in the smoothing
    /// estimates: `d` for Stokes, `d*` for Maxwell.
    pub fn derivative(self, f: &FormField) -> FormField {
        match self {
            SemigroupOperator::Stokes => f.d(),
            SemigroupOperator::Maxwell => f.delta(),
        }
    }
}

/// `e^{-tκ²s}` indexed by the integer shell `s = |m|²`.
pub fn heat_table(grid: &Grid, t: f64) -> Vec<f64> {
    let k2 = grid.kappa().powi(2);
    (0..=grid.max_shell())
        .map(|s| (-t * k2 * s as f64).exp())
        .collect()
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(MhdError::InvalidParameter(format!("semigroup time {t} must be ≥ 0")))
    }
}

/// `e^{-tS} ℙu`.
pub fn heat_stokes(t: f64, u: &FormField) -> Result<FormField> {
    check_time(t)?;
    Ok(leray_p(u)?.apply_shell_multiplier(&heat_table(u.grid(), t)))
}

/// `e^{-tM} ℚb`.
pub fn heat_maxwell(t: f64, b: &FormField) -> Result<FormField> {
    check_time(t)?;
    Ok(q_proj(b)?.apply_shell_multiplier(&heat_table(b.grid(), t)))
}

/// `A^{-α/2} f` for `A ∈ {S, M}`, multiplier `|k|^{-α}`.
///
/// For `α > 0` the operand must not charge the kernel modes.
pub fn frac_power(op: SemigroupOperator, alpha: f64, f: &FormField) -> Result<FormField> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(MhdError::InvalidParameter(format!("α = {alpha} outside [0, 1]")));
    }
    f.ensure_grade(op.grade(), "fractional power operand")?;
    if alpha == 0.0 {
        return Ok(f.to_spectral());
    }
    let kernel = compact_k(f).max_abs();
    let scale = f.to_spectral().max_abs();
    if kernel > 1e-12 * scale {
        return Err(MhdError::KernelObstruction(kernel / scale));
    }
    let grid = f.grid().clone();
    Ok(f.apply_multiplier(|flat| {
        if grid.is_kernel_mode(flat) {
            0.0
        } else {
            grid.symbol_sq(flat).powf(-0.5 * alpha)
        }
    }))
}

/// The smoothing exponent `α = 3(1/p - 1/q)`.
pub fn smoothing_alpha(p: f64, q: f64) -> f64 {
    3.0 * (1.0 / p - 1.0 / q)
}

/// Measured `L^p → L^q` smoothing of a heat semigroup over an ensemble.
///
/// Every supremum is over the sampled times and ensemble members only, so all
/// constants are lower bounds for the true operator quantities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub operator: SemigroupOperator,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub ensemble_size: usize,
    pub times: Vec<f64>,
    /// `max_f ‖e^{-tA}f‖_q / ‖f‖_p` per time.
    pub ratio_value: Vec<f64>,
    /// `max_f ‖D e^{-tA}f‖_q / ‖f‖_p` per time, `D = d` (Stokes) or `d*` (Maxwell).
    pub ratio_derivative: Vec<f64>,
    /// `sup_t t^{α/2} ratio_value`.
    pub c_value: f64,
    /// `sup_t t^{(1+α)/2} ratio_derivative`.
    pub c_derivative: f64,
    /// `c_value + c_derivative`.
    pub c_hat: f64,
    /// `max_f ‖A^{-α/2}f‖_q / ‖f‖_p`.
    pub gamma_hat: f64,
}

impl SmoothingReport {
    /// Least-squares slope of `log ratio_value` against `log t` on `[t_lo, t_hi]`.
    pub fn value_slope(&self, t_lo: f64, t_hi: f64) -> Option<f64> {
        log_slope(&self.times, &self.ratio_value, t_lo, t_hi)
    }

    /// CSV rows `t,ratio_value,ratio_derivative`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,ratio_value,ratio_derivative\n");
        for i in 0..self.times.len() {
            s.push_str(&format!(
                "{:e},{:e},{:e}\n",
                self.times[i], self.ratio_value[i], self.ratio_derivative[i]
            ));
        }
        s
    }

    /// JSON summary without the per-time curves.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "operator": self.operator,
            "p": self.p,
            "q": self.q,
            "alpha": self.alpha,
            "ensemble_size": self.ensemble_size,
            "c_value": self.c_value,
            "c_derivative": self.c_derivative,
            "c_hat": self.c_hat,
            "gamma_hat": self.gamma_hat,
        })
    }
}

/// Least-squares slope of `log y` against `log x` for the samples with `x ∈ [lo, hi]`.
pub fn log_slope(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&t, &r)| t >= lo && t <= hi && r > 0.0)
        .map(|(&t, &r)| (t.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Log-spaced times on `[lo, hi]`.
pub fn log_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Near-delta test data: periodic Gaussian bumps projected onto the domain of
/// `op`, with their kernel modes removed.
///
/// Member `i` uses width `widths[i % widths.len()]`, a random center and a
/// random unit direction.
pub fn gaussian_bumps(
    grid: &Grid,
    op: SemigroupOperator,
    widths: &[f64],
    count: usize,
    seed: u64,
) -> Result<Vec<FormField>> {
    if widths.is_empty() || count == 0 {
        return Err(MhdError::EmptyEnsemble);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = grid.period();
    (0..count)
        .map(|i| {
            let w = widths[i % widths.len()];
            let center: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..period));
            let dir = loop {
                let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 0.1 && n <= 1.0 {
                    break v.map(|c| c / n);
                }
            };
            let profile = |x: [f64; 3]| {
                let r2: f64 = (0..3)
                    .map(|a| {
                        let mut dx = x[a] - center[a];
                        dx -= period * (dx / period).round();
                        dx * dx
                    })
                    .sum();
                (-0.5 * r2 / (w * w)).exp()
            };
            let raw = match op {
                SemigroupOperator::Stokes => FormField::one_form(grid, |x| dir.map(|c| c * profile(x))),
                SemigroupOperator::Maxwell => FormField::from_fn(grid, Grade::TWO.into(), |x| {
                    two_form(dir.map(|c| c * profile(x)))
                }),
            };
            let projected = op.project(&raw)?;
            Ok(projected.sub(&compact_k(&projected))?.into_physical())
        })
        .collect()
}

/// Measure smoothing ratios of `e^{-tA}` over `ensemble` at the given times.
pub fn measure_smoothing(
    op: SemigroupOperator,
    p: f64,
    q: f64,
    ensemble: &[FormField],
    times: &[f64],
) -> Result<SmoothingReport> {
    if ensemble.is_empty() {
        return Err(MhdError::EmptyEnsemble);
    }
    if !(p >= 1.0 && q >= p && q.is_finite()) {
        return Err(MhdError::InvalidParameter(format!("need 1 ≤ p ≤ q < ∞, got p={p}, q={q}")));
    }
    let alpha = smoothing_alpha(p, q);
    if alpha > 1.0 + 1e-12 {
        return Err(MhdError::InvalidParameter(format!("α = {alpha} exceeds 1")));
    }
    if times.iter().any(|&t| !(t.is_finite() && t >= 0.0)) {
        return Err(MhdError::InvalidParameter("negative or non-finite time".into()));
    }
    let mut ratio_value = vec![0.0f64; times.len()];
    let mut ratio_derivative = vec![0.0f64; times.len()];
    let mut gamma_hat = 0.0f64;
    for f in ensemble {
        f.ensure_grade(op.grade(), "ensemble member")?;
        let norm_p = f.lq_norm(p)?;
        if norm_p == 0.0 {
            return Err(MhdError::InvalidParameter("zero ensemble member".into()));
        }
        let spec = op.project(f)?;
        for (i, &t) in times.iter().enumerate() {
            let evolved = spec.apply_shell_multiplier(&heat_table(f.grid(), t));
            let v = evolved.lq_norm(q)? / norm_p;
            let dv = op.derivative(&evolved).lq_norm(q)? / norm_p;
            ratio_value[i] = ratio_value[i].max(v);
            ratio_derivative[i] = ratio_derivative[i].max(dv);
        }
        let riesz = frac_power(op, alpha.min(1.0), &spec.sub(&compact_k(&spec))?)?;
        gamma_hat = gamma_hat.max(riesz.lq_norm(q)? / norm_p);
    }
    let c_value = times
        .iter()
        .zip(&ratio_value)
        .map(|(t, r)| t.powf(0.5 * alpha) * r)
        .fold(0.0, f64::max);
    let c_derivative = times
        .iter()
        .zip(&ratio_derivative)
        .map(|(t, r)| t.powf(0.5 * (1.0 + alpha)) * r)
        .fold(0.0, f64::max);
    Ok(SmoothingReport {
        operator: op,
        p,
        q,
        alpha,
        ensemble_size: ensemble.len(),
        times: times.to_vec(),
        ratio_value,
        ratio_derivative,
        c_value,
        c_derivative,
        c_hat: c_value + c_derivative,
        gamma_hat,
    })
}
