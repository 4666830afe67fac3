//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export wraps a native function returning [`mhdlab_core::Result`], so
//! the computations are testable off the browser.

use rand::SeedableRng;
use wasm_bindgen::prelude::*;

use mhdlab_core::hodge::{hodge_decompose, leray_p};
use mhdlab_core::mild::{picard_solve, SolverConfig};
use mhdlab_core::propagators::{gaussian_bumps, log_slope, log_times, measure_smoothing, SemigroupOperator};
use mhdlab_core::spectral::random_bandlimited;
use mhdlab_core::verify::{DataSpec, Preset};
use mhdlab_core::{FormField, Grade, Grid, MhdError, Result};

/// Grids above this size are too slow for an interactive page.
pub const MAX_GRID: usize = 32;

fn demo_grid(n: usize) -> Result<Grid> {
    if n > MAX_GRID {
        return Err(MhdError::InvalidParameter(format!("grid {n} exceeds {MAX_GRID}")));
    }
    Grid::standard(n)
}

fn js(e: MhdError) -> JsError {
    JsError::new(&e.to_string())
}

/// Largest `L^p → L^q` ratio of `e^{-tS}` over Gaussian bumps of widths
/// `w, √2 w, 2w, …` up to 1.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct SmoothingCurve {
    times: Vec<f64>,
    ratios: Vec<f64>,
    slope: f64,
    expected: f64,
}

#[wasm_bindgen]
impl SmoothingCurve {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.ratios.clone()
    }

    /// Fitted log-log slope over `t ∈ [w², 10w²]` for the narrowest width `w`.
    #[wasm_bindgen(getter)]
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// `-α/2` with `α = 3(1/p - 1/q)`.
    #[wasm_bindgen(getter)]
    pub fn expected(&self) -> f64 {
        self.expected
    }
}

pub fn compute_smoothing(n: usize, p: f64, q: f64, width: f64) -> Result<SmoothingCurve> {
    let grid = demo_grid(n)?;
    if !(width > 0.0 && width <= 1.0) {
        return Err(MhdError::InvalidParameter(format!("width {width} outside (0, 1]")));
    }
    let widths: Vec<f64> = std::iter::successors(Some(width), |w| Some(w * std::f64::consts::SQRT_2))
        .take_while(|&w| w <= 1.0 + 1e-12)
        .collect();
    let bumps = gaussian_bumps(&grid, SemigroupOperator::Stokes, &widths, 2 * widths.len(), 1)?;
    let times = log_times(1e-3, 2.0, 40);
    let report = measure_smoothing(SemigroupOperator::Stokes, p, q, &bumps, &times)?;
    let w2 = width * width;
    Ok(SmoothingCurve {
        slope: log_slope(&times, &report.ratio_value, w2, 10.0 * w2).unwrap_or(f64::NAN),
        expected: -0.5 * report.alpha,
        times,
        ratios: report.ratio_value,
    })
}

#[wasm_bindgen]
pub fn smoothing_curve(n: usize, p: f64, q: f64, width: f64) -> std::result::Result<SmoothingCurve, JsError> {
    compute_smoothing(n, p, q, width).map_err(js)
}

/// Pointwise magnitudes on the plane `x₃ = 0` of a random 1-form and of its
/// exact and coexact parts, row-major `n × n`.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct HodgeSlice {
    n: usize,
    field: Vec<f64>,
    exact: Vec<f64>,
    coexact: Vec<f64>,
    orthogonality: f64,
}

#[wasm_bindgen]
impl HodgeSlice {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Vec<f64> {
        self.field.clone()
    }

    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    pub fn coexact(&self) -> Vec<f64> {
        self.coexact.clone()
    }

    /// `|⟨exact, coexact⟩| / ‖f‖²`.
    #[wasm_bindgen(getter)]
    pub fn orthogonality(&self) -> f64 {
        self.orthogonality
    }
}

fn plane_magnitude(f: &FormField) -> Vec<f64> {
    let phys = f.to_physical();
    let grid = phys.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(phys.real_fiber(grid.flatten([i, j, 0])).norm());
        }
    }
    out
}

pub fn compute_hodge_slice(n: usize, kmax: u32, seed: u64) -> Result<HodgeSlice> {
    let grid = demo_grid(n)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f = random_bandlimited(&grid, Grade::ONE, kmax, &mut rng);
    let split = hodge_decompose(&f);
    let norm2 = f.l2_norm().powi(2);
    Ok(HodgeSlice {
        n,
        field: plane_magnitude(&f),
        exact: plane_magnitude(&split.exact),
        coexact: plane_magnitude(&leray_p(&f)?),
        orthogonality: if norm2 > 0.0 { split.exact.l2_inner(&split.coexact)?.abs() / norm2 } else { 0.0 },
    })
}

#[wasm_bindgen]
pub fn hodge_slice(n: usize, kmax: u32, seed: u64) -> std::result::Result<HodgeSlice, JsError> {
    compute_hodge_slice(n, kmax, seed).map_err(js)
}

/// Residual history of a Picard solve.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct PicardHistory {
    residuals: Vec<f64>,
    converged: bool,
    diverged: bool,
    max_ratio: f64,
}

#[wasm_bindgen]
impl PicardHistory {
    pub fn residuals(&self) -> Vec<f64> {
        self.residuals.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    #[wasm_bindgen(getter)]
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    /// Largest ratio of successive residuals; `NaN` with fewer than two.
    #[wasm_bindgen(getter)]
    pub fn max_ratio(&self) -> f64 {
        self.max_ratio
    }
}

pub fn compute_picard(preset: &str, amplitude: f64, horizon: f64, n: usize) -> Result<PicardHistory> {
    let grid = demo_grid(n)?;
    let (u0, b0) = DataSpec::new(Preset::parse(preset)?).with_amplitude(amplitude).build(&grid)?;
    let cfg = SolverConfig { nodes: 32, ..SolverConfig::default() };
    match picard_solve(&u0, &b0, horizon, &cfg) {
        Ok(sol) => Ok(PicardHistory {
            max_ratio: sol.max_ratio().unwrap_or(f64::NAN),
            residuals: sol.residuals,
            converged: sol.converged,
            diverged: false,
        }),
        Err(MhdError::Divergence { residuals, .. }) => Ok(PicardHistory {
            max_ratio: residuals.windows(2).map(|w| w[1] / w[0]).fold(f64::NAN, f64::max),
            residuals,
            converged: false,
            diverged: true,
        }),
        Err(e) => Err(e),
    }
}

#[wasm_bindgen]
pub fn picard_history(
    preset: &str,
    amplitude: f64,
    horizon: f64,
    n: usize,
) -> std::result::Result<PicardHistory, JsError> {
    compute_picard(preset, amplitude, horizon, n).map_err(js)
}
