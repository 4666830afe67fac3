use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{MhdError, Result};

/// Periodic `n³` grid on the torus `[0, L)³`.
///
/// Samples are stored with `x₁` varying fastest: the flat index of
/// `(i₁, i₂, i₃)` is `i₁ + n·i₂ + n²·i₃` and the sample sits at `x = h·i`.
/// Mode indices use the same layout; index `i` along an axis carries the integer
/// wavenumber `m = i` for `i < n/2` and `m = i - n` otherwise, so
/// `k = (2π/L)·m` with `m ∈ {-n/2, …, n/2-1}`.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    period: f64,
    tables: Arc<Tables>,
}

struct Tables {
    /// Integer wavenumber per axis index, Nyquist kept (`-n/2`).
    int_wavenumber: Vec<i64>,
    /// Per mode: integer `|m|²` with the Nyquist component zeroed.
    shell: Vec<u32>,
    /// Per mode: survives the 2/3 truncation.
    dealias_keep: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.period == other.period
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

impl Grid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(MhdError::InvalidGrid(format!(
                "n = {n} must be a power of two ≥ 8"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(MhdError::InvalidGrid(format!("period {period} must be positive")));
        }
        let half = n as i64 / 2;
        let int_wavenumber: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();
        let len = n * n * n;
        let mut shell = Vec::with_capacity(len);
        let mut dealias_keep = Vec::with_capacity(len);
        for i3 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    let m = [int_wavenumber[i1], int_wavenumber[i2], int_wavenumber[i3]];
                    let s: i64 = m
                        .iter()
                        .map(|&mi| if mi == -half { 0 } else { mi * mi })
                        .sum();
                    shell.push(s as u32);
                    dealias_keep.push(m.iter().all(|&mi| 3 * mi.abs() <= n as i64));
                }
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft(n, FftDirection::Forward);
        let inverse = planner.plan_fft(n, FftDirection::Inverse);
        Ok(Grid {
            n,
            period,
            tables: Arc::new(Tables {
                int_wavenumber,
                shell,
                dealias_keep,
                forward,
                inverse,
            }),
        })
    }

    /// Grid on the default torus `L = 2π`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of samples `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn volume(&self) -> f64 {
        self.period.powi(3)
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn kappa(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Largest integer shell index `|m|²` that can occur.
    pub fn max_shell(&self) -> u32 {
        let h = (self.n / 2 - 1) as u32;
        3 * h * h
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat % n, (flat / n) % n, flat / (n * n)]
    }

    pub fn flatten(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.n * (idx[1] + self.n * idx[2])
    }

    /// Physical position of a sample.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        self.unflatten(flat).map(|i| i as f64 * h)
    }

    /// Integer wavenumber of a mode, Nyquist included as `-n/2`.
    pub fn int_mode(&self, flat: usize) -> [i64; 3] {
        self.unflatten(flat).map(|i| self.tables.int_wavenumber[i])
    }

    /// Wavenumber used in every derivative symbol; Nyquist components are zero.
    pub fn symbol(&self, flat: usize) -> [f64; 3] {
        let half = self.n as i64 / 2;
        let kappa = self.kappa();
        self.int_mode(flat)
            .map(|m| if m == -half { 0.0 } else { kappa * m as f64 })
    }

    /// `|m|²` of the derivative symbol, in units of `κ²`.
    pub fn shell(&self, flat: usize) -> u32 {
        self.tables.shell[flat]
    }

    pub fn shells(&self) -> &[u32] {
        &self.tables.shell
    }

    /// `|k|²` of the derivative symbol.
    pub fn symbol_sq(&self, flat: usize) -> f64 {
        self.tables.shell[flat] as f64 * self.kappa().powi(2)
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.tables.dealias_keep
    }

    /// Modes in the kernel of the derivative symbol: `k = 0` and the pure-Nyquist modes.
    pub fn is_kernel_mode(&self, flat: usize) -> bool {
        self.tables.shell[flat] == 0
    }

    /// In-place forward transform, normalized so that `f(x) = Σ_k f̂(k) e^{ik·x}`.
    pub fn fft_forward(&self, data: &mut [Complex64]) -> Result<()> {
        self.transform(data, &self.tables.forward)?;
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Ok(())
    }

    /// In-place inverse of [`Grid::fft_forward`].
    pub fn fft_inverse(&self, data: &mut [Complex64]) -> Result<()> {
        self.transform(data, &self.tables.inverse)
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) -> Result<()> {
        let n = self.n;
        if data.len() != self.len() {
            return Err(MhdError::SizeMismatch(format!(
                "buffer of {} samples on a {n}³ grid",
                data.len()
            )));
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // axis 1 is contiguous
        fft.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::new(0.0, 0.0); self.len()];
        // axis 2: gather lines (i3, i1) -> contiguous, transform, scatter back
        for i3 in 0..n {
            for i1 in 0..n {
                let base = (i3 * n + i1) * n;
                for i2 in 0..n {
                    lines[base + i2] = data[i1 + n * (i2 + n * i3)];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for i3 in 0..n {
            for i1 in 0..n {
                let base = (i3 * n + i1) * n;
                for i2 in 0..n {
                    data[i1 + n * (i2 + n * i3)] = lines[base + i2];
                }
            }
        }
        // axis 3: a plane of n² consecutive samples per i3
        let plane = n * n;
        for p in 0..plane {
            for i3 in 0..n {
                lines[p * n + i3] = data[p + plane * i3];
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for p in 0..plane {
            for i3 in 0..n {
                data[p + plane * i3] = lines[p * n + i3];
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(12, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
    }

    #[test]
    fn geometry() {
        let g = Grid::new(16, 3.0).unwrap();
        assert_eq!(g.len(), 4096);
        assert!((g.spacing() * 16.0 - 3.0).abs() < 1e-15);
        let flat = g.flatten([3, 5, 7]);
        assert_eq!(g.unflatten(flat), [3, 5, 7]);
        assert_eq!(g.int_mode(g.flatten([15, 8, 1])), [-1, -8, 1]);
        // Nyquist component is dropped from the symbol and from the shell
        assert_eq!(g.shell(g.flatten([15, 8, 1])), 2);
        assert_eq!(g.symbol(g.flatten([0, 8, 0])), [0.0, 0.0, 0.0]);
        assert!(g.is_kernel_mode(g.flatten([8, 8, 0])));
        assert_eq!(g.max_shell(), 3 * 49);
    }

    #[test]
    fn dealias_two_thirds() {
        let g = Grid::standard(32).unwrap();
        // |m| ≤ 32/3 survives, i.e. m ≤ 10
        assert!(g.dealias_mask()[g.flatten([10, 0, 0])]);
        assert!(!g.dealias_mask()[g.flatten([11, 0, 0])]);
        assert!(g.dealias_mask()[g.flatten([22, 0, 0])]); // m = -10
        assert!(!g.dealias_mask()[g.flatten([21, 0, 0])]); // m = -11
        assert!(!g.dealias_mask()[g.flatten([16, 0, 0])]);
    }

    #[test]
    fn forward_transform_of_sine_matches_direct_sum() {
        let g = Grid::standard(8).unwrap();
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|f| Complex64::new(g.point(f)[0].sin(), 0.0))
            .collect();
        g.fft_forward(&mut data).unwrap();
        // direct DFT sum, same normalization
        let n = g.len() as f64;
        for (flat, c) in data.iter().enumerate() {
            let k = g.int_mode(flat).map(|m| m as f64);
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..g.len() {
                let p = g.point(x);
                let phase = -(k[0] * p[0] + k[1] * p[1] + k[2] * p[2]);
                acc += Complex64::from_polar(p[0].sin(), phase);
            }
            acc /= n;
            assert!((acc - c).norm() < 1e-13, "mode {:?}", g.int_mode(flat));
        }
        let plus = data[g.flatten([1, 0, 0])];
        let minus = data[g.flatten([7, 0, 0])];
        assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((minus - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }
}
