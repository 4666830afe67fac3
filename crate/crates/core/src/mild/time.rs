use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};
use crate::hodge::{magnetic_defect, velocity_defect};
use crate::lambda3::{Grade, GradeMask};
use crate::propagators::heat_table;
use crate::spectral::{FormField, Grid, Representation};

/// Graded time nodes `t_j = T(j/J)^γ`, `j = 0..=J`.
///
/// Node 0 is `t = 0` and carries the initial value; the critical-norm
/// suprema run over `j = 1..=J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    count: usize,
    gamma: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(horizon: f64, count: usize, gamma: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(MhdError::InvalidParameter(format!("horizon T = {horizon} must be positive")));
        }
        if count < 4 {
            return Err(MhdError::InvalidParameter(format!("need at least 4 time nodes, got {count}")));
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(MhdError::InvalidParameter(format!("grading exponent γ = {gamma} must be ≥ 1")));
        }
        let mut nodes: Vec<f64> = (0..=count)
            .map(|j| horizon * (j as f64 / count as f64).powf(gamma))
            .collect();
        nodes[count] = horizon;
        Ok(TimeGrid { horizon, count, gamma, nodes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `J`, the number of intervals.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// All `J + 1` nodes including `t₀ = 0`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// `σ_j = j/J`.
    pub fn sigma(&self, j: usize) -> f64 {
        j as f64 / self.count as f64
    }

    /// `σ(t) = (t/T)^{1/γ}`.
    pub fn sigma_of(&self, t: f64) -> f64 {
        (t / self.horizon).powf(1.0 / self.gamma)
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t.is_finite() && (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(MhdError::TimeOutOfRange { t, horizon: self.horizon })
        }
    }

    /// Interval `m ∈ 1..=J` with `t_{m-1} < t ≤ t_m`.
    pub fn locate(&self, t: f64) -> usize {
        let mut m = ((self.sigma_of(t) * self.count as f64).ceil() as usize).clamp(1, self.count);
        while m > 1 && t <= self.nodes[m - 1] {
            m -= 1;
        }
        while m < self.count && t > self.nodes[m] {
            m += 1;
        }
        m
    }

    /// First node of the 4-point interpolation stencil used on interval `m`.
    pub fn stencil(&self, m: usize) -> usize {
        m.saturating_sub(2).min(self.count - 3)
    }

    /// Cubic Lagrange basis in `σ` on the stencil starting at `start`.
    pub fn lagrange(&self, start: usize, sigma: f64) -> [f64; 4] {
        let s: [f64; 4] = std::array::from_fn(|i| self.sigma(start + i));
        std::array::from_fn(|i| {
            (0..4)
                .filter(|&k| k != i)
                .map(|k| (sigma - s[k]) / (s[i] - s[k]))
                .product()
        })
    }
}

/// A field sampled at every node of a [`TimeGrid`], stored spectrally.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: TimeGrid,
    grade: Grade,
    fields: Vec<FormField>,
}

impl Trajectory {
    pub fn new(times: TimeGrid, grade: Grade, fields: Vec<FormField>) -> Result<Self> {
        if fields.len() != times.count() + 1 {
            return Err(MhdError::SizeMismatch(format!(
                "{} fields for {} nodes",
                fields.len(),
                times.count() + 1
            )));
        }
        let grid = fields[0].grid().clone();
        for f in &fields {
            f.ensure_grade(grade, "trajectory sample")?;
            if *f.grid() != grid {
                return Err(MhdError::SizeMismatch("trajectory samples on different grids".into()));
            }
        }
        let fields = fields.into_iter().map(FormField::into_spectral).collect();
        Ok(Trajectory { times, grade, fields })
    }

    pub fn zeros(times: &TimeGrid, grid: &Grid, grade: Grade) -> Self {
        let zero = FormField::zeros(grid, GradeMask::single(grade), Representation::Spectral);
        Trajectory {
            times: times.clone(),
            grade,
            fields: vec![zero; times.count() + 1],
        }
    }

    /// Sample `f(t_j)` at every node.
    pub fn from_fn(
        times: &TimeGrid,
        grade: Grade,
        f: impl Fn(f64) -> Result<FormField> + Sync,
    ) -> Result<Self> {
        let fields = times
            .nodes()
            .par_iter()
            .map(|&t| f(t))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(times.clone(), grade, fields)
    }

    /// `t ↦ e^{-t|k|²} f₀`, without any projection.
    pub fn heat_flow(times: &TimeGrid, f0: &FormField) -> Result<Self> {
        let grade = f0
            .grade()
            .ok_or_else(|| MhdError::GradeMismatch { expected: "a single grade".into(), found: format!("{:?}", f0.mask()) })?;
        let spec = f0.to_spectral();
        Trajectory::from_fn(times, grade, |t| Ok(spec.apply_shell_multiplier(&heat_table(f0.grid(), t))))
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn fields(&self) -> &[FormField] {
        &self.fields
    }

    pub fn field(&self, j: usize) -> &FormField {
        &self.fields[j]
    }

    pub fn into_fields(self) -> Vec<FormField> {
        self.fields
    }

    /// Value at an arbitrary `t ∈ [0, T]` by cubic interpolation in `σ`.
    pub fn at(&self, t: f64) -> Result<FormField> {
        self.times.check_time(t)?;
        if t == 0.0 {
            return Ok(self.fields[0].clone());
        }
        let m = self.times.locate(t);
        let start = self.times.stencil(m);
        let w = self.times.lagrange(start, self.times.sigma_of(t));
        let mut out = self.fields[start].scale(w[0]);
        for i in 1..4 {
            out = out.axpy(w[i], &self.fields[start + i])?;
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.times != other.times || self.grade != other.grade || self.grid() != other.grid() {
            return Err(MhdError::SizeMismatch("trajectories on different grids or grades".into()));
        }
        Ok(())
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Trajectory) -> Result<Trajectory> {
        self.check_compatible(other)?;
        let fields = self
            .fields
            .par_iter()
            .zip(&other.fields)
            .map(|(x, y)| x.axpy(a, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times: self.times.clone(), grade: self.grade, fields })
    }

    pub fn add(&self, other: &Trajectory) -> Result<Trajectory> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            grade: self.grade,
            fields: self.fields.iter().map(|f| f.scale(s)).collect(),
        }
    }

    /// Largest relative distance of a sample from `N(d*)` (grade 1) or `R(d)`
    /// (grade 2), relative to the largest sample.
    pub fn subspace_defect(&self) -> Result<f64> {
        let scale = self.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for f in &self.fields {
            let rel = match self.grade {
                Grade::ONE => velocity_defect(f)?,
                Grade::TWO => magnetic_defect(f)?,
                _ => 0.0,
            };
            worst = worst.max(rel * f.l2_norm() / scale);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_graded_and_increasing() {
        let tg = TimeGrid::new(2.0, 8, 2.0).unwrap();
        assert_eq!(tg.node(0), 0.0);
        assert_eq!(tg.node(8), 2.0);
        assert!((tg.node(4) - 0.5).abs() < 1e-15);
        assert!(tg.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(TimeGrid::new(0.0, 8, 2.0).is_err());
        assert!(TimeGrid::new(1.0, 3, 2.0).is_err());
        assert!(TimeGrid::new(1.0, 8, 0.9).is_err());
    }

    #[test]
    fn locate_brackets() {
        let tg = TimeGrid::new(1.0, 16, 2.0).unwrap();
        for m in 1..=16 {
            let mid = 0.5 * (tg.node(m - 1) + tg.node(m));
            assert_eq!(tg.locate(mid), m);
            assert_eq!(tg.locate(tg.node(m)), m);
        }
        assert_eq!(tg.locate(1e-300), 1);
    }

    #[test]
    fn lagrange_reproduces_cubics() {
        let tg = TimeGrid::new(1.0, 10, 2.0).unwrap();
        let p = |s: f64| 1.0 - 2.0 * s + 0.5 * s * s * s;
        for start in [0, 3, 7] {
            for s in [0.0, 0.13, 0.55, 0.99] {
                let w = tg.lagrange(start, s);
                let v: f64 = (0..4).map(|i| w[i] * p(tg.sigma(start + i))).sum();
                assert!((v - p(s)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn interpolation_hits_nodes_and_heat_flow_is_smooth() {
        let g = Grid::standard(8).unwrap();
        let tg = TimeGrid::new(1.0, 32, 2.0).unwrap();
        let u0 = FormField::one_form(&g, |x| [x[1].sin(), 0.0, 0.0]);
        let tr = Trajectory::heat_flow(&tg, &u0).unwrap();
        let at = tr.at(tg.node(5)).unwrap();
        assert!(at.sub(tr.field(5)).unwrap().l2_norm() < 1e-13);
        let t = 0.37;
        let exact = u0.scale((-t as f64).exp());
        let rel = tr.at(t).unwrap().sub(&exact).unwrap().l2_norm() / exact.l2_norm();
        assert!(rel < 1e-7, "{rel}");
        assert!(tr.at(1.5).is_err());
        assert!(tr.subspace_defect().unwrap() < 1e-15);
    }
}
