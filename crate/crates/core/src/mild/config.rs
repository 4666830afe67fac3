use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};

/// Integrability exponent `q ∈ (3, 6)` of the critical spaces and the derived
/// weight exponent `α = 1 - 3/q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    q: f64,
    alpha: f64,
}

impl ExponentConfig {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 3.0 && q < 6.0) {
            return Err(MhdError::InvalidParameter(format!("q = {q} must lie in (3, 6)")));
        }
        Ok(ExponentConfig { q, alpha: 1.0 - 3.0 / q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig::new(4.0).expect("q = 4 is admissible")
    }
}

/// Discretization and stopping parameters of the Picard solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub exponents: ExponentConfig,
    /// Number of time nodes `J`.
    pub nodes: usize,
    /// Node grading exponent `γ` in `t_j = T(j/J)^γ`.
    pub gamma: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            exponents: ExponentConfig::default(),
            nodes: 64,
            gamma: 2.0,
            tol: 1e-8,
            max_iter: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        ExponentConfig::new(self.exponents.q())?;
        if self.nodes < 4 {
            return Err(MhdError::InvalidParameter(format!("need at least 4 time nodes, got {}", self.nodes)));
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(MhdError::InvalidParameter(format!("grading exponent γ = {} must be ≥ 1", self.gamma)));
        }
        if !(self.tol > 0.0) {
            return Err(MhdError::InvalidParameter(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(MhdError::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_is_derived() {
        let e = ExponentConfig::new(4.0).unwrap();
        assert_eq!(e.alpha(), 0.25);
        assert!((1.0 / e.q() - (1.0 / 3.0 - e.alpha() / 3.0)).abs() < 1e-15);
        assert!(ExponentConfig::new(3.0).is_err());
        assert!(ExponentConfig::new(6.0).is_err());
        assert!(ExponentConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn solver_defaults() {
        let c = SolverConfig::default();
        assert_eq!((c.nodes, c.gamma, c.tol, c.max_iter), (64, 2.0, 1e-8, 50));
        c.validate().unwrap();
        assert!(SolverConfig { nodes: 2, ..c }.validate().is_err());
        assert!(SolverConfig { gamma: 0.5, ..c }.validate().is_err());
        assert!(SolverConfig { tol: 0.0, ..c }.validate().is_err());
    }
}
