use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mild::config::ExponentConfig;
use crate::mild::time::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    /// `𝒰_T`, weighted with `du`.
    U,
    /// `ℬ_T`, weighted with `d*b`.
    B,
}

/// A critical norm `sup_j t_j^{α/2}‖f(t_j)‖_q + t_j^{(1+α)/2}‖Df(t_j)‖_q`
/// with `D = d` for [`NormKind::U`] and `D = d*` for [`NormKind::B`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalNorm {
    pub kind: NormKind,
    pub value: f64,
    /// `sup_j t_j^{α/2}‖f(t_j)‖_q`.
    pub value_term: f64,
    /// `sup_j t_j^{(1+α)/2}‖Df(t_j)‖_q`.
    pub derivative_term: f64,
    /// Weighted sum per node `j = 1..=J`.
    pub profile: Vec<f64>,
}

/// The pair norm `‖u‖_{𝒰_T} + ‖b‖_{ℬ_T}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalNorms {
    pub norm_u: f64,
    pub norm_b: f64,
}

impl CriticalNorms {
    pub fn total(&self) -> f64 {
        self.norm_u + self.norm_b
    }
}

/// Critical norm of a trajectory; the supremum runs over the nodes `j ≥ 1`.
pub fn critical_norm(traj: &Trajectory, kind: NormKind, exps: &ExponentConfig) -> Result<CriticalNorm> {
    critical_norm_upto(traj, kind, exps, traj.times().count())
}

/// As [`critical_norm`] restricted to the nodes `1..=last`.
pub fn critical_norm_upto(
    traj: &Trajectory,
    kind: NormKind,
    exps: &ExponentConfig,
    last: usize,
) -> Result<CriticalNorm> {
    let (q, alpha) = (exps.q(), exps.alpha());
    let last = last.min(traj.times().count());
    let terms = (1..=last)
        .into_par_iter()
        .map(|j| {
            let t = traj.times().node(j);
            let f = traj.field(j);
            let deriv = match kind {
                NormKind::U => f.d(),
                NormKind::B => f.delta(),
            };
            Ok((
                t.powf(0.5 * alpha) * f.lq_norm(q)?,
                t.powf(0.5 * (1.0 + alpha)) * deriv.lq_norm(q)?,
            ))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let profile: Vec<f64> = terms.iter().map(|(a, b)| a + b).collect();
    Ok(CriticalNorm {
        kind,
        value: profile.iter().copied().fold(0.0, f64::max),
        value_term: terms.iter().map(|t| t.0).fold(0.0, f64::max),
        derivative_term: terms.iter().map(|t| t.1).fold(0.0, f64::max),
        profile,
    })
}

pub fn critical_norms(u: &Trajectory, b: &Trajectory, exps: &ExponentConfig) -> Result<CriticalNorms> {
    Ok(CriticalNorms {
        norm_u: critical_norm(u, NormKind::U, exps)?.value,
        norm_b: critical_norm(b, NormKind::B, exps)?.value,
    })
}
