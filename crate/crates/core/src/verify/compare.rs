use serde::Serialize;

use crate::error::{MhdError, Result};
use crate::mild::MildSolution;
use crate::verify::reference::ReferenceRun;

/// Relative errors of a mild solution against a reference run at the
/// reference snapshot times in `(0, T]`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    /// `‖(u - u_ref, b - b_ref)‖₂ / ‖(u_ref, b_ref)‖₂`.
    pub rel_l2: Vec<f64>,
    /// `(‖u - u_ref‖₃ + ‖b - b_ref‖₃) / (‖u_ref‖₃ + ‖b_ref‖₃)`.
    pub rel_l3: Vec<f64>,
    pub max_rel_l2: f64,
    pub max_rel_l3: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn compare_mild_vs_reference(sol: &MildSolution, run: &ReferenceRun) -> Result<ComparisonReport> {
    let horizon = sol.times().horizon();
    if (horizon - run.horizon).abs() > 1e-12 * horizon || sol.u0.grid() != run.u[0].grid() {
        return Err(MhdError::InvalidParameter("mild solution and reference run use different setups".into()));
    }
    let scale = sol.u0.l2_norm() + sol.b0.l2_norm();
    let gap = sol.u0.sub(&run.u[0])?.l2_norm() + sol.b0.sub(&run.b[0])?.l2_norm();
    if gap > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(MhdError::InvalidParameter("mild solution and reference run start from different data".into()));
    }
    let mut report = ComparisonReport {
        times: Vec::new(),
        rel_l2: Vec::new(),
        rel_l3: Vec::new(),
        max_rel_l2: 0.0,
        max_rel_l3: 0.0,
    };
    for (i, &t) in run.times.iter().enumerate().skip(1) {
        let (u, b) = (sol.u_at(t)?, sol.b_at(t)?);
        let (ur, br) = (&run.u[i], &run.b[i]);
        let (du, db) = (u.sub(ur)?.into_physical(), b.sub(br)?.into_physical());
        let l2 = ratio(
            (du.l2_norm().powi(2) + db.l2_norm().powi(2)).sqrt(),
            (ur.l2_norm().powi(2) + br.l2_norm().powi(2)).sqrt(),
        );
        let l3 = ratio(
            du.lq_norm(3.0)? + db.lq_norm(3.0)?,
            ur.lq_norm(3.0)? + br.lq_norm(3.0)?,
        );
        report.times.push(t);
        report.rel_l2.push(l2);
        report.rel_l3.push(l3);
        report.max_rel_l2 = report.max_rel_l2.max(l2);
        report.max_rel_l3 = report.max_rel_l3.max(l3);
    }
    Ok(report)
}
