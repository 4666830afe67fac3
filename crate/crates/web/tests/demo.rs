use mhdlab_web::{compute_hodge_slice, compute_picard, compute_smoothing, MAX_GRID};

#[test]
fn smoothing_curve_decays_at_the_heat_rate() {
    let curve = compute_smoothing(32, 1.5, 3.0, 0.2).unwrap();
    assert_eq!(curve.times().len(), curve.ratios().len());
    assert!((curve.expected() + 0.5).abs() < 1e-12);
    assert!((curve.slope() - curve.expected()).abs() < 0.1 * curve.expected().abs(), "{}", curve.slope());
    assert!(curve.ratios().windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
}

#[test]
fn smoothing_rejects_bad_exponents_and_grids() {
    assert!(compute_smoothing(16, 3.0, 1.5, 0.3).is_err());
    assert!(compute_smoothing(2 * MAX_GRID, 1.5, 3.0, 0.3).is_err());
    assert!(compute_smoothing(16, 1.5, 3.0, 0.0).is_err());
}

#[test]
fn hodge_slice_parts_are_orthogonal() {
    let slice = compute_hodge_slice(16, 3, 7).unwrap();
    assert_eq!(slice.n(), 16);
    for part in [slice.field(), slice.exact(), slice.coexact()] {
        assert_eq!(part.len(), 16 * 16);
        assert!(part.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
    assert!(slice.orthogonality() < 1e-12);
    assert!(slice.exact().iter().any(|&v| v > 0.0) && slice.coexact().iter().any(|&v| v > 0.0));
    assert_eq!(compute_hodge_slice(16, 3, 7).unwrap().field(), slice.field());
}

#[test]
fn picard_history_reports_convergence_and_divergence() {
    let shear = compute_picard("shear", 1.0, 1.0, 8).unwrap();
    assert!(shear.converged() && !shear.diverged());

    let small = compute_picard("orszag-tang-like", 0.5, 0.5, 8).unwrap();
    assert!(small.converged() && small.max_ratio() < 1.0);
    assert!(small.residuals().last().unwrap() < &small.residuals()[0]);

    let large = compute_picard("orszag-tang-like", 5.0, 1.0, 16).unwrap();
    assert!(large.diverged() && !large.converged());

    assert!(compute_picard("vortex", 1.0, 1.0, 8).is_err());
}
