use std::fs;

use mhdlab_core::mild::{picard_solve, SolverConfig};
use mhdlab_core::spectral::snapshot::read_snapshot;
use mhdlab_core::verify::run::{EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_PASS, EXIT_TOLERANCE};
use mhdlab_core::verify::{
    compare_mild_vs_reference, error_exit_code, reference_solve, run_experiment, scaling_covariance, DataSpec,
    ExperimentConfig, Preset, Verdict,
};
use mhdlab_core::{FormField, Grid, MhdError};

fn pair_error(u: &FormField, b: &FormField, ur: &FormField, br: &FormField) -> f64 {
    (u.sub(ur).unwrap().l2_norm().powi(2) + b.sub(br).unwrap().l2_norm().powi(2)).sqrt()
}

#[test]
fn reference_is_fourth_order() {
    let grid = Grid::standard(16).unwrap();
    let (u0, b0) = DataSpec::new(Preset::TwoMode).build(&grid).unwrap();
    let horizon = 0.2;
    let run = |dt: f64| reference_solve(&u0, &b0, horizon, dt, &[]).unwrap();
    let fine = run(0.0025);
    let (uf, bf) = (fine.u.last().unwrap(), fine.b.last().unwrap());
    let err = |dt: f64| {
        let r = run(dt);
        pair_error(r.u.last().unwrap(), r.b.last().unwrap(), uf, bf)
    };
    let ratio = err(0.04) / err(0.02);
    assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
    assert!(fine.max_defect < 1e-10);
}

#[test]
fn compare_on_closed_form_and_zero_data() {
    let grid = Grid::standard(16).unwrap();
    let cfg = SolverConfig::default();
    let (u0, b0) = DataSpec::new(Preset::Shear).build(&grid).unwrap();
    let sol = picard_solve(&u0, &b0, 1.0, &cfg).unwrap();
    let run = reference_solve(&u0, &b0, 1.0, 1e-3, &[0.25, 0.5]).unwrap();
    let cmp = compare_mild_vs_reference(&sol, &run).unwrap();
    assert_eq!(cmp.times, vec![0.25, 0.5, 1.0]);
    assert!(cmp.max_rel_l2 <= 1e-8 && cmp.max_rel_l3 <= 1e-8);

    let (z0, c0) = DataSpec::new(Preset::Zero).build(&grid).unwrap();
    let sol = picard_solve(&z0, &c0, 1.0, &cfg).unwrap();
    let run = reference_solve(&z0, &c0, 1.0, 1e-2, &[]).unwrap();
    let cmp = compare_mild_vs_reference(&sol, &run).unwrap();
    assert_eq!(cmp.max_rel_l2, 0.0);
}

#[test]
fn compare_rejects_mismatched_runs() {
    let grid = Grid::standard(16).unwrap();
    let cfg = SolverConfig::default();
    let (u0, b0) = DataSpec::new(Preset::Shear).build(&grid).unwrap();
    let sol = picard_solve(&u0, &b0, 1.0, &cfg).unwrap();
    let other_t = reference_solve(&u0, &b0, 0.5, 1e-2, &[]).unwrap();
    assert!(compare_mild_vs_reference(&sol, &other_t).is_err());
    let other_data = reference_solve(&u0.scale(2.0), &b0, 1.0, 1e-2, &[]).unwrap();
    assert!(compare_mild_vs_reference(&sol, &other_data).is_err());
}

#[test]
fn scaling_of_zero_data_is_trivial() {
    let grid = Grid::standard(8).unwrap();
    let (u0, b0) = DataSpec::new(Preset::Zero).build(&grid).unwrap();
    let r = scaling_covariance(&u0, &b0, 1.0, 2.0, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert_eq!((r.field_error, r.l3_error), (0.0, 0.0));
    assert!(scaling_covariance(&u0, &b0, 1.0, -2.0, &SolverConfig::default()).is_err());
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

const SHEAR: &str = "\
[experiment]
kind = simulate

[grid]
n = 16

[data]
preset = shear

[time]
horizon = 1

[reference]
dt = 1e-3
";

#[test]
fn simulate_shear_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&config(SHEAR), Some(dir.path())).unwrap();
    assert_eq!(outcome.exit_code(), EXIT_PASS);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["verdict"], "pass");
    assert_eq!(manifest["results"]["solve"]["iterations"], 1);
    assert!(manifest["results"]["solve"]["residuals"].as_array().unwrap().len() == 1);
    assert!(manifest.get("wall_seconds").is_none());
    let csv = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert!(csv.starts_with("iteration,residual,norm\n"));
    let u = read_snapshot(fs::File::open(dir.path().join("u_T.mhdf")).unwrap()).unwrap();
    let (u0, _) = DataSpec::new(Preset::Shear).build(u.grid()).unwrap();
    assert!(u.sub(&u0.scale((-1.0f64).exp())).unwrap().l2_norm() < 1e-10 * u0.l2_norm());
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn malformed_config_is_a_config_error() {
    for text in ["[experiment]\nkind = fly\n", "[grid]\nn = 12\n", "[nonsense]\nx = 1\n", "[time]\nhorizon = -1\n"] {
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(matches!(err, MhdError::Config(_)), "{text}: {err}");
        assert_eq!(error_exit_code(&err), EXIT_CONFIG);
    }
}

#[test]
fn contraction_writes_one_row_per_horizon() {
    let text = "\
[experiment]
kind = contraction

[grid]
n = 8

[time]
nodes = 16

[contraction]
horizons = 0.25, 1, 4
members = 2
kmax = 2
";
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&config(text), Some(dir.path())).unwrap();
    let csv = fs::read_to_string(dir.path().join("contraction.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "T,c_hat,eps_hat");
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[2] - 0.25 / cells[1]).abs() <= 1e-12 * cells[2]);
    }
    assert!(matches!(outcome.verdict, Verdict::Pass | Verdict::ToleranceFailure));
}

#[test]
fn divergence_and_tolerance_failures_have_their_own_codes() {
    let diverging = "\
[experiment]
kind = simulate

[grid]
n = 16

[data]
preset = orszag-tang-like
amplitude = 5

[time]
horizon = 1
";
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&config(diverging), Some(dir.path())).unwrap();
    assert_eq!(outcome.exit_code(), EXIT_DIVERGENCE);
    assert!(dir.path().join("residuals.csv").exists());

    let unreachable = "\
[experiment]
kind = simulate

[grid]
n = 8

[data]
preset = two-mode

[time]
horizon = 0.1
nodes = 16

[solver]
max_iter = 2
";
    let outcome = run_experiment(&config(unreachable), None).unwrap();
    assert_eq!(outcome.exit_code(), EXIT_TOLERANCE);
}

#[test]
fn identical_runs_write_identical_files() {
    let text = "\
[experiment]
kind = simulate
seed = 4

[grid]
n = 8

[data]
preset = random-bandlimited
kmax = 2

[time]
horizon = 0.3
nodes = 16
";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&config(text), Some(a.path())).unwrap();
    run_experiment(&config(text), Some(b.path())).unwrap();
    for name in ["manifest.json", "residuals.csv", "u_T.mhdf", "b_T.mhdf"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let c = tempfile::tempdir().unwrap();
    run_experiment(&config(text).with_seed(5), Some(c.path())).unwrap();
    assert_ne!(fs::read(a.path().join("u_T.mhdf")).unwrap(), fs::read(c.path().join("u_T.mhdf")).unwrap());
}

#[test]
fn comments_are_ignored_anywhere() {
    let text = "# leading\n[experiment]   ; trailing on a header\nkind = algebra-suite   # trailing\n\n[algebra]\ncases = 100 ; count\n";
    let cfg = config(text);
    assert_eq!(cfg.kind, mhdlab_core::verify::ExperimentKind::AlgebraSuite);
    assert_eq!(cfg.algebra.cases, 100);
}
