use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SHEAR: &str = "\
[experiment]
kind = simulate

[grid]
n = 8

[data]
preset = shear

[time]
horizon = 0.5
nodes = 16
";

fn mhdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdlab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn run(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    mhdlab(&args)
}

#[test]
fn shear_simulation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shear.cfg", SHEAR);
    let out = dir.path().join("out");
    let o = run("simulate", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(&out)["verdict"], "pass");
    assert!(String::from_utf8_lossy(&o.stdout).contains("simulate: Pass"));
}

#[test]
fn configuration_errors_exit_with_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.cfg");
    let cases = [
        ("simulate", missing),
        ("simulate", write_config(dir.path(), "odd.cfg", "[experiment]\nkind = simulate\n\n[grid]\nn = 7\n")),
        ("contraction", write_config(dir.path(), "shear.cfg", SHEAR)),
    ];
    for (sub, cfg) in cases {
        let o = run(sub, &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{sub} {}", cfg.display());
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("mhdlab: "));
        assert!(!out.exists());
    }
    let cfg = write_config(dir.path(), "shear.cfg", SHEAR);
    assert_eq!(run("simulate", &cfg, &out, &["--grid", "24"]).status.code(), Some(2));
    assert_eq!(run("simulate", &cfg, &out, &["--threads", "0"]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn divergence_and_tolerance_failures_exit_with_3_and_4() {
    let dir = tempfile::tempdir().unwrap();
    let diverging = SHEAR
        .replace("n = 8", "n = 16")
        .replace("horizon = 0.5", "horizon = 1")
        .replace("nodes = 16", "nodes = 32")
        .replace("preset = shear", "preset = orszag-tang-like\namplitude = 5");
    let cfg = write_config(dir.path(), "diverging.cfg", &diverging);
    assert_eq!(run("simulate", &cfg, &dir.path().join("a"), &[]).status.code(), Some(3));

    let capped = SHEAR.replace("preset = shear", "preset = two-mode") + "\n[solver]\nmax_iter = 2\n";
    let cfg = write_config(dir.path(), "capped.cfg", &capped);
    assert_eq!(run("simulate", &cfg, &dir.path().join("b"), &[]).status.code(), Some(4));
}

#[test]
fn overrides_are_recorded_and_output_location_is_not() {
    let dir = tempfile::tempdir().unwrap();
    let text = SHEAR.replace("preset = shear", "preset = random-bandlimited\nkmax = 2");
    let cfg = write_config(dir.path(), "random.cfg", &text);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("simulate", &cfg, &a, &["--seed", "11", "--grid", "16"]).status.code(), Some(0));
    assert_eq!(run("simulate", &cfg, &b, &["--seed", "11", "--grid", "16", "--threads", "2"]).status.code(), Some(0));
    let m = manifest(&a);
    assert_eq!(m["config"]["seed"], 11);
    assert_eq!(m["config"]["n"], 16);
    assert_eq!(fs::read(a.join("manifest.json")).unwrap(), fs::read(b.join("manifest.json")).unwrap());
    assert_eq!(fs::read(a.join("u_T.mhdf")).unwrap(), fs::read(b.join("u_T.mhdf")).unwrap());
}

#[test]
fn help_lists_every_subcommand() {
    let o = mhdlab(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["simulate", "measure-smoothing", "contraction", "scaling", "algebra-suite"] {
        assert!(text.contains(sub), "{sub}");
    }
}
