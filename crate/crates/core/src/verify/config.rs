//! Experiment configuration: sectioned `key = value` text.
//!
//! ```text
//! [experiment]
//! kind = simulate            # simulate | measure-smoothing | contraction | scaling | algebra-suite
//! seed = 7
//!
//! [grid]
//! n = 32                     # power of two ≥ 8
//! period = 2pi               # a number, or `2pi`
//!
//! [exponents]
//! q = 4                      # in (3, 6); α = 1 - 3/q
//!
//! [data]
//! preset = two-mode          # zero | shear | two-mode | orszag-tang-like | random-bandlimited
//! amplitude = 0.5
//! kmax = 3                   # random-bandlimited only
//!
//! [time]
//! horizon = 0.2
//! nodes = 64
//! gamma = 2
//!
//! [solver]
//! tol = 1e-8
//! max_iter = 50
//!
//! [reference]                # simulate: compare against the RK4 reference
//! dt = 1e-3
//! tolerance = 1e-3
//!
//! [smoothing]
//! operator = stokes          # stokes | maxwell
//! p = 1.5
//! q = 3
//! members = 8
//! samples = 24
//! t_min = 1e-3
//! t_max = 1
//! fit_min = 0.03
//! fit_max = 0.3
//! width_min = 0.15           # in absolute length units
//! width_max = 1.0
//! tolerance = 0.1            # relative error of the fitted slope
//!
//! [contraction]
//! horizons = 0.25, 1, 4      # in units of L²
//! members = 6
//! kmax = 3
//! tolerance = 0.2            # allowed relative spread of Ĉ
//!
//! [scaling]
//! lambda = 2
//! tolerance = 1e-6
//!
//! [algebra]
//! cases = 10000
//! tolerance = 1e-12
//!
//! [output]
//! dir = out
//! ```
//!
//! Every section except `[experiment]` is optional; unknown sections or keys
//! are rejected.

use std::path::PathBuf;

use ini::{Ini, Properties};
use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};
use crate::mild::{ExponentConfig, SolverConfig};
use crate::propagators::SemigroupOperator;
use crate::spectral::Grid;
use crate::verify::presets::{DataSpec, Preset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    MeasureSmoothing,
    Contraction,
    Scaling,
    AlgebraSuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Simulate,
        ExperimentKind::MeasureSmoothing,
        ExperimentKind::Contraction,
        ExperimentKind::Scaling,
        ExperimentKind::AlgebraSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::MeasureSmoothing => "measure-smoothing",
            ExperimentKind::Contraction => "contraction",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::AlgebraSuite => "algebra-suite",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| MhdError::Config(format!("unknown experiment kind `{name}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConfig {
    pub dt: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub operator: SemigroupOperator,
    pub p: f64,
    pub q: f64,
    pub members: usize,
    pub samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub fit_min: f64,
    pub fit_max: f64,
    pub width_min: f64,
    pub width_max: f64,
    pub tolerance: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            operator: SemigroupOperator::Stokes,
            p: 1.5,
            q: 3.0,
            members: 8,
            samples: 24,
            t_min: 1e-3,
            t_max: 1.0,
            fit_min: 0.03,
            fit_max: 0.3,
            width_min: 0.15,
            width_max: 1.0,
            tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionConfig {
    /// Horizons in units of `L²`.
    pub horizons: Vec<f64>,
    pub members: usize,
    pub kmax: u32,
    pub tolerance: f64,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig {
            horizons: vec![0.25, 1.0, 4.0],
            members: 6,
            kmax: 3,
            tolerance: 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub lambda: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub cases: usize,
    pub tolerance: f64,
}

/// A fully validated experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub n: usize,
    pub period: f64,
    pub data: DataSpec,
    pub horizon: f64,
    pub solver: SolverConfig,
    pub reference: Option<ReferenceConfig>,
    pub smoothing: SmoothingConfig,
    pub contraction: ContractionConfig,
    pub scaling: ScalingConfig,
    pub algebra: AlgebraConfig,
    pub output_dir: Option<PathBuf>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("experiment", &["kind", "seed"]),
    ("grid", &["n", "period"]),
    ("exponents", &["q"]),
    ("data", &["preset", "amplitude", "kmax"]),
    ("time", &["horizon", "nodes", "gamma"]),
    ("solver", &["tol", "max_iter"]),
    ("reference", &["dt", "tolerance"]),
    (
        "smoothing",
        &[
            "operator", "p", "q", "members", "samples", "t_min", "t_max", "fit_min", "fit_max",
            "width_min", "width_max", "tolerance",
        ],
    ),
    ("contraction", &["horizons", "members", "kmax", "tolerance"]),
    ("scaling", &["lambda", "tolerance"]),
    ("algebra", &["cases", "tolerance"]),
    ("output", &["dir"]),
];

struct Reader<'a> {
    ini: &'a Ini,
}

impl<'a> Reader<'a> {
    fn props(&self, section: &str) -> Option<&'a Properties> {
        self.ini.section(Some(section))
    }

    fn raw(&self, section: &str, key: &str) -> Option<&'a str> {
        self.props(section).and_then(|p| p.get(key))
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| MhdError::Config(format!("[{section}] {key} = `{v}` is not valid"))),
        }
    }

    fn positive(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.parse(section, key, default)?;
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(MhdError::Config(format!("[{section}] {key} must be positive, got {v}")))
        }
    }

    fn count(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        let v: usize = self.parse(section, key, default)?;
        if v == 0 {
            return Err(MhdError::Config(format!("[{section}] {key} must be positive")));
        }
        Ok(v)
    }
}

/// Drop `#` and `;` comments, whole-line or trailing.
fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|line| line.split(['#', ';']).next().unwrap_or("").trim_end())
        .collect::<Vec<_>>()
        .join("\n")
}

fn config_err(e: MhdError) -> MhdError {
    match e {
        MhdError::Config(_) => e,
        other => MhdError::Config(other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MhdError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(&strip_comments(text)).map_err(|e| MhdError::Config(format!("syntax error: {e}")))?;
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if props.is_empty() {
                    continue;
                }
                return Err(MhdError::Config("keys outside of any section".into()));
            };
            let known = SCHEMA
                .iter()
                .find(|(name, _)| *name == section)
                .ok_or_else(|| MhdError::Config(format!("unknown section [{section}]")))?;
            for (key, _) in props.iter() {
                if !known.1.contains(&key) {
                    return Err(MhdError::Config(format!("unknown key `{key}` in [{section}]")));
                }
            }
        }
        let r = Reader { ini: &ini };
        let kind = ExperimentKind::parse(
            r.raw("experiment", "kind")
                .ok_or_else(|| MhdError::Config("missing [experiment] kind".into()))?,
        )?;
        let seed: u64 = r.parse("experiment", "seed", 0)?;
        let n: usize = r.parse("grid", "n", 32)?;
        let period = match r.raw("grid", "period") {
            None | Some("2pi") => 2.0 * std::f64::consts::PI,
            Some(_) => r.positive("grid", "period", 1.0)?,
        };
        Grid::new(n, period).map_err(config_err)?;
        let exponents = ExponentConfig::new(r.parse("exponents", "q", 4.0)?).map_err(config_err)?;
        let preset = Preset::parse(r.raw("data", "preset").unwrap_or("zero"))?;
        let amplitude: f64 = r.parse("data", "amplitude", preset.default_amplitude())?;
        if !amplitude.is_finite() {
            return Err(MhdError::Config("[data] amplitude must be finite".into()));
        }
        let data = DataSpec {
            preset,
            amplitude,
            seed,
            kmax: r.parse("data", "kmax", 3)?,
        };
        if data.kmax == 0 {
            return Err(MhdError::Config("[data] kmax must be positive".into()));
        }
        let horizon = r.positive("time", "horizon", 1.0)?;
        let solver = SolverConfig {
            exponents,
            nodes: r.count("time", "nodes", 64)?,
            gamma: r.positive("time", "gamma", 2.0)?,
            tol: r.positive("solver", "tol", 1e-8)?,
            max_iter: r.count("solver", "max_iter", 50)?,
        };
        solver.validate().map_err(config_err)?;
        let reference = match r.props("reference") {
            None => None,
            Some(_) => Some(ReferenceConfig {
                dt: r.positive("reference", "dt", 1e-3)?,
                tolerance: r.positive("reference", "tolerance", 1e-3)?,
            }),
        };
        let sd = SmoothingConfig::default();
        let operator = match r.raw("smoothing", "operator").unwrap_or("stokes") {
            "stokes" => SemigroupOperator::Stokes,
            "maxwell" => SemigroupOperator::Maxwell,
            other => return Err(MhdError::Config(format!("unknown operator `{other}`"))),
        };
        let smoothing = SmoothingConfig {
            operator,
            p: r.positive("smoothing", "p", sd.p)?,
            q: r.positive("smoothing", "q", sd.q)?,
            members: r.count("smoothing", "members", sd.members)?,
            samples: r.count("smoothing", "samples", sd.samples)?,
            t_min: r.positive("smoothing", "t_min", sd.t_min)?,
            t_max: r.positive("smoothing", "t_max", sd.t_max)?,
            fit_min: r.positive("smoothing", "fit_min", sd.fit_min)?,
            fit_max: r.positive("smoothing", "fit_max", sd.fit_max)?,
            width_min: r.positive("smoothing", "width_min", sd.width_min)?,
            width_max: r.positive("smoothing", "width_max", sd.width_max)?,
            tolerance: r.positive("smoothing", "tolerance", sd.tolerance)?,
        };
        if !(smoothing.p >= 1.0 && smoothing.q >= smoothing.p) {
            return Err(MhdError::Config("[smoothing] needs 1 ≤ p ≤ q".into()));
        }
        if smoothing.t_min >= smoothing.t_max || smoothing.fit_min >= smoothing.fit_max {
            return Err(MhdError::Config("[smoothing] empty time or fit window".into()));
        }
        if smoothing.width_min > smoothing.width_max {
            return Err(MhdError::Config("[smoothing] width_min exceeds width_max".into()));
        }
        let cd = ContractionConfig::default();
        let horizons = match r.raw("contraction", "horizons") {
            None => cd.horizons.clone(),
            Some(list) => list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v > 0.0)
                        .ok_or_else(|| MhdError::Config(format!("[contraction] bad horizon `{}`", s.trim())))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let contraction = ContractionConfig {
            horizons,
            members: r.count("contraction", "members", cd.members)?,
            kmax: r.parse("contraction", "kmax", cd.kmax)?,
            tolerance: r.positive("contraction", "tolerance", cd.tolerance)?,
        };
        if contraction.kmax == 0 {
            return Err(MhdError::Config("[contraction] kmax must be positive".into()));
        }
        let scaling = ScalingConfig {
            lambda: r.positive("scaling", "lambda", 2.0)?,
            tolerance: r.positive("scaling", "tolerance", 1e-6)?,
        };
        let algebra = AlgebraConfig {
            cases: r.count("algebra", "cases", 10_000)?,
            tolerance: r.positive("algebra", "tolerance", 1e-12)?,
        };
        let output_dir = r.raw("output", "dir").map(PathBuf::from);
        Ok(ExperimentConfig {
            kind,
            seed,
            n,
            period,
            data,
            horizon,
            solver,
            reference,
            smoothing,
            contraction,
            scaling,
            algebra,
            output_dir,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.period)
    }

    /// Override the seed (data and ensembles).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.data.seed = seed;
        self
    }

    /// Override the grid size, revalidating it.
    pub fn with_grid(mut self, n: usize) -> Result<Self> {
        Grid::new(n, self.period).map_err(config_err)?;
        self.n = n;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::parse("[experiment]\nkind = simulate\n").unwrap();
        assert_eq!(c.kind, ExperimentKind::Simulate);
        assert_eq!(c.n, 32);
        assert_eq!(c.solver, SolverConfig::default());
        assert!(c.reference.is_none());
        assert_eq!(c.data.preset, Preset::Zero);
        assert_eq!(c.algebra.cases, 10_000);
    }

    #[test]
    fn full_config() {
        let text = "[experiment]\nkind = scaling\nseed = 11\n[grid]\nn = 16\nperiod = 3.5\n\
                    [data]\npreset = two-mode\namplitude = 0.25\n[time]\nhorizon = 0.5\nnodes = 32\n\
                    [contraction]\nhorizons = 0.5, 2\n[reference]\ndt = 0.002\n[output]\ndir = runs/a\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!((c.kind, c.seed, c.n, c.period), (ExperimentKind::Scaling, 11, 16, 3.5));
        assert_eq!(c.data.amplitude, 0.25);
        assert_eq!(c.data.seed, 11);
        assert_eq!(c.solver.nodes, 32);
        assert_eq!(c.contraction.horizons, vec![0.5, 2.0]);
        assert_eq!(c.reference.unwrap().dt, 0.002);
        assert_eq!(c.reference.unwrap().tolerance, 1e-3);
        assert_eq!(c.output_dir, Some(PathBuf::from("runs/a")));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "kind = simulate\n",
            "[experiment]\nkind = dance\n",
            "[experiment]\nkind = simulate\n[grid]\nn = 12\n",
            "[experiment]\nkind = simulate\n[grid]\nn = many\n",
            "[experiment]\nkind = simulate\n[grid]\nwidth = 3\n",
            "[experiment]\nkind = simulate\n[colour]\nhue = 3\n",
            "[experiment]\nkind = simulate\n[exponents]\nq = 7\n",
            "[experiment]\nkind = simulate\n[time]\nhorizon = -1\n",
            "[experiment]\nkind = simulate\n[data]\npreset = vortex\n",
            "[experiment]\nkind = simulate\n[contraction]\nhorizons = 1, x\n",
            "[experiment]\nkind = simulate\n[smoothing]\np = 4\nq = 3\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(bad), Err(MhdError::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn overrides() {
        let c = ExperimentConfig::parse("[experiment]\nkind = simulate\n").unwrap();
        let c = c.with_seed(5).with_grid(16).unwrap();
        assert_eq!((c.seed, c.data.seed, c.n), (5, 5, 16));
        assert!(c.with_grid(10).is_err());
    }
}
