use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mhdlab_core::verify::{error_exit_code, run_experiment, ExperimentConfig, ExperimentKind};
use mhdlab_core::{MhdError, Result};

#[derive(Parser, Debug)]
#[command(name = "mhdlab", version, about = "Mild-solution experiments for incompressible MHD on the 3-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Picard solve of the configured data, optionally checked against the RK4 reference.
    Simulate(Options),
    /// Small-time smoothing rates of the heat semigroups.
    MeasureSmoothing(Options),
    /// Empirical bound of the coupled bilinear operator across horizons.
    Contraction(Options),
    /// Cross-grid check of the parabolic scaling.
    Scaling(Options),
    /// Randomized exterior-calculus identities.
    AlgebraSuite(Options),
}

#[derive(Args, Debug)]
struct Options {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `[output] dir`, then `mhdlab-out/<kind>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `[experiment] seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `[grid] n`.
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads for the parallel loops.
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Options) {
        match self {
            Command::Simulate(o) => (ExperimentKind::Simulate, o),
            Command::MeasureSmoothing(o) => (ExperimentKind::MeasureSmoothing, o),
            Command::Contraction(o) => (ExperimentKind::Contraction, o),
            Command::Scaling(o) => (ExperimentKind::Scaling, o),
            Command::AlgebraSuite(o) => (ExperimentKind::AlgebraSuite, o),
        }
    }
}

fn load(kind: ExperimentKind, opts: &Options) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(&opts.config)?;
    if cfg.kind != kind {
        return Err(MhdError::Config(format!(
            "{} configures `{}`, not `{}`",
            opts.config.display(),
            cfg.kind.name(),
            kind.name()
        )));
    }
    if let Some(seed) = opts.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(n) = opts.grid {
        cfg = cfg.with_grid(n)?;
    }
    Ok(cfg)
}

fn run(kind: ExperimentKind, opts: Options) -> Result<i32> {
    let cfg = load(kind, &opts)?;
    if let Some(threads) = opts.threads {
        if threads == 0 {
            return Err(MhdError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| MhdError::Config(format!("cannot set up {threads} threads: {e}")))?;
    }
    let out = opts
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("mhdlab-out").join(kind.name()));
    let outcome = run_experiment(&cfg, Some(&out))?;
    println!("{:#}", outcome.manifest["results"]);
    println!(
        "{}: {:?} in {:.2}s, {} files in {}",
        kind.name(),
        outcome.verdict,
        outcome.wall_seconds,
        outcome.files.len(),
        out.display()
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let (kind, opts) = Cli::parse().command.split();
    let code = match run(kind, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mhdlab: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
