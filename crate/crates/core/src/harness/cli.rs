//! Argument parsing and command dispatch for the `subrec` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::subspace::top_d_subspace_with_gap;
use crate::synth::{generate, SyntheticModel};
use crate::tyler::{estimate_with_observer, objective, EstimatorConfig};

use super::experiments::{
    self, parse_int_range, parse_log_range, subspace_error, ConvergenceConfig, ExactRecoveryConfig, NoiseConfig,
};
use super::formats::{self, fmt_f64, to_json_pretty, write_outputs, CsvTable, ResultFile, TruthFile};

#[derive(Debug, Parser)]
#[command(
    name = "subrec",
    version,
    about = "Robust subspace recovery with Tyler's M-estimator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a data set from the inlier/outlier model.
    Synth(SynthArgs),
    /// Run the estimator on a data CSV and report the top-d subspace.
    Estimate(EstimateArgs),
    /// Run one of the synthetic studies.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Mean recovery error as a function of the number of inliers.
    ExactRecovery(ExactRecoveryArgs),
    /// Per-iteration distance to the final iterate and recovery error.
    Convergence(ConvergenceArgs),
    /// Mean recovery error as a function of the noise level.
    Noise(NoiseArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Ambient dimension.
    #[arg(long = "D")]
    pub ambient_dim: usize,
    /// Subspace dimension.
    #[arg(long = "d")]
    pub subspace_dim: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 1000)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            breakdown_check: true,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "n-inliers")]
    pub n_inliers: usize,
    #[arg(long = "n-outliers")]
    pub n_outliers: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw the truth subspace at random instead of using the first d axes.
    #[arg(long)]
    pub rotate: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "truth-out")]
    pub truth_out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "d")]
    pub subspace_dim: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Result JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-iteration trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Truth JSON; adds recovery errors to the outputs.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactRecoveryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "n-outliers")]
    pub n_outliers: usize,
    /// Inlier counts as lo:hi:step.
    #[arg(long = "n-inliers-range")]
    pub n_inliers_range: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "n-inliers")]
    pub n_inliers: usize,
    #[arg(long = "n-outliers")]
    pub n_outliers: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "n-inliers")]
    pub n_inliers: usize,
    #[arg(long = "n-outliers")]
    pub n_outliers: usize,
    /// Noise levels as lo:hi:steps, log-spaced.
    #[arg(
        long = "noise-range",
        conflicts_with = "noise_levels",
        required_unless_present = "noise_levels"
    )]
    pub noise_range: Option<String>,
    /// Explicit comma-separated noise levels.
    #[arg(long = "noise-levels", value_delimiter = ',')]
    pub noise_levels: Option<Vec<f64>>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

/// Provenance written next to each primary output as `<out>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
    pub version: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

struct Outputs {
    files: Vec<(PathBuf, String)>,
    inputs: Vec<PathBuf>,
    seeds: Vec<u64>,
}

fn display(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

/// Runs a parsed command line. `argv` is recorded verbatim in the manifest.
pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    let start = Instant::now();
    let (config, force, out) = match &cli.command {
        Command::Synth(a) => (serde_json::to_value(a)?, a.force, cmd_synth(a)?),
        Command::Estimate(a) => (serde_json::to_value(a)?, a.force, cmd_estimate(a)?),
        Command::Experiment(Experiment::ExactRecovery(a)) => {
            (serde_json::to_value(a)?, a.force, cmd_exact_recovery(a)?)
        }
        Command::Experiment(Experiment::Convergence(a)) => (serde_json::to_value(a)?, a.force, cmd_convergence(a)?),
        Command::Experiment(Experiment::Noise(a)) => (serde_json::to_value(a)?, a.force, cmd_noise(a)?),
    };
    let output_paths: Vec<PathBuf> = out.files.iter().map(|(p, _)| p.clone()).collect();
    let manifest = RunManifest {
        command_line: argv.to_vec(),
        config,
        seeds: out.seeds.clone(),
        inputs: display(&out.inputs),
        outputs: display(&output_paths),
        duration_seconds: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let manifest_text = to_json_pretty(&manifest)?;
    let manifest_file = manifest_path(&output_paths[0]);
    let mut files: Vec<(&Path, &str)> = out.files.iter().map(|(p, c)| (p.as_path(), c.as_str())).collect();
    files.push((&manifest_file, &manifest_text));
    write_outputs(&files, force)
}

fn cmd_synth(a: &SynthArgs) -> Result<Outputs> {
    let mut model = SyntheticModel::new(
        a.model.ambient_dim,
        a.model.subspace_dim,
        a.n_inliers,
        a.n_outliers,
        a.noise,
        a.seed,
    )?;
    if a.rotate {
        model = model.with_random_rotation();
    }
    let (data, truth) = generate(&model)?;
    Ok(Outputs {
        files: vec![
            (a.out.clone(), formats::data_to_csv(&data)),
            (a.truth_out.clone(), to_json_pretty(&TruthFile::from_subspace(&truth))?),
        ],
        inputs: vec![],
        seeds: vec![a.seed],
    })
}

fn cmd_estimate(a: &EstimateArgs) -> Result<Outputs> {
    let data = formats::read_data_csv(&a.input)?;
    let dim = data.dim();
    if a.subspace_dim == 0 || a.subspace_dim >= dim {
        bail!("--d must satisfy 1 <= d < D = {dim}, got {}", a.subspace_dim);
    }
    let truth = a.truth.as_deref().map(formats::read_truth).transpose()?;
    if let Some(t) = &truth {
        if t.ambient_dim() != dim || t.dim() != a.subspace_dim {
            bail!(
                "truth has D = {}, d = {}; data has D = {dim} and --d {}",
                t.ambient_dim(),
                t.dim(),
                a.subspace_dim
            );
        }
    }

    let mut per_iter_error = Vec::new();
    let result = estimate_with_observer(&data, &a.solver.config(), |_, s| {
        if let Some(t) = &truth {
            per_iter_error.push(subspace_error(s, t));
        }
    })?;
    let per_iter_error: Vec<f64> = per_iter_error.into_iter().collect::<Result<_>>()?;

    let top = top_d_subspace_with_gap(result.sigma.as_spd().as_symmetric(), a.subspace_dim)?;
    if top.ambiguous {
        log::warn!("eigengap at d = {} is {:e}", a.subspace_dim, top.gap);
    }
    let final_objective = match result.final_objective() {
        Some(f) => f,
        None => objective(result.sigma.as_spd(), &data)?,
    };
    let recovery = truth
        .as_ref()
        .map(|t| crate::subspace::recovery_error(&top.subspace, t))
        .transpose()?;
    let report = ResultFile {
        ambient_dim: dim,
        subspace_dim: a.subspace_dim,
        sigma: result.sigma.as_spd().as_symmetric().to_row_major(),
        termination: result.termination.as_str().to_string(),
        iterations: result.iterations,
        objective: final_objective,
        basis: top.subspace.to_row_major(),
        recovery_error: recovery,
    };

    let mut files = vec![(a.out.clone(), to_json_pretty(&report)?)];
    if let Some(path) = &a.trace {
        let mut t = CsvTable::new(&["k", "objective", "rel_step", "lambda_min", "recovery_error"]);
        for (i, r) in result.trace.iter().enumerate() {
            t.push(&[
                r.k.to_string(),
                fmt_f64(r.objective),
                fmt_f64(r.rel_step),
                fmt_f64(r.lambda_min),
                per_iter_error.get(i).map(|&e| fmt_f64(e)).unwrap_or_default(),
            ]);
        }
        files.push((path.clone(), t.as_str().to_owned()));
    }
    let mut inputs = vec![a.input.clone()];
    inputs.extend(a.truth.clone());
    Ok(Outputs {
        files,
        inputs,
        seeds: vec![],
    })
}

fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    (0..trials as u64).map(|t| seed.wrapping_add(t)).collect()
}

fn cmd_exact_recovery(a: &ExactRecoveryArgs) -> Result<Outputs> {
    let cfg = ExactRecoveryConfig {
        ambient_dim: a.model.ambient_dim,
        subspace_dim: a.model.subspace_dim,
        n_outliers: a.n_outliers,
        n_inliers: parse_int_range(&a.n_inliers_range).context("--n-inliers-range")?,
        trials: a.trials,
        seed: a.seed,
        estimator: a.solver.config(),
    };
    let rows = experiments::exact_recovery(&cfg)?;
    Ok(Outputs {
        files: vec![(a.out.clone(), experiments::exact_recovery_csv(&rows))],
        inputs: vec![],
        seeds: trial_seeds(a.seed, a.trials),
    })
}

fn cmd_convergence(a: &ConvergenceArgs) -> Result<Outputs> {
    let cfg = ConvergenceConfig {
        ambient_dim: a.model.ambient_dim,
        subspace_dim: a.model.subspace_dim,
        n_inliers: a.n_inliers,
        n_outliers: a.n_outliers,
        noise: a.noise,
        seed: a.seed,
        estimator: a.solver.config(),
    };
    let run = experiments::convergence(&cfg)?;
    Ok(Outputs {
        files: vec![(a.out.clone(), experiments::convergence_csv(&run.rows))],
        inputs: vec![],
        seeds: vec![a.seed],
    })
}

fn cmd_noise(a: &NoiseArgs) -> Result<Outputs> {
    let levels = match (&a.noise_range, &a.noise_levels) {
        (Some(r), _) => parse_log_range(r).context("--noise-range")?,
        (None, Some(v)) => v.clone(),
        (None, None) => bail!("one of --noise-range or --noise-levels is required"),
    };
    if levels.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
        bail!("noise levels must be finite and non-negative");
    }
    let cfg = NoiseConfig {
        ambient_dim: a.model.ambient_dim,
        subspace_dim: a.model.subspace_dim,
        n_inliers: a.n_inliers,
        n_outliers: a.n_outliers,
        noise_levels: levels,
        trials: a.trials,
        seed: a.seed,
        estimator: a.solver.config(),
    };
    let rows = experiments::noise_sweep(&cfg)?;
    Ok(Outputs {
        files: vec![(a.out.clone(), experiments::noise_csv(&rows))],
        inputs: vec![],
        seeds: trial_seeds(a.seed, a.trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("out/res.csv")),
            PathBuf::from("out/res.csv.manifest.json")
        );
    }

    #[test]
    fn parses_case_sensitive_dimension_flags() {
        let cli = Cli::try_parse_from([
            "subrec",
            "synth",
            "--D",
            "10",
            "--d",
            "5",
            "--n-inliers",
            "3",
            "--n-outliers",
            "4",
            "--out",
            "a.csv",
            "--truth-out",
            "t.json",
        ])
        .unwrap();
        let Command::Synth(a) = cli.command else { panic!() };
        assert_eq!((a.model.ambient_dim, a.model.subspace_dim), (10, 5));
    }
}
