//! Experiment commands: leave-one-out evaluation, compression-ratio
//! sweeps, and measurement-matrix distortion reports.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use smash_core::{jl_report, Distribution, PairKind};

use super::{ensure_dir, manifest_for, path_value, run_manifest_path};
use crate::config::{ClassifierMode, ExperimentConfig, Protocol};
use crate::error::{CliError, CliResult};
use crate::eval::{cr_sweep, evaluate};
use crate::io::write_text;

use super::learn::{SourceArgs, SvmArgs};

#[derive(Subcommand)]
pub enum EvalCommand {
    /// Cross-validated recognition at one compression ratio.
    Loo(LooArgs),
    /// The same experiment repeated over several compression ratios.
    CrSweep(SweepArgs),
}

/// Experiment knobs shared by the eval commands.
#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value = "gaussian")]
    pub distribution: Distribution,

    /// Measurement matrix seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Sensor noise std while sensing.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub beta: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,

    /// Classifier whose accuracy is reported: svm or peak-psr.
    #[arg(long, default_value = "svm")]
    pub mode: ClassifierMode,

    /// Split protocol: leave-one-out or fixed-split.
    #[arg(long, default_value = "leave-one-out")]
    pub protocol: Protocol,
}

impl ExperimentArgs {
    fn config(&self, cr: f64) -> ExperimentConfig {
        ExperimentConfig {
            compression_ratio: cr,
            distribution: self.distribution,
            matrix_seed: self.seed,
            noise_sigma: self.noise_sigma,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            mode: self.mode,
            protocol: self.protocol,
            ..Default::default()
        }
    }
}

#[derive(Args)]
pub struct LooArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Compression ratio D/K; 1 runs the full-data path.
    #[arg(long, default_value_t = 100.0)]
    pub cr: f64,

    #[command(flatten)]
    pub experiment: ExperimentArgs,

    #[command(flatten)]
    pub svm: SvmArgs,

    /// Receives results.csv and run.manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Compression ratios to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,100,200,300,500")]
    pub crs: Vec<f64>,

    #[command(flatten)]
    pub experiment: ExperimentArgs,

    #[command(flatten)]
    pub svm: SvmArgs,

    /// Output CSV (one row per ratio).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_eval(cmd: EvalCommand) -> CliResult<()> {
    match cmd {
        EvalCommand::Loo(args) => loo(args),
        EvalCommand::CrSweep(args) => sweep(args),
    }
}

fn loo(args: LooArgs) -> CliResult<()> {
    let config = args.experiment.config(args.cr);
    config.validate()?;
    let hp = args.svm.hyperparams()?;
    let set = args.source.load()?;
    let report = evaluate(&set, &config, hp)?;

    let mut csv = String::from("name,truth,predicted,correct,runtime_s\n");
    let predicted = report.predicted(config.mode);
    for (i, name) in report.names.iter().enumerate() {
        let truth = &report.actions[report.truth[i]];
        let guess = &report.actions[predicted[i]];
        csv.push_str(&format!(
            "{name},{truth},{guess},{},{}\n",
            u8::from(predicted[i] == report.truth[i]),
            report.runtime_s[i]
        ));
    }
    ensure_dir(&args.out_dir)?;
    write_text(&args.out_dir.join("results.csv"), &csv)?;

    let mut m = config.to_manifest();
    m.set("command", "eval loo");
    args.source.describe(&mut m);
    args.svm.describe(&mut m);
    m.set("K", report.k.to_string());
    m.set("D", report.d.to_string());
    m.set("clips_tested", report.tested.len().to_string());
    m.set("accuracy", report.accuracy(config.mode).to_string());
    m.set("accuracy_svm", report.svm_accuracy.to_string());
    m.set("accuracy_peak_psr", report.psr_accuracy.to_string());
    m.set("mean_runtime_s", report.mean_runtime_s.to_string());
    m.save(&args.out_dir.join("run.manifest"))?;

    println!("accuracy={}", report.accuracy(config.mode));
    println!("accuracy_svm={}", report.svm_accuracy);
    println!("accuracy_peak_psr={}", report.psr_accuracy);
    println!("mean_runtime_s={}", report.mean_runtime_s);
    Ok(())
}

fn sweep(args: SweepArgs) -> CliResult<()> {
    if args.crs.is_empty() {
        return Err(CliError::usage("--crs needs at least one ratio"));
    }
    let base = args.experiment.config(args.crs[0]);
    for &cr in &args.crs {
        args.experiment.config(cr).validate()?;
    }
    let hp = args.svm.hyperparams()?;
    let set = args.source.load()?;
    let rows = cr_sweep(&set, &base, hp, &args.crs)?;

    let mut csv = String::from("cr,K,accuracy,mean_runtime_s\n");
    for row in &rows {
        let line = format!("{},{},{},{}", row.cr, row.k, row.accuracy, row.mean_runtime_s);
        println!("{line}");
        csv.push_str(&line);
        csv.push('\n');
    }
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            ensure_dir(dir)?;
        }
    }
    write_text(&args.out, &csv)?;

    let mut m = config_manifest_base(&base, "eval cr-sweep");
    args.source.describe(&mut m);
    args.svm.describe(&mut m);
    m.set(
        "crs",
        args.crs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

/// A config manifest without the misleading single-ratio entry.
fn config_manifest_base(
    base: &ExperimentConfig,
    command: &str,
) -> crate::io::manifest::Manifest {
    let mut m = manifest_for(command);
    let full = base.to_manifest();
    for (key, value) in full.entries() {
        if key != "compression_ratio" {
            m.set(key.clone(), value.clone());
        }
    }
    m
}

fn parse_pair(s: &str) -> Result<PairKind, String> {
    match s {
        "orthogonal" => Ok(PairKind::Orthogonal),
        "identical" => Ok(PairKind::Identical),
        "raw" => Ok(PairKind::Raw),
        other => Err(format!(
            "unknown pair kind '{other}' (orthogonal, identical, raw)"
        )),
    }
}

#[derive(Args)]
pub struct JlCheckArgs {
    /// Measurements per frame.
    #[arg(long = "K", visible_alias = "k")]
    pub k: usize,

    /// Ambient dimension.
    #[arg(long = "D", visible_alias = "d")]
    pub d: usize,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    /// Seed for the trial vector draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 0)]
    pub matrix_seed: u64,

    #[arg(long, default_value = "gaussian")]
    pub distribution: Distribution,

    /// Relation between the vectors of each trial pair.
    #[arg(long, default_value = "orthogonal", value_parser = parse_pair)]
    pub pair: PairKind,

    /// Output CSV; omitted, the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_jl_check(args: JlCheckArgs) -> CliResult<()> {
    let report = jl_report(
        args.distribution,
        args.matrix_seed,
        args.k,
        args.d,
        args.trials,
        args.seed,
        args.pair,
    )?;
    let csv = format!(
        "k,d,trials,pair,mean_abs_error,max_abs_error,predicted_scale\n{},{},{},{},{},{},{}\n",
        report.k,
        report.d,
        report.trials,
        report.pair_kind.name(),
        report.mean_abs_error,
        report.max_abs_error,
        report.predicted_scale
    );
    match &args.out {
        Some(out) => {
            write_text(out, &csv)?;
            let mut m = manifest_for("jl-check");
            m.set("distribution", args.distribution.name());
            m.set("matrix_seed", args.matrix_seed.to_string());
            m.set("K", args.k.to_string());
            m.set("D", args.d.to_string());
            m.set("trials", args.trials.to_string());
            m.set("seed", args.seed.to_string());
            m.set("pair", args.pair.name());
            m.set("out", path_value(out));
            m.save(&run_manifest_path(out))?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}
