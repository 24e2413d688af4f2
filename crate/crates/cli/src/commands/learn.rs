//! Training and single-clip recognition.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use smash_core::{
    classify_peak_psr, feature_vector, oracle_response_bank, response_bank, train_svm, Bank,
    Matrix, SvmHyperparams,
};

use super::{ensure_dir, manifest_for, path_value};
use crate::dataset::{load_video, Dataset};
use crate::error::{CliError, CliResult};
use crate::eval::{action_filters, respond_features, EvalSet};
use crate::io::codec;
use crate::io::manifest::Manifest;

/// Where labeled clips come from: a dataset manifest on disk, or the
/// built-in synthetic suite.
#[derive(Args)]
pub struct SourceArgs {
    /// Dataset manifest file (clip = label[:crop[:group]] lines).
    #[arg(long)]
    pub dataset: Option<PathBuf>,

    /// Use the built-in three-action synthetic suite instead.
    #[arg(long)]
    pub synthetic: bool,

    /// Master seed for the synthetic suite.
    #[arg(long, default_value_t = 11)]
    pub suite_seed: u64,

    /// Clips per action in the synthetic suite.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,

    /// Pixel noise std in the synthetic suite.
    #[arg(long, default_value_t = 0.05)]
    pub suite_noise: f64,
}

impl SourceArgs {
    pub fn load(&self) -> CliResult<EvalSet> {
        match (&self.dataset, self.synthetic) {
            (Some(path), false) => Ok(EvalSet::from_dataset(&Dataset::load(path)?)?),
            (None, true) => Ok(EvalSet::from_synthetic(
                self.suite_seed,
                self.instances,
                self.suite_noise,
            )?),
            _ => Err(CliError::usage(
                "give exactly one of --dataset or --synthetic",
            )),
        }
    }

    pub fn describe(&self, m: &mut Manifest) {
        match &self.dataset {
            Some(path) => {
                m.set("source", "dataset");
                m.set("dataset", path_value(path));
            }
            None => {
                m.set("source", "synthetic");
                m.set("suite_seed", self.suite_seed.to_string());
                m.set("instances", self.instances.to_string());
                m.set("suite_noise", self.suite_noise.to_string());
            }
        }
    }
}

/// Shared linear-classifier knobs.
#[derive(Args)]
pub struct SvmArgs {
    /// Regularization strength.
    #[arg(long = "svm-lambda", default_value_t = 1e-2)]
    pub svm_lambda: f64,

    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,

    /// Seed for the training shuffle.
    #[arg(long = "svm-seed", default_value_t = 0)]
    pub svm_seed: u64,
}

impl SvmArgs {
    pub fn hyperparams(&self) -> CliResult<SvmHyperparams> {
        if !(self.svm_lambda.is_finite() && self.svm_lambda > 0.0) {
            return Err(CliError::usage(format!(
                "svm lambda {} must be positive",
                self.svm_lambda
            )));
        }
        if self.epochs == 0 {
            return Err(CliError::usage("epochs must be at least 1"));
        }
        Ok(SvmHyperparams {
            lambda: self.svm_lambda,
            epochs: self.epochs,
            seed: self.svm_seed,
        })
    }

    pub fn describe(&self, m: &mut Manifest) {
        m.set("svm_lambda", self.svm_lambda.to_string());
        m.set("epochs", self.epochs.to_string());
        m.set("svm_seed", self.svm_seed.to_string());
    }
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Measurement matrix; omit to train on the full-data path.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Sensor noise std while sensing the training clips.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub beta: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,

    #[command(flatten)]
    pub svm: SvmArgs,

    /// Receives bank.bnk1, model.mdl1, and run.manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run_train(args: TrainArgs) -> CliResult<()> {
    let config = crate::config::ExperimentConfig {
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        noise_sigma: args.noise_sigma,
        ..Default::default()
    };
    config.validate()?;
    let hp = args.svm.hyperparams()?;
    let set = args.source.load()?;

    let matrix = args.matrix.as_deref().map(codec::load_matrix).transpose()?;
    let sensing = matrix.as_ref().map(|m| (m, args.noise_sigma));

    let filters = action_filters(&set, &config, &[])?;
    let xs: Vec<Vec<f64>> = set
        .clips
        .par_iter()
        .map(|clip| Ok(respond_features(&clip.video, &filters, sensing)?.to_f64()))
        .collect::<CliResult<_>>()?;
    let ys: Vec<usize> = set.clips.iter().map(|c| c.action).collect();
    let model = train_svm(&xs, &ys, set.actions.len(), hp)?;
    let bank = Bank::from_filters(filters)?;

    ensure_dir(&args.out_dir)?;
    codec::save_bank(&args.out_dir.join("bank.bnk1"), &bank)?;
    codec::save_model(&args.out_dir.join("model.mdl1"), &model)?;

    let mut m = manifest_for("train");
    args.source.describe(&mut m);
    if let Some(p) = &args.matrix {
        m.set("matrix", path_value(p));
        m.set("noise_sigma", args.noise_sigma.to_string());
    }
    m.set("alpha", args.alpha.to_string());
    m.set("beta", args.beta.to_string());
    m.set("gamma", args.gamma.to_string());
    args.svm.describe(&mut m);
    m.set("actions", set.actions.join(","));
    m.set("clips", set.clips.len().to_string());
    m.set("feature_dim", model.dim().to_string());
    m.save(&args.out_dir.join("run.manifest"))?;
    Ok(())
}

#[derive(Args)]
pub struct RecognizeArgs {
    /// Clip to classify (volume file or PGM directory).
    #[arg(long, conflicts_with = "measurements")]
    pub video: Option<PathBuf>,

    /// Measurement stream to classify instead of a pixel clip.
    #[arg(long)]
    pub measurements: Option<PathBuf>,

    /// Measurement matrix; with --video it simulates the camera first,
    /// with --measurements it is required for the lift.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Sensor noise std when sensing a --video input through --matrix.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,

    #[arg(long)]
    pub bank: PathBuf,

    /// Trained classifier; omitted, the peak-PSR rule decides.
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// Optional manifest recording the label and per-action scores.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_recognize(args: RecognizeArgs) -> CliResult<()> {
    let bank = codec::load_bank(&args.bank)?;
    let matrix: Option<Matrix> = args.matrix.as_deref().map(codec::load_matrix).transpose()?;

    let responses = match (&args.video, &args.measurements) {
        (Some(video_path), None) => {
            let video = load_video(video_path)?;
            match &matrix {
                Some(m) => {
                    let z = smash_core::compress(&video, m, args.noise_sigma)?;
                    let dz = smash_core::compressed_temporal_derivative(&z)?;
                    response_bank(&dz, &bank, m)?
                }
                None => oracle_response_bank(&video, &bank)?,
            }
        }
        (None, Some(z_path)) => {
            let m = matrix
                .as_ref()
                .ok_or_else(|| CliError::usage("--measurements needs --matrix for the lift"))?;
            let mut z = codec::load_measurements(z_path)?;
            if z.derivative_order() == 0 {
                z = smash_core::compressed_temporal_derivative(&z)?;
            }
            response_bank(&z, &bank, m)?
        }
        _ => return Err(CliError::usage("give exactly one of --video or --measurements")),
    };

    let features = feature_vector(&responses)?;
    let (mode, (predicted, scores)) = match &args.model {
        Some(model_path) => {
            let model = codec::load_model(model_path)?;
            if model.classes() != bank.actions().len() {
                return Err(CliError::usage(format!(
                    "model has {} classes but the bank has {} actions",
                    model.classes(),
                    bank.actions().len()
                )));
            }
            ("svm", model.classify(&features.to_f64())?)
        }
        None => (
            "peak-psr",
            classify_peak_psr(&features, bank.filter_to_action(), bank.actions().len())?,
        ),
    };
    let label = &bank.actions()[predicted];
    println!("{label}");

    if let Some(out) = &args.out {
        let mut m = manifest_for("recognize");
        if let Some(p) = &args.video {
            m.set("video", path_value(p));
        }
        if let Some(p) = &args.measurements {
            m.set("measurements", path_value(p));
        }
        if let Some(p) = &args.matrix {
            m.set("matrix", path_value(p));
        }
        m.set("bank", path_value(&args.bank));
        if let Some(p) = &args.model {
            m.set("model", path_value(p));
        }
        m.set("mode", mode);
        m.set("label", label.as_str());
        for (action, score) in bank.actions().iter().zip(&scores) {
            m.set(format!("score_{action}"), score.to_string());
        }
        m.save(out)?;
    }
    Ok(())
}
