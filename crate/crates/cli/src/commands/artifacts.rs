//! Filter and matrix construction commands.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use smash_core::mach::build_type2_bank;
use smash_core::{
    compensate, flip_horizontal, measurement_count, spectra_stats, synthesize, AffineView,
    Distribution, Matrix, Volume,
};

use super::{ensure_dir, manifest_for, path_value, run_manifest_path};
use crate::dataset::load_video;
use crate::error::{CliError, CliResult};
use crate::io::codec;

#[derive(Subcommand)]
pub enum FilterCommand {
    /// Synthesize one filter from example clips.
    Build(BuildArgs),
    /// Adapt a filter to an affine-related camera view.
    Compensate(CompensateArgs),
    /// Mirror a filter left-right.
    Flip(FlipArgs),
}

#[derive(Args)]
pub struct BuildArgs {
    /// Example clips (volume files or PGM directories), all one action.
    #[arg(required = true)]
    pub examples: Vec<PathBuf>,

    /// Action name stored in the filter.
    #[arg(long)]
    pub label: String,

    /// Noise-floor weight in the synthesis denominator.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Average-energy weight.
    #[arg(long, default_value_t = 1e-3)]
    pub beta: f64,

    /// Spread (dissimilarity) weight.
    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,

    /// Per-example view "a11,a12,a21,a22,b1,b2"; repeat once per example
    /// to warp everything into the canonical view before synthesis.
    #[arg(long = "view")]
    pub views: Vec<String>,

    /// Skip the final mean-removal/unit-energy normalization.
    #[arg(long)]
    pub raw: bool,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CompensateArgs {
    /// Canonical-view filter to adapt.
    #[arg(long)]
    pub filter: PathBuf,

    /// Affine view "a11,a12,a21,a22,b1,b2" relating the new view to the
    /// canonical one.
    #[arg(long)]
    pub view: String,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FlipArgs {
    #[arg(long)]
    pub filter: PathBuf,

    #[arg(long)]
    pub out: PathBuf,
}

fn parse_view(text: &str) -> CliResult<AffineView> {
    AffineView::parse_csv(text).map_err(CliError::usage)
}

pub fn run_filter(cmd: FilterCommand) -> CliResult<()> {
    match cmd {
        FilterCommand::Build(args) => build(args),
        FilterCommand::Compensate(args) => compensate_cmd(args),
        FilterCommand::Flip(args) => flip(args),
    }
}

fn build(args: BuildArgs) -> CliResult<()> {
    let views: Vec<AffineView> = args.views.iter().map(|v| parse_view(v)).collect::<CliResult<_>>()?;
    if !views.is_empty() && views.len() != args.examples.len() {
        return Err(CliError::usage(format!(
            "got {} --view arguments for {} examples; give one per example or none",
            views.len(),
            args.examples.len()
        )));
    }
    let examples: Vec<Volume> = args
        .examples
        .iter()
        .map(|p| load_video(p))
        .collect::<smash_core::Result<_>>()?;

    let mut filter = if views.is_empty() {
        let stats = spectra_stats(&examples)?;
        synthesize(&stats, args.alpha, args.beta, args.gamma, &args.label)?
    } else {
        let paired: Vec<(Volume, AffineView)> = examples.into_iter().zip(views.iter().copied()).collect();
        build_type2_bank(&paired, args.alpha, args.beta, args.gamma, &args.label)?
    };
    if !args.raw {
        filter.normalize()?;
    }
    codec::save_filter(&args.out, &filter)?;

    let mut m = manifest_for("filter build");
    m.set("label", args.label.as_str());
    m.set("alpha", args.alpha.to_string());
    m.set("beta", args.beta.to_string());
    m.set("gamma", args.gamma.to_string());
    m.set("normalized", if args.raw { "0" } else { "1" });
    for (i, p) in args.examples.iter().enumerate() {
        m.set(format!("example_{i}"), path_value(p));
    }
    for (i, v) in views.iter().enumerate() {
        m.set(format!("view_{i}"), v.to_csv());
    }
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

fn compensate_cmd(args: CompensateArgs) -> CliResult<()> {
    let filter = codec::load_filter(&args.filter)?;
    let view = parse_view(&args.view)?;
    let adapted = compensate(&filter, &view)?;
    codec::save_filter(&args.out, &adapted)?;

    let mut m = manifest_for("filter compensate");
    m.set("filter", path_value(&args.filter));
    m.set("view", view.to_csv());
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

fn flip(args: FlipArgs) -> CliResult<()> {
    let filter = codec::load_filter(&args.filter)?;
    let flipped = flip_horizontal(&filter);
    codec::save_filter(&args.out, &flipped)?;

    let mut m = manifest_for("filter flip");
    m.set("filter", path_value(&args.filter));
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

#[derive(Subcommand)]
pub enum MatrixCommand {
    /// Draw a seeded measurement matrix.
    Gen(GenArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Measurements per frame. Give this or --cr.
    #[arg(long = "K", visible_alias = "k", conflicts_with = "cr")]
    pub k: Option<usize>,

    /// Compression ratio D/K; K = max(1, round(D / cr)).
    #[arg(long)]
    pub cr: Option<f64>,

    /// Ambient dimension (pixels per frame).
    #[arg(long = "D", visible_alias = "d")]
    pub d: usize,

    /// Entry distribution: gaussian or bernoulli.
    #[arg(long, default_value = "gaussian")]
    pub distribution: Distribution,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Store the entries instead of just the seed; both load identically.
    #[arg(long)]
    pub materialize: bool,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_matrix(cmd: MatrixCommand) -> CliResult<()> {
    match cmd {
        MatrixCommand::Gen(args) => gen(args),
    }
}

fn gen(args: GenArgs) -> CliResult<()> {
    let k = match (args.k, args.cr) {
        (Some(k), None) => k,
        (None, Some(cr)) => {
            if !(cr.is_finite() && cr >= 1.0) {
                return Err(CliError::usage(format!(
                    "compression ratio {cr} must be at least 1"
                )));
            }
            measurement_count(args.d, cr)
        }
        _ => return Err(CliError::usage("give exactly one of --K or --cr")),
    };
    let matrix = Matrix::generate(args.distribution, args.seed, k, args.d)?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            ensure_dir(dir)?;
        }
    }
    codec::save_matrix(&args.out, &matrix, args.materialize)?;

    let mut m = manifest_for("matrix gen");
    m.set("distribution", args.distribution.name());
    m.set("seed", args.seed.to_string());
    m.set("K", k.to_string());
    m.set("D", args.d.to_string());
    m.set("materialized", if args.materialize { "1" } else { "0" });
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}
