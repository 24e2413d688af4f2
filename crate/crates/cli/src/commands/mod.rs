//! The command surface. Every command that produces an artifact also
//! writes a run manifest next to it (`<out>.run` for single files,
//! `run.manifest` inside output directories) recording the command and
//! every parameter that shaped the result; manifests carry no clocks or
//! hostnames, so a rerun reproduces them byte for byte.

pub mod artifacts;
pub mod evaluate;
pub mod learn;
pub mod pipeline;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::CliResult;
use crate::io::manifest::Manifest;

#[derive(Parser)]
#[command(
    name = "smash",
    version,
    about = "Action recognition and localization directly on compressive measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build, compensate, or flip correlation filters.
    #[command(subcommand)]
    Filter(artifacts::FilterCommand),
    /// Generate measurement matrices.
    #[command(subcommand)]
    Matrix(artifacts::MatrixCommand),
    /// Project a video through a measurement matrix.
    Sense(pipeline::SenseArgs),
    /// Correlate filters against a clip, on either path.
    Respond(pipeline::RespondArgs),
    /// Pool response volumes into a feature vector CSV.
    Features(pipeline::FeaturesArgs),
    /// Train a filter bank and classifier from labeled clips.
    Train(learn::TrainArgs),
    /// Classify one clip with a trained bank.
    Recognize(learn::RecognizeArgs),
    /// Bounding boxes from a response volume.
    Localize(pipeline::LocalizeArgs),
    /// Recognition experiments over a clip set.
    #[command(subcommand)]
    Eval(evaluate::EvalCommand),
    /// Empirical inner-product distortion of a measurement matrix.
    JlCheck(evaluate::JlCheckArgs),
    /// Render frames to PPM images with boxes drawn in.
    Overlay(pipeline::OverlayArgs),
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Filter(cmd) => artifacts::run_filter(cmd),
        Command::Matrix(cmd) => artifacts::run_matrix(cmd),
        Command::Sense(args) => pipeline::run_sense(args),
        Command::Respond(args) => pipeline::run_respond(args),
        Command::Features(args) => pipeline::run_features(args),
        Command::Train(args) => learn::run_train(args),
        Command::Recognize(args) => learn::run_recognize(args),
        Command::Localize(args) => pipeline::run_localize(args),
        Command::Eval(cmd) => evaluate::run_eval(cmd),
        Command::JlCheck(args) => evaluate::run_jl_check(args),
        Command::Overlay(args) => pipeline::run_overlay(args),
    }
}

/// `<out>.run`, the manifest sibling of a single-file artifact.
pub fn run_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".run");
    out.with_file_name(name)
}

/// Starts a run manifest with the command name; callers add their
/// parameters in a fixed order and save.
fn manifest_for(command: &str) -> Manifest {
    let mut m = Manifest::new();
    m.set("command", command);
    m
}

fn path_value(path: &Path) -> String {
    crate::io::path_str(path)
}

/// Creates an output directory (and parents) if needed.
fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}
