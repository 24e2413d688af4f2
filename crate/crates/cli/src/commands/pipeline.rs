//! Per-artifact pipeline commands: sense, respond, features, localize,
//! overlay.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use smash_core::features::POOLED_PER_RESPONSE;
use smash_core::localize::CDF_THRESHOLDS;
use smash_core::{
    center_error, compress, compressed_temporal_derivative, feature_vector, locate_video,
    oracle_response_bank, response_bank, Bank, BoundingBox, BoxMode, Error, Provenance, Response,
    Volume,
};

use super::{ensure_dir, manifest_for, path_value, run_manifest_path};
use crate::dataset::load_video;
use crate::error::{CliError, CliResult};
use crate::io::ppm::{render_overlay, Rect};
use crate::io::{codec, read_text, write_text};

// ---- sense -----------------------------------------------------------------

#[derive(Args)]
pub struct SenseArgs {
    /// Input clip: a volume file or a PGM frame directory.
    #[arg(long)]
    pub video: PathBuf,

    #[arg(long)]
    pub matrix: PathBuf,

    /// Std of i.i.d. Gaussian sensor noise added per measurement.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,

    /// Temporally difference the measurement columns before writing.
    #[arg(long)]
    pub difference: bool,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_sense(args: SenseArgs) -> CliResult<()> {
    if !(args.noise_sigma.is_finite() && args.noise_sigma >= 0.0) {
        return Err(CliError::usage(format!(
            "noise sigma {} must be finite and non-negative",
            args.noise_sigma
        )));
    }
    let video = load_video(&args.video)?;
    let matrix = codec::load_matrix(&args.matrix)?;
    let mut z = compress(&video, &matrix, args.noise_sigma)?;
    if args.difference {
        z = compressed_temporal_derivative(&z)?;
    }
    codec::save_measurements(&args.out, &z)?;

    let mut m = manifest_for("sense");
    m.set("video", path_value(&args.video));
    m.set("matrix", path_value(&args.matrix));
    m.set("noise_sigma", args.noise_sigma.to_string());
    m.set("difference", if args.difference { "1" } else { "0" });
    m.set("K", z.k().to_string());
    m.set("columns", z.columns().to_string());
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

// ---- respond ---------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RespondMode {
    /// Full-data path: difference the video, correlate directly.
    Oracle,
    /// Measurement-domain path: lift the measurements, correlate.
    Smashed,
}

#[derive(Args)]
pub struct RespondArgs {
    #[arg(long, value_enum)]
    pub mode: RespondMode,

    /// Clip for oracle mode (volume file or PGM directory).
    #[arg(long)]
    pub video: Option<PathBuf>,

    /// Measurement stream for smashed mode.
    #[arg(long)]
    pub measurements: Option<PathBuf>,

    /// Measurement matrix for smashed mode.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Filter bank file; the alternative is a single --filter.
    #[arg(long, conflicts_with = "filter")]
    pub bank: Option<PathBuf>,

    #[arg(long)]
    pub filter: Option<PathBuf>,

    /// Receives response_NNN.rvf1 files plus run.manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn load_filters(bank: &Option<PathBuf>, filter: &Option<PathBuf>) -> CliResult<Bank> {
    match (bank, filter) {
        (Some(path), None) => Ok(codec::load_bank(path)?),
        (None, Some(path)) => {
            let f = codec::load_filter(path)?;
            Ok(Bank::from_filters(vec![f])?)
        }
        _ => Err(CliError::usage("give exactly one of --bank or --filter")),
    }
}

pub fn run_respond(args: RespondArgs) -> CliResult<()> {
    let bank = load_filters(&args.bank, &args.filter)?;
    let responses = match args.mode {
        RespondMode::Oracle => {
            let video_path = args
                .video
                .as_ref()
                .ok_or_else(|| CliError::usage("oracle mode reads --video"))?;
            if args.measurements.is_some() || args.matrix.is_some() {
                return Err(CliError::usage(
                    "oracle mode takes no --measurements or --matrix",
                ));
            }
            let video = load_video(video_path)?;
            oracle_response_bank(&video, &bank)?
        }
        RespondMode::Smashed => {
            let z_path = args
                .measurements
                .as_ref()
                .ok_or_else(|| CliError::usage("smashed mode reads --measurements"))?;
            let m_path = args
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::usage("smashed mode reads --matrix"))?;
            if args.video.is_some() {
                return Err(CliError::usage("smashed mode takes no --video"));
            }
            let mut z = codec::load_measurements(z_path)?;
            // Raw (order-0) streams are differenced here so either form of
            // the sense output works.
            if z.derivative_order() == 0 {
                z = compressed_temporal_derivative(&z)?;
            }
            let matrix = codec::load_matrix(m_path)?;
            response_bank(&z, &bank, &matrix)?
        }
    };

    ensure_dir(&args.out_dir)?;
    let mut m = manifest_for("respond");
    m.set(
        "mode",
        match args.mode {
            RespondMode::Oracle => "oracle",
            RespondMode::Smashed => "smashed",
        },
    );
    if let Some(p) = &args.video {
        m.set("video", path_value(p));
    }
    if let Some(p) = &args.measurements {
        m.set("measurements", path_value(p));
    }
    if let Some(p) = &args.matrix {
        m.set("matrix", path_value(p));
    }
    if let Some(p) = &args.bank {
        m.set("bank", path_value(p));
    }
    if let Some(p) = &args.filter {
        m.set("filter", path_value(p));
    }
    for (i, response) in responses.iter().enumerate() {
        let (r, c, f) = response.dims();
        let volume = Volume::new(r, c, f, response.data().to_vec())?;
        let name = format!("response_{i:03}.rvf1");
        codec::save_volume(&args.out_dir.join(&name), &volume)?;
        m.set(format!("response_{i}"), name);
        m.set(format!("response_{i}_label"), bank.filters()[i].label());
    }
    m.save(&args.out_dir.join("run.manifest"))?;
    Ok(())
}

// ---- features ----------------------------------------------------------------

#[derive(Args)]
pub struct FeaturesArgs {
    /// Response volumes, one per filter, in bank order.
    #[arg(required = true)]
    pub responses: Vec<PathBuf>,

    #[arg(long)]
    pub out: PathBuf,
}

/// Reads a stored response volume. Files do not record provenance; it has
/// no bearing on pooling or box search, so loaded responses are tagged
/// with the full-data marker.
fn load_response(path: &Path) -> CliResult<Response> {
    let v = codec::load_volume(path)?;
    let (r, c, f) = v.dims();
    Ok(Response::new(r, c, f, v.into_data(), Provenance::Oracle)?)
}

pub fn run_features(args: FeaturesArgs) -> CliResult<()> {
    let responses: Vec<Response> = args
        .responses
        .iter()
        .map(|p| load_response(p))
        .collect::<CliResult<_>>()?;
    let features = feature_vector(&responses)?;

    let mut header = Vec::with_capacity(features.len());
    for i in 0..features.blocks() {
        for j in 0..POOLED_PER_RESPONSE {
            header.push(format!("f{i}_pool_{j:02}"));
        }
        for j in 0..POOLED_PER_RESPONSE {
            header.push(format!("f{i}_psr_{j:02}"));
        }
    }
    let row: Vec<String> = features.values().iter().map(|v| v.to_string()).collect();
    let text = format!("{}\n{}\n", header.join(","), row.join(","));
    write_text(&args.out, &text)?;

    let mut m = manifest_for("features");
    for (i, p) in args.responses.iter().enumerate() {
        m.set(format!("response_{i}"), path_value(p));
    }
    m.set("values", features.len().to_string());
    m.set("out", path_value(&args.out));
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

// ---- localize ---------------------------------------------------------------

#[derive(Args)]
pub struct LocalizeArgs {
    /// Response volume to search.
    #[arg(long)]
    pub response: PathBuf,

    /// The filter that produced it (supplies the box shape).
    #[arg(long)]
    pub filter: PathBuf,

    /// Mass budget for the density box search.
    #[arg(long, default_value_t = 0.7, conflicts_with = "fixed")]
    pub lambda: f64,

    /// Filter-sized box anchored at the peak instead of the mass search.
    #[arg(long)]
    pub fixed: bool,

    /// Ground-truth centers CSV (frame,center_row,center_col) to score
    /// against.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    #[arg(long)]
    pub out: PathBuf,
}

/// Splits a CSV with the exact expected header into field rows.
fn csv_rows(text: &str, path: &str, header: &str) -> CliResult<Vec<Vec<String>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first.trim() == header => {}
        other => {
            return Err(CliError::Core(Error::Format {
                path: path.to_string(),
                detail: format!(
                    "expected header '{header}', got '{}'",
                    other.unwrap_or("").trim()
                ),
            }))
        }
    }
    let want = header.split(',').count();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != want {
            return Err(CliError::Core(Error::Format {
                path: path.to_string(),
                detail: format!("row {}: expected {} fields, got {}", n + 2, want, fields.len()),
            }));
        }
        rows.push(fields);
    }
    Ok(rows)
}

fn csv_field<T: std::str::FromStr>(path: &str, row: usize, name: &str, raw: &str) -> CliResult<T> {
    raw.parse::<T>().map_err(|_| {
        CliError::Core(Error::Format {
            path: path.to_string(),
            detail: format!("row {row}: bad {name} '{raw}'"),
        })
    })
}

const BOXES_HEADER: &str = "frame,center_row,center_col,height,width,mass,degenerate";

fn boxes_csv(boxes: &[BoundingBox]) -> String {
    let mut text = String::from(BOXES_HEADER);
    text.push('\n');
    for b in boxes {
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            b.frame_index,
            b.center.0,
            b.center.1,
            b.height,
            b.width,
            b.mass_fraction,
            u8::from(b.degenerate)
        ));
    }
    text
}

pub fn run_localize(args: LocalizeArgs) -> CliResult<()> {
    if !args.fixed && !(args.lambda.is_finite() && args.lambda > 0.0 && args.lambda <= 1.0) {
        return Err(CliError::usage(format!(
            "mass budget {} outside (0, 1]",
            args.lambda
        )));
    }
    let response = load_response(&args.response)?;
    let filter = codec::load_filter(&args.filter)?;
    let (fl, fm, _) = filter.dims();
    let mode = if args.fixed {
        BoxMode::Fixed
    } else {
        BoxMode::Mass { lambda: args.lambda }
    };
    let boxes = locate_video(&response, (fl, fm), mode)?;
    write_text(&args.out, &boxes_csv(&boxes))?;

    let mut m = manifest_for("localize");
    m.set("response", path_value(&args.response));
    m.set("filter", path_value(&args.filter));
    if args.fixed {
        m.set("box", "fixed");
    } else {
        m.set("box", "mass");
        m.set("lambda", args.lambda.to_string());
    }
    m.set("frames", boxes.len().to_string());
    m.set("out", path_value(&args.out));

    if let Some(truth_path) = &args.truth {
        let name = path_value(truth_path);
        let text = read_text(truth_path)?;
        let rows = csv_rows(&text, &name, "frame,center_row,center_col")?;
        let mut truth = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let frame: usize = csv_field(&name, i + 2, "frame", &row[0])?;
            if frame != i {
                return Err(CliError::Core(Error::Format {
                    path: name,
                    detail: format!("row {}: frames must be 0..N in order, got {frame}", i + 2),
                }));
            }
            truth.push((
                csv_field::<f64>(&name, i + 2, "center_row", &row[1])?,
                csv_field::<f64>(&name, i + 2, "center_col", &row[2])?,
            ));
        }
        let summary = center_error(&boxes, &truth)?;
        let mean = summary.displacements.iter().sum::<f64>() / summary.displacements.len() as f64;
        println!("mean_displacement={mean}");
        m.set("mean_displacement", mean.to_string());
        for (threshold, fraction) in CDF_THRESHOLDS.iter().zip(summary.within) {
            println!("within_{threshold}={fraction}");
            m.set(format!("within_{threshold}"), fraction.to_string());
        }
        m.set("truth", name);
    }
    m.save(&run_manifest_path(&args.out))?;
    Ok(())
}

// ---- overlay ----------------------------------------------------------------

#[derive(Args)]
pub struct OverlayArgs {
    /// Clip to render (volume file or PGM directory).
    #[arg(long)]
    pub video: PathBuf,

    /// Box CSV from `localize`; omit for plain grayscale frames.
    #[arg(long)]
    pub boxes: Option<PathBuf>,

    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run_overlay(args: OverlayArgs) -> CliResult<()> {
    let video = load_video(&args.video)?;
    let mut rects = Vec::new();
    if let Some(boxes_path) = &args.boxes {
        let name = path_value(boxes_path);
        let text = read_text(boxes_path)?;
        for (i, row) in csv_rows(&text, &name, BOXES_HEADER)?.iter().enumerate() {
            let frame: usize = csv_field(&name, i + 2, "frame", &row[0])?;
            if frame >= video.frames() {
                return Err(CliError::Core(Error::Dimension(format!(
                    "box frame {frame} outside a video of {} frames",
                    video.frames()
                ))));
            }
            let center = (
                csv_field::<f64>(&name, i + 2, "center_row", &row[1])?,
                csv_field::<f64>(&name, i + 2, "center_col", &row[2])?,
            );
            let height: usize = csv_field(&name, i + 2, "height", &row[3])?;
            let width: usize = csv_field(&name, i + 2, "width", &row[4])?;
            rects.push(Rect::centered(frame, center, height, width));
        }
    }
    ensure_dir(&args.out_dir)?;
    let clipped = render_overlay(&video, &rects, &args.out_dir)?;
    if clipped > 0 {
        eprintln!("warning: boxes were clipped to the frame bounds in {clipped} frames");
    }

    let mut m = manifest_for("overlay");
    m.set("video", path_value(&args.video));
    if let Some(p) = &args.boxes {
        m.set("boxes", path_value(p));
    }
    m.set("frames", video.frames().to_string());
    m.set("clipped_frames", clipped.to_string());
    m.save(&args.out_dir.join("run.manifest"))?;
    Ok(())
}
