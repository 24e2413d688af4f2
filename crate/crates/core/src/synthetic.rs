//! Seeded three-action test footage.
//!
//! Each clip is a bright 12x12 blob drifting across a dark 128x128 field
//! for 16 frames at 2 px/frame: rightward, leftward, or upward, with
//! Gaussian pixel noise on top. Start positions are jittered per instance
//! inside a small per-action window, chosen so the blob and its training
//! crop stay in bounds for the whole clip. Everything derives from one
//! seed, so a suite can be regenerated anywhere bit-for-bit.
//!
//! The geometry constants are shared with consumers: training crops are
//! [`CROP_SIZE`] square windows over [`CROP_FRAMES`] frames starting at
//! [`CROP_START_FRAME`], centered on the blob's mid-crop position, and the
//! per-frame blob centers are published as ground truth for localization.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::volume::VideoVolume;

/// Domain tag separating suite streams from matrix-row streams. ASCII
/// "synth".
const SUITE_TAG: u64 = 0x73_796E_7468;

pub const FIELD: usize = 128;
pub const FRAMES: usize = 16;
pub const BLOB: usize = 12;
pub const SPEED: isize = 2;
pub const CROP_SIZE: usize = 24;
pub const CROP_FRAMES: usize = 6;
pub const CROP_START_FRAME: usize = 5;

pub const ACTION_NAMES: [&str; 3] = ["right", "left", "up"];

/// Per-frame velocity (rows, cols) of each action.
pub const ACTION_VELOCITY: [(isize, isize); 3] = [(0, SPEED), (0, -SPEED), (-SPEED, 0)];

#[derive(Debug, Clone)]
pub struct SyntheticInstance<T: Scalar> {
    pub video: VideoVolume<T>,
    /// Index into [`ACTION_NAMES`].
    pub action: usize,
    /// Blob top-left (row, col) at frame 0.
    pub start: (isize, isize),
    /// Blob center (row, col) per frame, video pixels.
    pub centers: Vec<(f64, f64)>,
}

impl<T: Scalar> SyntheticInstance<T> {
    pub fn label(&self) -> &'static str {
        ACTION_NAMES[self.action]
    }

    /// Blob center at a fractional frame time, for response-offset ground
    /// truth: offset n of a depth-d filter sees frames n..n+d, so its
    /// center time is n + (d-1)/2.
    pub fn center_at(&self, t: f64) -> (f64, f64) {
        let (vr, vc) = ACTION_VELOCITY[self.action];
        (
            self.start.0 as f64 + vr as f64 * t + (BLOB as f64 - 1.0) / 2.0,
            self.start.1 as f64 + vc as f64 * t + (BLOB as f64 - 1.0) / 2.0,
        )
    }
}

/// Start window per action: a ±8 px jitter box around a canonical start,
/// placed so blob and crop stay inside the field for all frames. Inclusive
/// (row min, row max, col min, col max). The window is kept small on
/// purpose: instances of one action share their spatial footprint, so the
/// classes stay linearly separable in pooled-feature space while the
/// per-instance ground truth still varies.
fn start_ranges(action: usize) -> (isize, isize, isize, isize) {
    match action {
        0 => (48, 64, 32, 48), // right, canonical (56, 40)
        1 => (48, 64, 68, 84), // left, canonical (56, 76)
        2 => (68, 84, 48, 64), // up, canonical (76, 56)
        _ => unreachable!("three actions"),
    }
}

fn draw_in(g: &mut SplitMix64, lo: isize, hi: isize) -> isize {
    let span = (hi - lo + 1) as f64;
    lo + (g.next_uniform() * span).floor().min(span - 1.0) as isize
}

/// One clip. Instances are seeded independently: `index` enumerates the
/// suite (action-major), so any instance can be rebuilt in isolation.
pub fn synthetic_instance<T: Scalar>(
    master_seed: u64,
    action: usize,
    index: u64,
    noise_sigma: f64,
) -> Result<SyntheticInstance<T>> {
    if action >= ACTION_NAMES.len() {
        return Err(Error::Dimension(format!(
            "action {action} outside 0..{}",
            ACTION_NAMES.len()
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::Dimension(format!(
            "noise sigma {noise_sigma} must be a finite non-negative value"
        )));
    }
    let mut g = SplitMix64::for_stream(master_seed, SUITE_TAG, index);
    let (r_lo, r_hi, c_lo, c_hi) = start_ranges(action);
    let start = (draw_in(&mut g, r_lo, r_hi), draw_in(&mut g, c_lo, c_hi));
    let (vr, vc) = ACTION_VELOCITY[action];

    let mut data = vec![0.0f64; FIELD * FIELD * FRAMES];
    for t in 0..FRAMES {
        let top = start.0 + vr * t as isize;
        let left = start.1 + vc * t as isize;
        let base = t * FIELD * FIELD;
        for r in top..top + BLOB as isize {
            for c in left..left + BLOB as isize {
                debug_assert!(r >= 0 && (r as usize) < FIELD && c >= 0 && (c as usize) < FIELD);
                data[base + r as usize * FIELD + c as usize] = 1.0;
            }
        }
    }
    if noise_sigma > 0.0 {
        for v in data.iter_mut() {
            *v += noise_sigma * g.next_gaussian();
        }
    }

    let centers = (0..FRAMES)
        .map(|t| {
            (
                (start.0 + vr * t as isize) as f64 + (BLOB as f64 - 1.0) / 2.0,
                (start.1 + vc * t as isize) as f64 + (BLOB as f64 - 1.0) / 2.0,
            )
        })
        .collect();

    let video = VideoVolume::new(
        FIELD,
        FIELD,
        FRAMES,
        data.into_iter().map(T::of_f64).collect(),
    )?;
    Ok(SyntheticInstance {
        video,
        action,
        start,
        centers,
    })
}

/// The full suite: `instances` clips of each action, action-major order.
pub fn synthetic_suite<T: Scalar>(
    master_seed: u64,
    instances: usize,
    noise_sigma: f64,
) -> Result<Vec<SyntheticInstance<T>>> {
    if instances == 0 {
        return Err(Error::EmptyInput("suite instances"));
    }
    let mut suite = Vec::with_capacity(ACTION_NAMES.len() * instances);
    for action in 0..ACTION_NAMES.len() {
        for k in 0..instances {
            suite.push(synthetic_instance(
                master_seed,
                action,
                (action * instances + k) as u64,
                noise_sigma,
            )?);
        }
    }
    Ok(suite)
}

/// The training window for a clip: [`CROP_SIZE`] square, frames
/// [`CROP_START_FRAME`] .. +[`CROP_FRAMES`], centered on the blob's
/// position at the window's middle time and clamped to the field.
pub fn training_crop<T: Scalar>(instance: &SyntheticInstance<T>) -> Result<VideoVolume<T>> {
    let mid = CROP_START_FRAME as f64 + (CROP_FRAMES as f64 - 1.0) / 2.0;
    let center = instance.center_at(mid);
    let clamp = |v: f64| -> usize {
        let top = v - (CROP_SIZE as f64 - 1.0) / 2.0;
        (top.round() as isize).clamp(0, (FIELD - CROP_SIZE) as isize) as usize
    };
    let (top, left) = (clamp(center.0), clamp(center.1));

    let mut data = Vec::with_capacity(CROP_SIZE * CROP_SIZE * CROP_FRAMES);
    for t in CROP_START_FRAME..CROP_START_FRAME + CROP_FRAMES {
        let frame = instance.video.frame(t);
        for r in top..top + CROP_SIZE {
            data.extend_from_slice(&frame[r * FIELD + left..r * FIELD + left + CROP_SIZE]);
        }
    }
    VideoVolume::new(CROP_SIZE, CROP_SIZE, CROP_FRAMES, data)
}
