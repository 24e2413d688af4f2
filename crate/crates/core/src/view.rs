//! Affine viewpoint changes and filter compensation.
//!
//! A filter trained in one (affine-approximable) camera view can serve
//! another view without retraining: resample its frames through the affine
//! map and rescale intensities by the squared Jacobian determinant. The
//! spatial axes transform, the time axis never does.
//!
//! Coordinate convention, used everywhere in this module: a point is
//! x = (x1, x2) = (column, row). A view (A, b) maps output coordinates to
//! source coordinates, so warping is inverse sampling: the output pixel at
//! (c, r) reads the input at A*(c, r) + b with bilinear interpolation and
//! zero fill outside the source support.

use crate::error::{Error, Result};
use crate::mach::{MachFilter, ViewTag};
use crate::scalar::Scalar;
use crate::volume::VideoVolume;

const SINGULAR_DET: f64 = 1e-12;

/// Affine relation between two camera views: source = A * target + b,
/// acting on (column, row) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineView {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl AffineView {
    pub fn new(a: [[f64; 2]; 2], b: [f64; 2]) -> Result<Self> {
        let finite = a.iter().flatten().chain(b.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Dimension(
                "affine parameters must be finite".to_string(),
            ));
        }
        Ok(AffineView { a, b })
    }

    pub fn identity() -> Self {
        AffineView {
            a: [[1.0, 0.0], [0.0, 1.0]],
            b: [0.0, 0.0],
        }
    }

    /// Pure translation by (dx1, dx2) in (column, row) units.
    pub fn translation(dx1: f64, dx2: f64) -> Self {
        AffineView {
            a: [[1.0, 0.0], [0.0, 1.0]],
            b: [dx1, dx2],
        }
    }

    /// Horizontal mirror for a frame with `cols` columns: column c maps to
    /// cols-1-c.
    pub fn horizontal_flip(cols: usize) -> Self {
        AffineView {
            a: [[-1.0, 0.0], [0.0, 1.0]],
            b: [(cols - 1) as f64, 0.0],
        }
    }

    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    pub fn det_abs(&self) -> f64 {
        self.det().abs()
    }

    pub fn require_invertible(&self) -> Result<()> {
        if self.det_abs() <= SINGULAR_DET {
            return Err(Error::SingularView {
                det: self.det_abs(),
            });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<AffineView> {
        self.require_invertible()?;
        let d = self.det();
        let a = [
            [self.a[1][1] / d, -self.a[0][1] / d],
            [-self.a[1][0] / d, self.a[0][0] / d],
        ];
        let b = [
            -(a[0][0] * self.b[0] + a[0][1] * self.b[1]),
            -(a[1][0] * self.b[0] + a[1][1] * self.b[1]),
        ];
        Ok(AffineView { a, b })
    }

    /// Maps a point (column, row) through A x + b.
    pub fn apply(&self, x1: f64, x2: f64) -> (f64, f64) {
        (
            self.a[0][0] * x1 + self.a[0][1] * x2 + self.b[0],
            self.a[1][0] * x1 + self.a[1][1] * x2 + self.b[1],
        )
    }

    /// The single view equivalent to warping with `self` first and then
    /// warping that result with `second`: since each warp samples through
    /// its own map, the composite samples through self.a * second.a * x +
    /// self.a * second.b + self.b.
    pub fn then(&self, second: &AffineView) -> AffineView {
        let a1 = self.a;
        let a2 = second.a;
        let a = [
            [
                a1[0][0] * a2[0][0] + a1[0][1] * a2[1][0],
                a1[0][0] * a2[0][1] + a1[0][1] * a2[1][1],
            ],
            [
                a1[1][0] * a2[0][0] + a1[1][1] * a2[1][0],
                a1[1][0] * a2[0][1] + a1[1][1] * a2[1][1],
            ],
        ];
        let b = [
            a1[0][0] * second.b[0] + a1[0][1] * second.b[1] + self.b[0],
            a1[1][0] * second.b[0] + a1[1][1] * second.b[1] + self.b[1],
        ];
        AffineView { a, b }
    }

    /// Six comma-separated reals: a11,a12,a21,a22,b1,b2.
    pub fn parse_csv(text: &str) -> std::result::Result<AffineView, String> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 6 {
            return Err(format!(
                "expected 6 comma-separated reals a11,a12,a21,a22,b1,b2, got {} fields",
                parts.len()
            ));
        }
        let mut vals = [0.0f64; 6];
        for (slot, raw) in vals.iter_mut().zip(&parts) {
            *slot = raw
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad real '{}': {e}", raw.trim()))?;
        }
        AffineView::new([[vals[0], vals[1]], [vals[2], vals[3]]], [vals[4], vals[5]])
            .map_err(|e| e.to_string())
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.a[0][0], self.a[0][1], self.a[1][0], self.a[1][1], self.b[0], self.b[1]
        )
    }
}

/// Bilinear read at (col, row) with zero outside the frame. Taps with zero
/// weight are never dereferenced, so integer sites on the boundary stay
/// exact.
fn sample_bilinear<T: Scalar>(frame: &[T], rows: usize, cols: usize, col: f64, row: f64) -> f64 {
    let c0 = col.floor();
    let r0 = row.floor();
    let fc = col - c0;
    let fr = row - r0;
    let c0 = c0 as i64;
    let r0 = r0 as i64;
    let mut acc = 0.0;
    for (dr, wr) in [(0i64, 1.0 - fr), (1, fr)] {
        if wr == 0.0 {
            continue;
        }
        for (dc, wc) in [(0i64, 1.0 - fc), (1, fc)] {
            if wc == 0.0 {
                continue;
            }
            let r = r0 + dr;
            let c = c0 + dc;
            if r >= 0 && (r as usize) < rows && c >= 0 && (c as usize) < cols {
                acc += wr * wc * frame[r as usize * cols + c as usize].as_f64();
            }
        }
    }
    acc
}

/// Resamples every frame of `volume` through `view`, multiplying samples by
/// `gain`. Output shape equals input shape; the time axis is untouched.
fn warp_frames<T: Scalar>(volume: &VideoVolume<T>, view: &AffineView, gain: f64) -> VideoVolume<T> {
    let (rows, cols, frames) = volume.dims();
    let mut data = vec![T::zero(); rows * cols * frames];
    for t in 0..frames {
        let src = volume.frame(t);
        let dst_base = t * rows * cols;
        for r in 0..rows {
            for c in 0..cols {
                let (sc, sr) = view.apply(c as f64, r as f64);
                let v = gain * sample_bilinear(src, rows, cols, sc, sr);
                data[dst_base + r * cols + c] = T::of_f64(v);
            }
        }
    }
    VideoVolume::from_computed(rows, cols, frames, data)
}

/// Geometric warp of a video (no intensity rescaling). Used to bring
/// differently-viewed training examples into a common frame.
pub fn warp_volume<T: Scalar>(volume: &VideoVolume<T>, view: &AffineView) -> Result<VideoVolume<T>> {
    view.require_invertible()?;
    Ok(warp_frames(volume, view, 1.0))
}

/// Adapts a filter to the view (A, b): frames are resampled through the map
/// and scaled by det(A)^2, and the alpha parameter picks up the same factor
/// while beta and gamma ride along unchanged. The result is tagged with the
/// view it was compensated for.
pub fn compensate<T: Scalar>(filter: &MachFilter<T>, view: &AffineView) -> Result<MachFilter<T>> {
    view.require_invertible()?;
    let gain = view.det() * view.det();
    let volume = warp_frames(filter.volume(), view, gain);
    Ok(MachFilter::from_parts(
        volume,
        filter.alpha() * gain,
        filter.beta(),
        filter.gamma(),
        filter.label().to_string(),
        ViewTag::Compensated(*view),
    ))
}

/// Mirrors a filter left-right by exact column reversal (no resampling, no
/// intensity change). A plain type-1 filter becomes a type-2 filter; other
/// tags are kept.
pub fn flip_horizontal<T: Scalar>(filter: &MachFilter<T>) -> MachFilter<T> {
    let (rows, cols, frames) = filter.volume().dims();
    let mut data = Vec::with_capacity(rows * cols * frames);
    for t in 0..frames {
        let src = filter.volume().frame(t);
        for r in 0..rows {
            let row = &src[r * cols..(r + 1) * cols];
            data.extend(row.iter().rev().copied());
        }
    }
    let volume = VideoVolume::from_computed(rows, cols, frames, data);
    let tag = match filter.view_tag() {
        ViewTag::Type1 => ViewTag::Type2,
        other => other,
    };
    MachFilter::from_parts(
        volume,
        filter.alpha(),
        filter.beta(),
        filter.gamma(),
        filter.label().to_string(),
        tag,
    )
}
