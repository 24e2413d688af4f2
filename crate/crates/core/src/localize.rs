//! Per-frame bounding boxes from a response volume.
//!
//! The peak of a response slice says where the filter matched best; the
//! box says how tightly. The slice is shifted by its minimum (derivative
//! filters produce negative responses, and a probability reading needs
//! non-negative values), and the filter-sized rectangle centered on the
//! peak becomes a density. The box is then the largest rectangle, centered
//! on the same peak and shaped like the filter, whose density mass stays
//! at or below the budget lambda: side lengths (ceil(g*L), ceil(g*M)) with
//! g walked down the grid 1.00, 0.99, ..., 0.01. A response so spiked that
//! even the smallest rectangle overshoots collapses to a flagged 1x1 box.
//!
//! Response coordinates are filter placements, so a peak at (l, m) means
//! the filter covered video rows [l, l+L) and columns [m, m+M). Box
//! centers are reported in video pixels: peak + (filter extent - 1)/2.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::ResponseVolume;

/// Displacement thresholds (pixels) summarized by [`center_error`].
pub const CDF_THRESHOLDS: [f64; 5] = [5.0, 10.0, 15.0, 20.0, 25.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxMode {
    /// Largest centered box with density mass at most `lambda`.
    Mass { lambda: f64 },
    /// Filter-sized box with its top-left corner at the peak.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub frame_index: usize,
    /// Video-pixel center (row, col); half-integral for even extents.
    pub center: (f64, f64),
    pub height: usize,
    pub width: usize,
    /// Density mass inside the box; 1.0 in fixed mode.
    pub mass_fraction: f64,
    /// Set when no grid box met the mass budget and the 1x1 fallback was
    /// returned.
    pub degenerate: bool,
}

impl BoundingBox {
    /// Integer top-left video pixel of the box.
    pub fn top_left(&self) -> (usize, usize) {
        let top = self.center.0 - (self.height as f64 - 1.0) / 2.0;
        let left = self.center.1 - (self.width as f64 - 1.0) / 2.0;
        (top.round().max(0.0) as usize, left.round().max(0.0) as usize)
    }
}

struct Slice2 {
    rows: usize,
    cols: usize,
    /// Inclusive prefix sums, (rows+1) x (cols+1).
    prefix: Vec<f64>,
}

impl Slice2 {
    fn new(values: &[f64], rows: usize, cols: usize) -> Self {
        let mut prefix = vec![0.0f64; (rows + 1) * (cols + 1)];
        for r in 0..rows {
            let mut row_sum = 0.0;
            for c in 0..cols {
                row_sum += values[r * cols + c];
                prefix[(r + 1) * (cols + 1) + (c + 1)] =
                    prefix[r * (cols + 1) + (c + 1)] + row_sum;
            }
        }
        Slice2 { rows, cols, prefix }
    }

    /// Sum over [r0, r1) x [c0, c1) clipped to the slice.
    fn sum(&self, r0: isize, r1: isize, c0: isize, c1: isize) -> f64 {
        let r0 = r0.clamp(0, self.rows as isize) as usize;
        let r1 = r1.clamp(0, self.rows as isize) as usize;
        let c0 = c0.clamp(0, self.cols as isize) as usize;
        let c1 = c1.clamp(0, self.cols as isize) as usize;
        if r0 >= r1 || c0 >= c1 {
            return 0.0;
        }
        let w = self.cols + 1;
        self.prefix[r1 * w + c1] - self.prefix[r0 * w + c1] - self.prefix[r1 * w + c0]
            + self.prefix[r0 * w + c0]
    }

    /// Area of the same clipped window.
    fn area(&self, r0: isize, r1: isize, c0: isize, c1: isize) -> f64 {
        let r0 = r0.clamp(0, self.rows as isize);
        let r1 = r1.clamp(0, self.rows as isize);
        let c0 = c0.clamp(0, self.cols as isize);
        let c1 = c1.clamp(0, self.cols as isize);
        ((r1 - r0).max(0) * (c1 - c0).max(0)) as f64
    }
}

fn centered_window(center: usize, extent: usize) -> (isize, isize) {
    let start = center as isize - (extent as isize - 1) / 2;
    (start, start + extent as isize)
}

fn check_inputs(
    response_dims: (usize, usize, usize),
    frame_offset: usize,
    filter_dims: (usize, usize),
    mode: BoxMode,
) -> Result<()> {
    if frame_offset >= response_dims.2 {
        return Err(Error::Dimension(format!(
            "frame offset {frame_offset} outside response depth {}",
            response_dims.2
        )));
    }
    if filter_dims.0 == 0 || filter_dims.1 == 0 {
        return Err(Error::Dimension("filter extent must be positive".into()));
    }
    if let BoxMode::Mass { lambda } = mode {
        if !(lambda.is_finite() && lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Dimension(format!(
                "mass budget {lambda} outside (0, 1]"
            )));
        }
    }
    Ok(())
}

/// Boxes one response slice. `filter_dims` is (rows, cols) of the filter
/// that produced the response.
pub fn locate_frame<T: Scalar>(
    response: &ResponseVolume<T>,
    frame_offset: usize,
    filter_dims: (usize, usize),
    mode: BoxMode,
) -> Result<BoundingBox> {
    check_inputs(response.dims(), frame_offset, filter_dims, mode)?;
    let (rows, cols, _) = response.dims();
    let (fl, fm) = filter_dims;
    let slice = response.frame_slice(frame_offset);

    let mut peak = (0usize, 0usize);
    let mut peak_val = slice[0].as_f64();
    let mut min_val = peak_val;
    for (i, v) in slice.iter().enumerate() {
        let v = v.as_f64();
        if v > peak_val {
            peak_val = v;
            peak = (i / cols, i % cols);
        }
        if v < min_val {
            min_val = v;
        }
    }

    let center = (
        peak.0 as f64 + (fl as f64 - 1.0) / 2.0,
        peak.1 as f64 + (fm as f64 - 1.0) / 2.0,
    );

    let lambda = match mode {
        BoxMode::Fixed => {
            return Ok(BoundingBox {
                frame_index: frame_offset,
                center,
                height: fl,
                width: fm,
                mass_fraction: 1.0,
                degenerate: false,
            });
        }
        BoxMode::Mass { lambda } => lambda,
    };

    let shifted: Vec<f64> = slice.iter().map(|v| v.as_f64() - min_val).collect();
    let sums = Slice2::new(&shifted, rows, cols);
    let (rr0, rr1) = centered_window(peak.0, fl);
    let (rc0, rc1) = centered_window(peak.1, fm);
    let total = sums.sum(rr0, rr1, rc0, rc1);
    // A perfectly flat slice carries no mass anywhere; fall back to the
    // area ratio so the search still behaves like the uniform case.
    let flat = total <= 0.0;
    let total_area = sums.area(rr0, rr1, rc0, rc1);

    let mass_of = |h: usize, w: usize| -> f64 {
        let (br0, br1) = centered_window(peak.0, h);
        let (bc0, bc1) = centered_window(peak.1, w);
        if flat {
            sums.area(br0, br1, bc0, bc1) / total_area
        } else {
            sums.sum(br0, br1, bc0, bc1) / total
        }
    };

    for step in (1..=100u32).rev() {
        let gamma = step as f64 / 100.0;
        let h = (gamma * fl as f64).ceil() as usize;
        let w = (gamma * fm as f64).ceil() as usize;
        let mass = mass_of(h, w);
        if mass <= lambda {
            return Ok(BoundingBox {
                frame_index: frame_offset,
                center,
                height: h,
                width: w,
                mass_fraction: mass,
                degenerate: false,
            });
        }
    }
    Ok(BoundingBox {
        frame_index: frame_offset,
        center,
        height: 1,
        width: 1,
        mass_fraction: mass_of(1, 1),
        degenerate: true,
    })
}

/// One box per response frame.
pub fn locate_video<T: Scalar>(
    response: &ResponseVolume<T>,
    filter_dims: (usize, usize),
    mode: BoxMode,
) -> Result<Vec<BoundingBox>> {
    (0..response.dims().2)
        .map(|n| locate_frame(response, n, filter_dims, mode))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterErrorSummary {
    /// Euclidean displacement per frame, box center minus truth.
    pub displacements: Vec<f64>,
    /// Fraction of frames at or under each of [`CDF_THRESHOLDS`].
    pub within: [f64; 5],
}

/// Compares box centers against ground-truth centers frame by frame.
pub fn center_error(boxes: &[BoundingBox], truth: &[(f64, f64)]) -> Result<CenterErrorSummary> {
    if boxes.len() != truth.len() {
        return Err(Error::Alignment {
            left_name: "boxes",
            left: boxes.len(),
            right_name: "truth centers",
            right: truth.len(),
        });
    }
    if boxes.is_empty() {
        return Err(Error::EmptyInput("boxes"));
    }
    let displacements: Vec<f64> = boxes
        .iter()
        .zip(truth)
        .map(|(b, t)| ((b.center.0 - t.0).powi(2) + (b.center.1 - t.1).powi(2)).sqrt())
        .collect();
    let count = displacements.len() as f64;
    let mut within = [0.0f64; 5];
    for (slot, threshold) in within.iter_mut().zip(CDF_THRESHOLDS) {
        *slot = displacements.iter().filter(|&&d| d <= threshold).count() as f64 / count;
    }
    Ok(CenterErrorSummary {
        displacements,
        within,
    })
}
