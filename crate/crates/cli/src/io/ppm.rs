//! Overlay rendering: each frame is min-max normalized to 8-bit grayscale,
//! replicated to RGB, and requested boxes are drawn as 1-pixel pure-green
//! rectangles. Output is one binary PPM (P6) per frame.

use std::path::Path;

use smash_core::{Result, Volume};

use super::atomic_write;

const GREEN: [u8; 3] = [0, 255, 0];

/// A box to draw, already resolved to its top-left corner. Coordinates may
/// stick out of the frame; drawing clips them.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub frame: usize,
    pub top: i64,
    pub left: i64,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    /// Centered construction, mirroring how boxes are reported.
    pub fn centered(frame: usize, center: (f64, f64), height: usize, width: usize) -> Rect {
        Rect {
            frame,
            top: (center.0 - (height as f64 - 1.0) / 2.0).round() as i64,
            left: (center.1 - (width as f64 - 1.0) / 2.0).round() as i64,
            height,
            width,
        }
    }

    fn fits(&self, rows: usize, cols: usize) -> bool {
        self.top >= 0
            && self.left >= 0
            && self.top + self.height as i64 <= rows as i64
            && self.left + self.width as i64 <= cols as i64
    }
}

fn paint(rgb: &mut [u8], rows: usize, cols: usize, r: i64, c: i64) {
    if r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols {
        let at = (r as usize * cols + c as usize) * 3;
        rgb[at..at + 3].copy_from_slice(&GREEN);
    }
}

/// Renders one frame to an RGB payload. Returns the pixels and whether any
/// box had to be clipped to the frame.
pub fn render_frame(frame: &[f64], rows: usize, cols: usize, boxes: &[Rect]) -> (Vec<u8>, bool) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in frame {
        min = min.min(v);
        max = max.max(v);
    }
    let span = max - min;
    let mut rgb = vec![0u8; rows * cols * 3];
    if span > 0.0 {
        for (i, &v) in frame.iter().enumerate() {
            let gray = (255.0 * (v - min) / span).round().clamp(0.0, 255.0) as u8;
            rgb[i * 3] = gray;
            rgb[i * 3 + 1] = gray;
            rgb[i * 3 + 2] = gray;
        }
    }

    let mut clipped = false;
    for b in boxes {
        clipped |= !b.fits(rows, cols);
        let bottom = b.top + b.height as i64 - 1;
        let right = b.left + b.width as i64 - 1;
        for c in b.left..=right {
            paint(&mut rgb, rows, cols, b.top, c);
            paint(&mut rgb, rows, cols, bottom, c);
        }
        for r in b.top..=bottom {
            paint(&mut rgb, rows, cols, r, b.left);
            paint(&mut rgb, rows, cols, r, right);
        }
    }
    (rgb, clipped)
}

pub fn write_ppm(path: &Path, rows: usize, cols: usize, rgb: &[u8]) -> Result<()> {
    let mut bytes = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    bytes.extend_from_slice(rgb);
    atomic_write(path, &bytes)
}

/// Writes `frame_NNNN.ppm` per video frame into `out_dir`, drawing each
/// box on its frame. Returns the count of frames where a box was clipped.
pub fn render_overlay(video: &Volume, boxes: &[Rect], out_dir: &Path) -> Result<usize> {
    let (rows, cols, frames) = video.dims();
    let width = frames.to_string().len().max(4);
    let mut clipped_frames = 0;
    for t in 0..frames {
        let frame_boxes: Vec<Rect> = boxes.iter().copied().filter(|b| b.frame == t).collect();
        let (rgb, clipped) = render_frame(video.frame(t), rows, cols, &frame_boxes);
        if clipped {
            clipped_frames += 1;
        }
        let name = format!("frame_{t:0width$}.ppm");
        write_ppm(&out_dir.join(name), rows, cols, &rgb)?;
    }
    Ok(clipped_frames)
}
