//! Video volumes, spectra, and the 3D correlation primitives.
//!
//! A [`VideoVolume`] is a P x Q x R stack of frames (P rows, Q columns, R
//! frames) stored flat: row-major inside a frame, frames concatenated. All
//! spatio-temporal processing reduces to three operations defined here:
//! the unnormalized forward 3D transform [`dft3`], its normalized inverse
//! [`idft3`], and valid-region linear correlation [`correlate3`], which the
//! matching pipeline applies to temporal-derivative volumes rather than raw
//! intensity (flat backgrounds cancel out, moving edges remain).
//!
//! Correlation is evaluated in the frequency domain: both operands are
//! zero-padded to the video's size, the video spectrum is multiplied by the
//! conjugate filter spectrum, and the inverse transform is cropped to the
//! offsets where the filter fits entirely inside the video. That crop is
//! exactly the triple-sum definition
//!
//! ```text
//! c(l, m, n) = sum_t sum_y sum_x  s(l + x, m + y, n + t) * h(x, y, t)
//! ```
//!
//! with no circular wrap-around, because padded shifts inside the valid
//! region never reach the wrapped tail.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative imaginary residue allowed when an inverse transform claims to
/// produce a real volume.
pub const IMAG_RESIDUE_TOL: f64 = 1e-6;

fn checked_len(p: usize, q: usize, r: usize) -> Result<usize> {
    if p == 0 || q == 0 || r == 0 {
        return Err(Error::Dimension(format!(
            "volume dimensions must be positive, got ({p}, {q}, {r})"
        )));
    }
    let elements = p as u128 * q as u128 * r as u128;
    // Stay comfortably inside what a Vec of 16-byte complex elements can
    // address; anything near this limit is a caller bug, not a workload.
    if elements > (isize::MAX as u128) / 16 {
        return Err(Error::Oversize { elements });
    }
    Ok(elements as usize)
}

/// P x Q x R real volume: P rows, Q columns, R frames.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoVolume<T: Scalar> {
    rows: usize,
    cols: usize,
    frames: usize,
    data: Vec<T>,
}

impl<T: Scalar> VideoVolume<T> {
    /// Wraps caller data, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, frames: usize, data: Vec<T>) -> Result<Self> {
        let len = checked_len(rows, cols, frames)?;
        if data.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} samples for a {rows}x{cols}x{frames} volume, got {}",
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(VideoVolume {
            rows,
            cols,
            frames,
            data,
        })
    }

    /// All-zero volume of the given shape.
    pub fn zeros(rows: usize, cols: usize, frames: usize) -> Result<Self> {
        let len = checked_len(rows, cols, frames)?;
        Ok(VideoVolume {
            rows,
            cols,
            frames,
            data: vec![T::zero(); len],
        })
    }

    /// Internal constructor for values we produced ourselves.
    pub(crate) fn from_computed(rows: usize, cols: usize, frames: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), rows * cols * frames);
        VideoVolume {
            rows,
            cols,
            frames,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// (rows, cols, frames).
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.frames)
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize, frame: usize) -> usize {
        frame * self.rows * self.cols + row * self.cols + col
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize, frame: usize) -> T {
        self.data[self.index(row, col, frame)]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize, frame: usize) -> &mut T {
        let i = self.index(row, col, frame);
        &mut self.data[i]
    }

    /// One frame as a contiguous row-major slice.
    pub fn frame(&self, t: usize) -> &[T] {
        let fsize = self.rows * self.cols;
        &self.data[t * fsize..(t + 1) * fsize]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [T] {
        let fsize = self.rows * self.cols;
        &mut self.data[t * fsize..(t + 1) * fsize]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.as_f64() * v.as_f64()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scale(&mut self, factor: T) {
        for v in &mut self.data {
            *v = *v * factor;
        }
    }
}

/// Complex 3D spectrum with the same layout as the volume it came from.
#[derive(Debug, Clone)]
pub struct Spectrum3<T: Scalar> {
    rows: usize,
    cols: usize,
    frames: usize,
    bins: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum3<T> {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.frames)
    }

    #[inline]
    pub fn index(&self, u1: usize, u2: usize, u3: usize) -> usize {
        u3 * self.rows * self.cols + u1 * self.cols + u2
    }

    #[inline]
    pub fn at(&self, u1: usize, u2: usize, u3: usize) -> Complex<T> {
        self.bins[self.index(u1, u2, u3)]
    }

    pub fn bins(&self) -> &[Complex<T>] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.bins
    }

    /// Builds a spectrum from raw bins; shape must match.
    pub fn from_bins(
        rows: usize,
        cols: usize,
        frames: usize,
        bins: Vec<Complex<T>>,
    ) -> Result<Self> {
        let len = checked_len(rows, cols, frames)?;
        if bins.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} bins for a {rows}x{cols}x{frames} spectrum, got {}",
                bins.len()
            )));
        }
        Ok(Spectrum3 {
            rows,
            cols,
            frames,
            bins,
        })
    }
}

/// Where a response volume came from: full-data correlation or the
/// measurement-domain path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Oracle,
    Smashed,
}

/// Correlation output over all valid placements of a filter inside a video.
///
/// Shape is (P-L+1, Q-M+1, R-N+1) for a P x Q x R video and L x M x N
/// filter; entry (l, m, n) is the correlation with the filter's origin
/// placed at row l, column m, frame n.
#[derive(Debug, Clone)]
pub struct ResponseVolume<T: Scalar> {
    off_rows: usize,
    off_cols: usize,
    off_frames: usize,
    data: Vec<T>,
    provenance: Provenance,
}

impl<T: Scalar> ResponseVolume<T> {
    pub fn new(
        off_rows: usize,
        off_cols: usize,
        off_frames: usize,
        data: Vec<T>,
        provenance: Provenance,
    ) -> Result<Self> {
        let len = checked_len(off_rows, off_cols, off_frames)?;
        if data.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} samples for a {off_rows}x{off_cols}x{off_frames} response, got {}",
                data.len()
            )));
        }
        Ok(ResponseVolume {
            off_rows,
            off_cols,
            off_frames,
            data,
            provenance,
        })
    }

    /// (row offsets, column offsets, frame offsets).
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.off_rows, self.off_cols, self.off_frames)
    }

    #[inline]
    pub fn index(&self, l: usize, m: usize, n: usize) -> usize {
        n * self.off_rows * self.off_cols + l * self.off_cols + m
    }

    #[inline]
    pub fn at(&self, l: usize, m: usize, n: usize) -> T {
        self.data[self.index(l, m, n)]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn set_provenance(&mut self, provenance: Provenance) {
        self.provenance = provenance;
    }

    /// Contiguous slice of all offsets at temporal offset `n`.
    pub fn frame_slice(&self, n: usize) -> &[T] {
        let fsize = self.off_rows * self.off_cols;
        &self.data[n * fsize..(n + 1) * fsize]
    }

    /// Global maximum and its (l, m, n) location; ties go to the earliest
    /// position in storage order.
    pub fn peak(&self) -> (T, (usize, usize, usize)) {
        let mut best = self.data[0];
        let mut best_i = 0;
        for (i, &v) in self.data.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let fsize = self.off_rows * self.off_cols;
        let n = best_i / fsize;
        let rem = best_i % fsize;
        (best, (rem / self.off_cols, rem % self.off_cols, n))
    }
}

// ---- Transforms ----

fn fft_pass<T: Scalar>(
    bins: &mut [Complex<T>],
    dims: (usize, usize, usize),
    planner: &mut FftPlanner<T>,
    forward: bool,
) {
    let (rows, cols, frames) = dims;
    let plan_for = |planner: &mut FftPlanner<T>, len: usize| -> Arc<dyn Fft<T>> {
        if forward {
            planner.plan_fft_forward(len)
        } else {
            planner.plan_fft_inverse(len)
        }
    };

    // Columns vary fastest, so each row is already contiguous.
    let fft_cols = plan_for(planner, cols);
    for lane in bins.chunks_exact_mut(cols) {
        fft_cols.process(lane);
    }

    // Rows: stride `cols` inside each frame.
    let fft_rows = plan_for(planner, rows);
    let fsize = rows * cols;
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); rows];
    for t in 0..frames {
        for m in 0..cols {
            let base = t * fsize + m;
            for l in 0..rows {
                scratch[l] = bins[base + l * cols];
            }
            fft_rows.process(&mut scratch);
            for l in 0..rows {
                bins[base + l * cols] = scratch[l];
            }
        }
    }

    // Frames: stride rows*cols.
    let fft_frames = plan_for(planner, frames);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); frames];
    for site in 0..fsize {
        for t in 0..frames {
            scratch[t] = bins[site + t * fsize];
        }
        fft_frames.process(&mut scratch);
        for t in 0..frames {
            bins[site + t * fsize] = scratch[t];
        }
    }
}

/// Forward 3D transform, unnormalized, negative exponent. The (0, 0, 0) bin
/// equals the plain sum of all samples.
pub fn dft3<T: Scalar>(volume: &VideoVolume<T>) -> Spectrum3<T> {
    let (rows, cols, frames) = volume.dims();
    let mut bins: Vec<Complex<T>> = volume
        .data()
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .collect();
    let mut planner = FftPlanner::new();
    fft_pass(&mut bins, (rows, cols, frames), &mut planner, true);
    Spectrum3 {
        rows,
        cols,
        frames,
        bins,
    }
}

/// Inverse 3D transform with 1/(P*Q*R) normalization. The input must be the
/// spectrum of a real volume; a relative imaginary residue above
/// [`IMAG_RESIDUE_TOL`] is rejected rather than silently discarded.
pub fn idft3<T: Scalar>(spectrum: &Spectrum3<T>) -> Result<VideoVolume<T>> {
    let (rows, cols, frames) = spectrum.dims();
    let mut bins = spectrum.bins.clone();
    let mut planner = FftPlanner::new();
    fft_pass(&mut bins, (rows, cols, frames), &mut planner, false);

    let scale = 1.0 / (rows * cols * frames) as f64;
    let mut max_im = 0.0f64;
    let mut max_mag = 0.0f64;
    for b in &bins {
        let im = b.im.as_f64().abs();
        let mag = b.norm_sqr().as_f64();
        if im > max_im {
            max_im = im;
        }
        if mag > max_mag {
            max_mag = mag;
        }
    }
    let max_mag = max_mag.sqrt();
    if max_mag > 0.0 && max_im / max_mag > IMAG_RESIDUE_TOL {
        return Err(Error::ConjugateSymmetry {
            residue: max_im / max_mag,
            tolerance: IMAG_RESIDUE_TOL,
        });
    }
    let factor = T::of_f64(scale);
    let data: Vec<T> = bins.iter().map(|b| b.re * factor).collect();
    Ok(VideoVolume::from_computed(rows, cols, frames, data))
}

/// Valid-region linear correlation of `video` with `filter`.
///
/// Both operands are zero-padded to the video's shape, transformed, combined
/// as video-spectrum times conjugate filter-spectrum, inverted, and cropped
/// to the (P-L+1) x (Q-M+1) x (R-N+1) block of placements that keep the
/// filter fully inside the video. Fails if the filter exceeds the video
/// along any axis.
pub fn correlate3<T: Scalar>(
    video: &VideoVolume<T>,
    filter: &VideoVolume<T>,
) -> Result<ResponseVolume<T>> {
    let spectrum = dft3(video);
    correlate3_spectrum(&spectrum, filter)
}

/// Correlation against a precomputed video spectrum. Splitting this out lets
/// batch pipelines transform each video once and sweep a whole filter bank
/// against it.
pub fn correlate3_spectrum<T: Scalar>(
    video_spectrum: &Spectrum3<T>,
    filter: &VideoVolume<T>,
) -> Result<ResponseVolume<T>> {
    let (p, q, r) = video_spectrum.dims();
    let (l, m, n) = filter.dims();
    if l > p || m > q || n > r {
        return Err(Error::Dimension(format!(
            "filter {l}x{m}x{n} does not fit inside video {p}x{q}x{r}"
        )));
    }

    // Zero-pad the filter to the video's shape and transform.
    let mut padded = vec![Complex::new(T::zero(), T::zero()); p * q * r];
    for t in 0..n {
        for y in 0..l {
            let src = t * l * m + y * m;
            let dst = t * p * q + y * q;
            for x in 0..m {
                padded[dst + x] = Complex::new(filter.data()[src + x], T::zero());
            }
        }
    }
    let mut planner = FftPlanner::new();
    fft_pass(&mut padded, (p, q, r), &mut planner, true);

    for (b, v) in padded.iter_mut().zip(video_spectrum.bins.iter()) {
        *b = *v * b.conj();
    }
    fft_pass(&mut padded, (p, q, r), &mut planner, false);

    let scale = T::of_f64(1.0 / (p * q * r) as f64);
    let (dr, dc, df) = (p - l + 1, q - m + 1, r - n + 1);
    let mut out = vec![T::zero(); dr * dc * df];
    for nn in 0..df {
        for ll in 0..dr {
            let src = nn * p * q + ll * q;
            let dst = nn * dr * dc + ll * dc;
            for mm in 0..dc {
                out[dst + mm] = padded[src + mm].re * scale;
            }
        }
    }
    Ok(ResponseVolume {
        off_rows: dr,
        off_cols: dc,
        off_frames: df,
        data: out,
        provenance: Provenance::Oracle,
    })
}

/// Forward temporal difference: output frame t is frame t+1 minus frame t,
/// leaving R-1 frames. Static content cancels; motion energy survives.
pub fn temporal_derivative<T: Scalar>(volume: &VideoVolume<T>) -> Result<VideoVolume<T>> {
    let (p, q, r) = volume.dims();
    if r < 2 {
        return Err(Error::InsufficientFrames { needed: 2, got: r });
    }
    let fsize = p * q;
    let mut data = Vec::with_capacity(fsize * (r - 1));
    for t in 0..r - 1 {
        let cur = volume.frame(t);
        let next = volume.frame(t + 1);
        data.extend(cur.iter().zip(next).map(|(&a, &b)| b - a));
    }
    Ok(VideoVolume::from_computed(p, q, r - 1, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_volume(p: usize, q: usize, r: usize, seed: u64) -> VideoVolume<f64> {
        let mut g = SplitMix64::new(seed);
        let data: Vec<f64> = (0..p * q * r).map(|_| g.next_uniform() - 0.5).collect();
        VideoVolume::new(p, q, r, data).unwrap()
    }

    /// Literal triple-sum forward transform, kept deliberately naive.
    fn dft3_bruteforce(v: &VideoVolume<f64>) -> Vec<Complex<f64>> {
        let (p, q, r) = v.dims();
        let mut bins = vec![Complex::new(0.0, 0.0); p * q * r];
        for u3 in 0..r {
            for u1 in 0..p {
                for u2 in 0..q {
                    let mut acc = Complex::new(0.0, 0.0);
                    for t in 0..r {
                        for x1 in 0..p {
                            for x2 in 0..q {
                                let phase = -2.0
                                    * std::f64::consts::PI
                                    * (u1 as f64 * x1 as f64 / p as f64
                                        + u2 as f64 * x2 as f64 / q as f64
                                        + u3 as f64 * t as f64 / r as f64);
                                acc += Complex::from_polar(v.at(x1, x2, t), phase);
                            }
                        }
                    }
                    bins[u3 * p * q + u1 * q + u2] = acc;
                }
            }
        }
        bins
    }

    #[test]
    fn constant_volume_concentrates_in_dc() {
        let v = VideoVolume::new(2, 2, 2, vec![1.0f64; 8]).unwrap();
        let s = dft3(&v);
        assert!((s.at(0, 0, 0).re - 8.0).abs() < 1e-12);
        assert!(s.at(0, 0, 0).im.abs() < 1e-12);
        for u3 in 0..2 {
            for u1 in 0..2 {
                for u2 in 0..2 {
                    if (u1, u2, u3) != (0, 0, 0) {
                        assert!(s.at(u1, u2, u3).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let mut v = VideoVolume::zeros(4, 4, 4).unwrap();
        *v.at_mut(0, 0, 0) = 1.0f64;
        let s = dft3(&v);
        for b in s.bins() {
            assert!((b.re - 1.0).abs() < 1e-12 && b.im.abs() < 1e-12);
        }
    }

    #[test]
    fn matches_bruteforce_transform() {
        let v = random_volume(4, 3, 5, 21);
        let fast = dft3(&v);
        let slow = dft3_bruteforce(&v);
        let scale = slow.iter().map(|b| b.norm()).fold(0.0, f64::max);
        for (a, b) in fast.bins().iter().zip(&slow) {
            assert!((a - b).norm() / scale < 1e-10);
        }
    }

    #[test]
    fn round_trip_recovers_volume() {
        let v = random_volume(5, 4, 3, 7);
        let back = idft3(&dft3(&v)).unwrap();
        let scale = v.data().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (a, b) in v.data().iter().zip(back.data()) {
            assert!((a - b).abs() / scale < 1e-9);
        }
    }

    #[test]
    fn parseval_energy_balance() {
        let v = random_volume(4, 4, 4, 3);
        let s = dft3(&v);
        let spatial: f64 = v.energy();
        let spectral: f64 = s.bins().iter().map(|b| b.norm_sqr()).sum();
        assert!((spectral - spatial * 64.0).abs() / spectral < 1e-10);
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let mut bins = vec![Complex::new(0.0f64, 0.0); 8];
        bins[1] = Complex::new(0.0, 1.0); // no conjugate partner
        let s = Spectrum3::from_bins(2, 2, 2, bins).unwrap();
        match idft3(&s) {
            Err(Error::ConjugateSymmetry { .. }) => {}
            other => panic!("expected conjugate-symmetry error, got {other:?}"),
        }
    }

    /// Literal correlation sums for cross-checking the FFT path.
    fn correlate_bruteforce(s: &VideoVolume<f64>, h: &VideoVolume<f64>) -> Vec<f64> {
        let (p, q, r) = s.dims();
        let (l, m, n) = h.dims();
        let (dr, dc, df) = (p - l + 1, q - m + 1, r - n + 1);
        let mut out = vec![0.0; dr * dc * df];
        for nn in 0..df {
            for ll in 0..dr {
                for mm in 0..dc {
                    let mut acc = 0.0;
                    for t in 0..n {
                        for x in 0..l {
                            for y in 0..m {
                                acc += s.at(ll + x, mm + y, nn + t) * h.at(x, y, t);
                            }
                        }
                    }
                    out[nn * dr * dc + ll * dc + mm] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn correlation_matches_literal_sums() {
        let s = random_volume(6, 5, 4, 11);
        let h = random_volume(3, 2, 2, 12);
        let fast = correlate3(&s, &h).unwrap();
        let slow = correlate_bruteforce(&s, &h);
        assert_eq!(fast.dims(), (4, 4, 3));
        let scale = slow.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (a, b) in fast.data().iter().zip(&slow) {
            assert!((a - b).abs() / scale < 1e-9);
        }
    }

    #[test]
    fn unit_filter_is_identity() {
        let s = random_volume(4, 4, 3, 5);
        let h = VideoVolume::new(1, 1, 1, vec![1.0f64]).unwrap();
        let c = correlate3(&s, &h).unwrap();
        assert_eq!(c.dims(), s.dims());
        for (a, b) in c.data().iter().zip(s.data()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn shifted_copy_peaks_at_the_shift() {
        // Plant a small pattern inside a zero video; correlating with that
        // pattern must peak exactly at the planting offset.
        let h = random_volume(3, 3, 2, 9);
        let mut s = VideoVolume::zeros(8, 8, 5).unwrap();
        let (off_l, off_m, off_n) = (2, 4, 1);
        for t in 0..2 {
            for x in 0..3 {
                for y in 0..3 {
                    *s.at_mut(off_l + x, off_m + y, off_n + t) = h.at(x, y, t);
                }
            }
        }
        let c = correlate3(&s, &h).unwrap();
        let (_, loc) = c.peak();
        assert_eq!(loc, (off_l, off_m, off_n));
    }

    #[test]
    fn oversized_filter_is_rejected() {
        let s = random_volume(4, 4, 2, 1);
        let h = random_volume(5, 2, 1, 2);
        assert!(matches!(correlate3(&s, &h), Err(Error::Dimension(_))));
    }

    #[test]
    fn temporal_difference_basics() {
        let v = VideoVolume::new(1, 2, 3, vec![1.0f64, 2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        let d = temporal_derivative(&v).unwrap();
        assert_eq!(d.dims(), (1, 2, 2));
        assert_eq!(d.data(), &[3.0, 6.0, 12.0, 24.0]);

        let constant = VideoVolume::new(2, 2, 3, vec![5.0f64; 12]).unwrap();
        let d = temporal_derivative(&constant).unwrap();
        assert!(d.data().iter().all(|&x| x == 0.0));

        let single = VideoVolume::new(2, 2, 1, vec![0.0f64; 4]).unwrap();
        assert!(matches!(
            temporal_derivative(&single),
            Err(Error::InsufficientFrames { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(
            VideoVolume::new(2, 2, 2, vec![0.0f64; 7]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            VideoVolume::<f64>::new(0, 2, 2, vec![]),
            Err(Error::Dimension(_))
        ));
        let mut data = vec![0.0f64; 8];
        data[3] = f64::NAN;
        assert!(matches!(
            VideoVolume::new(2, 2, 2, data),
            Err(Error::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn f32_round_trip_smoke() {
        let mut g = SplitMix64::new(4);
        let data: Vec<f32> = (0..60).map(|_| g.next_uniform() as f32).collect();
        let v = VideoVolume::new(3, 4, 5, data).unwrap();
        let back = idft3(&dft3(&v)).unwrap();
        for (a, b) in v.data().iter().zip(back.data()) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}
