//! Simulated compressive acquisition.
//!
//! A camera that never forms an image: each frame is flattened and hit with
//! a short, wide random matrix, so only K numbers per frame survive out of
//! D = P*Q pixels. Everything downstream works on those K-vectors. Three
//! facts carry the whole module:
//!
//! 1. The matrix is identified by (distribution, seed, K, D) alone. Entries
//!    are regenerated on demand from per-row generator streams, so a file
//!    that stores just the identity reproduces the matrix bit-for-bit.
//! 2. Inner products survive projection: <phi a, phi b> estimates <a, b>
//!    with an error that scales like 1/sqrt(K). [`jl_report`] measures this
//!    empirically instead of taking it on faith.
//! 3. <phi a, phi b> = <phi^T phi a, b>, so correlation against compressed
//!    data reduces to ordinary correlation against the backprojection
//!    phi^T Z. That identity is what the matching engine leans on.
//!
//! Frames are flattened column-major (the Q columns of a frame concatenated,
//! each of length P); every matrix-vector contract in the library uses this
//! order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::volume::VideoVolume;

/// Tag folded into the master seed to derive per-frame noise streams; keeps
/// noise draws disjoint from the per-row entry streams no matter how many
/// rows the matrix has. ASCII "noise".
const NOISE_TAG: u64 = 0x006E_6F69_7365;
/// Domain tag for trial vectors in [`jl_report`]. ASCII "jlvec".
const JL_TAG: u64 = 0x006A_6C76_6563;

/// Entry distribution for measurement matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// i.i.d. N(0, 1/K).
    Gaussian,
    /// i.i.d. +-1/sqrt(K) with equal probability.
    Bernoulli,
}

impl Distribution {
    pub fn code(self) -> u8 {
        match self {
            Distribution::Gaussian => 0,
            Distribution::Bernoulli => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Distribution::Gaussian),
            1 => Some(Distribution::Bernoulli),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Bernoulli => "bernoulli",
        }
    }
}

impl std::str::FromStr for Distribution {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "bernoulli" => Ok(Distribution::Bernoulli),
            other => Err(format!("unknown distribution '{other}'")),
        }
    }
}

/// The full identity of a measurement matrix. Two matrices with equal
/// identities have bitwise-equal entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixId {
    pub distribution: Distribution,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
}

/// K x D measurement matrix with materialized entries.
///
/// Entries are canonically f32-valued even when T = f64: each draw is
/// computed in f64 per the generator contract, scaled by 1/sqrt(K), then
/// rounded to f32 before widening. That makes seed-only regeneration agree
/// bit-for-bit with entries stored on disk (which are f32), and it keeps
/// the values immune to last-ulp differences between libm builds.
#[derive(Debug, Clone)]
pub struct MeasurementMatrix<T: Scalar> {
    id: MatrixId,
    entries: Vec<T>,
}

/// Measurements per frame for a compression ratio: K = max(1, round(D/cr)).
pub fn measurement_count(d: usize, compression_ratio: f64) -> usize {
    ((d as f64 / compression_ratio).round() as usize).max(1)
}

impl<T: Scalar> MeasurementMatrix<T> {
    /// Draws the matrix identified by (distribution, seed, K, D).
    pub fn generate(distribution: Distribution, seed: u64, k: usize, d: usize) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(Error::Dimension(format!(
                "matrix shape must be positive, got {k}x{d}"
            )));
        }
        if k > d {
            return Err(Error::Rank { k, d });
        }
        let inv_sqrt_k = 1.0 / (k as f64).sqrt();
        let mut entries = vec![T::zero(); k * d];
        entries
            .par_chunks_mut(d)
            .enumerate()
            .for_each(|(r, row)| {
                let mut g = SplitMix64::for_row(seed, r as u64);
                match distribution {
                    Distribution::Gaussian => {
                        for e in row.iter_mut() {
                            *e = T::of_f64((g.next_gaussian() * inv_sqrt_k) as f32 as f64);
                        }
                    }
                    Distribution::Bernoulli => {
                        for e in row.iter_mut() {
                            *e = T::of_f64((g.next_sign() * inv_sqrt_k) as f32 as f64);
                        }
                    }
                }
            });
        Ok(MeasurementMatrix {
            id: MatrixId {
                distribution,
                seed,
                rows: k,
                cols: d,
            },
            entries,
        })
    }

    /// Wraps explicit entries (typically read from a materialized file).
    /// The identity is taken at face value; callers that fabricate entries
    /// for an identity they did not draw get what they asked for.
    pub fn from_entries(id: MatrixId, entries: Vec<T>) -> Result<Self> {
        if id.rows == 0 || id.cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix shape must be positive, got {}x{}",
                id.rows, id.cols
            )));
        }
        if id.rows > id.cols {
            return Err(Error::Rank {
                k: id.rows,
                d: id.cols,
            });
        }
        if entries.len() != id.rows * id.cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                id.rows * id.cols,
                id.rows,
                id.cols,
                entries.len()
            )));
        }
        Ok(MeasurementMatrix { id, entries })
    }

    pub fn id(&self) -> MatrixId {
        self.id
    }

    pub fn rows(&self) -> usize {
        self.id.rows
    }

    pub fn cols(&self) -> usize {
        self.id.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.id.cols..(r + 1) * self.id.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// y = phi x.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.id.cols);
        (0..self.id.rows)
            .map(|r| {
                let acc: f64 = self
                    .row(r)
                    .iter()
                    .zip(x)
                    .map(|(&e, &v)| e.as_f64() * v.as_f64())
                    .sum();
                T::of_f64(acc)
            })
            .collect()
    }

    /// x = phi^T y.
    pub fn backproject_vector(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.id.rows);
        let mut acc = vec![0.0f64; self.id.cols];
        for (r, &yk) in y.iter().enumerate() {
            let yk = yk.as_f64();
            if yk == 0.0 {
                continue;
            }
            for (a, &e) in acc.iter_mut().zip(self.row(r)) {
                *a += yk * e.as_f64();
            }
        }
        acc.into_iter().map(T::of_f64).collect()
    }
}

/// Per-frame measurements of a video, one K-vector per column.
#[derive(Debug, Clone)]
pub struct CompressedVideo<T: Scalar> {
    matrix_id: MatrixId,
    frame_rows: usize,
    frame_cols: usize,
    /// Column t occupies data[t*K .. (t+1)*K].
    data: Vec<T>,
    columns: usize,
    noise_sigma: f64,
    derivative_order: u8,
}

impl<T: Scalar> CompressedVideo<T> {
    pub fn from_parts(
        matrix_id: MatrixId,
        frame_rows: usize,
        frame_cols: usize,
        columns: usize,
        data: Vec<T>,
        noise_sigma: f64,
        derivative_order: u8,
    ) -> Result<Self> {
        if data.len() != matrix_id.rows * columns {
            return Err(Error::Dimension(format!(
                "expected {} measurements for {} columns of K={}, got {}",
                matrix_id.rows * columns,
                columns,
                matrix_id.rows,
                data.len()
            )));
        }
        if frame_rows * frame_cols != matrix_id.cols {
            return Err(Error::Dimension(format!(
                "frame {}x{} does not flatten to matrix width D={}",
                frame_rows, frame_cols, matrix_id.cols
            )));
        }
        Ok(CompressedVideo {
            matrix_id,
            frame_rows,
            frame_cols,
            data,
            columns,
            noise_sigma,
            derivative_order,
        })
    }

    pub fn matrix_id(&self) -> MatrixId {
        self.matrix_id
    }

    pub fn k(&self) -> usize {
        self.matrix_id.rows
    }

    /// (P, Q) of the frames that were compressed.
    pub fn frame_dims(&self) -> (usize, usize) {
        (self.frame_rows, self.frame_cols)
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn column(&self, t: usize) -> &[T] {
        let k = self.matrix_id.rows;
        &self.data[t * k..(t + 1) * k]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn derivative_order(&self) -> u8 {
        self.derivative_order
    }
}

/// Flattens one frame column-major: the Q columns concatenated, each of
/// length P, so flat index = col*P + row.
fn flatten_frame<T: Scalar>(frame: &[T], rows: usize, cols: usize, out: &mut [T]) {
    for c in 0..cols {
        for r in 0..rows {
            out[c * rows + r] = frame[r * cols + c];
        }
    }
}

fn unflatten_frame<T: Scalar>(flat: &[T], rows: usize, cols: usize, out: &mut [T]) {
    for c in 0..cols {
        for r in 0..rows {
            out[r * cols + c] = flat[c * rows + r];
        }
    }
}

/// Projects every frame of `video` through `matrix`, adding i.i.d. Gaussian
/// measurement noise of standard deviation `noise_sigma` (zero sigma means
/// the exact projection). Noise for frame t comes from its own generator
/// stream, so frames can be processed in parallel without reordering draws.
pub fn compress<T: Scalar>(
    video: &VideoVolume<T>,
    matrix: &MeasurementMatrix<T>,
    noise_sigma: f64,
) -> Result<CompressedVideo<T>> {
    let (p, q, r) = video.dims();
    if p * q != matrix.cols() {
        return Err(Error::Dimension(format!(
            "video frames are {p}x{q} = {} pixels but the matrix expects D = {}",
            p * q,
            matrix.cols()
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::Dimension(format!(
            "noise sigma must be finite and non-negative, got {noise_sigma}"
        )));
    }
    let k = matrix.rows();
    let seed = matrix.id().seed;
    let mut data = vec![T::zero(); k * r];
    data.par_chunks_mut(k).enumerate().for_each(|(t, column)| {
        let mut flat = vec![T::zero(); p * q];
        flatten_frame(video.frame(t), p, q, &mut flat);
        let projected = matrix.project(&flat);
        column.copy_from_slice(&projected);
        if noise_sigma > 0.0 {
            let mut g = SplitMix64::for_stream(seed, NOISE_TAG, t as u64);
            for m in column.iter_mut() {
                *m = *m + T::of_f64(noise_sigma * g.next_gaussian());
            }
        }
    });
    CompressedVideo::from_parts(matrix.id(), p, q, r, data, noise_sigma, 0)
}

/// Differences consecutive measurement columns. Because projection is
/// linear, this commutes with differencing the frames before projection
/// (exactly so when sigma = 0).
pub fn compressed_temporal_derivative<T: Scalar>(
    z: &CompressedVideo<T>,
) -> Result<CompressedVideo<T>> {
    if z.derivative_order != 0 {
        return Err(Error::DerivativeOrder {
            expected: 0,
            got: z.derivative_order,
        });
    }
    if z.columns < 2 {
        return Err(Error::InsufficientFrames {
            needed: 2,
            got: z.columns,
        });
    }
    let k = z.k();
    let mut data = Vec::with_capacity(k * (z.columns - 1));
    for t in 0..z.columns - 1 {
        let cur = z.column(t);
        let next = z.column(t + 1);
        data.extend(cur.iter().zip(next).map(|(&a, &b)| b - a));
    }
    CompressedVideo::from_parts(
        z.matrix_id,
        z.frame_rows,
        z.frame_cols,
        z.columns - 1,
        data,
        z.noise_sigma,
        1,
    )
}

/// Lifts measurements back to pixel space: frame t of the result is
/// phi^T Z(t), unflattened. Not a reconstruction -- phi^T phi is far from
/// the identity at useful compression ratios -- but inner products against
/// it equal inner products of phi-projected pairs, which is all the
/// correlation engine needs.
pub fn backproject<T: Scalar>(
    z: &CompressedVideo<T>,
    matrix: &MeasurementMatrix<T>,
) -> Result<VideoVolume<T>> {
    if z.matrix_id != matrix.id() {
        return Err(Error::Dimension(format!(
            "measurements were taken with {:?} seed {} ({}x{}), not with {:?} seed {} ({}x{})",
            z.matrix_id.distribution,
            z.matrix_id.seed,
            z.matrix_id.rows,
            z.matrix_id.cols,
            matrix.id().distribution,
            matrix.id().seed,
            matrix.rows(),
            matrix.cols(),
        )));
    }
    let (p, q) = z.frame_dims();
    let r = z.columns;
    let mut data = vec![T::zero(); p * q * r];
    data.par_chunks_mut(p * q)
        .enumerate()
        .for_each(|(t, frame)| {
            let lifted = matrix.backproject_vector(z.column(t));
            unflatten_frame(&lifted, p, q, frame);
        });
    Ok(VideoVolume::from_computed(p, q, r, data))
}

// ---- Projection quality ----

/// How trial vector pairs are related in [`jl_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// b is orthogonalized against a; the surviving error is pure
    /// projection distortion.
    Orthogonal,
    /// b = a; the error is |norm(phi a)^2 - 1|.
    Identical,
    /// Independent unit vectors as drawn.
    Raw,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::Orthogonal => "orthogonal",
            PairKind::Identical => "identical",
            PairKind::Raw => "raw",
        }
    }
}

/// Empirical inner-product distortion of a measurement matrix.
#[derive(Debug, Clone)]
pub struct JlReport {
    pub k: usize,
    pub d: usize,
    pub trials: usize,
    pub pair_kind: PairKind,
    /// |<phi a, phi b> - <a, b>| per trial.
    pub errors: Vec<f64>,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
    /// The theoretical scale the errors should track.
    pub predicted_scale: f64,
}

fn unit_gaussian_vector(d: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut g = SplitMix64::for_stream(seed, JL_TAG, stream);
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| g.next_gaussian()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

/// Draws `trials` unit-norm pairs, projects them through the matrix
/// identified by `(distribution, matrix_seed, k, d)`, and records how far
/// each projected inner product lands from the true one.
pub fn jl_report(
    distribution: Distribution,
    matrix_seed: u64,
    k: usize,
    d: usize,
    trials: usize,
    vector_seed: u64,
    pair_kind: PairKind,
) -> Result<JlReport> {
    if trials == 0 {
        return Err(Error::EmptyInput("projection trials"));
    }
    let matrix: MeasurementMatrix<f64> =
        MeasurementMatrix::generate(distribution, matrix_seed, k, d)?;
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let a = unit_gaussian_vector(d, vector_seed, 2 * trial as u64);
            let b = match pair_kind {
                PairKind::Identical => a.clone(),
                PairKind::Raw => unit_gaussian_vector(d, vector_seed, 2 * trial as u64 + 1),
                PairKind::Orthogonal => {
                    let mut b = unit_gaussian_vector(d, vector_seed, 2 * trial as u64 + 1);
                    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
                    for (y, x) in b.iter_mut().zip(&a) {
                        *y -= dot * x;
                    }
                    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                    for y in &mut b {
                        *y /= norm;
                    }
                    b
                }
            };
            let true_dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            let pa = matrix.project(&a);
            let pb = matrix.project(&b);
            let proj_dot: f64 = pa.iter().zip(&pb).map(|(x, y)| x * y).sum();
            (proj_dot - true_dot).abs()
        })
        .collect();
    let mean_abs_error = errors.iter().sum::<f64>() / trials as f64;
    let max_abs_error = errors.iter().cloned().fold(0.0, f64::max);
    Ok(JlReport {
        k,
        d,
        trials,
        pair_kind,
        errors,
        mean_abs_error,
        max_abs_error,
        predicted_scale: 1.0 / (k as f64).sqrt(),
    })
}
