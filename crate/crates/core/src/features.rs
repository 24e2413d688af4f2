//! Fixed-length descriptors of response volumes.
//!
//! A classifier cannot eat a whole response volume whose shape depends on
//! the video, so each response is condensed to 146 numbers:
//!
//! * 73 coarse-to-fine maxima: the volume is cut into 1, then 8, then 64
//!   axis-aligned cells (boundaries at floor(i*dim/2^level)), and each cell
//!   contributes its maximum. Ordering is level-major, cells within a level
//!   in sample order (frame block slowest, then row block, then column
//!   block), so slot 0 is always the global peak.
//! * 73 peak-to-sidelobe ratios, one per pooled peak: how far the peak
//!   stands above the ring of responses around it, measured in sidelobe
//!   standard deviations. The sidelobe is an 11x11x11 cube centered on the
//!   peak minus the central 5x5x5 cube (both clipped at the borders), so
//!   the immediate shoulder of the peak never counts against it.
//!
//! Level-2 cells need at least 4 samples per axis; smaller responses are
//! rejected rather than silently padded.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::volume::ResponseVolume;

/// Pooled values and PSRs per response, concatenated bank-order.
pub const FEATURES_PER_RESPONSE: usize = 146;
/// Cell maxima per response: 1 + 8 + 64.
pub const POOLED_PER_RESPONSE: usize = 73;

const PSR_OUTER_HALF: isize = 5;
const PSR_INNER_HALF: isize = 2;
const PSR_SIGMA_FLOOR: f64 = 1e-12;

/// Per-response block layout: `values[block * 146 .. block * 146 + 73]` are
/// the pooled maxima, the rest of the block the PSRs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T: Scalar> {
    values: Vec<T>,
    blocks: usize,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block(&self, i: usize) -> &[T] {
        &self.values[i * FEATURES_PER_RESPONSE..(i + 1) * FEATURES_PER_RESPONSE]
    }

    pub fn pooled_block(&self, i: usize) -> &[T] {
        &self.block(i)[..POOLED_PER_RESPONSE]
    }

    pub fn psr_block(&self, i: usize) -> &[T] {
        &self.block(i)[POOLED_PER_RESPONSE..]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.as_f64()).collect()
    }

    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(FEATURES_PER_RESPONSE) {
            return Err(Error::Dimension(format!(
                "feature length {} is not a positive multiple of {FEATURES_PER_RESPONSE}",
                values.len()
            )));
        }
        let blocks = values.len() / FEATURES_PER_RESPONSE;
        Ok(FeatureVector { values, blocks })
    }
}

fn cell_bounds(dim: usize, cells: usize, i: usize) -> (usize, usize) {
    (i * dim / cells, (i + 1) * dim / cells)
}

/// Global (row, column, frame) coordinates of one pooled maximum.
pub type PeakSite = (usize, usize, usize);

/// The 73 cell maxima of a response plus where each maximum sits (global
/// coordinates, ties resolved to the first position in sample order).
pub fn max_pool_features<T: Scalar>(
    response: &ResponseVolume<T>,
) -> Result<(Vec<T>, Vec<PeakSite>)> {
    let (dr, dc, df) = response.dims();
    if dr < 4 || dc < 4 || df < 4 {
        return Err(Error::PoolingResolution {
            min: 4,
            d0: dr,
            d1: dc,
            d2: df,
        });
    }
    let mut values = Vec::with_capacity(POOLED_PER_RESPONSE);
    let mut peaks = Vec::with_capacity(POOLED_PER_RESPONSE);
    for level in 0..3usize {
        let cells = 1usize << level;
        for cn in 0..cells {
            let (n0, n1) = cell_bounds(df, cells, cn);
            for cl in 0..cells {
                let (l0, l1) = cell_bounds(dr, cells, cl);
                for cm in 0..cells {
                    let (m0, m1) = cell_bounds(dc, cells, cm);
                    let mut best = response.at(l0, m0, n0);
                    let mut best_at = (l0, m0, n0);
                    for n in n0..n1 {
                        for l in l0..l1 {
                            for m in m0..m1 {
                                let v = response.at(l, m, n);
                                if v > best {
                                    best = v;
                                    best_at = (l, m, n);
                                }
                            }
                        }
                    }
                    values.push(best);
                    peaks.push(best_at);
                }
            }
        }
    }
    Ok((values, peaks))
}

/// Peak-to-sidelobe ratio at each pooled peak. A sidelobe with standard
/// deviation below [`PSR_SIGMA_FLOOR`] (flat response) scores 0; a sidelobe
/// clipped out of existence scores 0 and sets the degenerate flag.
pub fn psr_features<T: Scalar>(
    response: &ResponseVolume<T>,
    peaks: &[(usize, usize, usize)],
) -> (Vec<T>, Vec<bool>) {
    let (dr, dc, df) = response.dims();
    let clip = |center: usize, half: isize, dim: usize| -> (usize, usize) {
        let lo = (center as isize - half).max(0) as usize;
        let hi = ((center as isize + half + 1).min(dim as isize)) as usize;
        (lo, hi)
    };
    let mut values = Vec::with_capacity(peaks.len());
    let mut degenerate = Vec::with_capacity(peaks.len());
    for &(pl, pm, pn) in peaks {
        let (ol0, ol1) = clip(pl, PSR_OUTER_HALF, dr);
        let (om0, om1) = clip(pm, PSR_OUTER_HALF, dc);
        let (on0, on1) = clip(pn, PSR_OUTER_HALF, df);
        let (il0, il1) = clip(pl, PSR_INNER_HALF, dr);
        let (im0, im1) = clip(pm, PSR_INNER_HALF, dc);
        let (in0, in1) = clip(pn, PSR_INNER_HALF, df);

        let mut count = 0usize;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for n in on0..on1 {
            let inside_n = n >= in0 && n < in1;
            for l in ol0..ol1 {
                let inside_l = l >= il0 && l < il1;
                for m in om0..om1 {
                    if inside_n && inside_l && m >= im0 && m < im1 {
                        continue;
                    }
                    let v = response.at(l, m, n).as_f64();
                    count += 1;
                    sum += v;
                    sum_sq += v * v;
                }
            }
        }
        if count == 0 {
            values.push(T::zero());
            degenerate.push(true);
            continue;
        }
        let mean = sum / count as f64;
        let var = (sum_sq / count as f64 - mean * mean).max(0.0);
        let sigma = var.sqrt();
        if sigma < PSR_SIGMA_FLOOR {
            values.push(T::zero());
        } else {
            let peak = response.at(pl, pm, pn).as_f64();
            values.push(T::of_f64((peak - mean) / sigma));
        }
        degenerate.push(false);
    }
    (values, degenerate)
}

/// Concatenates [pooled | PSR] blocks over a bank's responses, in the order
/// given.
pub fn feature_vector<T: Scalar>(responses: &[ResponseVolume<T>]) -> Result<FeatureVector<T>> {
    if responses.is_empty() {
        return Err(Error::EmptyInput("responses"));
    }
    let mut values = Vec::with_capacity(responses.len() * FEATURES_PER_RESPONSE);
    for r in responses {
        let (pooled, peaks) = max_pool_features(r)?;
        let (psr, _) = psr_features(r, &peaks);
        values.extend(pooled);
        values.extend(psr);
    }
    Ok(FeatureVector {
        values,
        blocks: responses.len(),
    })
}
