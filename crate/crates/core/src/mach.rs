//! Action filter synthesis.
//!
//! A filter is built in the frequency domain from a set of training clips
//! of one action. Each clip is temporally differenced (so the filter keys
//! on motion, not appearance) and transformed; the per-bin statistics over
//! the training set are
//!
//! * the mean spectrum, which the filter should match,
//! * the average power spectrum, whose suppression whitens the response,
//! * the average spread around the mean, whose suppression rewards bins
//!   that agree across examples.
//!
//! The filter spectrum is mean / (alpha + beta*power + gamma*spread); the
//! three knobs trade off noise tolerance, peak sharpness, and robustness to
//! intra-class variation. Back in the sample domain that spectrum becomes a
//! small space-time template suitable for [`crate::volume::correlate3`].
//!
//! Synthesis itself is kept raw: the degenerate setting (alpha=1, beta=
//! gamma=0, one example) returns exactly that example's temporal
//! derivative, and scaling every example by a constant scales the filter by
//! the same constant. Pipelines that want magnitude-comparable responses
//! across a bank call [`MachFilter::normalize`] as a separate step.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::view::{warp_volume, AffineView};
use crate::volume::{dft3, idft3, temporal_derivative, Spectrum3, VideoVolume};

/// How a filter relates to the canonical camera view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViewTag {
    /// Synthesized directly from examples in one view.
    Type1,
    /// Built from (or mirrored into) a normalized common view.
    Type2,
    /// Resampled for the given affine view.
    Compensated(AffineView),
}

impl ViewTag {
    pub fn code(&self) -> u8 {
        match self {
            ViewTag::Type1 => 0,
            ViewTag::Type2 => 1,
            ViewTag::Compensated(_) => 2,
        }
    }
}

/// Per-bin training statistics shared by every filter synthesized from the
/// same example set.
#[derive(Debug, Clone)]
pub struct SpectraStats<T: Scalar> {
    dims: (usize, usize, usize),
    example_count: usize,
    /// Mean spectrum of the differenced examples.
    mean: Vec<Complex<f64>>,
    /// Mean squared magnitude per bin.
    power: Vec<f64>,
    /// Mean squared deviation from the mean spectrum per bin.
    spread: Vec<f64>,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> SpectraStats<T> {
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn example_count(&self) -> usize {
        self.example_count
    }

    pub fn mean(&self) -> &[Complex<f64>] {
        &self.mean
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn spread(&self) -> &[f64] {
        &self.spread
    }
}

/// Accumulates the synthesis statistics over training examples. Every
/// example must share one shape and carry at least two frames; the stats
/// live on the differenced shape (one frame fewer).
pub fn spectra_stats<T: Scalar>(examples: &[VideoVolume<T>]) -> Result<SpectraStats<T>> {
    let first = examples.first().ok_or(Error::EmptyInput("training examples"))?;
    let dims = first.dims();
    for (i, e) in examples.iter().enumerate() {
        if e.dims() != dims {
            return Err(Error::Dimension(format!(
                "example {i} is {:?}, expected {:?}",
                e.dims(),
                dims
            )));
        }
    }
    let n = examples.len() as f64;
    let mut mean: Vec<Complex<f64>> = Vec::new();
    let mut power: Vec<f64> = Vec::new();
    let mut spectra: Vec<Vec<Complex<f64>>> = Vec::with_capacity(examples.len());
    for e in examples {
        let spectrum = dft3(&temporal_derivative(e)?);
        let bins: Vec<Complex<f64>> = spectrum
            .bins()
            .iter()
            .map(|b| Complex::new(b.re.as_f64(), b.im.as_f64()))
            .collect();
        if mean.is_empty() {
            mean = vec![Complex::new(0.0, 0.0); bins.len()];
            power = vec![0.0; bins.len()];
        }
        for ((m, p), &b) in mean.iter_mut().zip(power.iter_mut()).zip(&bins) {
            *m += b;
            *p += b.norm_sqr();
        }
        spectra.push(bins);
    }
    for m in &mut mean {
        *m /= n;
    }
    for p in &mut power {
        *p /= n;
    }
    let mut spread = vec![0.0; mean.len()];
    for bins in &spectra {
        for (s, (&b, &m)) in spread.iter_mut().zip(bins.iter().zip(&mean)) {
            *s += (b - m).norm_sqr();
        }
    }
    for s in &mut spread {
        *s /= n;
    }
    Ok(SpectraStats {
        dims: (dims.0, dims.1, dims.2 - 1),
        example_count: examples.len(),
        mean,
        power,
        spread,
        _marker: std::marker::PhantomData,
    })
}

/// Space-time correlation template for one action.
#[derive(Debug, Clone)]
pub struct MachFilter<T: Scalar> {
    volume: VideoVolume<T>,
    alpha: f64,
    beta: f64,
    gamma: f64,
    noise_constant: f64,
    label: String,
    view_tag: ViewTag,
}

impl<T: Scalar> MachFilter<T> {
    pub fn from_parts(
        volume: VideoVolume<T>,
        alpha: f64,
        beta: f64,
        gamma: f64,
        label: String,
        view_tag: ViewTag,
    ) -> Self {
        MachFilter {
            volume,
            alpha,
            beta,
            gamma,
            noise_constant: 1.0,
            label,
            view_tag,
        }
    }

    pub fn volume(&self) -> &VideoVolume<T> {
        &self.volume
    }

    /// (L, M, N): rows, columns, frames of the template.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.volume.dims()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The sensor noise spectrum the alpha term weighs, taken flat. Every
    /// builder in this crate uses 1; the value rides along so a filter
    /// record is complete.
    pub fn noise_constant(&self) -> f64 {
        self.noise_constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn view_tag(&self) -> ViewTag {
        self.view_tag
    }

    /// Subtracts the sample mean and rescales to unit energy, making peak
    /// heights and sidelobe statistics comparable across a bank. Fails on a
    /// filter with nothing left after mean removal.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.volume.data().len() as f64;
        let mean = self.volume.data().iter().map(|v| v.as_f64()).sum::<f64>() / n;
        let m = T::of_f64(mean);
        for v in self.volume.data_mut() {
            *v = *v - m;
        }
        let norm = self.volume.l2_norm();
        if norm < 1e-300 {
            return Err(Error::ZeroEnergy {
                what: "filter volume",
            });
        }
        let inv = T::of_f64(1.0 / norm);
        self.volume.scale(inv);
        Ok(())
    }
}

/// Builds the filter for the given trade-off parameters from precomputed
/// statistics. The denominator alpha + beta*power(u) + gamma*spread(u) must
/// be nonzero at every bin; parameters must be finite with at least one
/// positive.
pub fn synthesize<T: Scalar>(
    stats: &SpectraStats<T>,
    alpha: f64,
    beta: f64,
    gamma: f64,
    label: &str,
) -> Result<MachFilter<T>> {
    if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::Dimension(
            "filter parameters must be finite".to_string(),
        ));
    }
    if alpha <= 0.0 && beta <= 0.0 && gamma <= 0.0 {
        return Err(Error::Dimension(
            "at least one of alpha, beta, gamma must be positive".to_string(),
        ));
    }
    let (l, m, n) = stats.dims;
    let mut bins = Vec::with_capacity(stats.mean.len());
    for (i, ((&mean, &power), &spread)) in stats
        .mean
        .iter()
        .zip(&stats.power)
        .zip(&stats.spread)
        .enumerate()
    {
        let denom = alpha + beta * power + gamma * spread;
        if denom == 0.0 || !denom.is_finite() {
            let u3 = i / (l * m);
            let rem = i % (l * m);
            return Err(Error::SingularDenominator {
                u1: rem / m,
                u2: rem % m,
                u3,
            });
        }
        let h = mean / denom;
        bins.push(Complex::new(T::of_f64(h.re), T::of_f64(h.im)));
    }
    let spectrum = Spectrum3::from_bins(l, m, n, bins)?;
    let volume = idft3(&spectrum)?;
    Ok(MachFilter {
        volume,
        alpha,
        beta,
        gamma,
        noise_constant: 1.0,
        label: label.to_string(),
        view_tag: ViewTag::Type1,
    })
}

/// Synthesizes one filter from examples recorded in assorted views: each
/// example is first geometrically warped into the canonical view through
/// its paired transform, then the warped set goes through the usual
/// synthesis. Tagged type-2.
pub fn build_type2_bank<T: Scalar>(
    examples_by_view: &[(VideoVolume<T>, AffineView)],
    alpha: f64,
    beta: f64,
    gamma: f64,
    label: &str,
) -> Result<MachFilter<T>> {
    if examples_by_view.is_empty() {
        return Err(Error::EmptyInput("view-paired training examples"));
    }
    let mut canonical = Vec::with_capacity(examples_by_view.len());
    for (example, view) in examples_by_view {
        canonical.push(warp_volume(example, view)?);
    }
    let stats = spectra_stats(&canonical)?;
    let mut filter = synthesize(&stats, alpha, beta, gamma, label)?;
    filter.view_tag = ViewTag::Type2;
    Ok(filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::volume::correlate3;

    fn random_volume(p: usize, q: usize, r: usize, seed: u64) -> VideoVolume<f64> {
        let mut g = SplitMix64::new(seed);
        let data = (0..p * q * r).map(|_| g.next_uniform()).collect();
        VideoVolume::new(p, q, r, data).unwrap()
    }

    #[test]
    fn degenerate_setting_reproduces_the_derivative() {
        let example = random_volume(6, 5, 4, 1);
        let stats = spectra_stats(std::slice::from_ref(&example)).unwrap();
        let filter = synthesize(&stats, 1.0, 0.0, 0.0, "solo").unwrap();
        let derivative = temporal_derivative(&example).unwrap();
        assert_eq!(filter.dims(), derivative.dims());
        let scale = derivative
            .data()
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        for (x, y) in filter.volume().data().iter().zip(derivative.data()) {
            assert!((x - y).abs() / scale < 1e-9);
        }
        // Matched template on its own source: the single valid placement is
        // the origin and carries the full derivative energy.
        let response = correlate3(&derivative, filter.volume()).unwrap();
        assert_eq!(response.dims(), (1, 1, 1));
        let (peak, loc) = response.peak();
        assert_eq!(loc, (0, 0, 0));
        assert!((peak - derivative.energy()).abs() / derivative.energy() < 1e-9);
    }

    #[test]
    fn matched_only_filter_scales_with_the_examples() {
        let examples: Vec<_> = (0..3).map(|i| random_volume(5, 5, 3, 10 + i)).collect();
        let lambda = 3.5f64;
        let scaled: Vec<_> = examples
            .iter()
            .map(|e| {
                let data = e.data().iter().map(|&v| v * lambda).collect();
                VideoVolume::new(5, 5, 3, data).unwrap()
            })
            .collect();
        let base = synthesize(&spectra_stats(&examples).unwrap(), 2.0, 0.0, 0.0, "a").unwrap();
        let boosted = synthesize(&spectra_stats(&scaled).unwrap(), 2.0, 0.0, 0.0, "a").unwrap();
        let scale = base.volume().data().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (x, y) in boosted.volume().data().iter().zip(base.volume().data()) {
            assert!((x - y * lambda).abs() / (scale * lambda) < 1e-12);
        }
    }

    #[test]
    fn zero_denominator_names_the_bin() {
        // A static example has an all-zero derivative, hence zero power
        // everywhere; with alpha = 0 the denominator vanishes at bin 0.
        let example = VideoVolume::new(3, 3, 3, vec![1.0f64; 27]).unwrap();
        let stats = spectra_stats(std::slice::from_ref(&example)).unwrap();
        match synthesize(&stats, 0.0, 1.0, 0.0, "flat") {
            Err(Error::SingularDenominator { u1: 0, u2: 0, u3: 0 }) => {}
            other => panic!("expected singular denominator at the first bin, got {other:?}"),
        }
    }

    #[test]
    fn input_guards() {
        let empty: Vec<VideoVolume<f64>> = Vec::new();
        assert!(matches!(
            spectra_stats(&empty),
            Err(Error::EmptyInput(_))
        ));

        let a = random_volume(4, 4, 3, 2);
        let b = random_volume(4, 5, 3, 3);
        assert!(matches!(
            spectra_stats(&[a.clone(), b]),
            Err(Error::Dimension(_))
        ));

        let short = random_volume(4, 4, 1, 4);
        assert!(matches!(
            spectra_stats(std::slice::from_ref(&short)),
            Err(Error::InsufficientFrames { .. })
        ));

        let stats = spectra_stats(std::slice::from_ref(&a)).unwrap();
        assert!(synthesize(&stats, 0.0, 0.0, 0.0, "x").is_err());
        assert!(synthesize(&stats, f64::NAN, 0.0, 0.0, "x").is_err());
    }

    #[test]
    fn stats_shapes_and_positivity() {
        let examples: Vec<_> = (0..4).map(|i| random_volume(5, 6, 4, 20 + i)).collect();
        let stats = spectra_stats(&examples).unwrap();
        assert_eq!(stats.dims(), (5, 6, 3));
        assert_eq!(stats.example_count(), 4);
        assert!(stats.power().iter().all(|&p| p >= 0.0));
        assert!(stats.spread().iter().all(|&s| s >= -1e-12));
        // Power dominates spread plus mean-squared per bin (variance split).
        for ((&p, &s), &m) in stats
            .power()
            .iter()
            .zip(stats.spread())
            .zip(stats.mean())
        {
            assert!((p - (s + m.norm_sqr())).abs() < 1e-6 * p.max(1.0));
        }
    }

    #[test]
    fn normalize_centers_and_unit_scales() {
        let examples: Vec<_> = (0..2).map(|i| random_volume(6, 6, 4, 30 + i)).collect();
        let mut filter =
            synthesize(&spectra_stats(&examples).unwrap(), 1.0, 1.0, 1.0, "n").unwrap();
        filter.normalize().unwrap();
        let mean: f64 = filter.volume().data().iter().sum::<f64>()
            / filter.volume().data().len() as f64;
        assert!(mean.abs() < 1e-12);
        assert!((filter.volume().l2_norm() - 1.0).abs() < 1e-12);

        let mut flat = MachFilter::from_parts(
            VideoVolume::new(2, 2, 2, vec![4.0f64; 8]).unwrap(),
            1.0,
            0.0,
            0.0,
            "flat".to_string(),
            ViewTag::Type1,
        );
        assert!(matches!(
            flat.normalize(),
            Err(Error::ZeroEnergy { .. })
        ));
    }

    #[test]
    fn type2_bank_with_identity_views_matches_plain_synthesis() {
        let examples: Vec<_> = (0..3).map(|i| random_volume(6, 6, 4, 40 + i)).collect();
        let paired: Vec<_> = examples
            .iter()
            .map(|e| (e.clone(), AffineView::identity()))
            .collect();
        let bank = build_type2_bank(&paired, 1.0, 1.0, 1.0, "act").unwrap();
        let plain = synthesize(&spectra_stats(&examples).unwrap(), 1.0, 1.0, 1.0, "act").unwrap();
        assert_eq!(bank.view_tag(), ViewTag::Type2);
        let scale = plain.volume().data().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (x, y) in bank.volume().data().iter().zip(plain.volume().data()) {
            assert!((x - y).abs() / scale < 1e-12);
        }

        let none: Vec<(VideoVolume<f64>, AffineView)> = Vec::new();
        assert!(matches!(
            build_type2_bank(&none, 1.0, 1.0, 1.0, "a"),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn flipped_pair_equals_training_on_the_unflipped_pair() {
        // An example and its mirror, with the mirror transform supplied,
        // must synthesize the same filter as two copies of the original.
        let e = random_volume(5, 7, 4, 50);
        let cols = e.cols();
        let mut mirrored_data = Vec::with_capacity(e.data().len());
        for t in 0..e.frames() {
            let f = e.frame(t);
            for r in 0..e.rows() {
                let row = &f[r * cols..(r + 1) * cols];
                mirrored_data.extend(row.iter().rev().copied());
            }
        }
        let mirrored = VideoVolume::new(5, 7, 4, mirrored_data).unwrap();
        let paired = vec![
            (e.clone(), AffineView::identity()),
            (mirrored, AffineView::horizontal_flip(cols)),
        ];
        let bank = build_type2_bank(&paired, 1.0, 1.0, 1.0, "m").unwrap();
        let twice = vec![e.clone(), e];
        let plain = synthesize(&spectra_stats(&twice).unwrap(), 1.0, 1.0, 1.0, "m").unwrap();
        let scale = plain.volume().data().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (x, y) in bank.volume().data().iter().zip(plain.volume().data()) {
            assert!((x - y).abs() / scale < 1e-6);
        }
    }
}
