//! Randomized invariants over the numeric kernels: correlation against the
//! defining triple sum, exactness of trivial geometry, pooling recounts,
//! box budgets, and linearity of measurement differencing.

use proptest::prelude::*;
use smash_core::features::max_pool_features;
use smash_core::localize::{locate_video, BoxMode};
use smash_core::mach::{MachFilter, ViewTag};
use smash_core::sensing::{compress, compressed_temporal_derivative, Distribution, MeasurementMatrix};
use smash_core::view::{flip_horizontal, warp_volume, AffineView};
use smash_core::volume::{correlate3, Provenance, ResponseVolume, VideoVolume};

struct TestRng(u64);

impl TestRng {
    fn new(seed: u64) -> Self {
        TestRng(seed | 1)
    }

    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        let bits = self.0.wrapping_mul(0x2545_F491_4F6C_DD1D);
        (bits >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

fn random_volume(rows: usize, cols: usize, frames: usize, seed: u64) -> VideoVolume<f64> {
    let mut g = TestRng::new(seed);
    let data = (0..rows * cols * frames).map(|_| g.next_f64()).collect();
    VideoVolume::new(rows, cols, frames, data).unwrap()
}

/// Video dims, filter dims no larger along any axis, and a data seed.
fn vol_with_filter(
) -> impl Strategy<Value = ((usize, usize, usize), (usize, usize, usize), u64)> {
    (1usize..=7, 1usize..=7, 1usize..=6, any::<u64>()).prop_flat_map(|(p, q, r, seed)| {
        (Just((p, q, r)), (1..=p, 1..=q, 1..=r), Just(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correlation_equals_the_defining_triple_sum(
        ((p, q, r), (fl, fm, fr), seed) in vol_with_filter(),
    ) {
        let video = random_volume(p, q, r, seed);
        let filter = random_volume(fl, fm, fr, seed ^ 0xABCD_EF01);
        let got = correlate3(&video, &filter).unwrap();
        prop_assert_eq!(got.dims(), (p - fl + 1, q - fm + 1, r - fr + 1));
        for l in 0..p - fl + 1 {
            for m in 0..q - fm + 1 {
                for n in 0..r - fr + 1 {
                    let mut want = 0.0;
                    for x in 0..fl {
                        for y in 0..fm {
                            for t in 0..fr {
                                want += video.at(l + x, m + y, n + t) * filter.at(x, y, t);
                            }
                        }
                    }
                    let diff = (got.at(l, m, n) - want).abs();
                    prop_assert!(
                        diff <= 1e-9 * (1.0 + want.abs()),
                        "offset ({}, {}, {}): got {}, want {}",
                        l, m, n, got.at(l, m, n), want
                    );
                }
            }
        }
    }

    #[test]
    fn horizontal_flip_is_an_involution(
        dims in (1usize..=6, 1usize..=6, 1usize..=5),
        seed in any::<u64>(),
    ) {
        let filter = MachFilter::from_parts(
            random_volume(dims.0, dims.1, dims.2, seed),
            0.7,
            0.2,
            0.1,
            "walk".to_string(),
            ViewTag::Type1,
        );
        let back = flip_horizontal(&flip_horizontal(&filter));
        for (a, b) in back.volume().data().iter().zip(filter.volume().data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back.label(), filter.label());
        prop_assert_eq!(back.alpha(), filter.alpha());
        prop_assert_eq!(back.beta(), filter.beta());
        prop_assert_eq!(back.gamma(), filter.gamma());
    }

    #[test]
    fn identity_warp_changes_nothing(
        dims in (1usize..=8, 1usize..=8, 1usize..=4),
        seed in any::<u64>(),
    ) {
        let video = random_volume(dims.0, dims.1, dims.2, seed);
        let warped = warp_volume(&video, &AffineView::identity()).unwrap();
        for (a, b) in warped.data().iter().zip(video.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn pooled_maxima_match_per_cell_recounts(
        dims in (4usize..=9, 4usize..=9, 4usize..=9),
        seed in any::<u64>(),
    ) {
        let (rows, cols, frames) = dims;
        let response = ResponseVolume::new(
            rows,
            cols,
            frames,
            random_volume(rows, cols, frames, seed).data().to_vec(),
            Provenance::Oracle,
        )
        .unwrap();
        let (values, coords) = max_pool_features(&response).unwrap();

        // Recount: per pyramid level, split each axis into 2^level cells at
        // floor(i * dim / cells) and take the strict-first maximum of each
        // cell, scanning frames, then rows, then columns.
        let bound = |dim: usize, cells: usize, i: usize| i * dim / cells;
        let mut want = Vec::new();
        for level in 0..3 {
            let cells = 1usize << level;
            for cn in 0..cells {
                for cl in 0..cells {
                    for cm in 0..cells {
                        let mut best = f64::NEG_INFINITY;
                        let mut at = (0, 0, 0);
                        for n in bound(frames, cells, cn)..bound(frames, cells, cn + 1) {
                            for l in bound(rows, cells, cl)..bound(rows, cells, cl + 1) {
                                for m in bound(cols, cells, cm)..bound(cols, cells, cm + 1) {
                                    if response.at(l, m, n) > best {
                                        best = response.at(l, m, n);
                                        at = (l, m, n);
                                    }
                                }
                            }
                        }
                        want.push((best, at));
                    }
                }
            }
        }

        prop_assert_eq!(values.len(), want.len());
        for (i, (&value, &coord)) in values.iter().zip(&coords).enumerate() {
            prop_assert_eq!(value.to_bits(), want[i].0.to_bits(), "slot {}", i);
            prop_assert_eq!(coord, want[i].1, "slot {}", i);
        }
    }

    #[test]
    fn mass_boxes_respect_the_budget_and_the_video_bounds(
        dims in (8usize..=24, 8usize..=24, 1usize..=3),
        filter in (1usize..=6, 1usize..=6),
        lambda in 0.05f64..=1.0,
        seed in any::<u64>(),
    ) {
        let (rows, cols, frames) = dims;
        let response = ResponseVolume::new(
            rows,
            cols,
            frames,
            random_volume(rows, cols, frames, seed).data().to_vec(),
            Provenance::Smashed,
        )
        .unwrap();
        let boxes = locate_video(&response, filter, BoxMode::Mass { lambda }).unwrap();
        prop_assert_eq!(boxes.len(), frames);

        let video_rows = rows + filter.0 - 1;
        let video_cols = cols + filter.1 - 1;
        for b in &boxes {
            prop_assert!(b.center.0.is_finite() && b.center.1.is_finite());
            prop_assert!(b.mass_fraction.is_finite());
            prop_assert!(b.mass_fraction >= 0.0);
            if !b.degenerate {
                prop_assert!(
                    b.mass_fraction <= lambda + 1e-12,
                    "mass {} over budget {}",
                    b.mass_fraction, lambda
                );
            }
            let (top, left) = b.top_left();
            prop_assert!(top + b.height <= video_rows);
            prop_assert!(left + b.width <= video_cols);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn measurement_differencing_commutes_with_frame_differencing(
        (p, q, r, seed) in (2usize..=6, 2usize..=6, 2usize..=5, any::<u64>()),
        k_frac in 1usize..=4,
    ) {
        // Projection is linear, so differencing measurement columns must
        // agree with projecting pre-differenced frames, up to rounding.
        let video = random_volume(p, q, r, seed);
        let k = (p * q * k_frac / 4).max(1);
        let matrix =
            MeasurementMatrix::<f64>::generate(Distribution::Gaussian, seed ^ 0x55, k, p * q)
                .unwrap();

        let dz = compressed_temporal_derivative(&compress(&video, &matrix, 0.0).unwrap())
            .unwrap();

        let mut diffed = VideoVolume::zeros(p, q, r - 1).unwrap();
        for t in 0..r - 1 {
            for row in 0..p {
                for col in 0..q {
                    *diffed.at_mut(row, col, t) =
                        video.at(row, col, t + 1) - video.at(row, col, t);
                }
            }
        }
        let zd = compress(&diffed, &matrix, 0.0).unwrap();

        prop_assert_eq!(dz.data().len(), zd.data().len());
        for (a, b) in dz.data().iter().zip(zd.data()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }
}
