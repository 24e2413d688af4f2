//! The measurement-domain response pipeline checked against literal
//! reimplementations: a shifted-template recount done entirely with dot
//! products, an empirical error bound tied to projection distortion, and
//! bit-level determinism across thread pools.

use smash_core::engine::{oracle_response, response_bank, smashed_response, FilterBank};
use smash_core::mach::{MachFilter, ViewTag};
use smash_core::sensing::{
    compress, compressed_temporal_derivative, jl_report, Distribution, MeasurementMatrix,
    PairKind,
};
use smash_core::volume::VideoVolume;

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

fn probe_filter(rows: usize, cols: usize, frames: usize, seed: u64) -> MachFilter<f64> {
    MachFilter::from_parts(
        random_volume(rows, cols, frames, seed),
        1.0,
        0.0,
        0.0,
        "probe".to_string(),
        ViewTag::Type1,
    )
}

/// Measurement-order flattening of one row-major frame: column index major,
/// row index minor, matching the layout measurement matrices act on.
fn flatten(frame: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut flat = vec![0.0; rows * cols];
    for c in 0..cols {
        for r in 0..rows {
            flat[c * rows + r] = frame[r * cols + c];
        }
    }
    flat
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn response_matches_a_shifted_template_recount() {
    // The pipeline computes its response by lifting the measurements and
    // correlating once. The slow route computes every entry from the
    // definition instead: project each zero-padded, shifted filter slice
    // through the matrix and take dot products against the differenced
    // measurement columns. No lifting, no transforms.
    let (p, q, r) = (12usize, 12, 6);
    let (fl, fm, fr) = (4usize, 4, 3);
    let video = random_volume(p, q, r, 5);
    let filter = probe_filter(fl, fm, fr, 6);
    let matrix = MeasurementMatrix::<f64>::generate(Distribution::Bernoulli, 21, 36, p * q)
        .unwrap();

    let z = compress(&video, &matrix, 0.0).unwrap();
    let dz = compressed_temporal_derivative(&z).unwrap();
    let got = smashed_response(&dz, &filter, &matrix).unwrap();
    assert_eq!(got.dims(), (p - fl + 1, q - fm + 1, r - 1 - fr + 1));

    let project = |flat: &[f64]| -> Vec<f64> {
        (0..matrix.rows()).map(|k| dot(matrix.row(k), flat)).collect()
    };

    // Projected shifted templates, one per (row offset, column offset,
    // filter frame).
    let (ol, om, on) = got.dims();
    let mut projected = vec![Vec::new(); ol * om * fr];
    for l in 0..ol {
        for m in 0..om {
            for t in 0..fr {
                let mut frame = vec![0.0; p * q];
                for x in 0..fl {
                    for y in 0..fm {
                        frame[(l + x) * q + (m + y)] = filter.volume().at(x, y, t);
                    }
                }
                projected[(l * om + m) * fr + t] = project(&flatten(&frame, p, q));
            }
        }
    }

    let mut max_diff = 0.0f64;
    let mut max_ref = 0.0f64;
    for l in 0..ol {
        for m in 0..om {
            for n in 0..on {
                let mut want = 0.0;
                for t in 0..fr {
                    want += dot(dz.column(n + t), &projected[(l * om + m) * fr + t]);
                }
                max_diff = max_diff.max((got.at(l, m, n) - want).abs());
                max_ref = max_ref.max(want.abs());
            }
        }
    }
    assert!(
        max_diff <= 1e-6 * max_ref.max(1.0),
        "max deviation {max_diff} against reference scale {max_ref}"
    );
}

#[test]
fn zero_measurements_produce_a_zero_response() {
    let video = VideoVolume::<f64>::zeros(8, 8, 4).unwrap();
    let matrix =
        MeasurementMatrix::<f64>::generate(Distribution::Gaussian, 9, 16, 64).unwrap();
    let z = compress(&video, &matrix, 0.0).unwrap();
    let dz = compressed_temporal_derivative(&z).unwrap();
    let response = smashed_response(&dz, &probe_filter(3, 3, 2, 1), &matrix).unwrap();
    assert!(response.data().iter().all(|&v| v == 0.0));
}

#[test]
fn wider_matrices_track_the_oracle_more_closely() {
    // More measurement rows mean less projection distortion, so the
    // measurement-domain response should sit closer to the full-data one.
    // Random fluctuation can flip an occasional seed; a wide majority
    // cannot flip.
    let (p, q, r) = (8usize, 8, 6);
    let d = p * q;
    let mut wins = 0;
    for seed in 0..20u64 {
        let video = random_volume(p, q, r, 2000 + seed);
        let filter = probe_filter(3, 3, 2, 3000 + seed);
        let want = oracle_response(&video, &filter).unwrap();

        let deviation = |k: usize| -> f64 {
            let matrix =
                MeasurementMatrix::<f64>::generate(Distribution::Gaussian, 1000 + seed, k, d)
                    .unwrap();
            let z = compress(&video, &matrix, 0.0).unwrap();
            let dz = compressed_temporal_derivative(&z).unwrap();
            let got = smashed_response(&dz, &filter, &matrix).unwrap();
            got.data()
                .iter()
                .zip(want.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };

        if deviation(d) < deviation(d / 8) {
            wins += 1;
        }
    }
    assert!(wins >= 18, "full-width matrix won only {wins}/20 runs");
}

#[test]
fn projection_distortion_bounds_the_response_error() {
    // With unit-norm difference frames and unit-norm filter slices, every
    // response entry is a sum of as many projected inner products as the
    // filter has frames. Its deviation from the full-data entry is then at
    // most the filter frame count times the worst single-pair distortion,
    // estimated empirically for the same matrix; the factor two covers the
    // estimate being a finite-sample maximum. The worst deviation must also
    // shrink as rows are added.
    let (p, q) = (16usize, 16);
    let d = p * q;
    let diff_frames = 3usize;
    let filter_frames = 2usize;
    let mut medians = Vec::new();

    for &k in &[4usize, 16, 64] {
        let mut worst = Vec::new();
        for seed in 0..10u64 {
            let mut g = TestRng::new(9000 + seed * 97 + k as u64);
            let mut unit = |len: usize| -> Vec<f64> {
                let v: Vec<f64> = (0..len).map(|_| g.next_f64()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            };

            // Integrate unit-norm difference frames into a video so the
            // pipeline's own differencing hands them back.
            let diffs: Vec<Vec<f64>> = (0..diff_frames).map(|_| unit(d)).collect();
            let mut data = vec![0.0; d];
            let mut prev = vec![0.0; d];
            for step in &diffs {
                let next: Vec<f64> =
                    prev.iter().zip(step).map(|(s, x)| s + x).collect();
                data.extend_from_slice(&next);
                prev = next;
            }
            let video = VideoVolume::new(p, q, diff_frames + 1, data).unwrap();

            let mut fdata = Vec::new();
            for _ in 0..filter_frames {
                fdata.extend(unit(16));
            }
            let filter = MachFilter::from_parts(
                VideoVolume::new(4, 4, filter_frames, fdata).unwrap(),
                1.0,
                0.0,
                0.0,
                "unit".to_string(),
                ViewTag::Type1,
            );

            let matrix =
                MeasurementMatrix::<f64>::generate(Distribution::Gaussian, 3100 + seed, k, d)
                    .unwrap();
            let z = compress(&video, &matrix, 0.0).unwrap();
            let dz = compressed_temporal_derivative(&z).unwrap();
            let got = smashed_response(&dz, &filter, &matrix).unwrap();
            let want = oracle_response(&video, &filter).unwrap();

            let max_dev = got
                .data()
                .iter()
                .zip(want.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);

            let eps = jl_report(
                Distribution::Gaussian,
                3100 + seed,
                k,
                d,
                400,
                900 + seed,
                PairKind::Raw,
            )
            .unwrap()
            .max_abs_error;

            assert!(
                max_dev <= 2.0 * filter_frames as f64 * eps,
                "k = {k}, seed {seed}: deviation {max_dev} above bound {}",
                2.0 * filter_frames as f64 * eps
            );
            worst.push(max_dev);
        }
        worst.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(worst[worst.len() / 2]);
    }

    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "median worst-case deviation should fall as rows grow: {medians:?}"
    );
}

#[test]
fn responses_do_not_depend_on_the_thread_pool() {
    // Matrix rows, measurement columns, and bank entries are each seeded or
    // indexed independently, so scheduling must never show up in the bits.
    let run = |threads: usize| -> Vec<u64> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let matrix =
                MeasurementMatrix::<f64>::generate(Distribution::Gaussian, 4, 24, 100)
                    .unwrap();
            let video = random_volume(10, 10, 5, 11);
            let z = compress(&video, &matrix, 0.3).unwrap();
            let dz = compressed_temporal_derivative(&z).unwrap();
            let bank = FilterBank::from_filters(vec![
                probe_filter(3, 3, 2, 21),
                probe_filter(3, 3, 2, 22),
                probe_filter(3, 3, 2, 23),
            ])
            .unwrap();
            let responses = response_bank(&dz, &bank, &matrix).unwrap();
            responses
                .iter()
                .flat_map(|r| r.data().iter().map(|v| v.to_bits()))
                .collect()
        })
    };
    assert_eq!(run(1), run(4));
}
