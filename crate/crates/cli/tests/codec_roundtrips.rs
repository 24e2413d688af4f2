//! Every on-disk format driven through its full save/load cycle, plus the
//! rejection paths: truncation, trailing bytes, wrong magic, and headers
//! whose fields contradict each other. The universal round-trip check is
//! save -> load -> save again and compare files byte for byte, which holds
//! regardless of the f64 -> f32 narrowing on first write.

use std::path::Path;

use smash_cli::io::codec::{
    load_bank, load_filter, load_matrix, load_measurements, load_model, load_volume, save_bank,
    save_filter, save_matrix, save_measurements, save_model, save_volume,
};
use smash_cli::io::pgm::{parse_pgm, read_pgm_dir};
use smash_core::{
    compress, train_svm, AffineView, Bank, Distribution, Error, Filter, FilterBank, MachFilter,
    Matrix, SvmHyperparams, ViewTag, Volume,
};
use tempfile::TempDir;

struct TestRng(u64);

impl TestRng {
    fn new(seed: u64) -> Self {
        TestRng(seed | 1)
    }

    /// f32-exact samples in (-1, 1), so disk narrowing is the identity.
    fn next_sample(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        let bits = self.0.wrapping_mul(0x2545_F491_4F6C_DD1D);
        ((bits >> 40) as f32 / (1u32 << 24) as f32 - 0.5) as f64
    }
}

fn random_volume(rows: usize, cols: usize, frames: usize, seed: u64) -> Volume {
    let mut g = TestRng::new(seed);
    let data = (0..rows * cols * frames).map(|_| g.next_sample()).collect();
    Volume::new(rows, cols, frames, data).unwrap()
}

fn shear_view() -> AffineView {
    AffineView::new([[1.0, 0.2], [0.0, 1.0]], [3.5, -2.0]).unwrap()
}

fn sample_filter(label: &str, tag: ViewTag, seed: u64) -> Filter {
    MachFilter::from_parts(random_volume(4, 5, 3, seed), 1.0, 1e-3, 2e-3, label.into(), tag)
}

/// save(load(save(x))) must equal save(x) byte for byte.
fn assert_stable<T>(
    dir: &Path,
    value: &T,
    save: impl Fn(&Path, &T) -> smash_core::Result<()>,
    load: impl Fn(&Path) -> smash_core::Result<T>,
) -> Vec<u8> {
    let first = dir.join("first.bin");
    let second = dir.join("second.bin");
    save(&first, value).unwrap();
    let reloaded = load(&first).unwrap();
    save(&second, &reloaded).unwrap();
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "second write diverged from the first");
    a
}

#[test]
fn volume_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let v = random_volume(6, 7, 4, 11);
    assert_stable(dir.path(), &v, save_volume, load_volume);

    let path = dir.path().join("v.rvf1");
    save_volume(&path, &v).unwrap();
    let back = load_volume(&path).unwrap();
    assert_eq!(back.dims(), v.dims());
    assert_eq!(back.data(), v.data());
}

#[test]
fn filter_round_trips_under_every_view_tag() {
    let dir = TempDir::new().unwrap();
    let tags = [
        ViewTag::Type1,
        ViewTag::Type2,
        ViewTag::Compensated(shear_view()),
    ];
    for (i, tag) in tags.into_iter().enumerate() {
        // The non-ASCII label exercises the UTF-8 length prefix.
        let f = sample_filter("händ-wave", tag, 20 + i as u64);
        let path = dir.path().join(format!("f{i}.mch1"));
        save_filter(&path, &f).unwrap();
        let back = load_filter(&path).unwrap();
        assert_eq!(back.label(), f.label());
        assert_eq!(back.view_tag(), f.view_tag());
        assert_eq!(back.alpha().to_bits(), f.alpha().to_bits());
        assert_eq!(back.beta().to_bits(), f.beta().to_bits());
        assert_eq!(back.gamma().to_bits(), f.gamma().to_bits());
        assert_eq!(back.volume().dims(), f.volume().dims());
        assert_eq!(back.volume().data(), f.volume().data());
        assert_stable(dir.path(), &f, save_filter, load_filter);
    }
}

#[test]
fn seed_only_and_materialized_matrices_load_identically() {
    let dir = TempDir::new().unwrap();
    let m = Matrix::generate(Distribution::Gaussian, 7, 8, 32).unwrap();

    let small = dir.path().join("seed.phi1");
    let big = dir.path().join("full.phi1");
    save_matrix(&small, &m, false).unwrap();
    save_matrix(&big, &m, true).unwrap();
    assert!(std::fs::metadata(&small).unwrap().len() < 32);
    assert!(std::fs::metadata(&big).unwrap().len() > 8 * 32 * 4);

    let a = load_matrix(&small).unwrap();
    let b = load_matrix(&big).unwrap();
    assert_eq!(a.id(), m.id());
    assert_eq!(b.id(), m.id());
    assert_eq!(a.entries(), m.entries());
    assert_eq!(b.entries(), m.entries());
}

#[test]
fn bernoulli_matrix_round_trips() {
    let dir = TempDir::new().unwrap();
    let m = Matrix::generate(Distribution::Bernoulli, 3, 4, 16).unwrap();
    let path = dir.path().join("s.phi1");
    save_matrix(&path, &m, true).unwrap();
    let back = load_matrix(&path).unwrap();
    assert_eq!(back.id(), m.id());
    assert_eq!(back.entries(), m.entries());
}

#[test]
fn measurement_stream_round_trips() {
    let dir = TempDir::new().unwrap();
    let video = random_volume(4, 4, 5, 31);
    let m = Matrix::generate(Distribution::Gaussian, 9, 6, 16).unwrap();
    let z = compress(&video, &m, 0.25).unwrap();

    let path = dir.path().join("z.cmp1");
    save_measurements(&path, &z).unwrap();
    let back = load_measurements(&path).unwrap();
    assert_eq!(back.matrix_id(), z.matrix_id());
    assert_eq!(back.frame_dims(), z.frame_dims());
    assert_eq!(back.columns(), z.columns());
    assert_eq!(back.derivative_order(), z.derivative_order());
    assert_eq!(back.noise_sigma(), 0.25);
    // Measurements are computed in f64 and stored as f32; the reload must
    // match the narrowed values exactly.
    for (got, want) in back.data().iter().zip(z.data()) {
        assert_eq!(got.to_bits(), ((*want as f32) as f64).to_bits());
    }
    assert_stable(dir.path(), &z, save_measurements, load_measurements);
}

#[test]
fn model_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let xs = vec![
        vec![1.0, 0.0, 0.3],
        vec![0.9, 0.1, 0.2],
        vec![0.0, 1.0, -0.4],
        vec![0.1, 0.8, -0.5],
    ];
    let hp = SvmHyperparams {
        lambda: 1e-2,
        epochs: 50,
        seed: 9,
    };
    let model = train_svm(&xs, &[0, 0, 1, 1], 2, hp).unwrap();

    let path = dir.path().join("m.mdl1");
    save_model(&path, &model).unwrap();
    let back = load_model(&path).unwrap();
    assert_eq!(back.classes(), model.classes());
    assert_eq!(back.dim(), model.dim());
    assert_eq!(back.weights(), model.weights());
    assert_eq!(back.biases(), model.biases());
    assert_eq!(back.mean(), model.mean());
    assert_eq!(back.std(), model.std());
    assert_eq!(back.hyperparams(), hp);
    assert_stable(dir.path(), &model, save_model, load_model);
}

#[test]
fn bank_round_trips_with_mixed_tags() {
    let dir = TempDir::new().unwrap();
    let bank = FilterBank::from_filters(vec![
        sample_filter("left", ViewTag::Type1, 40),
        sample_filter("right", ViewTag::Compensated(shear_view()), 41),
    ])
    .unwrap();

    let path = dir.path().join("b.bnk1");
    save_bank(&path, &bank).unwrap();
    let back = load_bank(&path).unwrap();
    assert_eq!(back.len(), 2);
    for (got, want) in back.filters().iter().zip(bank.filters()) {
        assert_eq!(got.label(), want.label());
        assert_eq!(got.view_tag(), want.view_tag());
        assert_eq!(got.volume().data(), want.volume().data());
    }
    assert_stable(dir.path(), &bank, save_bank, load_bank);
}

#[test]
fn truncated_files_report_expected_and_actual_byte_counts() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("v.rvf1");
    save_volume(&path, &random_volume(3, 3, 2, 50)).unwrap();
    let full = std::fs::read(&path).unwrap();
    std::fs::write(&path, &full[..full.len() - 3]).unwrap();

    match load_volume(&path).unwrap_err() {
        Error::PayloadSize {
            path: p,
            expected,
            actual,
        } => {
            assert!(p.ends_with("v.rvf1"));
            assert_eq!(actual, full.len() as u64 - 3);
            assert_eq!(expected, full.len() as u64);
        }
        other => panic!("expected a payload-size error, got {other:?}"),
    }
}

#[test]
fn trailing_bytes_are_counted_and_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.phi1");
    let m = Matrix::generate(Distribution::Gaussian, 2, 2, 4).unwrap();
    save_matrix(&path, &m, false).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.extend_from_slice(&[0, 0]);
    std::fs::write(&path, &bytes).unwrap();

    match load_matrix(&path).unwrap_err() {
        Error::Format { detail, .. } => assert!(
            detail.contains("2 trailing bytes"),
            "unexpected detail: {detail}"
        ),
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn wrong_magic_names_the_expected_format() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("f.mch1");
    save_filter(&path, &sample_filter("x", ViewTag::Type1, 60)).unwrap();

    // A filter opened as a volume trips the magic check, not a crash.
    match load_volume(&path).unwrap_err() {
        Error::BadMagic { expected, .. } => assert_eq!(expected, "RVF1"),
        other => panic!("expected a bad-magic error, got {other:?}"),
    }
}

#[test]
fn corrupt_header_fields_are_format_errors() {
    let dir = TempDir::new().unwrap();

    // Unknown distribution code in a matrix header (offset 4, after magic).
    let path = dir.path().join("m.phi1");
    let m = Matrix::generate(Distribution::Gaussian, 2, 2, 4).unwrap();
    save_matrix(&path, &m, false).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4] = 9;
    std::fs::write(&path, &bytes).unwrap();
    match load_matrix(&path).unwrap_err() {
        Error::Format { detail, .. } => assert!(detail.contains("distribution code 9")),
        other => panic!("expected a format error, got {other:?}"),
    }

    // Unknown view tag in a filter (right after dims and three weights).
    let path = dir.path().join("f.mch1");
    save_filter(&path, &sample_filter("x", ViewTag::Type1, 61)).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4 + 12 + 24] = 7;
    std::fs::write(&path, &bytes).unwrap();
    match load_filter(&path).unwrap_err() {
        Error::Format { detail, .. } => assert!(detail.contains("view tag 7")),
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn measurement_files_reject_materialized_embedded_headers() {
    let dir = TempDir::new().unwrap();
    let video = random_volume(4, 4, 3, 70);
    let m = Matrix::generate(Distribution::Gaussian, 5, 6, 16).unwrap();
    let z = compress(&video, &m, 0.0).unwrap();
    let path = dir.path().join("z.cmp1");
    save_measurements(&path, &z).unwrap();

    // The embedded matrix header's materialized flag sits after two magics,
    // the distribution code, the seed, and both extents.
    let mut bytes = std::fs::read(&path).unwrap();
    let flag_at = 4 + 4 + 1 + 8 + 4 + 4;
    assert_eq!(bytes[flag_at], 0);
    bytes[flag_at] = 1;
    std::fs::write(&path, &bytes).unwrap();
    match load_measurements(&path).unwrap_err() {
        Error::Format { detail, .. } => assert!(detail.contains("seed-only")),
        other => panic!("expected a format error, got {other:?}"),
    }
}

// ---- PGM ingestion ---------------------------------------------------------

fn write_pgm_frame(path: &Path, cols: usize, rows: usize, samples: &[u8], comment: bool) {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(b"P5\n");
    if comment {
        bytes.extend_from_slice(b"# capture rig metadata\n");
    }
    bytes.extend_from_slice(format!("{cols} {rows}\n255\n").as_bytes());
    bytes.extend_from_slice(samples);
    std::fs::write(path, bytes).unwrap();
}

#[test]
fn pgm_directory_reads_as_one_volume_in_name_order() {
    let dir = TempDir::new().unwrap();
    // Written out of order on purpose; "a" must still come first. The
    // stray text file is not a frame and must be ignored.
    write_pgm_frame(&dir.path().join("b.pgm"), 2, 2, &[204, 255, 10, 20], false);
    write_pgm_frame(&dir.path().join("a.pgm"), 2, 2, &[0, 51, 102, 153], true);
    std::fs::write(dir.path().join("notes.txt"), "not a frame").unwrap();

    let v = read_pgm_dir(dir.path()).unwrap();
    assert_eq!(v.dims(), (2, 2, 2));
    let expected: Vec<f64> = [0u8, 51, 102, 153, 204, 255, 10, 20]
        .iter()
        .map(|&b| b as f64 / 255.0)
        .collect();
    assert_eq!(v.data(), &expected[..]);
}

#[test]
fn pgm_rejections_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("f.pgm");

    // ASCII variant.
    std::fs::write(&p, b"P2\n2 2\n255\n0 0 0 0\n").unwrap();
    let e = parse_pgm(&std::fs::read(&p).unwrap(), &p).unwrap_err();
    assert!(e.to_string().contains("P5"), "{e}");

    // 16-bit samples.
    std::fs::write(&p, b"P5\n2 2\n65535\n\0\0\0\0\0\0\0\0").unwrap();
    let e = parse_pgm(&std::fs::read(&p).unwrap(), &p).unwrap_err();
    assert!(e.to_string().contains("maxval"), "{e}");

    // Raster shorter than width * height.
    std::fs::write(&p, b"P5\n2 2\n255\n\0\0\0").unwrap();
    let e = parse_pgm(&std::fs::read(&p).unwrap(), &p).unwrap_err();
    assert!(e.to_string().contains("raster holds 3"), "{e}");
}

#[test]
fn pgm_directory_rejects_mismatched_frame_sizes() {
    let dir = TempDir::new().unwrap();
    write_pgm_frame(&dir.path().join("0.pgm"), 2, 2, &[1, 2, 3, 4], false);
    write_pgm_frame(&dir.path().join("1.pgm"), 3, 1, &[5, 6, 7], false);
    let e = read_pgm_dir(dir.path()).unwrap_err();
    assert!(e.to_string().contains("1.pgm"), "{e}");

    let empty = TempDir::new().unwrap();
    let e = read_pgm_dir(empty.path()).unwrap_err();
    assert!(e.to_string().contains("no .pgm frames"), "{e}");
}

/// The bank codec trusts its count field only as a reservation hint; a
/// count pointing past the end of the file must fail cleanly.
#[test]
fn bank_with_overstated_count_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("b.bnk1");
    let bank: Bank = FilterBank::from_filters(vec![sample_filter("only", ViewTag::Type1, 80)]).unwrap();
    save_bank(&path, &bank).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4] = 200;
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(
        load_bank(&path).unwrap_err(),
        Error::PayloadSize { .. } | Error::BadMagic { .. }
    ));
}
