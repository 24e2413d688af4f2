//! End-to-end walkthrough on seeded synthetic footage: build one filter per
//! action from training crops, compress held-out clips a hundredfold,
//! respond in the measurement domain, classify, and localize.
//!
//! Run with `cargo run --example pipeline`. Everything is seeded, so two
//! runs print identical numbers. Exits nonzero if the pipeline misclassifies
//! the held-out clips or loses track of the target.

use smash_core::engine::{response_bank, FilterBank};
use smash_core::features::feature_vector;
use smash_core::localize::{center_error, locate_video, BoxMode};
use smash_core::mach::{spectra_stats, synthesize};
use smash_core::sensing::{
    compress, compressed_temporal_derivative, measurement_count, Distribution,
    MeasurementMatrix,
};
use smash_core::svm::classify_peak_psr;
use smash_core::synthetic::{synthetic_suite, training_crop, SyntheticInstance, ACTION_NAMES};
use smash_core::volume::VideoVolume;

fn main() {
    let per_action = 4usize;
    let suite: Vec<SyntheticInstance<f64>> = synthetic_suite(7, per_action, 0.02).unwrap();

    // Last instance of each action is held out; the rest become training
    // crops for that action's filter.
    let mut filters = Vec::new();
    for (action, name) in ACTION_NAMES.iter().enumerate() {
        let crops: Vec<VideoVolume<f64>> = suite
            .iter()
            .filter(|inst| inst.action == action)
            .take(per_action - 1)
            .map(|inst| training_crop(inst).unwrap())
            .collect();
        let stats = spectra_stats(&crops).unwrap();
        let mut filter = synthesize(&stats, 1.0, 1e-3, 1e-3, name).unwrap();
        filter.normalize().unwrap();
        filters.push(filter);
    }
    let bank = FilterBank::from_filters(filters).unwrap();

    // One measurement matrix shared by all clips: 128 x 128 frames squeezed
    // to K random projections each.
    let d = 128 * 128;
    let k = measurement_count(d, 100.0);
    println!("compression: {d} pixels -> {k} measurements per frame");
    let matrix = MeasurementMatrix::<f64>::generate(Distribution::Gaussian, 1, k, d).unwrap();

    let mut correct = 0;
    let mut tracked = true;
    for action in 0..ACTION_NAMES.len() {
        let held_out = suite
            .iter()
            .filter(|inst| inst.action == action)
            .nth(per_action - 1)
            .unwrap();

        let z = compress(&held_out.video, &matrix, 0.0).unwrap();
        let dz = compressed_temporal_derivative(&z).unwrap();
        let responses = response_bank(&dz, &bank, &matrix).unwrap();

        let features = feature_vector(&responses).unwrap();
        let (predicted, votes) =
            classify_peak_psr(&features, bank.filter_to_action(), bank.actions().len())
                .unwrap();
        let hit = bank.actions()[predicted] == held_out.label();
        correct += hit as usize;
        println!(
            "clip {:>5}: predicted {:>5} (votes {:.2?})",
            held_out.label(),
            bank.actions()[predicted],
            votes
        );

        // Localize with the winning filter's response.
        let best = &responses[predicted];
        let (fl, fm, fr) = bank.filters()[predicted].dims();
        let boxes = locate_video(best, (fl, fm), BoxMode::Mass { lambda: 0.7 }).unwrap();
        let truth: Vec<(f64, f64)> = (0..boxes.len())
            .map(|n| held_out.center_at(n as f64 + fr as f64 / 2.0))
            .collect();
        let summary = center_error(&boxes, &truth).unwrap();
        let mean_err =
            summary.displacements.iter().sum::<f64>() / summary.displacements.len() as f64;
        println!(
            "          mean center error {mean_err:.1} px, within 15 px on {:.0}% of frames",
            100.0 * summary.within[2]
        );
        tracked &= summary.within[2] >= 0.7;
    }

    println!("recognized {correct}/{} held-out clips", ACTION_NAMES.len());
    if correct < ACTION_NAMES.len() || !tracked {
        std::process::exit(1);
    }
}
