//! The evaluation harness: leave-one-out and fixed-split protocols over a
//! labeled clip set, on either the measurement-domain path or the
//! full-data path, with wall-clock timing per tested clip and a sweep
//! driver over compression ratios.
//!
//! Filters are rebuilt per fold so no test clip ever contributes to the
//! bank scoring it. The expensive parts are shared where that cannot leak
//! information: each clip's response spectrum is computed once, and
//! feature blocks are memoized per (clip, filter) since most folds reuse
//! the same filters.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use smash_core::synthetic::{synthetic_suite, training_crop, ACTION_NAMES};
use smash_core::{
    backproject, classify_peak_psr, compress, compressed_temporal_derivative, correlate3_spectrum,
    dft3, feature_vector, spectra_stats, synthesize, temporal_derivative, train_svm, Error,
    Features, Filter, Matrix, Provenance, Result, Spectrum3, SvmHyperparams, SvmModel, Volume,
};

use crate::config::{ClassifierMode, ExperimentConfig, Protocol};
use crate::dataset::{load_video, Dataset};

pub struct EvalClip {
    pub name: String,
    pub video: Volume,
    /// Training example; the clip itself when absent.
    pub crop: Option<Volume>,
    pub action: usize,
    /// Clips sharing a group leave together under leave-one-out.
    pub group: usize,
}

pub struct EvalSet {
    pub clips: Vec<EvalClip>,
    pub actions: Vec<String>,
}

impl EvalSet {
    pub fn crop_of(&self, i: usize) -> &Volume {
        let clip = &self.clips[i];
        clip.crop.as_ref().unwrap_or(&clip.video)
    }

    /// The built-in three-action suite: `instances` clips per action with
    /// the given pixel noise, each clip its own fold.
    pub fn from_synthetic(master_seed: u64, instances: usize, pixel_noise: f64) -> Result<EvalSet> {
        let suite = synthetic_suite::<f64>(master_seed, instances, pixel_noise)?;
        let mut clips = Vec::with_capacity(suite.len());
        for (i, instance) in suite.into_iter().enumerate() {
            let crop = training_crop(&instance)?;
            clips.push(EvalClip {
                name: format!("{}-{:02}", instance.label(), i % instances),
                crop: Some(crop),
                action: instance.action,
                group: i,
                video: instance.video,
            });
        }
        Ok(EvalSet {
            clips,
            actions: ACTION_NAMES.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn from_dataset(dataset: &Dataset) -> Result<EvalSet> {
        if dataset.entries.is_empty() {
            return Err(Error::EmptyInput("dataset entries"));
        }
        let actions = dataset.actions();
        let mut group_ids: HashMap<&str, usize> = HashMap::new();
        let mut clips = Vec::with_capacity(dataset.entries.len());
        for (i, entry) in dataset.entries.iter().enumerate() {
            let video = load_video(&entry.video)?;
            let crop = entry.crop.as_deref().map(load_video).transpose()?;
            let action = actions.iter().position(|a| *a == entry.label).unwrap();
            let group = match &entry.group {
                Some(g) => {
                    let next = group_ids.len() + dataset.entries.len();
                    *group_ids.entry(g.as_str()).or_insert(next)
                }
                None => i,
            };
            clips.push(EvalClip {
                name: entry.name.clone(),
                video,
                crop,
                action,
                group,
            });
        }
        Ok(EvalSet { clips, actions })
    }
}

pub struct EvalReport {
    pub actions: Vec<String>,
    /// Clip indices in test order.
    pub tested: Vec<usize>,
    pub names: Vec<String>,
    pub truth: Vec<usize>,
    pub svm_predicted: Vec<usize>,
    pub psr_predicted: Vec<usize>,
    pub svm_accuracy: f64,
    pub psr_accuracy: f64,
    /// Full measurement-to-label chain per tested clip, seconds.
    pub runtime_s: Vec<f64>,
    pub mean_runtime_s: f64,
    pub k: usize,
    pub d: usize,
}

impl EvalReport {
    pub fn accuracy(&self, mode: ClassifierMode) -> f64 {
        match mode {
            ClassifierMode::Svm => self.svm_accuracy,
            ClassifierMode::PeakPsr => self.psr_accuracy,
        }
    }

    pub fn predicted(&self, mode: ClassifierMode) -> &[usize] {
        match mode {
            ClassifierMode::Svm => &self.svm_predicted,
            ClassifierMode::PeakPsr => &self.psr_predicted,
        }
    }
}

/// One filter per action from the crops of every clip not listed in
/// `excluded`, synthesized with the config's weights and normalized to a
/// comparable scale.
pub fn action_filters(
    set: &EvalSet,
    config: &ExperimentConfig,
    excluded: &[usize],
) -> Result<Vec<Filter>> {
    (0..set.actions.len())
        .map(|action| build_filter(set, config, action, excluded))
        .collect()
}

fn build_filter(
    set: &EvalSet,
    config: &ExperimentConfig,
    action: usize,
    excluded: &[usize],
) -> Result<Filter> {
    let crops: Vec<Volume> = (0..set.clips.len())
        .filter(|&i| set.clips[i].action == action && !excluded.contains(&i))
        .map(|i| set.crop_of(i).clone())
        .collect();
    if crops.is_empty() {
        return Err(Error::Dimension(format!(
            "no training crops left for action '{}'",
            set.actions[action]
        )));
    }
    let stats = spectra_stats(&crops)?;
    let mut filter = synthesize(
        &stats,
        config.alpha,
        config.beta,
        config.gamma,
        &set.actions[action],
    )?;
    filter.normalize()?;
    Ok(filter)
}

/// The full chain from one clip to its feature vector: sense (when a
/// matrix is given), difference, lift, transform, correlate with every
/// filter, pool. This is the per-clip work the timing figures report.
pub fn respond_features(
    video: &Volume,
    filters: &[Filter],
    matrix: Option<(&Matrix, f64)>,
) -> Result<Features> {
    let (spectrum, provenance) = clip_spectrum(video, matrix)?;
    let responses = filters
        .iter()
        .map(|f| {
            let mut r = correlate3_spectrum(&spectrum, f.volume())?;
            r.set_provenance(provenance);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    feature_vector(&responses)
}

/// Differenced response spectrum of one clip, through the measurement
/// domain when a matrix is given, straight from the pixels otherwise.
fn clip_spectrum(video: &Volume, matrix: Option<(&Matrix, f64)>) -> Result<(Spectrum3<f64>, Provenance)> {
    match matrix {
        Some((m, sigma)) => {
            let z = compress(video, m, sigma)?;
            let dz = compressed_temporal_derivative(&z)?;
            let lifted = backproject(&dz, m)?;
            Ok((dft3(&lifted), Provenance::Smashed))
        }
        None => Ok((dft3(&temporal_derivative(video)?), Provenance::Oracle)),
    }
}

/// (train, test) index sets per fold.
fn folds(set: &EvalSet, protocol: Protocol) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = set.clips.len();
    match protocol {
        Protocol::LeaveOneOut => {
            let mut groups: Vec<usize> = set.clips.iter().map(|c| c.group).collect();
            groups.sort_unstable();
            groups.dedup();
            groups
                .into_iter()
                .map(|g| {
                    let test: Vec<usize> = (0..n).filter(|&i| set.clips[i].group == g).collect();
                    let train: Vec<usize> = (0..n).filter(|&i| set.clips[i].group != g).collect();
                    (train, test)
                })
                .collect()
        }
        Protocol::FixedSplit => {
            // Per action, the first half (rounded up) trains.
            let mut seen = vec![0usize; set.actions.len()];
            let mut count = vec![0usize; set.actions.len()];
            for c in &set.clips {
                count[c.action] += 1;
            }
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (i, c) in set.clips.iter().enumerate() {
                if seen[c.action] < count[c.action].div_ceil(2) {
                    train.push(i);
                } else {
                    test.push(i);
                }
                seen[c.action] += 1;
            }
            vec![(train, test)]
        }
    }
}

pub fn evaluate(
    set: &EvalSet,
    config: &ExperimentConfig,
    hp: SvmHyperparams,
) -> Result<EvalReport> {
    if set.actions.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    let (rows, cols, _) = set.clips[0].video.dims();
    for c in &set.clips {
        if (c.video.rows(), c.video.cols()) != (rows, cols) {
            return Err(Error::Dimension(format!(
                "clip '{}' is {}x{}, but the set started {}x{}",
                c.name,
                c.video.rows(),
                c.video.cols(),
                rows,
                cols
            )));
        }
    }
    let d = rows * cols;
    let k = config.measurements(d);
    let matrix = if config.is_oracle() {
        None
    } else {
        Some(Matrix::generate(
            config.distribution,
            config.matrix_seed,
            k,
            d,
        )?)
    };
    let sensing = matrix.as_ref().map(|m| (m, config.noise_sigma));

    // Response spectra for clips in their training role, computed once.
    let spectra: Vec<Spectrum3<f64>> = set
        .clips
        .par_iter()
        .map(|c| clip_spectrum(&c.video, sensing).map(|(s, _)| s))
        .collect::<Result<Vec<_>>>()?;

    // Filters keyed by which clips were withheld, shared across folds.
    let mut filter_store: Vec<Filter> = Vec::new();
    let mut filter_index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    // Feature blocks keyed by (clip, filter in store).
    let mut blocks: HashMap<(usize, usize), Vec<f64>> = HashMap::new();

    let mut tested = Vec::new();
    let mut runtime_s = Vec::new();
    let mut svm_predicted = Vec::new();
    let mut psr_predicted = Vec::new();

    let identity: Vec<usize> = (0..set.actions.len()).collect();
    for (train, test) in folds(set, config.protocol) {
        // This fold's bank: per action, a filter trained without any of
        // the fold's test clips.
        let mut fold_filters = Vec::with_capacity(set.actions.len());
        for action in 0..set.actions.len() {
            let excluded: Vec<usize> = test
                .iter()
                .copied()
                .filter(|&i| set.clips[i].action == action)
                .collect();
            let key = (action, excluded);
            let idx = match filter_index.get(&key) {
                Some(&idx) => idx,
                None => {
                    let filter = build_filter(set, config, action, &key.1)?;
                    filter_store.push(filter);
                    filter_index.insert(key, filter_store.len() - 1);
                    filter_store.len() - 1
                }
            };
            fold_filters.push(idx);
        }

        // Feature blocks for the training clips, memoized across folds.
        let missing: Vec<(usize, usize)> = train
            .iter()
            .flat_map(|&clip| fold_filters.iter().map(move |&f| (clip, f)))
            .filter(|key| !blocks.contains_key(key))
            .collect();
        let computed: Vec<((usize, usize), Vec<f64>)> = missing
            .par_iter()
            .map(|&(clip, f)| {
                let response = correlate3_spectrum(&spectra[clip], filter_store[f].volume())?;
                let features = feature_vector(&[response])?;
                Ok(((clip, f), features.to_f64()))
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.extend(computed);

        let xs: Vec<Vec<f64>> = train
            .iter()
            .map(|&clip| {
                fold_filters
                    .iter()
                    .flat_map(|&f| blocks[&(clip, f)].iter().copied())
                    .collect()
            })
            .collect();
        let ys: Vec<usize> = train.iter().map(|&i| set.clips[i].action).collect();
        let model = train_svm(&xs, &ys, set.actions.len(), hp)?;

        let bank: Vec<Filter> = fold_filters
            .iter()
            .map(|&f| filter_store[f].clone())
            .collect();
        for &clip in &test {
            let started = Instant::now();
            let (svm_pred, psr_pred) =
                classify_clip(&set.clips[clip].video, &bank, sensing, &model, &identity)?;
            runtime_s.push(started.elapsed().as_secs_f64());
            tested.push(clip);
            svm_predicted.push(svm_pred);
            psr_predicted.push(psr_pred);
        }
    }

    let truth: Vec<usize> = tested.iter().map(|&i| set.clips[i].action).collect();
    let names: Vec<String> = tested.iter().map(|&i| set.clips[i].name.clone()).collect();
    let accuracy = |predicted: &[usize]| {
        predicted
            .iter()
            .zip(&truth)
            .filter(|(p, t)| p == t)
            .count() as f64
            / truth.len().max(1) as f64
    };
    Ok(EvalReport {
        actions: set.actions.clone(),
        svm_accuracy: accuracy(&svm_predicted),
        psr_accuracy: accuracy(&psr_predicted),
        mean_runtime_s: runtime_s.iter().sum::<f64>() / runtime_s.len().max(1) as f64,
        tested,
        names,
        truth,
        svm_predicted,
        psr_predicted,
        runtime_s,
        k,
        d,
    })
}

/// The timed test-side chain: everything from raw pixels to both
/// classifiers' decisions.
fn classify_clip(
    video: &Volume,
    bank: &[Filter],
    sensing: Option<(&Matrix, f64)>,
    model: &SvmModel,
    filter_to_action: &[usize],
) -> Result<(usize, usize)> {
    let features = respond_features(video, bank, sensing)?;
    let (svm_pred, _) = model.classify(&features.to_f64())?;
    let (psr_pred, _) = classify_peak_psr(&features, filter_to_action, filter_to_action.len())?;
    Ok((svm_pred, psr_pred))
}

pub struct SweepRow {
    pub cr: f64,
    pub k: usize,
    pub accuracy: f64,
    pub mean_runtime_s: f64,
}

/// Runs the configured protocol once per compression ratio; accuracy is
/// reported for the config's classifier mode.
pub fn cr_sweep(
    set: &EvalSet,
    base: &ExperimentConfig,
    hp: SvmHyperparams,
    ratios: &[f64],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ratios.len());
    for &cr in ratios {
        let config = ExperimentConfig {
            compression_ratio: cr,
            ..base.clone()
        };
        let report = evaluate(set, &config, hp)?;
        rows.push(SweepRow {
            cr,
            k: report.k,
            accuracy: report.accuracy(base.mode),
            mean_runtime_s: report.mean_runtime_s,
        });
    }
    Ok(rows)
}
