//! The experiment knobs recorded alongside every result: compression
//! level, matrix identity, sensor noise, filter weights, localization
//! budget, classifier and protocol choices.

use std::str::FromStr;

use smash_core::{measurement_count, Distribution, Error, Result};

use crate::error::{CliError, CliResult};
use crate::io::manifest::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierMode {
    Svm,
    PeakPsr,
}

impl ClassifierMode {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierMode::Svm => "svm",
            ClassifierMode::PeakPsr => "peak-psr",
        }
    }
}

impl FromStr for ClassifierMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "svm" => Ok(ClassifierMode::Svm),
            "peak-psr" => Ok(ClassifierMode::PeakPsr),
            other => Err(format!("unknown classifier mode '{other}' (svm, peak-psr)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    LeaveOneOut,
    FixedSplit,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::LeaveOneOut => "leave-one-out",
            Protocol::FixedSplit => "fixed-split",
        }
    }
}

impl FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "leave-one-out" => Ok(Protocol::LeaveOneOut),
            "fixed-split" => Ok(Protocol::FixedSplit),
            other => Err(format!(
                "unknown protocol '{other}' (leave-one-out, fixed-split)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// D / K; 1 selects the full-data path.
    pub compression_ratio: f64,
    pub distribution: Distribution,
    pub matrix_seed: u64,
    /// Per-measurement sensor noise level applied while sensing.
    pub noise_sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Localization mass budget.
    pub lambda: f64,
    pub mode: ClassifierMode,
    pub protocol: Protocol,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            compression_ratio: 100.0,
            distribution: Distribution::Gaussian,
            matrix_seed: 0,
            noise_sigma: 0.0,
            alpha: 1.0,
            beta: 1e-3,
            gamma: 1e-3,
            lambda: 0.7,
            mode: ClassifierMode::Svm,
            protocol: Protocol::LeaveOneOut,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.compression_ratio.is_finite() && self.compression_ratio >= 1.0) {
            return Err(CliError::usage(format!(
                "compression ratio {} must be at least 1",
                self.compression_ratio
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(CliError::usage(format!(
                "noise sigma {} must be finite and non-negative",
                self.noise_sigma
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(CliError::usage(format!(
                "mass budget {} outside (0, 1]",
                self.lambda
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(CliError::usage(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Measurements per frame for a D-pixel frame at this ratio.
    pub fn measurements(&self, d: usize) -> usize {
        measurement_count(d, self.compression_ratio)
    }

    /// The ratio-1 configuration runs on full data, no matrix involved.
    pub fn is_oracle(&self) -> bool {
        self.compression_ratio == 1.0
    }

    pub fn to_manifest(&self) -> Manifest {
        let mut m = Manifest::new();
        m.set("compression_ratio", self.compression_ratio.to_string());
        m.set("distribution", self.distribution.name());
        m.set("matrix_seed", self.matrix_seed.to_string());
        m.set("noise_sigma", self.noise_sigma.to_string());
        m.set("alpha", self.alpha.to_string());
        m.set("beta", self.beta.to_string());
        m.set("gamma", self.gamma.to_string());
        m.set("lambda", self.lambda.to_string());
        m.set("mode", self.mode.name());
        m.set("protocol", self.protocol.name());
        m
    }

    /// Strict inverse of [`ExperimentConfig::to_manifest`]: every field
    /// present exactly once, nothing else.
    pub fn from_manifest(m: &Manifest, path: &str) -> Result<ExperimentConfig> {
        let fail = |detail: String| Error::Format {
            path: path.to_string(),
            detail,
        };
        let field = |key: &str| {
            m.get(key)
                .ok_or_else(|| fail(format!("missing key '{key}'")))
        };
        fn number<T: FromStr>(key: &str, raw: &str, path: &str) -> Result<T> {
            raw.parse().map_err(|_| Error::Format {
                path: path.to_string(),
                detail: format!("key '{key}' has unparsable value '{raw}'"),
            })
        }
        const KEYS: [&str; 10] = [
            "compression_ratio",
            "distribution",
            "matrix_seed",
            "noise_sigma",
            "alpha",
            "beta",
            "gamma",
            "lambda",
            "mode",
            "protocol",
        ];
        for (key, _) in m.entries() {
            if !KEYS.contains(&key.as_str()) {
                return Err(fail(format!("unknown key '{key}'")));
            }
        }
        let config = ExperimentConfig {
            compression_ratio: number("compression_ratio", field("compression_ratio")?, path)?,
            distribution: field("distribution")?
                .parse()
                .map_err(|e: String| fail(e))?,
            matrix_seed: number("matrix_seed", field("matrix_seed")?, path)?,
            noise_sigma: number("noise_sigma", field("noise_sigma")?, path)?,
            alpha: number("alpha", field("alpha")?, path)?,
            beta: number("beta", field("beta")?, path)?,
            gamma: number("gamma", field("gamma")?, path)?,
            lambda: number("lambda", field("lambda")?, path)?,
            mode: field("mode")?.parse().map_err(|e: String| fail(e))?,
            protocol: field("protocol")?.parse().map_err(|e: String| fail(e))?,
        };
        Ok(config)
    }
}
