//! Action recognition straight from compressive camera measurements.
//!
//! A simulated single-pixel camera reduces every P x Q frame to K random
//! projections (K far below the pixel count). This crate answers "what is
//! happening, and where" without ever rebuilding images from those
//! measurements: correlation-filter responses survive random projection
//! with an error that shrinks like 1/sqrt(K), so matching can run in the
//! measurement domain directly.
//!
//! The pieces, in pipeline order:
//!
//! * [`volume`]: dense video volumes, 3D spectra, and valid-region
//!   cross-correlation (FFT-backed, with a literal-sum oracle in tests).
//! * [`sensing`]: seeded measurement matrices, frame compression with
//!   optional sensor noise, temporal differencing of measurement streams,
//!   and an empirical check of how well projections preserve inner
//!   products.
//! * [`mach`]: composite correlation filters synthesized from example
//!   clips in the frequency domain.
//! * [`view`]: affine viewpoint maps and filter compensation, so a filter
//!   built in one view can serve another.
//! * [`engine`]: the response pipeline tying the above together, for both
//!   the measurement-domain path and the uncompressed oracle path.
//! * [`features`], [`svm`], [`localize`]: response volumes to feature
//!   vectors, class decisions, and per-frame bounding boxes.
//! * [`synthetic`]: seeded toy footage for end-to-end tests.
//! * [`rng`]: the fixed-contract generator behind every seeded draw.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below pin the common choices. Seeded operations are bit-reproducible
//! across runs and platforms.

pub mod engine;
pub mod error;
pub mod features;
pub mod localize;
pub mod mach;
pub mod rng;
pub mod scalar;
pub mod sensing;
pub mod svm;
pub mod synthetic;
pub mod view;
pub mod volume;

pub use engine::{
    compressed_correlation, oracle_response, oracle_response_bank, response_bank,
    smashed_response, FilterBank,
};
pub use error::{Error, Result};
pub use features::{feature_vector, max_pool_features, psr_features, FeatureVector};
pub use localize::{center_error, locate_frame, locate_video, BoundingBox, BoxMode};
pub use mach::{spectra_stats, synthesize, MachFilter, SpectraStats, ViewTag};
pub use scalar::Scalar;
pub use sensing::{
    backproject, compress, compressed_temporal_derivative, jl_report, measurement_count,
    CompressedVideo, Distribution, JlReport, MatrixId, MeasurementMatrix, PairKind,
};
pub use svm::{classify_peak_psr, train_svm, SvmHyperparams, SvmModel};
pub use view::{compensate, flip_horizontal, warp_volume, AffineView};
pub use volume::{
    correlate3, correlate3_spectrum, dft3, idft3, temporal_derivative, Provenance,
    ResponseVolume, Spectrum3, VideoVolume,
};

/// Default-precision aliases; the `32` variants trade accuracy for size.
pub type Volume = VideoVolume<f64>;
pub type Volume32 = VideoVolume<f32>;
pub type Response = ResponseVolume<f64>;
pub type Response32 = ResponseVolume<f32>;
pub type Filter = MachFilter<f64>;
pub type Filter32 = MachFilter<f32>;
pub type Matrix = MeasurementMatrix<f64>;
pub type Matrix32 = MeasurementMatrix<f32>;
pub type Compressed = CompressedVideo<f64>;
pub type Compressed32 = CompressedVideo<f32>;
pub type Bank = FilterBank<f64>;
pub type Features = FeatureVector<f64>;
