//! Scalar abstraction for the numeric core.
//!
//! Every volume, filter, and matrix is generic over [`Scalar`] so the same
//! code runs in f32 or f64. The FFT backend constrains the set of usable
//! types to exactly those two, which is also what the on-disk formats can
//! represent (bulk data is stored as f32, parameters as f64).

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the library.
///
/// The supertraits pull in everything the numeric kernels need: `Float` for
/// arithmetic and transcendentals, the cast traits for moving through f64
/// (the deterministic generator produces f64 draws regardless of `T`), and
/// `rustfft::FftNum` so spectra can be taken without copying into a wider
/// buffer first.
///
/// The conversion helpers carry names that do not collide with the
/// `FromPrimitive`/`ToPrimitive` methods, so call sites stay unambiguous.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + rustfft::FftNum {
    /// Conversion from an f64 produced by the deterministic generator or by
    /// parameter parsing. Saturation can't occur for the magnitudes this
    /// library produces, so the unwrap is safe by construction.
    fn of_f64(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 -> Scalar conversion")
    }

    /// Widen to f64 for accumulation, statistics, and serialization.
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("Scalar -> f64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
