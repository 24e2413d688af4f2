//! Applying filter banks to full videos and to compressed measurements.
//!
//! The full-data ("oracle") path differences the video and correlates it
//! with each template. The measurement-domain ("smashed") path never sees
//! pixels: for differenced measurement columns Z and a filter slice placed
//! at offset (l, m), the quantity sum_t <Z(n+t), phi H^{l,m,t}> equals
//! sum_t <phi^T Z(n+t), H^{l,m,t}>, so lifting the measurements once with
//! the matrix transpose and running the ordinary correlation produces every
//! offset's compressed correlation in one sweep. No image is ever formed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mach::MachFilter;
use crate::scalar::Scalar;
use crate::sensing::{backproject, CompressedVideo, MeasurementMatrix};
use crate::volume::{
    correlate3, correlate3_spectrum, dft3, temporal_derivative, Provenance, ResponseVolume,
    VideoVolume,
};

/// An ordered set of filters with their action labels.
///
/// Several filters may serve one action (a view-compensated variant, a
/// mirrored variant); `actions` holds the distinct labels in first-seen
/// order and `filter_to_action` maps each filter slot onto that list.
#[derive(Debug, Clone)]
pub struct FilterBank<T: Scalar> {
    filters: Vec<MachFilter<T>>,
    actions: Vec<String>,
    filter_to_action: Vec<usize>,
}

impl<T: Scalar> FilterBank<T> {
    pub fn from_filters(filters: Vec<MachFilter<T>>) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::EmptyInput("filter bank"));
        }
        let mut actions: Vec<String> = Vec::new();
        let mut filter_to_action = Vec::with_capacity(filters.len());
        for f in &filters {
            let idx = match actions.iter().position(|a| a == f.label()) {
                Some(i) => i,
                None => {
                    actions.push(f.label().to_string());
                    actions.len() - 1
                }
            };
            filter_to_action.push(idx);
        }
        Ok(FilterBank {
            filters,
            actions,
            filter_to_action,
        })
    }

    pub fn filters(&self) -> &[MachFilter<T>] {
        &self.filters
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// Distinct action labels in first-appearance order.
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn filter_to_action(&self) -> &[usize] {
        &self.filter_to_action
    }

    pub fn action_of(&self, filter_index: usize) -> &str {
        &self.actions[self.filter_to_action[filter_index]]
    }

    pub fn into_filters(self) -> Vec<MachFilter<T>> {
        self.filters
    }
}

/// Correlation of lifted measurements with a raw template volume. This is
/// the workhorse behind [`smashed_response`]; it only assumes the columns
/// are something worth correlating (differenced or not), so property tests
/// can drive it directly.
pub fn compressed_correlation<T: Scalar>(
    z: &CompressedVideo<T>,
    template: &VideoVolume<T>,
    matrix: &MeasurementMatrix<T>,
) -> Result<ResponseVolume<T>> {
    let lifted = backproject(z, matrix)?;
    let mut response = correlate3(&lifted, template)?;
    response.set_provenance(Provenance::Smashed);
    Ok(response)
}

/// Measurement-domain response of one filter. The measurements must carry
/// exactly one round of temporal differencing, matching the differenced
/// training clips the filter was built from.
pub fn smashed_response<T: Scalar>(
    z: &CompressedVideo<T>,
    filter: &MachFilter<T>,
    matrix: &MeasurementMatrix<T>,
) -> Result<ResponseVolume<T>> {
    if z.derivative_order() != 1 {
        return Err(Error::DerivativeOrder {
            expected: 1,
            got: z.derivative_order(),
        });
    }
    compressed_correlation(z, filter.volume(), matrix)
}

/// Full-data response of one filter: difference the video, correlate.
pub fn oracle_response<T: Scalar>(
    video: &VideoVolume<T>,
    filter: &MachFilter<T>,
) -> Result<ResponseVolume<T>> {
    let derivative = temporal_derivative(video)?;
    let mut response = correlate3(&derivative, filter.volume())?;
    response.set_provenance(Provenance::Oracle);
    Ok(response)
}

/// Measurement-domain responses for a whole bank, in bank order. The
/// measurements are lifted and transformed once, then every filter is
/// correlated against that one spectrum (in parallel; the output order is
/// the bank order regardless of scheduling).
pub fn response_bank<T: Scalar>(
    z: &CompressedVideo<T>,
    bank: &FilterBank<T>,
    matrix: &MeasurementMatrix<T>,
) -> Result<Vec<ResponseVolume<T>>> {
    if z.derivative_order() != 1 {
        return Err(Error::DerivativeOrder {
            expected: 1,
            got: z.derivative_order(),
        });
    }
    let lifted = backproject(z, matrix)?;
    let spectrum = dft3(&lifted);
    bank.filters()
        .par_iter()
        .map(|f| {
            let mut r = correlate3_spectrum(&spectrum, f.volume())?;
            r.set_provenance(Provenance::Smashed);
            Ok(r)
        })
        .collect()
}

/// Full-data responses for a whole bank, in bank order.
pub fn oracle_response_bank<T: Scalar>(
    video: &VideoVolume<T>,
    bank: &FilterBank<T>,
) -> Result<Vec<ResponseVolume<T>>> {
    let derivative = temporal_derivative(video)?;
    let spectrum = dft3(&derivative);
    bank.filters()
        .par_iter()
        .map(|f| correlate3_spectrum(&spectrum, f.volume()))
        .collect()
}
