//! Quantities extracted from simulated states.

mod distribution;
mod envelope;
mod fidelity;
mod peaks;
mod wigner;

pub use distribution::{number_distribution, number_distribution_density, DensityMode, NumberDistribution};
pub use envelope::{predicted_spacing, sinc_envelope};
pub use fidelity::{
    fidelity, fidelity_mixed, purity, purity_estimate, trace_distance_to_coherent,
};
pub use peaks::{detect_peaks, is_local_max, is_local_min, PeakReport, DEFAULT_PEAK_THRESHOLD};
pub use wigner::{quadrant_weights, sector_integrals, wigner, wigner_from_density, GridSpec, WignerGrid};
