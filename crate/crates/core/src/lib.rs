//! Simulation and retrieval core for a passive, polarization-sensitive
//! metasurface reflector.
//!
//! The crate is `no_std` (with `alloc`). It covers four stages:
//!
//! * [`scatter_model`]: a resonant surrogate for the meta-atom, giving a
//!   frequency-dependent 2×2 reflection (Jones) matrix per element.
//! * [`array_field`]: the reflector array and the scattered vector field,
//!   built by superposing one radiating dipole per element.
//! * [`sensing`]: frequency × polarization sweeps reduced to detector
//!   measurements, and the calibration sensing matrix Φ_f built from them.
//! * [`estimator`]: minimum-norm least-squares retrieval of the incident
//!   polarization angle, power sharpening, and SVD diagnostics.
//!
//! Units: frequencies in GHz, lengths in mm, angles in degrees.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod array_field;
mod error;
pub mod estimator;
pub mod linalg;
pub mod math;
pub mod scatter_model;
pub mod sensing;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use array_field::{
    build_array, dipole_field, element_moment, far_field_boundary, incident_field, sampling_points, scattered_field,
    ArrayGeometry, FieldSample, IncidentWave, SamplingGeometry, Vec3, SPEED_OF_LIGHT_MM_GHZ,
};
pub use estimator::{
    detect, frequency_ablation, least_squares, majority_class, sharpen, svd_spectrum, EstimateResult, Estimator,
    PreparedEstimator, SvdSpectrum, DEFAULT_RANK_CUTOFF,
};
pub use scatter_model::{
    conversion_parameter, jones_reflectance, rotate_jones, Axis, JonesMatrix, MetaAtomGeometry, MetaAtomModel,
    ResonanceMode,
};
pub use sensing::{
    add_noise, AngleGrid, ComponentRow, DetectionMode, DetectorSpec, Fingerprint, FrequencyGrid, MeasurementVector,
    Scene, SensingMatrix,
};
