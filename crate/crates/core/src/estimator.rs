//! Inverse problem `s = Φ_f·θ`: minimum-norm least squares, sharpening,
//! peak detection and singular-value diagnostics.

use alloc::vec::Vec;

use crate::linalg::{pseudo_inverse, singular_values, Matrix};
use crate::sensing::{AngleGrid, MeasurementVector, SensingMatrix};
use crate::{Error, Result};

/// Singular values below this fraction of σ₁ are discarded by the solver.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimator {
    pub sharpen_exponent: u32,
    pub rank_cutoff: f64,
}

impl Default for Estimator {
    fn default() -> Self {
        Self {
            sharpen_exponent: 2,
            rank_cutoff: DEFAULT_RANK_CUTOFF,
        }
    }
}

impl Estimator {
    pub fn new(sharpen_exponent: u32, rank_cutoff: f64) -> Result<Self> {
        if sharpen_exponent == 0 {
            return Err(Error::ZeroExponent);
        }
        if !(0.0..1.0).contains(&rank_cutoff) {
            return Err(Error::invalid("rank_cutoff", "must lie in [0, 1)"));
        }
        Ok(Self {
            sharpen_exponent,
            rank_cutoff,
        })
    }

    /// Factorizes Φ once for repeated solves against it.
    pub fn prepare(&self, phi: &SensingMatrix) -> Result<PreparedEstimator> {
        Ok(PreparedEstimator {
            pinv: pseudo_inverse(&phi.matrix(), self.rank_cutoff)?,
            angles: phi.angles.clone(),
            rows: phi.shape().0,
            sharpen_exponent: self.sharpen_exponent,
        })
    }

    pub fn least_squares(&self, phi: &SensingMatrix, s: &MeasurementVector) -> Result<Vec<f64>> {
        self.prepare(phi)?.least_squares(s)
    }

    pub fn detect(&self, phi: &SensingMatrix, s: &MeasurementVector) -> Result<EstimateResult> {
        self.prepare(phi)?.detect(s)
    }
}

/// An estimator bound to one sensing matrix through its pseudoinverse.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedEstimator {
    pinv: Matrix,
    angles: AngleGrid,
    rows: usize,
    sharpen_exponent: u32,
}

impl PreparedEstimator {
    pub fn least_squares(&self, s: &MeasurementVector) -> Result<Vec<f64>> {
        if s.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: s.len(),
            });
        }
        Ok(self.pinv.mul_vec(&s.values))
    }

    pub fn detect(&self, s: &MeasurementVector) -> Result<EstimateResult> {
        let theta_hat = self.least_squares(s)?;
        let sharpened = sharpen(&theta_hat, self.sharpen_exponent)?;
        Ok(EstimateResult::from_sharpened(
            theta_hat,
            sharpened,
            self.sharpen_exponent,
            &self.angles,
        ))
    }
}

/// Outcome of one detection.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub theta_hat: Vec<f64>,
    /// `|θ̂|^n` normalized to a maximum of 1.
    pub sharpened: Vec<f64>,
    pub exponent: u32,
    pub detected_index: usize,
    pub detected_angle_deg: f64,
    /// Peak over the largest entry outside the peak's equivalence class.
    pub confidence: f64,
    /// Grid indices physically equivalent to the detected one, itself included.
    pub equivalent_indices: Vec<usize>,
}

impl EstimateResult {
    fn from_sharpened(theta_hat: Vec<f64>, sharpened: Vec<f64>, exponent: u32, angles: &AngleGrid) -> Self {
        let mut detected_index = 0;
        for (i, v) in sharpened.iter().enumerate() {
            if *v > sharpened[detected_index] {
                detected_index = i;
            }
        }
        let mut equivalent_indices = angles.equivalent_indices(detected_index);
        equivalent_indices.push(detected_index);
        equivalent_indices.sort_unstable();

        let peak = sharpened[detected_index];
        let second = sharpened
            .iter()
            .enumerate()
            .filter(|(i, _)| !equivalent_indices.contains(i))
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        let confidence = if peak == 0.0 {
            1.0
        } else if second == 0.0 {
            f64::INFINITY
        } else {
            peak / second
        };
        Self {
            theta_hat,
            sharpened,
            exponent,
            detected_index,
            detected_angle_deg: angles.values()[detected_index],
            confidence,
            equivalent_indices,
        }
    }

    /// True when `true_index` names the same physical polarization as the peak.
    pub fn detects(&self, true_index: usize) -> bool {
        self.equivalent_indices.contains(&true_index)
    }
}

pub fn least_squares(phi: &SensingMatrix, s: &MeasurementVector) -> Result<Vec<f64>> {
    Estimator::default().least_squares(phi, s)
}

/// `|θ̂_i|^n` divided by the maximum; the zero vector stays zero.
pub fn sharpen(theta_hat: &[f64], n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroExponent);
    }
    let powered: Vec<f64> = theta_hat.iter().map(|v| libm::pow(v.abs(), f64::from(n))).collect();
    let max = powered.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(powered);
    }
    Ok(powered.into_iter().map(|v| v / max).collect())
}

pub fn detect(phi: &SensingMatrix, s: &MeasurementVector, n: u32) -> Result<EstimateResult> {
    Estimator::new(n, DEFAULT_RANK_CUTOFF)?.detect(phi, s)
}

/// Nonincreasing singular values of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdSpectrum {
    pub singular_values: Vec<f64>,
}

impl SvdSpectrum {
    /// Number of singular values at or above `tau·σ₁`.
    pub fn effective_rank(&self, tau: f64) -> usize {
        let Some(&s1) = self.singular_values.first() else {
            return 0;
        };
        if s1 == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|s| **s >= tau * s1).count()
    }
}

pub fn svd_spectrum(m: &Matrix) -> Result<SvdSpectrum> {
    Ok(SvdSpectrum {
        singular_values: singular_values(m)?,
    })
}

/// Keeps only the listed frequency rows, in the given order.
pub fn frequency_ablation(phi: &SensingMatrix, keep: &[usize]) -> Result<SensingMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let (rows, _) = phi.shape();
    if let Some(&index) = keep.iter().find(|&&i| i >= rows) {
        return Err(Error::IndexOutOfRange { index, rows });
    }
    if keep.len() == rows && keep.iter().enumerate().all(|(i, k)| i == *k) {
        return Ok(phi.clone());
    }
    let data = keep.iter().flat_map(|&r| phi.row(r).iter().copied()).collect();
    let freqs = keep.iter().map(|&r| phi.frequencies_ghz[r]).collect();
    SensingMatrix::from_parts(
        data,
        freqs,
        phi.angles.clone(),
        phi.detector,
        phi.fingerprint.with_rows(keep),
    )
}

/// Most frequent equivalence class among detected indices; ties go to the
/// lowest class. Returns the class representative (lowest grid index).
pub fn majority_class(detected: &[usize], angles: &AngleGrid) -> Option<usize> {
    let mut counts = alloc::vec![0usize; angles.len()];
    for &d in detected {
        counts[angles.class_of(d)] += 1;
    }
    let mut best: Option<usize> = None;
    for (class, &c) in counts.iter().enumerate() {
        if c > 0 && best.is_none_or(|b| c > counts[b]) {
            best = Some(class);
        }
    }
    best
}
