//! Frequency × polarization sweeps, detector reduction, and the calibration
//! sensing matrix Φ_f.
//!
//! A measurement takes the scattered field on every point of the detection
//! line and projects its tangential part onto the detector's polarization
//! axis. It then reduces the projections along the line:
//!
//! * intensity: mean of magnitudes (an envelope detector),
//! * phase: circular mean of phases,
//! * complex: arithmetic mean of the complex values.
//!
//! Φ_f has one row per frequency and one column per calibration angle.
//! Column `k` is exactly the measurement vector of angle `k`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::array_field::{
    sampling_points, scattered_field, ArrayGeometry, FieldSample, IncidentWave, SamplingGeometry, Vec3,
};
use crate::linalg::Matrix;
use crate::math::{atan2, axis_difference_deg, cos_sin_deg};
use crate::scatter_model::MetaAtomModel;
use crate::{Error, Result};

/// Uniform frequency sweep with inclusive endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub start_ghz: f64,
    pub stop_ghz: f64,
    values: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(start_ghz: f64, stop_ghz: f64, n_points: usize) -> Result<Self> {
        if !(start_ghz > 0.0 && start_ghz.is_finite() && stop_ghz.is_finite()) {
            return Err(Error::invalid("frequency grid", "frequencies must be positive"));
        }
        if stop_ghz < start_ghz {
            return Err(Error::invalid("frequency grid", "stop must not precede start"));
        }
        if n_points == 0 {
            return Err(Error::invalid("frequency grid", "at least one frequency is required"));
        }
        if n_points == 1 && stop_ghz != start_ghz {
            return Err(Error::invalid("frequency grid", "a single point needs start == stop"));
        }
        Ok(Self {
            start_ghz,
            stop_ghz,
            values: uniform(start_ghz, stop_ghz, n_points),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the grid point closest to `f_ghz`.
    pub fn nearest_index(&self, f_ghz: f64) -> usize {
        nearest(&self.values, f_ghz)
    }
}

impl Default for FrequencyGrid {
    /// 9–11 GHz in 21 points.
    fn default() -> Self {
        Self::new(9.0, 11.0, 21).expect("valid default grid")
    }
}

/// Uniform grid of calibration polarization angles with inclusive endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    pub min_deg: f64,
    pub max_deg: f64,
    values: Vec<f64>,
}

impl AngleGrid {
    pub fn new(min_deg: f64, max_deg: f64, n_angles: usize) -> Result<Self> {
        if !(min_deg.is_finite() && max_deg.is_finite()) || max_deg < min_deg {
            return Err(Error::invalid("angle grid", "need finite min <= max"));
        }
        if n_angles == 0 {
            return Err(Error::invalid("angle grid", "at least one angle is required"));
        }
        if n_angles == 1 && max_deg != min_deg {
            return Err(Error::invalid("angle grid", "a single angle needs min == max"));
        }
        Ok(Self {
            min_deg,
            max_deg,
            values: uniform(min_deg, max_deg, n_angles),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Other grid indices describing the same polarization axis as `index`
    /// (angles that differ by a multiple of 180°, such as -90° and +90°).
    pub fn equivalent_indices(&self, index: usize) -> Vec<usize> {
        let a = self.values[index];
        (0..self.values.len())
            .filter(|&j| j != index && axis_difference_deg(self.values[j], a).abs() < 1e-9)
            .collect()
    }

    /// Lowest index of the equivalence class containing `index`.
    pub fn class_of(&self, index: usize) -> usize {
        (0..=index)
            .find(|&j| axis_difference_deg(self.values[j], self.values[index]).abs() < 1e-9)
            .unwrap_or(index)
    }

    /// Grid index whose polarization axis is closest to `angle_deg`.
    pub fn nearest_index(&self, angle_deg: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            let d = axis_difference_deg(v, angle_deg).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}

impl Default for AngleGrid {
    /// -90°…+90° in 19 steps of 10°.
    fn default() -> Self {
        Self::new(-90.0, 90.0, 19).expect("valid default grid")
    }
}

fn uniform(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![start];
    }
    // Weighted form keeps whole-number grids exact and the endpoints bit-exact.
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64;
            (start * (last - t) + stop * t) / last
        })
        .collect()
}

fn nearest(values: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if (v - x).abs() < (values[best] - x).abs() {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectionMode {
    #[default]
    Intensity,
    Phase,
    Complex,
}

impl DetectionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetectionMode::Intensity => "intensity",
            DetectionMode::Phase => "phase",
            DetectionMode::Complex => "complex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "intensity" => Some(DetectionMode::Intensity),
            "phase" => Some(DetectionMode::Phase),
            "complex" => Some(DetectionMode::Complex),
            _ => None,
        }
    }
}

/// A linearly polarized receiving antenna facing the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    /// Unit tangential polarization axis `(a_x, a_y)`.
    pub axis: [f64; 2],
    pub mode: DetectionMode,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self {
            axis: [1.0, 0.0],
            mode: DetectionMode::Intensity,
        }
    }
}

impl DetectorSpec {
    pub fn new(axis: [f64; 2], mode: DetectionMode) -> Result<Self> {
        let norm2 = axis[0] * axis[0] + axis[1] * axis[1];
        if !((norm2 - 1.0).abs() <= 1e-12) {
            return Err(Error::invalid("detector", "polarization axis must be a unit vector"));
        }
        Ok(Self { axis, mode })
    }

    /// Detector whose axis makes `angle_deg` with the x-axis.
    pub fn from_angle_deg(angle_deg: f64, mode: DetectionMode) -> Self {
        let (c, s) = cos_sin_deg(angle_deg);
        Self { axis: [c, s], mode }
    }

    /// Tangential projection of a field sample; E_z is not seen by the antenna.
    pub fn project(&self, sample: &FieldSample) -> Complex64 {
        sample.e_x * self.axis[0] + sample.e_y * self.axis[1]
    }

    /// Reduces the projections along the detection line to one value.
    pub fn reduce(&self, samples: &[FieldSample]) -> (f64, Option<Complex64>) {
        let n = samples.len() as f64;
        match self.mode {
            DetectionMode::Intensity => {
                let sum: f64 = samples.iter().map(|s| self.project(s).norm()).sum();
                (sum / n, None)
            }
            DetectionMode::Phase => (circular_mean(samples.iter().map(|s| self.project(s))), None),
            DetectionMode::Complex => {
                let sum: Complex64 = samples.iter().map(|s| self.project(s)).sum();
                let mean = sum / n;
                (mean.norm(), Some(mean))
            }
        }
    }
}

/// Direction of the summed unit phasors; 0 when they cancel.
fn circular_mean(values: impl Iterator<Item = Complex64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for v in values {
        let phase = v.arg();
        s += libm::sin(phase);
        c += libm::cos(phase);
    }
    atan2(s, c)
}

/// Detector output over a frequency list for one incident polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    /// One entry per frequency (magnitude of the complex mean in complex mode).
    pub values: Vec<f64>,
    /// Complex means, present only in complex mode.
    pub complex: Option<Vec<Complex64>>,
    pub theta_deg: f64,
    pub detector: DetectorSpec,
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * alpha).collect(),
            complex: self.complex.as_ref().map(|c| c.iter().map(|v| v * alpha).collect()),
            ..self.clone()
        }
    }
}

/// One row of a component sweep: mean magnitude and circular-mean phase of
/// each Cartesian field component along the detection line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentRow {
    pub theta_deg: f64,
    pub freq_ghz: f64,
    pub magnitude: [f64; 3],
    pub phase_rad: [f64; 3],
}

/// 64-bit FNV-1a digest of everything that shapes a sensing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    fn hasher() -> FnvHasher {
        FnvHasher(Self::OFFSET)
    }

    /// Digest of a row subset of the matrix this fingerprint describes.
    pub fn with_rows(&self, rows: &[usize]) -> Self {
        let mut h = Self::hasher();
        h.u64(self.0);
        h.u64(rows.len() as u64);
        for &r in rows {
            h.u64(r as u64);
        }
        Fingerprint(h.0)
    }
}

impl core::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

struct FnvHasher(u64);

impl FnvHasher {
    fn bytes(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(Fingerprint::PRIME);
        }
    }

    fn f64(&mut self, v: f64) {
        self.bytes(&v.to_bits().to_le_bytes());
    }

    fn f64s(&mut self, vs: &[f64]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.f64(v);
        }
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
}

/// Everything about the physical setup except what is swept: the array, the
/// meta-atom model, the detection line and the incident amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub array: ArrayGeometry,
    pub model: MetaAtomModel,
    pub sampling: SamplingGeometry,
    pub amplitude: f64,
}

impl Scene {
    pub fn new(array: ArrayGeometry, model: MetaAtomModel, sampling: SamplingGeometry) -> Self {
        Self {
            array,
            model,
            sampling,
            amplitude: 1.0,
        }
    }

    /// Scattered field on the detection line.
    pub fn line_field(&self, theta_deg: f64, f_ghz: f64) -> Result<Vec<FieldSample>> {
        self.line_field_at(&sampling_points(&self.sampling), theta_deg, f_ghz)
    }

    fn line_field_at(&self, points: &[Vec3], theta_deg: f64, f_ghz: f64) -> Result<Vec<FieldSample>> {
        let wave = IncidentWave::new(theta_deg, self.amplitude);
        scattered_field(&self.array, &self.model, &wave, f_ghz, points)
    }

    /// Detector output at each frequency for incident polarization `theta_deg`.
    pub fn sense_vector(&self, theta_deg: f64, freqs: &[f64], detector: &DetectorSpec) -> Result<MeasurementVector> {
        self.sampling.validate()?;
        let points = sampling_points(&self.sampling);
        let mut values = Vec::with_capacity(freqs.len());
        let mut complex = Vec::new();
        for &f in freqs {
            let field = self.line_field_at(&points, theta_deg, f)?;
            let (v, c) = detector.reduce(&field);
            values.push(v);
            if let Some(c) = c {
                complex.push(c);
            }
        }
        Ok(MeasurementVector {
            values,
            complex: (detector.mode == DetectionMode::Complex).then_some(complex),
            theta_deg,
            detector: *detector,
        })
    }

    /// Mean magnitude and phase of E_x, E_y, E_z for every (angle, frequency)
    /// pair, angle-major.
    pub fn component_sweep(&self, angles: &AngleGrid, freqs: &FrequencyGrid) -> Result<Vec<ComponentRow>> {
        self.sampling.validate()?;
        let points = sampling_points(&self.sampling);
        let n = points.len() as f64;
        let mut rows = Vec::with_capacity(angles.len() * freqs.len());
        for &theta in angles.values() {
            for &f in freqs.values() {
                let field = self.line_field_at(&points, theta, f)?;
                let mut magnitude = [0.0; 3];
                let mut phase_rad = [0.0; 3];
                for (i, (m, p)) in magnitude.iter_mut().zip(phase_rad.iter_mut()).enumerate() {
                    *m = field.iter().map(|s| s.components()[i].norm()).sum::<f64>() / n;
                    *p = circular_mean(field.iter().map(|s| s.components()[i]));
                }
                rows.push(ComponentRow {
                    theta_deg: theta,
                    freq_ghz: f,
                    magnitude,
                    phase_rad,
                });
            }
        }
        Ok(rows)
    }

    /// Φ_f: column `k` is `sense_vector(angles[k])`.
    pub fn build_sensing_matrix(
        &self,
        angles: &AngleGrid,
        freqs: &FrequencyGrid,
        detector: &DetectorSpec,
    ) -> Result<SensingMatrix> {
        let columns = angles
            .values()
            .iter()
            .map(|&theta| self.sense_vector(theta, freqs.values(), detector))
            .collect::<Result<Vec<_>>>()?;
        let (rows, cols) = (freqs.len(), angles.len());
        let mut data = alloc::vec![0.0; rows * cols];
        for (k, col) in columns.iter().enumerate() {
            for (r, v) in col.values.iter().enumerate() {
                data[r * cols + k] = *v;
            }
        }
        Ok(SensingMatrix {
            rows,
            cols,
            data,
            frequencies_ghz: freqs.values().to_vec(),
            angles: angles.clone(),
            detector: *detector,
            fingerprint: self.fingerprint(angles, freqs, detector),
        })
    }

    /// Digest of the scene, grids and detector.
    pub fn fingerprint(&self, angles: &AngleGrid, freqs: &FrequencyGrid, detector: &DetectorSpec) -> Fingerprint {
        let mut h = Fingerprint::hasher();
        let m = &self.model;
        for mode in [&m.x_mode, &m.y_mode] {
            h.f64(mode.resonant_frequency_ghz);
            h.f64(mode.half_linewidth_ghz);
            h.f64(mode.loss_fraction);
        }
        h.f64(m.cross_coupling.re);
        h.f64(m.cross_coupling.im);
        h.f64(m.cross_resonance_ghz);
        h.f64(m.cross_linewidth_ghz);
        h.u64(self.array.n_rows as u64);
        h.u64(self.array.n_cols as u64);
        h.f64(self.array.pitch_mm);
        h.f64s(&self.array.element_rotations_deg);
        h.f64(self.sampling.height_mm);
        h.f64s(&self.sampling.line_axis);
        h.f64(self.sampling.half_span_mm);
        h.u64(self.sampling.n_points as u64);
        h.f64(self.amplitude);
        h.f64s(freqs.values());
        h.f64s(angles.values());
        h.f64s(&detector.axis);
        h.bytes(detector.mode.as_str().as_bytes());
        Fingerprint(h.0)
    }
}

/// Calibration matrix Φ_f (frequencies × angles), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    pub frequencies_ghz: Vec<f64>,
    pub angles: AngleGrid,
    pub detector: DetectorSpec,
    pub fingerprint: Fingerprint,
}

impl SensingMatrix {
    pub fn from_parts(
        data: Vec<f64>,
        frequencies_ghz: Vec<f64>,
        angles: AngleGrid,
        detector: DetectorSpec,
        fingerprint: Fingerprint,
    ) -> Result<Self> {
        let (rows, cols) = (frequencies_ghz.len(), angles.len());
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            rows,
            cols,
            data,
            frequencies_ghz,
            angles,
            detector,
            fingerprint,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matrix(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }

    /// Column `col` as a measurement vector, as if sensed at that angle.
    pub fn column_measurement(&self, col: usize) -> MeasurementVector {
        MeasurementVector {
            values: self.column(col),
            complex: None,
            theta_deg: self.angles.values()[col],
            detector: self.detector,
        }
    }

    pub fn matches(&self, fingerprint: Fingerprint) -> bool {
        self.fingerprint == fingerprint
    }
}

/// Adds zero-mean Gaussian noise with standard deviation `sigma·|mean entry|`.
///
/// Deterministic for a given seed. Intensities are clamped at zero; in
/// complex mode the noise goes on the real and imaginary parts of each complex
/// mean (σ/√2 each) and magnitudes are recomputed.
pub fn add_noise(v: &MeasurementVector, sigma: f64, seed: u64) -> Result<MeasurementVector> {
    if !(sigma >= 0.0) {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma == 0.0 || v.values.is_empty() {
        return Ok(v.clone());
    }
    let mean = v.values.iter().sum::<f64>() / v.values.len() as f64;
    let scale = sigma * mean.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 {
        let z: f64 = StandardNormal.sample(&mut rng);
        z * scale
    };

    let mut out = v.clone();
    match (v.detector.mode, out.complex.as_mut()) {
        (DetectionMode::Complex, Some(complex)) => {
            let s = core::f64::consts::FRAC_1_SQRT_2;
            for (c, val) in complex.iter_mut().zip(out.values.iter_mut()) {
                *c += Complex64::new(draw() * s, draw() * s);
                *val = c.norm();
            }
        }
        (mode, _) => {
            for val in out.values.iter_mut() {
                *val += draw();
                if mode == DetectionMode::Intensity && *val < 0.0 {
                    *val = 0.0;
                }
            }
        }
    }
    Ok(out)
}
