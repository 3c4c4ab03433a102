//! Reflector array geometry and the scattered vector field.
//!
//! Every element re-radiates as an infinitesimal electric dipole whose moment
//! is its local Jones response applied to the incident tangential field. The
//! ground plane is already folded into the Jones matrix, so no image term is
//! added, and elements do not couple to each other.
//!
//! Field amplitudes use units with `1/(4πε₀) = 1`, lengths in mm and
//! an `exp(jωt)` time convention (outgoing waves carry `exp(-jkr)`).

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{cos_sin_deg, sqrt, PI};
use crate::scatter_model::{jones_reflectance, rotate_jones, JonesMatrix, MetaAtomModel};
use crate::{Error, Result};

/// Speed of light in mm·GHz.
pub const SPEED_OF_LIGHT_MM_GHZ: f64 = 299.792_458;

pub type Vec3 = [f64; 3];

pub fn wavelength_mm(f_ghz: f64) -> f64 {
    SPEED_OF_LIGHT_MM_GHZ / f_ghz
}

pub fn wavenumber_per_mm(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz / SPEED_OF_LIGHT_MM_GHZ
}

/// Rectangular lattice of meta-atoms in the z = 0 plane, centered on the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub n_rows: usize,
    pub n_cols: usize,
    pub pitch_mm: f64,
    /// Row-major: row index runs along y, column index along x.
    pub element_positions: Vec<Vec3>,
    pub element_rotations_deg: Vec<f64>,
    pub rotation_seed: Option<u64>,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.element_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_positions.is_empty()
    }

    /// Diagonal of the physical aperture (lattice extent plus one pitch).
    pub fn aperture_diagonal_mm(&self) -> f64 {
        let wx = self.n_cols as f64 * self.pitch_mm;
        let wy = self.n_rows as f64 * self.pitch_mm;
        sqrt(wx * wx + wy * wy)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.element_rotations_deg.iter().all(|&r| r == 0.0)
    }
}

/// Builds a centered `n_rows × n_cols` lattice.
///
/// Without a seed all elements share one orientation. With a seed, each
/// element gets an in-plane rotation drawn uniformly from
/// `[-rotation_max_deg, rotation_max_deg]` by a ChaCha8 stream.
pub fn build_array(
    n_rows: usize,
    n_cols: usize,
    pitch_mm: f64,
    rotation_seed: Option<u64>,
    rotation_max_deg: f64,
) -> Result<ArrayGeometry> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::invalid("array", "rows and columns must be at least 1"));
    }
    if !(pitch_mm > 0.0 && pitch_mm.is_finite()) {
        return Err(Error::invalid("array", "pitch must be positive"));
    }
    if rotation_seed.is_some() && !(rotation_max_deg >= 0.0 && rotation_max_deg.is_finite()) {
        return Err(Error::invalid("array", "rotation range must be non-negative"));
    }

    let x0 = (n_cols as f64 - 1.0) / 2.0;
    let y0 = (n_rows as f64 - 1.0) / 2.0;
    let mut positions = Vec::with_capacity(n_rows * n_cols);
    for row in 0..n_rows {
        for col in 0..n_cols {
            positions.push([(col as f64 - x0) * pitch_mm, (row as f64 - y0) * pitch_mm, 0.0]);
        }
    }

    let rotations = match rotation_seed {
        Some(seed) if rotation_max_deg > 0.0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..positions.len())
                .map(|_| rng.random_range(-rotation_max_deg..=rotation_max_deg))
                .collect()
        }
        _ => alloc::vec![0.0; positions.len()],
    };

    Ok(ArrayGeometry {
        n_rows,
        n_cols,
        pitch_mm,
        element_positions: positions,
        element_rotations_deg: rotations,
        rotation_seed,
    })
}

/// A straight detection line above the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGeometry {
    pub height_mm: f64,
    /// Horizontal unit vector along which the line runs.
    pub line_axis: Vec3,
    pub half_span_mm: f64,
    pub n_points: usize,
}

impl Default for SamplingGeometry {
    fn default() -> Self {
        Self {
            height_mm: 65.0,
            line_axis: [1.0, 0.0, 0.0],
            half_span_mm: 10.8,
            n_points: 101,
        }
    }
}

impl SamplingGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.height_mm > 0.0 && self.height_mm.is_finite()) {
            return Err(Error::invalid("sampling", "height must be positive"));
        }
        if self.n_points == 0 {
            return Err(Error::invalid("sampling", "at least one sample point is required"));
        }
        if !(self.half_span_mm >= 0.0 && self.half_span_mm.is_finite()) {
            return Err(Error::invalid("sampling", "half span must be non-negative"));
        }
        let [ax, ay, az] = self.line_axis;
        if az != 0.0 {
            return Err(Error::invalid("sampling", "line axis must be horizontal"));
        }
        if ((ax * ax + ay * ay) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("sampling", "line axis must be a unit vector"));
        }
        Ok(())
    }
}

/// Uniformly spaced points `t·axis + (0, 0, height)` with `t` spanning
/// `[-half_span, half_span]`; a single point sits at `(0, 0, height)`.
pub fn sampling_points(s: &SamplingGeometry) -> Vec<Vec3> {
    if s.n_points <= 1 {
        return alloc::vec![[0.0, 0.0, s.height_mm]];
    }
    let last = (s.n_points - 1) as f64;
    (0..s.n_points)
        .map(|k| {
            let t = -s.half_span_mm + 2.0 * s.half_span_mm * (k as f64 / last);
            [t * s.line_axis[0], t * s.line_axis[1], s.height_mm]
        })
        .collect()
}

/// Complex field vector at one observation point and one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e_x: Complex64,
    pub e_y: Complex64,
    pub e_z: Complex64,
}

impl FieldSample {
    pub const ZERO: FieldSample = FieldSample {
        e_x: Complex64::new(0.0, 0.0),
        e_y: Complex64::new(0.0, 0.0),
        e_z: Complex64::new(0.0, 0.0),
    };

    pub fn components(&self) -> [Complex64; 3] {
        [self.e_x, self.e_y, self.e_z]
    }

    pub fn tangential(&self) -> [Complex64; 2] {
        [self.e_x, self.e_y]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.e_x.norm_sqr() + self.e_y.norm_sqr() + self.e_z.norm_sqr())
    }
}

impl core::ops::Add for FieldSample {
    type Output = FieldSample;

    fn add(self, rhs: FieldSample) -> FieldSample {
        FieldSample {
            e_x: self.e_x + rhs.e_x,
            e_y: self.e_y + rhs.e_y,
            e_z: self.e_z + rhs.e_z,
        }
    }
}

/// Normally incident, linearly polarized plane wave travelling along -z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    /// Polarization angle from the x-axis.
    pub theta_deg: f64,
    pub amplitude: f64,
}

impl IncidentWave {
    pub const PROPAGATION: Vec3 = [0.0, 0.0, -1.0];

    pub fn new(theta_deg: f64, amplitude: f64) -> Self {
        Self { theta_deg, amplitude }
    }
}

/// Tangential incident field `amplitude·(cos θ_p, sin θ_p)` at the array plane.
pub fn incident_field(wave: &IncidentWave) -> [Complex64; 2] {
    let (c, s) = cos_sin_deg(wave.theta_deg);
    [
        Complex64::new(wave.amplitude * c, 0.0),
        Complex64::new(wave.amplitude * s, 0.0),
    ]
}

/// Equivalent dipole moment of one element: its rotated Jones matrix applied
/// to the incident tangential field, with no z-part.
pub fn element_moment(j: &JonesMatrix, rotation_deg: f64, e_tan: [Complex64; 2]) -> [Complex64; 3] {
    let local = if rotation_deg == 0.0 {
        *j
    } else {
        rotate_jones(j, rotation_deg)
    };
    let [mx, my] = local.apply(e_tan);
    [mx, my, Complex64::new(0.0, 0.0)]
}

/// Full field of an electric dipole in free space (radiative, induction and
/// quasi-static terms):
///
/// ```text
/// E = e^{-jkr} [ k²/r (p - n(n·p)) + (1/r³ + jk/r²)(3n(n·p) - p) ]
/// ```
pub fn dipole_field(moment: [Complex64; 3], source: Vec3, obs: Vec3, f_ghz: f64) -> Result<FieldSample> {
    let d = [obs[0] - source[0], obs[1] - source[1], obs[2] - source[2]];
    let r = sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if !(r > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    if !(f_ghz > 0.0 && f_ghz.is_finite()) {
        return Err(Error::NonPositiveFrequency(f_ghz));
    }
    let k = wavenumber_per_mm(f_ghz);
    let n = [d[0] / r, d[1] / r, d[2] / r];
    let n_dot_p = moment[0] * n[0] + moment[1] * n[1] + moment[2] * n[2];

    let phase = Complex64::new(0.0, -k * r).exp();
    let radiative = k * k / r;
    let near = Complex64::new(1.0 / (r * r * r), k / (r * r));

    let comp = |i: usize| {
        let transverse = moment[i] - n_dot_p * n[i];
        let quasi = n_dot_p * (3.0 * n[i]) - moment[i];
        phase * (transverse * radiative + near * quasi)
    };
    Ok(FieldSample {
        e_x: comp(0),
        e_y: comp(1),
        e_z: comp(2),
    })
}

/// Coherent sum of all element fields at each observation point.
///
/// Normal incidence puts the same incident phase on every element (phase
/// reference at z = 0). Elements are accumulated in lattice order.
pub fn scattered_field(
    array: &ArrayGeometry,
    model: &MetaAtomModel,
    wave: &IncidentWave,
    f_ghz: f64,
    obs_points: &[Vec3],
) -> Result<Vec<FieldSample>> {
    if obs_points.is_empty() {
        return Err(Error::NoObservationPoints);
    }
    if obs_points.iter().any(|p| !(p[2] > 0.0)) {
        return Err(Error::ObservationNotAboveArray);
    }
    let j = jones_reflectance(model, f_ghz)?;
    let e_tan = incident_field(wave);
    let moments: Vec<[Complex64; 3]> = array
        .element_rotations_deg
        .iter()
        .map(|&rot| element_moment(&j, rot, e_tan))
        .collect();

    obs_points
        .iter()
        .map(|&obs| {
            let mut total = FieldSample::ZERO;
            for (moment, &pos) in moments.iter().zip(&array.element_positions) {
                total = total + dipole_field(*moment, pos, obs, f_ghz)?;
            }
            Ok(total)
        })
        .collect()
}

/// Far-field distance `2D²/λ` for the array aperture at `f_ghz` (> 0).
pub fn far_field_boundary(array: &ArrayGeometry, f_ghz: f64) -> f64 {
    let d = array.aperture_diagonal_mm();
    2.0 * d * d / wavelength_mm(f_ghz)
}
