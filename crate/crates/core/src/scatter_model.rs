//! Polarization-dependent reflection of a single passive meta-atom.
//!
//! Each polarization eigenmode of the grounded cell is modelled as a one-port
//! resonator,
//!
//! ```text
//! r_ii(f) = 1 - 2 κ_i γ_i / (γ_i + j (f - f_i))        i ∈ {x, y}
//! ```
//!
//! and the structural asymmetry of the cell couples the two axes through one
//! shared Lorentzian term,
//!
//! ```text
//! r_xy(f) = r_yx(f) = χ γ_χ / (γ_χ + j (f - f_χ))
//! ```
//!
//! For a single mode `|r_ii| ≤ 1` holds for every `κ ∈ [0, 1]`. The
//! cross-coupling can still push the full matrix above unit gain, so
//! [`jones_reflectance`] checks passivity at every requested frequency.

use num_complex::Complex64;

use crate::math::{cos_sin_deg, sqrt};
use crate::{Error, Result};

/// Slack allowed on the largest singular value of a passive Jones matrix.
pub const PASSIVITY_TOLERANCE: f64 = 1e-12;

/// Physical dimensions of the split-ring / hammer-head cross cell.
///
/// Carried as metadata only; no formula maps these lengths onto the resonance
/// parameters of [`MetaAtomModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaAtomGeometry {
    pub slit_width_mm: f64,
    pub ring_width_mm: f64,
    pub outer_radius_mm: f64,
    pub coupling_gap_mm: f64,
    pub arm_length_mm: f64,
    pub substrate_thickness_mm: f64,
    pub arm_angle1_deg: f64,
    pub arm_angle2_deg: f64,
    pub cell_size_mm: f64,
}

impl Default for MetaAtomGeometry {
    fn default() -> Self {
        Self {
            slit_width_mm: 0.4,
            ring_width_mm: 0.8,
            outer_radius_mm: 3.2,
            coupling_gap_mm: 0.9,
            arm_length_mm: 3.0,
            substrate_thickness_mm: 0.813,
            arm_angle1_deg: 105.0,
            arm_angle2_deg: 75.0,
            cell_size_mm: 7.2,
        }
    }
}

impl MetaAtomGeometry {
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            self.slit_width_mm,
            self.ring_width_mm,
            self.outer_radius_mm,
            self.coupling_gap_mm,
            self.arm_length_mm,
            self.substrate_thickness_mm,
            self.cell_size_mm,
        ];
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("meta-atom geometry", "all lengths must be positive"));
        }
        if self.cell_size_mm < 2.0 * self.outer_radius_mm {
            return Err(Error::invalid(
                "meta-atom geometry",
                "cell size must hold the outer ring (cell_size >= 2 R)",
            ));
        }
        if !(self.arm_angle1_deg.is_finite() && self.arm_angle2_deg.is_finite()) {
            return Err(Error::invalid("meta-atom geometry", "arm angles must be finite"));
        }
        Ok(())
    }

    /// The hammer-head cross is asymmetric when its two arm angles differ.
    pub fn is_asymmetric(&self) -> bool {
        self.arm_angle1_deg != self.arm_angle2_deg
    }
}

/// One polarization eigenmode of the cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceMode {
    pub resonant_frequency_ghz: f64,
    pub half_linewidth_ghz: f64,
    /// Fraction of the linewidth due to absorption; 0.5 is critical coupling.
    pub loss_fraction: f64,
}

impl ResonanceMode {
    pub fn new(resonant_frequency_ghz: f64, half_linewidth_ghz: f64, loss_fraction: f64) -> Result<Self> {
        let mode = Self {
            resonant_frequency_ghz,
            half_linewidth_ghz,
            loss_fraction,
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resonant_frequency_ghz > 0.0 && self.resonant_frequency_ghz.is_finite()) {
            return Err(Error::invalid("resonance mode", "resonant frequency must be positive"));
        }
        if !(self.half_linewidth_ghz > 0.0 && self.half_linewidth_ghz.is_finite()) {
            return Err(Error::invalid("resonance mode", "half linewidth must be positive"));
        }
        if !(0.0..=1.0).contains(&self.loss_fraction) {
            return Err(Error::invalid("resonance mode", "loss fraction must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Co-polarized reflection `1 - 2κγ / (γ + j(f - f0))`.
    pub fn reflection(&self, f_ghz: f64) -> Complex64 {
        let gamma = self.half_linewidth_ghz;
        let denom = Complex64::new(gamma, f_ghz - self.resonant_frequency_ghz);
        Complex64::new(1.0, 0.0) - (2.0 * self.loss_fraction * gamma) / denom
    }
}

/// Resonant surrogate of one meta-atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaAtomModel {
    pub x_mode: ResonanceMode,
    pub y_mode: ResonanceMode,
    pub cross_coupling: Complex64,
    pub cross_resonance_ghz: f64,
    pub cross_linewidth_ghz: f64,
    pub geometry: MetaAtomGeometry,
}

impl Default for MetaAtomModel {
    /// Calibrated defaults: both modes and the cross-coupling tail shape the
    /// 9–11 GHz band, and the matrix stays passive from 8 to 12 GHz.
    fn default() -> Self {
        let (c, s) = cos_sin_deg(112.0);
        Self {
            x_mode: ResonanceMode {
                resonant_frequency_ghz: 9.6,
                half_linewidth_ghz: 0.68,
                loss_fraction: 0.58,
            },
            y_mode: ResonanceMode {
                resonant_frequency_ghz: 10.3,
                half_linewidth_ghz: 1.9,
                loss_fraction: 0.24,
            },
            cross_coupling: Complex64::new(0.34 * c, 0.34 * s),
            cross_resonance_ghz: 7.1,
            cross_linewidth_ghz: 1.0,
            geometry: MetaAtomGeometry::default(),
        }
    }
}

impl MetaAtomModel {
    /// A model with identical x/y modes and no cross-coupling; its Jones
    /// matrix is a scalar multiple of the identity at every frequency.
    pub fn symmetric(mode: ResonanceMode) -> Self {
        Self {
            x_mode: mode,
            y_mode: mode,
            cross_coupling: Complex64::new(0.0, 0.0),
            cross_resonance_ghz: mode.resonant_frequency_ghz,
            cross_linewidth_ghz: mode.half_linewidth_ghz,
            geometry: MetaAtomGeometry::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x_mode.validate()?;
        self.y_mode.validate()?;
        self.geometry.validate()?;
        if !(self.cross_coupling.re.is_finite() && self.cross_coupling.im.is_finite()) {
            return Err(Error::invalid("meta-atom model", "cross-coupling must be finite"));
        }
        if !(self.cross_resonance_ghz > 0.0 && self.cross_resonance_ghz.is_finite()) {
            return Err(Error::invalid("meta-atom model", "cross resonance must be positive"));
        }
        if !(self.cross_linewidth_ghz > 0.0 && self.cross_linewidth_ghz.is_finite()) {
            return Err(Error::invalid("meta-atom model", "cross linewidth must be positive"));
        }
        Ok(())
    }

    /// No polarization conversion between x and y.
    pub fn is_diagonal(&self) -> bool {
        self.cross_coupling == Complex64::new(0.0, 0.0)
    }

    pub fn cross_reflection(&self, f_ghz: f64) -> Complex64 {
        let gamma = self.cross_linewidth_ghz;
        self.cross_coupling * gamma / Complex64::new(gamma, f_ghz - self.cross_resonance_ghz)
    }
}

/// Reflection matrix in the (x̂, ŷ) tangential basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    pub r_xx: Complex64,
    pub r_xy: Complex64,
    pub r_yx: Complex64,
    pub r_yy: Complex64,
}

impl JonesMatrix {
    pub fn new(r_xx: Complex64, r_xy: Complex64, r_yx: Complex64, r_yy: Complex64) -> Self {
        Self { r_xx, r_xy, r_yx, r_yy }
    }

    pub fn identity() -> Self {
        Self::diagonal(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn diagonal(a: Complex64, b: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(a, zero, zero, b)
    }

    /// Applies the matrix to a tangential field `(E_x, E_y)`.
    pub fn apply(&self, e: [Complex64; 2]) -> [Complex64; 2] {
        [self.r_xx * e[0] + self.r_xy * e[1], self.r_yx * e[0] + self.r_yy * e[1]]
    }

    pub fn is_reciprocal(&self) -> bool {
        self.r_xy == self.r_yx
    }

    /// Singular values `(σ_max, σ_min)` from the closed form for 2×2 matrices.
    pub fn singular_values(&self) -> (f64, f64) {
        let frob = self.r_xx.norm_sqr() + self.r_xy.norm_sqr() + self.r_yx.norm_sqr() + self.r_yy.norm_sqr();
        let det = (self.r_xx * self.r_yy - self.r_xy * self.r_yx).norm();
        let disc = (frob - 2.0 * det) * (frob + 2.0 * det);
        let s_max = sqrt(0.5 * (frob + sqrt(disc.max(0.0))));
        let s_min = if s_max > 0.0 { det / s_max } else { 0.0 };
        (s_max, s_min)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values().0
    }

    pub fn is_passive(&self) -> bool {
        self.max_singular_value() <= 1.0 + PASSIVITY_TOLERANCE
    }
}

/// Reflection matrix of the meta-atom at `f_ghz`.
///
/// Fails for non-positive frequencies and when the cross-coupling makes the
/// matrix active at this frequency.
pub fn jones_reflectance(model: &MetaAtomModel, f_ghz: f64) -> Result<JonesMatrix> {
    if !(f_ghz > 0.0 && f_ghz.is_finite()) {
        return Err(Error::NonPositiveFrequency(f_ghz));
    }
    model.validate()?;
    let cross = model.cross_reflection(f_ghz);
    let j = JonesMatrix::new(
        model.x_mode.reflection(f_ghz),
        cross,
        cross,
        model.y_mode.reflection(f_ghz),
    );
    let sigma_max = j.max_singular_value();
    if sigma_max > 1.0 + PASSIVITY_TOLERANCE {
        return Err(Error::NotPassive {
            frequency_ghz: f_ghz,
            sigma_max,
        });
    }
    Ok(j)
}

/// Jones matrix of an element rotated in-plane by `angle_deg`:
/// `R(-a) · J · R(a)` with `R(a) = [[cos a, sin a], [-sin a, cos a]]`.
///
/// `r_xy` and `r_yx` are evaluated by mirrored expressions, so a reciprocal
/// input stays bit-exactly reciprocal.
pub fn rotate_jones(j: &JonesMatrix, angle_deg: f64) -> JonesMatrix {
    let (c, s) = cos_sin_deg(angle_deg);
    let (cc, ss, cs) = (c * c, s * s, c * s);
    let diff = (j.r_xx - j.r_yy) * cs;
    let off_sum = (j.r_xy + j.r_yx) * cs;
    JonesMatrix {
        r_xx: j.r_xx * cc - off_sum + j.r_yy * ss,
        r_xy: diff + j.r_xy * cc - j.r_yx * ss,
        r_yx: diff + j.r_yx * cc - j.r_xy * ss,
        r_yy: j.r_xx * ss + off_sum + j.r_yy * cc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Proportionality `p` between incident and reflected `i`-components,
/// `E_i^s = p E_i^p`. Only defined for models without cross-coupling.
pub fn conversion_parameter(model: &MetaAtomModel, f_ghz: f64, component: Axis) -> Result<Complex64> {
    if !model.is_diagonal() {
        return Err(Error::ConversionParameterUndefined);
    }
    let j = jones_reflectance(model, f_ghz)?;
    Ok(match component {
        Axis::X => j.r_xx,
        Axis::Y => j.r_yy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lossless_model() -> MetaAtomModel {
        let mut m = MetaAtomModel::default();
        m.x_mode.loss_fraction = 0.0;
        m.y_mode.loss_fraction = 0.0;
        m.cross_coupling = c(0.0, 0.0);
        m
    }

    fn assert_jones_close(a: &JonesMatrix, b: &JonesMatrix, tol: f64) {
        for (x, y) in [(a.r_xx, b.r_xx), (a.r_xy, b.r_xy), (a.r_yx, b.r_yx), (a.r_yy, b.r_yy)] {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn zero_loss_and_coupling_is_a_perfect_mirror() {
        let m = lossless_model();
        for f in [0.5, 9.0, 9.8, 10.4, 30.0] {
            let j = jones_reflectance(&m, f).unwrap();
            assert_eq!(j, JonesMatrix::identity());
        }
    }

    #[test]
    fn critical_coupling_absorbs_at_resonance() {
        let mut m = lossless_model();
        m.x_mode.loss_fraction = 0.5;
        let j = jones_reflectance(&m, m.x_mode.resonant_frequency_ghz).unwrap();
        assert_eq!(j.r_xx, c(0.0, 0.0));
    }

    #[test]
    fn lossless_resonance_flips_sign() {
        let mut m = lossless_model();
        m.x_mode.loss_fraction = 1.0;
        let j = jones_reflectance(&m, m.x_mode.resonant_frequency_ghz).unwrap();
        assert_eq!(j.r_xx, c(-1.0, 0.0));
        assert_abs_diff_eq!(j.r_xx.norm(), 1.0);
        assert_abs_diff_eq!(j.r_xx.arg(), core::f64::consts::PI);
    }

    #[test]
    fn default_model_has_two_distinct_dips_on_the_sweep() {
        let m = MetaAtomModel::default();
        let freqs: Vec<f64> = (0..21).map(|i| 9.0 + 0.1 * i as f64).collect();
        let jones: Vec<JonesMatrix> = freqs.iter().map(|&f| jones_reflectance(&m, f).unwrap()).collect();
        let argmin = |pick: fn(&JonesMatrix) -> f64| {
            let mut best = 0;
            for (i, j) in jones.iter().enumerate() {
                if pick(j) < pick(&jones[best]) {
                    best = i;
                }
            }
            best
        };
        let ix = argmin(|j| j.r_xx.norm());
        let iy = argmin(|j| j.r_yy.norm());
        // closed form: |r| is smallest where |f - f0| is smallest
        let nearest = |f0: f64| {
            let mut best = 0;
            for (i, f) in freqs.iter().enumerate() {
                if (f - f0).abs() < (freqs[best] - f0).abs() {
                    best = i;
                }
            }
            best
        };
        assert_eq!(ix, nearest(m.x_mode.resonant_frequency_ghz));
        assert_eq!(iy, nearest(m.y_mode.resonant_frequency_ghz));
        assert_ne!(ix, iy);
    }

    #[test]
    fn rejects_non_positive_frequency() {
        let m = MetaAtomModel::default();
        assert_eq!(jones_reflectance(&m, 0.0), Err(Error::NonPositiveFrequency(0.0)));
        assert!(jones_reflectance(&m, -1.0).is_err());
        assert!(jones_reflectance(&m, f64::NAN).is_err());
    }

    #[test]
    fn rejects_active_cross_coupling() {
        let mut m = lossless_model();
        m.cross_coupling = c(0.3, 0.0);
        let err = jones_reflectance(&m, m.cross_resonance_ghz).unwrap_err();
        assert!(matches!(err, Error::NotPassive { .. }));
    }

    #[test]
    fn rejects_invalid_modes() {
        assert!(ResonanceMode::new(10.0, 0.0, 0.5).is_err());
        assert!(ResonanceMode::new(-1.0, 0.2, 0.5).is_err());
        assert!(ResonanceMode::new(10.0, 0.2, 1.5).is_err());
        assert!(ResonanceMode::new(10.0, 0.2, 1.0).is_ok());
    }

    #[test]
    fn geometry_defaults_and_asymmetry() {
        let g = MetaAtomGeometry::default();
        g.validate().unwrap();
        assert!(g.is_asymmetric());
        let mut sym = g;
        sym.arm_angle2_deg = sym.arm_angle1_deg;
        assert!(!sym.is_asymmetric());
        let mut bad = g;
        bad.cell_size_mm = 6.0;
        assert!(bad.validate().is_err());
        bad = g;
        bad.slit_width_mm = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rotation_examples() {
        let j = JonesMatrix::new(c(0.3, 0.1), c(0.05, -0.2), c(0.05, -0.2), c(-0.4, 0.6));
        assert_eq!(rotate_jones(&j, 0.0), j);

        let (a, b) = (c(0.7, -0.1), c(-0.2, 0.5));
        let d = JonesMatrix::diagonal(a, b);
        assert_jones_close(&rotate_jones(&d, 90.0), &JonesMatrix::diagonal(b, a), 1e-15);

        let half_sum = (a + b) * 0.5;
        let half_diff = (a - b) * 0.5;
        let expected = JonesMatrix::new(half_sum, half_diff, half_diff, half_sum);
        assert_jones_close(&rotate_jones(&d, 45.0), &expected, 1e-15);
    }

    #[test]
    fn conversion_parameter_contract() {
        let m = lossless_model();
        for f in [9.0, 10.0, 11.0] {
            assert_eq!(conversion_parameter(&m, f, Axis::X).unwrap(), c(1.0, 0.0));
            assert_eq!(conversion_parameter(&m, f, Axis::Y).unwrap(), c(1.0, 0.0));
        }
        let mut half = m;
        half.x_mode.loss_fraction = 0.5;
        let p = conversion_parameter(&half, half.x_mode.resonant_frequency_ghz, Axis::X).unwrap();
        assert_eq!(p, c(0.0, 0.0));

        let coupled = MetaAtomModel::default();
        assert_eq!(
            conversion_parameter(&coupled, 10.0, Axis::X),
            Err(Error::ConversionParameterUndefined)
        );
    }

    #[test]
    fn symmetric_model_is_scalar_and_rotation_invariant() {
        let mode = ResonanceMode::new(10.0, 0.3, 0.4).unwrap();
        let m = MetaAtomModel::symmetric(mode);
        for f in [9.0, 9.7, 10.0, 10.9] {
            let j = jones_reflectance(&m, f).unwrap();
            assert_eq!(j.r_xx, j.r_yy);
            assert_eq!(j.r_xy, c(0.0, 0.0));
            for a in [13.0, 45.0, 90.0, -71.0] {
                assert_jones_close(&rotate_jones(&j, a), &j, 1e-15);
            }
        }
    }

    fn model_strategy() -> impl Strategy<Value = MetaAtomModel> {
        (
            (8.0..12.0f64, 0.05..2.0f64, 0.0..=1.0f64),
            (8.0..12.0f64, 0.05..2.0f64, 0.0..=1.0f64),
            (0.0..0.5f64, -180.0..180.0f64, 8.0..12.0f64, 0.05..2.0f64),
        )
            .prop_map(|(x, y, (mag, phase, fc, gc))| {
                let (cp, sp) = cos_sin_deg(phase);
                MetaAtomModel {
                    x_mode: ResonanceMode {
                        resonant_frequency_ghz: x.0,
                        half_linewidth_ghz: x.1,
                        loss_fraction: x.2,
                    },
                    y_mode: ResonanceMode {
                        resonant_frequency_ghz: y.0,
                        half_linewidth_ghz: y.1,
                        loss_fraction: y.2,
                    },
                    cross_coupling: c(mag * cp, mag * sp),
                    cross_resonance_ghz: fc,
                    cross_linewidth_ghz: gc,
                    geometry: MetaAtomGeometry::default(),
                }
            })
    }

    fn jones_strategy() -> impl Strategy<Value = JonesMatrix> {
        proptest::array::uniform8(-1.0..1.0f64)
            .prop_map(|v| JonesMatrix::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])))
    }

    proptest! {
        #[test]
        fn accepted_matrices_are_passive_and_reciprocal(m in model_strategy(), f in 8.0..12.0f64) {
            match jones_reflectance(&m, f) {
                Ok(j) => {
                    prop_assert!(j.max_singular_value() <= 1.0 + PASSIVITY_TOLERANCE);
                    prop_assert!(j.is_reciprocal());
                }
                Err(Error::NotPassive { sigma_max, .. }) => prop_assert!(sigma_max > 1.0),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn rotations_compose(j in jones_strategy(), a in -360.0..360.0f64, b in -360.0..360.0f64) {
            let lhs = rotate_jones(&rotate_jones(&j, a), b);
            let rhs = rotate_jones(&j, a + b);
            for (x, y) in [(lhs.r_xx, rhs.r_xx), (lhs.r_xy, rhs.r_xy), (lhs.r_yx, rhs.r_yx), (lhs.r_yy, rhs.r_yy)] {
                prop_assert!((x - y).norm() <= 1e-12);
            }
        }

        #[test]
        fn rotation_preserves_singular_values(j in jones_strategy(), a in -360.0..360.0f64) {
            let (s1, s2) = j.singular_values();
            let (r1, r2) = rotate_jones(&j, a).singular_values();
            prop_assert!((s1 - r1).abs() <= 1e-12);
            prop_assert!((s2 - r2).abs() <= 1e-12);
        }

        #[test]
        fn rotation_keeps_reciprocity(m in model_strategy(), f in 8.0..12.0f64, a in -180.0..180.0f64) {
            let j = JonesMatrix::new(m.x_mode.reflection(f), m.cross_reflection(f), m.cross_reflection(f), m.y_mode.reflection(f));
            prop_assert!(rotate_jones(&j, a).is_reciprocal());
        }
    }
}
