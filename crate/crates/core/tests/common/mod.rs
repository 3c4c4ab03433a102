//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Vector2};
use polsense_core::{ArrayGeometry, IncidentWave, MetaAtomModel, Vec3};

pub const C_MM_GHZ: f64 = 299.792_458;

/// Oracle Jones matrix straight from the resonance formulas.
pub fn oracle_jones(model: &MetaAtomModel, f: f64) -> Matrix2<Complex<f64>> {
    let co = |f0: f64, g: f64, kappa: f64| {
        Complex::new(1.0, 0.0) - Complex::new(2.0 * kappa * g, 0.0) / Complex::new(g, f - f0)
    };
    let xx = co(
        model.x_mode.resonant_frequency_ghz,
        model.x_mode.half_linewidth_ghz,
        model.x_mode.loss_fraction,
    );
    let yy = co(
        model.y_mode.resonant_frequency_ghz,
        model.y_mode.half_linewidth_ghz,
        model.y_mode.loss_fraction,
    );
    let g = model.cross_linewidth_ghz;
    let chi = Complex::new(model.cross_coupling.re, model.cross_coupling.im);
    let xy = chi * g / Complex::new(g, f - model.cross_resonance_ghz);
    Matrix2::new(xx, xy, xy, yy)
}

pub fn oracle_rotated(j: &Matrix2<Complex<f64>>, deg: f64) -> Matrix2<Complex<f64>> {
    let (s, c) = deg.to_radians().sin_cos();
    let r = |a: f64, b: f64| {
        Matrix2::new(
            Complex::new(a, 0.0),
            Complex::new(b, 0.0),
            Complex::new(-b, 0.0),
            Complex::new(a, 0.0),
        )
    };
    r(c, -s) * j * r(c, s)
}

/// Brute-force triple loop: points × elements × components, dyadic Green's form.
pub fn oracle_field(
    array: &ArrayGeometry,
    model: &MetaAtomModel,
    wave: &IncidentWave,
    f: f64,
    obs: &[Vec3],
) -> Vec<[Complex<f64>; 3]> {
    let k = 2.0 * std::f64::consts::PI * f / C_MM_GHZ;
    let (s, c) = wave.theta_deg.to_radians().sin_cos();
    let e_inc = Vector2::new(
        Complex::new(wave.amplitude * c, 0.0),
        Complex::new(wave.amplitude * s, 0.0),
    );
    let j = oracle_jones(model, f);
    let mut out = Vec::new();
    for o in obs {
        let mut total = [Complex::new(0.0, 0.0); 3];
        for (pos, rot) in array.element_positions.iter().zip(&array.element_rotations_deg) {
            let m2 = oracle_rotated(&j, *rot) * e_inc;
            let p = [m2[0], m2[1], Complex::new(0.0, 0.0)];
            let d: Vec<f64> = (0..3).map(|i| o[i] - pos[i]).collect();
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let n: Vec<f64> = d.iter().map(|x| x / r).collect();
            let g = Complex::new(0.0, -k * r).exp() / r;
            let near = Complex::new(1.0 / (r * r), k / r);
            for (i, t) in total.iter_mut().enumerate() {
                for (l, pl) in p.iter().enumerate() {
                    let delta = if i == l { 1.0 } else { 0.0 };
                    let far_dyad = k * k * (delta - n[i] * n[l]);
                    let near_dyad = 3.0 * n[i] * n[l] - delta;
                    *t += g * (near * near_dyad + far_dyad) * pl;
                }
            }
        }
        out.push(total);
    }
    out
}

/// Field of one dipole at `obs`, dyadic form.
pub fn oracle_dipole(p: [Complex<f64>; 3], src: Vec3, obs: Vec3, f: f64) -> [Complex<f64>; 3] {
    let k = 2.0 * std::f64::consts::PI * f / C_MM_GHZ;
    let d: Vec<f64> = (0..3).map(|i| obs[i] - src[i]).collect();
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let n: Vec<f64> = d.iter().map(|x| x / r).collect();
    let g = Complex::new(0.0, -k * r).exp() / r;
    let near = Complex::new(1.0 / (r * r), k / r);
    let mut e = [Complex::new(0.0, 0.0); 3];
    for (i, t) in e.iter_mut().enumerate() {
        for (l, pl) in p.iter().enumerate() {
            let delta = if i == l { 1.0 } else { 0.0 };
            *t += g * (near * (3.0 * n[i] * n[l] - delta) + k * k * (delta - n[i] * n[l])) * pl;
        }
    }
    e
}
