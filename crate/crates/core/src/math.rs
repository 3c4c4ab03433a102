//! Float helpers for `no_std` builds, plus degree-based trigonometry that is
//! exact on the quarter turns.

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn to_radians(deg: f64) -> f64 {
    deg * (PI / 180.0)
}

/// Returns `(cos, sin)` of an angle in degrees.
///
/// Multiples of 90° give exact values, and `deg + 180` returns the exact
/// negation of `deg` whenever that sum is itself exact (e.g. whole degrees). Polarization is an axis, so a half-turn must leave
/// every intensity bit-identical.
pub fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let turns = floor(deg / 360.0);
    let mut r = deg - 360.0 * turns;
    if r >= 360.0 {
        r -= 360.0;
    }
    if r >= 180.0 {
        let (c, s) = half_turn_cos_sin(r - 180.0);
        (-c, -s)
    } else {
        half_turn_cos_sin(r)
    }
}

// r in [0, 180)
fn half_turn_cos_sin(r: f64) -> (f64, f64) {
    if r == 0.0 {
        (1.0, 0.0)
    } else if r == 90.0 {
        (0.0, 1.0)
    } else {
        let rad = to_radians(r);
        (libm::cos(rad), libm::sin(rad))
    }
}

/// Wraps a degree difference into `(-90, 90]`, the distance between two
/// polarization axes.
pub fn axis_difference_deg(a: f64, b: f64) -> f64 {
    let d = a - b;
    let mut w = d - 180.0 * floor(d / 180.0);
    if w > 90.0 {
        w -= 180.0;
    }
    w
}
