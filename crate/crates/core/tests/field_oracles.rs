mod common;

use common::{oracle_dipole, oracle_field, oracle_jones, oracle_rotated};
use nalgebra::Complex;
use polsense_core::{
    build_array, dipole_field, jones_reflectance, rotate_jones, sampling_points, scattered_field, Complex64,
    IncidentWave, MetaAtomModel, SamplingGeometry, SPEED_OF_LIGHT_MM_GHZ,
};
use proptest::prelude::*;

fn c(z: Complex64) -> Complex<f64> {
    Complex::new(z.re, z.im)
}

fn x_moment() -> [Complex64; 3] {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]
}

#[test]
fn dipole_end_fire_has_no_radiative_part() {
    for f in [9.0, 10.0, 11.0] {
        let lambda = SPEED_OF_LIGHT_MM_GHZ / f;
        let r = 10.0 * lambda;
        let along = dipole_field(x_moment(), [0.0; 3], [r, 0.0, 0.0], f).unwrap();
        let broadside = dipole_field(x_moment(), [0.0; 3], [0.0, 0.0, r], f).unwrap();
        let transverse = (along.e_y.norm_sqr() + along.e_z.norm_sqr()).sqrt();
        assert!(transverse < 1e-3 * broadside.norm());
        // the residual along the axis is the 1/r² induction term, far below broadside
        assert!(along.norm() < 0.05 * broadside.norm());
    }
}

#[test]
fn dipole_decays_as_one_over_r_in_far_zone() {
    let moments = [
        x_moment(),
        [
            Complex64::new(0.3, -0.2),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.5),
        ],
    ];
    let dirs = [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.48, 0.6, 0.64]];
    for f in [9.0, 11.0] {
        let lambda = SPEED_OF_LIGHT_MM_GHZ / f;
        for m in moments {
            for d in dirs {
                for r in [10.0 * lambda, 25.0 * lambda] {
                    let at = |s: f64| {
                        dipole_field(m, [0.0; 3], [d[0] * s, d[1] * s, d[2] * s], f)
                            .unwrap()
                            .norm()
                    };
                    let near = at(r) * r;
                    let far = at(2.0 * r) * 2.0 * r;
                    assert!((near - far).abs() <= 0.02 * far, "r = {r}, {near} vs {far}");
                }
            }
        }
    }
}

#[test]
fn dipole_matches_dyadic_oracle() {
    let m = [
        Complex64::new(0.7, 0.1),
        Complex64::new(-0.2, 0.9),
        Complex64::new(0.0, -0.4),
    ];
    for (src, obs) in [
        ([1.0, -2.0, 0.0], [3.0, 4.0, 65.0]),
        ([0.0; 3], [2.0, 1.0, 3.0]),
        ([-7.2, 7.2, 0.0], [10.8, 0.0, 65.0]),
    ] {
        let got = dipole_field(m, src, obs, 10.3).unwrap();
        let want = oracle_dipole(m.map(c), src, obs, 10.3);
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (g, w) in got.components().iter().zip(want) {
            assert!((c(*g) - w).norm() <= 1e-13 * scale);
        }
    }
}

#[test]
fn jones_matches_closed_form_oracle() {
    let model = MetaAtomModel::default();
    for i in 0..=40 {
        let f = 8.0 + 0.1 * i as f64;
        let j = jones_reflectance(&model, f).unwrap();
        for rot in [0.0, 12.5, -33.0, 45.0, 90.0] {
            let got = rotate_jones(&j, rot);
            let want = oracle_rotated(&oracle_jones(&model, f), rot);
            let entries = [got.r_xx, got.r_xy, got.r_yx, got.r_yy];
            let expected = [want[(0, 0)], want[(0, 1)], want[(1, 0)], want[(1, 1)]];
            for (g, w) in entries.iter().zip(expected) {
                assert!((c(*g) - w).norm() < 1e-14);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn superposition_matches_brute_force(
        n_rows in 1usize..=5,
        n_cols in 1usize..=5,
        seed in proptest::option::of(0u64..1000),
        theta in -90.0f64..90.0,
        amplitude in 0.1f64..10.0,
        f in 9.0f64..11.0,
    ) {
        let array = build_array(n_rows, n_cols, 7.2, seed, 45.0).unwrap();
        let model = MetaAtomModel::default();
        let wave = IncidentWave::new(theta, amplitude);
        let obs = sampling_points(&SamplingGeometry { n_points: 9, ..SamplingGeometry::default() });
        let got = scattered_field(&array, &model, &wave, f, &obs).unwrap();
        let want = oracle_field(&array, &model, &wave, f, &obs);
        for (g, w) in got.iter().zip(&want) {
            let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in g.components().iter().zip(w) {
                prop_assert!((c(*a) - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn field_is_linear_in_amplitude(theta in -90.0f64..90.0, alpha in 1e-3f64..1e3, f in 9.0f64..11.0) {
        let array = build_array(3, 3, 7.2, Some(9), 20.0).unwrap();
        let model = MetaAtomModel::default();
        let obs = sampling_points(&SamplingGeometry { n_points: 7, ..SamplingGeometry::default() });
        let unit = scattered_field(&array, &model, &IncidentWave::new(theta, 1.0), f, &obs).unwrap();
        let scaled = scattered_field(&array, &model, &IncidentWave::new(theta, alpha), f, &obs).unwrap();
        for (a, b) in scaled.iter().zip(&unit) {
            for (x, y) in a.components().iter().zip(b.components()) {
                prop_assert!((x - y * alpha).norm() <= 1e-12 * alpha * b.norm());
            }
        }
    }
}
