use polsense_core::{
    add_noise, build_array, detect, frequency_ablation, svd_spectrum, AngleGrid, DetectionMode, DetectorSpec,
    Estimator, FrequencyGrid, MeasurementVector, MetaAtomModel, ResonanceMode, SamplingGeometry, Scene, SensingMatrix,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn scene() -> Scene {
    Scene::new(
        build_array(3, 3, 7.2, None, 0.0).unwrap(),
        MetaAtomModel::default(),
        SamplingGeometry::default(),
    )
}

fn default_phi() -> &'static SensingMatrix {
    static PHI: OnceLock<SensingMatrix> = OnceLock::new();
    PHI.get_or_init(|| {
        scene()
            .build_sensing_matrix(
                &AngleGrid::default(),
                &FrequencyGrid::default(),
                &DetectorSpec::default(),
            )
            .unwrap()
    })
}

fn sensed(theta: f64) -> MeasurementVector {
    scene()
        .sense_vector(theta, FrequencyGrid::default().values(), &DetectorSpec::default())
        .unwrap()
}

#[test]
fn detects_thirty_degrees() {
    let r = detect(default_phi(), &sensed(30.0), 2).unwrap();
    assert_eq!(r.detected_angle_deg, 30.0);
    assert!(r.confidence >= 1.5);
    assert_eq!(r.sharpened.iter().copied().fold(0.0, f64::max), 1.0);
}

#[test]
fn signed_pairs_are_resolved_with_full_band() {
    for theta in [30.0, 60.0, 70.0] {
        assert_eq!(
            detect(default_phi(), &sensed(theta), 2).unwrap().detected_angle_deg,
            theta
        );
        assert_eq!(
            detect(default_phi(), &sensed(-theta), 2).unwrap().detected_angle_deg,
            -theta
        );
    }
}

#[test]
fn own_columns_are_detected() {
    let phi = default_phi();
    for k in 0..19 {
        let r = detect(phi, &phi.column_measurement(k), 2).unwrap();
        assert!(r.detects(k), "column {k} detected as {}", r.detected_index);
        assert!(r.confidence >= 1.0);
    }
}

#[test]
fn plus_and_minus_ninety_are_flagged_equivalent() {
    let phi = default_phi();
    assert_eq!(phi.column(0), phi.column(18));
    for theta in [90.0, -90.0] {
        let r = detect(phi, &sensed(theta), 2).unwrap();
        assert_eq!(r.equivalent_indices, vec![0, 18]);
        assert!(r.detects(0) && r.detects(18));
    }
}

#[test]
fn symmetric_model_is_sign_blind_at_one_frequency() {
    let mut s = scene();
    s.model = MetaAtomModel::symmetric(ResonanceMode::new(10.0, 0.4, 0.5).unwrap());
    let phi = s
        .build_sensing_matrix(
            &AngleGrid::default(),
            &FrequencyGrid::new(10.0, 10.0, 1).unwrap(),
            &DetectorSpec::default(),
        )
        .unwrap();
    assert_eq!(phi.shape(), (1, 19));
    for k in 0..19 {
        let (a, b) = (phi.get(0, k), phi.get(0, 18 - k));
        assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()));
    }
}

#[test]
fn single_frequency_ablation_shape() {
    let phi = default_phi();
    let ten = FrequencyGrid::default().nearest_index(10.0);
    assert_eq!(phi.frequencies_ghz[ten], 10.0);
    let one = frequency_ablation(phi, &[ten]).unwrap();
    assert_eq!(one.shape(), (1, 19));
    assert_eq!(one.angles, phi.angles);
    let all: Vec<usize> = (0..21).collect();
    assert_eq!(&frequency_ablation(phi, &all).unwrap(), phi);
}

#[test]
fn effective_rank_grows_with_nested_frequency_sets() {
    let phi = default_phi();
    let ranks: Vec<usize> = [1usize, 3, 7, 11, 21]
        .iter()
        .map(|&n| {
            let keep: Vec<usize> = (0..n).collect();
            svd_spectrum(&frequency_ablation(phi, &keep).unwrap().matrix())
                .unwrap()
                .effective_rank(1e-3)
        })
        .collect();
    assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
    assert!(ranks[4] >= 5);
}

#[test]
fn spectrum_of_default_matrix_is_nonincreasing() {
    let s = svd_spectrum(&default_phi().matrix()).unwrap().singular_values;
    assert_eq!(s.len(), 19);
    assert!(s.windows(2).all(|w| w[0] >= w[1]));
    // the duplicated ±90° column leaves a numerically zero singular value
    assert!(s[18] < 1e-12 * s[0]);
}

#[test]
fn detector_rotation_changes_values_not_detection() {
    let angles = AngleGrid::default();
    let freqs = FrequencyGrid::default();
    for axis in [15.0, 40.0, 75.0] {
        let det = DetectorSpec::from_angle_deg(axis, DetectionMode::Intensity);
        let phi = scene().build_sensing_matrix(&angles, &freqs, &det).unwrap();
        assert_ne!(phi.data(), default_phi().data());
        let prepared = Estimator::default().prepare(&phi).unwrap();
        for (k, &theta) in angles.values().iter().enumerate() {
            let s = scene().sense_vector(theta, freqs.values(), &det).unwrap();
            assert!(prepared.detect(&s).unwrap().detects(k), "axis {axis}, angle {theta}");
        }
    }
}

#[test]
fn noise_scale_follows_mean_entry() {
    let s = sensed(20.0);
    let mean = s.values.iter().sum::<f64>() / s.len() as f64;
    let sigma = 0.02;
    let n = 5000;
    let mut sum_sq = 0.0;
    for seed in 0..n {
        let noisy = add_noise(&s, sigma, seed).unwrap();
        sum_sq += noisy
            .values
            .iter()
            .zip(&s.values)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>();
    }
    let std = (sum_sq / (n as f64 * s.len() as f64)).sqrt();
    assert!(
        (std - sigma * mean).abs() < 0.02 * sigma * mean,
        "{std} vs {}",
        sigma * mean
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detection_is_scale_equivariant(k in 0usize..19, alpha in 1e-6f64..1e6) {
        let phi = default_phi();
        let s = phi.column_measurement(k);
        let a = detect(phi, &s, 2).unwrap();
        let b = detect(phi, &s.scaled(alpha), 2).unwrap();
        prop_assert_eq!(a.detected_index, b.detected_index);
    }
}
