//! One function per subcommand. Each writes its files under `out` and
//! returns what it wrote.

use std::path::{Path, PathBuf};

use polsense_core::math::axis_difference_deg;
use polsense_core::{
    add_noise, frequency_ablation, majority_class, svd_spectrum, EstimateResult, MeasurementVector, SensingMatrix,
    SvdSpectrum,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::formats;

pub const MODEL_FILE: &str = "model.csv";
pub const FIELDS_FILE: &str = "fields.csv";
pub const MATRIX_FILE: &str = "matrix.txt";
pub const SVD_FILE: &str = "svd.csv";
pub const SVD_RANK_FILE: &str = "svd_rank.csv";
pub const ESTIMATE_FILE: &str = "estimate.csv";
pub const DEMO_FILE: &str = "demo.csv";
pub const DEMO_PAIRS_FILE: &str = "demo_pairs.csv";

/// Two intensities closer than this (relative) cannot tell ±θ apart.
const AMBIGUITY_TOLERANCE: f64 = 1e-10;

pub fn cmd_model(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let path = out.join(MODEL_FILE);
    formats::write_model(&path, &cfg.model()?, cfg.frequencies()?.values())?;
    Ok(path)
}

pub fn cmd_fields(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let rows = cfg.scene()?.component_sweep(&cfg.angles()?, &cfg.frequencies()?)?;
    let path = out.join(FIELDS_FILE);
    formats::write_components(&path, &rows)?;
    Ok(path)
}

pub fn build_matrix(cfg: &ExperimentConfig) -> Result<SensingMatrix, CliError> {
    Ok(cfg
        .scene()?
        .build_sensing_matrix(&cfg.angles()?, &cfg.frequencies()?, &cfg.detector())?)
}

pub fn cmd_matrix(cfg: &ExperimentConfig, out: &Path) -> Result<(PathBuf, SensingMatrix), CliError> {
    let phi = build_matrix(cfg)?;
    let path = out.join(MATRIX_FILE);
    formats::write_matrix(&path, &phi)?;
    Ok((path, phi))
}

/// Loads `matrix_file` if given, otherwise builds Φ from the configuration.
/// Warns when a loaded matrix was not built from this configuration.
fn matrix_for(cfg: &ExperimentConfig, matrix_file: Option<&Path>) -> Result<SensingMatrix, CliError> {
    let Some(file) = matrix_file else {
        return build_matrix(cfg);
    };
    let phi = formats::read_matrix(file)?;
    let expected = cfg
        .scene()?
        .fingerprint(&cfg.angles()?, &cfg.frequencies()?, &cfg.detector());
    if !phi.matches(expected) {
        eprintln!(
            "warning: {} has fingerprint {} but the configuration gives {}",
            file.display(),
            phi.fingerprint,
            expected
        );
    }
    Ok(phi)
}

pub fn cmd_svd(cfg: &ExperimentConfig, matrix_file: Option<&Path>, out: &Path) -> Result<SvdSpectrum, CliError> {
    let phi = match matrix_file {
        Some(f) => formats::read_matrix(f)?,
        None => build_matrix(cfg)?,
    };
    let spectrum = svd_spectrum(&phi.matrix())?;
    formats::write_svd(&out.join(SVD_FILE), &out.join(SVD_RANK_FILE), &spectrum)?;
    Ok(spectrum)
}

/// Where the measurement for `estimate` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementSource {
    /// Synthesize it at this incident polarization; it is also the ground truth.
    Angle(f64),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRequest {
    pub matrix_file: Option<PathBuf>,
    pub source: MeasurementSource,
    pub single_frequency_ghz: Option<f64>,
    /// Overrides `noise.sigma` from the configuration.
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOutcome {
    pub path: PathBuf,
    pub result: EstimateResult,
    /// `Some(correct)` when a ground-truth angle was available.
    pub correct: Option<bool>,
}

pub fn cmd_estimate(cfg: &ExperimentConfig, req: &EstimateRequest, out: &Path) -> Result<EstimateOutcome, CliError> {
    let mut phi = matrix_for(cfg, req.matrix_file.as_deref())?;
    if let Some(f) = req.single_frequency_ghz {
        let idx = phi
            .frequencies_ghz
            .iter()
            .position(|g| (g - f).abs() <= 1e-9)
            .ok_or_else(|| CliError::Input(format!("{f} GHz is not on the matrix frequency grid")))?;
        phi = frequency_ablation(&phi, &[idx])?;
    }

    let s = match &req.source {
        MeasurementSource::Angle(theta) => cfg.scene()?.sense_vector(*theta, &phi.frequencies_ghz, &phi.detector)?,
        MeasurementSource::File(path) => measurement_from_file(path, &phi)?,
    };
    let sigma = req.noise_sigma.unwrap_or(cfg.noise.sigma);
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(CliError::Input(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    let s = add_noise(&s, sigma, cfg.noise.seed)?;

    let result = cfg.estimator()?.detect(&phi, &s)?;
    let path = out.join(ESTIMATE_FILE);
    formats::write_estimate(&path, &result, &phi.angles)?;
    let correct = match req.source {
        MeasurementSource::Angle(theta) => Some(result.detects(phi.angles.nearest_index(theta))),
        MeasurementSource::File(_) => None,
    };
    Ok(EstimateOutcome { path, result, correct })
}

fn measurement_from_file(path: &Path, phi: &SensingMatrix) -> Result<MeasurementVector, CliError> {
    let pairs = formats::read_measurement(path)?;
    let mut values = Vec::with_capacity(phi.frequencies_ghz.len());
    for &f in &phi.frequencies_ghz {
        let v = pairs
            .iter()
            .find(|(g, _)| (g - f).abs() <= 1e-9)
            .map(|(_, v)| *v)
            .ok_or_else(|| CliError::Input(format!("{} has no value at {f} GHz", path.display())))?;
        values.push(v);
    }
    Ok(MeasurementVector {
        values,
        complex: None,
        theta_deg: f64::NAN,
        detector: phi.detector,
    })
}

/// One row of the demo table.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoRow {
    pub true_angle_deg: f64,
    pub detected_angle_deg: f64,
    pub correct: bool,
    pub confidence: f64,
    /// Majority-vote angle over noisy repetitions, when noise is configured.
    pub noisy_majority_deg: Option<f64>,
}

/// One ± pair evaluated with one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub theta_deg: f64,
    /// `true` for the full band, `false` for the single frequency.
    pub full_band: bool,
    pub detected_plus_deg: f64,
    pub detected_minus_deg: f64,
    pub resolved: bool,
    /// The ±θ measurements coincide, so no estimator can tell them apart.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoReport {
    pub rows: Vec<DemoRow>,
    pub pairs: Vec<PairRow>,
    pub table_path: PathBuf,
    pub pairs_path: PathBuf,
}

impl DemoReport {
    pub fn successes(&self) -> usize {
        self.rows.iter().filter(|r| r.correct).count()
    }
}

pub fn cmd_demo(cfg: &ExperimentConfig, out: &Path) -> Result<DemoReport, CliError> {
    let scene = cfg.scene()?;
    let angles = cfg.angles()?;
    let freqs = cfg.frequencies()?;
    let det = cfg.detector();
    let estimator = cfg.estimator()?;
    let phi = scene.build_sensing_matrix(&angles, &freqs, &det)?;
    let prepared = estimator.prepare(&phi)?;

    let mut rows = Vec::with_capacity(angles.len());
    for (k, &theta) in angles.values().iter().enumerate() {
        let s = scene.sense_vector(theta, freqs.values(), &det)?;
        let r = prepared.detect(&s)?;
        let noisy_majority_deg = if cfg.noise.sigma > 0.0 {
            let votes = (0..cfg.noise.repetitions as u64)
                .map(|rep| {
                    let seed = cfg.noise.seed.wrapping_add(1_000_003 * k as u64 + rep);
                    Ok(prepared.detect(&add_noise(&s, cfg.noise.sigma, seed)?)?.detected_index)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            majority_class(&votes, &angles).map(|c| angles.values()[c])
        } else {
            None
        };
        rows.push(DemoRow {
            true_angle_deg: theta,
            detected_angle_deg: r.detected_angle_deg,
            correct: r.detects(k),
            confidence: r.confidence,
            noisy_majority_deg,
        });
    }

    let single = polsense_core::FrequencyGrid::new(cfg.demo.single_frequency_ghz, cfg.demo.single_frequency_ghz, 1)?;
    let phi_single = scene.build_sensing_matrix(&angles, &single, &det)?;
    let prepared_single = estimator.prepare(&phi_single)?;
    let mut pairs = Vec::new();
    for &theta in &cfg.demo.pairs_deg {
        for (full_band, grid, prep) in [(true, &freqs, &prepared), (false, &single, &prepared_single)] {
            let plus = scene.sense_vector(theta, grid.values(), &det)?;
            let minus = scene.sense_vector(-theta, grid.values(), &det)?;
            let dp = prep.detect(&plus)?.detected_angle_deg;
            let dm = prep.detect(&minus)?.detected_angle_deg;
            let ambiguous = plus
                .values
                .iter()
                .zip(&minus.values)
                .all(|(a, b)| (a - b).abs() <= AMBIGUITY_TOLERANCE * a.abs().max(b.abs()));
            pairs.push(PairRow {
                theta_deg: theta,
                full_band,
                detected_plus_deg: dp,
                detected_minus_deg: dm,
                resolved: axis_difference_deg(dp, theta).abs() < 1e-9 && axis_difference_deg(dm, -theta).abs() < 1e-9,
                ambiguous,
            });
        }
    }

    let table_path = out.join(DEMO_FILE);
    let pairs_path = out.join(DEMO_PAIRS_FILE);
    write_demo(&table_path, &rows)?;
    write_pairs(&pairs_path, &pairs, cfg.demo.single_frequency_ghz)?;
    Ok(DemoReport {
        rows,
        pairs,
        table_path,
        pairs_path,
    })
}

fn write_demo(path: &Path, rows: &[DemoRow]) -> Result<(), CliError> {
    let mut text = String::from("true_angle_deg,detected_angle_deg,correct,confidence,noisy_majority_deg\n");
    for r in rows {
        let noisy = r.noisy_majority_deg.map_or(String::new(), |v| v.to_string());
        text += &format!(
            "{},{},{},{},{}\n",
            r.true_angle_deg,
            r.detected_angle_deg,
            u8::from(r.correct),
            r.confidence,
            noisy
        );
    }
    write_text(path, &text)
}

fn write_pairs(path: &Path, pairs: &[PairRow], single_ghz: f64) -> Result<(), CliError> {
    let mut text = String::from("theta_deg,band,detected_plus_deg,detected_minus_deg,resolved,ambiguous\n");
    for p in pairs {
        let band = if p.full_band {
            "full".to_string()
        } else {
            format!("{single_ghz}GHz")
        };
        text += &format!(
            "{},{},{},{},{},{}\n",
            p.theta_deg,
            band,
            p.detected_plus_deg,
            p.detected_minus_deg,
            u8::from(p.resolved),
            u8::from(p.ambiguous)
        );
    }
    write_text(path, &text)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
