//! Experiment configuration: one TOML file, every key optional.
//!
//! Missing keys take the built-in defaults; unknown keys are rejected.

use std::path::{Path, PathBuf};

use polsense_core::math::cos_sin_deg;
use polsense_core::{
    build_array, jones_reflectance, AngleGrid, Complex64, DetectionMode, DetectorSpec, Estimator, FrequencyGrid,
    MetaAtomGeometry, MetaAtomModel, ResonanceMode, SamplingGeometry, Scene,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub array: ArrayConfig,
    pub sampling: SamplingConfig,
    pub frequencies: FrequencyConfig,
    pub angles: AngleConfig,
    pub detector: DetectorConfig,
    pub estimator: EstimatorConfig,
    pub noise: NoiseConfig,
    pub incident: IncidentConfig,
    pub demo: DemoConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub resonant_frequency_ghz: f64,
    pub half_linewidth_ghz: f64,
    pub loss_fraction: f64,
}

impl From<ResonanceMode> for ModeConfig {
    fn from(m: ResonanceMode) -> Self {
        Self {
            resonant_frequency_ghz: m.resonant_frequency_ghz,
            half_linewidth_ghz: m.half_linewidth_ghz,
            loss_fraction: m.loss_fraction,
        }
    }
}

/// Cross-polarized resonance; `magnitude·e^{j·phase}` is its peak coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossConfig {
    pub magnitude: f64,
    pub phase_deg: f64,
    pub resonant_frequency_ghz: f64,
    pub half_linewidth_ghz: f64,
}

impl Default for CrossConfig {
    fn default() -> Self {
        let m = MetaAtomModel::default();
        Self {
            magnitude: 0.34,
            phase_deg: 112.0,
            resonant_frequency_ghz: m.cross_resonance_ghz,
            half_linewidth_ghz: m.cross_linewidth_ghz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
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

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = MetaAtomGeometry::default();
        Self {
            slit_width_mm: g.slit_width_mm,
            ring_width_mm: g.ring_width_mm,
            outer_radius_mm: g.outer_radius_mm,
            coupling_gap_mm: g.coupling_gap_mm,
            arm_length_mm: g.arm_length_mm,
            substrate_thickness_mm: g.substrate_thickness_mm,
            arm_angle1_deg: g.arm_angle1_deg,
            arm_angle2_deg: g.arm_angle2_deg,
            cell_size_mm: g.cell_size_mm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub x_mode: ModeConfig,
    pub y_mode: ModeConfig,
    pub cross: CrossConfig,
    pub geometry: GeometryConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let m = MetaAtomModel::default();
        Self {
            x_mode: m.x_mode.into(),
            y_mode: m.y_mode.into(),
            cross: CrossConfig::default(),
            geometry: GeometryConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    pub pitch_mm: f64,
    /// Seeds random per-element rotations; absent means a homogeneous array.
    pub rotation_seed: Option<u64>,
    pub rotation_max_deg: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            rows: 3,
            cols: 3,
            pitch_mm: 7.2,
            rotation_seed: None,
            rotation_max_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub height_mm: f64,
    pub half_span_mm: f64,
    pub n_points: usize,
    pub line_axis: [f64; 3],
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let s = SamplingGeometry::default();
        Self {
            height_mm: s.height_mm,
            half_span_mm: s.half_span_mm,
            n_points: s.n_points,
            line_axis: s.line_axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencyConfig {
    pub start_ghz: f64,
    pub stop_ghz: f64,
    pub points: usize,
}

impl Default for FrequencyConfig {
    fn default() -> Self {
        Self {
            start_ghz: 9.0,
            stop_ghz: 11.0,
            points: 21,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AngleConfig {
    pub min_deg: f64,
    pub max_deg: f64,
    pub count: usize,
}

impl Default for AngleConfig {
    fn default() -> Self {
        Self {
            min_deg: -90.0,
            max_deg: 90.0,
            count: 19,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Intensity,
    Phase,
    Complex,
}

impl From<ModeName> for DetectionMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Intensity => DetectionMode::Intensity,
            ModeName::Phase => DetectionMode::Phase,
            ModeName::Complex => DetectionMode::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub axis_angle_deg: f64,
    pub mode: ModeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub sharpen_exponent: u32,
    pub rank_cutoff: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        let e = Estimator::default();
        Self {
            sharpen_exponent: e.sharpen_exponent,
            rank_cutoff: e.rank_cutoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Relative standard deviation; 0 disables noise.
    pub sigma: f64,
    pub seed: u64,
    pub repetitions: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            seed: 1,
            repetitions: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IncidentConfig {
    pub amplitude: f64,
}

impl Default for IncidentConfig {
    fn default() -> Self {
        Self { amplitude: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoConfig {
    pub single_frequency_ghz: f64,
    /// Positive angles whose ± pairs are studied.
    pub pairs_deg: Vec<f64>,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            single_frequency_ghz: 10.0,
            pairs_deg: vec![30.0, 60.0, 70.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every sub-record, including passivity over the frequency grid.
    pub fn validate(&self) -> Result<(), CliError> {
        let model = self.model()?;
        for &f in self.frequencies()?.values() {
            jones_reflectance(&model, f).map_err(config_err)?;
        }
        self.scene()?;
        self.angles()?;
        self.estimator()?;
        if !self.detector.axis_angle_deg.is_finite() {
            return Err(CliError::Config("detector.axis_angle_deg must be finite".into()));
        }
        if !(self.noise.sigma >= 0.0 && self.noise.sigma.is_finite()) {
            return Err(CliError::Config("noise.sigma must be non-negative".into()));
        }
        if self.noise.repetitions == 0 {
            return Err(CliError::Config("noise.repetitions must be at least 1".into()));
        }
        if !(self.demo.single_frequency_ghz > 0.0 && self.demo.single_frequency_ghz.is_finite()) {
            return Err(CliError::Config("demo.single_frequency_ghz must be positive".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<MetaAtomModel, CliError> {
        let m = &self.model;
        let mode = |c: &ModeConfig| {
            ResonanceMode::new(c.resonant_frequency_ghz, c.half_linewidth_ghz, c.loss_fraction).map_err(config_err)
        };
        let (c, s) = cos_sin_deg(m.cross.phase_deg);
        let g = &m.geometry;
        let model = MetaAtomModel {
            x_mode: mode(&m.x_mode)?,
            y_mode: mode(&m.y_mode)?,
            cross_coupling: Complex64::new(m.cross.magnitude * c, m.cross.magnitude * s),
            cross_resonance_ghz: m.cross.resonant_frequency_ghz,
            cross_linewidth_ghz: m.cross.half_linewidth_ghz,
            geometry: MetaAtomGeometry {
                slit_width_mm: g.slit_width_mm,
                ring_width_mm: g.ring_width_mm,
                outer_radius_mm: g.outer_radius_mm,
                coupling_gap_mm: g.coupling_gap_mm,
                arm_length_mm: g.arm_length_mm,
                substrate_thickness_mm: g.substrate_thickness_mm,
                arm_angle1_deg: g.arm_angle1_deg,
                arm_angle2_deg: g.arm_angle2_deg,
                cell_size_mm: g.cell_size_mm,
            },
        };
        if !(m.cross.magnitude >= 0.0) {
            return Err(CliError::Config("model.cross.magnitude must be non-negative".into()));
        }
        model.validate().map_err(config_err)?;
        Ok(model)
    }

    pub fn scene(&self) -> Result<Scene, CliError> {
        let a = &self.array;
        let array = build_array(a.rows, a.cols, a.pitch_mm, a.rotation_seed, a.rotation_max_deg).map_err(config_err)?;
        let s = &self.sampling;
        let sampling = SamplingGeometry {
            height_mm: s.height_mm,
            line_axis: s.line_axis,
            half_span_mm: s.half_span_mm,
            n_points: s.n_points,
        };
        sampling.validate().map_err(config_err)?;
        if !(self.incident.amplitude >= 0.0 && self.incident.amplitude.is_finite()) {
            return Err(CliError::Config("incident.amplitude must be non-negative".into()));
        }
        Ok(Scene {
            array,
            model: self.model()?,
            sampling,
            amplitude: self.incident.amplitude,
        })
    }

    pub fn frequencies(&self) -> Result<FrequencyGrid, CliError> {
        let f = &self.frequencies;
        FrequencyGrid::new(f.start_ghz, f.stop_ghz, f.points).map_err(config_err)
    }

    pub fn angles(&self) -> Result<AngleGrid, CliError> {
        let a = &self.angles;
        AngleGrid::new(a.min_deg, a.max_deg, a.count).map_err(config_err)
    }

    pub fn detector(&self) -> DetectorSpec {
        DetectorSpec::from_angle_deg(self.detector.axis_angle_deg, self.detector.mode.into())
    }

    pub fn estimator(&self) -> Result<Estimator, CliError> {
        Estimator::new(self.estimator.sharpen_exponent, self.estimator.rank_cutoff).map_err(config_err)
    }
}

fn config_err(e: polsense_core::Error) -> CliError {
    CliError::Config(e.to_string())
}
