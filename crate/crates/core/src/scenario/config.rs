use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::controller::{ReferencePhase, WarmStartReference, DEFAULT_EXHAUSTIVE_BUDGET};
use crate::dps::StateCode;
use crate::{Error, Result};

/// Scenario description, read from TOML. Every key carries its unit in the
/// name (`_m`, `_deg`, `_hz`, `_db`, `_w`); unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub exhaustive_budget: u64,
    pub link: LinkConfig,
    pub tx: AntennaConfig,
    pub rx: AntennaConfig,
    #[serde(default)]
    pub ris: RisConfig,
    #[serde(default)]
    pub pattern: PatternConfig,
    #[serde(default)]
    pub dps: DpsConfig,
    #[serde(default)]
    pub sm: SmConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub controller: ControllerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryConfig>,
    #[serde(default)]
    pub tracking: TrackingConfig,
    /// Directory that relative file paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_budget() -> u64 {
    DEFAULT_EXHAUSTIVE_BUDGET as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub frequency_hz: f64,
    #[serde(default = "one")]
    pub tx_power_w: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaConfig {
    pub position_m: [f64; 3],
    #[serde(default)]
    pub orientation_deg: [f64; 3],
    #[serde(default)]
    pub initial_phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    pub rows: usize,
    pub cols: usize,
    /// Element pitch; when absent `pitch_wavelengths` is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch_m: Option<f64>,
    #[serde(default = "half")]
    pub pitch_wavelengths: f64,
    /// Plate size per element; defaults to the pitch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate_width_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate_height_m: Option<f64>,
    #[serde(default)]
    pub position_m: [f64; 3],
    #[serde(default)]
    pub orientation_deg: [f64; 3],
    /// Antenna rotation about boresight of every element: 0, 45 or 90.
    #[serde(default)]
    pub polarization_deg: f64,
    /// Element initial phases are drawn uniformly from ±this value.
    #[serde(default)]
    pub initial_phase_spread_deg: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for RisConfig {
    fn default() -> Self {
        Self {
            rows: 4,
            cols: 4,
            pitch_m: None,
            pitch_wavelengths: 0.5,
            plate_width_m: None,
            plate_height_m: None,
            position_m: [0.0; 3],
            orientation_deg: [0.0; 3],
            polarization_deg: 0.0,
            initial_phase_spread_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Synthetic,
    File,
}

/// Antenna pattern shared by the transmitter, receiver and elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub kind: PatternKind,
    #[serde(default = "default_gain")]
    pub max_gain_dbi: f64,
    /// Horizontal-to-vertical amplitude ratio; `-inf` for none.
    #[serde(default = "default_leakage")]
    pub cross_pol_leakage_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_gain() -> f64 {
    6.0
}

fn default_leakage() -> f64 {
    -30.0
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            kind: PatternKind::Synthetic,
            max_gain_dbi: default_gain(),
            cross_pol_leakage_db: default_leakage(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpsSource {
    /// The measured 4-bit shifter model.
    Table1,
    /// Lossless, uniformly spaced phases.
    Ideal,
    /// A model file written by `fit-dps`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpsConfig {
    pub source: DpsSource,
    #[serde(default = "four")]
    pub bits: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn four() -> u8 {
    4
}

impl Default for DpsConfig {
    fn default() -> Self {
        Self {
            source: DpsSource::Table1,
            bits: 4,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmConfig {
    #[serde(default = "one")]
    pub c_s: f64,
    #[serde(default = "one")]
    pub c_r: f64,
}

impl Default for SmConfig {
    fn default() -> Self {
        Self { c_s: 1.0, c_r: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub sigma_db: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default = "default_t_r")]
    pub t_r: usize,
    #[serde(default = "default_t_g")]
    pub t_g: usize,
    /// Codebook rows as binary strings, `b₁` first. The 5th and 8th states
    /// in counting order are `0100` and `0111`.
    #[serde(default = "default_codebook")]
    pub codebook: Vec<StateCode>,
    #[serde(default)]
    pub reference_phase: ReferencePhase,
    #[serde(default)]
    pub warm_start: WarmStartReference,
}

fn default_t_r() -> usize {
    100
}

fn default_t_g() -> usize {
    3
}

fn default_codebook() -> Vec<StateCode> {
    ["0100", "0111"]
        .iter()
        .map(|s| StateCode::parse_binary(s).expect("valid literal"))
        .collect()
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            t_r: default_t_r(),
            t_g: default_t_g(),
            codebook: default_codebook(),
            reference_phase: ReferencePhase::default(),
            warm_start: WarmStartReference::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationMode {
    #[default]
    Fixed,
    /// The receiver turns about its boresight axis, linearly along the
    /// path.
    RotateAboutX,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub start_m: [f64; 3],
    pub end_m: [f64; 3],
    pub step_m: f64,
    #[serde(default)]
    pub orientation_mode: OrientationMode,
    #[serde(default)]
    pub rotation_start_deg: f64,
    #[serde(default = "full_turn")]
    pub rotation_end_deg: f64,
}

fn full_turn() -> f64 {
    360.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingConfig {
    #[serde(default)]
    pub activation_distances_m: Vec<f64>,
    /// Seeds averaged in the tracking grid.
    #[serde(default = "one_seed")]
    pub seeds: u64,
}

fn one_seed() -> u64 {
    1
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self {
            activation_distances_m: Vec::new(),
            seeds: 1,
        }
    }
}

fn invalid(what: impl Into<String>) -> Error {
    Error::Validation(what.into())
}

fn finite3(name: &str, v: &[f64; 3]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite")))
    }
}

impl ScenarioConfig {
    /// Parses and validates a TOML document; relative paths resolve
    /// against the working directory.
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_in(text, Path::new("."), "<config>")
    }

    fn from_toml_in(text: &str, base: &Path, origin: &str) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.base_dir = base.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_in(&text, base, &path.display().to_string())
    }

    /// The configuration with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn wavelength_m(&self) -> f64 {
        crate::math::SPEED_OF_LIGHT / self.link.frequency_hz
    }

    pub fn pitch_m(&self) -> f64 {
        self.ris.pitch_m.unwrap_or(self.ris.pitch_wavelengths * self.wavelength_m())
    }

    pub fn element_count(&self) -> usize {
        self.ris.rows * self.ris.cols
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.link.frequency_hz > 0.0 && self.link.frequency_hz.is_finite()) {
            return Err(invalid("link.frequency_hz must be positive"));
        }
        if !(self.link.tx_power_w > 0.0 && self.link.tx_power_w.is_finite()) {
            return Err(invalid("link.tx_power_w must be positive"));
        }
        for (name, a) in [("tx", &self.tx), ("rx", &self.rx)] {
            finite3(&format!("{name}.position_m"), &a.position_m)?;
            finite3(&format!("{name}.orientation_deg"), &a.orientation_deg)?;
            if !a.initial_phase_deg.is_finite() {
                return Err(invalid(format!("{name}.initial_phase_deg must be finite")));
            }
        }
        let r = &self.ris;
        if r.rows < 1 || r.cols < 1 {
            return Err(invalid("ris.rows and ris.cols must be at least 1"));
        }
        if !(self.pitch_m() > 0.0 && self.pitch_m().is_finite()) {
            return Err(invalid("ris pitch must be positive"));
        }
        for (name, v) in [("ris.plate_width_m", r.plate_width_m), ("ris.plate_height_m", r.plate_height_m)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must be positive")));
                }
            }
        }
        finite3("ris.position_m", &r.position_m)?;
        finite3("ris.orientation_deg", &r.orientation_deg)?;
        if ![0.0, 45.0, 90.0].contains(&r.polarization_deg) {
            return Err(invalid("ris.polarization_deg must be 0, 45 or 90"));
        }
        if !(r.initial_phase_spread_deg >= 0.0 && r.initial_phase_spread_deg <= 180.0) {
            return Err(invalid("ris.initial_phase_spread_deg must be in [0, 180]"));
        }
        let p = &self.pattern;
        if p.kind == PatternKind::File && p.path.is_none() {
            return Err(invalid("pattern.path is required for kind = \"file\""));
        }
        if !p.max_gain_dbi.is_finite() || !(p.cross_pol_leakage_db <= 0.0) {
            return Err(invalid("pattern gain must be finite and leakage <= 0 dB"));
        }
        if self.dps.source == DpsSource::File && self.dps.path.is_none() {
            return Err(invalid("dps.path is required for source = \"file\""));
        }
        if self.dps.source == DpsSource::Ideal && !(1..=StateCode::MAX_WIDTH).contains(&self.dps.bits) {
            return Err(invalid("dps.bits out of range"));
        }
        if !(self.sm.c_s.is_finite() && self.sm.c_r.is_finite()) {
            return Err(invalid("sm tuning must be finite"));
        }
        if !(self.noise.sigma_db >= 0.0 && self.noise.sigma_db.is_finite()) {
            return Err(invalid("noise.sigma_db must be non-negative"));
        }
        let c = &self.controller;
        if c.t_g < 1 {
            return Err(invalid("controller.t_g must be at least 1"));
        }
        if c.codebook.is_empty() {
            return Err(invalid("controller.codebook must not be empty"));
        }
        if c.codebook.iter().any(|x| x.width() != c.codebook[0].width()) {
            return Err(invalid("controller.codebook rows must share one width"));
        }
        if let Some(t) = &self.trajectory {
            super::Trajectory::from_config(t)?;
        }
        if self.tracking.activation_distances_m.iter().any(|d| !(*d >= 0.0)) {
            return Err(invalid("tracking.activation_distances_m must be non-negative"));
        }
        if self.tracking.seeds < 1 {
            return Err(invalid("tracking.seeds must be at least 1"));
        }
        if self.exhaustive_budget < 1 {
            return Err(invalid("exhaustive_budget must be at least 1"));
        }
        Ok(())
    }
}
