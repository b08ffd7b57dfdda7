use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{AntennaConfig, DpsSource, OrientationMode, PatternKind, ScenarioConfig, TrajectoryConfig};
use crate::antenna::{synthetic_patch_pattern, Orientation, RadiationPattern};
use crate::channel::{LinkBudget, MeasurementNoise, PolarizationVariant, Pose, RisElement, Scene, SmTuning};
use crate::controller::{derive_seed, BgParams};
use crate::dps::DpsModel;
use crate::{Error, Result};

/// Stream tag for drawing element initial phases from the scenario seed.
const PHASE_STREAM: u64 = 0x5048_4153;

const STEP_TOLERANCE: f64 = 1e-9;

/// Straight receiver path sampled at a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    start: Vector3<f64>,
    end: Vector3<f64>,
    count: usize,
    mode: OrientationMode,
    rotation_start_deg: f64,
    rotation_end_deg: f64,
}

impl Trajectory {
    /// The path length must be a whole number of steps.
    pub fn from_config(t: &TrajectoryConfig) -> Result<Self> {
        let start = Vector3::from(t.start_m);
        let end = Vector3::from(t.end_m);
        if !(start.iter().chain(end.iter()).all(|x| x.is_finite())) {
            return Err(Error::Validation("trajectory endpoints must be finite".into()));
        }
        if !(t.step_m > 0.0 && t.step_m.is_finite()) {
            return Err(Error::Validation("trajectory.step_m must be positive".into()));
        }
        if !(t.rotation_start_deg.is_finite() && t.rotation_end_deg.is_finite()) {
            return Err(Error::Validation("trajectory rotation bounds must be finite".into()));
        }
        let steps = (end - start).norm() / t.step_m;
        let whole = steps.round();
        if (steps - whole).abs() > STEP_TOLERANCE * whole.max(1.0) {
            return Err(Error::Validation(format!(
                "trajectory length is {steps:.6} steps, not a whole number"
            )));
        }
        Ok(Self {
            start,
            end,
            count: whole as usize + 1,
            mode: t.orientation_mode,
            rotation_start_deg: t.rotation_start_deg,
            rotation_end_deg: t.rotation_end_deg,
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn fraction(&self, i: usize) -> f64 {
        if self.count == 1 {
            0.0
        } else {
            i as f64 / (self.count - 1) as f64
        }
    }

    pub fn position(&self, i: usize) -> Vector3<f64> {
        self.start + (self.end - self.start) * self.fraction(i)
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        (0..self.count).map(|i| self.position(i)).collect()
    }

    /// Rotation about the receiver boresight at location `i`, degrees.
    pub fn rotation_deg(&self, i: usize) -> f64 {
        match self.mode {
            OrientationMode::Fixed => 0.0,
            OrientationMode::RotateAboutX => {
                self.rotation_start_deg + (self.rotation_end_deg - self.rotation_start_deg) * self.fraction(i)
            }
        }
    }
}

/// A scene assembled from a configuration.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub config: ScenarioConfig,
    pub scene: Scene,
    pub dps: DpsModel,
    pub pattern: Arc<RadiationPattern>,
    pub trajectory: Option<Trajectory>,
    pub warnings: Vec<String>,
}

impl BuiltScenario {
    /// Controller parameters from `[controller]` with the scenario seed.
    pub fn bg_params(&self) -> Result<BgParams> {
        let c = &self.config.controller;
        BgParams::new(c.t_r, c.t_g, self.config.seed, c.codebook.clone())
    }

    /// Receiver pose at trajectory location `i`. Fails when the scenario
    /// has no trajectory.
    pub fn rx_at(&self, i: usize) -> Result<Pose> {
        let t = self
            .trajectory
            .as_ref()
            .ok_or_else(|| Error::Validation("scenario has no [trajectory]".into()))?;
        if i >= t.len() {
            return Err(Error::InvalidArgument(format!("location {i} outside a {}-point path", t.len())));
        }
        let mut o = self.config.rx.orientation_deg;
        o[0] += t.rotation_deg(i);
        pose(&AntennaConfig { position_m: t.position(i).into(), orientation_deg: o, ..self.config.rx.clone() }, &self.pattern)
    }

    /// One scene per trajectory location.
    pub fn trajectory_scenes(&self) -> Result<Vec<Scene>> {
        let n = self.trajectory.as_ref().map_or(0, |t| t.len());
        (0..n).map(|i| Ok(self.scene.with_rx(self.rx_at(i)?))).collect()
    }
}

fn pose(a: &AntennaConfig, pattern: &Arc<RadiationPattern>) -> Result<Pose> {
    let [x, y, z] = a.orientation_deg;
    Ok(Pose::new(Vector3::from(a.position_m), Orientation::new(x, y, z)?, pattern.clone())?
        .with_initial_phase(a.initial_phase_deg))
}

pub fn load_pattern(cfg: &ScenarioConfig) -> Result<RadiationPattern> {
    let p = &cfg.pattern;
    match p.kind {
        PatternKind::Synthetic => synthetic_patch_pattern(p.max_gain_dbi, p.cross_pol_leakage_db),
        PatternKind::File => RadiationPattern::read_csv(cfg.resolve(p.path.as_deref().expect("validated"))),
    }
}

pub fn load_dps(cfg: &ScenarioConfig) -> Result<DpsModel> {
    match cfg.dps.source {
        DpsSource::Table1 => Ok(DpsModel::table_one()),
        DpsSource::Ideal => Ok(DpsModel::ideal_uniform(cfg.dps.bits)),
        DpsSource::File => {
            let path = cfg.resolve(cfg.dps.path.as_deref().expect("validated"));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            DpsModel::from_toml(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        }
    }
}

/// Element centres in the array frame: row-major, row 0 on top, the array
/// plane spanned by local y (columns) and z (rows).
pub fn element_offsets(rows: usize, cols: usize, pitch: f64) -> Vec<Vector3<f64>> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            out.push(Vector3::new(
                0.0,
                (c as f64 - (cols as f64 - 1.0) / 2.0) * pitch,
                ((rows as f64 - 1.0) / 2.0 - r as f64) * pitch,
            ));
        }
    }
    out
}

/// Assembles the scene. Geometry closer than the far-field distance is
/// logged and kept in [`BuiltScenario::warnings`].
pub fn build_scene(cfg: &ScenarioConfig) -> Result<BuiltScenario> {
    cfg.validate()?;
    let pattern = Arc::new(load_pattern(cfg)?);
    let dps = load_dps(cfg)?;
    if dps.bits() != cfg.controller.codebook[0].width() {
        return Err(Error::Validation(format!(
            "codebook width {} does not match the {}-bit shifter",
            cfg.controller.codebook[0].width(),
            dps.bits()
        )));
    }
    let budget = LinkBudget::from_frequency(cfg.link.tx_power_w, cfg.link.frequency_hz)?;
    let tx = pose(&cfg.tx, &pattern)?;
    let rx = pose(&cfg.rx, &pattern)?;

    let r = &cfg.ris;
    let [ox, oy, oz] = r.orientation_deg;
    let array_o = Orientation::new(ox, oy, oz)?;
    let rot = array_o.matrix();
    let pitch = cfg.pitch_m();
    let variant = PolarizationVariant::from_degrees(r.polarization_deg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, PHASE_STREAM));
    let mut elements = Vec::with_capacity(cfg.element_count());
    for offset in element_offsets(r.rows, r.cols, pitch) {
        let phase = if r.initial_phase_spread_deg > 0.0 {
            rng.random_range(-r.initial_phase_spread_deg..=r.initial_phase_spread_deg)
        } else {
            0.0
        };
        let p = Pose::new(Vector3::from(r.position_m) + rot * offset, array_o, pattern.clone())?
            .with_initial_phase(phase);
        elements.push(
            RisElement::new(
                p,
                dps.clone(),
                r.plate_width_m.unwrap_or(pitch),
                r.plate_height_m.unwrap_or(pitch),
            )?
            .with_variant(variant),
        );
    }
    let scene = Scene::new(tx, rx, elements, budget)
        .with_tuning(SmTuning::new(cfg.sm.c_s, cfg.sm.c_r)?)
        .with_noise(MeasurementNoise { sigma_db: cfg.noise.sigma_db, seed: cfg.noise.seed });
    let trajectory = cfg.trajectory.as_ref().map(Trajectory::from_config).transpose()?;
    let mut built = BuiltScenario {
        config: cfg.clone(),
        scene,
        dps,
        pattern,
        trajectory,
        warnings: Vec::new(),
    };
    let mut warnings = built.scene.fraunhofer_warnings();
    if built.trajectory.is_some() {
        for s in built.trajectory_scenes()? {
            warnings.extend(s.fraunhofer_warnings().into_iter().filter(|w| w.contains("rx")));
        }
    }
    warnings.dedup();
    for w in &warnings {
        log::warn!("{w}");
    }
    built.warnings = warnings;
    Ok(built)
}
