use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateMatrix;
use crate::channel::CompiledScene;
use crate::dps::{state_phase_wrapped, DpsModel, StateCode};
use crate::math::{power_to_db, wrap_deg};
use crate::{Error, Result};

/// Phase every antenna-mode term is aligned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePhase {
    /// Phase of the state-independent part, LoS plus all structural-mode
    /// terms. With `|Γ| ≤ 1` no DPS setting can exceed the result.
    #[default]
    StaticSum,
    /// Phase of the LoS term alone.
    LineOfSight,
}

/// LoS gain below which the LoS phase is considered undefined.
const LOS_FLOOR_DB: f64 = -200.0;

/// Continuous, lossless per-element phases and the resulting quality.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfectBeamforming {
    pub phases_deg: Vec<f64>,
    pub quality_db: f64,
}

fn reference_phase(scene: &CompiledScene, reference: ReferencePhase) -> Option<f64> {
    let floor = |c: Complex64| power_to_db(c.norm_sqr() / scene.tx_power()) >= LOS_FLOOR_DB;
    let c = match reference {
        ReferencePhase::StaticSum => scene.static_sum(),
        ReferencePhase::LineOfSight => scene.los(),
    };
    floor(c).then(|| c.arg())
}

/// Per-element phases `χₙ` that co-phase every antenna-mode term with the
/// reference. When the reference is too weak to have a phase, the first
/// element's own phase is used instead.
fn alignment_phases(scene: &CompiledScene, reference: ReferencePhase) -> Vec<f64> {
    let n = scene.element_count();
    let units: Vec<Complex64> = (0..n).map(|i| scene.am_unit(i, scene.default_variant(i))).collect();
    let target = reference_phase(scene, reference).unwrap_or_else(|| units.first().map_or(0.0, |u| u.arg()));
    units
        .iter()
        .map(|u| if u.norm() > 0.0 { wrap_deg((target - u.arg()).to_degrees()) } else { 0.0 })
        .collect()
}

/// Upper-bound controller: sets each `Γₙ = e^{jχₙ}` with continuous phase
/// and no attenuation so that every antenna-mode term adds in phase with
/// the reference. Structural-mode terms stay as they are.
pub fn perfect_beamforming(scene: &CompiledScene, reference: ReferencePhase) -> Result<PerfectBeamforming> {
    let phases_deg = alignment_phases(scene, reference);
    let gammas: Vec<Complex64> = phases_deg
        .iter()
        .map(|d| Complex64::from_polar(1.0, d.to_radians()))
        .collect();
    let c = scene.coefficient_with_gammas(&gammas)?;
    Ok(PerfectBeamforming {
        phases_deg,
        quality_db: super::coefficient_quality(scene, c),
    })
}

/// Code of `model` whose wrapped phase is nearest to `target_deg`; ties go
/// to the lower code.
pub fn nearest_state(model: &DpsModel, target_deg: f64) -> StateCode {
    let mut best = StateCode::zero(model.bits());
    let mut best_err = f64::INFINITY;
    for code in StateCode::all(model.bits()) {
        let err = wrap_deg(state_phase_wrapped(model, code) - target_deg).abs();
        if err < best_err {
            best = code;
            best_err = err;
        }
    }
    best
}

/// Perfect beamforming quantized to the nearest DPS phase. Attenuation is
/// ignored when choosing and applied when evaluating.
pub fn beamforming_with_dps(
    scene: &CompiledScene,
    model: &DpsModel,
    reference: ReferencePhase,
) -> Result<(StateMatrix, f64)> {
    for n in 0..scene.element_count() {
        if scene.bits(n) != model.bits() {
            return Err(Error::DimensionMismatch(format!(
                "element {n} has a {}-bit shifter, model has {}",
                scene.bits(n),
                model.bits()
            )));
        }
    }
    let codes = alignment_phases(scene, reference)
        .iter()
        .map(|&chi| nearest_state(model, chi))
        .collect();
    let states = StateMatrix::new(codes)?;
    let q = scene.quality_db(&states)?;
    Ok((states, q))
}
