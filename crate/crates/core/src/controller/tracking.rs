use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::search::{bg_with, gs_with};
use super::{derive_seed, BgParams, Evaluator, StateMatrix};
use crate::channel::CompiledScene;
use crate::{Error, Result};

/// Quality the warm-started GS has to beat after a small move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStartReference {
    /// The incumbent quality measured at an earlier location. A matrix is
    /// replaced only by one that beats that stale reading, so after a
    /// quality drop the state may stay frozen until full BG runs again.
    #[default]
    Carried,
    /// Re-measure the previous matrix at the new location first (one extra
    /// evaluation).
    Remeasured,
}

/// Outcome of the tracking mechanism at one receiver location.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedLocation {
    pub index: usize,
    /// Whether full BG ran here (otherwise warm-started GS).
    pub full_bg: bool,
    pub states: StateMatrix,
    /// Noise-free quality of `states` at this location.
    pub quality_db: f64,
    /// Noise-free quality of full BG run at this location.
    pub reference_db: f64,
    /// `reference_db − quality_db`.
    pub relative_loss_db: f64,
    pub evaluations: usize,
}

/// Seed of the full BG run at location `i`; shared by tracked runs and the
/// always-full reference so both agree wherever full BG runs.
fn location_params(p: &BgParams, i: usize) -> BgParams {
    p.with_seed(derive_seed(p.seed, i as u64))
}

/// Noise-free quality of full BG at every location.
pub fn full_bg_reference(scenes: &[CompiledScene], p: &BgParams) -> Result<Vec<f64>> {
    scenes
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let pi = location_params(p, i);
            let out = bg_with(&mut Evaluator::new(s, pi.seed), &pi)?;
            s.quality_db(&out.states)
        })
        .collect()
}

const DISTANCE_TOLERANCE: f64 = 1e-9;

/// Runs the tracking mechanism along a receiver trajectory.
///
/// Full BG runs at location 0. Afterwards the receiver displacement is
/// accumulated; once it reaches `activation_distance` full BG runs again
/// and the accumulator resets, otherwise GS is warm-started from the
/// previous matrix. `reference` holds the always-full-BG qualities from
/// [`full_bg_reference`] and is computed when `None`.
pub fn tracked_run(
    scenes: &[CompiledScene],
    positions: &[Vector3<f64>],
    activation_distance: f64,
    p: &BgParams,
    warm: WarmStartReference,
    reference: Option<&[f64]>,
) -> Result<Vec<TrackedLocation>> {
    if scenes.len() != positions.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scenes for {} positions",
            scenes.len(),
            positions.len()
        )));
    }
    if !(activation_distance >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "activation distance must be non-negative, got {activation_distance}"
        )));
    }
    let computed;
    let reference = match reference {
        Some(r) => r,
        None => {
            computed = full_bg_reference(scenes, p)?;
            &computed
        }
    };
    if reference.len() != scenes.len() {
        return Err(Error::DimensionMismatch("reference length differs from the trajectory".into()));
    }

    let mut out = Vec::with_capacity(scenes.len());
    let mut carried: Option<(StateMatrix, f64)> = None;
    let mut travelled = 0.0;
    for (i, scene) in scenes.iter().enumerate() {
        if i > 0 {
            travelled += (positions[i] - positions[i - 1]).norm();
        }
        let pi = location_params(p, i);
        let mut ev = Evaluator::new(scene, pi.seed);
        let full = match &carried {
            None => true,
            Some(_) => travelled + DISTANCE_TOLERANCE >= activation_distance,
        };
        let outcome = if full {
            travelled = 0.0;
            bg_with(&mut ev, &pi)?
        } else {
            let (start, stale) = carried.as_ref().expect("carried state after the first location");
            let start_q = match warm {
                WarmStartReference::Carried => *stale,
                WarmStartReference::Remeasured => ev.measure(start)?.1,
            };
            gs_with(&mut ev, start, start_q, &pi, None)?
        };
        let quality_db = scene.quality_db(&outcome.states)?;
        out.push(TrackedLocation {
            index: i,
            full_bg: full,
            quality_db,
            reference_db: reference[i],
            relative_loss_db: reference[i] - quality_db,
            evaluations: ev.count() as usize,
            states: outcome.states.clone(),
        });
        carried = Some((outcome.states, outcome.quality_db));
    }
    Ok(out)
}
