//! Constrained least-squares fit of the weighted-sum state model.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{DpsModel, DpsOrder, StateCode};
use crate::math::{amplitude_to_db, wrap_deg};
use crate::{Error, Result};

/// Adjacent-state phase jumps closer than this to ±180° cannot be unwrapped
/// reliably.
pub const UNWRAP_AMBIGUITY_DEG: f64 = 5.0;

/// Fitted model plus residual RMSE of the two linear fits.
#[derive(Debug, Clone, PartialEq)]
pub struct DpsFit {
    pub model: DpsModel,
    pub magnitude_rmse_db: f64,
    pub phase_rmse_deg: f64,
}

/// Fits `γ₀…γ_N` (dB, with `γ_n ≤ 0` for `n ≥ 1`) and `∠γ₀…∠γ_N` (degrees)
/// to measured reflection coefficients.
///
/// Phases are unwrapped along increasing code value before the phase fit,
/// which assumes the response is a staircase whose neighbouring codes differ
/// by less than half a turn.
pub fn fit_dps_model(samples: &[(StateCode, Complex64)]) -> Result<DpsFit> {
    let width = match samples.first() {
        Some((code, _)) => code.width(),
        None => return Err(Error::InsufficientSamples("no samples".into())),
    };
    if samples.iter().any(|(c, _)| c.width() != width) {
        return Err(Error::InsufficientSamples("mixed code widths".into()));
    }
    let distinct: BTreeSet<u32> = samples.iter().map(|(c, _)| c.value()).collect();
    if distinct.len() < width as usize + 1 {
        return Err(Error::InsufficientSamples(format!(
            "{} distinct codes for {} parameters",
            distinct.len(),
            width as usize + 1
        )));
    }
    if let Some((code, _)) = samples
        .iter()
        .find(|(_, g)| !(g.norm() > 0.0 && g.norm().is_finite()))
    {
        return Err(Error::InsufficientSamples(format!(
            "sample for code {code} has zero or non-finite magnitude"
        )));
    }

    let mut ordered: Vec<(StateCode, Complex64)> = samples.to_vec();
    ordered.sort_by_key(|(c, _)| c.value());

    let n_params = width as usize + 1;
    let design = DMatrix::from_fn(ordered.len(), n_params, |r, c| {
        if c == 0 || ordered[r].0.bit(c - 1) {
            1.0
        } else {
            0.0
        }
    });
    let rank = design.clone().svd(false, false).rank(1e-9);
    if rank < n_params {
        return Err(Error::InsufficientSamples(format!(
            "codes do not identify every order (rank {rank} < {n_params})"
        )));
    }

    let magnitudes = DVector::from_iterator(
        ordered.len(),
        ordered.iter().map(|(_, g)| amplitude_to_db(g.norm())),
    );
    let phases = DVector::from_vec(unwrap_phases(&ordered)?);

    let mag_params = constrained_lstsq(&design, &magnitudes);
    let phase_params = lstsq(&design, &phases, &vec![true; n_params]);

    let rmse = |params: &DVector<f64>, y: &DVector<f64>| {
        let r = &design * params - y;
        (r.norm_squared() / y.len() as f64).sqrt()
    };
    let magnitude_rmse_db = rmse(&mag_params, &magnitudes);
    let phase_rmse_deg = rmse(&phase_params, &phases);

    let orders = (1..n_params)
        .map(|n| DpsOrder {
            attenuation_db: mag_params[n],
            phase_deg: phase_params[n],
        })
        .collect();
    Ok(DpsFit {
        model: DpsModel {
            gamma0_db: mag_params[0],
            gamma0_deg: phase_params[0],
            orders,
        },
        magnitude_rmse_db,
        phase_rmse_deg,
    })
}

/// Cumulative phase along code order. Expects samples sorted by code.
fn unwrap_phases(ordered: &[(StateCode, Complex64)]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ordered.len());
    let mut prev: Option<(u32, f64, f64)> = None;
    for (code, g) in ordered {
        let wrapped = g.arg().to_degrees();
        let value = match prev {
            None => wrap_deg(wrapped),
            Some((prev_code, prev_wrapped, prev_unwrapped)) => {
                let jump = wrap_deg(wrapped - prev_wrapped);
                if jump.abs() > 180.0 - UNWRAP_AMBIGUITY_DEG {
                    return Err(Error::UnwrapFailure {
                        from: prev_code,
                        to: code.value(),
                        jump_deg: jump,
                    });
                }
                prev_unwrapped + jump
            }
        };
        out.push(value);
        prev = Some((code.value(), wrapped, value));
    }
    Ok(out)
}

/// Least squares on the columns flagged `free`; the other parameters are 0.
fn lstsq(design: &DMatrix<f64>, y: &DVector<f64>, free: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..free.len()).filter(|&c| free[c]).collect();
    let sub = DMatrix::from_fn(design.nrows(), cols.len(), |r, c| design[(r, cols[c])]);
    let solution = sub
        .svd(true, true)
        .solve(y, 1e-12)
        .expect("SVD computed with both factors");
    let mut full = DVector::zeros(free.len());
    for (i, &c) in cols.iter().enumerate() {
        full[c] = solution[i];
    }
    full
}

/// Active-set projection: solve, pin any order with a positive dB weight to
/// zero, re-solve on the remaining free orders until feasible.
fn constrained_lstsq(design: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let mut free = vec![true; design.ncols()];
    loop {
        let params = lstsq(design, y, &free);
        let mut changed = false;
        for n in 1..free.len() {
            if free[n] && params[n] > 0.0 {
                free[n] = false;
                changed = true;
            }
        }
        if !changed {
            return params;
        }
    }
}
