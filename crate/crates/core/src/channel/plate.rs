//! Structural-mode polarization matrices of an element's conducting plate.
//!
//! Scattering uses physical optics for a perfectly conducting rectangle:
//! the induced current `J ∝ n × (k̂_i × E_i)` radiates with the array factor
//! of a uniformly illuminated rectangle,
//!
//! ```text
//! I(q) = W·H·sinc(k W (q·â)/2)·sinc(k H (q·b̂)/2),   q = u_t + u_s
//! ```
//!
//! with `u_t`, `u_s` the unit vectors from the plate toward the source and
//! the observer. Plain PO is not reciprocal away from the specular
//! direction, so the polarization part is averaged with its swapped
//! transpose; at the specular direction the two coincide.
//!
//! Reflection applies `diag(R⊥, R∥) = diag(−1, +1)` in a basis tied to the
//! plane of incidence and maps it to the V/H bases of the two directions.

use nalgebra::{Matrix2, Matrix3x2, Vector3};
use num_complex::Complex64;

use super::{LinkBudget, RisElement, SmTuning};
use crate::antenna::{angle_pair_of, direction_vector, spherical_basis, AnglePair};
use crate::math::sinc;
use crate::{Error, Result};

fn basis_of(dir: &Vector3<f64>) -> Matrix3x2<f64> {
    spherical_basis(&angle_pair_of(dir).angles)
}

fn to_complex(m: Matrix2<f64>) -> Matrix2<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `diag(R⊥, R∥)` of a perfect conductor.
pub fn plate_reflection_matrix() -> Matrix2<Complex64> {
    to_complex(Matrix2::new(-1.0, 0.0, 0.0, 1.0))
}

/// PO current operator projected on the scattered basis, before
/// symmetrization: `T(u_s)ᵀ·N(u_t)·T(u_t)` with
/// `N·F = −u_t (n·F) + F (n·u_t)`.
fn po_projection(n: &Vector3<f64>, u_t: &Vector3<f64>, u_s: &Vector3<f64>) -> Matrix2<f64> {
    let t_in = basis_of(u_t);
    let t_out = basis_of(u_s);
    let current = -(u_t * (n.transpose() * t_in)) + t_in * n.dot(u_t);
    t_out.transpose() * current
}

pub(crate) fn scattering_from_dirs(
    e: &RisElement,
    u_t: &Vector3<f64>,
    u_s: &Vector3<f64>,
    lb: &LinkBudget,
) -> Result<Matrix2<Complex64>> {
    let (n, a, b) = e.plate_axes();
    let cos_inc = n.dot(u_t);
    if cos_inc <= 0.0 {
        return Err(Error::BackIncidence { cos_incidence: cos_inc });
    }
    if n.dot(u_s) <= 0.0 {
        // Observer behind the plate: shadowed.
        return Ok(Matrix2::zeros());
    }
    let k = lb.wave_number();
    let q = u_t + u_s;
    let (w, h) = (e.plate_width(), e.plate_height());
    let area_factor = w * h * sinc(k * w * q.dot(&a) / 2.0) * sinc(k * h * q.dot(&b) / 2.0);
    let p = (po_projection(&n, u_t, u_s) + po_projection(&n, u_s, u_t).transpose()) / 2.0;
    let scale = Complex64::new(0.0, -4.0 * std::f64::consts::PI / lb.wavelength().powi(2) * area_factor);
    Ok(to_complex(p) * scale)
}

/// Scattering matrix `M_sca` of the element's plate for a wave arriving
/// from direction `inc` (pointing from the plate toward the source) and
/// observed toward `sca`.
///
/// At normal incidence and backscatter the co-polar entries have magnitude
/// `4π·W·H/λ²`, the PO radar cross-section amplitude.
pub fn plate_scattering_matrix(
    e: &RisElement,
    inc: &AnglePair,
    sca: &AnglePair,
    lb: &LinkBudget,
) -> Result<Matrix2<Complex64>> {
    scattering_from_dirs(e, &direction_vector(inc), &direction_vector(sca), lb)
}

pub(crate) fn reflection_from_dirs(e: &RisElement, u_t: &Vector3<f64>, u_s: &Vector3<f64>) -> Matrix2<Complex64> {
    let (n, a, _) = e.plate_axes();
    let mut perp = u_t.cross(u_s);
    if perp.norm() < 1e-9 {
        perp = n.cross(u_t);
    }
    if perp.norm() < 1e-9 {
        perp = a;
    }
    let perp = perp.normalize();
    let par_in = perp.cross(&(-u_t));
    let par_out = perp.cross(u_s);
    let t_in = basis_of(u_t);
    let t_out = basis_of(u_s);
    let b_in = Matrix2::new(
        perp.dot(&t_in.column(0)),
        perp.dot(&t_in.column(1)),
        par_in.dot(&t_in.column(0)),
        par_in.dot(&t_in.column(1)),
    );
    let b_out = Matrix2::new(
        perp.dot(&t_out.column(0)),
        perp.dot(&t_out.column(1)),
        par_out.dot(&t_out.column(0)),
        par_out.dot(&t_out.column(1)),
    );
    to_complex(b_out.transpose()) * plate_reflection_matrix() * to_complex(b_in)
}

/// Reflection matrix `M_ref` expressed in the V/H bases of `inc` and `sca`.
pub fn reflection_polarization_matrix(e: &RisElement, inc: &AnglePair, sca: &AnglePair) -> Matrix2<Complex64> {
    reflection_from_dirs(e, &direction_vector(inc), &direction_vector(sca))
}

pub(crate) fn sm_matrix_from_dirs(
    e: &RisElement,
    u_t: &Vector3<f64>,
    u_s: &Vector3<f64>,
    tuning: &SmTuning,
    lb: &LinkBudget,
) -> Result<Matrix2<Complex64>> {
    let mut m = Matrix2::zeros();
    if tuning.c_s != 0.0 {
        m += scattering_from_dirs(e, u_t, u_s, lb)? * Complex64::new(tuning.c_s, 0.0);
    }
    if tuning.c_r != 0.0 {
        m += reflection_from_dirs(e, u_t, u_s) * Complex64::new(tuning.c_r, 0.0);
    }
    Ok(m)
}

/// `M_sm = c_s·M_sca + c_r·M_ref`.
pub fn sm_polarization_matrix(
    e: &RisElement,
    inc: &AnglePair,
    sca: &AnglePair,
    tuning: &SmTuning,
    lb: &LinkBudget,
) -> Result<Matrix2<Complex64>> {
    sm_matrix_from_dirs(e, &direction_vector(inc), &direction_vector(sca), tuning, lb)
}
