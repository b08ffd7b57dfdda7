//! Polarimetric antenna patterns and the rotation algebra used to read a
//! rotated antenna's response in the global frame.
//!
//! Angle pairs are `(θ, φ)`: elevation measured up from the x-y plane and
//! azimuth from +x. A pattern is stored in the antenna's own frame; for an
//! antenna with orientation `R` the global response toward `(θ, φ)` is
//!
//! ```text
//! 𝗘(θ,φ) = T(θ,φ)ᵀ · R · T(θ̃,φ̃) · E(θ̃,φ̃)
//! ```
//!
//! where `(θ̃, φ̃)` is the same direction seen from the antenna frame and `T`
//! maps the vertical/horizontal components to Cartesian vectors.

mod pattern;

use nalgebra::{Matrix3, Matrix3x2, Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math::wrap_deg;
use crate::{Error, Result};

pub use pattern::{synthetic_patch_pattern, RadiationPattern, BACK_LOBE_DB, PATTERN_CSV_HEADER};

/// Vertical/horizontal complex field components.
pub type FieldPair = Vector2<Complex64>;

/// Rotation of an antenna or plate about the global x, y and z axes, in
/// degrees. Applied as `R = R_z · R_y · R_x`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Orientation {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation {
        rx: 0.0,
        ry: 0.0,
        rz: 0.0,
    };

    /// Normalises each angle into (−180°, 180°].
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        if !(rx.is_finite() && ry.is_finite() && rz.is_finite()) {
            return Err(Error::InvalidArgument("orientation angles must be finite".into()));
        }
        Ok(Self {
            rx: wrap_deg(rx),
            ry: wrap_deg(ry),
            rz: wrap_deg(rz),
        })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        rotation_matrix(self)
    }
}

/// Propagation direction `(θ, φ)` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub theta: f64,
    pub phi: f64,
}

impl AnglePair {
    /// `θ` must lie in [−90°, 90°]; `φ` is wrapped into (−180°, 180°].
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) || theta.abs() > 90.0 {
            return Err(Error::InvalidArgument(format!(
                "invalid angle pair ({theta}, {phi})"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_deg(phi),
        })
    }
}

/// Angle pair seen from a rotated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalAngles {
    pub angles: AnglePair,
    /// The direction sits on the local pole, where `φ̃` is undefined and set
    /// to 0.
    pub pole_ambiguity: bool,
}

/// Polarimetric response plus the pole flag of the local lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarimetricResponse {
    pub field: FieldPair,
    pub pole_ambiguity: bool,
}

const POLE_TOLERANCE: f64 = 1e-9;

/// `R = R_z(r_z)·R_y(r_y)·R_x(r_x)`.
pub fn rotation_matrix(o: &Orientation) -> Matrix3<f64> {
    if o.rx == 0.0 && o.ry == 0.0 && o.rz == 0.0 {
        return Matrix3::identity();
    }
    let (sx, cx) = o.rx.to_radians().sin_cos();
    let (sy, cy) = o.ry.to_radians().sin_cos();
    let (sz, cz) = o.rz.to_radians().sin_cos();
    Matrix3::new(
        cz * cy,
        cz * sy * sx - sz * cx,
        cz * sy * cx + sz * sx,
        sz * cy,
        sz * sy * sx + cz * cx,
        sz * sy * cx - cz * sx,
        -sy,
        cy * sx,
        cy * cx,
    )
}

/// Rotation by `deg` about the x axis, used for polarization variants.
pub fn rotation_about_x(deg: f64) -> Matrix3<f64> {
    rotation_matrix(&Orientation {
        rx: deg,
        ry: 0.0,
        rz: 0.0,
    })
}

/// Unit vector `(cosθ cosφ, cosθ sinφ, sinθ)`.
pub fn direction_vector(a: &AnglePair) -> Vector3<f64> {
    let (st, ct) = a.theta.to_radians().sin_cos();
    let (sp, cp) = a.phi.to_radians().sin_cos();
    Vector3::new(ct * cp, ct * sp, st)
}

/// Angle pair of a non-zero vector.
pub fn angle_pair_of(v: &Vector3<f64>) -> LocalAngles {
    let u = v.normalize();
    let z = u.z.clamp(-1.0, 1.0);
    let theta = z.asin().to_degrees();
    if z.abs() > 1.0 - POLE_TOLERANCE {
        LocalAngles {
            angles: AnglePair {
                theta,
                phi: 0.0,
            },
            pole_ambiguity: true,
        }
    } else {
        LocalAngles {
            angles: AnglePair {
                theta,
                phi: wrap_deg(u.y.atan2(u.x).to_degrees()),
            },
            pole_ambiguity: false,
        }
    }
}

/// Direction `a` expressed in the frame rotated by `r`: `s̃ = Rᵀ·s(a)`.
///
/// The azimuth uses the two-argument arctangent so that the quadrant
/// survives.
pub fn local_angles(r: &Matrix3<f64>, a: &AnglePair) -> LocalAngles {
    if *r == Matrix3::identity() {
        return LocalAngles {
            angles: *a,
            pole_ambiguity: a.theta.abs() >= 90.0,
        };
    }
    angle_pair_of(&(r.transpose() * direction_vector(a)))
}

/// Columns are the vertical and horizontal polarization directions at `a`.
pub fn spherical_basis(a: &AnglePair) -> Matrix3x2<f64> {
    let (st, ct) = a.theta.to_radians().sin_cos();
    let (sp, cp) = a.phi.to_radians().sin_cos();
    Matrix3x2::new(st * cp, -sp, st * sp, cp, -ct, 0.0)
}

/// Polarization rotation matrix `M_o = T(a)ᵀ·R·T(ã)` for a known local pair.
pub fn polarization_rotation(r: &Matrix3<f64>, global: &AnglePair, local: &AnglePair) -> nalgebra::Matrix2<f64> {
    spherical_basis(global).transpose() * r * spherical_basis(local)
}

/// Response of pattern `p` mounted with orientation `o`, toward global `a`.
pub fn rotated_pattern_response(p: &RadiationPattern, o: &Orientation, a: &AnglePair) -> PolarimetricResponse {
    response_with_rotation(p, &rotation_matrix(o), a)
}

/// Same as [`rotated_pattern_response`] for an explicit rotation matrix.
pub fn response_with_rotation(p: &RadiationPattern, r: &Matrix3<f64>, a: &AnglePair) -> PolarimetricResponse {
    if *r == Matrix3::identity() {
        return PolarimetricResponse {
            field: sample_pattern(p, a),
            pole_ambiguity: false,
        };
    }
    let local = local_angles(r, a);
    let e = sample_pattern(p, &local.angles);
    let m = polarization_rotation(r, a, &local.angles).map(|x| Complex64::new(x, 0.0));
    PolarimetricResponse {
        field: m * e,
        pole_ambiguity: local.pole_ambiguity,
    }
}

/// Bilinear lookup of the stored pattern.
pub fn sample_pattern(p: &RadiationPattern, a: &AnglePair) -> FieldPair {
    p.sample(a.theta, a.phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn orientation() -> impl Strategy<Value = Orientation> {
        (-180.0f64..180.0, -180.0f64..180.0, -180.0f64..180.0)
            .prop_map(|(x, y, z)| Orientation::new(x, y, z).unwrap())
    }

    fn angle_pair() -> impl Strategy<Value = AnglePair> {
        (-90.0f64..=90.0, -180.0f64..180.0).prop_map(|(t, p)| AnglePair::new(t, p).unwrap())
    }

    #[test]
    fn zero_orientation_is_identity() {
        assert_eq!(rotation_matrix(&Orientation::IDENTITY), Matrix3::identity());
    }

    #[test]
    fn z_rotation_maps_x_to_y() {
        let r = rotation_matrix(&Orientation::new(0.0, 0.0, 90.0).unwrap());
        let v = r * Vector3::x();
        assert!((v - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn composition_order_is_zyx() {
        let o = Orientation::new(10.0, 20.0, 30.0).unwrap();
        let rx = nalgebra::Rotation3::from_axis_angle(&Vector3::x_axis(), 10f64.to_radians());
        let ry = nalgebra::Rotation3::from_axis_angle(&Vector3::y_axis(), 20f64.to_radians());
        let rz = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), 30f64.to_radians());
        let expected = (rz * ry * rx).into_inner();
        assert!((rotation_matrix(&o) - expected).norm() < 1e-14);
    }

    #[test]
    fn direction_vector_examples() {
        assert!((direction_vector(&AnglePair::new(0.0, 0.0).unwrap()) - Vector3::x()).norm() < 1e-15);
        assert!((direction_vector(&AnglePair::new(90.0, 37.0).unwrap()) - Vector3::z()).norm() < 1e-15);
        let v = direction_vector(&AnglePair::new(45.0, 45.0).unwrap());
        assert!((v - Vector3::new(0.5, 0.5, 2f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn local_angles_examples() {
        let a = AnglePair::new(12.0, -47.0).unwrap();
        assert_eq!(local_angles(&Matrix3::identity(), &a).angles, a);

        let r = rotation_matrix(&Orientation::new(0.0, 0.0, 90.0).unwrap());
        let l = local_angles(&r, &AnglePair::new(0.0, 90.0).unwrap());
        assert!(l.angles.theta.abs() < 1e-12 && l.angles.phi.abs() < 1e-12);
        assert!(!l.pole_ambiguity);
    }

    #[test]
    fn pole_is_flagged() {
        let r = rotation_matrix(&Orientation::new(0.0, 90.0, 0.0).unwrap());
        let l = local_angles(&r, &AnglePair::new(0.0, 0.0).unwrap());
        assert!(l.pole_ambiguity);
        assert_eq!(l.angles.phi, 0.0);
        assert!((l.angles.theta - 90.0).abs() < 1e-9);
    }

    #[test]
    fn basis_at_zenith() {
        let t = spherical_basis(&AnglePair::new(90.0, 0.0).unwrap());
        assert!((t.column(0) - Vector3::x()).norm() < 1e-15);
        assert!((t.column(1) - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn invalid_angles_are_rejected() {
        assert!(AnglePair::new(91.0, 0.0).is_err());
        assert!(AnglePair::new(f64::NAN, 0.0).is_err());
        assert!(Orientation::new(f64::INFINITY, 0.0, 0.0).is_err());
        assert_eq!(Orientation::new(270.0, -180.0, 0.0).unwrap().rx, -90.0);
    }

    proptest! {
        #[test]
        fn rotation_is_proper_orthonormal(o in orientation()) {
            let r = rotation_matrix(&o);
            prop_assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn local_lookup_matches_vector_rotation(o in orientation(), a in angle_pair()) {
            let r = rotation_matrix(&o);
            let l = local_angles(&r, &a);
            prop_assume!(!l.pole_ambiguity);
            let lhs = direction_vector(&l.angles);
            let rhs = r.transpose() * direction_vector(&a);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn basis_is_orthonormal_and_transverse(a in angle_pair()) {
            let t = spherical_basis(&a);
            prop_assert!((t.transpose() * t - nalgebra::Matrix2::identity()).norm() < 1e-12);
            prop_assert!((t.transpose() * direction_vector(&a)).norm() < 1e-12);
        }
    }
}
