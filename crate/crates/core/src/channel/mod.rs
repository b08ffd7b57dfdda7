//! Channel coefficients of a transmitter → receiver link with a RIS.
//!
//! Every coefficient is a complex baseband amplitude. The overall link is
//!
//! ```text
//! C = C_los + Σₙ (C_am,n + C_sm,n)
//! ```
//!
//! where the antenna-mode term `C_am` is the only one that depends on the
//! DPS state of element `n`. Each RIS element is modelled as an antenna
//! terminated by a DPS (antenna mode) sitting on a small conducting plate
//! (structural mode).
//!
//! Polarization bases: `𝗘` responses are read in the `T(θ,φ)` basis of the
//! departure direction. For a path that bounces at an element, the 2×2
//! polarization matrices map the incident field, expressed in the basis of
//! the direction from the element back to the source, to the scattered
//! field in the basis of the direction from the element to the observer.

mod plate;
mod scene;

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antenna::{angle_pair_of, response_with_rotation, rotation_about_x, FieldPair, Orientation, RadiationPattern};
use crate::controller::StateMatrix;
use crate::dps::{state_reflection, DpsModel, StateCode};
use crate::math::{wrap_deg, SPEED_OF_LIGHT};
use crate::{Error, Result};

pub use plate::{plate_reflection_matrix, plate_scattering_matrix, reflection_polarization_matrix, sm_polarization_matrix};
pub use scene::{quality_db, CompiledScene, MeasurementNoise, Scene};

/// `M_d = diag(1, −1)`: flips the horizontal reference between facing
/// antennas.
pub fn m_d() -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    )
}

/// Position, orientation and pattern of an antenna (or RIS element).
#[derive(Debug, Clone)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Orientation,
    pub pattern: Arc<RadiationPattern>,
    initial_phase_deg: f64,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: Orientation, pattern: Arc<RadiationPattern>) -> Result<Self> {
        if !position.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument("position must be finite".into()));
        }
        Ok(Self {
            position,
            orientation,
            pattern,
            initial_phase_deg: 0.0,
        })
    }

    /// Sets the initial phase ψ, normalised into (−180°, 180°].
    pub fn with_initial_phase(mut self, deg: f64) -> Self {
        self.initial_phase_deg = wrap_deg(deg);
        self
    }

    pub fn initial_phase_deg(&self) -> f64 {
        self.initial_phase_deg
    }

    /// Response toward the unit direction `dir` for an explicit rotation.
    fn response(&self, rotation: &Matrix3<f64>, dir: &Vector3<f64>) -> FieldPair {
        let a = angle_pair_of(dir).angles;
        response_with_rotation(&self.pattern, rotation, &a).field
    }
}

/// Linear polarization variants offered by an element: its antenna rotated
/// about its own boresight by 0°, 45° or 90°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, PartialOrd, Ord)]
pub enum PolarizationVariant {
    #[default]
    #[serde(rename = "0")]
    Deg0,
    #[serde(rename = "45")]
    Deg45,
    #[serde(rename = "90")]
    Deg90,
}

impl PolarizationVariant {
    pub const ALL: [PolarizationVariant; 3] = [Self::Deg0, Self::Deg45, Self::Deg90];

    pub fn degrees(self) -> f64 {
        match self {
            Self::Deg0 => 0.0,
            Self::Deg45 => 45.0,
            Self::Deg90 => 90.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.degrees() == deg)
            .ok_or_else(|| Error::InvalidArgument(format!("no polarization variant at {deg} degrees")))
    }
}

/// One RIS element: antenna + DPS + conducting plate.
///
/// The plate is centred at the pose position, its normal is the antenna
/// boresight (`R·x̂`), its width runs along `R·ŷ` and its height along `R·ẑ`.
#[derive(Debug, Clone)]
pub struct RisElement {
    pub pose: Pose,
    pub dps: DpsModel,
    plate_width: f64,
    plate_height: f64,
    pub polarization_variant: PolarizationVariant,
}

impl RisElement {
    pub fn new(pose: Pose, dps: DpsModel, plate_width: f64, plate_height: f64) -> Result<Self> {
        if !(plate_width > 0.0 && plate_height > 0.0) || !(plate_width.is_finite() && plate_height.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "plate dimensions must be positive, got {plate_width} x {plate_height}"
            )));
        }
        Ok(Self {
            pose,
            dps,
            plate_width,
            plate_height,
            polarization_variant: PolarizationVariant::Deg0,
        })
    }

    pub fn with_variant(mut self, v: PolarizationVariant) -> Self {
        self.polarization_variant = v;
        self
    }

    pub fn plate_width(&self) -> f64 {
        self.plate_width
    }

    pub fn plate_height(&self) -> f64 {
        self.plate_height
    }

    /// Rotation of the element antenna for a given variant.
    pub fn antenna_rotation(&self, v: PolarizationVariant) -> Matrix3<f64> {
        let r = self.pose.orientation.matrix();
        if v == PolarizationVariant::Deg0 {
            r
        } else {
            r * rotation_about_x(v.degrees())
        }
    }

    /// Plate normal, width axis and height axis in the global frame.
    pub fn plate_axes(&self) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
        let r = self.pose.orientation.matrix();
        (r.column(0).into(), r.column(1).into(), r.column(2).into())
    }

    /// Antenna response of the element toward global unit direction `dir`.
    pub fn response(&self, v: PolarizationVariant, dir: &Vector3<f64>) -> FieldPair {
        self.pose.response(&self.antenna_rotation(v), dir)
    }
}

/// Transmit power and carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    tx_power: f64,
    wavelength: f64,
    wave_number: f64,
}

impl LinkBudget {
    pub fn new(tx_power_w: f64, wavelength_m: f64) -> Result<Self> {
        if !(tx_power_w > 0.0 && tx_power_w.is_finite()) {
            return Err(Error::InvalidArgument(format!("tx power must be positive, got {tx_power_w}")));
        }
        if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavelength must be positive, got {wavelength_m}")));
        }
        Ok(Self {
            tx_power: tx_power_w,
            wavelength: wavelength_m,
            wave_number: 2.0 * std::f64::consts::PI / wavelength_m,
        })
    }

    pub fn from_frequency(tx_power_w: f64, frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency must be positive, got {frequency_hz}")));
        }
        Self::new(tx_power_w, SPEED_OF_LIGHT / frequency_hz)
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wave_number(&self) -> f64 {
        self.wave_number
    }
}

/// Weights of the scattered and reflected structural-mode fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmTuning {
    pub c_s: f64,
    pub c_r: f64,
}

impl Default for SmTuning {
    fn default() -> Self {
        Self { c_s: 1.0, c_r: 1.0 }
    }
}

impl SmTuning {
    pub fn new(c_s: f64, c_r: f64) -> Result<Self> {
        if !(c_s.is_finite() && c_r.is_finite()) {
            return Err(Error::InvalidArgument("tuning coefficients must be finite".into()));
        }
        Ok(Self { c_s, c_r })
    }

    pub const OFF: SmTuning = SmTuning { c_s: 0.0, c_r: 0.0 };
}

/// Free-space path loss `(λ / 4πd)²`.
pub fn path_loss(d: f64, lb: &LinkBudget) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::ZeroDistance("path loss"));
    }
    Ok((lb.wavelength / (4.0 * std::f64::consts::PI * d)).powi(2))
}

/// Length and unit direction of `to − from`.
fn hop(from: &Vector3<f64>, to: &Vector3<f64>, what: &'static str) -> Result<(f64, Vector3<f64>)> {
    let v = to - from;
    let d = v.norm();
    if !(d > 0.0) {
        return Err(Error::ZeroDistance(what));
    }
    Ok((d, v / d))
}

fn phase_term(radians: f64) -> Complex64 {
    Complex64::from_polar(1.0, -radians)
}

/// `aᵀ·M_d·b` for field pairs.
fn facing_product(a: &FieldPair, b: &FieldPair) -> Complex64 {
    a[0] * b[0] - a[1] * b[1]
}

/// Line-of-sight coefficient.
pub fn los_coefficient(tx: &Pose, rx: &Pose, lb: &LinkBudget) -> Result<Complex64> {
    let (d, dir) = hop(&tx.position, &rx.position, "tx-rx")?;
    let e_t = tx.response(&tx.orientation.matrix(), &dir);
    let e_r = rx.response(&rx.orientation.matrix(), &(-dir));
    let amp = (lb.tx_power * path_loss(d, lb)?).sqrt();
    let psi = (tx.initial_phase_deg + rx.initial_phase_deg).to_radians() + lb.wave_number * d;
    Ok(amp * facing_product(&e_r, &e_t) * phase_term(psi))
}

/// Antenna-mode polarization matrix `Γ·𝗘(to_rx)·𝗘(to_tx)ᵀ` of an element,
/// for its configured polarization variant.
pub fn am_polarization_matrix(
    e: &RisElement,
    gamma: Complex64,
    to_rx: &crate::antenna::AnglePair,
    to_tx: &crate::antenna::AnglePair,
) -> Matrix2<Complex64> {
    let r = e.antenna_rotation(e.polarization_variant);
    let a = response_with_rotation(&e.pose.pattern, &r, to_rx).field;
    let b = response_with_rotation(&e.pose.pattern, &r, to_tx).field;
    a * b.transpose() * gamma
}

/// Geometry of the two hops through one element.
pub(crate) struct BounceGeometry {
    pub d_in: f64,
    pub d_out: f64,
    /// Unit vector from the element toward the transmitter.
    pub to_tx: Vector3<f64>,
    /// Unit vector from the element toward the receiver.
    pub to_rx: Vector3<f64>,
}

impl BounceGeometry {
    pub fn new(tx: &Pose, rx: &Pose, e: &RisElement) -> Result<Self> {
        let (d_in, to_tx) = hop(&e.pose.position, &tx.position, "tx-element")?;
        let (d_out, to_rx) = hop(&e.pose.position, &rx.position, "element-rx")?;
        Ok(Self {
            d_in,
            d_out,
            to_tx,
            to_rx,
        })
    }

    /// `√(P_t·L_in·L_out)`.
    fn amplitude(&self, lb: &LinkBudget) -> Result<f64> {
        Ok((lb.tx_power * path_loss(self.d_in, lb)? * path_loss(self.d_out, lb)?).sqrt())
    }

    /// `𝗘_rᵀ·M_d·M·M_d·𝗘_t` with the endpoint responses along this bounce.
    fn chain(&self, tx: &Pose, rx: &Pose, m: &Matrix2<Complex64>) -> Complex64 {
        let e_t = tx.response(&tx.orientation.matrix(), &(-self.to_tx));
        let e_r = rx.response(&rx.orientation.matrix(), &(-self.to_rx));
        let md = m_d();
        (e_r.transpose() * md * m * md * e_t)[(0, 0)]
    }
}

/// Antenna-mode coefficient with `Γ = 1`; the actual term is `Γ` times
/// this value.
pub(crate) fn am_unit_coefficient(
    tx: &Pose,
    rx: &Pose,
    e: &RisElement,
    v: PolarizationVariant,
    lb: &LinkBudget,
) -> Result<Complex64> {
    let g = BounceGeometry::new(tx, rx, e)?;
    let a = e.response(v, &g.to_rx);
    let b = e.response(v, &g.to_tx);
    // 𝗘_rᵀ M_d a · bᵀ M_d 𝗘_t, the rank-one chain factorised.
    let e_t = tx.response(&tx.orientation.matrix(), &(-g.to_tx));
    let e_r = rx.response(&rx.orientation.matrix(), &(-g.to_rx));
    let pol = facing_product(&e_r, &a) * facing_product(&b, &e_t);
    let psi = (tx.initial_phase_deg + rx.initial_phase_deg + e.pose.initial_phase_deg).to_radians()
        + lb.wave_number * (g.d_in + g.d_out);
    Ok(g.amplitude(lb)? * pol * phase_term(psi))
}

/// Antenna-mode coefficient of one element in state `code`.
pub fn am_coefficient(tx: &Pose, rx: &Pose, e: &RisElement, code: StateCode, lb: &LinkBudget) -> Result<Complex64> {
    let gamma = state_reflection(&e.dps, code);
    Ok(gamma * am_unit_coefficient(tx, rx, e, e.polarization_variant, lb)?)
}

/// Structural-mode coefficient of one element. Independent of the DPS
/// state.
pub fn sm_coefficient(tx: &Pose, rx: &Pose, e: &RisElement, tuning: &SmTuning, lb: &LinkBudget) -> Result<Complex64> {
    if tuning.c_s == 0.0 && tuning.c_r == 0.0 {
        BounceGeometry::new(tx, rx, e)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = BounceGeometry::new(tx, rx, e)?;
    let m = plate::sm_matrix_from_dirs(e, &g.to_tx, &g.to_rx, tuning, lb)?;
    let psi = (tx.initial_phase_deg + rx.initial_phase_deg).to_radians() + lb.wave_number * (g.d_in + g.d_out);
    Ok(g.amplitude(lb)? * g.chain(tx, rx, &m) * phase_term(psi))
}

/// The three parts of a single-element link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementTerms {
    pub los: Complex64,
    pub am: Complex64,
    pub sm: Complex64,
}

impl ElementTerms {
    pub fn total(&self) -> Complex64 {
        self.los + self.am + self.sm
    }
}

/// LoS, antenna-mode and structural-mode terms for a single element.
pub fn element_terms(
    tx: &Pose,
    rx: &Pose,
    e: &RisElement,
    code: StateCode,
    tuning: &SmTuning,
    lb: &LinkBudget,
) -> Result<ElementTerms> {
    Ok(ElementTerms {
        los: los_coefficient(tx, rx, lb)?,
        am: am_coefficient(tx, rx, e, code, lb)?,
        sm: sm_coefficient(tx, rx, e, tuning, lb)?,
    })
}

/// Overall coefficient of a link with a single element.
pub fn element_coefficient(
    tx: &Pose,
    rx: &Pose,
    e: &RisElement,
    code: StateCode,
    tuning: &SmTuning,
    lb: &LinkBudget,
) -> Result<Complex64> {
    Ok(element_terms(tx, rx, e, code, tuning, lb)?.total())
}

/// Coefficient of the full array: LoS plus every element's AM and SM
/// terms. A per-row variant in `states` overrides the element's own.
pub fn array_coefficient(
    tx: &Pose,
    rx: &Pose,
    elements: &[RisElement],
    states: &StateMatrix,
    tuning: &SmTuning,
    lb: &LinkBudget,
) -> Result<Complex64> {
    if states.len() != elements.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} state rows for {} elements",
            states.len(),
            elements.len()
        )));
    }
    for (n, e) in elements.iter().enumerate() {
        if states.code(n).width() != e.dps.bits() {
            return Err(Error::DimensionMismatch(format!(
                "row {n} has {} bits, element DPS has {}",
                states.code(n).width(),
                e.dps.bits()
            )));
        }
    }
    let mut c = los_coefficient(tx, rx, lb)?;
    for (n, e) in elements.iter().enumerate() {
        let v = states.variant(n).unwrap_or(e.polarization_variant);
        let gamma = state_reflection(&e.dps, states.code(n));
        c += gamma * am_unit_coefficient(tx, rx, e, v, lb)?;
        c += sm_coefficient(tx, rx, e, tuning, lb)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests;
