//! Digital phase shifter terminated by an open end (DPS-O).
//!
//! Two descriptions of the same device live here. The physical one is the
//! two-port cascade: the shifter's S-parameters closed by a termination
//! reflection `Γ_end`, giving
//!
//! ```text
//! Γ = S11 + S12·Γ_end·S21 / (1 − Γ_end·S22)
//! ```
//!
//! The behavioural one is the binary weighted-sum model: every bit of the
//! state code contributes a fixed attenuation (dB) and a fixed phase
//! (degrees) on top of the reference state. [`fit_dps_model`] bridges the
//! two by fitting the weighted-sum model to measured or cascaded responses.
//!
//! Termination convention: [`Termination::OPEN`] is `Γ_end = −1` and
//! [`Termination::SHORT`] is `Γ_end = +1`. This is the reverse of the usual
//! textbook assignment and is kept on purpose so that results line up with
//! the published device characterisation.

mod fit;
mod touchstone;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math::{db_to_amplitude, polar_deg, wrap_deg};
use crate::{Error, Result};

pub use fit::{fit_dps_model, DpsFit, UNWRAP_AMBIGUITY_DEG};
pub use touchstone::{parse_touchstone, read_touchstone};

/// Below this `|1 − Γ·S|` a cascade is treated as resonant.
pub const CASCADE_THRESHOLD: f64 = 1e-12;

/// Nominal operating frequency of the modelled device.
pub const DEFAULT_FREQUENCY_HZ: f64 = 3.5e9;

/// Linear 2×2 scattering matrix at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortSParams {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
    pub frequency_hz: f64,
}

impl TwoPortSParams {
    pub fn new(
        s11: Complex64,
        s12: Complex64,
        s21: Complex64,
        s22: Complex64,
        frequency_hz: f64,
    ) -> Result<Self> {
        let p = Self {
            s11,
            s12,
            s21,
            s22,
            frequency_hz,
        };
        if !p.is_finite() {
            return Err(Error::InvalidArgument(
                "S-parameters must be finite".into(),
            ));
        }
        Ok(p)
    }

    /// Matched, reciprocal through line with transmission `e^{jφ}`.
    pub fn through_line(phase_deg: f64, frequency_hz: f64) -> Self {
        let t = polar_deg(1.0, phase_deg);
        Self {
            s11: Complex64::new(0.0, 0.0),
            s12: t,
            s21: t,
            s22: Complex64::new(0.0, 0.0),
            frequency_hz,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.s11, self.s12, self.s21, self.s22]
            .iter()
            .all(|s| s.re.is_finite() && s.im.is_finite())
    }

    fn matrix(&self) -> nalgebra::Matrix2<Complex64> {
        nalgebra::Matrix2::new(self.s11, self.s12, self.s21, self.s22)
    }

    /// Largest singular value of the scattering matrix.
    pub fn max_singular_value(&self) -> f64 {
        self.matrix()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Passive networks never return more power than they receive.
    pub fn is_passive(&self) -> bool {
        self.max_singular_value() <= 1.0 + 1e-9
    }
}

/// Load closing port 2 of the shifter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub gamma_end: Complex64,
}

impl Termination {
    pub const OPEN: Termination = Termination {
        gamma_end: Complex64::new(-1.0, 0.0),
    };
    pub const SHORT: Termination = Termination {
        gamma_end: Complex64::new(1.0, 0.0),
    };
    /// 50-Ohm load: no reflection, so the antenna mode disappears.
    pub const MATCHED: Termination = Termination {
        gamma_end: Complex64::new(0.0, 0.0),
    };

    pub fn new(gamma_end: Complex64) -> Self {
        Self { gamma_end }
    }

    pub fn is_passive(&self) -> bool {
        self.gamma_end.norm() <= 1.0 + 1e-9
    }
}

/// Reflection coefficient looking into port 1 of `s` with port 2 closed by `end`.
pub fn cascade_reflection(s: &TwoPortSParams, end: Termination) -> Result<Complex64> {
    let g = end.gamma_end;
    let denominator = Complex64::new(1.0, 0.0) - g * s.s22;
    if denominator.norm() <= CASCADE_THRESHOLD {
        return Err(Error::DegenerateCascade {
            denominator: denominator.norm(),
        });
    }
    Ok(s.s11 + s.s12 * g * s.s21 / denominator)
}

/// Antenna-mode / structural-mode split of an antenna loaded by `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSplit {
    /// Structural mode, independent of the load.
    pub sm_gain: Complex64,
    /// Antenna mode, the only part that responds to `gamma`.
    pub am_gain: Complex64,
}

impl ModeSplit {
    /// `V_out / V_in`.
    pub fn total(&self) -> Complex64 {
        self.sm_gain + self.am_gain
    }
}

/// Splits the re-radiated field of a loaded antenna into structural and
/// antenna modes.
///
/// The antenna scattering matrix relates `(V₁⁺, V_out)` to `(V₁⁻, V_in)`
/// with entries `S00, S01, S10, S11`. They are carried in a
/// [`TwoPortSParams`] with the slots aliased as follows:
///
/// | slot  | holds | meaning                               |
/// |-------|-------|---------------------------------------|
/// | `s11` | S00   | reflection at the antenna port        |
/// | `s12` | S01   | incident wave into the port           |
/// | `s21` | S10   | port wave re-radiated                 |
/// | `s22` | S11   | reflection of the metal surface       |
pub fn am_sm_split(antenna_scattering: &TwoPortSParams, gamma: Complex64) -> Result<ModeSplit> {
    let s00 = antenna_scattering.s11;
    let s01 = antenna_scattering.s12;
    let s10 = antenna_scattering.s21;
    let s11 = antenna_scattering.s22;
    let denominator = Complex64::new(1.0, 0.0) - gamma * s00;
    if denominator.norm() <= CASCADE_THRESHOLD {
        return Err(Error::DegenerateCascade {
            denominator: denominator.norm(),
        });
    }
    Ok(ModeSplit {
        sm_gain: s11,
        am_gain: s10 * gamma * s01 / denominator,
    })
}

/// Binary control word of the shifter, `b₁` first.
///
/// `b₁` is the most significant bit, so the code value counts
/// `(0,0,0,0) → 0`, `(0,0,0,1) → 1`, …, `(1,1,1,1) → 15`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateCode {
    value: u32,
    width: u8,
}

impl StateCode {
    pub const MAX_WIDTH: u8 = 16;

    pub fn from_value(value: u32, width: u8) -> Result<Self> {
        if width == 0 || width > Self::MAX_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "code width must be in 1..={}, got {width}",
                Self::MAX_WIDTH
            )));
        }
        if value >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "code value {value} does not fit in {width} bits"
            )));
        }
        Ok(Self { value, width })
    }

    pub fn zero(width: u8) -> Self {
        Self::from_value(0, width).expect("valid width")
    }

    /// From `(b₁, …, b_N)`; every entry must be 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let width = u8::try_from(bits.len())
            .map_err(|_| Error::InvalidArgument("too many bits".into()))?;
        let mut value = 0u32;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidArgument(format!("bit value {b} is not 0 or 1")));
            }
            value = (value << 1) | u32::from(b);
        }
        Self::from_value(value, width)
    }

    /// Parses a binary string such as `"0100"`.
    pub fn parse_binary(text: &str) -> Result<Self> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidArgument(format!(
                    "`{text}` is not a binary code (found `{other}`)"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// `b_{n+1}` for zero-based `n`.
    pub fn bit(&self, n: usize) -> bool {
        assert!(n < self.width as usize, "bit index out of range");
        (self.value >> (self.width as usize - 1 - n)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.width as usize).map(|n| self.bit(n) as u8).collect()
    }

    /// Every code of `width` bits in counting order.
    pub fn all(width: u8) -> Vec<StateCode> {
        (0..1u32 << width)
            .map(|v| StateCode::from_value(v, width).expect("in range"))
            .collect()
    }
}

impl std::fmt::Display for StateCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

/// Serialized as its binary string.
impl Serialize for StateCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        StateCode::parse_binary(&text).map_err(serde::de::Error::custom)
    }
}

/// Attenuation and phase contributed by one bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpsOrder {
    pub attenuation_db: f64,
    pub phase_deg: f64,
}

/// Weighted-sum state model of the shifter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpsModel {
    pub gamma0_db: f64,
    pub gamma0_deg: f64,
    pub orders: Vec<DpsOrder>,
}

impl DpsModel {
    pub fn new(gamma0_db: f64, gamma0_deg: f64, orders: Vec<DpsOrder>) -> Result<Self> {
        let model = Self {
            gamma0_db,
            gamma0_deg,
            orders,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.orders.len() > StateCode::MAX_WIDTH as usize {
            return Err(Error::InvalidArgument(format!(
                "a DPS model needs 1..={} orders, got {}",
                StateCode::MAX_WIDTH,
                self.orders.len()
            )));
        }
        if !(self.gamma0_db.is_finite() && self.gamma0_deg.is_finite()) {
            return Err(Error::InvalidArgument("reference term must be finite".into()));
        }
        for (n, o) in self.orders.iter().enumerate() {
            if !(o.attenuation_db.is_finite() && o.phase_deg.is_finite()) {
                return Err(Error::InvalidArgument(format!("order {} is not finite", n + 1)));
            }
            if o.attenuation_db > 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "order {} has attenuation {} dB > 0",
                    n + 1,
                    o.attenuation_db
                )));
            }
        }
        Ok(())
    }

    /// The characterised 4-bit MAPS-010144 shifter with an open end, with
    /// the reference state at 0 dB / 0°.
    pub fn table_one() -> Self {
        let orders = [(0.0, -356.0), (-2.35, -178.0), (-1.66, -96.0), (-0.57, -33.0)]
            .into_iter()
            .map(|(attenuation_db, phase_deg)| DpsOrder {
                attenuation_db,
                phase_deg,
            })
            .collect();
        Self {
            gamma0_db: 0.0,
            gamma0_deg: 0.0,
            orders,
        }
    }

    /// Lossless shifter on a uniform phase grid: bit `n` adds `−360/2^n` degrees.
    pub fn ideal_uniform(bits: u8) -> Self {
        let orders = (1..=bits as i32)
            .map(|n| DpsOrder {
                attenuation_db: 0.0,
                phase_deg: -360.0 / 2f64.powi(n),
            })
            .collect();
        Self {
            gamma0_db: 0.0,
            gamma0_deg: 0.0,
            orders,
        }
    }

    pub fn bits(&self) -> u8 {
        self.orders.len() as u8
    }

    /// `(magnitude dB, unwrapped phase deg)` of a code.
    pub fn state_db_deg(&self, code: StateCode) -> (f64, f64) {
        assert_eq!(
            code.width() as usize,
            self.orders.len(),
            "code width does not match the model"
        );
        self.orders
            .iter()
            .enumerate()
            .filter(|(n, _)| code.bit(*n))
            .fold((self.gamma0_db, self.gamma0_deg), |(db, deg), (_, o)| {
                (db + o.attenuation_db, deg + o.phase_deg)
            })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let model: DpsModel = toml::from_str(text).map_err(|e| Error::Parse {
            path: "dps model".into(),
            message: e.to_string(),
        })?;
        model.validate()?;
        Ok(model)
    }
}

/// Reflection coefficient of the shifter in state `code`.
///
/// # Panics
///
/// When the code width differs from the model's order count.
pub fn state_reflection(model: &DpsModel, code: StateCode) -> Complex64 {
    let (db, deg) = model.state_db_deg(code);
    polar_deg(db_to_amplitude(db), deg)
}

/// Phase of a state wrapped into (−180, 180].
pub fn state_phase_wrapped(model: &DpsModel, code: StateCode) -> f64 {
    wrap_deg(model.state_db_deg(code).1)
}
