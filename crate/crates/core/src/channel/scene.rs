use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{am_unit_coefficient, los_coefficient, sm_coefficient, LinkBudget, PolarizationVariant, Pose, RisElement, SmTuning};
use crate::controller::StateMatrix;
use crate::dps::{state_reflection, StateCode};
use crate::{Error, Result};

/// Optional additive measurement noise on the quality reading, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementNoise {
    pub sigma_db: f64,
    pub seed: u64,
}

impl MeasurementNoise {
    pub const OFF: MeasurementNoise = MeasurementNoise { sigma_db: 0.0, seed: 0 };

    pub fn is_off(&self) -> bool {
        self.sigma_db == 0.0
    }
}

/// `10·log10(|c|² / P_t)`.
pub fn quality_db(c: Complex64, tx_power: f64) -> f64 {
    10.0 * (c.norm_sqr() / tx_power).log10()
}

/// Everything needed to evaluate the link: endpoints, RIS elements,
/// structural-mode tuning, link budget and measurement noise.
#[derive(Debug, Clone)]
pub struct Scene {
    pub tx: Pose,
    pub rx: Pose,
    pub elements: Vec<RisElement>,
    pub tuning: SmTuning,
    pub budget: LinkBudget,
    pub noise: MeasurementNoise,
}

impl Scene {
    pub fn new(tx: Pose, rx: Pose, elements: Vec<RisElement>, budget: LinkBudget) -> Self {
        Self {
            tx,
            rx,
            elements,
            tuning: SmTuning::default(),
            budget,
            noise: MeasurementNoise::OFF,
        }
    }

    pub fn with_tuning(mut self, tuning: SmTuning) -> Self {
        self.tuning = tuning;
        self
    }

    pub fn with_noise(mut self, noise: MeasurementNoise) -> Self {
        self.noise = noise;
        self
    }

    /// Same scene with a different receiver.
    pub fn with_rx(&self, rx: Pose) -> Self {
        Self { rx, ..self.clone() }
    }

    /// Pairs closer than the single-element Fraunhofer distance `2D²/λ`,
    /// `D` being the plate diagonal. The model assumes far-field hops, so
    /// these are reported but not rejected.
    pub fn fraunhofer_warnings(&self) -> Vec<String> {
        let lambda = self.budget.wavelength();
        let mut out = Vec::new();
        let mut check = |what: String, a: &Vector3<f64>, b: &Vector3<f64>, d_ant: f64| {
            let limit = 2.0 * d_ant * d_ant / lambda;
            let d = (a - b).norm();
            if d < limit {
                out.push(format!("{what}: distance {d:.4} m is below the far-field distance {limit:.4} m"));
            }
        };
        let d_max = self
            .elements
            .iter()
            .map(|e| e.plate_width().hypot(e.plate_height()))
            .fold(0.0, f64::max);
        if d_max > 0.0 {
            check("tx-rx".into(), &self.tx.position, &self.rx.position, d_max);
        }
        for (n, e) in self.elements.iter().enumerate() {
            let d_ant = e.plate_width().hypot(e.plate_height());
            check(format!("tx-element {n}"), &self.tx.position, &e.pose.position, d_ant);
            check(format!("element {n}-rx"), &e.pose.position, &self.rx.position, d_ant);
        }
        out
    }

    /// Precomputes every state-independent quantity.
    pub fn compile(&self) -> Result<CompiledScene> {
        let lb = &self.budget;
        let los = los_coefficient(&self.tx, &self.rx, lb)?;
        let mut elements = Vec::with_capacity(self.elements.len());
        for e in &self.elements {
            let mut am_unit = [Complex64::new(0.0, 0.0); 3];
            for v in PolarizationVariant::ALL {
                am_unit[v.index()] = am_unit_coefficient(&self.tx, &self.rx, e, v, lb)?;
            }
            let bits = e.dps.bits();
            let gamma = StateCode::all(bits).into_iter().map(|c| state_reflection(&e.dps, c)).collect();
            elements.push(CompiledElement {
                am_unit,
                sm: sm_coefficient(&self.tx, &self.rx, e, &self.tuning, lb)?,
                gamma,
                bits,
                variant: e.polarization_variant,
            });
        }
        Ok(CompiledScene {
            los,
            elements,
            tx_power: lb.tx_power(),
            noise: self.noise,
        })
    }
}

#[derive(Debug, Clone)]
struct CompiledElement {
    am_unit: [Complex64; 3],
    sm: Complex64,
    gamma: Vec<Complex64>,
    bits: u8,
    variant: PolarizationVariant,
}

/// A scene reduced to per-element constants. Because the antenna-mode
/// term is linear in `Γ`, evaluating a state matrix costs one complex
/// multiply-add per element.
#[derive(Debug, Clone)]
pub struct CompiledScene {
    los: Complex64,
    elements: Vec<CompiledElement>,
    tx_power: f64,
    noise: MeasurementNoise,
}

impl CompiledScene {
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise(&self) -> MeasurementNoise {
        self.noise
    }

    pub fn los(&self) -> Complex64 {
        self.los
    }

    pub fn bits(&self, n: usize) -> u8 {
        self.elements[n].bits
    }

    pub fn default_variant(&self, n: usize) -> PolarizationVariant {
        self.elements[n].variant
    }

    pub fn sm(&self, n: usize) -> Complex64 {
        self.elements[n].sm
    }

    /// Antenna-mode term of element `n` for `Γ = 1`.
    pub fn am_unit(&self, n: usize, v: PolarizationVariant) -> Complex64 {
        self.elements[n].am_unit[v.index()]
    }

    pub fn gamma(&self, n: usize, code: StateCode) -> Complex64 {
        self.elements[n].gamma[code.value() as usize]
    }

    /// LoS plus every structural-mode term.
    pub fn static_sum(&self) -> Complex64 {
        self.los + self.elements.iter().map(|e| e.sm).sum::<Complex64>()
    }

    /// Checks that `states` fits this scene.
    pub fn check(&self, states: &StateMatrix) -> Result<()> {
        if states.len() != self.elements.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} state rows for {} elements",
                states.len(),
                self.elements.len()
            )));
        }
        for (n, e) in self.elements.iter().enumerate() {
            if states.code(n).width() != e.bits {
                return Err(Error::DimensionMismatch(format!(
                    "row {n} has {} bits, element DPS has {}",
                    states.code(n).width(),
                    e.bits
                )));
            }
        }
        Ok(())
    }

    /// Array coefficient for `states`; `states` must pass [`Self::check`].
    pub fn coefficient_unchecked(&self, states: &StateMatrix) -> Complex64 {
        let mut c = self.los;
        for (n, e) in self.elements.iter().enumerate() {
            let v = states.variant(n).unwrap_or(e.variant);
            c += e.gamma[states.code(n).value() as usize] * e.am_unit[v.index()] + e.sm;
        }
        c
    }

    pub fn coefficient(&self, states: &StateMatrix) -> Result<Complex64> {
        self.check(states)?;
        Ok(self.coefficient_unchecked(states))
    }

    /// Array coefficient with an explicit reflection coefficient per
    /// element, each element using its own default variant.
    pub fn coefficient_with_gammas(&self, gammas: &[Complex64]) -> Result<Complex64> {
        if gammas.len() != self.elements.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} reflection coefficients for {} elements",
                gammas.len(),
                self.elements.len()
            )));
        }
        Ok(self.los
            + self
                .elements
                .iter()
                .zip(gammas)
                .map(|(e, g)| g * e.am_unit[e.variant.index()] + e.sm)
                .sum::<Complex64>())
    }

    /// Noise-free quality in dB.
    pub fn quality_db(&self, states: &StateMatrix) -> Result<f64> {
        Ok(quality_db(self.coefficient(states)?, self.tx_power))
    }
}
