use num_complex::Complex64;
use rayon::prelude::*;

use super::StateMatrix;
use crate::channel::CompiledScene;
use crate::dps::StateCode;
use crate::{Error, Result};

/// Default cap on `|codebook|^N` for exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1 << 20;

/// Oracle output: the best matrix and the quality of every enumerated one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub best: StateMatrix,
    pub best_db: f64,
    /// Qualities in enumeration order.
    pub qualities: Vec<f64>,
}

struct Enumeration<'a> {
    scene: &'a CompiledScene,
    codebook: &'a [StateCode],
    /// Per element, the full term `Γ·am + sm` for each codebook entry.
    terms: Vec<Vec<Complex64>>,
    count: usize,
}

impl<'a> Enumeration<'a> {
    fn new(scene: &'a CompiledScene, codebook: &'a [StateCode], budget: u128) -> Result<Self> {
        if codebook.is_empty() {
            return Err(Error::InvalidArgument("codebook is empty".into()));
        }
        let n = scene.element_count();
        let states = (codebook.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if states > budget {
            return Err(Error::BudgetExceeded { states, budget });
        }
        let mut terms = Vec::with_capacity(n);
        for i in 0..n {
            if codebook.iter().any(|c| c.width() != scene.bits(i)) {
                return Err(Error::DimensionMismatch(format!("codebook width does not fit element {i}")));
            }
            let unit = scene.am_unit(i, scene.default_variant(i));
            terms.push(codebook.iter().map(|&c| scene.gamma(i, c) * unit + scene.sm(i)).collect());
        }
        Ok(Self {
            scene,
            codebook,
            terms,
            count: states as usize,
        })
    }

    /// Codebook index of each element for enumeration index `k`; element 0
    /// is the most significant digit.
    fn digits(&self, mut k: usize) -> Vec<usize> {
        let base = self.codebook.len();
        let mut d = vec![0; self.terms.len()];
        for slot in d.iter_mut().rev() {
            *slot = k % base;
            k /= base;
        }
        d
    }

    fn quality(&self, k: usize) -> f64 {
        let c = self
            .digits(k)
            .iter()
            .zip(&self.terms)
            .fold(self.scene.los(), |acc, (&d, t)| acc + t[d]);
        super::coefficient_quality(self.scene, c)
    }

    fn finish(&self, qualities: Vec<f64>) -> Result<ExhaustiveResult> {
        let mut best = 0;
        for (k, q) in qualities.iter().enumerate() {
            if *q > qualities[best] {
                best = k;
            }
        }
        let width = self.codebook[0].width();
        let states = StateMatrix::new(self.digits(best).iter().map(|&d| self.codebook[d]).collect())?;
        let states = if states.is_empty() { StateMatrix::zeros(0, width) } else { states };
        Ok(ExhaustiveResult {
            best: states,
            best_db: qualities[best],
            qualities,
        })
    }
}

/// Evaluates every matrix whose rows come from `codebook`, in row-major
/// order (element 0 most significant), on the rayon thread pool. The
/// result is identical to [`exhaustive_search_serial`]; ties go to the
/// lowest enumeration index.
pub fn exhaustive_search(scene: &CompiledScene, codebook: &[StateCode], budget: u128) -> Result<ExhaustiveResult> {
    let e = Enumeration::new(scene, codebook, budget)?;
    let qualities = (0..e.count).into_par_iter().map(|k| e.quality(k)).collect();
    e.finish(qualities)
}

pub fn exhaustive_search_serial(scene: &CompiledScene, codebook: &[StateCode], budget: u128) -> Result<ExhaustiveResult> {
    let e = Enumeration::new(scene, codebook, budget)?;
    let qualities = (0..e.count).map(|k| e.quality(k)).collect();
    e.finish(qualities)
}
