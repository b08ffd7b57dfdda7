use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BgParams, Evaluator, SearchTrace, StateMatrix, TraceEntry};
use crate::channel::{CompiledScene, PolarizationVariant};
use crate::{Error, Result};

/// Final state, its measured quality and every evaluation made.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub states: StateMatrix,
    pub quality_db: f64,
    pub trace: SearchTrace,
}

impl SearchOutcome {
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }
}

struct Incumbent {
    states: StateMatrix,
    quality: f64,
    trace: SearchTrace,
}

impl Incumbent {
    fn new(states: StateMatrix, quality: f64) -> Self {
        Self {
            states,
            quality,
            trace: SearchTrace::new(),
        }
    }

    /// Measures `candidate`, keeping it on strict improvement.
    fn offer(&mut self, ev: &mut Evaluator, candidate: &StateMatrix) -> Result<()> {
        let (index, q) = ev.measure(candidate)?;
        if q > self.quality {
            self.states.clone_from(candidate);
            self.quality = q;
        }
        self.trace.push(TraceEntry {
            eval_index: index,
            candidate_db: q,
            incumbent_db: self.quality,
            digest: candidate.digest(),
        });
        Ok(())
    }

    fn finish(self) -> SearchOutcome {
        SearchOutcome {
            states: self.states,
            quality_db: self.quality,
            trace: self.trace,
        }
    }
}

fn check_width(scene: &CompiledScene, p: &BgParams) -> Result<()> {
    p.validate()?;
    for n in 0..scene.element_count() {
        if scene.bits(n) != p.bits() {
            return Err(Error::DimensionMismatch(format!(
                "element {n} has a {}-bit shifter, codebook has {} bits",
                scene.bits(n),
                p.bits()
            )));
        }
    }
    Ok(())
}

pub(crate) fn rms_with(ev: &mut Evaluator, p: &BgParams) -> Result<SearchOutcome> {
    let scene = ev.scene();
    check_width(scene, p)?;
    let n = scene.element_count();
    let reference = StateMatrix::zeros(n, p.bits());
    let (index, q) = ev.measure(&reference)?;
    let mut inc = Incumbent::new(reference.clone(), q);
    inc.trace.push(TraceEntry {
        eval_index: index,
        candidate_db: q,
        incumbent_db: q,
        digest: reference.digest(),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut candidate = reference;
    for _ in 0..p.t_r {
        for i in 0..n {
            candidate.set_code(i, p.codebook[rng.random_range(0..p.codebook.len())]);
        }
        inc.offer(ev, &candidate)?;
    }
    Ok(inc.finish())
}

pub(crate) fn gs_with(
    ev: &mut Evaluator,
    start: &StateMatrix,
    start_quality_db: f64,
    p: &BgParams,
    variants: Option<&[PolarizationVariant]>,
) -> Result<SearchOutcome> {
    let scene = ev.scene();
    check_width(scene, p)?;
    scene.check(start)?;
    let mut inc = Incumbent::new(start.clone(), start_quality_db);
    for _ in 0..p.t_g {
        for i in 0..scene.element_count() {
            for &v in variants.unwrap_or(&NO_VARIANT) {
                for &code in &p.per_element_states {
                    let mut candidate = inc.states.clone();
                    candidate.set_code(i, code);
                    if variants.is_some() {
                        candidate.set_variant(i, v);
                    }
                    inc.offer(ev, &candidate)?;
                }
            }
        }
    }
    Ok(inc.finish())
}

const NO_VARIANT: [PolarizationVariant; 1] = [PolarizationVariant::Deg0];

/// Random-max sampling: the all-zero matrix, then `T_r` matrices whose
/// rows are drawn uniformly (with replacement) from the codebook. Exactly
/// `T_r + 1` evaluations.
pub fn random_max_sampling(scene: &CompiledScene, p: &BgParams) -> Result<SearchOutcome> {
    rms_with(&mut Evaluator::new(scene, p.seed), p)
}

/// Greedy searching from `start`, whose measured quality is
/// `start_quality_db`. Each of the `T_g` sweeps visits the elements in
/// order and tries every code of [`BgParams::per_element_states`] for that
/// row, so exactly `T_g·N·2^N_bit` evaluations are made.
pub fn greedy_search(
    scene: &CompiledScene,
    start: &StateMatrix,
    start_quality_db: f64,
    p: &BgParams,
) -> Result<SearchOutcome> {
    gs_with(&mut Evaluator::new(scene, p.seed), start, start_quality_db, p, None)
}

pub(crate) fn bg_with(ev: &mut Evaluator, p: &BgParams) -> Result<SearchOutcome> {
    let rms = rms_with(ev, p)?;
    let gs = gs_with(ev, &rms.states, rms.quality_db, p, None)?;
    let mut trace = rms.trace;
    trace.extend(gs.trace);
    Ok(SearchOutcome {
        states: gs.states,
        quality_db: gs.quality_db,
        trace,
    })
}

/// Blind greedy: RMS followed by GS from the RMS winner.
pub fn blind_greedy(scene: &CompiledScene, p: &BgParams) -> Result<SearchOutcome> {
    bg_with(&mut Evaluator::new(scene, p.seed), p)
}

/// Blind greedy extended with per-element polarization selection.
///
/// Runs plain blind greedy (every element on its own variant), then `T_g`
/// GS sweeps over the product of DPS codes and `variants`, so the result is
/// never worse than plain BG with the same parameters.
pub fn polarization_selecting_bg(
    scene: &CompiledScene,
    p: &BgParams,
    variants: &[PolarizationVariant],
) -> Result<SearchOutcome> {
    if variants.is_empty() {
        return Err(Error::InvalidArgument("no polarization variants".into()));
    }
    let mut ev = Evaluator::new(scene, p.seed);
    let plain = bg_with(&mut ev, p)?;
    let mut start = plain.states.clone();
    for i in 0..scene.element_count() {
        start.set_variant(i, scene.default_variant(i));
    }
    let gs = gs_with(&mut ev, &start, plain.quality_db, p, Some(variants))?;
    let mut trace = plain.trace;
    trace.extend(gs.trace);
    Ok(SearchOutcome {
        states: gs.states,
        quality_db: gs.quality_db,
        trace,
    })
}
