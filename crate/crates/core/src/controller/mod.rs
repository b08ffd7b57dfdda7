//! Implicit-CSI control of the RIS: only the received quality of a
//! candidate state matrix is observable.
//!
//! The blind greedy (BG) controller first tries the all-zero reference and
//! `T_r` random matrices drawn row-wise from a small codebook (random-max
//! sampling, RMS), then runs `T_g` sweeps of per-element greedy searching
//! (GS) over all `2^N_bit` codes from the RMS winner. A candidate replaces
//! the incumbent only on strict improvement.
//!
//! Baselines: continuous-phase perfect beamforming, its nearest-state
//! quantization, and the exhaustive oracle over a codebook.

mod beamforming;
mod exhaustive;
mod search;
mod state;
mod tracking;

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{quality_db, CompiledScene};
use crate::dps::StateCode;
use crate::{Error, Result};

pub use beamforming::{beamforming_with_dps, perfect_beamforming, PerfectBeamforming, ReferencePhase};
pub use exhaustive::{exhaustive_search, exhaustive_search_serial, ExhaustiveResult, DEFAULT_EXHAUSTIVE_BUDGET};
pub use search::{blind_greedy, greedy_search, polarization_selecting_bg, random_max_sampling, SearchOutcome};
pub use state::StateMatrix;
pub use tracking::{full_bg_reference, tracked_run, TrackedLocation, WarmStartReference};

/// Inputs of the blind greedy controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgParams {
    /// RMS iterations `T_r`.
    pub t_r: usize,
    /// GS sweeps `T_g`.
    pub t_g: usize,
    pub seed: u64,
    /// Row values admissible during RMS.
    pub codebook: Vec<StateCode>,
    /// Row values tried by GS: every code of the shifter.
    pub per_element_states: Vec<StateCode>,
}

impl BgParams {
    /// GS enumerates all `2^bits` codes, `bits` taken from the codebook.
    pub fn new(t_r: usize, t_g: usize, seed: u64, codebook: Vec<StateCode>) -> Result<Self> {
        let bits = codebook
            .first()
            .ok_or_else(|| Error::InvalidArgument("codebook is empty".into()))?
            .width();
        let p = Self {
            t_r,
            t_g,
            seed,
            codebook,
            per_element_states: StateCode::all(bits),
        };
        p.validate()?;
        Ok(p)
    }

    /// Codebook holding every code of a `bits`-bit shifter.
    pub fn full_codebook(t_r: usize, t_g: usize, seed: u64, bits: u8) -> Result<Self> {
        Self::new(t_r, t_g, seed, StateCode::all(bits))
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_g < 1 {
            return Err(Error::InvalidArgument("t_g must be at least 1".into()));
        }
        let Some(first) = self.codebook.first() else {
            return Err(Error::InvalidArgument("codebook is empty".into()));
        };
        if self.per_element_states.is_empty() {
            return Err(Error::InvalidArgument("per-element state list is empty".into()));
        }
        let w = first.width();
        if self.codebook.iter().chain(&self.per_element_states).any(|c| c.width() != w) {
            return Err(Error::InvalidArgument("codebook widths differ".into()));
        }
        Ok(())
    }

    pub fn bits(&self) -> u8 {
        self.codebook[0].width()
    }
}

/// One evaluation in a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub eval_index: u64,
    /// Measured quality of the candidate.
    pub candidate_db: f64,
    /// Incumbent quality after this evaluation.
    pub incumbent_db: f64,
    pub digest: String,
}

/// Ordered record of every evaluation of a search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    entries: Vec<TraceEntry>,
}

impl SearchTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// # Panics
    ///
    /// When `entry.eval_index` does not exceed the previous index.
    pub fn push(&mut self, entry: TraceEntry) {
        if let Some(last) = self.entries.last() {
            assert!(entry.eval_index > last.eval_index, "evaluation indices must increase");
        }
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: SearchTrace) {
        for e in other.entries {
            self.push(e);
        }
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV with header `eval_index,quality_db,state_digest_hex`; the
    /// quality column is the candidate's measured quality.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["eval_index", "quality_db", "state_digest_hex"])?;
        for e in &self.entries {
            w.write_record([e.eval_index.to_string(), e.candidate_db.to_string(), e.digest.clone()])?;
        }
        w.flush().map_err(|e| Error::io("trace csv", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }
}

/// Counts evaluations and applies the scene's measurement noise.
///
/// The noise of evaluation `i` depends only on the noise seed, the stream
/// and `i`, so replays are bit-identical.
pub struct Evaluator<'a> {
    scene: &'a CompiledScene,
    stream: u64,
    count: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(scene: &'a CompiledScene, stream: u64) -> Self {
        Self { scene, stream, count: 0 }
    }

    pub fn scene(&self) -> &'a CompiledScene {
        self.scene
    }

    /// Evaluations performed so far; also the index of the next one.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Measures `states`, returning `(eval_index, quality_db)`.
    pub fn measure(&mut self, states: &StateMatrix) -> Result<(u64, f64)> {
        let index = self.count;
        let q = self.scene.quality_db(states)? + noise_sample(self.scene, self.stream, index);
        self.count += 1;
        Ok((index, q))
    }
}

fn noise_sample(scene: &CompiledScene, stream: u64, index: u64) -> f64 {
    let noise = scene.noise();
    if noise.is_off() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 64);
    let z: f64 = StandardNormal.sample(&mut rng);
    noise.sigma_db * z
}

/// Received quality `10·log10(|C|²/P_t)` of `states`, plus the first
/// noise draw of stream 0 when noise is on.
pub fn received_quality(scene: &CompiledScene, states: &StateMatrix) -> Result<f64> {
    Ok(scene.quality_db(states)? + noise_sample(scene, 0, 0))
}

/// Noise-free quality of a complex coefficient for this scene.
pub fn coefficient_quality(scene: &CompiledScene, c: num_complex::Complex64) -> f64 {
    quality_db(c, scene.tx_power())
}

/// Mixes a base seed with an index into an independent 64-bit seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
