//! Blind greedy control on the 4x4 array with the full 16-state codebook:
//! the search trace, and where the result ranks among random matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_sim::controller::{blind_greedy, BgParams, StateMatrix};
use ris_sim::dps::StateCode;
use ris_sim::scenario::{build_scene, load_config};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/los_exhaustive.toml");

/// Fraction of random matrices that beat blind greedy.
pub fn run() -> anyhow::Result<f64> {
    let built = build_scene(&load_config(CONFIG)?)?;
    let scene = built.scene.compile()?;
    let p = BgParams::full_codebook(100, 3, 11, 4)?;
    let out = blind_greedy(&scene, &p)?;
    let trace = out.trace.entries();
    let mut best = f64::NEG_INFINITY;
    for e in trace {
        if e.incumbent_db > best {
            best = e.incumbent_db;
            println!("eval {:4}: {:7.2} dB  {}", e.eval_index, e.incumbent_db, e.digest);
        }
    }
    println!("{} evaluations, final {:.2} dB", out.evaluations(), out.quality_db);

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let codes = StateCode::all(4);
    let n = scene.element_count();
    let samples = 10_000;
    let mut better = 0;
    for _ in 0..samples {
        let s = StateMatrix::new((0..n).map(|_| codes[rng.random_range(0..codes.len())]).collect())?;
        if scene.quality_db(&s)? > out.quality_db {
            better += 1;
        }
    }
    let frac = better as f64 / samples as f64;
    println!("random matrices beating it: {:.2} %", 100.0 * frac);
    Ok(frac)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
