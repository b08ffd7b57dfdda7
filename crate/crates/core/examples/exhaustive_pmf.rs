//! All 65,536 matrices of the 4x4 array over a two-state codebook and the
//! histogram of their received quality.

use ris_sim::scenario::{build_scene, is_unimodal_with_lower_tail, load_config, quality_pmf, run_experiment, Experiment};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/los_exhaustive.toml");

pub fn run() -> anyhow::Result<()> {
    let built = build_scene(&load_config(CONFIG)?)?;
    let out = run_experiment(&built, Experiment::ExhaustivePmf)?;
    let q: Vec<f64> = out.table.rows.iter().map(|r| r.quality_db).collect();
    let bins = quality_pmf(&q);
    let peak = bins.iter().map(|b| b.probability).fold(0.0, f64::max);
    for b in &bins {
        let bar = "#".repeat((60.0 * b.probability / peak).round() as usize);
        println!("{:6.0} dB {:6.4} {bar}", b.low_db, b.probability);
    }
    let best = out.table.rows.iter().max_by(|a, b| a.quality_db.total_cmp(&b.quality_db)).expect("rows");
    let worst = q.iter().copied().fold(f64::INFINITY, f64::min);
    let scene = built.scene.compile()?;
    // Both antennas face -x, so each sits in the other's pattern null.
    let direct = ris_sim::controller::coefficient_quality(&scene, scene.los());
    println!("{} states", q.len());
    println!("best {:.2} dB ({}), worst {worst:.2} dB, direct path alone {direct:.2} dB", best.quality_db, best.state_digest);
    println!("unimodal with lower tail: {}", is_unimodal_with_lower_tail(&bins));
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run()
}
