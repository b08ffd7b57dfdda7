//! One element in front of a transmitter and receiver: the DPS state sets
//! whether the antenna mode adds to or cancels the structural mode and
//! the direct path. Turning the element antenna away from the link
//! polarization removes the effect.

use ris_sim::scenario::{build_scene, load_config, run_experiment, Experiment};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/single_element.toml");

fn spread(rows: &[f64]) -> f64 {
    let max = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// State spread in dB for the matched and the rotated element.
pub fn run() -> anyhow::Result<(f64, f64)> {
    let mut cfg = load_config(CONFIG)?;
    let matched = run_experiment(&build_scene(&cfg)?, Experiment::DpsStateSweep)?;
    cfg.ris.orientation_deg[0] = 90.0;
    let rotated = run_experiment(&build_scene(&cfg)?, Experiment::DpsStateSweep)?;
    println!("state  matched dB  rotated dB");
    for (a, b) in matched.table.rows.iter().zip(&rotated.table.rows) {
        println!("{:>5}  {:10.2}  {:10.2}", a.state_digest, a.quality_db, b.quality_db);
    }
    let q = |t: &ris_sim::scenario::ResultTable| t.rows.iter().map(|r| r.quality_db).collect::<Vec<_>>();
    let (m, r) = (spread(&q(&matched.table)), spread(&q(&rotated.table)));
    println!("spread: matched {m:.2} dB, rotated {r:.3} dB");
    Ok((m, r))
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
