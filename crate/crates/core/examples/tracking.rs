//! Tracking along the matched path: warm-started greedy search between
//! full blind greedy runs, for a range of activation distances.

use ris_sim::scenario::{build_scene, load_config, run_experiment, Experiment};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/walk_matched.toml");

/// Mean relative loss per activation distance.
pub fn run(seeds: u64) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut cfg = load_config(CONFIG)?;
    cfg.tracking.seeds = seeds;
    let out = run_experiment(&build_scene(&cfg)?, Experiment::TrackingSweep)?;
    let summary = out.side("tracking_summary").expect("summary table");
    println!("activation m  mean loss dB  evaluations");
    let mut rows = Vec::new();
    for r in &summary.rows {
        let (d, loss, evals): (f64, f64, f64) = (r[0].parse()?, r[1].parse()?, r[2].parse()?);
        println!("{d:12.3}  {loss:12.3}  {evals:11.0}");
        rows.push((d, loss));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    let seeds = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    run(seeds).map(|_| ())
}
