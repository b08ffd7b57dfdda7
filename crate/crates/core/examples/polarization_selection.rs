//! A receiver that turns about its boresight while moving. Plain blind
//! greedy collapses where the receiver is orthogonal to the array; letting
//! each element pick a 0, 45 or 90 degree antenna recovers most of it.

use ris_sim::scenario::{build_scene, load_config, run_experiment, Experiment};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/walk_rotating.toml");

/// Gain of polarization selection over plain blind greedy per location.
pub fn run() -> anyhow::Result<Vec<f64>> {
    let built = build_scene(&load_config(CONFIG)?)?;
    let traj = built.trajectory.clone().expect("config has a trajectory");
    let out = run_experiment(&built, Experiment::PolarizationComparison)?;
    let bg: Vec<_> = out.table.method("blind_greedy").collect();
    let ps: Vec<_> = out.table.method("ps_blind_greedy").collect();
    println!("  y m  rx turn  BG dB  PS-BG dB  gain  variants");
    let mut gains = Vec::new();
    for (i, (a, b)) in bg.iter().zip(&ps).enumerate() {
        let g = b.quality_db - a.quality_db;
        let variants = b.state_digest.split('-').nth(1).unwrap_or("");
        println!(
            "{:.3}  {:7.1}  {:6.2}  {:8.2}  {:4.1}  {variants}",
            a.rx_y_m,
            traj.rotation_deg(i),
            a.quality_db,
            b.quality_db,
            g
        );
        gains.push(g);
    }
    Ok(gains)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
