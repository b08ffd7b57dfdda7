//! Perfect beamforming, beamforming quantized to the DPS states, and blind
//! greedy along a receiver path with matched polarization.

use ris_sim::scenario::{build_scene, load_config, run_experiment, Experiment, ResultTable};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/walk_matched.toml");

pub fn print_curves(table: &ResultTable) {
    let methods = table.methods();
    print!("{:>6}", "y m");
    for m in &methods {
        print!(" {m:>20}");
    }
    println!();
    let plot = table.plot_data();
    for row in &plot.rows {
        print!("{:>6.3}", row[2].parse::<f64>().unwrap_or(f64::NAN));
        for v in &row[4..] {
            print!(" {:>20.2}", v.parse::<f64>().unwrap_or(f64::NAN));
        }
        println!();
    }
}

pub fn run() -> anyhow::Result<ResultTable> {
    let out = run_experiment(&build_scene(&load_config(CONFIG)?)?, Experiment::ControllerComparison)?;
    print_curves(&out.table);
    let bg: Vec<_> = out.table.method("blind_greedy").collect();
    let bf: Vec<_> = out.table.method("beamforming_dps").collect();
    let wins = bg.iter().zip(&bf).filter(|(a, b)| a.quality_db >= b.quality_db).count();
    println!("blind greedy at least as good as quantized beamforming at {wins}/{} locations", bg.len());
    Ok(out.table)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
