use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ris_sim::controller::{BgParams, StateMatrix};
use ris_sim::scenario::{
    build_scene, evaluate_states, fit_dps_input, load_config, optimize, run_experiment, track, write_outputs,
    BuiltScenario, Experiment, ExperimentOutput, RunManifest,
};

#[derive(Parser)]
#[command(name = "ris-sim", version, about = "RIS channel simulation and blind control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the DPS state model to Touchstone files or a gamma CSV.
    FitDps {
        input: PathBuf,
        /// Model file to write (TOML).
        #[arg(short = 'o', long = "model")]
        model: PathBuf,
        #[arg(long, default_value_t = 3.5e9)]
        frequency_hz: f64,
        #[arg(long, default_value_t = 4)]
        bits: u8,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Quality of a state matrix given as a digest or a file holding one.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        states: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Every matrix over the configured codebook.
    Exhaustive {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Blind greedy at the configured receiver.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tr: Option<usize>,
        #[arg(long)]
        tg: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tracking along the configured trajectory.
    Track {
        #[arg(long)]
        config: PathBuf,
        /// Activation distance in meters.
        #[arg(long)]
        activation: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// One of the named experiments.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        experiment: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn scenario(path: &Path) -> Result<BuiltScenario> {
    let cfg = load_config(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(build_scene(&cfg)?)
}

fn finish(out_dir: &Path, out: &ExperimentOutput, manifest: RunManifest) -> Result<()> {
    for p in write_outputs(out_dir, out, manifest)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::FitDps { input, model, frequency_hz, bits, out } => {
            let report = fit_dps_input(&input, frequency_hz, bits)?;
            std::fs::write(&model, report.fit.model.to_toml()).with_context(|| format!("writing {}", model.display()))?;
            std::fs::create_dir_all(&out)?;
            report.table().emit_csv(out.join("dps_fit.csv"))?;
            let mut m = RunManifest::new("fit-dps")
                .arg("input", input.display())
                .arg("model", model.display())
                .arg("frequency_hz", frequency_hz)
                .arg("magnitude_rmse_db", report.fit.magnitude_rmse_db)
                .arg("phase_rmse_deg", report.fit.phase_rmse_deg);
            m.outputs = vec!["dps_fit.csv".into()];
            m.write(out.join("manifest.json"))?;
            println!("{}", model.display());
        }
        Command::Eval { config, states, out } => {
            let b = scenario(&config)?;
            let text = if Path::new(&states).is_file() {
                std::fs::read_to_string(&states)?.trim().to_string()
            } else {
                states.clone()
            };
            let s = StateMatrix::parse_digest(&text, b.dps.bits())?;
            let res = evaluate_states(&b, &s)?;
            let m = RunManifest::new("eval").with_config(&b.config).arg("states", &text);
            finish(&out, &res, m)?;
        }
        Command::Exhaustive { config, out } => {
            let b = scenario(&config)?;
            let res = run_experiment(&b, Experiment::ExhaustivePmf)?;
            finish(&out, &res, RunManifest::new("exhaustive").with_config(&b.config))?;
        }
        Command::Optimize { config, tr, tg, seed, out } => {
            let b = scenario(&config)?;
            let base = b.bg_params()?;
            let p = BgParams::new(
                tr.unwrap_or(base.t_r),
                tg.unwrap_or(base.t_g),
                seed.unwrap_or(base.seed),
                base.codebook.clone(),
            )?;
            let res = optimize(&b, &p)?;
            let mut m = RunManifest::new("optimize")
                .with_config(&b.config)
                .arg("t_r", p.t_r)
                .arg("t_g", p.t_g);
            m.seed = Some(p.seed);
            finish(&out, &res, m)?;
        }
        Command::Track { config, activation, out } => {
            let b = scenario(&config)?;
            let res = track(&b, activation)?;
            let m = RunManifest::new("track").with_config(&b.config).arg("activation_m", activation);
            finish(&out, &res, m)?;
        }
        Command::Sweep { config, experiment, out } => {
            let b = scenario(&config)?;
            let e: Experiment = experiment.parse()?;
            let res = run_experiment(&b, e)?;
            finish(&out, &res, RunManifest::new("sweep").with_config(&b.config).arg("experiment", e))?;
        }
    }
    Ok(())
}
