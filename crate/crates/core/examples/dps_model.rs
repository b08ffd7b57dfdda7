//! The DPS-O state model: Table I values, the phase doubling of a through
//! line closed by an open end, and fitting the model back from noisy
//! reflection measurements.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use ris_sim::dps::{
    cascade_reflection, fit_dps_model, state_reflection, DpsModel, StateCode, Termination, TwoPortSParams,
};
use ris_sim::math::{amplitude_to_db, polar_deg, wrap_deg};

pub fn run() -> anyhow::Result<f64> {
    let model = DpsModel::table_one();
    println!("state   |Γ| dB   ∠Γ deg");
    for code in StateCode::all(4) {
        let g = state_reflection(&model, code);
        println!("{code}  {:7.2}  {:8.1}", amplitude_to_db(g.norm()), g.arg().to_degrees());
    }

    // A matched through line of phase φ comes back from the open end as
    // a half turn plus 2φ.
    let reference = cascade_reflection(&TwoPortSParams::through_line(0.0, 3.5e9), Termination::OPEN)?;
    for phi in [-22.5, -45.0, -90.0] {
        let g = cascade_reflection(&TwoPortSParams::through_line(phi, 3.5e9), Termination::OPEN)?;
        let rel = wrap_deg((g / reference).arg().to_degrees());
        println!("through {phi:6.1}° -> reflection {rel:7.1}°");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mag = Normal::new(0.0, 0.1)?;
    let ang = Normal::new(0.0, 2.0)?;
    let samples: Vec<_> = StateCode::all(4)
        .into_iter()
        .map(|c| {
            let (db, deg) = model.state_db_deg(c);
            let g = polar_deg(10f64.powf((db + mag.sample(&mut rng)) / 20.0), deg + ang.sample(&mut rng));
            (c, g)
        })
        .collect();
    let fit = fit_dps_model(&samples)?;
    let mut worst = 0.0f64;
    for (n, (a, b)) in fit.model.orders.iter().zip(&model.orders).enumerate() {
        println!(
            "order {}: {:6.2} dB {:8.2}° (true {:6.2} dB {:8.2}°)",
            n + 1,
            a.attenuation_db,
            a.phase_deg,
            b.attenuation_db,
            b.phase_deg
        );
        worst = worst.max((a.phase_deg - b.phase_deg).abs());
    }
    println!("rmse {:.3} dB, {:.2}°", fit.magnitude_rmse_db, fit.phase_rmse_deg);
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
