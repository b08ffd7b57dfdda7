//! Polarization loss on a line-of-sight link as the receiver turns about
//! its boresight, with and without a cross-polarized pattern component.

use std::sync::Arc;

use nalgebra::Vector3;
use ris_sim::antenna::{synthetic_patch_pattern, Orientation};
use ris_sim::channel::{los_coefficient, LinkBudget, Pose};
use ris_sim::math::power_to_db;

/// Link gain relative to the aligned case, per rotation angle.
pub fn run() -> anyhow::Result<Vec<(f64, f64, f64)>> {
    let lb = LinkBudget::from_frequency(1.0, 3.5e9)?;
    let mut rows = Vec::new();
    let ideal = Arc::new(synthetic_patch_pattern(6.0, f64::NEG_INFINITY)?);
    let leaky = Arc::new(synthetic_patch_pattern(6.0, -20.0)?);
    let link = |pattern: &Arc<_>, r: f64| -> anyhow::Result<f64> {
        let tx = Pose::new(Vector3::zeros(), Orientation::IDENTITY, Arc::clone(pattern))?;
        let rx = Pose::new(Vector3::new(1.0, 0.0, 0.0), Orientation::new(r, 0.0, 180.0)?, Arc::clone(pattern))?;
        Ok(los_coefficient(&tx, &rx, &lb)?.norm_sqr())
    };
    let (i0, l0) = (link(&ideal, 0.0)?, link(&leaky, 0.0)?);
    println!("rotation  ideal dB  -20 dB leak dB  cos² dB");
    for r in (0..=180).step_by(15).map(f64::from) {
        let a = power_to_db(link(&ideal, r)? / i0);
        let b = power_to_db(link(&leaky, r)? / l0);
        println!("{r:8.0}  {a:8.2}  {b:14.2}  {:7.2}", power_to_db(r.to_radians().cos().powi(2)));
        rows.push((r, a, b));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run().map(|_| ())
}
