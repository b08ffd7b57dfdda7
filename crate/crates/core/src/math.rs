//! Small numeric helpers shared by every module.

use num_complex::Complex64;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Voltage-domain dB (`20·log10`) to linear magnitude.
#[inline]
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[inline]
pub fn amplitude_to_db(amplitude: f64) -> f64 {
    20.0 * amplitude.log10()
}

#[inline]
pub fn power_to_db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Wraps an angle in degrees into (−180, 180].
pub fn wrap_deg(deg: f64) -> f64 {
    let mut w = deg % 360.0;
    if w <= -180.0 {
        w += 360.0;
    } else if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// `|z|·e^{jφ}` with φ in degrees.
#[inline]
pub fn polar_deg(magnitude: f64, phase_deg: f64) -> Complex64 {
    Complex64::from_polar(magnitude, phase_deg.to_radians())
}

/// `sin(x)/x` with the removable singularity filled in.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
