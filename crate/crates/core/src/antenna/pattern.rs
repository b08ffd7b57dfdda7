use std::path::Path;

use num_complex::Complex64;

use super::FieldPair;
use crate::math::{db_to_amplitude, wrap_deg};
use crate::{Error, Result};

pub const PATTERN_CSV_HEADER: [&str; 6] = ["theta_deg", "phi_deg", "ev_re", "ev_im", "eh_re", "eh_im"];

/// Level of the synthetic back lobe relative to boresight.
pub const BACK_LOBE_DB: f64 = -20.0;

/// Complex amplitude pattern `E = [E^V, E^H]` on a regular `(θ, φ)` grid.
///
/// Values are stored row-major with θ as the outer index. Immutable once
/// built.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationPattern {
    theta_grid: Vec<f64>,
    phi_grid: Vec<f64>,
    e_v: Vec<Complex64>,
    e_h: Vec<Complex64>,
}

fn strictly_ascending(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl RadiationPattern {
    /// Builds a pattern covering the whole sphere.
    ///
    /// `theta_grid` must run from −90° to 90°, `phi_grid` must be ascending
    /// inside [−180°, 180°]; the φ axis wraps around. Pole rows are replaced
    /// by their mean and a φ = ±180° column pair by its average, so that
    /// each physical direction carries a single value.
    pub fn new(
        theta_grid: Vec<f64>,
        phi_grid: Vec<f64>,
        mut e_v: Vec<Complex64>,
        mut e_h: Vec<Complex64>,
    ) -> Result<Self> {
        let (nt, np) = (theta_grid.len(), phi_grid.len());
        if nt < 2 || np < 2 {
            return Err(Error::InvalidPattern(format!("grid {nt}×{np} is smaller than 2×2")));
        }
        if e_v.len() != nt * np || e_h.len() != nt * np {
            return Err(Error::InvalidPattern("gain arrays do not match the grid".into()));
        }
        if !strictly_ascending(&theta_grid) || !strictly_ascending(&phi_grid) {
            return Err(Error::InvalidPattern("grids must be strictly ascending".into()));
        }
        if theta_grid[0] != -90.0 || theta_grid[nt - 1] != 90.0 {
            return Err(Error::InvalidPattern("theta grid must span [-90, 90]".into()));
        }
        if phi_grid[0] < -180.0 || phi_grid[np - 1] > 180.0 {
            return Err(Error::InvalidPattern("phi grid must lie in [-180, 180]".into()));
        }
        if e_v.iter().chain(&e_h).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidPattern("gains must be finite".into()));
        }

        for row in [0, nt - 1] {
            for values in [&mut e_v, &mut e_h] {
                let slice = &mut values[row * np..(row + 1) * np];
                let mean = slice.iter().sum::<Complex64>() / np as f64;
                slice.iter_mut().for_each(|z| *z = mean);
            }
        }
        if phi_grid[0] == -180.0 && phi_grid[np - 1] == 180.0 {
            for row in 0..nt {
                for values in [&mut e_v, &mut e_h] {
                    let avg = (values[row * np] + values[row * np + np - 1]) / 2.0;
                    values[row * np] = avg;
                    values[row * np + np - 1] = avg;
                }
            }
        }

        Ok(Self {
            theta_grid,
            phi_grid,
            e_v,
            e_h,
        })
    }

    /// Builds a pattern by evaluating `f(θ, φ)` on uniform grids with the
    /// given step, which must divide 180.
    pub fn from_fn(step_deg: f64, f: impl Fn(f64, f64) -> (Complex64, Complex64)) -> Result<Self> {
        let n = 180.0 / step_deg;
        if !(step_deg > 0.0) || (n - n.round()).abs() > 1e-9 {
            return Err(Error::InvalidPattern(format!("step {step_deg} does not divide 180")));
        }
        let n = n.round() as usize;
        let theta_grid: Vec<f64> = (0..=n).map(|i| -90.0 + i as f64 * step_deg).collect();
        let phi_grid: Vec<f64> = (0..=2 * n).map(|i| -180.0 + i as f64 * step_deg).collect();
        let mut e_v = Vec::with_capacity(theta_grid.len() * phi_grid.len());
        let mut e_h = Vec::with_capacity(e_v.capacity());
        for &t in &theta_grid {
            for &p in &phi_grid {
                let (v, h) = f(t, p);
                e_v.push(v);
                e_h.push(h);
            }
        }
        Self::new(theta_grid, phi_grid, e_v, e_h)
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn phi_grid(&self) -> &[f64] {
        &self.phi_grid
    }

    /// Stored `(E^V, E^H)` at grid node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (Complex64, Complex64) {
        let k = i * self.phi_grid.len() + j;
        (self.e_v[k], self.e_h[k])
    }

    /// Bilinear interpolation of real and imaginary parts, φ wrapping.
    pub fn sample(&self, theta: f64, phi: f64) -> FieldPair {
        let theta = theta.clamp(-90.0, 90.0);
        let (i0, i1, u) = bracket(&self.theta_grid, theta);
        let (j0, j1, w) = self.phi_bracket(wrap_deg(phi));
        let np = self.phi_grid.len();
        let at = |values: &[Complex64]| {
            let a = values[i0 * np + j0] * (1.0 - w) + values[i0 * np + j1] * w;
            let b = values[i1 * np + j0] * (1.0 - w) + values[i1 * np + j1] * w;
            a * (1.0 - u) + b * u
        };
        FieldPair::new(at(&self.e_v), at(&self.e_h))
    }

    fn phi_bracket(&self, phi: f64) -> (usize, usize, f64) {
        let g = &self.phi_grid;
        let (first, last) = (g[0], g[g.len() - 1]);
        if phi >= first && phi <= last {
            return bracket(g, phi);
        }
        // Wrap-around cell between the last node and the first node + 360°.
        let span = first + 360.0 - last;
        let offset = if phi > last { phi - last } else { phi + 360.0 - last };
        if span <= 0.0 {
            return (g.len() - 1, g.len() - 1, 0.0);
        }
        (g.len() - 1, 0, offset / span)
    }

    /// `(1/4π)∮ (|E^V|² + |E^H|²) dΩ` by the trapezoid rule on the grid.
    pub fn mean_radiated_power(&self) -> f64 {
        let (nt, np) = (self.theta_grid.len(), self.phi_grid.len());
        let mut phi_nodes: Vec<f64> = self.phi_grid.clone();
        let closes = self.phi_grid[0] + 360.0 - self.phi_grid[np - 1] > 1e-12;
        if closes {
            phi_nodes.push(self.phi_grid[0] + 360.0);
        }
        let power = |i: usize, j: usize| {
            let j = j % np;
            let (v, h) = self.node(i, j);
            v.norm_sqr() + h.norm_sqr()
        };
        let mut total = 0.0;
        for i in 0..nt - 1 {
            for j in 0..phi_nodes.len() - 1 {
                let t0 = self.theta_grid[i].to_radians();
                let t1 = self.theta_grid[i + 1].to_radians();
                let dphi = (phi_nodes[j + 1] - phi_nodes[j]).to_radians();
                let f = |ii: usize, jj: usize, t: f64| power(ii, jj) * t.cos();
                let cell = (f(i, j, t0) + f(i, j + 1, t0) + f(i + 1, j, t1) + f(i + 1, j + 1, t1)) / 4.0;
                total += cell * (t1 - t0) * dphi;
            }
        }
        total / (4.0 * std::f64::consts::PI)
    }

    /// Reads the CSV exchange format (see [`PATTERN_CSV_HEADER`]), rows
    /// ordered with θ outer and φ inner.
    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != PATTERN_CSV_HEADER {
            return Err(Error::InvalidPattern(format!(
                "expected header {}, found {}",
                PATTERN_CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows: Vec<[f64; 6]> = Vec::new();
        for (n, record) in rdr.records().enumerate() {
            let record = record?;
            let mut row = [0.0; 6];
            for (k, field) in record.iter().enumerate().take(6) {
                row[k] = field.parse().map_err(|_| {
                    Error::InvalidPattern(format!("row {}: `{field}` is not a number", n + 2))
                })?;
            }
            if record.len() != 6 {
                return Err(Error::InvalidPattern(format!("row {} has {} fields", n + 2, record.len())));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::InvalidPattern("no data rows".into()));
        }
        let np = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
        if !rows.len().is_multiple_of(np) {
            return Err(Error::InvalidPattern("rows do not form a full grid".into()));
        }
        let nt = rows.len() / np;
        let phi_grid: Vec<f64> = rows[..np].iter().map(|r| r[1]).collect();
        let theta_grid: Vec<f64> = (0..nt).map(|i| rows[i * np][0]).collect();
        for (k, r) in rows.iter().enumerate() {
            if r[0] != theta_grid[k / np] || r[1] != phi_grid[k % np] {
                return Err(Error::InvalidPattern(format!(
                    "row {} breaks the row-major grid ({}, {})",
                    k + 2,
                    r[0],
                    r[1]
                )));
            }
        }
        let e_v = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
        let e_h = rows.iter().map(|r| Complex64::new(r[4], r[5])).collect();
        Self::new(theta_grid, phi_grid, e_v, e_h)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PATTERN_CSV_HEADER)?;
        for (i, t) in self.theta_grid.iter().enumerate() {
            for (j, p) in self.phi_grid.iter().enumerate() {
                let (v, h) = self.node(i, j);
                w.write_record([t, p, &v.re, &v.im, &h.re, &h.im].map(|x| x.to_string()))?;
            }
        }
        w.flush().map_err(|e| Error::io("pattern csv", e))?;
        Ok(())
    }
}

/// Indices `(lo, hi)` and fraction for `x` on an ascending grid.
fn bracket(grid: &[f64], x: f64) -> (usize, usize, f64) {
    let n = grid.len();
    let hi = grid.partition_point(|&g| g < x).clamp(1, n - 1);
    let lo = hi - 1;
    if grid[hi] == x {
        return (hi, hi, 0.0);
    }
    if grid[lo] == x {
        return (lo, lo, 0.0);
    }
    let t = ((x - grid[lo]) / (grid[hi] - grid[lo])).clamp(0.0, 1.0);
    (lo, hi, t)
}

/// Analytic patch-like pattern with boresight along local +x.
///
/// The co-polar (vertical) amplitude follows `cos θ_b` over the front
/// hemisphere, `θ_b` being the angle from boresight, and a back lobe that
/// tapers from zero at the horizon to [`BACK_LOBE_DB`] at the back centre.
/// The horizontal component is the co-polar one scaled by
/// `cross_pol_leakage_db`; pass `f64::NEG_INFINITY` for a pure vertical
/// antenna.
pub fn synthetic_patch_pattern(max_gain_dbi: f64, cross_pol_leakage_db: f64) -> Result<RadiationPattern> {
    if !(cross_pol_leakage_db <= 0.0) || !max_gain_dbi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite gain and leakage <= 0 dB, got {max_gain_dbi} / {cross_pol_leakage_db}"
        )));
    }
    let peak = db_to_amplitude(max_gain_dbi);
    let leak = db_to_amplitude(cross_pol_leakage_db);
    let back = db_to_amplitude(BACK_LOBE_DB);
    RadiationPattern::from_fn(1.0, |theta, phi| {
        let c = theta.to_radians().cos() * phi.to_radians().cos();
        let co = if c >= 0.0 { peak * c } else { peak * back * (-c) };
        (Complex64::new(co, 0.0), Complex64::new(co * leak, 0.0))
    })
}
