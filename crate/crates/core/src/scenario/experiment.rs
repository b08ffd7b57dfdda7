use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::build::BuiltScenario;
use super::output::{ExperimentOutput, ResultRow, SideTable};
use crate::channel::{CompiledScene, PolarizationVariant};
use crate::controller::{
    beamforming_with_dps, blind_greedy, derive_seed, exhaustive_search, full_bg_reference, perfect_beamforming,
    polarization_selecting_bg, tracked_run, BgParams, SearchOutcome, StateMatrix,
};
use crate::dps::{cascade_reflection, fit_dps_model, read_touchstone, DpsFit, StateCode, Termination};
use crate::math::{amplitude_to_db, polar_deg};
use crate::{Error, Result};

pub const PMF_BIN_DB: f64 = 1.0;

/// Bins holding less than this fraction do not count as peaks.
const PEAK_MASS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Every matrix of the codebook at one receiver location.
    ExhaustivePmf,
    /// Beamforming baselines against blind greedy along the trajectory.
    ControllerComparison,
    /// As above plus polarization-selecting blind greedy.
    PolarizationComparison,
    /// Tracking with each configured activation distance.
    TrackingSweep,
    /// Every DPS state applied to all elements.
    DpsStateSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Self::ExhaustivePmf,
        Self::ControllerComparison,
        Self::PolarizationComparison,
        Self::TrackingSweep,
        Self::DpsStateSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ExhaustivePmf => "exhaustive_pmf",
            Self::ControllerComparison => "controller_comparison",
            Self::PolarizationComparison => "polarization_comparison",
            Self::TrackingSweep => "tracking_sweep",
            Self::DpsStateSweep => "dps_state_sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment `{s}`")))
    }
}

pub fn run_experiment(built: &BuiltScenario, e: Experiment) -> Result<ExperimentOutput> {
    let mut out = match e {
        Experiment::ExhaustivePmf => exhaustive_pmf(built)?,
        Experiment::ControllerComparison => comparison(built, false)?,
        Experiment::PolarizationComparison => comparison(built, true)?,
        Experiment::TrackingSweep => tracking_sweep(built)?,
        Experiment::DpsStateSweep => dps_state_sweep(built)?,
    };
    out.warnings = built.warnings.clone();
    Ok(out)
}

fn row(i: usize, pos: &Vector3<f64>, method: &str, q: f64, loss: f64, evals: u64, digest: String) -> ResultRow {
    ResultRow {
        location_index: i,
        rx_x_m: pos.x,
        rx_y_m: pos.y,
        rx_z_m: pos.z,
        method: method.to_string(),
        quality_db: q,
        relative_loss_db: loss,
        evaluation_count: evals,
        state_digest: digest,
    }
}

/// Scenes along the trajectory, or the configured receiver alone.
fn locations(built: &BuiltScenario) -> Result<Vec<(Vector3<f64>, CompiledScene)>> {
    if built.trajectory.is_none() {
        return Ok(vec![(built.scene.rx.position, built.scene.compile()?)]);
    }
    built
        .trajectory_scenes()?
        .into_iter()
        .map(|s| Ok((s.rx.position, s.compile()?)))
        .collect()
}

/// One bin `[low_db, low_db + PMF_BIN_DB)` of a quality histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfBin {
    pub low_db: f64,
    pub count: usize,
    pub probability: f64,
}

/// Histogram of `qualities` on a grid of `PMF_BIN_DB` aligned to whole
/// multiples of the bin width.
pub fn quality_pmf(qualities: &[f64]) -> Vec<PmfBin> {
    let finite: Vec<f64> = qualities.iter().copied().filter(|q| q.is_finite()).collect();
    if finite.is_empty() {
        return Vec::new();
    }
    let lo = (finite.iter().copied().fold(f64::INFINITY, f64::min) / PMF_BIN_DB).floor() as i64;
    let hi = (finite.iter().copied().fold(f64::NEG_INFINITY, f64::max) / PMF_BIN_DB).floor() as i64;
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for q in &finite {
        counts[((q / PMF_BIN_DB).floor() as i64 - lo) as usize] += 1;
    }
    let total = finite.len() as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| PmfBin {
            low_db: (lo + k as i64) as f64 * PMF_BIN_DB,
            count,
            probability: count as f64 / total,
        })
        .collect()
}

/// Whether the histogram has a single peak and a lower tail longer than
/// the upper one. Peaks are local maxima (runs of equal bins merged)
/// carrying more than 1 % of the mass.
pub fn is_unimodal_with_lower_tail(bins: &[PmfBin]) -> bool {
    if bins.is_empty() {
        return false;
    }
    // Collapse plateaus so a flat top counts once.
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for (k, b) in bins.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.2 == b.probability => r.1 = k,
            _ => runs.push((k, k, b.probability)),
        }
    }
    let peaks: Vec<usize> = (0..runs.len())
        .filter(|&r| {
            let p = runs[r].2;
            let left = r == 0 || runs[r - 1].2 < p;
            let right = r + 1 == runs.len() || runs[r + 1].2 < p;
            left && right && p > PEAK_MASS
        })
        .collect();
    if peaks.len() != 1 {
        return false;
    }
    let (a, b, _) = runs[peaks[0]];
    let mode = (bins[a].low_db + bins[b].low_db) / 2.0;
    let lower = mode - bins[0].low_db;
    let upper = bins[bins.len() - 1].low_db - mode;
    lower > upper
}

fn exhaustive_pmf(built: &BuiltScenario) -> Result<ExperimentOutput> {
    let scene = built.scene.compile()?;
    let codebook = &built.config.controller.codebook;
    let res = exhaustive_search(&scene, codebook, u128::from(built.config.exhaustive_budget))?;
    let n = scene.element_count();
    let base = codebook.len();
    let pos = built.scene.rx.position;
    let mut out = ExperimentOutput::new(super::Experiment::ExhaustivePmf.name());
    for (k, &q) in res.qualities.iter().enumerate() {
        let mut codes = vec![codebook[0]; n];
        let mut rest = k;
        for slot in codes.iter_mut().rev() {
            *slot = codebook[rest % base];
            rest /= base;
        }
        let states = StateMatrix::new(codes)?;
        out.table.push(row(0, &pos, "exhaustive", q, res.best_db - q, 1, states.digest()));
    }
    let bins = quality_pmf(&res.qualities);
    out.side.push(SideTable {
        name: "pmf".into(),
        header: vec!["bin_low_db".into(), "bin_high_db".into(), "count".into(), "probability".into()],
        rows: bins
            .iter()
            .map(|b| {
                vec![
                    b.low_db.to_string(),
                    (b.low_db + PMF_BIN_DB).to_string(),
                    b.count.to_string(),
                    b.probability.to_string(),
                ]
            })
            .collect(),
    });
    let worst = res.qualities.iter().copied().fold(f64::INFINITY, f64::min);
    out.side.push(SideTable {
        name: "summary".into(),
        header: vec!["states".into(), "best_db".into(), "worst_db".into(), "best_state".into(), "unimodal".into()],
        rows: vec![vec![
            res.qualities.len().to_string(),
            res.best_db.to_string(),
            worst.to_string(),
            res.best.digest(),
            is_unimodal_with_lower_tail(&bins).to_string(),
        ]],
    });
    Ok(out)
}

fn comparison(built: &BuiltScenario, with_polarization: bool) -> Result<ExperimentOutput> {
    let name = if with_polarization {
        super::Experiment::PolarizationComparison
    } else {
        super::Experiment::ControllerComparison
    };
    let mut out = ExperimentOutput::new(name.name());
    let p = built.bg_params()?;
    let reference = built.config.controller.reference_phase;
    for (i, (pos, scene)) in locations(built)?.iter().enumerate() {
        let pb = perfect_beamforming(scene, reference)?;
        out.table.push(row(i, pos, "perfect_beamforming", pb.quality_db, 0.0, 1, String::new()));
        let (bf, q) = beamforming_with_dps(scene, &built.dps, reference)?;
        out.table.push(row(i, pos, "beamforming_dps", q, pb.quality_db - q, 1, bf.digest()));
        let pi = p.with_seed(derive_seed(p.seed, i as u64));
        let mut push = |method: &str, s: SearchOutcome| -> Result<()> {
            let q = scene.quality_db(&s.states)?;
            out.table
                .push(row(i, pos, method, q, pb.quality_db - q, s.evaluations() as u64, s.states.digest()));
            Ok(())
        };
        push("blind_greedy", blind_greedy(scene, &pi)?)?;
        if with_polarization {
            push("ps_blind_greedy", polarization_selecting_bg(scene, &pi, &PolarizationVariant::ALL)?)?;
        }
    }
    Ok(out)
}

/// Seed `k` of a multi-seed sweep; seed 0 is the scenario seed itself.
pub fn sweep_seed(seed: u64, k: u64) -> u64 {
    if k == 0 {
        seed
    } else {
        derive_seed(seed, u64::MAX - k)
    }
}

pub fn tracking_method(d: f64) -> String {
    format!("tracking_{d:.3}m")
}

fn tracking_sweep(built: &BuiltScenario) -> Result<ExperimentOutput> {
    let traj = built
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::Validation("tracking_sweep needs a [trajectory]".into()))?;
    let distances = &built.config.tracking.activation_distances_m;
    if distances.is_empty() {
        return Err(Error::Validation("tracking.activation_distances_m is empty".into()));
    }
    let positions = traj.positions();
    let scenes = built
        .trajectory_scenes()?
        .iter()
        .map(|s| s.compile())
        .collect::<Result<Vec<_>>>()?;
    let base = built.bg_params()?;
    let warm = built.config.controller.warm_start;
    let seeds = built.config.tracking.seeds;

    let mut out = ExperimentOutput::new(super::Experiment::TrackingSweep.name());
    // grid[d][i] = (summed loss, summed evaluations, full BG count)
    let mut grid = vec![vec![(0.0, 0.0, 0u64); positions.len()]; distances.len()];
    for k in 0..seeds {
        let p = base.with_seed(sweep_seed(base.seed, k));
        let reference = full_bg_reference(&scenes, &p)?;
        if k == 0 {
            let full = tracked_run(&scenes, &positions, 0.0, &p, warm, Some(&reference))?;
            for t in &full {
                out.table.push(row(
                    t.index,
                    &positions[t.index],
                    "blind_greedy",
                    t.quality_db,
                    0.0,
                    t.evaluations as u64,
                    t.states.digest(),
                ));
            }
        }
        for (j, &d) in distances.iter().enumerate() {
            let run = tracked_run(&scenes, &positions, d, &p, warm, Some(&reference))?;
            for t in &run {
                let cell = &mut grid[j][t.index];
                cell.0 += t.relative_loss_db;
                cell.1 += t.evaluations as f64;
                cell.2 += u64::from(t.full_bg);
                if k == 0 {
                    out.table.push(row(
                        t.index,
                        &positions[t.index],
                        &tracking_method(d),
                        t.quality_db,
                        t.relative_loss_db,
                        t.evaluations as u64,
                        t.states.digest(),
                    ));
                }
            }
        }
    }
    let n = seeds as f64;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (j, &d) in distances.iter().enumerate() {
        let (mut loss, mut evals) = (0.0, 0.0);
        for (i, cell) in grid[j].iter().enumerate() {
            rows.push(vec![
                d.to_string(),
                i.to_string(),
                positions[i].y.to_string(),
                (cell.0 / n).to_string(),
                (cell.1 / n).to_string(),
                (cell.2 as f64 / n).to_string(),
            ]);
            loss += cell.0 / n;
            evals += cell.1 / n;
        }
        summary.push(vec![
            d.to_string(),
            (loss / positions.len() as f64).to_string(),
            evals.to_string(),
        ]);
    }
    out.side.push(SideTable {
        name: "tracking_grid".into(),
        header: ["activation_distance_m", "location_index", "rx_y_m", "mean_relative_loss_db", "mean_evaluations", "full_bg_rate"]
            .map(String::from)
            .to_vec(),
        rows,
    });
    out.side.push(SideTable {
        name: "tracking_summary".into(),
        header: ["activation_distance_m", "mean_relative_loss_db", "mean_total_evaluations"]
            .map(String::from)
            .to_vec(),
        rows: summary,
    });
    Ok(out)
}

fn dps_state_sweep(built: &BuiltScenario) -> Result<ExperimentOutput> {
    let scene = built.scene.compile()?;
    let n = scene.element_count();
    let codes = StateCode::all(built.dps.bits());
    let mut q = Vec::with_capacity(codes.len());
    for &c in &codes {
        q.push(scene.quality_db(&StateMatrix::new(vec![c; n])?)?);
    }
    let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pos = built.scene.rx.position;
    let mut out = ExperimentOutput::new(super::Experiment::DpsStateSweep.name());
    let mut rows = Vec::new();
    for (c, &qc) in codes.iter().zip(&q) {
        let states = StateMatrix::new(vec![*c; n])?;
        out.table.push(row(0, &pos, "dps_state", qc, best - qc, 1, states.digest()));
        let (db, _) = built.dps.state_db_deg(*c);
        let deg = crate::dps::state_phase_wrapped(&built.dps, *c);
        rows.push(vec![c.to_string(), db.to_string(), deg.to_string(), qc.to_string()]);
    }
    out.side.push(SideTable {
        name: "dps_states".into(),
        header: ["state", "gamma_db", "gamma_deg", "quality_db"].map(String::from).to_vec(),
        rows,
    });
    Ok(out)
}

/// Quality of a given state matrix at the configured receiver.
pub fn evaluate_states(built: &BuiltScenario, states: &StateMatrix) -> Result<ExperimentOutput> {
    let scene = built.scene.compile()?;
    let q = scene.quality_db(states)?;
    let pb = perfect_beamforming(&scene, built.config.controller.reference_phase)?;
    let mut out = ExperimentOutput::new("eval");
    out.table
        .push(row(0, &built.scene.rx.position, "eval", q, pb.quality_db - q, 1, states.digest()));
    out.warnings = built.warnings.clone();
    Ok(out)
}

/// Blind greedy at the configured receiver; the trace goes to a side table.
pub fn optimize(built: &BuiltScenario, p: &BgParams) -> Result<ExperimentOutput> {
    let scene = built.scene.compile()?;
    let s = blind_greedy(&scene, p)?;
    let q = scene.quality_db(&s.states)?;
    let pb = perfect_beamforming(&scene, built.config.controller.reference_phase)?;
    let mut out = ExperimentOutput::new("optimize");
    out.table.push(row(
        0,
        &built.scene.rx.position,
        "blind_greedy",
        q,
        pb.quality_db - q,
        s.evaluations() as u64,
        s.states.digest(),
    ));
    out.side.push(SideTable {
        name: "trace".into(),
        header: ["eval_index", "quality_db", "incumbent_db", "state_digest_hex"].map(String::from).to_vec(),
        rows: s
            .trace
            .entries()
            .iter()
            .map(|e| {
                vec![
                    e.eval_index.to_string(),
                    e.candidate_db.to_string(),
                    e.incumbent_db.to_string(),
                    e.digest.clone(),
                ]
            })
            .collect(),
    });
    out.warnings = built.warnings.clone();
    Ok(out)
}

/// Tracking along the trajectory with one activation distance.
pub fn track(built: &BuiltScenario, activation_distance: f64) -> Result<ExperimentOutput> {
    let mut cfg = built.config.clone();
    cfg.tracking.activation_distances_m = vec![activation_distance];
    cfg.tracking.seeds = 1;
    let b = BuiltScenario { config: cfg, ..built.clone() };
    let mut out = tracking_sweep(&b)?;
    out.name = "track".into();
    out.warnings = built.warnings.clone();
    Ok(out)
}

/// Measured reflection of every state plus the fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct DpsFitReport {
    pub samples: Vec<(StateCode, Complex64)>,
    pub fit: DpsFit,
}

impl DpsFitReport {
    pub fn table(&self) -> SideTable {
        let rows = self
            .samples
            .iter()
            .map(|(c, g)| {
                let (db, deg) = self.fit.model.state_db_deg(*c);
                vec![
                    c.to_string(),
                    amplitude_to_db(g.norm()).to_string(),
                    g.arg().to_degrees().to_string(),
                    db.to_string(),
                    deg.to_string(),
                ]
            })
            .collect();
        SideTable {
            name: "dps_fit".into(),
            header: ["state", "measured_db", "measured_deg", "fitted_db", "fitted_deg"]
                .map(String::from)
                .to_vec(),
            rows,
        }
    }
}

/// Loads DPS measurements and fits the weighted-sum model.
///
/// `input` is either a directory of 2-port Touchstone files, one per
/// state, whose file stem ends in the state number (`state_05.s2p`), or a
/// CSV with columns `state,gamma_db,gamma_deg` (`state` in binary). For
/// Touchstone input the point nearest `frequency_hz` is cascaded with an
/// open end.
pub fn fit_dps_input(input: &Path, frequency_hz: f64, bits: u8) -> Result<DpsFitReport> {
    let samples = if input.is_dir() {
        touchstone_samples(input, frequency_hz, bits)?
    } else {
        csv_samples(input)?
    };
    let fit = fit_dps_model(&samples)?;
    Ok(DpsFitReport { samples, fit })
}

fn touchstone_samples(dir: &Path, frequency_hz: f64, bits: u8) -> Result<Vec<(StateCode, Complex64)>> {
    let mut out = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() != Some("s2p") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let digits: String = stem
            .chars()
            .rev()
            .take_while(char::is_ascii_digit)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        let value: u32 = digits.parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            message: "file name does not end in a state number".into(),
        })?;
        let points = read_touchstone(&path)?;
        let s = points
            .iter()
            .min_by(|a, b| {
                (a.frequency_hz - frequency_hz)
                    .abs()
                    .total_cmp(&(b.frequency_hz - frequency_hz).abs())
            })
            .ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                message: "no data points".into(),
            })?;
        out.push((StateCode::from_value(value, bits)?, cascade_reflection(s, Termination::OPEN)?));
    }
    out.sort_by_key(|(c, _)| c.value());
    Ok(out)
}

fn csv_samples(path: &Path) -> Result<Vec<(StateCode, Complex64)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        state: String,
        gamma_db: f64,
        gamma_deg: f64,
    }
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(f);
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row?;
        let code = StateCode::parse_binary(row.state.trim())?;
        out.push((code, polar_deg(crate::math::db_to_amplitude(row.gamma_db), row.gamma_deg)));
    }
    Ok(out)
}
