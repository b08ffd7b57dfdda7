use std::sync::Arc;

use approx::assert_relative_eq;
use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::antenna::{rotated_pattern_response, synthetic_patch_pattern, AnglePair};
use crate::math::db_to_amplitude;

const GAIN_DBI: f64 = 6.0;

fn ideal() -> Arc<RadiationPattern> {
    Arc::new(synthetic_patch_pattern(GAIN_DBI, f64::NEG_INFINITY).unwrap())
}

fn leaky() -> Arc<RadiationPattern> {
    Arc::new(synthetic_patch_pattern(GAIN_DBI, -15.0).unwrap())
}

fn pose_with(p: [f64; 3], o: Orientation, pattern: Arc<RadiationPattern>) -> Pose {
    Pose::new(Vector3::from(p), o, pattern).unwrap()
}

fn pose(p: [f64; 3], rz: f64) -> Pose {
    pose_with(p, Orientation::new(0.0, 0.0, rz).unwrap(), ideal())
}

fn budget() -> LinkBudget {
    LinkBudget::from_frequency(1.0, 3.5e9).unwrap()
}

fn element_at(p: [f64; 3], o: Orientation) -> RisElement {
    let half = budget().wavelength() / 2.0;
    RisElement::new(pose_with(p, o, ideal()), DpsModel::table_one(), half, half).unwrap()
}

fn code(v: u32) -> StateCode {
    StateCode::from_value(v, 4).unwrap()
}

fn g() -> f64 {
    db_to_amplitude(GAIN_DBI)
}

fn dir(theta: f64, phi: f64) -> AnglePair {
    AnglePair::new(theta, phi).unwrap()
}

#[test]
fn path_loss_examples() {
    let lb = budget();
    let d0 = lb.wavelength() / (4.0 * std::f64::consts::PI);
    assert_relative_eq!(path_loss(d0, &lb).unwrap(), 1.0, epsilon = 1e-15);
    assert_relative_eq!(path_loss(2.0, &lb).unwrap() / path_loss(1.0, &lb).unwrap(), 0.25, epsilon = 1e-15);
    let lb2 = LinkBudget::new(1.0, 0.0857).unwrap();
    let l = path_loss(1.0, &lb2).unwrap();
    assert!((l - 4.651e-5).abs() < 1e-8, "{l}");
    assert!(matches!(path_loss(0.0, &lb), Err(Error::ZeroDistance(_))));
}

#[test]
fn link_budget_validates() {
    assert!(LinkBudget::new(0.0, 0.1).is_err());
    assert!(LinkBudget::new(1.0, -0.1).is_err());
    let lb = budget();
    assert!((lb.wave_number() * lb.wavelength() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn matched_los_power() {
    let lb = budget();
    let tx = pose([0.0, 0.0, 0.0], 0.0);
    let rx = pose([2.0, 0.0, 0.0], 180.0);
    let c = los_coefficient(&tx, &rx, &lb).unwrap();
    let expected = path_loss(2.0, &lb).unwrap() * g().powi(4);
    assert_relative_eq!(c.norm_sqr(), expected, max_relative = 1e-12);
    assert!(matches!(los_coefficient(&tx, &tx, &lb), Err(Error::ZeroDistance(_))));
}

#[test]
fn receiver_rotated_about_boresight_nulls_los() {
    let lb = budget();
    let tx = pose([0.0, 0.0, 0.0], 0.0);
    let matched = los_coefficient(&tx, &pose([2.0, 0.0, 0.0], 180.0), &lb).unwrap();
    let crossed = pose_with([2.0, 0.0, 0.0], Orientation::new(90.0, 0.0, 180.0).unwrap(), ideal());
    let c = los_coefficient(&tx, &crossed, &lb).unwrap();
    assert!(c.norm() < 1e-12 * matched.norm(), "{}", c.norm() / matched.norm());
}

#[test]
fn initial_phases_rotate_los() {
    let lb = budget();
    let tx = pose([0.0, 0.0, 0.0], 0.0);
    let rx = pose([2.0, 0.3, 0.0], 180.0);
    let c0 = los_coefficient(&tx, &rx, &lb).unwrap();
    let c1 = los_coefficient(&tx.clone().with_initial_phase(30.0), &rx.clone().with_initial_phase(-370.0), &lb).unwrap();
    assert_relative_eq!(c1.re, (c0 * Complex64::from_polar(1.0, -20f64.to_radians())).re, epsilon = 1e-12);
    assert_eq!(rx.with_initial_phase(-370.0).initial_phase_deg(), -10.0);
}

#[test]
fn am_polarization_matrix_properties() {
    let e = element_at([0.0, 0.0, 0.0], Orientation::new(10.0, -20.0, 5.0).unwrap());
    let (a, b) = (dir(10.0, 30.0), dir(-5.0, -40.0));
    let zero = am_polarization_matrix(&e, Complex64::new(0.0, 0.0), &a, &b);
    assert_eq!(zero, Matrix2::zeros());
    let gamma = Complex64::from_polar(0.8, 1.1);
    let m = am_polarization_matrix(&e, gamma, &a, &b);
    let sv = m.singular_values();
    assert!(sv[1] < 1e-12 * sv[0], "{sv}");
    let half = am_polarization_matrix(&e, gamma / 2.0, &a, &b);
    assert!((m / Complex64::new(2.0, 0.0) - half).norm() < 1e-15);
}

#[test]
fn am_coefficient_on_boresight_axis() {
    let lb = budget();
    let tx = pose([1.0, 0.0, 0.0], 180.0);
    let rx = pose([2.5, 0.0, 0.0], 180.0);
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let c = code(0b0110);
    let am = am_coefficient(&tx, &rx, &e, c, &lb).unwrap();
    let amp = (path_loss(1.0, &lb).unwrap() * path_loss(2.5, &lb).unwrap()).sqrt();
    let expected = amp * g().powi(4) * state_reflection(&e.dps, c).norm();
    assert_relative_eq!(am.norm(), expected, max_relative = 1e-12);
}

#[test]
fn am_coefficient_matches_matrix_chain() {
    let lb = budget();
    let tx = pose_with([0.9, -0.2, 0.1], Orientation::new(5.0, 3.0, 170.0).unwrap(), leaky()).with_initial_phase(12.0);
    let rx = pose_with([1.1, 0.4, -0.05], Orientation::new(-7.0, 0.0, 195.0).unwrap(), leaky()).with_initial_phase(-40.0);
    let mut e = element_at([0.0, 0.1, 0.0], Orientation::new(20.0, 5.0, -3.0).unwrap());
    e.pose = e.pose.clone().with_initial_phase(77.0);
    e.pose.pattern = leaky();
    let c = code(0b1011);

    // Oracle: the printed chain with explicit angle pairs.
    let to = |from: &Vector3<f64>, to: &Vector3<f64>| {
        let v = to - from;
        (v.norm(), angle_pair_of(&v).angles)
    };
    let (d1, to_tx) = to(&e.pose.position, &tx.position);
    let (d2, to_rx) = to(&e.pose.position, &rx.position);
    let (_, aod) = to(&tx.position, &e.pose.position);
    let (_, aoa) = to(&rx.position, &e.pose.position);
    let e_t = rotated_pattern_response(&tx.pattern, &tx.orientation, &aod).field;
    let e_r = rotated_pattern_response(&rx.pattern, &rx.orientation, &aoa).field;
    let m = am_polarization_matrix(&e, state_reflection(&e.dps, c), &to_rx, &to_tx);
    let chain = (e_r.transpose() * m_d() * m * m_d() * e_t)[(0, 0)];
    let amp = (path_loss(d1, &lb).unwrap() * path_loss(d2, &lb).unwrap()).sqrt();
    let psi = (12.0f64 - 40.0 + 77.0).to_radians() + lb.wave_number() * (d1 + d2);
    let expected = amp * chain * Complex64::from_polar(1.0, -psi);

    let got = am_coefficient(&tx, &rx, &e, c, &lb).unwrap();
    assert!((got - expected).norm() < 1e-12 * expected.norm());
}

#[test]
fn half_wavelength_move_flips_am_phase() {
    let lb = budget();
    let tx = pose([1.0, 0.0, 0.0], 180.0);
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let ray = Vector3::new(2.0, 0.5, 0.0);
    let rx_at = |s: f64| {
        let p = ray * s;
        pose_with([p.x, p.y, p.z], Orientation::new(0.0, 0.0, 194.0).unwrap(), ideal())
    };
    let a1 = am_coefficient(&tx, &rx_at(5.0), &e, code(3), &lb).unwrap();
    let a2 = am_coefficient(&tx, &rx_at(5.0 + lb.wavelength() / 2.0 / ray.norm()), &e, code(3), &lb).unwrap();
    let ratio = a2 / a1;
    assert!((ratio.arg().abs() - std::f64::consts::PI).abs() < 1e-9);
    assert!((ratio.norm() - 1.0).abs() < 0.01);
}

#[test]
fn scattering_peaks_at_backscatter_under_normal_incidence() {
    let lb = budget();
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let spec = plate_scattering_matrix(&e, &dir(0.0, 0.0), &dir(0.0, 0.0), &lb).unwrap();
    let area = e.plate_width() * e.plate_height();
    let peak = 4.0 * std::f64::consts::PI * area / lb.wavelength().powi(2);
    assert_relative_eq!(spec[(0, 0)].norm(), peak, max_relative = 1e-12);
    assert_relative_eq!(spec[(1, 1)].norm(), peak, max_relative = 1e-12);
    for t in (-85..=85).step_by(5) {
        for p in (-85..=85).step_by(5) {
            let m = plate_scattering_matrix(&e, &dir(0.0, 0.0), &dir(t as f64, p as f64), &lb).unwrap();
            assert!(m.norm() <= spec.norm() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn scattering_main_lobe_follows_specular_direction() {
    let lb = budget();
    let w = 8.0 * lb.wavelength();
    let e = RisElement::new(pose([0.0, 0.0, 0.0], 0.0), DpsModel::table_one(), w, w).unwrap();
    let inc = dir(10.0, 35.0);
    // Mirror image of the incidence direction in the plate normal x̂.
    let specular = dir(-10.0, -35.0);
    let at = |a: &AnglePair| plate_scattering_matrix(&e, &inc, a, &lb).unwrap().norm();
    let mut best = (0.0, 0.0, 0.0);
    for t in -200..=0 {
        for p in -450..=-250 {
            let a = dir(t as f64 * 0.1, p as f64 * 0.1);
            let v = at(&a);
            if v > best.0 {
                best = (v, a.theta, a.phi);
            }
        }
    }
    assert!((best.1 + 10.0).abs() <= 1.0 && (best.2 + 35.0).abs() <= 1.0, "{best:?}");
    assert!(at(&specular) >= 0.99 * best.0);
}

#[test]
fn scattering_vanishes_at_first_sinc_null() {
    let lb = budget();
    let w = 2.0 * lb.wavelength();
    let e = RisElement::new(pose([0.0, 0.0, 0.0], 0.0), DpsModel::table_one(), w, w).unwrap();
    let peak = plate_scattering_matrix(&e, &dir(0.0, 0.0), &dir(0.0, 0.0), &lb).unwrap();
    // q·â = sin 30° = λ/W puts the width argument at π.
    let m = plate_scattering_matrix(&e, &dir(0.0, 0.0), &dir(0.0, 30.0), &lb).unwrap();
    assert!(m[(0, 0)].norm() < 1e-9 * peak[(0, 0)].norm());
    assert!(m[(1, 1)].norm() < 1e-9 * peak[(1, 1)].norm());
}

#[test]
fn scattering_area_scaling_and_back_incidence() {
    let lb = budget();
    let half = lb.wavelength() / 2.0;
    let small = RisElement::new(pose([0.0, 0.0, 0.0], 0.0), DpsModel::table_one(), half, half).unwrap();
    let big = RisElement::new(pose([0.0, 0.0, 0.0], 0.0), DpsModel::table_one(), 2.0 * half, 2.0 * half).unwrap();
    let (inc, sca) = (dir(20.0, 30.0), dir(-20.0, -30.0));
    let a = plate_scattering_matrix(&small, &inc, &sca, &lb).unwrap();
    let b = plate_scattering_matrix(&big, &inc, &sca, &lb).unwrap();
    assert!((b - a * Complex64::new(4.0, 0.0)).norm() < 1e-12 * b.norm());
    assert!(matches!(
        plate_scattering_matrix(&small, &dir(0.0, 120.0), &sca, &lb),
        Err(Error::BackIncidence { .. })
    ));
    let shadow = plate_scattering_matrix(&small, &inc, &dir(0.0, 150.0), &lb).unwrap();
    assert_eq!(shadow, Matrix2::zeros());
}

#[test]
fn reflection_matrix_is_pec_limit() {
    let r = plate_reflection_matrix();
    assert_eq!(r[(0, 0)], Complex64::new(-1.0, 0.0));
    assert_eq!(r[(1, 1)], Complex64::new(1.0, 0.0));
    assert_eq!(r[(0, 1)], Complex64::new(0.0, 0.0));
    assert_eq!(r[(0, 0)].norm(), r[(1, 1)].norm());
}

#[test]
fn reflection_inverts_a_vertical_single_bounce() {
    let lb = budget();
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let m = reflection_polarization_matrix(&e, &dir(0.0, 0.0), &dir(0.0, 0.0));
    assert!((m[(0, 0)] + 1.0).norm() < 1e-15);

    let tx = pose([1.0, 0.0, 0.0], 180.0);
    let rx = pose([2.0, 0.0, 0.0], 180.0);
    let tuning = SmTuning::new(0.0, 1.0).unwrap();
    let sm = sm_coefficient(&tx, &rx, &e, &tuning, &lb).unwrap();
    let amp = (path_loss(1.0, &lb).unwrap() * path_loss(2.0, &lb).unwrap()).sqrt() * g() * g();
    let expected = -amp * Complex64::from_polar(1.0, -lb.wave_number() * 3.0);
    assert!((sm - expected).norm() < 1e-12 * amp);
}

#[test]
fn sm_off_and_state_independent() {
    let lb = budget();
    let tx = pose([0.8, 0.0, 0.0], 180.0);
    let rx = pose([0.8, 0.2, 0.0], 180.0);
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    assert_eq!(sm_coefficient(&tx, &rx, &e, &SmTuning::OFF, &lb).unwrap(), Complex64::new(0.0, 0.0));
    let first = element_terms(&tx, &rx, &e, code(0), &SmTuning::default(), &lb).unwrap();
    for c in StateCode::all(4) {
        let t = element_terms(&tx, &rx, &e, c, &SmTuning::default(), &lb).unwrap();
        assert_eq!(t.los.to_string(), first.los.to_string());
        assert_eq!(t.sm.to_string(), first.sm.to_string());
        assert_eq!(element_coefficient(&tx, &rx, &e, c, &SmTuning::default(), &lb).unwrap(), t.total());
    }
}

#[test]
fn element_without_am_or_sm_is_los() {
    let lb = budget();
    let rx = pose([0.8, 0.2, 0.0], 180.0);
    let tx = pose_with([0.8, 0.0, 0.0], Orientation::new(0.0, 0.0, 150.0).unwrap(), ideal());
    let mut e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let silent = RadiationPattern::from_fn(10.0, |_, _| (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
    e.pose.pattern = Arc::new(silent);
    let c = element_coefficient(&tx, &rx, &e, code(0), &SmTuning::OFF, &lb).unwrap();
    let los = los_coefficient(&tx, &rx, &lb).unwrap();
    assert!(los.norm() > 0.0);
    assert_eq!(c, los);
}

fn tabletop(element_orientation: Orientation) -> (Pose, Pose, RisElement) {
    let tx = pose([0.0, -0.1, 0.0], 0.0);
    let rx = pose([0.0, 0.1, 0.0], 0.0);
    let e = element_at([0.25, 0.0, 0.0], element_orientation);
    (tx, rx, e)
}

fn state_spread(tx: &Pose, rx: &Pose, e: &RisElement) -> f64 {
    let lb = budget();
    let q: Vec<f64> = StateCode::all(4)
        .into_iter()
        .map(|c| quality_db(element_coefficient(tx, rx, e, c, &SmTuning::default(), &lb).unwrap(), 1.0))
        .collect();
    q.iter().cloned().fold(f64::MIN, f64::max) - q.iter().cloned().fold(f64::MAX, f64::min)
}

#[test]
fn tabletop_interference_collapses_when_element_is_rotated() {
    let (tx, rx, e) = tabletop(Orientation::new(0.0, 0.0, 180.0).unwrap());
    let matched = state_spread(&tx, &rx, &e);
    assert!(matched > 3.0, "{matched}");
    let (tx, rx, e) = tabletop(Orientation::new(90.0, 0.0, 180.0).unwrap());
    let rotated = state_spread(&tx, &rx, &e);
    assert!(rotated < 0.5, "{rotated}");
    let (tx, rx, e) = tabletop(Orientation::new(0.0, 90.0, 180.0).unwrap());
    let tilted = state_spread(&tx, &rx, &e);
    assert!(tilted < 0.5, "{tilted}");
}

fn array_scene(n: usize) -> (Pose, Pose, Vec<RisElement>) {
    let lb = budget();
    let pitch = lb.wavelength() / 2.0;
    let tx = pose_with([0.8, 0.0, 0.0], Orientation::new(0.0, 0.0, 180.0).unwrap(), leaky());
    let rx = pose_with([0.8, 0.2, 0.05], Orientation::new(10.0, 0.0, 190.0).unwrap(), leaky());
    let elements = (0..n)
        .map(|i| {
            let (r, c) = ((i / 4) as f64, (i % 4) as f64);
            let mut e = element_at([0.0, (c - 1.5) * pitch, (1.5 - r) * pitch], Orientation::IDENTITY);
            e.pose = e.pose.clone().with_initial_phase(i as f64 * 17.0);
            e
        })
        .collect();
    (tx, rx, elements)
}

fn states_from(values: &[u32]) -> StateMatrix {
    StateMatrix::new(values.iter().map(|&v| code(v)).collect()).unwrap()
}

#[test]
fn array_without_elements_is_los() {
    let lb = budget();
    let (tx, rx, _) = array_scene(0);
    let c = array_coefficient(&tx, &rx, &[], &StateMatrix::zeros(0, 4), &SmTuning::default(), &lb).unwrap();
    assert_eq!(c, los_coefficient(&tx, &rx, &lb).unwrap());
}

#[test]
fn array_rejects_wrong_dimensions() {
    let lb = budget();
    let (tx, rx, el) = array_scene(4);
    assert!(matches!(
        array_coefficient(&tx, &rx, &el, &StateMatrix::zeros(3, 4), &SmTuning::default(), &lb),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(
        array_coefficient(&tx, &rx, &el, &StateMatrix::zeros(4, 3), &SmTuning::default(), &lb),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn half_wavelength_pair_cancels() {
    let lb = budget();
    let tx = pose([10.0, 0.0, 0.0], 180.0);
    let rx = pose([12.0, 0.0, 0.0], 180.0);
    let a = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let b = element_at([lb.wavelength() / 4.0, 0.0, 0.0], Orientation::IDENTITY);
    let single = am_coefficient(&tx, &rx, &a, code(5), &lb).unwrap();
    let pair = single + am_coefficient(&tx, &rx, &b, code(5), &lb).unwrap();
    assert!(pair.norm() < 0.01 * single.norm(), "{}", pair.norm() / single.norm());
}

#[test]
fn compiled_scene_matches_direct_evaluation() {
    let lb = budget();
    let (tx, rx, el) = array_scene(16);
    let scene = Scene::new(tx.clone(), rx.clone(), el.clone(), lb);
    let compiled = scene.compile().unwrap();
    let mut s = states_from(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 0]);
    let direct = array_coefficient(&tx, &rx, &el, &s, &SmTuning::default(), &lb).unwrap();
    let fast = compiled.coefficient(&s).unwrap();
    assert!((direct - fast).norm() < 1e-12 * direct.norm());
    s.set_variant(3, PolarizationVariant::Deg45);
    s.set_variant(9, PolarizationVariant::Deg90);
    let direct = array_coefficient(&tx, &rx, &el, &s, &SmTuning::default(), &lb).unwrap();
    assert!((direct - compiled.coefficient(&s).unwrap()).norm() < 1e-12 * direct.norm());
    assert!(compiled.coefficient(&StateMatrix::zeros(15, 4)).is_err());
}

#[test]
fn inverse_square_scaling() {
    let lb = budget();
    let (tx, rx, el) = array_scene(1);
    let scale = |p: &Pose| {
        let mut q = p.clone();
        q.position *= 3.0;
        q
    };
    let (tx2, rx2) = (scale(&tx), scale(&rx));
    let mut e2 = el[0].clone();
    e2.pose = scale(&e2.pose);
    let tuning = SmTuning::default();
    let los = |t: &Pose, r: &Pose| los_coefficient(t, r, &lb).unwrap().norm_sqr();
    assert_relative_eq!(los(&tx2, &rx2) / los(&tx, &rx), 1.0 / 9.0, max_relative = 1e-9);
    let am = am_coefficient(&tx2, &rx2, &e2, code(7), &lb).unwrap().norm_sqr()
        / am_coefficient(&tx, &rx, &el[0], code(7), &lb).unwrap().norm_sqr();
    assert_relative_eq!(am, 1.0 / 81.0, max_relative = 1e-9);
    let sm = sm_coefficient(&tx2, &rx2, &e2, &tuning, &lb).unwrap().norm_sqr()
        / sm_coefficient(&tx, &rx, &el[0], &tuning, &lb).unwrap().norm_sqr();
    assert_relative_eq!(sm, 1.0 / 81.0, max_relative = 1e-9);
}

#[test]
fn quarter_turn_in_the_chain_nulls_am() {
    let lb = budget();
    let tx = pose([0.8, 0.0, 0.0], 180.0);
    let rx = pose([0.8, 0.2, 0.0], 180.0);
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let matched = am_coefficient(&tx, &rx, &e, code(0), &lb).unwrap().norm();
    let turned = e.clone().with_variant(PolarizationVariant::Deg90);
    assert!(am_coefficient(&tx, &rx, &turned, code(0), &lb).unwrap().norm() < 1e-12 * matched);
    let tx_turned = pose_with([0.8, 0.0, 0.0], Orientation::new(90.0, 0.0, 180.0).unwrap(), ideal());
    assert!(am_coefficient(&tx_turned, &rx, &e, code(0), &lb).unwrap().norm() < 1e-12 * matched);
    let rx_turned = pose_with([0.8, 0.2, 0.0], Orientation::new(90.0, 0.0, 180.0).unwrap(), ideal());
    assert!(am_coefficient(&tx, &rx_turned, &e, code(0), &lb).unwrap().norm() < 1e-12 * matched);
}

#[test]
fn one_wavelength_along_the_ray_keeps_phase() {
    let lb = budget();
    let tx = pose([0.8, 0.0, 0.0], 180.0);
    let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
    let ray = Vector3::new(0.8, 0.2, 0.0).normalize();
    let rx_at = |s: f64| {
        let p = ray * s;
        pose([p.x, p.y, p.z], 194.0)
    };
    let a = am_coefficient(&tx, &rx_at(0.8), &e, code(9), &lb).unwrap();
    let b = am_coefficient(&tx, &rx_at(0.8 + lb.wavelength()), &e, code(9), &lb).unwrap();
    assert!((b / a).arg().abs() < 1e-6);
}

#[test]
fn fraunhofer_validator_flags_close_pairs() {
    let lb = budget();
    let (tx, rx, el) = array_scene(1);
    assert!(Scene::new(tx.clone(), rx.clone(), el.clone(), lb).fraunhofer_warnings().is_empty());
    let p = el[0].pose.position + Vector3::new(0.01, 0.0, 0.0);
    let near = pose([p.x, p.y, p.z], 180.0);
    let w = Scene::new(near, rx, el, lb).fraunhofer_warnings();
    assert!(w.iter().any(|m| m.contains("tx-element 0")), "{w:?}");
}

#[test]
fn variant_lookup() {
    assert_eq!(PolarizationVariant::from_degrees(45.0).unwrap(), PolarizationVariant::Deg45);
    assert!(PolarizationVariant::from_degrees(30.0).is_err());
    assert_eq!(PolarizationVariant::from_index(2), Some(PolarizationVariant::Deg90));
    assert!(RisElement::new(pose([0.0; 3], 0.0), DpsModel::table_one(), 0.0, 1.0).is_err());
}

fn orientation() -> impl Strategy<Value = Orientation> {
    (-180.0..180.0f64, -90.0..90.0f64, -180.0..180.0f64).prop_map(|(a, b, c)| Orientation::new(a, b, c).unwrap())
}

fn front_dir() -> impl Strategy<Value = AnglePair> {
    (-80.0..80.0f64, -80.0..80.0f64).prop_map(|(t, p)| AnglePair::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn los_is_reciprocal(o1 in orientation(), o2 in orientation(), p in -1.0..1.0f64, psi in -180.0..180.0f64) {
        let lb = budget();
        let a = pose_with([0.0, 0.0, 0.0], o1, leaky()).with_initial_phase(psi);
        let b = pose_with([1.0, p, 0.3], o2, leaky());
        let ab = los_coefficient(&a, &b, &lb).unwrap();
        let ba = los_coefficient(&b, &a, &lb).unwrap();
        prop_assert!((ab - ba).norm() <= 1e-12 * ab.norm().max(1e-300));
    }

    #[test]
    fn plate_scattering_is_reciprocal(o in orientation(), t in front_dir(), s in front_dir()) {
        let lb = budget();
        let e = element_at([0.0, 0.0, 0.0], Orientation::IDENTITY);
        let _ = o;
        let m = plate_scattering_matrix(&e, &t, &s, &lb).unwrap();
        let w = plate_scattering_matrix(&e, &s, &t, &lb).unwrap();
        prop_assert!((m - w.transpose()).norm() <= 1e-9 * m.norm().max(1e-12));
        let r = reflection_polarization_matrix(&e, &t, &s);
        let rw = reflection_polarization_matrix(&e, &s, &t);
        prop_assert!((r - rw.transpose()).norm() < 1e-9);
        prop_assert!(((r.adjoint() * r) - Matrix2::identity()).norm() < 1e-9);
    }

    #[test]
    fn array_is_additive_over_partitions(values in proptest::collection::vec(0u32..16, 8), split in 0usize..=8) {
        let lb = budget();
        let (tx, rx, el) = array_scene(8);
        let tuning = SmTuning::default();
        let s = states_from(&values);
        let whole = array_coefficient(&tx, &rx, &el, &s, &tuning, &lb).unwrap();
        let left = array_coefficient(&tx, &rx, &el[..split], &states_from(&values[..split]), &tuning, &lb).unwrap();
        let right = array_coefficient(&tx, &rx, &el[split..], &states_from(&values[split..]), &tuning, &lb).unwrap();
        let los = los_coefficient(&tx, &rx, &lb).unwrap();
        prop_assert!((left + right - los - whole).norm() <= 1e-12 * whole.norm());
    }
}
