use std::f64::consts::PI;

use npc_core::lattice::MotifShape;
use npc_core::phasematch::{
    emission_angle, external_angle, mismatch, pattern_scan, solve_periods, temperature_tuning_curve,
    threshold_temperature, EmissionRegime, PatternRequest, PhaseMatchProblem, Wavevectors,
};
use npc_core::{DispersionModel, Error, NpcLattice};
use proptest::prelude::*;

const PUMP: f64 = 0.404;
const SIGNAL: f64 = 0.808;
const DESIGN_T: f64 = 61.0;
const LENGTH_MM: f64 = 13.0;

fn design(orders: (i32, i32)) -> (DispersionModel, NpcLattice) {
    let d = DispersionModel::mgo_slt();
    let p = PhaseMatchProblem::new(PUMP, SIGNAL, None, 0.8f64.to_radians(), DESIGN_T, orders, LENGTH_MM).unwrap();
    let sol = solve_periods(&d, &p).unwrap();
    let lat = sol.lattice(MotifShape::Circle { radius: 0.5 }).unwrap();
    (d, lat)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solution_round_trips(pump in 0.36f64..0.6, ratio in 1.6f64..2.4, theta_deg in 0.2f64..3.0,
                            t in 20.0f64..150.0, m in 1i32..=3, n in prop::sample::select(vec![-3, -2, -1, 1, 2, 3])) {
        let signal = pump * ratio;
        let d = DispersionModel::mgo_slt();
        let idler = 1.0 / (1.0 / pump - 1.0 / signal);
        prop_assume!(idler < 4.0);
        let p = PhaseMatchProblem::new(pump, signal, None, theta_deg.to_radians(), t, (m, n), 10.0).unwrap();
        let sol = solve_periods(&d, &p).unwrap();
        prop_assert!(sol.residual.norm() < 1e-9);
        let lat = sol.lattice(MotifShape::Circle { radius: 0.1 }).unwrap();
        let signed = if n < 0 { -theta_deg.to_radians() } else { theta_deg.to_radians() };
        let dk = mismatch(&d, &lat, (m, n), pump, signal, signed, t).unwrap();
        prop_assert!(dk.norm() < 1e-9, "|dK| = {}", dk.norm());
    }

    #[test]
    fn order_linearity(theta_deg in 0.2f64..3.0, t in 20.0f64..150.0) {
        let d = DispersionModel::mgo_slt();
        let p1 = PhaseMatchProblem::new(PUMP, SIGNAL, None, theta_deg.to_radians(), t, (1, 1), 10.0).unwrap();
        let s1 = solve_periods(&d, &p1).unwrap();
        let s2 = solve_periods(&d, &p1.with_orders((2, 1))).unwrap();
        prop_assert_eq!(s2.period_x_um, 2.0 * s1.period_x_um);
        prop_assert_eq!(s2.period_y_um, s1.period_y_um);
    }
}

#[test]
fn mirror_orders_are_symmetric() {
    let (d, lat) = design((2, 1));
    for t in [55.0, 60.0, DESIGN_T, 61.2] {
        let up = emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, t, LENGTH_MM).unwrap();
        let down = emission_angle(&d, &lat, (2, -1), PUMP, SIGNAL, t, LENGTH_MM).unwrap();
        assert_eq!(up.axis_angle_rad, down.axis_angle_rad);
        assert_eq!(up.cone_half_angle_rad, down.cone_half_angle_rad);
        assert_eq!(up.min_mismatch, down.min_mismatch);
        assert_eq!(up.side, -down.side);
    }
}

#[test]
fn design_point_is_beamlike_at_design_angle() {
    let (d, lat) = design((2, 1));
    let e = emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, DESIGN_T, LENGTH_MM).unwrap();
    assert_eq!(e.regime, EmissionRegime::Beamlike);
    assert!((e.axis_angle_rad - 0.8f64.to_radians()).abs() < 1e-6);
}

#[test]
fn temperature_shift_sign_follows_index_difference() {
    let (d, lat) = design((2, 1));
    let theta = 0.8f64.to_radians();
    let at = |t| mismatch(&d, &lat, (2, 1), PUMP, SIGNAL, theta, t).unwrap();
    let index_gap = |t| d.refractive_index(PUMP, t).unwrap() - d.refractive_index(SIGNAL, t).unwrap();
    // A larger pump/pair index gap leaves surplus longitudinal momentum.
    assert!(index_gap(DESIGN_T + 5.0) > index_gap(DESIGN_T));
    assert!(at(DESIGN_T + 5.0).x > 0.0);
    assert!(at(DESIGN_T - 5.0).x < 0.0);

    // Oracle: first-order change from finite-differenced wavevectors.
    let k0 = Wavevectors::compute(&d, PUMP, SIGNAL, DESIGN_T).unwrap();
    let k1 = Wavevectors::compute(&d, PUMP, SIGNAL, DESIGN_T + 5.0).unwrap();
    let predicted = (k1.pump - k0.pump) - (k1.pair_sum() - k0.pair_sum()) * theta.cos();
    assert!((at(DESIGN_T + 5.0).x - predicted).abs() < 1e-12);
}

#[test]
fn transverse_mismatch_changes_sign_across_design_angle() {
    let (d, lat) = design((2, 1));
    let theta = 0.8f64.to_radians();
    let below = mismatch(&d, &lat, (2, 1), PUMP, SIGNAL, theta * 0.99, DESIGN_T).unwrap();
    let above = mismatch(&d, &lat, (2, 1), PUMP, SIGNAL, theta * 1.01, DESIGN_T).unwrap();
    assert!(below.y < 0.0 && above.y > 0.0);
}

#[test]
fn collinear_limit() {
    let d = DispersionModel::mgo_slt();
    let p = PhaseMatchProblem::new(PUMP, SIGNAL, None, 0.0, 40.0, (1, 0), 10.0).unwrap();
    let sol = solve_periods(&d, &p).unwrap();
    assert!(sol.period_y_um.is_none());
    let k = Wavevectors::compute(&d, PUMP, SIGNAL, 40.0).unwrap();
    let expected = 2.0 * PI / (k.pump - k.signal - k.idler);
    assert!((sol.period_x_um - expected).abs() < 1e-12 * expected);
}

#[test]
fn energy_conservation_is_enforced() {
    let bad = PhaseMatchProblem::new(PUMP, SIGNAL, Some(0.9), 0.01, 40.0, (1, 1), 10.0);
    assert!(matches!(bad, Err(Error::EnergyConservation { .. })));
    assert!(PhaseMatchProblem::new(PUMP, SIGNAL, Some(SIGNAL), 0.01, 40.0, (1, 1), 10.0).is_ok());
    assert!(PhaseMatchProblem::new(PUMP, SIGNAL, None, -0.01, 40.0, (1, 1), 10.0).is_err());
}

#[test]
fn cones_open_where_the_index_gap_is_smaller() {
    let (d, lat) = design((2, 1));
    let th = threshold_temperature(&d, &lat, (2, 1), PUMP, SIGNAL, (20.0, 150.0)).unwrap();
    assert!((th - DESIGN_T).abs() < 1e-6);

    let gap = |t| d.refractive_index(PUMP, t).unwrap() - d.refractive_index(SIGNAL, t).unwrap();
    // Cone side: smaller gap, so the lattice over-compensates the pump momentum.
    let cone_side = if gap(th - 1.0) < gap(th + 1.0) { -1.0 } else { 1.0 };

    let mut last = 0.0;
    for k in 1..=10 {
        let t = th + cone_side * 0.5 * k as f64;
        let e = emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, t, LENGTH_MM).unwrap();
        assert_eq!(e.regime, EmissionRegime::Cone, "T = {t}");
        assert!(e.cone_half_angle_rad > last, "T = {t}");
        last = e.cone_half_angle_rad;
    }
    for dt in [2.0, 5.0, 10.0] {
        let t = th - cone_side * dt;
        assert!(matches!(
            emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, t, LENGTH_MM),
            Err(Error::NoSolution(_))
        ));
    }
}

#[test]
fn tuning_curve_is_deterministic() {
    let (d, lat) = design((2, 1));
    let a = temperature_tuning_curve(&d, &lat, (2, 1), PUMP, SIGNAL, LENGTH_MM, (40.0, 80.0), 41).unwrap();
    let b = temperature_tuning_curve(&d, &lat, (2, 1), PUMP, SIGNAL, LENGTH_MM, (40.0, 80.0), 41).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 41);
    assert!(a.iter().any(|r| r.emission.is_none()));
    assert!(a.iter().any(|r| r.emission.is_some()));

    let one = temperature_tuning_curve(&d, &lat, (2, 1), PUMP, SIGNAL, LENGTH_MM, (50.0, 70.0), 1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].temperature_c, 50.0);
    assert!(temperature_tuning_curve(&d, &lat, (2, 1), PUMP, SIGNAL, LENGTH_MM, (0.0, 70.0), 5).is_err());
}

fn request(orders: Vec<(i32, i32)>, length_mm: f64) -> PatternRequest {
    PatternRequest {
        orders,
        pump_um: PUMP,
        signal_um: SIGNAL,
        temperature_c: DESIGN_T,
        crystal_length_mm: length_mm,
        half_window_deg: 3.0,
        grid: 121,
    }
}

fn nearest(map: &npc_core::phasematch::PatternMap, angle_deg: f64) -> usize {
    (0..map.grid)
        .min_by(|&a, &b| (map.angle_deg(a) - angle_deg).abs().total_cmp(&(map.angle_deg(b) - angle_deg).abs()))
        .unwrap()
}

#[test]
fn beamlike_pattern_has_two_mirror_spots() {
    let (d, lat) = design((2, 1));
    let map = pattern_scan(&d, &lat, &request(vec![(2, 1), (2, -1)], LENGTH_MM)).unwrap();
    let n = d.refractive_index(SIGNAL, DESIGN_T).unwrap();
    let ext = external_angle(0.8f64.to_radians(), n).to_degrees();
    let centre = nearest(&map, 0.0);
    let (left, right) = (nearest(&map, -ext), nearest(&map, ext));
    assert!(map.get(left, centre) > 0.9 && map.get(right, centre) > 0.9);
    assert!(map.get(centre, centre) < 0.05);
    assert!(map.get(centre, right) < 0.05);
    // Mirror symmetry about the pump axis.
    for row in 0..map.grid {
        for col in 0..map.grid {
            let mirrored = map.get(map.grid - 1 - col, row);
            assert!((map.get(col, row) - mirrored).abs() < 1e-9);
        }
    }
}

#[test]
fn order_twenty_adds_a_ring_through_the_spots() {
    let (d, lat) = design((2, 1));
    let without = pattern_scan(&d, &lat, &request(vec![(2, 1), (2, -1)], LENGTH_MM)).unwrap();
    let with = pattern_scan(&d, &lat, &request(vec![(2, 1), (2, -1), (2, 0)], LENGTH_MM)).unwrap();
    let n = d.refractive_index(SIGNAL, DESIGN_T).unwrap();
    let ext = external_angle(0.8f64.to_radians(), n).to_degrees();
    let centre = nearest(&with, 0.0);
    let top = nearest(&with, ext);
    assert!(with.get(centre, top) > 0.5);
    assert!(without.get(centre, top) < 0.05);
    assert!(with.get(centre, centre) < 0.05);
}

#[test]
fn zero_length_crystal_gives_flat_map() {
    let (d, lat) = design((2, 1));
    let map = pattern_scan(&d, &lat, &request(vec![(2, 1), (2, -1)], 0.0)).unwrap();
    assert!(map.intensity.iter().all(|&v| v == 2.0));
    let mut small = request(vec![(2, 1)], LENGTH_MM);
    small.grid = 1;
    assert!(pattern_scan(&d, &lat, &small).is_err());
}
