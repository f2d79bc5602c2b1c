//! Acceptance suite. Run with `cargo test -p npc-core --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use npc_core::lattice::{MotifShape, NpcLattice};
use npc_core::phasematch::{emission_angle, solve_periods, threshold_temperature, EmissionRegime, PhaseMatchProblem};
use npc_core::quantum::{
    beamsplitter, coincidence_probability, fringe_scan, make_path_entangled_state, model_visibility,
    visibility_budget, ImperfectionModel, TwoModeState,
};
use npc_core::{DispersionModel, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PUMP: f64 = 0.404;
const SIGNAL: f64 = 0.808;
const THETA_DEG: f64 = 0.8;

fn report(id: u32, pass: bool, detail: String) {
    println!("criterion {id:>2}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn problem(orders: (i32, i32), t: f64) -> PhaseMatchProblem {
    PhaseMatchProblem::new(PUMP, SIGNAL, None, THETA_DEG.to_radians(), t, orders, 13.0).unwrap()
}

fn circle(radius: f64) -> MotifShape {
    MotifShape::Circle { radius }
}

#[test]
fn criterion_01_period_reproduction() {
    let start = Instant::now();
    let d = DispersionModel::mgo_slt();
    let sol = solve_periods(&d, &problem((1, 1), 61.0)).unwrap();
    let elapsed = start.elapsed();
    let lx = sol.period_x_um;
    let ly = sol.period_y_um.unwrap();
    let ex = (lx / 3.2 - 1.0).abs();
    let ey = (ly / 13.46 - 1.0).abs();
    let pass = ex <= 0.03 && ey <= 0.03 && elapsed < Duration::from_secs(1);
    report(
        1,
        pass,
        format!(
            "{}: Lx = {lx:.4} um ({:+.2}% vs 3.2), Ly = {ly:.4} um ({:+.2}% vs 13.46), {:?}",
            d.name,
            100.0 * (lx / 3.2 - 1.0),
            100.0 * (ly / 13.46 - 1.0),
            elapsed
        ),
    );
}

#[test]
fn criterion_02_order_two_linearity() {
    let d = DispersionModel::mgo_slt();
    let one = solve_periods(&d, &problem((1, 1), 61.0)).unwrap();
    let two = solve_periods(&d, &problem((2, 1), 61.0)).unwrap();
    let pass = two.period_x_um == 2.0 * one.period_x_um && two.period_y_um == one.period_y_um;
    report(
        2,
        pass,
        format!("Lx(2,1) = {} um, 2 Lx(1,1) = {} um", two.period_x_um, 2.0 * one.period_x_um),
    );
}

#[test]
fn criterion_03_fourier_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let lx: f64 = rng.gen_range(2.0..15.0);
        let ly: f64 = rng.gen_range(2.0..15.0);
        let r = rng.gen_range(0.05..0.49) * lx.min(ly);
        let (m, n) = loop {
            let p = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            if p != (0, 0) {
                break p;
            }
        };
        let lat = NpcLattice::rectangular(lx, ly, circle(r)).unwrap();
        let a = lat.fourier_coefficient_analytic(m, n).unwrap().abs();
        let b = lat.fourier_coefficient_numeric(m, n, 2048).unwrap();
        worst = worst.max((a - b).abs());
    }
    let lat = NpcLattice::rectangular(6.4, 13.46, circle(2.7)).unwrap();
    let analytic = lat.fourier_coefficient_analytic(2, 1).unwrap();
    let numeric = lat.fourier_coefficient_numeric(2, 1, 2048).unwrap();
    let transposed = lat.fourier_coefficient_transposed(2, 1).unwrap();
    let paper_err = (analytic.abs() - numeric).abs();
    let elapsed = start.elapsed();
    let pass = worst < 1e-3 && paper_err < 1e-3 && elapsed < Duration::from_secs(60);
    report(
        3,
        pass,
        format!(
            "50 random cases max |diff| = {worst:.2e}; (6.4, 13.46, R 2.7, (2,1)): analytic {analytic:.6}, \
             numeric {numeric:.6}, transposed prefactor {transposed:.6}, stated 0.087 (not reproduced); {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_04_motif_optimum() {
    let lat = NpcLattice::rectangular(6.4, 13.46, circle(1.0)).unwrap();
    let opt = lat.optimize_motif_radius(2, 1).unwrap();
    let f = |r: f64| lat.with_motif(circle(r)).unwrap().fourier_coefficient_analytic(2, 1).unwrap();
    let h = 1e-6;
    let gradient = (f(opt.radius + h) - f(opt.radius - h)) / (2.0 * h);
    let feasible = opt.radius > 0.0 && 2.0 * opt.radius < 6.4;
    let pass = gradient.abs() < 1e-8 && feasible && !opt.at_boundary;
    report(
        4,
        pass,
        format!(
            "R* = {:.4} um (stated 2.7 um), coefficient {:.6}, dC/dR = {gradient:.2e}",
            opt.radius, opt.coefficient
        ),
    );
}

#[test]
fn criterion_05_ideal_fringe() {
    let scan = fringe_scan(SIGNAL, (0.0, 2.0 * SIGNAL), 129, &ImperfectionModel::ideal()).unwrap();
    let variance = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64
    };
    let period = scan.period_um.unwrap_or(f64::NAN);
    let var = variance(&scan.singles1).max(variance(&scan.singles2));
    let pass = (scan.visibility - 1.0).abs() <= 1e-9 && (period / 0.404 - 1.0).abs() <= 1e-3 && var < 1e-12;
    report(
        5,
        pass,
        format!("V = {}, period = {period} um, singles variance = {var:.1e}", scan.visibility),
    );
}

#[test]
fn criterion_06_balanced_splitter_coefficients() {
    let mut worst: f64 = 0.0;
    for phi in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2, PI] {
        let out = beamsplitter(&make_path_entangled_state(phi), 0.5).unwrap();
        let p11 = out.amplitude(1, 1).unwrap().norm_sqr();
        let expected = ((Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * phi)) * 0.5).norm_sqr();
        worst = worst.max((p11 - expected).abs());
    }
    let c0 = coincidence_probability(&beamsplitter(&make_path_entangled_state(0.0), 0.5).unwrap());
    let c90 = coincidence_probability(&beamsplitter(&make_path_entangled_state(FRAC_PI_2), 0.5).unwrap());
    let pass = worst <= 1e-12 && (c0 - 1.0).abs() <= 1e-12 && c90.abs() <= 1e-12;
    report(6, pass, format!("max |P11 - |(1+e^2iphi)/2|^2| = {worst:.1e}; C(0) = {c0}, C(pi/2) = {c90:.1e}"));
}

#[test]
fn criterion_07_visibility_budget() {
    let model = ImperfectionModel {
        transmittance: 0.55,
        polarization_rotation_rad: 0.0,
        ellipticity: 0.05,
        multipair_fraction: 0.10,
        background_ratio: 0.15,
    };
    let rows = visibility_budget(&model).unwrap();
    let get = |c: &str| rows.iter().find(|r| r.cause == c).map(|r| r.visibility_alone);
    let causes = ["coupler_imbalance", "polarization_mismatch", "multi_pair", "g20_background"];
    let all_listed = causes.iter().all(|c| get(c).is_some());
    let composite = get("composite").unwrap_or(f64::NAN);
    let pass = all_listed && (0.65..=0.80).contains(&composite);
    let items: Vec<String> = rows.iter().map(|r| format!("{} {:.4}", r.cause, r.visibility_alone)).collect();
    report(
        7,
        pass,
        format!(
            "{}; measured 0.72, stated background-only 0.95, multi-pair-only ~0.93",
            items.join(", ")
        ),
    );
}

#[test]
fn criterion_08_temperature_behavior() {
    let d = DispersionModel::mgo_slt();
    let design = solve_periods(&d, &problem((2, 1), 61.0)).unwrap();
    let lat = design.lattice(circle(2.7)).unwrap();
    let th = threshold_temperature(&d, &lat, (2, 1), PUMP, SIGNAL, (20.0, 150.0)).unwrap();
    let classify = |t: f64| match emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, t, 13.0) {
        Ok(e) => format!("{:?} {:.3} deg", e.regime, e.cone_half_angle_rad.to_degrees()),
        Err(Error::NoSolution(_)) => "none".to_string(),
        Err(e) => format!("error {e}"),
    };

    let below_none = (1..=10).all(|k| {
        matches!(
            emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, th - 0.5 * k as f64, 13.0),
            Err(Error::NoSolution(_))
        )
    });
    let mut last = 0.0;
    let mut above_growing = true;
    for k in 1..=10 {
        match emission_angle(&d, &lat, (2, 1), PUMP, SIGNAL, th + 0.5 * k as f64, 13.0) {
            Ok(e) if e.regime == EmissionRegime::Cone && e.cone_half_angle_rad > last => {
                last = e.cone_half_angle_rad;
            }
            _ => above_growing = false,
        }
    }
    report(
        8,
        below_none && above_growing,
        format!(
            "threshold {th:.4} C; T-5: {}, T-1: {}, T+1: {}, T+5: {}; cones open on the low-temperature \
             side, where the pump/pair index gap is smaller",
            classify(th - 5.0),
            classify(th - 1.0),
            classify(th + 1.0),
            classify(th + 5.0)
        ),
    );
}

#[test]
fn criterion_09_g20_elimination() {
    let rect = NpcLattice::rectangular(6.4, 13.46, circle(2.7)).unwrap();
    let g21 = rect.reciprocal_vector(2, 1).as_vec();
    let g2m1 = rect.reciprocal_vector(2, -1).as_vec();
    let mid = (g21 + g2m1).scale(0.5);
    let oblique = NpcLattice::from_reciprocal(g21, g2m1, circle(1.0)).unwrap();
    let on_rect = rect.has_lattice_point_at(mid, 1e-3).unwrap();
    let on_oblique = oblique.has_lattice_point_at(mid, 1e-3).unwrap();
    let keeps_pair = oblique.has_lattice_point_at(g21, 1e-3).unwrap() && oblique.has_lattice_point_at(g2m1, 1e-3).unwrap();
    report(
        9,
        on_rect && !on_oblique && keeps_pair,
        format!(
            "midpoint ({:.4}, {:.4}) rad/um: rectangular {on_rect}, oblique {on_oblique}; oblique keeps G(2,+-1): {keeps_pair}",
            mid.x, mid.y
        ),
    );
}

fn random_state(rng: &mut ChaCha8Rng, n_max: usize) -> TwoModeState {
    let mut comps = Vec::new();
    for total in 0..=n_max {
        for b in 0..=total {
            comps.push(((total - b, b), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    TwoModeState::normalized(n_max, &comps).unwrap()
}

#[test]
fn criterion_10_quantum_core_properties() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0010);
    let mut worst_norm: f64 = 0.0;
    let mut worst_inner: f64 = 0.0;
    let mut worst_number: f64 = 0.0;
    for _ in 0..1000 {
        let n_max = rng.gen_range(1..=4);
        let psi = random_state(&mut rng, n_max);
        let chi = random_state(&mut rng, n_max);
        let t = rng.gen_range(0.0..=1.0);
        let a = beamsplitter(&psi, t).unwrap();
        let b = beamsplitter(&chi, t).unwrap();
        worst_norm = worst_norm.max((psi.norm_sqr() - 1.0).abs()).max((a.norm_sqr() - 1.0).abs());
        worst_inner = worst_inner.max((a.inner(&b) - psi.inner(&chi)).norm());
        worst_number = worst_number.max((a.photon_number_expectation() - psi.photon_number_expectation()).abs());
    }
    let mut worst_noon: f64 = 0.0;
    for i in 0..=20 {
        let t = 0.4 + 0.01 * i as f64;
        let model = ImperfectionModel { transmittance: t, ..ImperfectionModel::ideal() };
        worst_noon = worst_noon.max((model_visibility(&model).unwrap() - 1.0).abs());
    }
    for t in [0.4, 0.5, 0.6] {
        let model = ImperfectionModel { transmittance: t, ..ImperfectionModel::ideal() };
        let scan = fringe_scan(SIGNAL, (0.0, 2.0 * SIGNAL), 65, &model).unwrap();
        worst_noon = worst_noon.max((scan.visibility - 1.0).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_norm <= 1e-12
        && worst_inner <= 1e-12
        && worst_number <= 1e-12
        && worst_noon <= 1e-9
        && elapsed < Duration::from_secs(10);
    report(
        10,
        pass,
        format!(
            "1000 states: norm {worst_norm:.1e}, inner product {worst_inner:.1e}, photon number {worst_number:.1e}; \
             V(T in [0.4, 0.6]) deviation {worst_noon:.1e}; {elapsed:?}"
        ),
    );
}
