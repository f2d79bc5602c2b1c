//! Quasi-phase-matching geometry for beamlike down-conversion in a 2D lattice.
//!
//! Both down-converted photons of one process travel along the same internal
//! direction at angle θ from the pump (x axis). The two-component mismatch is
//!
//! ```text
//! ΔKx = k_p − (k_s + k_i)·cos θ − Gx
//! ΔKy = (k_s + k_i)·sin θ − Gy
//! ```
//!
//! so θ > 0 balances a positive `Gy`; the photons physically leave on the
//! side opposite to the lattice vector's transverse component. All angles
//! here are internal unless a name says `external`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::bisect;
use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::lattice::{MotifShape, NpcLattice, Vec2};

/// Energy-conservation tolerance on `1/λp − 1/λs − 1/λi`, in µm⁻¹.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// |ΔK| below which a solution counts as exactly phase matched, rad/µm.
pub const EXACT_TOLERANCE: f64 = 1e-9;

/// Largest axis or cone angle the emission search accepts.
pub const MAX_EMISSION_ANGLE_DEG: f64 = 5.0;

/// Inputs of a period-design problem. Construction enforces energy conservation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMatchProblem {
    pump_um: f64,
    signal_um: f64,
    idler_um: f64,
    internal_angle_rad: f64,
    temperature_c: f64,
    orders: (i32, i32),
    crystal_length_mm: f64,
}

impl PhaseMatchProblem {
    /// `idler_um = None` derives the idler from energy conservation.
    pub fn new(
        pump_um: f64,
        signal_um: f64,
        idler_um: Option<f64>,
        internal_angle_rad: f64,
        temperature_c: f64,
        orders: (i32, i32),
        crystal_length_mm: f64,
    ) -> Result<Self> {
        if !(pump_um > 0.0 && signal_um > pump_um) {
            return Err(Error::InvalidParameter {
                name: "signal_um",
                reason: format!("need 0 < pump < signal, got pump {pump_um} um, signal {signal_um} um"),
            });
        }
        let derived = idler_wavelength(pump_um, signal_um);
        let idler_um = match idler_um {
            None => derived,
            Some(idler) => {
                let residual = 1.0 / pump_um - 1.0 / signal_um - 1.0 / idler;
                if !(residual.abs() <= ENERGY_TOLERANCE) {
                    return Err(Error::EnergyConservation { residual });
                }
                idler
            }
        };
        if !(internal_angle_rad >= 0.0 && internal_angle_rad < PI / 2.0) {
            return Err(Error::InvalidParameter {
                name: "internal_angle",
                reason: format!("must lie in [0, pi/2), got {internal_angle_rad} rad"),
            });
        }
        if !(crystal_length_mm >= 0.0 && crystal_length_mm.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "crystal_length_mm",
                reason: format!("must be >= 0, got {crystal_length_mm}"),
            });
        }
        if !temperature_c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "temperature_c",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            pump_um,
            signal_um,
            idler_um,
            internal_angle_rad,
            temperature_c,
            orders,
            crystal_length_mm,
        })
    }

    pub fn pump_um(&self) -> f64 {
        self.pump_um
    }
    pub fn signal_um(&self) -> f64 {
        self.signal_um
    }
    pub fn idler_um(&self) -> f64 {
        self.idler_um
    }
    pub fn internal_angle_rad(&self) -> f64 {
        self.internal_angle_rad
    }
    pub fn temperature_c(&self) -> f64 {
        self.temperature_c
    }
    pub fn orders(&self) -> (i32, i32) {
        self.orders
    }
    pub fn crystal_length_mm(&self) -> f64 {
        self.crystal_length_mm
    }

    pub fn with_orders(&self, orders: (i32, i32)) -> Self {
        Self { orders, ..self.clone() }
    }

    pub fn with_temperature(&self, temperature_c: f64) -> Self {
        Self { temperature_c, ..self.clone() }
    }
}

pub fn idler_wavelength(pump_um: f64, signal_um: f64) -> f64 {
    1.0 / (1.0 / pump_um - 1.0 / signal_um)
}

/// The three wavevector magnitudes at one temperature, rad/µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wavevectors {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

impl Wavevectors {
    pub fn compute(dispersion: &DispersionModel, pump_um: f64, signal_um: f64, temperature_c: f64) -> Result<Self> {
        let idler_um = idler_wavelength(pump_um, signal_um);
        Ok(Self {
            pump: dispersion.wavevector_magnitude(pump_um, temperature_c)?,
            signal: dispersion.wavevector_magnitude(signal_um, temperature_c)?,
            idler: dispersion.wavevector_magnitude(idler_um, temperature_c)?,
        })
    }

    pub fn pair_sum(&self) -> f64 {
        self.signal + self.idler
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMatchSolution {
    pub problem: PhaseMatchProblem,
    pub period_x_um: f64,
    /// `None` for the collinear one-dimensional case (θ = 0, n = 0).
    pub period_y_um: Option<f64>,
    pub residual: Vec2,
    pub wavevectors: Wavevectors,
}

impl PhaseMatchSolution {
    /// The rectangular lattice realising this solution.
    pub fn lattice(&self, motif: MotifShape) -> Result<NpcLattice> {
        let period_y = self.period_y_um.ok_or_else(|| {
            Error::InvalidParameter {
                name: "period_y",
                reason: "collinear solution has no transverse period".into(),
            }
        })?;
        NpcLattice::rectangular(self.period_x_um, period_y, motif)
    }
}

/// Lattice periods that phase match `problem` exactly.
///
/// `Λx = 2πm / (k_p − (k_s + k_i)cos θ)` and `Λy = 2π|n| / ((k_s + k_i) sin θ)`.
pub fn solve_periods(dispersion: &DispersionModel, problem: &PhaseMatchProblem) -> Result<PhaseMatchSolution> {
    let (m, n) = problem.orders;
    let theta = problem.internal_angle_rad;
    let k = Wavevectors::compute(dispersion, problem.pump_um, problem.signal_um, problem.temperature_c)?;
    let pair = k.pair_sum();

    let longitudinal = k.pump - pair * theta.cos();
    if m <= 0 || !(longitudinal > 0.0) {
        return Err(Error::NoSolution(format!(
            "longitudinal mismatch k_p - (k_s + k_i)cos(theta) = {longitudinal:.6} rad/um cannot be \
             compensated by a forward order m = {m}"
        )));
    }
    let period_x = 2.0 * PI * m as f64 / longitudinal;

    let transverse = pair * theta.sin();
    let period_y = match (n, theta > 0.0) {
        (0, false) => None,
        (0, true) => {
            return Err(Error::NoSolution(format!(
                "transverse momentum {transverse:.6} rad/um needs a non-zero order n"
            )))
        }
        (_, false) => {
            return Err(Error::NoSolution(format!(
                "order n = {n} needs a non-zero emission angle"
            )))
        }
        (_, true) => Some(2.0 * PI * n.unsigned_abs() as f64 / transverse),
    };

    let gy = period_y.map_or(0.0, |p| 2.0 * PI * n as f64 / p);
    let signed_theta = if n < 0 { -theta } else { theta };
    let residual = Vec2::new(
        k.pump - pair * signed_theta.cos() - period_x.recip() * 2.0 * PI * m as f64,
        pair * signed_theta.sin() - gy,
    );

    Ok(PhaseMatchSolution {
        problem: problem.clone(),
        period_x_um: period_x,
        period_y_um: period_y,
        residual,
        wavevectors: k,
    })
}

/// Two-component mismatch (ΔKx, ΔKy) in rad/µm for photons at signed angle `theta_rad`.
pub fn mismatch(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    theta_rad: f64,
    temperature_c: f64,
) -> Result<Vec2> {
    let k = Wavevectors::compute(dispersion, pump_um, signal_um, temperature_c)?;
    let g = lattice.reciprocal_vector(orders.0, orders.1);
    let pair = k.pair_sum();
    Ok(Vec2::new(
        k.pump - pair * theta_rad.cos() - g.gx,
        pair * theta_rad.sin() - g.gy,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionRegime {
    /// Both photons exactly along one direction.
    Beamlike,
    /// Photons on a cone around the pair-momentum axis.
    Cone,
    /// No exact solution, but the residual lies within the sinc² bandwidth.
    Detuned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Emission {
    /// Internal angle between the pump and the pair-momentum axis, >= 0.
    pub axis_angle_rad: f64,
    /// +1 when the photons balance a positive `Gy`, −1 otherwise, 0 on axis.
    pub side: f64,
    /// Internal half-angle of the signal cone about the axis; 0 when beamlike.
    pub cone_half_angle_rad: f64,
    /// Smallest |ΔK| over emission directions, rad/µm.
    pub min_mismatch: f64,
    pub regime: EmissionRegime,
}

/// Pair momentum `k_p x̂ − G` and wavevectors at `temperature_c`.
fn pair_momentum(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    temperature_c: f64,
) -> Result<(Vec2, Wavevectors)> {
    let k = Wavevectors::compute(dispersion, pump_um, signal_um, temperature_c)?;
    let g = lattice.reciprocal_vector(orders.0, orders.1);
    Ok((Vec2::new(k.pump - g.gx, -g.gy), k))
}

/// Signed threshold function `|k_p x̂ − G| − (k_s + k_i)`.
///
/// Negative values allow a cone of non-parallel pairs, zero is the beamlike
/// point, positive values have no exact solution.
pub fn beamlike_detuning(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    temperature_c: f64,
) -> Result<f64> {
    let (p, k) = pair_momentum(dispersion, lattice, orders, pump_um, signal_um, temperature_c)?;
    Ok(p.norm() - k.pair_sum())
}

/// Emission direction for a fixed lattice.
///
/// The signal and idler momenta must add up to `P = k_p x̂ − G`. With
/// `|P| = k_s + k_i` they are parallel to `P` (beamlike); with `|P|` shorter
/// they form a cone around `P` whose signal half-angle follows from the
/// momentum triangle; with `|P|` longer nothing is exactly matched and the
/// residual `|P| − (k_s + k_i)` is compared with the sinc² half-width 2π/L.
pub fn emission_angle(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    temperature_c: f64,
    crystal_length_mm: f64,
) -> Result<Emission> {
    let (p, k) = pair_momentum(dispersion, lattice, orders, pump_um, signal_um, temperature_c)?;
    let p_len = p.norm();
    let detuning = p_len - k.pair_sum();
    let axis = (-p.y).abs().atan2(p.x);
    let side = if p.y == 0.0 { 0.0 } else { -p.y.signum() };
    let max_angle = MAX_EMISSION_ANGLE_DEG.to_radians();
    if axis > max_angle {
        return Err(Error::NoSolution(format!(
            "pair momentum points {:.4} deg from the pump, outside the {MAX_EMISSION_ANGLE_DEG} deg window",
            axis.to_degrees()
        )));
    }

    let (regime, cone, min_mismatch) = if detuning.abs() < EXACT_TOLERANCE {
        (EmissionRegime::Beamlike, 0.0, detuning.abs())
    } else if detuning < 0.0 {
        let cos_cone = (k.signal * k.signal + p_len * p_len - k.idler * k.idler) / (2.0 * k.signal * p_len);
        (EmissionRegime::Cone, cos_cone.clamp(-1.0, 1.0).acos(), 0.0)
    } else {
        let bandwidth = if crystal_length_mm > 0.0 {
            2.0 * PI / (crystal_length_mm * 1e3)
        } else {
            f64::INFINITY
        };
        if detuning >= bandwidth {
            return Err(Error::NoSolution(format!(
                "residual mismatch {detuning:.3e} rad/um exceeds the sinc^2 half-width {bandwidth:.3e} rad/um"
            )));
        }
        (EmissionRegime::Detuned, 0.0, detuning)
    };
    if cone > max_angle {
        return Err(Error::NoSolution(format!(
            "cone half-angle {:.4} deg exceeds the {MAX_EMISSION_ANGLE_DEG} deg window",
            cone.to_degrees()
        )));
    }
    Ok(Emission {
        axis_angle_rad: axis,
        side,
        cone_half_angle_rad: cone,
        min_mismatch,
        regime,
    })
}

/// Temperature where [`beamlike_detuning`] crosses zero inside `range_c`.
///
/// The range is scanned in 64 steps and the first sign change is refined by
/// bisection to 1e-12 relative.
pub fn threshold_temperature(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    range_c: (f64, f64),
) -> Result<f64> {
    let f = |t: f64| beamlike_detuning(dispersion, lattice, orders, pump_um, signal_um, t);
    let (lo, hi) = range_c;
    let steps = 64;
    let mut t_prev = lo;
    let mut f_prev = f(lo)?;
    for i in 1..=steps {
        let t = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(t)?;
        if f_prev == 0.0 {
            return Ok(t_prev);
        }
        if v.signum() != f_prev.signum() {
            let root = bisect(
                |x| f(x).unwrap_or(f64::NAN),
                t_prev,
                t,
                1e-12,
            );
            return Ok(root);
        }
        t_prev = t;
        f_prev = v;
    }
    Err(Error::NoSolution(format!(
        "beamlike condition is not crossed between {lo} C and {hi} C"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuningRow {
    pub temperature_c: f64,
    pub emission: Option<Emission>,
    /// `max(0, |P| − (k_s + k_i))`, rad/µm.
    pub min_mismatch: f64,
}

/// [`emission_angle`] over `steps` evenly spaced temperatures (inclusive ends).
#[allow(clippy::too_many_arguments)]
pub fn temperature_tuning_curve(
    dispersion: &DispersionModel,
    lattice: &NpcLattice,
    orders: (i32, i32),
    pump_um: f64,
    signal_um: f64,
    crystal_length_mm: f64,
    range_c: (f64, f64),
    steps: usize,
) -> Result<Vec<TuningRow>> {
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: "at least one temperature is required".into(),
        });
    }
    let [t_lo, t_hi] = dispersion.validity.temperature_c;
    for t in [range_c.0, range_c.1] {
        if t < t_lo || t > t_hi {
            return Err(Error::OutOfRange {
                quantity: "temperature_c",
                value: t,
                bound: format!("dispersion validity [{t_lo}, {t_hi}] C"),
            });
        }
    }
    let temps: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                range_c.0
            } else {
                range_c.0 + (range_c.1 - range_c.0) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    temps
        .par_iter()
        .map(|&t| {
            let detuning = beamlike_detuning(dispersion, lattice, orders, pump_um, signal_um, t)?;
            let emission = match emission_angle(dispersion, lattice, orders, pump_um, signal_um, t, crystal_length_mm) {
                Ok(e) => Some(e),
                Err(Error::NoSolution(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(TuningRow {
                temperature_c: t,
                emission,
                min_mismatch: detuning.max(0.0),
            })
        })
        .collect()
}

/// Relative emission intensity over external angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternMap {
    /// Samples per axis.
    pub grid: usize,
    /// External half-window, degrees.
    pub half_window_deg: f64,
    /// Row-major: row index follows the vertical (z) angle, column the in-plane (y) angle.
    pub intensity: Vec<f64>,
}

impl PatternMap {
    pub fn angle_deg(&self, index: usize) -> f64 {
        if self.grid == 1 {
            return 0.0;
        }
        -self.half_window_deg + 2.0 * self.half_window_deg * index as f64 / (self.grid - 1) as f64
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.intensity[row * self.grid + col]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRequest {
    pub orders: Vec<(i32, i32)>,
    pub pump_um: f64,
    pub signal_um: f64,
    pub temperature_c: f64,
    pub crystal_length_mm: f64,
    pub half_window_deg: f64,
    pub grid: usize,
}

/// Minimum samples per axis for [`pattern_scan`].
pub const MIN_PATTERN_GRID: usize = 64;

/// Emission map seen through a flat output facet normal to the pump.
///
/// For every external direction the internal signal direction follows from
/// Snell's law on the transverse direction cosines. For each order the idler
/// must carry `P − k_s·ŝ`; its magnitude error ΔK gives the weight
/// `sinc²(ΔK·L/2)`, and the orders are summed. This is a thin-beam model of
/// relative intensity, not an absolute brightness.
pub fn pattern_scan(dispersion: &DispersionModel, lattice: &NpcLattice, request: &PatternRequest) -> Result<PatternMap> {
    if request.grid < MIN_PATTERN_GRID {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need at least {MIN_PATTERN_GRID} points per axis, got {}", request.grid),
        });
    }
    if !(request.half_window_deg > 0.0 && request.half_window_deg < 60.0) {
        return Err(Error::InvalidParameter {
            name: "half_window_deg",
            reason: format!("must lie in (0, 60), got {}", request.half_window_deg),
        });
    }
    if !(request.crystal_length_mm >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "crystal_length_mm",
            reason: "must be >= 0".into(),
        });
    }
    let t = request.temperature_c;
    let n_signal = dispersion.refractive_index(request.signal_um, t)?;
    let mut momenta = Vec::with_capacity(request.orders.len());
    let mut k = None;
    for &order in &request.orders {
        let (p, kk) = pair_momentum(dispersion, lattice, order, request.pump_um, request.signal_um, t)?;
        momenta.push(p);
        k = Some(kk);
    }
    let k = match k {
        Some(k) => k,
        None => Wavevectors::compute(dispersion, request.pump_um, request.signal_um, t)?,
    };
    let half_length = 0.5 * request.crystal_length_mm * 1e3;
    let grid = request.grid;
    let mut map = PatternMap {
        grid,
        half_window_deg: request.half_window_deg,
        intensity: Vec::new(),
    };
    let angles: Vec<f64> = (0..grid).map(|i| map.angle_deg(i).to_radians()).collect();

    map.intensity = (0..grid)
        .into_par_iter()
        .flat_map_iter(|row| {
            let uz = angles[row].sin() / n_signal;
            let momenta = &momenta;
            let angles = &angles;
            (0..grid).map(move |col| {
                let uy = angles[col].sin() / n_signal;
                let ux = (1.0 - uy * uy - uz * uz).sqrt();
                momenta
                    .iter()
                    .map(|p| {
                        let ix = p.x - k.signal * ux;
                        let iy = p.y - k.signal * uy;
                        let iz = -k.signal * uz;
                        let dk = (ix * ix + iy * iy + iz * iz).sqrt() - k.idler;
                        sinc_sq(dk * half_length)
                    })
                    .sum::<f64>()
            })
        })
        .collect();
    Ok(map)
}

fn sinc_sq(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let s = x.sin() / x;
        s * s
    }
}

/// External angle after refraction out of a facet normal to the pump.
pub fn external_angle(internal_rad: f64, index: f64) -> f64 {
    (index * internal_rad.sin()).clamp(-1.0, 1.0).asin()
}
