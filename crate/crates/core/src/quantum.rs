//! Two-mode Fock-state algebra, beam-splitter evolution and fringe visibility.
//!
//! Beam-splitter convention (transmittance `T`, reflectance `R = 1 − T`):
//!
//! ```text
//! a† → √T c† + i√R d†
//! b† → i√R c† + √T d†
//! ```
//!
//! With this symmetric convention a balanced splitter maps
//! `(|2,0⟩ + e^{2iφ}|0,2⟩)/√2` onto a state whose `|1,1⟩` amplitude is
//! `i(1 + e^{2iφ})/2`. Detectors are threshold detectors; a coincidence is at
//! least one photon in each output port.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Normalisation tolerance for constructed states.
pub const NORM_TOLERANCE: f64 = 1e-12;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Pure state over `|a, b⟩` with `a + b ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    n_max: usize,
    // Triangular layout: total photon number N = a + b occupies
    // indices N(N+1)/2 .. N(N+1)/2 + N, ordered by b.
    amps: Vec<Complex64>,
}

impl TwoModeState {
    fn index(a: usize, b: usize) -> usize {
        let total = a + b;
        total * (total + 1) / 2 + b
    }

    fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            amps: vec![Complex64::new(0.0, 0.0); (n_max + 1) * (n_max + 2) / 2],
        }
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(0, 0, n_max).expect("vacuum fits any truncation")
    }

    pub fn fock(a: usize, b: usize, n_max: usize) -> Result<Self> {
        Self::from_components(n_max, &[((a, b), Complex64::new(1.0, 0.0))])
    }

    /// Builds a state from `(a, b) → amplitude` pairs. The result must be
    /// normalised to within [`NORM_TOLERANCE`].
    pub fn from_components(n_max: usize, components: &[((usize, usize), Complex64)]) -> Result<Self> {
        let mut state = Self::zeros(n_max);
        for &((a, b), amp) in components {
            if a + b > n_max {
                return Err(Error::InvalidParameter {
                    name: "components",
                    reason: format!("|{a},{b}> exceeds the truncation n_max = {n_max}"),
                });
            }
            state.amps[Self::index(a, b)] += amp;
        }
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "components",
                reason: format!("state norm^2 is {norm}, expected 1"),
            });
        }
        Ok(state)
    }

    /// Scales an arbitrary non-zero amplitude set to unit norm.
    pub fn normalized(n_max: usize, components: &[((usize, usize), Complex64)]) -> Result<Self> {
        let norm: f64 = components.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "components",
                reason: "all amplitudes are zero".into(),
            });
        }
        let scaled: Vec<_> = components.iter().map(|&(k, c)| (k, c / norm)).collect();
        let mut state = Self::zeros(n_max);
        for ((a, b), amp) in scaled {
            if a + b > n_max {
                return Err(Error::InvalidParameter {
                    name: "components",
                    reason: format!("|{a},{b}> exceeds the truncation n_max = {n_max}"),
                });
            }
            state.amps[Self::index(a, b)] += amp;
        }
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Amplitude of `|a, b⟩`; `None` beyond the truncation.
    pub fn amplitude(&self, a: usize, b: usize) -> Option<Complex64> {
        (a + b <= self.n_max).then(|| self.amps[Self::index(a, b)])
    }

    /// Non-zero components as `((a, b), amplitude)`.
    pub fn components(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        (0..=self.n_max).flat_map(move |total| {
            (0..=total).filter_map(move |b| {
                let a = total - b;
                let amp = self.amps[Self::index(a, b)];
                (amp != Complex64::new(0.0, 0.0)).then_some(((a, b), amp))
            })
        })
    }

    /// `⟨self|other⟩`; states of different truncation are compared on the
    /// common subspace.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn photon_number_expectation(&self) -> f64 {
        let (n1, n2) = singles_expectation(self);
        n1 + n2
    }
}

/// `(|2,0⟩ + e^{2iφ}|0,2⟩)/√2`, truncated at two photons.
pub fn make_path_entangled_state(phi: f64) -> TwoModeState {
    let mut state = TwoModeState::zeros(2);
    state.amps[TwoModeState::index(2, 0)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    state.amps[TwoModeState::index(0, 2)] = Complex64::from_polar(FRAC_1_SQRT_2, 2.0 * phi);
    state
}

/// Second-order emission term `∝ (a†² + e^{2iφ} b†²)² |0⟩`, normalised.
pub fn make_double_pair_state(phi: f64) -> TwoModeState {
    let e = Complex64::from_polar(1.0, 2.0 * phi);
    let s24 = 24f64.sqrt();
    let mut state = TwoModeState::zeros(4);
    state.amps[TwoModeState::index(4, 0)] = Complex64::new(s24 / 8.0, 0.0);
    state.amps[TwoModeState::index(2, 2)] = e * 0.5;
    state.amps[TwoModeState::index(0, 4)] = e * e * (s24 / 8.0);
    state
}

/// Lossless two-mode beam splitter with transmittance `T ∈ [0, 1]`.
pub fn beamsplitter(state: &TwoModeState, transmittance: f64) -> Result<TwoModeState> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(Error::InvalidParameter {
            name: "transmittance",
            reason: format!("must lie in [0, 1], got {transmittance}"),
        });
    }
    let t = Complex64::new(transmittance.sqrt(), 0.0);
    let r = Complex64::new(0.0, (1.0 - transmittance).sqrt());
    let mut out = TwoModeState::zeros(state.n_max);

    for ((a, b), amp) in state.components() {
        let norm_in = (factorial(a) * factorial(b)).sqrt();
        // (t c† + r d†)^a (r c† + t d†)^b
        for j in 0..=a {
            let from_a = amp * binomial(a, j) * t.powu(j as u32) * r.powu((a - j) as u32);
            for k in 0..=b {
                let coeff = from_a * binomial(b, k) * r.powu(k as u32) * t.powu((b - k) as u32);
                let p = j + k;
                let q = a + b - p;
                let norm_out = (factorial(p) * factorial(q)).sqrt();
                out.amps[TwoModeState::index(p, q)] += coeff * (norm_out / norm_in);
            }
        }
    }
    Ok(out)
}

/// Probability of at least one photon in each mode.
pub fn coincidence_probability(state: &TwoModeState) -> f64 {
    state
        .components()
        .filter(|((a, b), _)| *a >= 1 && *b >= 1)
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

/// Expected photon number in each mode.
pub fn singles_expectation(state: &TwoModeState) -> (f64, f64) {
    state.components().fold((0.0, 0.0), |(n1, n2), ((a, b), c)| {
        let p = c.norm_sqr();
        (n1 + a as f64 * p, n2 + b as f64 * p)
    })
}

/// Sources of lost fringe contrast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ImperfectionModel {
    /// Coupler transmittance `T`, in (0, 1).
    pub transmittance: f64,
    /// Polarization rotation applied to one path, radians.
    pub polarization_rotation_rad: f64,
    /// Residual elliptical mismatch ε, in [0, 0.5].
    pub ellipticity: f64,
    /// Fraction of detected pairs from double-pair events, in [0, 1).
    pub multipair_fraction: f64,
    /// Anti-bunched background pairs relative to the desired pairs, >= 0.
    pub background_ratio: f64,
}

impl Default for ImperfectionModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl ImperfectionModel {
    pub fn ideal() -> Self {
        Self {
            transmittance: 0.5,
            polarization_rotation_rad: 0.0,
            ellipticity: 0.0,
            multipair_fraction: 0.0,
            background_ratio: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.transmittance > 0.0 && self.transmittance < 1.0) {
            return bad("transmittance", format!("must lie in (0, 1), got {}", self.transmittance));
        }
        if !self.polarization_rotation_rad.is_finite() {
            return bad("polarization_rotation_rad", "must be finite".into());
        }
        if !(0.0..=0.5).contains(&self.ellipticity) {
            return bad("ellipticity", format!("must lie in [0, 0.5], got {}", self.ellipticity));
        }
        if !(0.0..1.0).contains(&self.multipair_fraction) {
            return bad(
                "multipair_fraction",
                format!("must lie in [0, 1), got {}", self.multipair_fraction),
            );
        }
        if !(self.background_ratio >= 0.0 && self.background_ratio.is_finite()) {
            return bad("background_ratio", format!("must be >= 0, got {}", self.background_ratio));
        }
        if self.weights().ideal < 0.0 {
            return bad(
                "multipair_fraction",
                "multi-pair and background weights exceed 1".into(),
            );
        }
        Ok(())
    }

    /// Squared overlap of the two paths' polarization states: the second
    /// path is rotated by θ and carries a small elliptical admixture ε,
    /// giving `(1 − ε)cos²θ + ε sin²θ`.
    pub fn polarization_overlap(&self) -> f64 {
        let (s, c) = self.polarization_rotation_rad.sin_cos();
        (1.0 - self.ellipticity) * c * c + self.ellipticity * s * s
    }

    pub fn weights(&self) -> MixtureWeights {
        let background = self.background_ratio / (1.0 + self.background_ratio);
        MixtureWeights {
            ideal: 1.0 - self.multipair_fraction - background,
            background,
            multipair: self.multipair_fraction,
        }
    }
}

/// Classical mixture weights of the detected-pair ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureWeights {
    pub ideal: f64,
    pub background: f64,
    pub multipair: f64,
}

impl MixtureWeights {
    pub fn sum(&self) -> f64 {
        self.ideal + self.background + self.multipair
    }
}

/// Expected detector signals for one setting of the relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSignals {
    pub singles1: f64,
    pub singles2: f64,
    pub coincidence: f64,
}

/// Phase-averaged threshold coincidence and singles of the double-pair state.
///
/// The coincidence is a trigonometric polynomial of degree 2 in `2φ`, so an
/// 8-point uniform average is exact.
pub fn double_pair_floor(transmittance: f64) -> Result<DetectorSignals> {
    let samples = 8;
    let mut acc = DetectorSignals {
        singles1: 0.0,
        singles2: 0.0,
        coincidence: 0.0,
    };
    for k in 0..samples {
        let phi = PI * k as f64 / samples as f64;
        let out = beamsplitter(&make_double_pair_state(phi), transmittance)?;
        let (s1, s2) = singles_expectation(&out);
        acc.singles1 += s1;
        acc.singles2 += s2;
        acc.coincidence += coincidence_probability(&out);
    }
    let n = samples as f64;
    Ok(DetectorSignals {
        singles1: acc.singles1 / n,
        singles2: acc.singles2 / n,
        coincidence: acc.coincidence / n,
    })
}

/// Detector signals of the full mixture at relative phase `phi`.
///
/// Components, each evolved through the coupler separately:
///
/// * desired pairs (weight `1 − p₄ − β/(1+β)`): the fraction η given by
///   [`ImperfectionModel::polarization_overlap`] interferes as the
///   path-entangled state, the rest is an incoherent `|2,0⟩`/`|0,2⟩` mixture;
/// * anti-bunched background pairs (weight `β/(1+β)`): `|1,1⟩`, again with
///   only the fraction η indistinguishable at the coupler;
/// * double-pair events (weight `p₄`): a phase-independent floor from
///   [`double_pair_floor`].
pub fn detector_signals(phi: f64, imperfections: &ImperfectionModel) -> Result<DetectorSignals> {
    imperfections.validate()?;
    let t = imperfections.transmittance;
    let w = imperfections.weights();
    let eta = imperfections.polarization_overlap();
    signals_with(phi, t, w, eta, &double_pair_floor(t)?)
}

fn signals_with(
    phi: f64,
    t: f64,
    w: MixtureWeights,
    eta: f64,
    floor: &DetectorSignals,
) -> Result<DetectorSignals> {
    let coherent = beamsplitter(&make_path_entangled_state(phi), t)?;
    let bunched_a = beamsplitter(&TwoModeState::fock(2, 0, 2)?, t)?;
    let bunched_b = beamsplitter(&TwoModeState::fock(0, 2, 2)?, t)?;
    let pair = beamsplitter(&TwoModeState::fock(1, 1, 2)?, t)?;
    let r = 1.0 - t;

    let (c1, c2) = singles_expectation(&coherent);
    let (a1, a2) = singles_expectation(&bunched_a);
    let (b1, b2) = singles_expectation(&bunched_b);
    let (p1, p2) = singles_expectation(&pair);

    let incoherent_cc = 0.5 * (coincidence_probability(&bunched_a) + coincidence_probability(&bunched_b));
    let ideal_cc = eta * coincidence_probability(&coherent) + (1.0 - eta) * incoherent_cc;
    let ideal_s1 = eta * c1 + (1.0 - eta) * 0.5 * (a1 + b1);
    let ideal_s2 = eta * c2 + (1.0 - eta) * 0.5 * (a2 + b2);

    // Distinguishable photons split independently: both transmitted or both reflected.
    let background_cc = eta * coincidence_probability(&pair) + (1.0 - eta) * (t * t + r * r);

    Ok(DetectorSignals {
        singles1: w.ideal * ideal_s1 + w.background * p1 + w.multipair * floor.singles1,
        singles2: w.ideal * ideal_s2 + w.background * p2 + w.multipair * floor.singles2,
        coincidence: w.ideal * ideal_cc + w.background * background_cc + w.multipair * floor.coincidence,
    })
}

/// Fringe visibility of the model.
///
/// Every component's coincidence is affine in `cos 2φ`, so the extremes sit
/// at φ = 0 and φ = π/2.
pub fn model_visibility(imperfections: &ImperfectionModel) -> Result<f64> {
    let top = detector_signals(0.0, imperfections)?.coincidence;
    let bottom = detector_signals(0.5 * PI, imperfections)?.coincidence;
    if top + bottom <= 0.0 {
        return Ok(0.0);
    }
    Ok((top - bottom).abs() / (top + bottom))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeScan {
    pub delays_um: Vec<f64>,
    pub singles1: Vec<f64>,
    pub singles2: Vec<f64>,
    pub coincidences: Vec<f64>,
    /// Visibility of the fitted sinusoid, `amplitude / offset`.
    pub visibility: f64,
    /// `(max − min)/(max + min)` of the sampled coincidences.
    pub sampled_visibility: f64,
    /// Fitted fringe period; `None` for a flat trace.
    pub period_um: Option<f64>,
    pub weights: MixtureWeights,
    pub imperfections: ImperfectionModel,
}

/// Minimum number of delay samples for [`fringe_scan`].
pub const MIN_FRINGE_STEPS: usize = 16;

/// Relative contrast below which a trace counts as flat.
const FLAT_TRACE: f64 = 1e-12;

/// Coincidence and singles versus path delay `d` (inclusive linear grid),
/// with single-photon phase `φ = 2πd/λ`.
pub fn fringe_scan(
    wavelength_um: f64,
    delay_range_um: (f64, f64),
    steps: usize,
    imperfections: &ImperfectionModel,
) -> Result<FringeScan> {
    imperfections.validate()?;
    if steps < MIN_FRINGE_STEPS {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: format!("need at least {MIN_FRINGE_STEPS} delay samples, got {steps}"),
        });
    }
    if !(wavelength_um > 0.0) {
        return Err(Error::InvalidParameter {
            name: "wavelength_um",
            reason: format!("must be positive, got {wavelength_um}"),
        });
    }
    let (d0, d1) = delay_range_um;
    if !(d1 > d0) {
        return Err(Error::InvalidParameter {
            name: "delay_range",
            reason: format!("end {d1} must exceed start {d0}"),
        });
    }

    let t = imperfections.transmittance;
    let w = imperfections.weights();
    let eta = imperfections.polarization_overlap();
    let floor = double_pair_floor(t)?;

    let delays: Vec<f64> = (0..steps)
        .map(|k| d0 + (d1 - d0) * k as f64 / (steps - 1) as f64)
        .collect();
    let signals: Vec<DetectorSignals> = delays
        .par_iter()
        .map(|&d| signals_with(2.0 * PI * d / wavelength_um, t, w, eta, &floor))
        .collect::<Result<_>>()?;

    let coincidences: Vec<f64> = signals.iter().map(|s| s.coincidence).collect();
    let max = coincidences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = coincidences.iter().copied().fold(f64::INFINITY, f64::min);
    let sampled_visibility = if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 };

    let (visibility, period_um) = if sampled_visibility < FLAT_TRACE {
        (0.0, None)
    } else {
        let fit = fit_sinusoid(&delays, &coincidences)?;
        (fit.amplitude / fit.offset, Some(1.0 / fit.frequency))
    };

    Ok(FringeScan {
        delays_um: delays,
        singles1: signals.iter().map(|s| s.singles1).collect(),
        singles2: signals.iter().map(|s| s.singles2).collect(),
        coincidences,
        visibility,
        sampled_visibility,
        period_um,
        weights: w,
        imperfections: *imperfections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    /// Cycles per µm.
    pub frequency: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Least-squares fit of `c + a·cos(2πfx) + b·sin(2πfx)` at fixed `f`.
fn fit_at(x: &[f64], y: &[f64], frequency: f64) -> (f64, f64, f64, f64) {
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let (s, c) = (2.0 * PI * frequency * xi).sin_cos();
        let basis = [1.0, c, s];
        for r in 0..3 {
            v[r] += basis[r] * yi;
            for col in 0..3 {
                m[r][col] += basis[r] * basis[col];
            }
        }
    }
    let coeffs = solve3(m, v).unwrap_or([f64::NAN; 3]);
    let residual: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let (s, c) = (2.0 * PI * frequency * xi).sin_cos();
            let e = yi - (coeffs[0] + coeffs[1] * c + coeffs[2] * s);
            e * e
        })
        .sum();
    (coeffs[0], coeffs[1], coeffs[2], residual)
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = ((row + 1)..3).map(|k| m[row][k] * out[k]).sum();
        out[row] = (v[row] - tail) / m[row][row];
    }
    Some(out)
}

/// Single-frequency sinusoid fit. The frequency is scanned between one
/// cycle per span and the Nyquist limit, then refined by golden-section
/// search around the best grid point.
pub fn fit_sinusoid(x: &[f64], y: &[f64]) -> Result<SinusoidFit> {
    let span = x.last().copied().unwrap_or(0.0) - x.first().copied().unwrap_or(0.0);
    if x.len() < 4 || !(span > 0.0) {
        return Err(Error::PeriodExtraction("need at least four samples over a positive span".into()));
    }
    let f_min = 1.0 / span;
    let f_max = (x.len() - 1) as f64 / (2.0 * span);
    if f_max <= f_min {
        return Err(Error::PeriodExtraction("too few samples to resolve one period".into()));
    }
    let step = 1.0 / (8.0 * span);
    let count = ((f_max - f_min) / step).ceil() as usize + 1;
    let (best_i, _) = (0..count)
        .map(|i| (i, fit_at(x, y, (f_min + step * i as f64).min(f_max)).3))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let best_f = (f_min + step * best_i as f64).min(f_max);

    let (mut lo, mut hi) = ((best_f - step).max(f_min), (best_f + step).min(f_max));
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let cost = |f: f64| fit_at(x, y, f).3;
    let mut c = hi - golden * (hi - lo);
    let mut d = lo + golden * (hi - lo);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (hi - lo) <= 1e-13 * hi {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - golden * (hi - lo);
            fc = cost(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + golden * (hi - lo);
            fd = cost(d);
        }
    }
    let frequency = 0.5 * (lo + hi);
    if frequency * span < 1.0 + 1e-9 && best_i == 0 {
        return Err(Error::PeriodExtraction(format!(
            "delay span {span} um is shorter than one fringe period"
        )));
    }
    let (offset, a, b, residual) = fit_at(x, y, frequency);
    Ok(SinusoidFit {
        frequency,
        offset,
        amplitude: a.hypot(b),
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRow {
    pub cause: &'static str,
    pub visibility_alone: f64,
    pub note: String,
}

/// Visibility with each cause acting alone, followed by the composite.
pub fn visibility_budget(imperfections: &ImperfectionModel) -> Result<Vec<BudgetRow>> {
    imperfections.validate()?;
    let ideal = ImperfectionModel::ideal();
    let imp = imperfections;
    let coupler = ImperfectionModel {
        transmittance: imp.transmittance,
        ..ideal
    };
    let polarization = ImperfectionModel {
        polarization_rotation_rad: imp.polarization_rotation_rad,
        ellipticity: imp.ellipticity,
        ..ideal
    };
    let multipair = ImperfectionModel {
        multipair_fraction: imp.multipair_fraction,
        ..ideal
    };
    // Anti-bunched pairs only reach the coincidence channel through the
    // coupler imbalance, so this entry keeps the configured transmittance.
    let background = ImperfectionModel {
        transmittance: imp.transmittance,
        background_ratio: imp.background_ratio,
        ..ideal
    };
    Ok(vec![
        BudgetRow {
            cause: "coupler_imbalance",
            visibility_alone: model_visibility(&coupler)?,
            note: format!("T = {}; split ratio alone leaves the two-photon fringe intact", imp.transmittance),
        },
        BudgetRow {
            cause: "polarization_mismatch",
            visibility_alone: model_visibility(&polarization)?,
            note: format!(
                "rotation = {} rad, ellipticity = {}; overlap = {:.6}",
                imp.polarization_rotation_rad,
                imp.ellipticity,
                polarization.polarization_overlap()
            ),
        },
        BudgetRow {
            cause: "multi_pair",
            visibility_alone: model_visibility(&multipair)?,
            note: format!("p4 = {}; phase-averaged double-pair coincidence floor", imp.multipair_fraction),
        },
        BudgetRow {
            cause: "g20_background",
            visibility_alone: model_visibility(&background)?,
            note: format!(
                "beta = {} at T = {}; anti-bunched pairs leak into coincidences as (T - R)^2",
                imp.background_ratio, imp.transmittance
            ),
        },
        BudgetRow {
            cause: "composite",
            visibility_alone: model_visibility(imp)?,
            note: "all causes together".into(),
        },
    ])
}

/// Visibility versus polarization rotation over an inclusive angle grid.
pub fn polarization_visibility_curve(
    rotation_range_rad: (f64, f64),
    steps: usize,
    base: &ImperfectionModel,
) -> Result<Vec<(f64, f64)>> {
    if steps == 0 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: "at least one angle is required".into(),
        });
    }
    (0..steps)
        .map(|i| {
            let theta = if steps == 1 {
                rotation_range_rad.0
            } else {
                rotation_range_rad.0
                    + (rotation_range_rad.1 - rotation_range_rad.0) * i as f64 / (steps - 1) as f64
            };
            let model = ImperfectionModel {
                polarization_rotation_rad: theta,
                ..*base
            };
            Ok((theta, model_visibility(&model)?))
        })
        .collect()
}
