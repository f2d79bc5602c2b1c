//! 2D poling lattices, their reciprocal vectors and motif Fourier coefficients.
//!
//! The poling pattern is a ±1 sign function: the background is +1 and the
//! nonlinear coefficient is inverted (−1) inside the motif centred on every
//! lattice point. Lengths are in µm, reciprocal vectors in rad/µm.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::error::{Error, Result};

/// Minimum raster resolution per cell axis for the numeric coefficient.
pub const MIN_GRID_POINTS: usize = 256;

/// Index bound used by [`NpcLattice::has_lattice_point_at`].
pub const LATTICE_SEARCH_BOUND: i32 = 64;

/// Relative margin keeping the default optimizer bound strictly below half a period.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Inverted-domain shape repeated at every lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotifShape {
    Circle { radius: f64 },
    /// Axis-aligned rectangle given by its half-widths.
    Rectangle { half_x: f64, half_y: f64 },
}

impl MotifShape {
    pub fn area(&self) -> f64 {
        match *self {
            MotifShape::Circle { radius } => PI * radius * radius,
            MotifShape::Rectangle { half_x, half_y } => 4.0 * half_x * half_y,
        }
    }

    fn contains(&self, d: Vec2) -> bool {
        match *self {
            MotifShape::Circle { radius } => d.x * d.x + d.y * d.y < radius * radius,
            MotifShape::Rectangle { half_x, half_y } => d.x.abs() < half_x && d.y.abs() < half_y,
        }
    }

    /// Smallest extent across the motif.
    fn min_width(&self) -> f64 {
        match *self {
            MotifShape::Circle { radius } => 2.0 * radius,
            MotifShape::Rectangle { half_x, half_y } => 2.0 * half_x.min(half_y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocalVector {
    pub m: i32,
    pub n: i32,
    pub gx: f64,
    pub gy: f64,
}

impl ReciprocalVector {
    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.gx, self.gy)
    }

    pub fn magnitude(&self) -> f64 {
        self.gx.hypot(self.gy)
    }
}

/// A 2D nonlinear photonic crystal: Bravais lattice plus motif.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NpcLattice {
    primitive_a: Vec2,
    primitive_b: Vec2,
    motif: MotifShape,
    #[serde(skip)]
    recip_a: Vec2,
    #[serde(skip)]
    recip_b: Vec2,
}

impl NpcLattice {
    pub fn new(primitive_a: Vec2, primitive_b: Vec2, motif: MotifShape) -> Result<Self> {
        let det = primitive_a.cross(primitive_b);
        if !det.is_finite() || det.abs() <= 1e-12 * primitive_a.norm() * primitive_b.norm() {
            return Err(Error::InvalidLattice(format!(
                "primitive vectors ({}, {}) and ({}, {}) are linearly dependent",
                primitive_a.x, primitive_a.y, primitive_b.x, primitive_b.y
            )));
        }
        let recip_a = Vec2::new(primitive_b.y, -primitive_b.x).scale(2.0 * PI / det);
        let recip_b = Vec2::new(-primitive_a.y, primitive_a.x).scale(2.0 * PI / det);
        let lattice = Self {
            primitive_a,
            primitive_b,
            motif,
            recip_a,
            recip_b,
        };
        lattice.validate_motif()?;
        Ok(lattice)
    }

    /// Rectangular lattice with periods `period_x`, `period_y`.
    pub fn rectangular(period_x: f64, period_y: f64, motif: MotifShape) -> Result<Self> {
        if !(period_x > 0.0 && period_y > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "periods must be positive, got {period_x} x {period_y} um"
            )));
        }
        Self::new(Vec2::new(period_x, 0.0), Vec2::new(0.0, period_y), motif)
    }

    /// Builds the real-space lattice whose reciprocal primitive vectors are `b1`, `b2`.
    pub fn from_reciprocal(b1: Vec2, b2: Vec2, motif: MotifShape) -> Result<Self> {
        let det = b1.cross(b2);
        if det.abs() <= 1e-12 * b1.norm() * b2.norm() {
            return Err(Error::InvalidLattice(
                "reciprocal primitive vectors are linearly dependent".into(),
            ));
        }
        let a = Vec2::new(b2.y, -b2.x).scale(2.0 * PI / det);
        let b = Vec2::new(-b1.y, b1.x).scale(2.0 * PI / det);
        Self::new(a, b, motif)
    }

    pub fn with_motif(&self, motif: MotifShape) -> Result<Self> {
        Self::new(self.primitive_a, self.primitive_b, motif)
    }

    pub fn primitive_a(&self) -> Vec2 {
        self.primitive_a
    }

    pub fn primitive_b(&self) -> Vec2 {
        self.primitive_b
    }

    pub fn motif(&self) -> MotifShape {
        self.motif
    }

    pub fn reciprocal_basis(&self) -> (Vec2, Vec2) {
        (self.recip_a, self.recip_b)
    }

    pub fn cell_area(&self) -> f64 {
        self.primitive_a.cross(self.primitive_b).abs()
    }

    pub fn is_rectangular(&self) -> bool {
        self.primitive_a.y == 0.0 && self.primitive_b.x == 0.0
    }

    /// `(Λx, Λy)` for rectangular lattices.
    pub fn periods(&self) -> Option<(f64, f64)> {
        self.is_rectangular()
            .then(|| (self.primitive_a.x.abs(), self.primitive_b.y.abs()))
    }

    fn validate_motif(&self) -> Result<()> {
        match self.motif {
            MotifShape::Circle { radius } => {
                if !(radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidMotif(format!("radius must be >= 0, got {radius}")));
                }
                let shortest = self.shortest_lattice_vector();
                if 2.0 * radius >= shortest {
                    return Err(Error::InvalidMotif(format!(
                        "circle of radius {radius} um overlaps its neighbours; 2R must be below {shortest} um"
                    )));
                }
            }
            MotifShape::Rectangle { half_x, half_y } => {
                if !(half_x >= 0.0 && half_y >= 0.0 && half_x.is_finite() && half_y.is_finite()) {
                    return Err(Error::InvalidMotif(format!(
                        "half-widths must be >= 0, got {half_x} x {half_y}"
                    )));
                }
                let tol = 1e-12;
                for t in self.neighbour_translations() {
                    if t.x.abs() < 2.0 * half_x - tol && t.y.abs() < 2.0 * half_y - tol {
                        return Err(Error::InvalidMotif(format!(
                            "rectangle {}x{} um overlaps the motif translated by ({}, {})",
                            2.0 * half_x,
                            2.0 * half_y,
                            t.x,
                            t.y
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn neighbour_translations(&self) -> Vec<Vec2> {
        let mut out = Vec::new();
        for i in -2..=2 {
            for j in -2..=2 {
                if (i, j) != (0, 0) {
                    out.push(self.primitive_a.scale(i as f64) + self.primitive_b.scale(j as f64));
                }
            }
        }
        out
    }

    fn shortest_lattice_vector(&self) -> f64 {
        self.neighbour_translations()
            .into_iter()
            .map(Vec2::norm)
            .fold(f64::INFINITY, f64::min)
    }

    /// `m·b₁ + n·b₂`.
    pub fn reciprocal_vector(&self, m: i32, n: i32) -> ReciprocalVector {
        let g = self.recip_a.scale(m as f64) + self.recip_b.scale(n as f64);
        ReciprocalVector { m, n, gx: g.x, gy: g.y }
    }

    /// Motif area over cell area. The DC Fourier term of the ±1 pattern is `1 − 2·fill_factor`.
    pub fn fill_factor(&self) -> f64 {
        self.motif.area() / self.cell_area()
    }

    /// Circular-motif Fourier coefficient on a rectangular lattice, written
    /// exactly as the closed form
    /// `2R / sqrt((nΛx)² + (mΛy)²) · J1(2πR·sqrt((m/Λx)² + (n/Λy)²))`.
    ///
    /// The value is signed; its magnitude is the modulus of the (m, n)
    /// Fourier-series coefficient of the ±1 pattern.
    pub fn fourier_coefficient_analytic(&self, m: i32, n: i32) -> Result<f64> {
        let (lx, ly, radius) = self.analytic_inputs(m, n)?;
        let (mf, nf) = (m as f64, n as f64);
        let prefactor = 2.0 * radius / ((nf * lx).powi(2) + (mf * ly).powi(2)).sqrt();
        let arg = 2.0 * PI * radius * ((mf / lx).powi(2) + (nf / ly).powi(2)).sqrt();
        Ok(prefactor * bessel::j1(arg))
    }

    /// The same closed form with the prefactor's period indices swapped,
    /// `2R / sqrt((mΛx)² + (nΛy)²)`. Reported for comparison only.
    pub fn fourier_coefficient_transposed(&self, m: i32, n: i32) -> Result<f64> {
        let (lx, ly, radius) = self.analytic_inputs(m, n)?;
        let (mf, nf) = (m as f64, n as f64);
        let prefactor = 2.0 * radius / ((mf * lx).powi(2) + (nf * ly).powi(2)).sqrt();
        let arg = 2.0 * PI * radius * ((mf / lx).powi(2) + (nf / ly).powi(2)).sqrt();
        Ok(prefactor * bessel::j1(arg))
    }

    fn analytic_inputs(&self, m: i32, n: i32) -> Result<(f64, f64, f64)> {
        if (m, n) == (0, 0) {
            return Err(Error::DcTerm);
        }
        let radius = match self.motif {
            MotifShape::Circle { radius } => radius,
            MotifShape::Rectangle { .. } => {
                return Err(Error::UnsupportedShape(
                    "the closed-form circle coefficient needs a circular motif; \
                     use fourier_coefficient_rectangle or fourier_coefficient_numeric"
                        .into(),
                ))
            }
        };
        let (lx, ly) = self.periods().ok_or_else(|| {
            Error::UnsupportedShape(
                "the closed-form circle coefficient needs a rectangular lattice; \
                 use fourier_coefficient_numeric for oblique cells"
                    .into(),
            )
        })?;
        Ok((lx, ly, radius))
    }

    /// Magnitude of the (m, n) coefficient for an axis-aligned rectangular motif:
    /// `2·(2ax)(2ay)/A · |sinc(Gx·ax)·sinc(Gy·ay)|` with `sinc(u) = sin(u)/u`.
    pub fn fourier_coefficient_rectangle(&self, m: i32, n: i32) -> Result<f64> {
        if (m, n) == (0, 0) {
            return Err(Error::DcTerm);
        }
        let MotifShape::Rectangle { half_x, half_y } = self.motif else {
            return Err(Error::UnsupportedShape(
                "the separable rectangle coefficient needs a rectangular motif".into(),
            ));
        };
        let g = self.reciprocal_vector(m, n);
        let sinc = |u: f64| if u == 0.0 { 1.0 } else { u.sin() / u };
        let value = 2.0 * self.motif.area() / self.cell_area()
            * sinc(g.gx * half_x)
            * sinc(g.gy * half_y);
        Ok(value.abs())
    }

    /// Whether the poling at `r` is inverted (−1).
    pub fn is_inverted(&self, r: Vec2) -> bool {
        // Fractional coordinates, then test the motif around nearby lattice points.
        let u = r.dot(self.recip_a) / (2.0 * PI);
        let v = r.dot(self.recip_b) / (2.0 * PI);
        let (u0, v0) = (u.floor() as i64, v.floor() as i64);
        for i in (u0 - 1)..=(u0 + 2) {
            for j in (v0 - 1)..=(v0 + 2) {
                let centre =
                    self.primitive_a.scale(i as f64) + self.primitive_b.scale(j as f64);
                if self.motif.contains(r - centre) {
                    return true;
                }
            }
        }
        false
    }

    /// ±1 poling sign at `r`.
    pub fn sign_at(&self, r: Vec2) -> i8 {
        if self.is_inverted(r) {
            -1
        } else {
            1
        }
    }

    /// Modulus of the (m, n) Fourier-series coefficient of the ±1 pattern,
    /// from a midpoint raster of one cell with `grid_points_per_cell` samples
    /// along each primitive direction.
    ///
    /// The cell is centred on a lattice point. Rows are summed in parallel and
    /// merged in row order, so the result does not depend on the thread count.
    pub fn fourier_coefficient_numeric(&self, m: i32, n: i32, grid_points_per_cell: usize) -> Result<f64> {
        if grid_points_per_cell < MIN_GRID_POINTS {
            return Err(Error::GridTooCoarse {
                requested: grid_points_per_cell,
                minimum: MIN_GRID_POINTS,
            });
        }
        let size = grid_points_per_cell;
        let frac = |i: usize| (i as f64 + 0.5) / size as f64 - 0.5;
        let phase_u: Vec<Complex64> = (0..size)
            .map(|i| Complex64::from_polar(1.0, -2.0 * PI * m as f64 * frac(i)))
            .collect();

        // For rectangular cells the central motif is the only one that can
        // reach into the centred cell.
        let local_only = self.is_rectangular();

        let row_sums: Vec<Complex64> = (0..size)
            .into_par_iter()
            .map(|j| {
                let v = frac(j);
                let row_phase = Complex64::from_polar(1.0, -2.0 * PI * n as f64 * v);
                let base = self.primitive_b.scale(v);
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, pu) in phase_u.iter().enumerate() {
                    let r = self.primitive_a.scale(frac(i)) + base;
                    let inverted = if local_only {
                        self.motif.contains(r)
                    } else {
                        self.is_inverted(r)
                    };
                    if inverted {
                        acc -= pu;
                    } else {
                        acc += pu;
                    }
                }
                acc * row_phase
            })
            .collect();

        let total: Complex64 = row_sums.iter().sum();
        Ok(total.norm() / (size * size) as f64)
    }

    /// Radius maximising |coefficient(m, n)| for circles with `2R` strictly
    /// below the shorter period.
    pub fn optimize_motif_radius(&self, m: i32, n: i32) -> Result<MotifOptimum> {
        let (lx, ly) = self.periods().ok_or_else(|| {
            Error::UnsupportedShape("motif optimisation needs a rectangular lattice".into())
        })?;
        let bound = 0.5 * lx.min(ly) * (1.0 - FEASIBILITY_MARGIN);
        self.optimize_motif_radius_bounded(m, n, bound)
    }

    /// As [`optimize_motif_radius`](Self::optimize_motif_radius) over `(0, max_radius]`.
    ///
    /// `R·J1(κR)` is stationary where `J0(κR) = 0`, so the candidates are the
    /// J0 zeros inside the interval plus the upper bound.
    pub fn optimize_motif_radius_bounded(&self, m: i32, n: i32, max_radius: f64) -> Result<MotifOptimum> {
        if (m, n) == (0, 0) {
            return Err(Error::DcTerm);
        }
        let (lx, ly) = self.periods().ok_or_else(|| {
            Error::UnsupportedShape("motif optimisation needs a rectangular lattice".into())
        })?;
        if !(max_radius > 0.0) {
            return Err(Error::EmptyFeasibleInterval(format!(
                "radius bound {max_radius} um leaves no feasible motif"
            )));
        }
        let geometric_limit = 0.5 * lx.min(ly);
        if max_radius >= geometric_limit {
            return Err(Error::InvalidParameter {
                name: "max_radius",
                reason: format!("{max_radius} um reaches half the shorter period ({geometric_limit} um)"),
            });
        }
        let kappa = 2.0 * PI * ((m as f64 / lx).powi(2) + (n as f64 / ly).powi(2)).sqrt();

        let mut candidates: Vec<(f64, bool)> = bessel::j0_zeros_below(kappa * max_radius)
            .into_iter()
            .map(|x| (x / kappa, false))
            .filter(|(r, _)| *r <= max_radius)
            .collect();
        candidates.push((max_radius, true));

        let mut best: Option<MotifOptimum> = None;
        for (radius, at_boundary) in candidates {
            let lattice = self.with_motif(MotifShape::Circle { radius })?;
            let coefficient = lattice.fourier_coefficient_analytic(m, n)?;
            if best.as_ref().is_none_or(|b| coefficient.abs() > b.coefficient.abs()) {
                best = Some(MotifOptimum {
                    radius,
                    coefficient,
                    at_boundary,
                });
            }
        }
        best.ok_or_else(|| Error::Numeric("no optimisation candidates".into()))
    }

    /// Real-space ±1 map over `[0, width) × [0, height)` µm, sampled at pixel centres.
    ///
    /// Row `j` holds `y = (j + 0.5) / resolution`.
    pub fn render_domain_map(&self, width_um: f64, height_um: f64, pixels_per_um: f64) -> Result<DomainMap> {
        if !(width_um > 0.0 && height_um > 0.0 && pixels_per_um > 0.0) {
            return Err(Error::InvalidParameter {
                name: "window",
                reason: "window size and resolution must be positive".into(),
            });
        }
        let tol = 1e-9;
        let covers = match self.periods() {
            Some((lx, ly)) => width_um >= lx - tol && height_um >= ly - tol,
            None => width_um * height_um >= self.cell_area() * (1.0 - tol),
        };
        if !covers {
            return Err(Error::InvalidParameter {
                name: "window",
                reason: format!("{width_um} x {height_um} um does not cover one unit cell"),
            });
        }
        let width = (width_um * pixels_per_um).round() as usize;
        let height = (height_um * pixels_per_um).round() as usize;
        let pixels: Vec<i8> = (0..height)
            .into_par_iter()
            .flat_map_iter(|j| {
                let y = (j as f64 + 0.5) / pixels_per_um;
                (0..width).map(move |i| {
                    let x = (i as f64 + 0.5) / pixels_per_um;
                    self.sign_at(Vec2::new(x, y))
                })
            })
            .collect();

        let span_px = self.motif.min_width() * pixels_per_um;
        let warning = (span_px < 4.0).then(|| {
            format!("motif spans only {span_px:.2} pixels; increase the resolution")
        });
        Ok(DomainMap {
            width,
            height,
            pixels_per_um,
            pixels,
            warning,
        })
    }

    /// True iff `vector` lies within `tolerance` of `m·b₁ + n·b₂` for some
    /// `|m|, |n| ≤ 64`.
    pub fn has_lattice_point_at(&self, vector: Vec2, tolerance: f64) -> Result<bool> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: format!("must be positive, got {tolerance}"),
            });
        }
        let bound = LATTICE_SEARCH_BOUND;
        Ok((-bound..=bound).any(|m| {
            (-bound..=bound).any(|n| {
                let g = self.reciprocal_vector(m, n).as_vec();
                (g - vector).norm() <= tolerance
            })
        }))
    }

    /// Coefficient comparison rows for a list of orders.
    pub fn coefficient_table(&self, orders: &[(i32, i32)], grid_points_per_cell: usize) -> Result<Vec<CoefficientRow>> {
        orders
            .iter()
            .map(|&(m, n)| {
                let analytic = match self.motif {
                    MotifShape::Circle { .. } => self.fourier_coefficient_analytic(m, n)?,
                    MotifShape::Rectangle { .. } => self.fourier_coefficient_rectangle(m, n)?,
                };
                let numeric = self.fourier_coefficient_numeric(m, n, grid_points_per_cell)?;
                Ok(CoefficientRow {
                    m,
                    n,
                    analytic,
                    numeric,
                    abs_error: (analytic.abs() - numeric).abs(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotifOptimum {
    pub radius: f64,
    /// Signed closed-form coefficient at `radius`.
    pub coefficient: f64,
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub m: i32,
    pub n: i32,
    pub analytic: f64,
    pub numeric: f64,
    pub abs_error: f64,
}

/// Real-space poling sign map, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMap {
    pub width: usize,
    pub height: usize,
    pub pixels_per_um: f64,
    pub pixels: Vec<i8>,
    pub warning: Option<String>,
}

impl DomainMap {
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.pixels[j * self.width + i]
    }

    pub fn inverted_fraction(&self) -> f64 {
        self.pixels.iter().filter(|&&p| p < 0).count() as f64 / self.pixels.len() as f64
    }

    /// 8-bit grayscale bytes: −1 → 0, +1 → 255.
    pub fn to_gray(&self) -> Vec<u8> {
        self.pixels.iter().map(|&p| if p < 0 { 0 } else { 255 }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_lattice(radius: f64) -> NpcLattice {
        NpcLattice::rectangular(6.4, 13.46, MotifShape::Circle { radius }).unwrap()
    }

    #[test]
    fn reciprocal_vector_rectangular() {
        let g = paper_lattice(2.7).reciprocal_vector(2, 1);
        assert!((g.gx - 2.0 * PI * 2.0 / 6.4).abs() < 1e-14);
        assert!((g.gy - 2.0 * PI / 13.46).abs() < 1e-14);
        let zero = paper_lattice(2.7).reciprocal_vector(0, 0);
        assert_eq!((zero.gx, zero.gy), (0.0, 0.0));
    }

    #[test]
    fn reciprocal_vector_inversion() {
        let lat = NpcLattice::new(Vec2::new(5.0, 0.3), Vec2::new(1.7, 9.0), MotifShape::Circle { radius: 1.0 }).unwrap();
        for (m, n) in [(1, 2), (-3, 1), (4, -4)] {
            let g = lat.reciprocal_vector(m, n);
            let h = lat.reciprocal_vector(-m, -n);
            assert_eq!(g.gx, -h.gx);
            assert_eq!(g.gy, -h.gy);
        }
    }

    #[test]
    fn reciprocal_duality() {
        let lat = NpcLattice::new(Vec2::new(5.0, 0.3), Vec2::new(1.7, 9.0), MotifShape::Circle { radius: 1.0 }).unwrap();
        let (b1, b2) = lat.reciprocal_basis();
        assert!((lat.primitive_a().dot(b1) - 2.0 * PI).abs() < 1e-12);
        assert!(lat.primitive_a().dot(b2).abs() < 1e-12);
        assert!(lat.primitive_b().dot(b1).abs() < 1e-12);
        assert!((lat.primitive_b().dot(b2) - 2.0 * PI).abs() < 1e-12);

        let back = NpcLattice::from_reciprocal(b1, b2, lat.motif()).unwrap();
        assert!((back.primitive_a() - lat.primitive_a()).norm() < 1e-12);
        assert!((back.primitive_b() - lat.primitive_b()).norm() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_lattice_and_overlapping_motif() {
        assert!(NpcLattice::new(Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0), MotifShape::Circle { radius: 0.1 }).is_err());
        assert!(NpcLattice::rectangular(6.4, 13.46, MotifShape::Circle { radius: 3.2 }).is_err());
        assert!(NpcLattice::rectangular(6.4, 13.46, MotifShape::Rectangle { half_x: 3.3, half_y: 1.0 }).is_err());
        assert!(NpcLattice::rectangular(6.4, 13.46, MotifShape::Rectangle { half_x: 3.2, half_y: 6.73 }).is_ok());
    }

    #[test]
    fn analytic_coefficient_errors() {
        assert_eq!(paper_lattice(2.7).fourier_coefficient_analytic(0, 0), Err(Error::DcTerm));
        let rect = NpcLattice::rectangular(6.4, 13.46, MotifShape::Rectangle { half_x: 1.2, half_y: 1.2 }).unwrap();
        assert!(matches!(rect.fourier_coefficient_analytic(2, 1), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn analytic_vanishes_for_vanishing_motif() {
        let lat = paper_lattice(1e-9);
        for (m, n) in [(1, 0), (2, 1), (-1, 3)] {
            assert!(lat.fourier_coefficient_analytic(m, n).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_vanishes_at_bessel_zero() {
        let (m, n) = (2, 1);
        let kappa = 2.0 * PI * ((2.0 / 6.4f64).powi(2) + (1.0 / 13.46f64).powi(2)).sqrt();
        let radius = 3.831705970207512 / kappa;
        let c = paper_lattice(radius).fourier_coefficient_analytic(m, n).unwrap();
        assert!(c.abs() < 1e-6, "{c}");
    }

    #[test]
    fn analytic_parity() {
        let lat = paper_lattice(2.1);
        for (m, n) in [(1, 1), (2, -1), (3, 2)] {
            assert_eq!(
                lat.fourier_coefficient_analytic(m, n).unwrap(),
                lat.fourier_coefficient_analytic(-m, -n).unwrap()
            );
        }
    }

    #[test]
    fn numeric_refuses_coarse_grid() {
        assert_eq!(
            paper_lattice(2.7).fourier_coefficient_numeric(1, 1, 128),
            Err(Error::GridTooCoarse { requested: 128, minimum: 256 })
        );
    }

    #[test]
    fn numeric_full_cell_rectangle_has_no_harmonics() {
        let lat = NpcLattice::rectangular(6.4, 13.46, MotifShape::Rectangle { half_x: 3.2, half_y: 6.73 }).unwrap();
        assert_eq!(lat.fill_factor(), 1.0);
        for (m, n) in [(1, 0), (0, 1), (2, 1), (-3, 2)] {
            assert!(lat.fourier_coefficient_numeric(m, n, 256).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fill_factors() {
        assert!((paper_lattice(2.7).fill_factor() - PI * 2.7 * 2.7 / (6.4 * 13.46)).abs() < 1e-15);
        assert!((paper_lattice(2.7).fill_factor() - 0.266).abs() < 5e-4);
        let r_half = (0.5 * 6.4 * 6.4 / PI).sqrt();
        let sq = NpcLattice::rectangular(6.4, 6.4, MotifShape::Circle { radius: r_half }).unwrap();
        assert!((sq.fill_factor() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn optimum_on_first_lobe_and_at_boundary() {
        let lat = paper_lattice(1.0);
        let kappa = 2.0 * PI * ((2.0 / 6.4f64).powi(2) + (1.0 / 13.46f64).powi(2)).sqrt();
        // Interval holding only the first maximum of x·J1(x).
        let opt = lat.optimize_motif_radius_bounded(2, 1, 4.0 / kappa).unwrap();
        assert!((opt.radius * kappa - 2.404825557695773).abs() < 1e-10);
        assert!(!opt.at_boundary);
        // Bound below the unconstrained optimum.
        let opt = lat.optimize_motif_radius_bounded(2, 1, 1.5 / kappa).unwrap();
        assert_eq!(opt.radius, 1.5 / kappa);
        assert!(opt.at_boundary);
        assert!(matches!(lat.optimize_motif_radius_bounded(2, 1, 0.0), Err(Error::EmptyFeasibleInterval(_))));
    }

    #[test]
    fn optimum_is_feasible_and_consistent() {
        let lat = paper_lattice(1.0);
        let opt = lat.optimize_motif_radius(2, 1).unwrap();
        assert!(2.0 * opt.radius < 6.4);
        let direct = lat
            .with_motif(MotifShape::Circle { radius: opt.radius })
            .unwrap()
            .fourier_coefficient_analytic(2, 1)
            .unwrap();
        assert_eq!(direct, opt.coefficient);
    }

    #[test]
    fn lattice_point_search() {
        let lat = paper_lattice(2.7);
        let g21 = lat.reciprocal_vector(2, 1).as_vec();
        let g2m1 = lat.reciprocal_vector(2, -1).as_vec();
        assert!(lat.has_lattice_point_at((g21 + g2m1).scale(0.5), 1e-3).unwrap());
        assert!(lat.has_lattice_point_at(Vec2::ZERO, 1e-9).unwrap());
        assert!(!lat.has_lattice_point_at(Vec2::new(0.3, 0.1), 1e-3).unwrap());
        assert!(lat.has_lattice_point_at(Vec2::ZERO, 0.0).is_err());
    }

    #[test]
    fn domain_map_warning_for_low_resolution() {
        let lat = paper_lattice(2.7);
        let map = lat.render_domain_map(6.4, 13.46, 0.5).unwrap();
        assert!(map.warning.is_some());
        let map = lat.render_domain_map(6.4, 13.46, 10.0).unwrap();
        assert!(map.warning.is_none());
        assert!(lat.render_domain_map(3.0, 13.46, 10.0).is_err());
    }
}
