//! Logarithmic potential `V[ω]` of a curvature measure and the harmonic term
//! `h`, the two ingredients of the conformal factor `e^{V[ω] + h}`.
//!
//! Atoms and uniform layers evaluate in closed form (Newton's layer rule:
//! constant inside the circle, radial outside). Piecewise layer densities go
//! through adaptive quadrature of the log kernel. Cell densities use the
//! exact antiderivative of `∬ ln|z-ξ| dλ(ξ)` over rectangles, with
//! subdivision on the cells clipped by the chart circle.

use crate::geom::{self, Rect, RectDisc};
use crate::measure::{CurvatureMeasure, LayerDensity, CHART_RADIUS};
use crate::quadrature::adaptive_simpson;
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

/// Relative tolerance for kernel quadrature on non-closed-form parts.
pub const QUAD_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("potential evaluated exactly at the atom ({0}, {1})")]
    AtAtom(f64, f64),
    #[error("harmonic polynomial degree is capped at 8")]
    DegreeTooHigh,
    #[error("flux representation only evaluates strictly inside its circle")]
    OutsideFluxDomain,
    #[error("harmonic term has neither closed form nor flux data")]
    EmptyHarmonicTerm,
}

/// `V[ω](z) = ∬ (-1/2π) ln|z-ξ| dω(ξ)`.
pub fn eval_potential(mu: &CurvatureMeasure, z: Complex64) -> Result<f64, PotentialError> {
    let mut v = 0.0;
    for atom in mu.atoms() {
        let d = (z - atom.position).norm();
        if d == 0.0 {
            return Err(PotentialError::AtAtom(atom.position.re, atom.position.im));
        }
        v += -atom.mass / TAU * d.ln();
    }
    for layer in mu.layers() {
        v += layer_potential(layer, z);
    }
    if let Some(cells) = mu.density() {
        let origin = Complex64::new(0.0, 0.0);
        for (rect, value) in cells.cells() {
            v += -value / TAU * log_integral_clipped(&rect, origin, CHART_RADIUS, z, 12);
        }
    }
    Ok(v)
}

fn layer_potential(layer: &crate::measure::CircleLayer, z: Complex64) -> f64 {
    let rel = z - layer.center;
    let rho = rel.norm();
    match layer.density() {
        LayerDensity::Uniform => -layer.total_mass() / TAU * rho.max(layer.radius).ln(),
        LayerDensity::PiecewiseConst(values) => {
            let m = values.len();
            let width = TAU / m as f64;
            let r = layer.radius;
            let kernel = |phi: f64| {
                let xi = layer.center + Complex64::new(r * phi.cos(), r * phi.sin());
                (z - xi).norm().ln()
            };
            // split sectors at the closest-approach angle when z is near the circle
            let near_angle = rel.arg();
            let mut v = 0.0;
            for (i, value) in values.iter().enumerate() {
                if *value == 0.0 {
                    continue;
                }
                let a0 = layer.phase + i as f64 * width;
                let a1 = a0 + width;
                let split = {
                    let shifted = (near_angle - a0).rem_euclid(TAU);
                    (shifted < width).then(|| a0 + shifted)
                };
                let integral = match split {
                    Some(s) if (rho - r).abs() < 0.5 * r => {
                        adaptive_simpson(&kernel, a0, s, QUAD_REL_TOL)
                            + adaptive_simpson(&kernel, s, a1, QUAD_REL_TOL)
                    }
                    _ => adaptive_simpson(&kernel, a0, a1, QUAD_REL_TOL),
                };
                v += -value * r / TAU * integral;
            }
            v
        }
    }
}

/// Antiderivative `P` with `∂²P/∂x∂y = ln √(x²+y²)`; continuous across the
/// axes with `P(0,·) = P(·,0) = 0`.
fn log_primitive(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    let r2 = x * x + y * y;
    0.5 * x * y * r2.ln() - 1.5 * x * y
        + 0.5 * x * x * (y / x).atan()
        + 0.5 * y * y * (x / y).atan()
}

/// Exact `∬_rect ln|ξ - z| dλ(ξ)`; valid also when `z` lies inside the
/// rectangle (the kernel is integrable and `P` extends continuously).
pub fn log_rect_integral(rect: &Rect, z: Complex64) -> f64 {
    let x0 = rect.x0 - z.re;
    let x1 = rect.x1 - z.re;
    let y0 = rect.y0 - z.im;
    let y1 = rect.y1 - z.im;
    log_primitive(x1, y1) - log_primitive(x0, y1) - log_primitive(x1, y0)
        + log_primitive(x0, y0)
}

/// `∬_{rect ∩ disc(c,R)} ln|ξ - z| dλ(ξ)`, by subdivision with closed-form
/// leaves on rectangles fully inside the disc.
fn log_integral_clipped(rect: &Rect, c: Complex64, radius: f64, z: Complex64, depth: u32) -> f64 {
    match geom::classify_rect_disc(rect, c, radius) {
        RectDisc::Outside => 0.0,
        RectDisc::Inside => log_rect_integral(rect, z),
        RectDisc::Crossing => {
            if depth == 0 || rect.area() < 1e-12 {
                let frac = geom::rect_disc_area(rect, c, radius) / rect.area();
                return frac * log_rect_integral(rect, z);
            }
            rect.split()
                .iter()
                .map(|q| log_integral_clipped(q, c, radius, z, depth - 1))
                .sum()
        }
    }
}

/// Explicit harmonic function on `D(1/2)`: real part of a complex polynomial
/// of degree ≤ 8, optionally carried by its circle-flux representation
/// `h(z) = h(0) + V[μ_h](z)` with `μ_h` supported on `∂D(r)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicTerm {
    /// Coefficients `(a_j, b_j)` of `Σ_j Re((a_j + i b_j) z^j)`.
    coeffs: Vec<(f64, f64)>,
    flux: Option<FluxRep>,
}

/// Circle-supported measure representing a harmonic function through its
/// normal derivative on `∂D(radius)`: a trigonometric per-arclength density
/// `Σ_j c_j cos(jφ) + s_j sin(jφ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxRep {
    pub base: f64,
    pub radius: f64,
    /// `(c_j, s_j)` for `j = 0, 1, ...`; `s_0` is unused.
    pub density: Vec<(f64, f64)>,
}

impl FluxRep {
    /// Potential `V[μ_h](z)` of the trigonometric layer, closed form via the
    /// Fourier expansion of the log kernel (circle centered at the origin).
    pub fn layer_potential(&self, z: Complex64) -> f64 {
        let rho = z.norm();
        let theta = z.arg();
        let r = self.radius;
        let mut v = 0.0;
        if let Some((c0, _)) = self.density.first() {
            v += -r * c0 * rho.max(r).ln();
        }
        let ratio = if rho < r { rho / r } else { r / rho };
        let mut pw = ratio;
        for (j, (cj, sj)) in self.density.iter().enumerate().skip(1) {
            let jf = j as f64;
            v += 0.5 * r * pw * (cj * (jf * theta).cos() + sj * (jf * theta).sin()) / jf;
            pw *= ratio;
        }
        v
    }

    /// Total mass of `μ_h` (zero for genuine harmonic flux data).
    pub fn total_mass(&self) -> f64 {
        self.density.first().map_or(0.0, |(c0, _)| TAU * self.radius * c0)
    }

    /// Density per arclength at angle `phi`, for quadrature oracles.
    pub fn density_at(&self, phi: f64) -> f64 {
        self.density
            .iter()
            .enumerate()
            .map(|(j, (c, s))| c * (j as f64 * phi).cos() + s * (j as f64 * phi).sin())
            .sum()
    }
}

impl HarmonicTerm {
    pub fn zero() -> Self {
        HarmonicTerm::default()
    }

    pub fn constant(c: f64) -> Self {
        HarmonicTerm { coeffs: vec![(c, 0.0)], flux: None }
    }

    pub fn poly(coeffs: Vec<(f64, f64)>) -> Result<Self, PotentialError> {
        if coeffs.len() > 9 {
            return Err(PotentialError::DegreeTooHigh);
        }
        Ok(HarmonicTerm { coeffs, flux: None })
    }

    /// Flux-only representation.
    pub fn from_flux(flux: FluxRep) -> Self {
        HarmonicTerm { coeffs: vec![], flux: Some(flux) }
    }

    pub fn coeffs(&self) -> &[(f64, f64)] {
        &self.coeffs
    }

    pub fn flux(&self) -> Option<&FluxRep> {
        self.flux.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.flux.is_none() && self.coeffs.iter().all(|(a, b)| *a == 0.0 && *b == 0.0)
    }

    /// Attaches the flux representation on `∂D(radius)` derived from the
    /// polynomial coefficients: `μ_h = 2 (∂h/∂ν) |dξ|`, which makes
    /// `h(z) = h(0) + V[μ_h](z)` exact for `|z| < radius`.
    pub fn with_flux(mut self, radius: f64) -> Result<Self, PotentialError> {
        if self.coeffs.is_empty() {
            return Err(PotentialError::EmptyHarmonicTerm);
        }
        assert!(radius > 0.0 && radius < CHART_RADIUS);
        let mut density = vec![(0.0, 0.0); self.coeffs.len()];
        for (j, (a, b)) in self.coeffs.iter().enumerate().skip(1) {
            let jf = j as f64;
            let scale = 2.0 * jf * radius.powi(j as i32 - 1);
            density[j] = (scale * a, -scale * b);
        }
        let base = self.coeffs[0].0;
        self.flux = Some(FluxRep { base, radius, density });
        Ok(self)
    }

    /// Evaluates `h(z)`: closed form when coefficients are present, flux
    /// reconstruction `h(0) + V[μ_h](z)` otherwise (only inside `D(r)`).
    pub fn eval(&self, z: Complex64) -> Result<f64, PotentialError> {
        if !self.coeffs.is_empty() {
            return Ok(self.eval_closed(z));
        }
        match &self.flux {
            Some(flux) => {
                if z.norm() >= flux.radius {
                    Err(PotentialError::OutsideFluxDomain)
                } else {
                    Ok(flux.base + flux.layer_potential(z))
                }
            }
            None => Ok(0.0),
        }
    }

    fn eval_closed(&self, z: Complex64) -> f64 {
        let mut sum = 0.0;
        let mut zp = Complex64::new(1.0, 0.0);
        for (a, b) in &self.coeffs {
            sum += a * zp.re - b * zp.im;
            zp *= z;
        }
        sum
    }

    /// Flux-route evaluation regardless of stored coefficients; test hook for
    /// the representation-consistency invariant.
    pub fn eval_via_flux(&self, z: Complex64) -> Result<f64, PotentialError> {
        match &self.flux {
            Some(flux) if z.norm() < flux.radius => Ok(flux.base + flux.layer_potential(z)),
            Some(_) => Err(PotentialError::OutsideFluxDomain),
            None => Err(PotentialError::EmptyHarmonicTerm),
        }
    }
}
