//! Signed curvature measures on the closed half-disc: Dirac atoms, circular
//! layers and piecewise-constant cell densities.
//!
//! The class is closed under positive/negative part decomposition, admits
//! exact ball-mass queries and carries enough structure for closed-form or
//! fast potential evaluation downstream.

use crate::geom::{self, Rect};
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

/// Radius of the chart disc `D(1/2)`.
pub const CHART_RADIUS: f64 = 0.5;

/// Slack used when checking membership in the closed chart disc.
const DOMAIN_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("atom at ({0}, {1}) lies outside the closed chart disc")]
    AtomOutsideChart(f64, f64),
    #[error("atom mass must be finite and nonzero")]
    BadAtomMass,
    #[error("layer circle must lie inside the closed chart disc")]
    LayerOutsideChart,
    #[error("layer radius must be positive")]
    BadLayerRadius,
    #[error("piecewise layer needs at least one sector value")]
    EmptyLayerDensity,
    #[error("cell density grid must be nonempty with n*n finite values")]
    BadCellGrid,
    #[error("ball radius must be positive")]
    NonPositiveRadius,
    #[error("layer discretization needs m >= 1")]
    BadDiscretization,
}

/// Dirac mass `k δ_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: Complex64,
    pub mass: f64,
}

/// Density profile of a circle-supported layer, per unit arclength.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerDensity {
    /// Constant density carrying the given total mass.
    Uniform,
    /// Piecewise-constant values on equal angular sectors; sector `i` covers
    /// angles `[phase + i·2π/m, phase + (i+1)·2π/m)`.
    PiecewiseConst(Vec<f64>),
}

/// Measure supported on the circle `|z - center| = radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleLayer {
    pub center: Complex64,
    pub radius: f64,
    pub phase: f64,
    density: LayerDensity,
    total: f64,
}

impl CircleLayer {
    pub fn uniform(center: Complex64, radius: f64, total: f64) -> Result<Self, MeasureError> {
        Self::validated(center, radius, 0.0, LayerDensity::Uniform, total)
    }

    pub fn piecewise(
        center: Complex64,
        radius: f64,
        phase: f64,
        values: Vec<f64>,
    ) -> Result<Self, MeasureError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(MeasureError::EmptyLayerDensity);
        }
        let total = radius * values.iter().sum::<f64>() * TAU / values.len() as f64;
        Self::validated(center, radius, phase, LayerDensity::PiecewiseConst(values), total)
    }

    fn validated(
        center: Complex64,
        radius: f64,
        phase: f64,
        density: LayerDensity,
        total: f64,
    ) -> Result<Self, MeasureError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(MeasureError::BadLayerRadius);
        }
        if center.norm() + radius > CHART_RADIUS + DOMAIN_EPS {
            return Err(MeasureError::LayerOutsideChart);
        }
        Ok(CircleLayer { center, radius, phase, density, total })
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn density(&self) -> &LayerDensity {
        &self.density
    }

    /// Per-arclength density at angle `phi`.
    pub fn density_at(&self, phi: f64) -> f64 {
        match &self.density {
            LayerDensity::Uniform => self.total / (TAU * self.radius),
            LayerDensity::PiecewiseConst(values) => {
                let m = values.len() as f64;
                let rel = (phi - self.phase).rem_euclid(TAU);
                let idx = ((rel / TAU * m) as usize).min(values.len() - 1);
                values[idx]
            }
        }
    }

    fn positive_part(&self) -> Option<CircleLayer> {
        match &self.density {
            LayerDensity::Uniform => (self.total > 0.0).then(|| self.clone()),
            LayerDensity::PiecewiseConst(values) => {
                if values.iter().all(|v| *v <= 0.0) {
                    return None;
                }
                let pos: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
                Some(
                    CircleLayer::piecewise(self.center, self.radius, self.phase, pos)
                        .expect("positive part of a valid layer is valid"),
                )
            }
        }
    }

    fn negated(&self) -> CircleLayer {
        let density = match &self.density {
            LayerDensity::Uniform => LayerDensity::Uniform,
            LayerDensity::PiecewiseConst(values) => {
                LayerDensity::PiecewiseConst(values.iter().map(|v| -v).collect())
            }
        };
        CircleLayer { density, total: -self.total, ..self.clone() }
    }

    /// Mass of the part of the layer inside the open ball `B(c, r)`.
    pub fn mass_in_ball(&self, c: Complex64, r: f64) -> f64 {
        let Some((mid, half)) = geom::circle_in_disc_arc(self.center, self.radius, c, r) else {
            return 0.0;
        };
        if half >= std::f64::consts::PI {
            return self.total;
        }
        match &self.density {
            LayerDensity::Uniform => self.total * half / std::f64::consts::PI,
            LayerDensity::PiecewiseConst(values) => {
                let m = values.len();
                let width = TAU / m as f64;
                let mut mass = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let a0 = self.phase + i as f64 * width;
                    let overlap = geom::circular_overlap(a0, a0 + width, mid, half);
                    mass += v * overlap * self.radius;
                }
                mass
            }
        }
    }

    /// Replaces the layer by `m` equal atoms at equally spaced angles,
    /// starting at the layer's phase. Total mass is preserved exactly.
    pub fn discretize(&self, m: usize) -> Result<CurvatureMeasure, MeasureError> {
        if m < 1 {
            return Err(MeasureError::BadDiscretization);
        }
        let each = self.total / m as f64;
        if each == 0.0 {
            return CurvatureMeasure::new(vec![], vec![], None);
        }
        let atoms = (0..m)
            .map(|i| {
                let phi = self.phase + i as f64 * TAU / m as f64;
                Atom {
                    position: self.center
                        + Complex64::new(self.radius * phi.cos(), self.radius * phi.sin()),
                    mass: each,
                }
            })
            .collect();
        CurvatureMeasure::new(atoms, vec![], None)
    }
}

/// Piecewise-constant density on the uniform `n × n` grid over the bounding
/// square `[-1/2, 1/2]²`, restricted to the chart disc.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDensity {
    n: usize,
    values: Vec<f64>,
}

impl CellDensity {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, MeasureError> {
        if n == 0 || values.len() != n * n || values.iter().any(|v| !v.is_finite()) {
            return Err(MeasureError::BadCellGrid);
        }
        Ok(CellDensity { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_rect(&self, ix: usize, iy: usize) -> Rect {
        let h = 1.0 / self.n as f64;
        Rect::new(
            -0.5 + ix as f64 * h,
            -0.5 + (ix + 1) as f64 * h,
            -0.5 + iy as f64 * h,
            -0.5 + (iy + 1) as f64 * h,
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.n + ix]
    }

    /// Iterates over `(rect, value)` for cells meeting the chart disc.
    pub fn cells(&self) -> impl Iterator<Item = (Rect, f64)> + '_ {
        let origin = Complex64::new(0.0, 0.0);
        (0..self.n).flat_map(move |iy| {
            (0..self.n).filter_map(move |ix| {
                let rect = self.cell_rect(ix, iy);
                let v = self.value(ix, iy);
                (v != 0.0 && rect.dist_to(origin) < CHART_RADIUS).then_some((rect, v))
            })
        })
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> CellDensity {
        CellDensity { n: self.n, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    fn signed_total(&self, part: Part) -> f64 {
        let origin = Complex64::new(0.0, 0.0);
        let mut total = 0.0;
        for (rect, v) in self.cells() {
            let contrib = match part {
                Part::Plus => v.max(0.0),
                Part::Minus => (-v).max(0.0),
                Part::Signed => v,
            };
            if contrib != 0.0 {
                total += contrib * geom::rect_disc_area(&rect, origin, CHART_RADIUS);
            }
        }
        total
    }

    fn mass_in_ball(&self, c: Complex64, r: f64, part: Part) -> f64 {
        let origin = Complex64::new(0.0, 0.0);
        let mut total = 0.0;
        for (rect, v) in self.cells() {
            let contrib = match part {
                Part::Plus => v.max(0.0),
                Part::Minus => (-v).max(0.0),
                Part::Signed => v,
            };
            if contrib == 0.0 {
                continue;
            }
            let overlap = geom::rect_two_discs_area(&rect, origin, CHART_RADIUS, c, r, 18);
            total += contrib * overlap;
        }
        total
    }
}

/// Which part of the signed measure a query addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Plus,
    Minus,
    Signed,
}

/// Signed Radon measure `ω = ω⁺ - ω⁻` on the closed chart disc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvatureMeasure {
    atoms: Vec<Atom>,
    layers: Vec<CircleLayer>,
    density: Option<CellDensity>,
}

impl CurvatureMeasure {
    /// Builds a measure, merging exactly coincident atoms and dropping the
    /// ones whose net mass cancels to zero.
    pub fn new(
        atoms: Vec<Atom>,
        layers: Vec<CircleLayer>,
        density: Option<CellDensity>,
    ) -> Result<Self, MeasureError> {
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if !atom.mass.is_finite() || atom.mass == 0.0 {
                return Err(MeasureError::BadAtomMass);
            }
            if atom.position.norm() > CHART_RADIUS + DOMAIN_EPS {
                return Err(MeasureError::AtomOutsideChart(atom.position.re, atom.position.im));
            }
            match merged.iter_mut().find(|a| a.position == atom.position) {
                Some(existing) => existing.mass += atom.mass,
                None => merged.push(atom),
            }
        }
        merged.retain(|a| a.mass != 0.0);
        Ok(CurvatureMeasure { atoms: merged, layers, density })
    }

    pub fn empty() -> Self {
        CurvatureMeasure::default()
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        Self::new(atoms, vec![], None)
    }

    pub fn single_atom(position: Complex64, mass: f64) -> Result<Self, MeasureError> {
        Self::from_atoms(vec![Atom { position, mass }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn layers(&self) -> &[CircleLayer] {
        &self.layers
    }

    pub fn density(&self) -> Option<&CellDensity> {
        self.density.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.layers.is_empty() && self.density.is_none()
    }

    /// Splits into non-negative measures `(ω⁺, ω⁻)` with `ω = ω⁺ - ω⁻`,
    /// componentwise on atoms, layer sectors and cells.
    pub fn decompose(&self) -> (CurvatureMeasure, CurvatureMeasure) {
        let plus_atoms: Vec<Atom> = self.atoms.iter().copied().filter(|a| a.mass > 0.0).collect();
        let minus_atoms: Vec<Atom> = self
            .atoms
            .iter()
            .filter(|a| a.mass < 0.0)
            .map(|a| Atom { position: a.position, mass: -a.mass })
            .collect();
        let plus_layers: Vec<CircleLayer> =
            self.layers.iter().filter_map(|l| l.positive_part()).collect();
        let minus_layers: Vec<CircleLayer> =
            self.layers.iter().filter_map(|l| l.negated().positive_part()).collect();
        let plus_density = self.density.as_ref().map(|d| d.map_values(|v| v.max(0.0)));
        let minus_density = self.density.as_ref().map(|d| d.map_values(|v| (-v).max(0.0)));
        let plus = CurvatureMeasure { atoms: plus_atoms, layers: plus_layers, density: plus_density };
        let minus =
            CurvatureMeasure { atoms: minus_atoms, layers: minus_layers, density: minus_density };
        (plus, minus)
    }

    /// Total mass of the requested part over the whole chart.
    pub fn total(&self, part: Part) -> f64 {
        let mut t = 0.0;
        for a in &self.atoms {
            t += match part {
                Part::Plus => a.mass.max(0.0),
                Part::Minus => (-a.mass).max(0.0),
                Part::Signed => a.mass,
            };
        }
        for l in &self.layers {
            t += match (&l.density, part) {
                (LayerDensity::Uniform, Part::Plus) => l.total.max(0.0),
                (LayerDensity::Uniform, Part::Minus) => (-l.total).max(0.0),
                (_, Part::Signed) => l.total,
                (LayerDensity::PiecewiseConst(values), p) => {
                    let width = TAU / values.len() as f64 * l.radius;
                    values
                        .iter()
                        .map(|v| match p {
                            Part::Plus => v.max(0.0),
                            Part::Minus => (-v).max(0.0),
                            Part::Signed => unreachable!(),
                        })
                        .sum::<f64>()
                        * width
                }
            };
        }
        if let Some(d) = &self.density {
            t += d.signed_total(part);
        }
        t
    }

    /// Mass of the requested part inside the open Euclidean ball
    /// `B(center, radius)`. Atoms exactly on the boundary are excluded;
    /// cells are counted by exact overlap area.
    pub fn ball_mass(
        &self,
        center: Complex64,
        radius: f64,
        part: Part,
    ) -> Result<f64, MeasureError> {
        if !(radius > 0.0) {
            return Err(MeasureError::NonPositiveRadius);
        }
        let mut t = 0.0;
        for a in &self.atoms {
            if (a.position - center).norm() < radius {
                t += match part {
                    Part::Plus => a.mass.max(0.0),
                    Part::Minus => (-a.mass).max(0.0),
                    Part::Signed => a.mass,
                };
            }
        }
        for l in &self.layers {
            match part {
                Part::Signed => t += l.mass_in_ball(center, radius),
                Part::Plus => {
                    if let Some(p) = l.positive_part() {
                        t += p.mass_in_ball(center, radius);
                    }
                }
                Part::Minus => {
                    if let Some(p) = l.negated().positive_part() {
                        t += p.mass_in_ball(center, radius);
                    }
                }
            }
        }
        if let Some(d) = &self.density {
            t += d.mass_in_ball(center, radius, part);
        }
        Ok(t)
    }

    /// Largest point mass of `ω⁺`, i.e. `sup_z ω⁺({z})`.
    pub fn max_atom_plus(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).fold(0.0, f64::max)
    }

    /// True iff every point carries `ω⁺({z}) < 2π`, the no-cusp criterion
    /// under which the induced length metric is a distance.
    pub fn no_cusp(&self) -> bool {
        self.max_atom_plus() < TAU
    }

    /// Atom positions lying exactly on the chart boundary circle.
    pub fn has_boundary_atoms(&self) -> bool {
        self.atoms.iter().any(|a| (a.position.norm() - CHART_RADIUS).abs() <= DOMAIN_EPS)
    }

    /// Merges two measures (used by sweep generators and the flux algebra).
    pub fn sum(&self, other: &CurvatureMeasure) -> Result<CurvatureMeasure, MeasureError> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut layers = self.layers.clone();
        layers.extend_from_slice(&other.layers);
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(a), Some(b)) => {
                if a.n != b.n {
                    return Err(MeasureError::BadCellGrid);
                }
                Some(CellDensity {
                    n: a.n,
                    values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
                })
            }
        };
        CurvatureMeasure::new(atoms, layers, density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn decompose_splits_atom_signs() {
        let mu = CurvatureMeasure::from_atoms(vec![
            Atom { position: c(0.0, 0.0), mass: PI },
            Atom { position: c(0.3, 0.0), mass: -PI / 2.0 },
        ])
        .unwrap();
        let (plus, minus) = mu.decompose();
        assert!((plus.total(Part::Plus) - PI).abs() < 1e-15);
        assert!((minus.total(Part::Plus) - PI / 2.0).abs() < 1e-15);
        assert_eq!(plus.total(Part::Minus), 0.0);
        assert_eq!(minus.total(Part::Minus), 0.0);
    }

    #[test]
    fn constant_negative_density_totals_quarter_pi() {
        let d = CellDensity::new(16, vec![-1.0; 256]).unwrap();
        let mu = CurvatureMeasure::new(vec![], vec![], Some(d)).unwrap();
        assert!((mu.total(Part::Minus) - PI / 4.0).abs() < 1e-12);
        assert_eq!(mu.total(Part::Plus), 0.0);
    }

    #[test]
    fn empty_measure_has_zero_totals() {
        let mu = CurvatureMeasure::empty();
        assert_eq!(mu.total(Part::Plus), 0.0);
        assert_eq!(mu.total(Part::Minus), 0.0);
        let (p, m) = mu.decompose();
        assert!(p.is_empty() && m.is_empty());
    }

    #[test]
    fn ball_mass_counts_atoms_strictly_inside() {
        let mu = CurvatureMeasure::from_atoms(vec![
            Atom { position: c(0.0, 0.0), mass: PI },
            Atom { position: c(0.3, 0.0), mass: -PI / 2.0 },
        ])
        .unwrap();
        assert!((mu.ball_mass(c(0.0, 0.0), 0.1, Part::Plus).unwrap() - PI).abs() < 1e-15);
        let plus = mu.ball_mass(c(0.3, 0.0), 0.05, Part::Plus).unwrap();
        let minus = mu.ball_mass(c(0.3, 0.0), 0.05, Part::Minus).unwrap();
        assert_eq!(plus, 0.0);
        assert!((minus - PI / 2.0).abs() < 1e-15);
        // boundary atom excluded (open ball, dyadic values keep it exact)
        let nu = CurvatureMeasure::single_atom(c(0.25, 0.0), -1.0).unwrap();
        let b = nu.ball_mass(c(0.125, 0.0), 0.125, Part::Minus).unwrap();
        assert_eq!(b, 0.0);
        let b = nu.ball_mass(c(0.125, 0.0), 0.1250001, Part::Minus).unwrap();
        assert_eq!(b, 1.0);
        assert!(mu.ball_mass(c(0.0, 0.0), 0.0, Part::Plus).is_err());
    }

    #[test]
    fn layer_fully_inside_ball_counts_total() {
        let layer = CircleLayer::uniform(c(0.0, 0.0), 0.2, PI).unwrap();
        let mu = CurvatureMeasure::new(vec![], vec![layer], None).unwrap();
        let got = mu.ball_mass(c(0.0, 0.0), 0.21, Part::Plus).unwrap();
        assert!((got - PI).abs() < 1e-15);
        // ball inside the hole sees nothing
        let got = mu.ball_mass(c(0.0, 0.0), 0.19, Part::Plus).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn no_cusp_criterion() {
        let cusp = CurvatureMeasure::single_atom(c(0.0, 0.0), TAU).unwrap();
        assert!(!cusp.no_cusp());
        let near = CurvatureMeasure::single_atom(c(0.0, 0.0), TAU - 0.1).unwrap();
        assert!(near.no_cusp());
        let negative = CurvatureMeasure::single_atom(c(0.0, 0.0), -10.0 * PI).unwrap();
        assert!(negative.no_cusp());
        // coincident atoms merge before the check
        let merged = CurvatureMeasure::from_atoms(vec![
            Atom { position: c(0.1, 0.0), mass: 1.5 * PI },
            Atom { position: c(0.1, 0.0), mass: PI },
        ])
        .unwrap();
        assert!(!merged.no_cusp());
    }

    #[test]
    fn discretize_layer_basic_cases() {
        let layer = CircleLayer::uniform(c(0.0, 0.0), 0.25, PI).unwrap();
        let one = layer.discretize(1).unwrap();
        assert_eq!(one.atoms().len(), 1);
        assert!((one.atoms()[0].mass - PI).abs() < 1e-15);
        assert!((one.atoms()[0].position.norm() - 0.25).abs() < 1e-15);

        let four = layer.discretize(4).unwrap();
        assert_eq!(four.atoms().len(), 4);
        for (i, a) in four.atoms().iter().enumerate() {
            assert!((a.mass - PI / 4.0).abs() < 1e-15);
            let expect = 0.25
                * Complex64::new(
                    (i as f64 * PI / 2.0).cos(),
                    (i as f64 * PI / 2.0).sin(),
                );
            assert!((a.position - expect).norm() < 1e-15);
        }

        let zero = CircleLayer::uniform(c(0.0, 0.0), 0.25, 0.0).unwrap();
        assert!(zero.discretize(3).unwrap().is_empty());
        assert!(layer.discretize(0).is_err());
    }
}
