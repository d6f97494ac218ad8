//! The singular metric `g = e^{2V[ω] + 2h} |dz|²` on the chart disc:
//! curve lengths, intrinsic distance estimates, areas and metric balls.

use crate::cone;
use crate::geom;
use crate::grid::{DistanceField, GridGraph};
use crate::measure::{CurvatureMeasure, CHART_RADIUS};
use crate::potential::{eval_potential, HarmonicTerm, PotentialError};
use crate::quad2d::{self, Singular};
use crate::quadrature::{adaptive_simpson, power_endpoint};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Relative tolerance of curve-length quadrature.
pub const LENGTH_REL_TOL: f64 = 1e-6;
/// Relative tolerance of area quadrature.
pub const AREA_REL_TOL: f64 = 1e-5;
/// Coarsest refinement level used by distance queries.
pub const MIN_LEVEL: u32 = 3;

/// Distance of an atom to a segment below which the segment is treated as
/// passing exactly through the atom.
const ON_SEGMENT_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("closed-boundary mode forces a zero harmonic term")]
    ClosedModeHarmonic,
    #[error("metric queries need a harmonic term evaluable on the whole chart")]
    FluxOnlyHarmonic,
    #[error("point ({0}, {1}) is outside the mode's domain")]
    OutsideDomain(f64, f64),
    #[error("endpoint carries a curvature atom of mass >= 2π (cusp, Prop-1.4 violation)")]
    CuspEndpoint,
    #[error("region contains a cusp atom; area diverges")]
    DivergentArea,
    #[error("a polyline needs at least two vertices, consecutive ones distinct")]
    DegenerateCurve,
    #[error("region must lie within the closed chart disc")]
    RegionOutsideChart,
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Whether geodesics may touch the chart boundary circle: `Open` realizes
/// `d_{ω,h}` on `D(1/2)`, `Closed` realizes `d̄_{ω,0}` on the closed disc
/// (and forces `h = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    Open,
    Closed,
}

/// Polyline with the implied constant-speed parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Complex64>,
}

impl PolyCurve {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self, MetricError> {
        if vertices.len() < 2 || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(MetricError::DegenerateCurve);
        }
        if vertices.iter().any(|v| v.norm() > CHART_RADIUS + 1e-12) {
            return Err(MetricError::OutsideDomain(vertices[0].re, vertices[0].im));
        }
        Ok(PolyCurve { vertices })
    }

    pub fn segment(a: Complex64, b: Complex64) -> Result<Self, MetricError> {
        Self::new(vec![a, b])
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }
}

/// Region for area queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disc { center: Complex64, radius: f64 },
    Chart,
}

/// Per-level outcome of a distance query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEstimate {
    pub level: u32,
    /// raw shortest-path value on the grid graph
    pub graph_value: f64,
    /// after corner-shortcut smoothing (and the direct-segment candidate)
    pub value: f64,
}

/// Distance estimate with its refinement history. Estimates are upper
/// bounds on the true infimum, up to quadrature tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    pub per_level: Vec<LevelEstimate>,
    pub estimate: f64,
    /// Richardson extrapolation assuming first-order level convergence.
    pub extrapolated: Option<f64>,
    /// set when the measure carries atoms exactly on the chart boundary
    pub boundary_atoms: bool,
}

/// The singular conformal metric, immutable after construction; grid graphs
/// are built lazily per level and shared between queries.
pub struct SingularMetric {
    measure: CurvatureMeasure,
    harmonic: HarmonicTerm,
    mode: BoundaryMode,
    no_cusp: bool,
    grids: Mutex<HashMap<u32, Arc<GridGraph>>>,
}

impl SingularMetric {
    pub fn new(
        measure: CurvatureMeasure,
        harmonic: HarmonicTerm,
        mode: BoundaryMode,
    ) -> Result<Self, MetricError> {
        if mode == BoundaryMode::Closed && !harmonic.is_zero() {
            return Err(MetricError::ClosedModeHarmonic);
        }
        if harmonic.coeffs().is_empty() && harmonic.flux().is_some() {
            return Err(MetricError::FluxOnlyHarmonic);
        }
        let no_cusp = measure.no_cusp();
        Ok(SingularMetric { measure, harmonic, mode, no_cusp, grids: Mutex::new(HashMap::new()) })
    }

    pub fn open(measure: CurvatureMeasure, harmonic: HarmonicTerm) -> Result<Self, MetricError> {
        Self::new(measure, harmonic, BoundaryMode::Open)
    }

    /// The `d̄_{ω,0}` variant: curves may meet the boundary circle, `h = 0`.
    pub fn closed(measure: CurvatureMeasure) -> Result<Self, MetricError> {
        Self::new(measure, HarmonicTerm::zero(), BoundaryMode::Closed)
    }

    pub fn measure(&self) -> &CurvatureMeasure {
        &self.measure
    }

    pub fn harmonic(&self) -> &HarmonicTerm {
        &self.harmonic
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn no_cusp(&self) -> bool {
        self.no_cusp
    }

    /// `V[ω](z) + h(z)`.
    pub fn log_factor(&self, z: Complex64) -> Result<f64, PotentialError> {
        Ok(eval_potential(&self.measure, z)? + self.harmonic.eval(z)?)
    }

    /// Conformal factor `e^{V[ω](z) + h(z)}`.
    pub fn factor(&self, z: Complex64) -> Result<f64, PotentialError> {
        Ok(self.log_factor(z)?.exp())
    }

    fn in_domain(&self, z: Complex64) -> bool {
        match self.mode {
            BoundaryMode::Open => z.norm() < CHART_RADIUS,
            BoundaryMode::Closed => z.norm() <= CHART_RADIUS + 1e-15,
        }
    }

    /// Net atom mass sitting exactly at `z`, if any.
    fn atom_mass_at(&self, z: Complex64) -> Option<f64> {
        self.measure.atoms().iter().find(|a| a.position == z).map(|a| a.mass)
    }

    /// Conformal length of the straight segment `[a, b]`; `+∞` when the
    /// segment passes through a cusp atom.
    pub fn segment_length(&self, a: Complex64, b: Complex64) -> f64 {
        let dir = b - a;
        let len = dir.norm();
        if len == 0.0 {
            return 0.0;
        }
        // event parameters: segment start/end, on-segment atoms (with index),
        // and plain splits under near-atom projections
        let mut on_seg: Vec<(f64, usize)> = Vec::new();
        let mut splits: Vec<f64> = vec![0.0, 1.0];
        for (idx, atom) in self.measure.atoms().iter().enumerate() {
            let (d2, t) = geom::point_segment(atom.position, a, b);
            let d = d2.sqrt();
            if d <= ON_SEGMENT_EPS {
                on_seg.push((t, idx));
            } else if d < len && t > 0.0 && t < 1.0 {
                splits.push(t);
            }
        }
        for (t, _) in &on_seg {
            splits.push(*t);
        }
        splits.sort_by(f64::total_cmp);
        splits.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        // split intervals carrying atoms at both ends
        let mut bounds = Vec::with_capacity(splits.len() * 2);
        for w in splits.windows(2) {
            bounds.push(w[0]);
            let both = on_seg.iter().any(|(t, _)| (t - w[0]).abs() < 1e-15)
                && on_seg.iter().any(|(t, _)| (t - w[1]).abs() < 1e-15);
            if both {
                bounds.push(0.5 * (w[0] + w[1]));
            }
        }
        bounds.push(1.0);

        let gamma = |t: f64| a + dir * t;
        let mut total = 0.0;
        for w in bounds.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 <= t0 {
                continue;
            }
            let atom_left = on_seg.iter().find(|(t, _)| (t - t0).abs() < 1e-15);
            let atom_right = on_seg.iter().find(|(t, _)| (t - t1).abs() < 1e-15);
            let piece = match (atom_left, atom_right) {
                (None, None) => {
                    let f = |t: f64| match self.log_factor(gamma(t)) {
                        Ok(lf) => lf.exp() * len,
                        Err(_) => f64::INFINITY,
                    };
                    adaptive_simpson(&f, t0, t1, LENGTH_REL_TOL)
                }
                (Some(&(ta, idx)), None) => self.singular_piece(a, dir, len, ta, t1 - t0, idx, 1.0),
                (None, Some(&(tb, idx))) => self.singular_piece(a, dir, len, tb, t1 - t0, idx, -1.0),
                (Some(_), Some(_)) => unreachable!("intervals with two atoms were split"),
            };
            if piece.is_infinite() {
                return f64::INFINITY;
            }
            total += piece;
        }
        total
    }

    /// `∫ e^{V+h}` over the sub-segment of length `span` (in parameter
    /// units) adjacent to the atom `idx` sitting at parameter `t_atom`;
    /// `orient` is +1 when the interval extends to larger `t`.
    fn singular_piece(
        &self,
        a: Complex64,
        dir: Complex64,
        len: f64,
        t_atom: f64,
        span: f64,
        idx: usize,
        orient: f64,
    ) -> f64 {
        let atom = self.measure.atoms()[idx];
        let b = atom.mass / TAU;
        if b >= 1.0 {
            // cusp on the curve: log-divergent integral
            return f64::INFINITY;
        }
        // regular-part value exactly at the atom, which is also the s -> 0
        // limit of the de-singularized integrand
        let at_atom = {
            let z = a + dir * t_atom;
            let mut lf = self.harmonic.eval(z).unwrap_or(f64::NAN);
            for (j, other) in self.measure.atoms().iter().enumerate() {
                if j != idx {
                    lf += -other.mass / TAU * (z - other.position).norm().ln();
                }
            }
            let rest = CurvatureMeasure::new(
                vec![],
                self.measure.layers().to_vec(),
                self.measure.density().cloned(),
            )
            .expect("layers and densities revalidate");
            lf += eval_potential(&rest, z).unwrap_or(f64::NAN);
            lf.exp()
        };
        let g = |s: f64| -> f64 {
            if s == 0.0 {
                return at_atom;
            }
            let z = a + dir * (t_atom + orient * s);
            match self.log_factor(z) {
                // evaluation collided with the atom bitwise: use the limit
                Err(_) => at_atom,
                Ok(lf) => (lf + b * (s * len).ln()).exp(),
            }
        };
        len.powf(1.0 - b) * power_endpoint(&g, span, b, LENGTH_REL_TOL)
    }

    /// Length functional `L_{ω,h}` of a polyline.
    pub fn curve_length(&self, curve: &PolyCurve) -> Result<f64, MetricError> {
        if self.mode == BoundaryMode::Open
            && curve.vertices.iter().any(|v| v.norm() >= CHART_RADIUS)
        {
            let v = curve.vertices.iter().find(|v| v.norm() >= CHART_RADIUS).unwrap();
            return Err(MetricError::OutsideDomain(v.re, v.im));
        }
        let mut total = 0.0;
        for w in curve.vertices.windows(2) {
            total += self.segment_length(w[0], w[1]);
            if total.is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
        Ok(total)
    }

    fn check_endpoint(&self, z: Complex64) -> Result<(), MetricError> {
        if !self.in_domain(z) {
            return Err(MetricError::OutsideDomain(z.re, z.im));
        }
        if let Some(mass) = self.atom_mass_at(z) {
            if mass >= TAU {
                return Err(MetricError::CuspEndpoint);
            }
        }
        Ok(())
    }

    pub(crate) fn grid(&self, level: u32) -> Arc<GridGraph> {
        let mut cache = self.grids.lock().unwrap();
        cache
            .entry(level)
            .or_insert_with(|| Arc::new(GridGraph::build(self, level, self.mode)))
            .clone()
    }

    /// Shortest-path estimate of the intrinsic distance, refined over grid
    /// levels `MIN_LEVEL..=levels` with corner-shortcut smoothing and local
    /// curve shortening. The graph values are non-increasing across levels
    /// up to quadrature tolerance. Endpoints are put in a canonical order
    /// first, so the estimate is exactly symmetric in its arguments.
    pub fn distance(
        &self,
        z: Complex64,
        zp: Complex64,
        levels: u32,
    ) -> Result<DistanceEstimate, MetricError> {
        let (z, zp) = if (zp.re, zp.im) < (z.re, z.im) { (zp, z) } else { (z, zp) };
        self.check_endpoint(z)?;
        self.check_endpoint(zp)?;
        let boundary_atoms = self.measure.has_boundary_atoms();
        if z == zp {
            return Ok(DistanceEstimate {
                per_level: vec![],
                estimate: 0.0,
                extrapolated: Some(0.0),
                boundary_atoms,
            });
        }
        let direct = self.segment_length(z, zp);
        let start = MIN_LEVEL.min(levels);
        let mut per_level: Vec<LevelEstimate> = Vec::new();
        for level in start..=levels {
            let graph = self.grid(level);
            let (graph_value, path) = graph.shortest_path(self, z, zp);
            let mut value = match path {
                Some(nodes) => {
                    let mut pts = Vec::with_capacity(nodes.len() + 2);
                    pts.push(z);
                    pts.extend(nodes.iter().map(|&n| graph.node_pos(n)));
                    pts.push(zp);
                    pts.dedup();
                    self.smooth_polyline(&mut pts);
                    let refined = self.refine_polyline(&mut pts);
                    refined.min(direct)
                }
                None => direct,
            };
            // the best curve found so far is still admissible at this level,
            // so per-level estimates are non-increasing
            if let Some(prev) = per_level.last() {
                value = value.min(prev.value);
            }
            per_level.push(LevelEstimate { level, graph_value, value });
        }
        let estimate = per_level.last().map_or(direct, |l| l.value);
        let extrapolated = match per_level.len() {
            n if n >= 2 => {
                let v1 = per_level[n - 2].value;
                let v2 = per_level[n - 1].value;
                (v1.is_finite() && v2.is_finite()).then(|| 2.0 * v2 - v1)
            }
            _ => None,
        };
        Ok(DistanceEstimate { per_level, estimate, extrapolated, boundary_atoms })
    }

    /// Iterative corner shortcutting: removes interior vertices whenever the
    /// direct chord is shorter; returns the final length.
    pub fn smooth_polyline(&self, pts: &mut Vec<Complex64>) -> f64 {
        let mut seg: Vec<f64> =
            pts.windows(2).map(|w| self.segment_length(w[0], w[1])).collect();
        loop {
            let mut improved = false;
            let mut i = 1;
            while i + 1 < pts.len() {
                let chord = self.segment_length(pts[i - 1], pts[i + 1]);
                let through = seg[i - 1] + seg[i];
                if chord < through {
                    pts.remove(i);
                    seg[i - 1] = chord;
                    seg.remove(i);
                    improved = true;
                } else {
                    i += 1;
                }
            }
            if !improved {
                break;
            }
        }
        seg.iter().sum()
    }

    /// Local curve shortening: subdivides chords and relaxes each interior
    /// vertex by a shrinking pattern search (endpoints stay fixed). Turns a
    /// shortcut lattice path into a near-geodesic polyline; the result is
    /// still an admissible curve, so the value stays an upper bound.
    pub fn refine_polyline(&self, pts: &mut Vec<Complex64>) -> f64 {
        const MAX_VERTICES: usize = 49;
        const PASSES: usize = 8;
        const DIRS: [(f64, f64); 8] = [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (0.70710678118654755, 0.70710678118654755),
            (0.70710678118654755, -0.70710678118654755),
            (-0.70710678118654755, 0.70710678118654755),
            (-0.70710678118654755, -0.70710678118654755),
        ];
        let admissible = |p: Complex64| match self.mode {
            BoundaryMode::Open => p.norm() < CHART_RADIUS,
            BoundaryMode::Closed => p.norm() <= CHART_RADIUS,
        };
        let mut seg: Vec<f64> =
            pts.windows(2).map(|w| self.segment_length(w[0], w[1])).collect();
        for _ in 0..PASSES {
            // midpoint subdivision (free: collinear split preserves length)
            if 2 * pts.len() - 1 <= MAX_VERTICES {
                let mut new_pts = Vec::with_capacity(2 * pts.len() - 1);
                let mut new_seg = Vec::with_capacity(2 * seg.len());
                for i in 0..pts.len() - 1 {
                    let mid = 0.5 * (pts[i] + pts[i + 1]);
                    new_pts.push(pts[i]);
                    if mid != pts[i] && mid != pts[i + 1] && admissible(mid) {
                        new_pts.push(mid);
                        let a = self.segment_length(pts[i], mid);
                        let b = self.segment_length(mid, pts[i + 1]);
                        new_seg.push(a);
                        new_seg.push(b);
                    } else {
                        new_seg.push(seg[i]);
                    }
                }
                new_pts.push(*pts.last().unwrap());
                *pts = new_pts;
                seg = new_seg;
            }
            let mut improved = false;
            for i in 1..pts.len() - 1 {
                let local =
                    (pts[i] - pts[i - 1]).norm().max((pts[i + 1] - pts[i]).norm());
                let mut best = seg[i - 1] + seg[i];
                let mut best_p = pts[i];
                let mut best_pair = (seg[i - 1], seg[i]);
                for scale in [0.5 * local, 0.125 * local, 0.03125 * local] {
                    for (dx, dy) in DIRS {
                        let cand = pts[i] + Complex64::new(scale * dx, scale * dy);
                        if !admissible(cand) || cand == pts[i - 1] || cand == pts[i + 1] {
                            continue;
                        }
                        let a = self.segment_length(pts[i - 1], cand);
                        if a >= best {
                            continue;
                        }
                        let b = self.segment_length(cand, pts[i + 1]);
                        if a + b < best {
                            best = a + b;
                            best_p = cand;
                            best_pair = (a, b);
                        }
                    }
                }
                if best_p != pts[i] {
                    pts[i] = best_p;
                    seg[i - 1] = best_pair.0;
                    seg[i] = best_pair.1;
                    improved = true;
                }
            }
            if !improved && 2 * pts.len() - 1 > MAX_VERTICES {
                break;
            }
        }
        seg.iter().sum()
    }

    /// Full single-source distance field on the level grid.
    pub fn distance_field(&self, center: Complex64, level: u32) -> Result<DistanceField, MetricError> {
        self.check_endpoint(center)?;
        let graph = self.grid(level);
        Ok(DistanceField::compute(graph, self, center))
    }

    /// Node mask of the metric ball `B_d(center, r)` on the level grid;
    /// monotone non-decreasing in `r` by construction.
    pub fn metric_ball(
        &self,
        center: Complex64,
        r: f64,
        level: u32,
    ) -> Result<Vec<bool>, MetricError> {
        let field = self.distance_field(center, level)?;
        Ok(field.mask(r))
    }

    /// Conformal area of a region, by adaptive quadrature of `e^{2V+2h}`
    /// with atom-centered polar refinement.
    pub fn area(&self, region: Region) -> Result<f64, MetricError> {
        let (center, radius) = match region {
            Region::Chart => (Complex64::new(0.0, 0.0), CHART_RADIUS),
            Region::Disc { center, radius } => {
                if !(radius > 0.0) || center.norm() + radius > CHART_RADIUS + 1e-9 {
                    return Err(MetricError::RegionOutsideChart);
                }
                (center, radius)
            }
        };
        for atom in self.measure.atoms() {
            if atom.mass >= TAU && (atom.position - center).norm() <= radius {
                return Err(MetricError::DivergentArea);
            }
        }
        let singulars: Vec<Singular> = self
            .measure
            .atoms()
            .iter()
            .filter(|a| (a.position - center).norm() <= radius + 0.1)
            .map(|a| Singular { pos: a.position, exponent: 2.0 * a.mass / TAU })
            .collect();
        let log_f = |z: Complex64| match self.log_factor(z) {
            Ok(v) => 2.0 * v,
            Err(_) => f64::NEG_INFINITY,
        };
        Ok(quad2d::integrate_disc(&log_f, &singulars, center, radius, AREA_REL_TOL))
    }

    /// Conformal mass of one grid cell (used by metric-ball areas).
    pub(crate) fn cell_area(&self, rect: &geom::Rect) -> f64 {
        let singulars: Vec<Singular> = self
            .measure
            .atoms()
            .iter()
            .filter(|a| rect.dist_to(a.position) <= 2.0 * rect.half_diag())
            .map(|a| Singular { pos: a.position, exponent: 2.0 * a.mass / TAU })
            .collect();
        let log_f = |z: Complex64| match self.log_factor(z) {
            Ok(v) => 2.0 * v,
            Err(_) => f64::NEG_INFINITY,
        };
        quad2d::integrate_cell(&log_f, &singulars, rect, 1e-10, 8)
    }
}

/// Distance between two chart points under a pure single-atom metric,
/// straight from the cone oracle (no grids); used for cross-checks.
pub fn single_atom_oracle(mass: f64, z: Complex64, zp: Complex64) -> Option<f64> {
    let beta = -mass / TAU;
    cone::chart_cone_distance(beta, z, zp).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;
    use std::f64::consts::PI;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn atom_metric(mass: f64) -> SingularMetric {
        SingularMetric::open(
            CurvatureMeasure::single_atom(c(0.0, 0.0), mass).unwrap(),
            HarmonicTerm::zero(),
        )
        .unwrap()
    }

    #[test]
    fn euclidean_segment_length() {
        let m = SingularMetric::open(CurvatureMeasure::empty(), HarmonicTerm::zero()).unwrap();
        let curve = PolyCurve::segment(c(0.0, 0.0), c(0.3, 0.0)).unwrap();
        assert!((m.curve_length(&curve).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn cone_segment_through_the_apex_value() {
        // β = -1/2: length of [0, 0.25] is (1/(1+β))|z|^{1+β} = 2·0.5 = 1
        let m = atom_metric(PI);
        let curve = PolyCurve::segment(c(0.0, 0.0), c(0.25, 0.0)).unwrap();
        let got = m.curve_length(&curve).unwrap();
        assert!((got - 1.0).abs() < 2e-6, "{got}");
    }

    #[test]
    fn harmonic_segment_elementary_integral() {
        let h = HarmonicTerm::poly(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let m = SingularMetric::open(CurvatureMeasure::empty(), h).unwrap();
        let curve = PolyCurve::segment(c(0.0, 0.0), c(0.2, 0.0)).unwrap();
        let got = m.curve_length(&curve).unwrap();
        let want = 0.2f64.exp() - 1.0;
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        assert!((want - 0.221_402_758_160_169_9).abs() < 1e-15);
    }

    #[test]
    fn cusp_on_curve_is_flagged_infinite() {
        let m = atom_metric(TAU);
        let curve = PolyCurve::segment(c(0.0, 0.0), c(0.1, 0.0)).unwrap();
        assert_eq!(m.curve_length(&curve).unwrap(), f64::INFINITY);
        // near-cusp stays finite
        let m = atom_metric(TAU - 0.2);
        assert!(m.curve_length(&curve).unwrap().is_finite());
    }

    #[test]
    fn segment_quadrature_matches_direct_integration_off_atom() {
        // atom off the segment: compare against dense Simpson of the factor
        let mu = CurvatureMeasure::single_atom(c(0.05, 0.07), 1.3).unwrap();
        let m = SingularMetric::open(mu, HarmonicTerm::zero()).unwrap();
        let (a, b) = (c(-0.2, -0.1), c(0.3, 0.05));
        let len = (b - a).norm();
        let n = 60_000;
        let mut s = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            s += m.factor(a + (b - a) * t).unwrap();
        }
        let oracle = s / n as f64 * len;
        let got = m.segment_length(a, b);
        assert!((got - oracle).abs() < 1e-5 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn area_of_flat_disc() {
        let m = SingularMetric::open(CurvatureMeasure::empty(), HarmonicTerm::zero()).unwrap();
        let got = m.area(Region::Disc { center: c(0.0, 0.0), radius: 0.3 }).unwrap();
        assert!((got - PI * 0.09).abs() < 1e-5 * PI * 0.09);
    }

    #[test]
    fn cone_disc_areas_closed_form() {
        // β = -1/4 (k = π/2): area of disc(0, 0.3) is π ρ^{2β+2}/(β+1)
        let m = atom_metric(PI / 2.0);
        let got = m.area(Region::Disc { center: c(0.0, 0.0), radius: 0.3 }).unwrap();
        let want = PI * 0.3f64.powf(1.5) / 0.75;
        assert!((got - want).abs() < 5e-4 * want, "{got} vs {want}");
        assert!((want - 0.688_288_465_145_456_9).abs() < 1e-12);
        // cone-area formula cross-check: θ r_c² / 2
        let r_c = 0.3f64.powf(0.75) / 0.75;
        let theta = 1.5 * PI;
        assert!((want - theta * r_c * r_c / 2.0).abs() < 1e-12);

        // β = 1/2 (k = -π): 2π·0.3³/3
        let m = atom_metric(-PI);
        let got = m.area(Region::Disc { center: c(0.0, 0.0), radius: 0.3 }).unwrap();
        let want = TAU * 0.3f64.powi(3) / 3.0;
        assert!((got - want).abs() < 5e-4 * want, "{got} vs {want}");
        assert!((want - 0.056_548_667_764_616_26).abs() < 1e-12);
    }

    #[test]
    fn divergent_area_flag() {
        let m = atom_metric(TAU);
        assert_eq!(
            m.area(Region::Disc { center: c(0.0, 0.0), radius: 0.2 }),
            Err(MetricError::DivergentArea)
        );
        let m = atom_metric(TAU + 1.0);
        assert_eq!(m.area(Region::Chart), Err(MetricError::DivergentArea));
    }

    #[test]
    fn closed_mode_rejects_harmonic() {
        let h = HarmonicTerm::constant(1.0);
        assert_eq!(
            SingularMetric::new(CurvatureMeasure::empty(), h, BoundaryMode::Closed).err(),
            Some(MetricError::ClosedModeHarmonic)
        );
    }

    #[test]
    fn atom_exactly_on_segment_interior() {
        // segment through an interior atom of mass π at 0.1 on the real axis:
        // split into two power-law halves; compare against the sum of the
        // two closed-form-ish halves computed by the engine itself from
        // sub-segments ending at the atom
        let mu = CurvatureMeasure::single_atom(c(0.1, 0.0), PI).unwrap();
        let m = SingularMetric::open(mu, HarmonicTerm::zero()).unwrap();
        let whole = m.segment_length(c(0.0, 0.0), c(0.3, 0.0));
        let left = m.segment_length(c(0.0, 0.0), c(0.1, 0.0));
        let right = m.segment_length(c(0.1, 0.0), c(0.3, 0.0));
        assert!((whole - (left + right)).abs() < 2e-6 * whole);
    }
}
