//! Conformal modulus of topological annuli: the round-annulus closed form,
//! a discrete Dirichlet-capacity solver on pixel masks (conjugate gradient,
//! 5-point Laplacian), the Grötzsch modulus through complete elliptic
//! integrals, and the Grötzsch inequality check.
//!
//! The modulus is computed as the reciprocal of the Dirichlet capacity of
//! the annulus (potential 0 on the obstacle, 1 on the outer boundary); for
//! annuli this equals the sup-inf extremal length definition.

use crate::quadrature::elliptic_k;
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnnulusError {
    #[error("round annulus needs 0 < R1 < R2")]
    BadRadii,
    #[error("grötzsch parameter must lie in (0, 1)")]
    BadGrotzschParameter,
    #[error("mask resolution leaves fewer than 8 pixels across the gap")]
    UnresolvedMask,
    #[error("mask is not an annulus: {0}")]
    NonAnnular(String),
    #[error("grötzsch check needs 0 and r outside the annulus region")]
    ContainmentViolated,
    #[error("conjugate gradient did not reach the residual target")]
    SolverStalled,
}

/// `mod A(R1, R2) = ln(R2/R1) / 2π`.
pub fn modulus_round(r1: f64, r2: f64) -> Result<f64, AnnulusError> {
    if !(r1 > 0.0 && r2 > r1) {
        return Err(AnnulusError::BadRadii);
    }
    Ok((r2 / r1).ln() / TAU)
}

/// Modulus of the Grötzsch annulus `G(r) = D(1) - [0, r]`:
/// `μ(r)/2π` with `μ(r) = (π/2)·K(√(1-r²))/K(r)`.
pub fn grotzsch_modulus(r: f64) -> Result<f64, AnnulusError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(AnnulusError::BadGrotzschParameter);
    }
    let rp = ((1.0 - r) * (1.0 + r)).sqrt();
    Ok(elliptic_k(rp) / (4.0 * elliptic_k(r)))
}

/// Outer boundary of an annulus region.
#[derive(Debug, Clone, PartialEq)]
pub enum Outer {
    Circle { center: Complex64, radius: f64 },
    Polygon(Vec<Complex64>),
}

/// Inner obstacle (the bounded complementary component).
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Disc { center: Complex64, radius: f64 },
    /// Thickened to one pixel row when rasterized.
    Segment { a: Complex64, b: Complex64 },
    Polygon(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusRegion {
    pub outer: Outer,
    pub obstacle: Obstacle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Outside,
    Free,
    Obstacle,
}

/// Pixel mask of an annulus region at a chosen resolution.
pub struct PixelMask {
    n: usize,
    h: f64,
    class: Vec<Class>,
}

fn point_in_polygon(p: Complex64, poly: &[Complex64]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.im > p.im) != (b.im > p.im) {
            let t = (p.im - a.im) / (b.im - a.im);
            if p.re < a.re + t * (b.re - a.re) {
                inside = !inside;
            }
        }
    }
    inside
}

impl AnnulusRegion {
    fn bounding_box(&self) -> (Complex64, f64) {
        match &self.outer {
            Outer::Circle { center, radius } => (*center, *radius),
            Outer::Polygon(poly) => {
                let (mut xmin, mut xmax, mut ymin, mut ymax) =
                    (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for p in poly {
                    xmin = xmin.min(p.re);
                    xmax = xmax.max(p.re);
                    ymin = ymin.min(p.im);
                    ymax = ymax.max(p.im);
                }
                let c = Complex64::new(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
                (c, 0.5 * (xmax - xmin).max(ymax - ymin))
            }
        }
    }

    fn in_outer(&self, p: Complex64) -> bool {
        match &self.outer {
            Outer::Circle { center, radius } => (p - center).norm() < *radius,
            Outer::Polygon(poly) => point_in_polygon(p, poly),
        }
    }

    fn in_obstacle(&self, p: Complex64, h: f64) -> bool {
        match &self.obstacle {
            Obstacle::Disc { center, radius } => (p - center).norm() <= *radius,
            Obstacle::Segment { a, b } => {
                // 0.6 h instead of 0.5 h so a segment sitting exactly between
                // two pixel rows still rasterizes to a nonempty slit
                let (d2, _) = crate::geom::point_segment(p, *a, *b);
                d2.sqrt() <= 0.6 * h
            }
            Obstacle::Polygon(poly) => point_in_polygon(p, poly),
        }
    }

    /// Rasterizes by pixel centers, then validates the annulus topology:
    /// one obstacle component, free region connected, obstacle not touching
    /// the outside, and at least 8 pixels across the gap.
    pub fn rasterize(&self, grid: usize) -> Result<PixelMask, AnnulusError> {
        assert!(grid >= 16);
        let (center, radius) = self.bounding_box();
        let pad = 2.0 * (2.0 * radius) / grid as f64;
        let side = 2.0 * radius + 2.0 * pad;
        let h = side / grid as f64;
        let origin = center - Complex64::new(0.5 * side, 0.5 * side);
        let n = grid;
        let mut class = vec![Class::Outside; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let p = origin + Complex64::new((ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h);
                class[iy * n + ix] = if self.in_obstacle(p, h) {
                    Class::Obstacle
                } else if self.in_outer(p) {
                    Class::Free
                } else {
                    Class::Outside
                };
            }
        }
        let mask = PixelMask { n, h, class };
        mask.validate()?;
        Ok(mask)
    }
}

impl PixelMask {
    pub fn n(&self) -> usize {
        self.n
    }

    fn neighbors(&self, idx: usize) -> [Option<usize>; 4] {
        let (ix, iy) = (idx % self.n, idx / self.n);
        [
            (ix > 0).then(|| idx - 1),
            (ix + 1 < self.n).then(|| idx + 1),
            (iy > 0).then(|| idx - self.n),
            (iy + 1 < self.n).then(|| idx + self.n),
        ]
    }

    fn validate(&self) -> Result<(), AnnulusError> {
        let n2 = self.n * self.n;
        let count = |c: Class| self.class.iter().filter(|&&x| x == c).count();
        if count(Class::Obstacle) == 0 {
            return Err(AnnulusError::NonAnnular("empty obstacle".into()));
        }
        if count(Class::Free) == 0 {
            return Err(AnnulusError::NonAnnular("empty annulus interior".into()));
        }
        // obstacle must not touch the outside (4-adjacency)
        for idx in 0..n2 {
            if self.class[idx] == Class::Obstacle {
                for nb in self.neighbors(idx).into_iter().flatten() {
                    if self.class[nb] == Class::Outside {
                        return Err(AnnulusError::NonAnnular(
                            "obstacle touches the outer boundary".into(),
                        ));
                    }
                }
            }
        }
        // obstacle connected (8-connectivity)
        let comp = |target: Class, diag: bool| -> usize {
            let mut seen = vec![false; n2];
            let mut comps = 0;
            for start in 0..n2 {
                if self.class[start] != target || seen[start] {
                    continue;
                }
                comps += 1;
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(idx) = stack.pop() {
                    let (ix, iy) = ((idx % self.n) as i64, (idx / self.n) as i64);
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if (dx == 0 && dy == 0) || (!diag && dx != 0 && dy != 0) {
                                continue;
                            }
                            let (jx, jy) = (ix + dx, iy + dy);
                            if jx < 0 || jy < 0 || jx >= self.n as i64 || jy >= self.n as i64 {
                                continue;
                            }
                            let j = (jy * self.n as i64 + jx) as usize;
                            if self.class[j] == target && !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
            comps
        };
        if comp(Class::Obstacle, true) != 1 {
            return Err(AnnulusError::NonAnnular("obstacle is disconnected".into()));
        }
        if comp(Class::Free, false) != 1 {
            return Err(AnnulusError::NonAnnular("annulus interior is disconnected".into()));
        }
        // gap resolution: BFS steps from the obstacle through free pixels
        // until the outside is reached
        let mut dist = vec![u32::MAX; n2];
        let mut queue = std::collections::VecDeque::new();
        for idx in 0..n2 {
            if self.class[idx] == Class::Obstacle {
                dist[idx] = 0;
                queue.push_back(idx);
            }
        }
        let mut gap = u32::MAX;
        while let Some(idx) = queue.pop_front() {
            for nb in self.neighbors(idx).into_iter().flatten() {
                match self.class[nb] {
                    Class::Outside => gap = gap.min(dist[idx] + 1),
                    Class::Free => {
                        if dist[nb] == u32::MAX {
                            dist[nb] = dist[idx] + 1;
                            queue.push_back(nb);
                        }
                    }
                    Class::Obstacle => {}
                }
            }
        }
        if gap < 8 {
            return Err(AnnulusError::UnresolvedMask);
        }
        Ok(())
    }

    /// Solves the discrete potential problem (0 on the obstacle, 1 outside,
    /// 5-point Laplacian on free pixels) and returns the Dirichlet energy.
    fn dirichlet_energy(&self) -> Result<f64, AnnulusError> {
        let n2 = self.n * self.n;
        let mut index = vec![usize::MAX; n2];
        let mut free = Vec::new();
        for idx in 0..n2 {
            if self.class[idx] == Class::Free {
                index[idx] = free.len();
                free.push(idx);
            }
        }
        let m = free.len();
        let boundary = |c: Class| match c {
            Class::Obstacle => 0.0,
            Class::Outside => 1.0,
            Class::Free => unreachable!(),
        };
        // b holds the Dirichlet contributions; A x = deg·x - Σ free-neighbor x
        let mut b = vec![0.0; m];
        for (row, &idx) in free.iter().enumerate() {
            for nb in self.neighbors(idx).into_iter().flatten() {
                if self.class[nb] != Class::Free {
                    b[row] += boundary(self.class[nb]);
                }
            }
        }
        let apply = |x: &[f64], out: &mut [f64]| {
            for (row, &idx) in free.iter().enumerate() {
                let mut acc = 0.0;
                let mut deg = 0.0;
                for nb in self.neighbors(idx).into_iter().flatten() {
                    deg += 1.0;
                    if self.class[nb] == Class::Free {
                        acc += x[index[nb]];
                    }
                }
                // pixels on the frame edge keep degree of in-frame neighbors
                out[row] = deg * x[row] - acc;
            }
        };
        // conjugate gradient to relative residual 1e-10
        let mut x = vec![0.0; m];
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let nb2 = dot(&b, &b).sqrt().max(1e-300);
        let mut rs = dot(&r, &r);
        let max_iter = 20 * self.n + 2000;
        let mut converged = rs.sqrt() <= 1e-10 * nb2;
        for _ in 0..max_iter {
            if converged {
                break;
            }
            apply(&p, &mut ap);
            let alpha = rs / dot(&p, &ap);
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new = dot(&r, &r);
            if rs_new.sqrt() <= 1e-10 * nb2 {
                converged = true;
                break;
            }
            let beta = rs_new / rs;
            rs = rs_new;
            for i in 0..m {
                p[i] = r[i] + beta * p[i];
            }
        }
        if !converged {
            return Err(AnnulusError::SolverStalled);
        }
        // energy Σ (u_a - u_b)² over horizontal/vertical pixel pairs
        let value = |idx: usize| -> f64 {
            match self.class[idx] {
                Class::Free => x[index[idx]],
                Class::Obstacle => 0.0,
                Class::Outside => 1.0,
            }
        };
        let mut energy = 0.0;
        for iy in 0..self.n {
            for ix in 0..self.n {
                let idx = iy * self.n + ix;
                if ix + 1 < self.n {
                    let j = idx + 1;
                    if self.class[idx] == Class::Free || self.class[j] == Class::Free {
                        let d = value(idx) - value(j);
                        energy += d * d;
                    }
                }
                if iy + 1 < self.n {
                    let j = idx + self.n;
                    if self.class[idx] == Class::Free || self.class[j] == Class::Free {
                        let d = value(idx) - value(j);
                        energy += d * d;
                    }
                }
            }
        }
        Ok(energy)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Discrete modulus of a rasterized annulus region: reciprocal Dirichlet
/// capacity at the given grid resolution.
pub fn discrete_modulus(region: &AnnulusRegion, grid: usize) -> Result<f64, AnnulusError> {
    let mask = region.rasterize(grid)?;
    Ok(1.0 / mask.dirichlet_energy()?)
}

/// Grötzsch's inequality `mod(U) ≤ mod(G(r))` for a region `U ⊂ D(1)`
/// avoiding 0 and `r`; combined tolerance: 2% discretization + 1e-12
/// elliptic evaluation.
pub fn check_grotzsch_bound(
    region: &AnnulusRegion,
    r: f64,
    grid: usize,
) -> Result<crate::verify::ValidationReport, AnnulusError> {
    let mask = region.rasterize(grid)?;
    // containment is geometric: 0 and r must sit in the obstacle or outside
    for p in [Complex64::new(0.0, 0.0), Complex64::new(r, 0.0)] {
        if !region.in_obstacle(p, mask.h) && region.in_outer(p) {
            return Err(AnnulusError::ContainmentViolated);
        }
    }
    let left = 1.0 / mask.dirichlet_energy()?;
    let right = grotzsch_modulus(r)?;
    let mut report = crate::verify::ValidationReport::new(
        format!("mod(U) vs mod(G({r}))"),
        left,
        right,
        0.02,
    );
    report.tol += 1e-12;
    report.pass = report.left <= report.right + report.tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(r1: f64, r2: f64) -> AnnulusRegion {
        AnnulusRegion {
            outer: Outer::Circle { center: Complex64::new(0.0, 0.0), radius: r2 },
            obstacle: Obstacle::Disc { center: Complex64::new(0.0, 0.0), radius: r1 },
        }
    }

    #[test]
    fn round_modulus_formula() {
        assert!((modulus_round(1.0, 1f64.exp()).unwrap() - 1.0 / TAU).abs() < 1e-15);
        let v = modulus_round(0.25, 0.5).unwrap();
        assert!((v - 2f64.ln() / TAU).abs() < 1e-15);
        assert!((v - 0.110_317_800_076_325_8).abs() < 1e-12);
        assert_eq!(modulus_round(1.0, 1.0), Err(AnnulusError::BadRadii));
    }

    #[test]
    fn grotzsch_symmetric_point_and_monotonicity() {
        let v = grotzsch_modulus(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((v - 0.25).abs() < 1e-12, "{v}");
        assert!(grotzsch_modulus(0.3).unwrap() > grotzsch_modulus(0.6).unwrap());
        // decreasing toward the r -> 1 limit 0 (logarithmically slow)
        let near_one = grotzsch_modulus(0.999).unwrap();
        assert!(near_one < grotzsch_modulus(0.9).unwrap());
        assert!((near_one - 0.087_395_646_639_316_25).abs() < 1e-12);
        assert!(grotzsch_modulus(1.0).is_err());
        // product identity (2π)² mod(G(r)) mod(G(r')) = π²/4
        for r in [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8] {
            let rp = (1.0 - r * r as f64).sqrt();
            let prod = TAU * TAU * grotzsch_modulus(r).unwrap() * grotzsch_modulus(rp).unwrap();
            assert!((prod - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn discrete_round_annulus_converges() {
        let v = discrete_modulus(&round(0.25, 0.5), 256).unwrap();
        let want = 2f64.ln() / TAU;
        assert!((v - want).abs() < 0.02 * want, "{v} vs {want}");
    }

    #[test]
    fn similarity_invariance() {
        let a = discrete_modulus(&round(0.25, 0.5), 192).unwrap();
        let moved = AnnulusRegion {
            outer: Outer::Circle { center: Complex64::new(1.3, -0.7), radius: 1.0 },
            obstacle: Obstacle::Disc { center: Complex64::new(1.3, -0.7), radius: 0.5 },
        };
        let b = discrete_modulus(&moved, 192).unwrap();
        assert!((a - b).abs() < 0.01 * a, "{a} vs {b}");
    }

    #[test]
    fn modulus_monotone_under_inclusion() {
        let inner = discrete_modulus(&round(0.3, 0.45), 192).unwrap();
        let outer = discrete_modulus(&round(0.25, 0.5), 192).unwrap();
        assert!(inner <= outer + 1e-3);
    }

    #[test]
    fn obstacle_touching_boundary_is_rejected() {
        let bad = AnnulusRegion {
            outer: Outer::Circle { center: Complex64::new(0.0, 0.0), radius: 0.5 },
            obstacle: Obstacle::Disc { center: Complex64::new(0.3, 0.0), radius: 0.25 },
        };
        assert!(matches!(bad.rasterize(128), Err(AnnulusError::NonAnnular(_))));
        let thin = round(0.47, 0.5);
        assert_eq!(thin.rasterize(64).err(), Some(AnnulusError::UnresolvedMask));
    }

    #[test]
    fn grotzsch_self_check() {
        // U = G(0.5) itself: the two independent computations agree within 2%
        let region = AnnulusRegion {
            outer: Outer::Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 },
            obstacle: Obstacle::Segment {
                a: Complex64::new(0.0, 0.0),
                b: Complex64::new(0.5, 0.0),
            },
        };
        let rep = check_grotzsch_bound(&region, 0.5, 512).unwrap();
        assert!(rep.pass, "left {} right {}", rep.left, rep.right);
        assert!((rep.left - rep.right).abs() < 0.02 * rep.right, "{rep:?}");
    }
}
