//! 2-D quadrature of exponential-of-potential integrands over discs, with
//! polar treatment of the power-law singularities that positive curvature
//! atoms put into the conformal factor.
//!
//! Integrands are passed as `log_f` so the singular factor `|z-p|^{-a}` can
//! be split off stably; near an atom the integrator works in atom-centered
//! polar coordinates with the radial substitution `u = r^{2-a}`.

use crate::geom::{self, Rect, RectDisc};
use crate::quadrature::adaptive_simpson;
use num_complex::Complex64;

/// A point where the integrand behaves like `|z - pos|^{-exponent}`.
#[derive(Debug, Clone, Copy)]
pub struct Singular {
    pub pos: Complex64,
    pub exponent: f64,
}

/// 3×3 tensor Simpson rule on a rectangle.
pub fn simpson9(f: &impl Fn(Complex64) -> f64, rect: &Rect) -> f64 {
    const W: [f64; 3] = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
    let xs = [rect.x0, 0.5 * (rect.x0 + rect.x1), rect.x1];
    let ys = [rect.y0, 0.5 * (rect.y0 + rect.y1), rect.y1];
    let mut s = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            s += W[i] * W[j] * f(Complex64::new(x, y));
        }
    }
    s * rect.area()
}

/// Clips the ray `p + t·e^{iθ}`, `t ≥ 0`, against a rectangle; returns the
/// parameter interval of the part inside (empty -> None).
fn ray_rect(p: Complex64, theta: f64, rect: &Rect) -> Option<(f64, f64)> {
    let (dx, dy) = (theta.cos(), theta.sin());
    let mut t0: f64 = 0.0;
    let mut t1 = f64::INFINITY;
    for (origin, dir, lo, hi) in
        [(p.re, dx, rect.x0, rect.x1), (p.im, dy, rect.y0, rect.y1)]
    {
        if dir.abs() < 1e-300 {
            if origin < lo || origin > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - origin) / dir, (hi - origin) / dir);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t1 > t0).then_some((t0, t1))
}

/// `∬_rect |z-p|^{-a} g(z) dλ` with `g = exp(log_f + a·ln|z-p|)`, in polar
/// coordinates around `p`. Handles `p` inside, on the boundary of, or near
/// the rectangle; requires `a < 2`.
pub fn polar_rect(
    log_f: &impl Fn(Complex64) -> f64,
    sing: &Singular,
    rect: &Rect,
    rel_tol: f64,
) -> f64 {
    let p = sing.pos;
    let a = sing.exponent;
    debug_assert!(a < 2.0);
    let g = |z: Complex64| {
        let d = (z - p).norm();
        if d == 0.0 {
            // measure-zero direction; the radial integrand multiplies by r
            0.0
        } else {
            (log_f(z) + a * d.ln()).exp()
        }
    };
    // split the angular range at the corner directions
    let corners = [
        Complex64::new(rect.x0, rect.y0),
        Complex64::new(rect.x1, rect.y0),
        Complex64::new(rect.x1, rect.y1),
        Complex64::new(rect.x0, rect.y1),
    ];
    let mut angles: Vec<f64> = corners.iter().map(|c| (c - p).arg()).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let n = angles.len();
    let radial = |theta: f64| -> f64 {
        let Some((r0, r1)) = ray_rect(p, theta, rect) else {
            return 0.0;
        };
        let dir = Complex64::new(theta.cos(), theta.sin());
        if r0 <= 1e-14 * r1 {
            // substitution u = r^{2-a} regularizes r^{1-a} dr
            let q = 2.0 - a;
            let upper = r1.powf(q);
            adaptive_simpson(
                &|u: f64| {
                    if u <= 0.0 {
                        return 0.0;
                    }
                    let r = u.powf(1.0 / q);
                    g(p + r * dir)
                },
                0.0,
                upper,
                rel_tol,
            ) / q
        } else {
            adaptive_simpson(&|r: f64| r.powf(1.0 - a) * g(p + r * dir), r0, r1, rel_tol)
        }
    };
    let mut total = 0.0;
    for k in 0..n {
        let a0 = angles[k];
        let a1 = if k + 1 < n { angles[k + 1] } else { angles[0] + std::f64::consts::TAU };
        if a1 - a0 > 1e-14 {
            total += adaptive_simpson(&radial, a0, a1, rel_tol);
        }
    }
    total
}

/// Integral of `exp(log_f)` over a rectangle assumed fully inside the
/// domain, adaptively refined; switches to polar handling when a singular
/// point is inside or near the cell.
pub fn integrate_cell(
    log_f: &impl Fn(Complex64) -> f64,
    singulars: &[Singular],
    rect: &Rect,
    tol_abs: f64,
    depth: u32,
) -> f64 {
    let f = |z: Complex64| log_f(z).exp();
    if let Some(s) = singulars
        .iter()
        .find(|s| rect.dist_to(s.pos) <= 0.75 * (rect.x1 - rect.x0).max(rect.y1 - rect.y0))
    {
        // hand the whole cell to the polar integrator once the cell is
        // isolated from the other singular points
        let others_far = singulars
            .iter()
            .all(|o| o.pos == s.pos || rect.dist_to(o.pos) > 2.0 * rect.half_diag());
        if others_far {
            return polar_rect(log_f, s, rect, 1e-7);
        }
        let children = rect.split();
        return children
            .iter()
            .map(|c| integrate_cell(log_f, singulars, c, tol_abs / 4.0, depth.saturating_sub(1)))
            .sum();
    }
    let coarse = simpson9(&f, rect);
    let children = rect.split();
    let fine: f64 = children.iter().map(|c| simpson9(&f, c)).sum();
    if depth == 0 || (fine - coarse).abs() <= 15.0 * tol_abs.max(1e-16) {
        return fine + (fine - coarse) / 15.0;
    }
    children
        .iter()
        .map(|c| integrate_cell(log_f, singulars, c, tol_abs / 4.0, depth - 1))
        .sum()
}

/// `∬_{disc(center, radius)} exp(log_f) dλ` to relative tolerance `rel_tol`.
pub fn integrate_disc(
    log_f: &impl Fn(Complex64) -> f64,
    singulars: &[Singular],
    center: Complex64,
    radius: f64,
    rel_tol: f64,
) -> f64 {
    let root = Rect::new(
        center.re - radius,
        center.re + radius,
        center.im - radius,
        center.im + radius,
    );
    // coarse pass fixes the absolute budget
    let coarse = disc_rec(log_f, singulars, &root, center, radius, f64::INFINITY, 4, 10);
    let budget = rel_tol * coarse.abs().max(1e-9);
    disc_rec(log_f, singulars, &root, center, radius, budget, 26, 14)
}

#[allow(clippy::too_many_arguments)]
fn disc_rec(
    log_f: &impl Fn(Complex64) -> f64,
    singulars: &[Singular],
    rect: &Rect,
    center: Complex64,
    radius: f64,
    tol_abs: f64,
    depth: u32,
    edge_depth: u32,
) -> f64 {
    match geom::classify_rect_disc(rect, center, radius) {
        RectDisc::Outside => 0.0,
        RectDisc::Inside => integrate_cell(log_f, singulars, rect, tol_abs, depth),
        RectDisc::Crossing => {
            if edge_depth == 0 {
                let frac = geom::rect_disc_area(rect, center, radius) / rect.area();
                if frac <= 0.0 {
                    return 0.0;
                }
                // sample inside the disc part when possible
                let towards = center - rect.center();
                let sample = rect.center()
                    + towards * (0.25 * (rect.x1 - rect.x0) / towards.norm().max(1e-300));
                return frac * rect.area() * log_f(sample).exp();
            }
            rect.split()
                .iter()
                .map(|c| {
                    disc_rec(
                        log_f,
                        singulars,
                        c,
                        center,
                        radius,
                        tol_abs / 4.0,
                        depth.saturating_sub(1),
                        edge_depth - 1,
                    )
                })
                .sum()
        }
    }
}
