//! Exact planar geometry helpers: disc/rectangle overlap areas and
//! circle/disc arc intersections. Used for cell-density masses and the
//! clipped quadrature grids.

use num_complex::Complex64;

/// Axis-aligned rectangle `[x0,x1] × [y0,y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn half_diag(&self) -> f64 {
        0.5 * ((self.x1 - self.x0).hypot(self.y1 - self.y0))
    }

    pub fn split(&self) -> [Rect; 4] {
        let mx = 0.5 * (self.x0 + self.x1);
        let my = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, mx, self.y0, my),
            Rect::new(mx, self.x1, self.y0, my),
            Rect::new(self.x0, mx, my, self.y1),
            Rect::new(mx, self.x1, my, self.y1),
        ]
    }

    /// Distance from `p` to the closest point of the rectangle (0 inside).
    pub fn dist_to(&self, p: Complex64) -> f64 {
        let dx = (self.x0 - p.re).max(0.0).max(p.re - self.x1);
        let dy = (self.y0 - p.im).max(0.0).max(p.im - self.y1);
        dx.hypot(dy)
    }

    pub fn contains(&self, p: Complex64) -> bool {
        p.re >= self.x0 && p.re <= self.x1 && p.im >= self.y0 && p.im <= self.y1
    }
}

/// Where a rectangle sits relative to a disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectDisc {
    Inside,
    Outside,
    Crossing,
}

pub fn classify_rect_disc(rect: &Rect, center: Complex64, radius: f64) -> RectDisc {
    if rect.dist_to(center) >= radius {
        return RectDisc::Outside;
    }
    // farthest corner from the center
    let fx = (center.re - rect.x0).abs().max((center.re - rect.x1).abs());
    let fy = (center.im - rect.y0).abs().max((center.im - rect.y1).abs());
    if fx.hypot(fy) <= radius {
        RectDisc::Inside
    } else {
        RectDisc::Crossing
    }
}

/// `∫_{-R}^{a} sqrt(R² - u²) du`, with `a` clamped to `[-R, R]`.
fn half_disc_int(r: f64, a: f64) -> f64 {
    let a = a.clamp(-r, r);
    0.5 * (a * (r * r - a * a).max(0.0).sqrt() + r * r * (a / r).asin())
        + 0.25 * std::f64::consts::PI * r * r
}

/// `∫_{-R}^{a} min(t, sqrt(R² - u²)) du` for `t ≥ 0`.
fn min_int(r: f64, a: f64, t: f64) -> f64 {
    let a = a.clamp(-r, r);
    if t >= r {
        return half_disc_int(r, a);
    }
    let s = (r * r - t * t).sqrt();
    if a <= -s {
        half_disc_int(r, a)
    } else if a <= s {
        half_disc_int(r, -s) + t * (a + s)
    } else {
        half_disc_int(r, -s) + t * 2.0 * s + half_disc_int(r, a) - half_disc_int(r, s)
    }
}

/// Area of `disc(0, R) ∩ {u ≤ x} ∩ {v ≤ y}`.
fn corner_area(r: f64, x: f64, y: f64) -> f64 {
    if x <= -r || y <= -r {
        return 0.0;
    }
    let a = x.min(r);
    if y >= r {
        2.0 * half_disc_int(r, a)
    } else if y >= 0.0 {
        half_disc_int(r, a) + min_int(r, a, y)
    } else {
        half_disc_int(r, a) - min_int(r, a, -y)
    }
}

/// Exact area of `rect ∩ disc(center, radius)`.
pub fn rect_disc_area(rect: &Rect, center: Complex64, radius: f64) -> f64 {
    let x0 = rect.x0 - center.re;
    let x1 = rect.x1 - center.re;
    let y0 = rect.y0 - center.im;
    let y1 = rect.y1 - center.im;
    (corner_area(radius, x1, y1) - corner_area(radius, x0, y1) - corner_area(radius, x1, y0)
        + corner_area(radius, x0, y0))
    .max(0.0)
}

/// Area of `rect ∩ disc(c1, r1) ∩ disc(c2, r2)`, by subdivision with exact
/// single-disc leaves. Accurate to roughly `rect.area() · 4^-depth`.
pub fn rect_two_discs_area(
    rect: &Rect,
    c1: Complex64,
    r1: f64,
    c2: Complex64,
    r2: f64,
    depth: u32,
) -> f64 {
    match classify_rect_disc(rect, c1, r1) {
        RectDisc::Outside => 0.0,
        RectDisc::Inside => rect_disc_area(rect, c2, r2),
        RectDisc::Crossing => match classify_rect_disc(rect, c2, r2) {
            RectDisc::Outside => 0.0,
            RectDisc::Inside => rect_disc_area(rect, c1, r1),
            RectDisc::Crossing => {
                if depth == 0 {
                    // both circles cross this leaf; estimate by composing fractions
                    let a1 = rect_disc_area(rect, c1, r1);
                    let a2 = rect_disc_area(rect, c2, r2);
                    (a1 * a2 / rect.area()).min(a1).min(a2)
                } else {
                    rect.split()
                        .iter()
                        .map(|q| rect_two_discs_area(q, c1, r1, c2, r2, depth - 1))
                        .sum()
                }
            }
        },
    }
}

/// Angular half-width of the arc of `circle(q, rl)` lying inside the open
/// disc `B(c, r)`, together with the direction of the arc midpoint.
/// Returns `None` when the circle misses the ball, `Some((ψ, π))` when the
/// whole circle is inside.
pub fn circle_in_disc_arc(q: Complex64, rl: f64, c: Complex64, r: f64) -> Option<(f64, f64)> {
    let d = (c - q).norm();
    if d + rl <= r {
        return Some((0.0, std::f64::consts::PI));
    }
    if d >= r + rl || rl >= d + r {
        return None;
    }
    // circle intersects the ball boundary in two points
    let cosine = ((d * d + rl * rl - r * r) / (2.0 * d * rl)).clamp(-1.0, 1.0);
    let half = cosine.acos();
    let psi = (c - q).arg();
    Some((psi, half))
}

/// Length of the intersection of the circular interval `[a0, a1]` (with
/// `a1 - a0 ≤ 2π`) with the window of half-width `half` around `mid`,
/// all angles in radians on the 2π circle.
pub fn circular_overlap(a0: f64, a1: f64, mid: f64, half: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    if half >= std::f64::consts::PI {
        return a1 - a0;
    }
    // window [mid-half, mid+half]; shift interval so the window is centered
    let mut lo = (a0 - (mid - half)).rem_euclid(tau);
    let len = a1 - a0;
    let window = 2.0 * half;
    let mut total = 0.0;
    // walk the interval, possibly wrapping once
    let mut remaining = len;
    while remaining > 0.0 {
        let chunk = remaining.min(tau - lo);
        let inside_from = lo.min(window);
        let inside_to = (lo + chunk).min(window);
        total += (inside_to - inside_from).max(0.0);
        remaining -= chunk;
        lo = 0.0;
    }
    total
}

/// Squared distance from point `p` to segment `[a, b]`, and the parameter of
/// the closest point.
pub fn point_segment(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return ((p - a).norm_sqr(), 0.0);
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    let closest = a + ab * t;
    ((p - closest).norm_sqr(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rect_disc_area_exact_cases() {
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let a = rect_disc_area(&r, Complex64::new(0.0, 0.0), 0.5);
        assert!((a - PI * 0.25).abs() < 1e-14);
        // disc fully covering the rect
        let a = rect_disc_area(&r, Complex64::new(0.0, 0.0), 3.0);
        assert!((a - 4.0).abs() < 1e-14);
        // quarter overlap: unit disc centered at a rect corner
        let r = Rect::new(0.0, 2.0, 0.0, 2.0);
        let a = rect_disc_area(&r, Complex64::new(0.0, 0.0), 1.0);
        assert!((a - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn rect_disc_area_matches_montecarlo_grid() {
        // deterministic midpoint grid as an independent oracle
        let rect = Rect::new(-0.3, 0.4, -0.1, 0.45);
        let c = Complex64::new(0.1, 0.05);
        let radius = 0.3;
        let n = 2000;
        let hx = (rect.x1 - rect.x0) / n as f64;
        let hy = (rect.y1 - rect.y0) / n as f64;
        let mut hits = 0u64;
        for i in 0..n {
            for j in 0..n {
                let x = rect.x0 + (i as f64 + 0.5) * hx;
                let y = rect.y0 + (j as f64 + 0.5) * hy;
                if (Complex64::new(x, y) - c).norm() < radius {
                    hits += 1;
                }
            }
        }
        let approx = hits as f64 * hx * hy;
        let exact = rect_disc_area(&rect, c, radius);
        assert!((approx - exact).abs() < 3e-4, "{approx} vs {exact}");
    }

    #[test]
    fn two_disc_overlap_reduces_to_lens_area() {
        // rect much larger than both discs: area equals the lens formula
        let rect = Rect::new(-5.0, 5.0, -5.0, 5.0);
        let c1 = Complex64::new(0.0, 0.0);
        let c2 = Complex64::new(1.0, 0.0);
        let (r1, r2) = (1.0, 1.0);
        let got = rect_two_discs_area(&rect, c1, r1, c2, r2, 26);
        let d: f64 = 1.0;
        let lens = 2.0 * r1 * r1 * (d / (2.0 * r1)).acos()
            - 0.5 * d * (4.0 * r1 * r1 - d * d).sqrt();
        assert!((got - lens).abs() < 1e-6, "{got} vs {lens}");
    }

    #[test]
    fn circular_overlap_basic() {
        // interval [0, π/2], window around 0 of half-width π/4 → overlap π/4
        let v = circular_overlap(0.0, PI / 2.0, 0.0, PI / 4.0);
        assert!((v - PI / 4.0).abs() < 1e-12);
        // wrapping interval
        let v = circular_overlap(3.0 * PI / 2.0, 2.0 * PI + 0.3, 0.0, 0.2);
        assert!((v - 0.4).abs() < 1e-12);
    }
}
