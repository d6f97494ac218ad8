//! 1-D adaptive quadrature kernels shared by the potential, length and area
//! integrators.

/// Hard floor below which absolute errors are always accepted.
pub const ABS_FLOOR: f64 = 1e-12;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// Accepts a subinterval when the Richardson error estimate drops below
/// `rel_tol` times the running magnitude, with an absolute floor of
/// [`ABS_FLOOR`]. Returns the extrapolated value.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !(left + right).is_finite() {
        // non-finite integrand: refining cannot help
        return left + right;
    }
    if depth == 0 || delta.abs() <= 15.0 * (rel_tol * (left + right).abs()).max(ABS_FLOOR) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, rel_tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, rel_tol, depth - 1)
}

/// Integrates `∫_0^L t^{-b} g(t) dt` for `b < 1` where `g` is regular at 0.
///
/// Substituting `u = t^{1-b}` removes both the value singularity (`0 < b < 1`)
/// and the derivative singularity of terms like `t^{|b|}` (`b < 0`), so plain
/// Simpson converges on the transformed integrand.
pub fn power_endpoint<G: Fn(f64) -> f64>(g: &G, len: f64, b: f64, rel_tol: f64) -> f64 {
    debug_assert!(b < 1.0);
    if len <= 0.0 {
        return 0.0;
    }
    if b == 0.0 {
        return adaptive_simpson(&|t| g(t), 0.0, len, rel_tol);
    }
    let q = 1.0 - b;
    let upper = len.powf(q);
    let transformed = |u: f64| {
        if u <= 0.0 {
            g(0.0)
        } else {
            g(u.powf(1.0 / q))
        }
    };
    adaptive_simpson(&transformed, 0.0, upper, rel_tol) / q
}

/// Arithmetic-geometric mean, iterated to relative change below 1e-15.
pub fn agm(a0: f64, b0: f64) -> f64 {
    let mut a = a0;
    let mut b = b0;
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-15 * an.abs() {
            return an;
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, modulus convention `K(k)`.
pub fn elliptic_k(k: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&k));
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    std::f64::consts::PI / (2.0 * agm(1.0, kp))
}
