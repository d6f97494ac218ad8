//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Tolerances are pinned here, not tuned at runtime:
//!   1. cone equivalence      level 9, 1% relative, < 120 s wall time
//!   2. layer convergence     ≤ 2% at m = 64, monotone from m = 4
//!   3. segment bound         1000 instances, 1e-4 relative, zero fails
//!   4. area bounds           200 instances upper bound; cone areas 1%
//!   5. troyanov              listed integrals within 0.5%
//!   6. cusp divergence       ≥ 0.5 per level 5..10; control Δ < 1e-3
//!   7. annulus moduli        round 1% @512; grötzsch 1e-6; 50 configs @2%
//!   8. contractibility       transition within 5% of d·sin(θ/2)
//!   9. property sweeps       ≥ 100 seeded instances each, zero fails

use bic_core::cone::{chart_cone_distance, ConeSpec};
use bic_core::measure::CircleLayer;
use bic_core::scenario::{self, Scenario};
use bic_core::verify::{self, ValidationReport};
use bic_core::{
    BoundaryMode, Complex64, CurvatureMeasure, HarmonicTerm, Part, PolyCurve, SingularMetric,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn verdict(criterion: &str, pass: bool, details: &str) {
    println!(
        "criterion {criterion}: {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {details}");
}

fn sample_probe(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.random_range(0.1..0.4);
    let phi = TAU * rng.random::<f64>();
    c(r * phi.cos(), r * phi.sin())
}

/// 1. Grid-engine distances against the exact cone oracle for four atom
/// masses, 20 seeded probe pairs each, level 9, 1% relative error.
#[test]
fn criterion_1_cone_equivalence() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for mass in [-PI, PI / 2.0, PI, 1.5 * PI] {
        let beta = -mass / TAU;
        let metric = SingularMetric::open(
            CurvatureMeasure::single_atom(c(0.0, 0.0), mass).unwrap(),
            HarmonicTerm::zero(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let pairs: Vec<(Complex64, Complex64)> = (0..20)
            .map(|_| {
                let z = sample_probe(&mut rng);
                let mut zp = sample_probe(&mut rng);
                while (z - zp).norm() < 0.05 {
                    zp = sample_probe(&mut rng);
                }
                (z, zp)
            })
            .collect();
        let errs: Vec<f64> = pairs
            .par_iter()
            .map(|&(z, zp)| {
                let oracle = chart_cone_distance(beta, z, zp).unwrap();
                let est = metric.distance(z, zp, 9).unwrap().estimate;
                (est - oracle).abs() / oracle
            })
            .collect();
        for e in errs {
            worst = worst.max(e);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        "1 (cone equivalence)",
        worst < 0.01 && elapsed < 120.0,
        &format!("worst rel error {worst:.3e}, {elapsed:.1} s"),
    );
}

/// 2. Reshetnyak convergence for the π-mass layer on ∂D(0.25): the atomic
/// family's closure distances approach the closed-form-layer limit, ≤ 2%
/// at m = 64 and monotonically improving from m = 4, on 5 probe pairs.
#[test]
fn criterion_2_layer_convergence() {
    let layer = CircleLayer::uniform(c(0.0, 0.0), 0.25, PI).unwrap();
    let probes: Vec<(Complex64, Complex64)> = (0..5)
        .map(|k| {
            let phi = TAU * k as f64 / 5.0 + 0.13;
            let p = Complex64::from_polar(0.35, phi);
            (p, -p)
        })
        .collect();
    let ms = [4usize, 8, 16, 32, 64];
    let table = verify::convergence_experiment(&layer, &ms, &probes, 7).unwrap();
    let errs = table.max_errors(&ms);
    let final_err = errs.last().unwrap().1;
    let monotone = errs.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
    verdict(
        "2 (layer convergence)",
        final_err <= 0.02 && monotone,
        &format!(
            "errors {:?}, m=64 error {final_err:.2e}",
            errs.iter().map(|(m, e)| format!("{m}:{e:.4}")).collect::<Vec<_>>()
        ),
    );
}

/// 3. Segment-length bound on 1000 seeded atomic measures with
/// ω⁺ ≤ 2π - 0.1: zero violations beyond 1e-4 relative.
#[test]
fn criterion_3_segment_bound_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut instances = Vec::with_capacity(1000);
    while instances.len() < 1000 {
        let mu = verify::random_atomic_measure(&mut rng, 8, TAU - 0.1);
        let (z, zp) = verify::random_probe_pair(&mut rng);
        if z != zp {
            instances.push((mu, z, zp));
        }
    }
    let reports: Vec<ValidationReport> = instances
        .par_iter()
        .map(|(mu, z, zp)| verify::check_segment_bound(mu, *z, *zp).unwrap())
        .collect();
    let fails = reports.iter().filter(|r| !r.pass).count();
    let tightest = reports.iter().map(|r| r.left / r.right).fold(0.0, f64::max);
    verdict(
        "3 (segment bound sweep)",
        fails == 0,
        &format!("1000 instances, {fails} violations, tightest left/right {tightest:.3}"),
    );
}

/// 4. Ball-area bounds: the upper bound holds on 200 seeded instances; cone
/// instances match θr²/2 within 1% and satisfy the stated lower bound.
#[test]
fn criterion_4_area_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut instances = Vec::with_capacity(200);
    for _ in 0..200 {
        let mu = verify::random_atomic_measure(&mut rng, 5, TAU - 0.3);
        let r_c = 0.15 * rng.random::<f64>();
        let phi = TAU * rng.random::<f64>();
        let x = c(r_c * phi.cos(), r_c * phi.sin());
        let r = rng.random_range(0.08..0.16);
        instances.push((mu, x, r));
    }
    let upper_fails: usize = instances
        .par_iter()
        .map(|(mu, x, r)| {
            let metric = SingularMetric::open(mu.clone(), HarmonicTerm::zero()).unwrap();
            let rep = verify::check_area_bounds(&metric, *x, *r, 6).unwrap();
            usize::from(!rep.upper.pass)
        })
        .sum();

    // cone instances: θ = 3π/2 (k = π/2) and θ = 3π (k = -π), ball inside
    // the chart for the chosen radii
    let mut worst_cone: f64 = 0.0;
    let mut lower_ok = true;
    for (mass, radii) in [(PI / 2.0, [0.15, 0.25]), (-PI, [0.15, 0.2])] {
        let metric = SingularMetric::open(
            CurvatureMeasure::single_atom(c(0.0, 0.0), mass).unwrap(),
            HarmonicTerm::zero(),
        )
        .unwrap();
        let theta = TAU - mass;
        for r in radii {
            let rep = verify::check_area_bounds(&metric, c(0.0, 0.0), r, 7).unwrap();
            let want = theta * r * r / 2.0;
            worst_cone = worst_cone.max((rep.area - want).abs() / want);
            lower_ok &= rep.lower.pass && rep.upper.pass;
        }
    }
    verdict(
        "4 (area bounds)",
        upper_fails == 0 && worst_cone < 0.01 && lower_ok,
        &format!(
            "200 random upper-bound fails {upper_fails}, worst cone-area error {worst_cone:.3e}, lower bounds ok {lower_ok}"
        ),
    );
}

/// 5. Troyanov bound: the three listed instances reproduce the closed-form
/// integrals π/4, π, 4π/√2 within 0.5% and pass the bound.
#[test]
fn criterion_5_troyanov() {
    let cases: [(CurvatureMeasure, f64, f64); 3] = [
        (CurvatureMeasure::empty(), 2.0, PI / 4.0),
        (CurvatureMeasure::single_atom(c(0.0, 0.0), PI / 2.0).unwrap(), 2.0, PI),
        (
            CurvatureMeasure::single_atom(c(0.0, 0.0), PI).unwrap(),
            1.5,
            4.0 * PI / 2f64.sqrt(),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for (nu, p, want) in &cases {
        let rep = verify::check_troyanov(nu, *p).unwrap();
        worst = worst.max((rep.left - want).abs() / want);
        all_pass &= rep.pass;
    }
    verdict(
        "5 (troyanov bound)",
        worst < 0.005 && all_pass,
        &format!("worst integral error {worst:.3e}, bounds pass {all_pass}"),
    );
}

/// 6. Cusp divergence: per-level estimates under ω = 2πδ₀ grow by ≥ 0.5 per
/// dyadic level from 5 through 10; the (2π - 0.2) control converges with
/// level-10 vs level-9 change below 1e-3.
#[test]
fn criterion_6_cusp_divergence() {
    let rows = verify::cusp_divergence(c(0.1, 0.0), 5..=10, TAU).unwrap();
    let min_inc = rows
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::INFINITY, f64::min);
    let control = verify::cusp_divergence(c(0.1, 0.0), 9..=10, TAU - 0.2).unwrap();
    let change = (control[1].1 - control[0].1).abs();
    verdict(
        "6 (cusp divergence)",
        min_inc >= 0.5 && change < 1e-3,
        &format!(
            "levels {:?}, min increment {min_inc:.4}, control change {change:.2e}",
            rows.iter().map(|(l, v)| format!("{l}:{v:.3}")).collect::<Vec<_>>()
        ),
    );
}

/// 7. Annulus moduli: discrete A(0.25, 0.5) at grid 512 within 1% of
/// ln2/2π; grötzsch(1/√2) = 0.25 within 1e-6; 50 seeded configurations
/// satisfy mod(U) ≤ mod(G(r)) at the 2% combined tolerance.
#[test]
fn criterion_7_annulus_moduli() {
    use bic_core::annulus::{self, AnnulusRegion, Obstacle, Outer};
    let round = AnnulusRegion {
        outer: Outer::Circle { center: c(0.0, 0.0), radius: 0.5 },
        obstacle: Obstacle::Disc { center: c(0.0, 0.0), radius: 0.25 },
    };
    let v = annulus::discrete_modulus(&round, 512).unwrap();
    let want = 2f64.ln() / TAU;
    let round_err = (v - want).abs() / want;

    let g = annulus::grotzsch_modulus(std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let g_err = (g - 0.25).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let configs: Vec<_> = (0..50).map(|i| scenario::random_grotzsch_config(&mut rng, i)).collect();
    let fails: usize = configs
        .par_iter()
        .map(|(region, r)| {
            let rep = annulus::check_grotzsch_bound(region, *r, 320).unwrap();
            usize::from(!rep.pass)
        })
        .sum();
    verdict(
        "7 (annulus moduli)",
        round_err < 0.01 && g_err < 1e-6 && fails == 0,
        &format!(
            "round rel err {round_err:.3e}, grötzsch err {g_err:.2e}, sweep violations {fails}/50"
        ),
    );
}

/// 8. Contractibility: the disc_check transition radius sits within 5% of
/// d·sin(θ/2) for θ ∈ {π/3, π/2, 2π/3}; θ = 3π/2 balls are discs for all
/// tested radii, apex-containing ones included.
#[test]
fn criterion_8_contractibility() {
    let d = 1.0;
    let resolution = 256;
    let mut worst: f64 = 0.0;
    for theta in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let cone = ConeSpec::new(theta).unwrap();
        let predicted = d * (theta / 2.0).sin();
        let mut lo = 0.7 * predicted;
        let mut hi = (1.3 * predicted).min(0.97 * d);
        assert!(cone.disc_check(d, lo, resolution).unwrap(), "lower bracket not a disc");
        assert!(!cone.disc_check(d, hi, resolution).unwrap(), "upper bracket still a disc");
        for _ in 0..9 {
            let mid = 0.5 * (lo + hi);
            if cone.disc_check(d, mid, resolution).unwrap() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let transition = 0.5 * (lo + hi);
        worst = worst.max((transition - predicted).abs() / predicted);
    }
    let wide = ConeSpec::new(1.5 * PI).unwrap();
    let wide_ok = [0.3, 0.8, 1.2, 2.5, 5.0]
        .iter()
        .all(|&r| wide.disc_check(d, r, resolution).unwrap());
    verdict(
        "8 (contractibility)",
        worst < 0.05 && wide_ok,
        &format!("worst transition error {worst:.3e}, wide-cone all discs {wide_ok}"),
    );
}

/// 9. Property sweeps, ≥ 100 seeded instances each: distance symmetry,
/// triangle inequality, refinement monotonicity, harmonic-shift scaling,
/// potential sandwich, decompose exactness, CLI determinism.
#[test]
fn criterion_9_property_sweeps() {
    let mut fails = Vec::new();

    // --- distance properties on 100 random instances ---
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut dist_instances = Vec::new();
    while dist_instances.len() < 100 {
        let mu = verify::random_atomic_measure(&mut rng, 4, TAU - 0.5);
        let z = verify::random_probe_pair(&mut rng).0;
        let zp = verify::random_probe_pair(&mut rng).0;
        let zpp = verify::random_probe_pair(&mut rng).0;
        if z != zp && zp != zpp && z != zpp {
            dist_instances.push((mu, z, zp, zpp));
        }
    }
    let results: Vec<(bool, bool, bool)> = dist_instances
        .par_iter()
        .map(|(mu, z, zp, zpp)| {
            let metric = SingularMetric::open(mu.clone(), HarmonicTerm::zero()).unwrap();
            let d01 = metric.distance(*z, *zp, 6).unwrap();
            let d10 = metric.distance(*zp, *z, 6).unwrap();
            // canonical endpoint ordering makes symmetry exact
            let sym = (d01.estimate - d10.estimate).abs()
                <= 2.0 * bic_core::metric::LENGTH_REL_TOL * d01.estimate.abs();
            let d12 = metric.distance(*zp, *zpp, 6).unwrap();
            let d02 = metric.distance(*z, *zpp, 6).unwrap();
            // triangle inequality within the reported error bracket
            let bracket = d02
                .per_level
                .last()
                .map(|l| (l.graph_value - l.value).max(0.0))
                .unwrap_or(0.0);
            let slack = 3.0 * (bracket + 1e-6 * d02.estimate.abs());
            let tri = d02.estimate <= d12.estimate + d01.estimate + slack;
            // per-level estimates non-increasing (best curve carried forward)
            let mono = d02.per_level.windows(2).all(|w| w[1].value <= w[0].value);
            (sym, tri, mono)
        })
        .collect();
    let sym_fails = results.iter().filter(|r| !r.0).count();
    let tri_fails = results.iter().filter(|r| !r.1).count();
    let mono_fails = results.iter().filter(|r| !r.2).count();
    if sym_fails > 0 {
        fails.push(format!("symmetry {sym_fails}"));
    }
    if tri_fails > 0 {
        fails.push(format!("triangle {tri_fails}"));
    }
    if mono_fails > 0 {
        fails.push(format!("monotonicity {mono_fails}"));
    }

    // --- harmonic shift: h -> h + c scales lengths by exactly e^c ---
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut shift_fails = 0;
    for _ in 0..100 {
        let mu = verify::random_atomic_measure(&mut rng, 3, TAU - 1.0);
        let a = rng.random_range(-0.5..0.5);
        let b = rng.random_range(-0.5..0.5);
        let shift = rng.random_range(-1.0..1.0);
        let h0 = HarmonicTerm::poly(vec![(0.0, 0.0), (a, b)]).unwrap();
        let h1 = HarmonicTerm::poly(vec![(shift, 0.0), (a, b)]).unwrap();
        let m0 = SingularMetric::open(mu.clone(), h0).unwrap();
        let m1 = SingularMetric::open(mu, h1).unwrap();
        let (z, zp) = verify::random_probe_pair(&mut rng);
        if z == zp {
            continue;
        }
        let curve = PolyCurve::new(vec![z, 0.5 * (z + zp) + c(0.01, -0.02), zp]).unwrap();
        let l0 = m0.curve_length(&curve).unwrap();
        let l1 = m1.curve_length(&curve).unwrap();
        if ((l1 / l0).ln() - shift).abs() > 1e-11 {
            shift_fails += 1;
        }
    }
    if shift_fails > 0 {
        fails.push(format!("harmonic shift {shift_fails}"));
    }

    // --- potential sandwich on 100 instances ---
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut sandwich_fails = 0;
    for _ in 0..100 {
        let mu = verify::random_atomic_measure(&mut rng, 6, TAU);
        let (plus, minus) = mu.decompose();
        let z = verify::random_probe_pair(&mut rng).0;
        let v = bic_core::eval_potential(&mu, z);
        let vp = bic_core::eval_potential(&plus, z);
        let vm = bic_core::eval_potential(&minus, z);
        if let (Ok(v), Ok(vp), Ok(vm)) = (v, vp, vm) {
            let tol = 1e-10 * (1.0 + vp.abs() + vm.abs());
            if !(-vm - tol <= v && v <= vp + tol && vp >= -tol && vm >= -tol) {
                sandwich_fails += 1;
            }
        }
    }
    if sandwich_fails > 0 {
        fails.push(format!("potential sandwich {sandwich_fails}"));
    }

    // --- decompose exactness on 100 instances ---
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut decomp_fails = 0;
    for _ in 0..100 {
        let mu = verify::random_atomic_measure(&mut rng, 8, TAU);
        let (plus, minus) = mu.decompose();
        for atom in mu.atoms() {
            let side = if atom.mass > 0.0 { &plus } else { &minus };
            let found = side
                .atoms()
                .iter()
                .any(|a| a.position == atom.position && a.mass == atom.mass.abs());
            if !found {
                decomp_fails += 1;
            }
        }
        if plus.total(Part::Minus) != 0.0 || minus.total(Part::Minus) != 0.0 {
            decomp_fails += 1;
        }
        let signed = mu.total(Part::Signed);
        let recombined = plus.total(Part::Plus) - minus.total(Part::Plus);
        if (signed - recombined).abs() > 1e-12 * signed.abs().max(1.0) {
            decomp_fails += 1;
        }
    }
    if decomp_fails > 0 {
        fails.push(format!("decompose {decomp_fails}"));
    }

    // --- CLI determinism: a 100-row seeded sweep runs byte-identically ---
    let text = r#"{"command":"validate","seed":7,"validate":{"suite":"segment_bound","count":100}}"#;
    let sc = Scenario::from_json(text).unwrap();
    let a = scenario::run_scenario(&sc).unwrap();
    let b = scenario::run_scenario(&sc).unwrap();
    if a.csv != b.csv || a.summary.to_string() != b.summary.to_string() {
        fails.push("cli determinism".into());
    }
    if a.failures != 0 {
        fails.push(format!("cli sweep failures {}", a.failures));
    }

    verdict(
        "9 (property sweeps)",
        fails.is_empty(),
        &if fails.is_empty() {
            "symmetry, triangle, monotonicity, harmonic shift, sandwich, decompose, determinism all clean".to_string()
        } else {
            fails.join(", ")
        },
    );
}
