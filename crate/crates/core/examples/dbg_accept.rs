use bic_core::cone::chart_cone_distance;
use bic_core::{BoundaryMode, Complex64, CurvatureMeasure, HarmonicTerm, SingularMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

fn main() {
    let which: String = std::env::args().nth(1).unwrap_or_else(|| "cone".into());
    match which.as_str() {
        "cone" => cone_equiv(),
        "conv" => convergence(),
        "ball" => ball_area(),
        "grotz" => grotzsch(),
        _ => {}
    }
}

fn cone_equiv() {
    let t0 = Instant::now();
    let levels: u32 = std::env::args()
        .nth(2)
        .map(|v| v.parse().unwrap())
        .unwrap_or(9);
    for mass in [-PI, PI / 2.0, PI, 1.5 * PI] {
        let beta = -mass / TAU;
        let metric = SingularMetric::new(
            CurvatureMeasure::single_atom(Complex64::new(0.0, 0.0), mass).unwrap(),
            HarmonicTerm::zero(),
            BoundaryMode::Open,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let mut worst = 0.0f64;
        let mut worst_pair = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for _ in 0..20 {
            let sample = |rng: &mut ChaCha8Rng| {
                let r = rng.random_range(0.1..0.4);
                let phi = TAU * rng.random::<f64>();
                Complex64::new(r * phi.cos(), r * phi.sin())
            };
            let z = sample(&mut rng);
            let mut zp = sample(&mut rng);
            while (z - zp).norm() < 0.05 {
                zp = sample(&mut rng);
            }
            let oracle = chart_cone_distance(beta, z, zp).unwrap();
            let est = metric.distance(z, zp, levels).unwrap().estimate;
            let rel = (est - oracle).abs() / oracle;
            if rel > worst {
                worst = rel;
                worst_pair = (z, zp);
            }
        }
        eprintln!(
            "mass {mass:+.4}: worst rel {:.3e} at ({}, {}), t = {:?}",
            worst, worst_pair.0, worst_pair.1, t0.elapsed()
        );
    }
    eprintln!("total {:?}", t0.elapsed());
}

fn convergence() {
    use bic_core::measure::CircleLayer;
    let level: u32 = std::env::args().nth(2).map(|v| v.parse().unwrap()).unwrap_or(7);
    let t0 = Instant::now();
    let layer = CircleLayer::uniform(Complex64::new(0.0, 0.0), 0.25, PI).unwrap();
    let probes: Vec<(Complex64, Complex64)> = (0..5)
        .map(|k| {
            let phi = TAU * k as f64 / 5.0 + 0.13;
            let p = Complex64::from_polar(0.35, phi);
            (p, -p)
        })
        .collect();
    let table =
        bic_core::verify::convergence_experiment(&layer, &[4, 8, 16, 32, 64], &probes, level)
            .unwrap();
    for (m, e) in table.max_errors(&[4, 8, 16, 32, 64]) {
        eprintln!("m = {m:3}: max rel error {e:.5}");
    }
    eprintln!("t = {:?}", t0.elapsed());
}

fn ball_area() {
    let level: u32 = std::env::args().nth(2).map(|v| v.parse().unwrap()).unwrap_or(7);
    let t0 = Instant::now();
    for (mass, name) in [(PI / 2.0, "theta=3pi/2"), (-PI, "theta=3pi")] {
        let metric = SingularMetric::new(
            CurvatureMeasure::single_atom(Complex64::new(0.0, 0.0), mass).unwrap(),
            HarmonicTerm::zero(),
            BoundaryMode::Open,
        )
        .unwrap();
        let theta = TAU - mass;
        for r in [0.15, 0.25] {
            let rep =
                bic_core::verify::check_area_bounds(&metric, Complex64::new(0.0, 0.0), r, level)
                    .unwrap();
            let want = theta * r * r / 2.0;
            eprintln!(
                "{name} r={r}: area {:.6} vs θr²/2 {:.6} (rel {:.3e}), upper {} lower {}",
                rep.area,
                want,
                (rep.area - want).abs() / want,
                rep.upper.pass,
                rep.lower.pass
            );
        }
    }
    eprintln!("t = {:?}", t0.elapsed());
}

fn grotzsch() {
    let grid: usize = std::env::args().nth(2).map(|v| v.parse().unwrap()).unwrap_or(512);
    let t0 = Instant::now();
    let v = bic_core::annulus::discrete_modulus(
        &bic_core::annulus::AnnulusRegion {
            outer: bic_core::annulus::Outer::Circle {
                center: Complex64::new(0.0, 0.0),
                radius: 0.5,
            },
            obstacle: bic_core::annulus::Obstacle::Disc {
                center: Complex64::new(0.0, 0.0),
                radius: 0.25,
            },
        },
        grid,
    )
    .unwrap();
    let want = 2f64.ln() / TAU;
    eprintln!("round at {grid}: {v:.8} vs {want:.8} rel {:.4e}, t={:?}", (v - want).abs() / want, t0.elapsed());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for idx in 0..12 {
        let (region, r) = bic_core::scenario::random_grotzsch_config(&mut rng, idx);
        match bic_core::annulus::check_grotzsch_bound(&region, r, 384) {
            Ok(rep) => {
                let ratio = rep.left / rep.right;
                if ratio > worst {
                    worst = ratio;
                }
                eprintln!("cfg {idx}: left {:.5} right {:.5} ratio {:.4} pass {}", rep.left, rep.right, ratio, rep.pass);
            }
            Err(e) => eprintln!("cfg {idx}: ERR {e}"),
        }
    }
    eprintln!("worst ratio {worst:.4}, t = {:?}", t0.elapsed());
}
