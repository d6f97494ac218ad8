//! Integration checks of the distance engine against closed forms and the
//! boundary-mode semantics.

use bic_core::measure::Atom;
use bic_core::{
    BoundaryMode, Complex64, CurvatureMeasure, HarmonicTerm, MetricError, SingularMetric,
};
use std::f64::consts::PI;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

#[test]
fn euclidean_distance_is_exact() {
    let m = SingularMetric::open(CurvatureMeasure::empty(), HarmonicTerm::zero()).unwrap();
    let est = m.distance(c(-0.2, 0.0), c(0.2, 0.0), 6).unwrap();
    assert!((est.estimate - 0.4).abs() < 1e-9, "{}", est.estimate);
    // coincident endpoints
    let zero = m.distance(c(0.1, 0.1), c(0.1, 0.1), 6).unwrap();
    assert_eq!(zero.estimate, 0.0);
}

#[test]
fn cone_probe_matches_unfolding_oracle() {
    // ω = (π/2)δ₀, probes 0.2 and 0.2i: the unfolded-sector chord
    let m = SingularMetric::open(
        CurvatureMeasure::single_atom(c(0.0, 0.0), PI / 2.0).unwrap(),
        HarmonicTerm::zero(),
    )
    .unwrap();
    let est = m.distance(c(0.2, 0.0), c(0.0, 0.2), 7).unwrap();
    let oracle = 0.443_078_011_108_614_2;
    assert!((est.estimate - oracle).abs() < 5e-3 * oracle, "{} vs {oracle}", est.estimate);
    // the estimate brackets from above
    assert!(est.estimate >= oracle * (1.0 - 2e-6));
}

#[test]
fn cusp_endpoint_is_a_domain_error() {
    let m = SingularMetric::open(
        CurvatureMeasure::single_atom(c(0.0, 0.0), 2.0 * PI).unwrap(),
        HarmonicTerm::zero(),
    )
    .unwrap();
    assert_eq!(m.distance(c(0.0, 0.0), c(0.1, 0.0), 5).err(), Some(MetricError::CuspEndpoint));
    // non-cusp endpoints route around the cusp and stay finite
    let est = m.distance(c(-0.2, 0.0), c(0.2, 0.0), 6).unwrap();
    assert!(est.estimate.is_finite());
    assert!(est.estimate > 0.4);
}

#[test]
fn closure_mode_never_exceeds_open_mode() {
    let atoms: Vec<Atom> = (-3..=3)
        .map(|k| Atom { position: c(k as f64 / 10.0, 0.0), mass: 0.7 })
        .collect();
    let mu = CurvatureMeasure::from_atoms(atoms).unwrap();
    let open = SingularMetric::open(mu.clone(), HarmonicTerm::zero()).unwrap();
    let closed = SingularMetric::closed(mu).unwrap();
    for (z, zp) in [
        (c(-0.49, 0.0), c(0.49, 0.0)),
        (c(-0.3, 0.1), c(0.3, -0.1)),
        (c(0.0, 0.45), c(0.0, -0.45)),
    ] {
        let d_open = open.distance(z, zp, 6).unwrap().estimate;
        let d_closed = closed.distance(z, zp, 6).unwrap().estimate;
        assert!(
            d_closed <= d_open * (1.0 + 2e-6) + 1e-9,
            "closure {d_closed} vs open {d_open} at {z}"
        );
    }
}

/// Heavy positive atoms along the diameter: the closed-mode grid admits the
/// boundary node at ±i/2 and its crossing is strictly cheaper than any
/// interior grid path at the same level.
#[test]
fn boundary_hugging_path_wins_in_closed_mode() {
    // total ω⁺ far above 2π is fine: the no-cusp criterion is pointwise.
    // heavy atoms on the diameter force a near-boundary crossing; the pair
    // just inside ±i/2 makes the exact boundary node strictly cheaper than
    // the closest interior column.
    let mut atoms: Vec<Atom> = (-4..=4)
        .map(|k| Atom { position: c(k as f64 / 10.0, 0.0), mass: 1.5 })
        .collect();
    atoms.push(Atom { position: c(0.0, 0.47), mass: 4.8 });
    atoms.push(Atom { position: c(0.0, -0.47), mass: 4.8 });
    let mu = CurvatureMeasure::from_atoms(atoms).unwrap();
    let open = SingularMetric::open(mu.clone(), HarmonicTerm::zero()).unwrap();
    let closed = SingularMetric::closed(mu).unwrap();
    let (z, zp) = (c(-0.49, 0.0), c(0.49, 0.0));
    let level = 6;
    let open_graph = open.distance(z, zp, level).unwrap().per_level.last().unwrap().graph_value;
    let closed_graph =
        closed.distance(z, zp, level).unwrap().per_level.last().unwrap().graph_value;
    assert!(
        closed_graph < open_graph,
        "closed graph path {closed_graph} should beat open {open_graph}"
    );
}

#[test]
fn metric_ball_masks() {
    // Euclidean: the mask is the Euclidean disc's node set
    let m = SingularMetric::open(CurvatureMeasure::empty(), HarmonicTerm::zero()).unwrap();
    let level = 5;
    let field = m.distance_field(c(0.0, 0.0), level).unwrap();
    let r = 0.21;
    let mask = field.mask(r);
    let g = field.graph();
    let mut wrong = 0;
    for idx in 0..g.n_nodes() {
        let p = g.node_pos(idx as u32);
        let inside_euclid = p.norm() <= r;
        let in_mask = mask[idx];
        // graph distances overestimate slightly; allow the shell of width
        // one step to disagree
        if inside_euclid != in_mask && (p.norm() - r).abs() > 1.2 * g.step() {
            wrong += 1;
        }
    }
    assert_eq!(wrong, 0);
    // r = 0: only the center's node
    let tiny = field.mask(0.0);
    assert_eq!(tiny.iter().filter(|&&b| b).count(), 1);
    let center_idx = g.node_at(0, 0).unwrap();
    assert!(tiny[center_idx as usize]);

    // cone mask: a probe at the oracle distance is included, a farther one
    // is excluded
    let cone = SingularMetric::open(
        CurvatureMeasure::single_atom(c(0.0, 0.0), PI / 2.0).unwrap(),
        HarmonicTerm::zero(),
    )
    .unwrap();
    let field = cone.distance_field(c(0.0, 0.0), 6).unwrap();
    let probe = c(0.2, 0.0);
    let beta = -0.25;
    let oracle = 0.2f64.powf(1.0 + beta) / (1.0 + beta);
    let mask = field.mask(oracle * 1.02);
    let gg = field.graph();
    let probe_idx = gg.node_at((0.2 / gg.step()).round() as i64, 0).unwrap();
    assert!(mask[probe_idx as usize], "probe node at oracle distance included");
    let farther = gg.node_at((0.3 / gg.step()).round() as i64, 0).unwrap();
    assert!(!mask[farther as usize], "farther node excluded");
}

#[test]
fn boundary_atom_flag_is_reported() {
    let mu = CurvatureMeasure::single_atom(c(0.5, 0.0), 1.0).unwrap();
    let m = SingularMetric::closed(mu).unwrap();
    let est = m.distance(c(-0.2, 0.0), c(0.2, 0.0), 5).unwrap();
    assert!(est.boundary_atoms);
}

#[test]
fn richardson_extrapolation_is_reported() {
    let m = SingularMetric::open(
        CurvatureMeasure::single_atom(c(0.05, 0.02), 1.0).unwrap(),
        HarmonicTerm::zero(),
    )
    .unwrap();
    let est = m.distance(c(-0.3, 0.0), c(0.3, 0.1), 6).unwrap();
    assert_eq!(est.per_level.len(), 4);
    let ex = est.extrapolated.unwrap();
    assert!(ex.is_finite() && ex <= est.estimate + 1e-12);
}
