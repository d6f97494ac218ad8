//! Python bindings: curvature measures, harmonic terms, the singular metric
//! with its distance/length/area queries, the cone oracle, annulus moduli
//! and the scenario runner.
//!
//! Build the importable module with
//! `cargo build -p bic-py --release --features extension-module`.

use bic_core::scenario::{MeasureSpec, Scenario};
use bic_core::{
    annulus, cone, verify, BoundaryMode, Complex64, CurvatureMeasure, HarmonicTerm, Part,
    PolyCurve, Region, SingularMetric,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

/// Signed curvature measure on the closed half-disc chart.
#[pyclass(name = "Measure", from_py_object)]
#[derive(Clone)]
struct PyMeasure {
    inner: CurvatureMeasure,
}

#[pymethods]
impl PyMeasure {
    /// Builds from the scenario JSON fragment
    /// `{"atoms": [...], "layers": [...], "density": {...}}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: MeasureSpec = serde_json::from_str(text).map_err(err)?;
        Ok(PyMeasure { inner: spec.build().map_err(err)? })
    }

    #[staticmethod]
    fn empty() -> Self {
        PyMeasure { inner: CurvatureMeasure::empty() }
    }

    #[staticmethod]
    fn atom(x: f64, y: f64, mass: f64) -> PyResult<Self> {
        Ok(PyMeasure { inner: CurvatureMeasure::single_atom(c(x, y), mass).map_err(err)? })
    }

    fn plus_total(&self) -> f64 {
        self.inner.total(Part::Plus)
    }

    fn minus_total(&self) -> f64 {
        self.inner.total(Part::Minus)
    }

    /// Mass of the requested part (`"plus" | "minus" | "signed"`) in the
    /// open ball `B((cx, cy), r)`.
    fn ball_mass(&self, cx: f64, cy: f64, r: f64, which: &str) -> PyResult<f64> {
        let part = match which {
            "plus" => Part::Plus,
            "minus" => Part::Minus,
            "signed" => Part::Signed,
            other => return Err(PyValueError::new_err(format!("unknown part `{other}`"))),
        };
        self.inner.ball_mass(c(cx, cy), r, part).map_err(err)
    }

    fn no_cusp(&self) -> bool {
        self.inner.no_cusp()
    }

    fn decompose(&self) -> (PyMeasure, PyMeasure) {
        let (p, m) = self.inner.decompose();
        (PyMeasure { inner: p }, PyMeasure { inner: m })
    }

    /// `V[ω]` at a point.
    fn potential(&self, x: f64, y: f64) -> PyResult<f64> {
        bic_core::eval_potential(&self.inner, c(x, y)).map_err(err)
    }
}

/// Harmonic term `Σ_j Re((a_j + i b_j) z^j)`.
#[pyclass(name = "Harmonic", from_py_object)]
#[derive(Clone)]
struct PyHarmonic {
    inner: HarmonicTerm,
}

#[pymethods]
impl PyHarmonic {
    #[new]
    fn new(coeffs: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(PyHarmonic { inner: HarmonicTerm::poly(coeffs).map_err(err)? })
    }

    /// Attaches the circle-flux representation on `∂D(radius)`.
    fn with_flux(&self, radius: f64) -> PyResult<Self> {
        Ok(PyHarmonic { inner: self.inner.clone().with_flux(radius).map_err(err)? })
    }

    fn eval(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.eval(c(x, y)).map_err(err)
    }

    fn eval_via_flux(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.eval_via_flux(c(x, y)).map_err(err)
    }
}

/// The singular conformal metric `e^{2V[ω] + 2h} |dz|²`.
#[pyclass(name = "Metric")]
struct PyMetric {
    inner: SingularMetric,
}

#[pymethods]
impl PyMetric {
    #[new]
    #[pyo3(signature = (measure, harmonic = None, mode = "open"))]
    fn new(measure: PyMeasure, harmonic: Option<PyHarmonic>, mode: &str) -> PyResult<Self> {
        let mode = match mode {
            "open" => BoundaryMode::Open,
            "closed" => BoundaryMode::Closed,
            other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
        };
        let h = harmonic.map(|h| h.inner).unwrap_or_default();
        Ok(PyMetric { inner: SingularMetric::new(measure.inner, h, mode).map_err(err)? })
    }

    /// Conformal factor `e^{V+h}` at a point.
    fn factor(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.factor(c(x, y)).map_err(err)
    }

    /// Length of the polyline through the given `(x, y)` vertices.
    fn curve_length(&self, vertices: Vec<(f64, f64)>) -> PyResult<f64> {
        let pts = vertices.into_iter().map(|(x, y)| c(x, y)).collect();
        let curve = PolyCurve::new(pts).map_err(err)?;
        self.inner.curve_length(&curve).map_err(err)
    }

    /// Distance estimate; returns `(estimate, extrapolated, per_level)`
    /// where `per_level` is a list of `(level, graph_value, value)`.
    #[pyo3(signature = (ax, ay, bx, by, levels = 7))]
    fn distance(
        &self,
        ax: f64,
        ay: f64,
        bx: f64,
        by: f64,
        levels: u32,
    ) -> PyResult<(f64, Option<f64>, Vec<(u32, f64, f64)>)> {
        let est = self.inner.distance(c(ax, ay), c(bx, by), levels).map_err(err)?;
        Ok((
            est.estimate,
            est.extrapolated,
            est.per_level.iter().map(|l| (l.level, l.graph_value, l.value)).collect(),
        ))
    }

    /// Conformal area of `disc((cx, cy), r)`.
    fn area_disc(&self, cx: f64, cy: f64, r: f64) -> PyResult<f64> {
        self.inner.area(Region::Disc { center: c(cx, cy), radius: r }).map_err(err)
    }

    fn area_chart(&self) -> PyResult<f64> {
        self.inner.area(Region::Chart).map_err(err)
    }
}

/// Euclidean cone of angle theta.
#[pyclass(name = "Cone")]
struct PyCone {
    inner: cone::ConeSpec,
}

#[pymethods]
impl PyCone {
    #[new]
    fn new(theta: f64) -> PyResult<Self> {
        Ok(PyCone { inner: cone::ConeSpec::new(theta).map_err(err)? })
    }

    fn curvature(&self) -> f64 {
        self.inner.curvature()
    }

    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    /// Distance between `(r1, phi1)` and `(r2, phi2)` in cone coordinates.
    fn distance(&self, r1: f64, phi1: f64, r2: f64, phi2: f64) -> f64 {
        self.inner.distance(cone::ConePoint::new(r1, phi1), cone::ConePoint::new(r2, phi2))
    }

    /// Contractibility radius at apex-distance `d` (`inf` when infinite).
    fn cont_radius(&self, d: f64) -> PyResult<f64> {
        self.inner.cont_radius(d).map_err(err)
    }

    /// Whether the closed graph-metric ball of radius `r` around the point
    /// at distance `d` from the apex is a combinatorial disc.
    #[pyo3(signature = (d, r, resolution = 256))]
    fn disc_check(&self, d: f64, r: f64, resolution: usize) -> PyResult<bool> {
        self.inner.disc_check(d, r, resolution).map_err(err)
    }
}

/// Chart-to-cone coordinate change for `g = |z|^{2β}|dz|²`.
#[pyfunction]
fn chart_to_cone(beta: f64, x: f64, y: f64) -> PyResult<(f64, f64)> {
    let p = cone::chart_to_cone(beta, c(x, y)).map_err(err)?;
    Ok((p.radius, p.angle))
}

/// Single-atom chart distance straight from the cone oracle.
#[pyfunction]
fn cone_chart_distance(beta: f64, ax: f64, ay: f64, bx: f64, by: f64) -> PyResult<f64> {
    cone::chart_cone_distance(beta, c(ax, ay), c(bx, by)).map_err(err)
}

#[pyfunction]
fn modulus_round(r1: f64, r2: f64) -> PyResult<f64> {
    annulus::modulus_round(r1, r2).map_err(err)
}

#[pyfunction]
fn grotzsch_modulus(r: f64) -> PyResult<f64> {
    annulus::grotzsch_modulus(r).map_err(err)
}

/// Discrete modulus of the annulus described by the scenario JSON fragment
/// `{"outer": {...}, "obstacle": {...}}`.
#[pyfunction]
#[pyo3(signature = (region_json, grid = 512))]
fn discrete_modulus(region_json: &str, grid: usize) -> PyResult<f64> {
    let spec: bic_core::scenario::AnnulusSpec = serde_json::from_str(region_json).map_err(err)?;
    annulus::discrete_modulus(&spec.build().map_err(err)?, grid).map_err(err)
}

/// Segment-length bound report as `(left, right, pass)`.
#[pyfunction]
fn check_segment_bound(
    measure: PyMeasure,
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
) -> PyResult<(f64, f64, bool)> {
    let rep = verify::check_segment_bound(&measure.inner, c(ax, ay), c(bx, by)).map_err(err)?;
    Ok((rep.left, rep.right, rep.pass))
}

/// Runs a scenario given as JSON text; returns `(csv, summary_json, fails)`.
#[pyfunction]
fn run_scenario(text: &str) -> PyResult<(String, String, usize)> {
    let scenario = Scenario::from_json(text).map_err(err)?;
    let result = bic_core::scenario::run_scenario(&scenario).map_err(err)?;
    Ok((result.csv, result.summary.to_string(), result.failures))
}

#[pymodule]
fn biclab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyHarmonic>()?;
    m.add_class::<PyMetric>()?;
    m.add_class::<PyCone>()?;
    m.add_function(wrap_pyfunction!(chart_to_cone, m)?)?;
    m.add_function(wrap_pyfunction!(cone_chart_distance, m)?)?;
    m.add_function(wrap_pyfunction!(modulus_round, m)?)?;
    m.add_function(wrap_pyfunction!(grotzsch_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(check_segment_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
