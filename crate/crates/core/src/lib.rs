//! Numerical laboratory for singular conformal metrics
//! `g = e^{2V[ω] + 2h} |dz|²` on the half-disc chart `D(1/2)`: potentials of
//! signed curvature measures, curve lengths and intrinsic distances, areas,
//! Euclidean-cone oracles, conformal moduli of annuli, and validators for
//! the classical inequalities tying them together.

pub mod annulus;
pub mod cone;
pub mod geom;
pub mod grid;
pub mod measure;
pub mod metric;
pub mod potential;
pub mod quad2d;
pub mod quadrature;
pub mod scenario;
pub mod verify;

pub use measure::{Atom, CellDensity, CircleLayer, CurvatureMeasure, Part, CHART_RADIUS};
pub use metric::{
    BoundaryMode, DistanceEstimate, MetricError, PolyCurve, Region, SingularMetric,
};
pub use potential::{eval_potential, FluxRep, HarmonicTerm, PotentialError};

pub use num_complex::Complex64;
