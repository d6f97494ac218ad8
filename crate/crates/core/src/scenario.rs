//! Scenario files: JSON schema, dispatch to the engines, and deterministic
//! CSV / JSON-summary emission. One scenario per run; identical scenario
//! and seed produce byte-identical output.

use crate::annulus::{self, AnnulusRegion, Obstacle, Outer};
use crate::cone::ConeSpec;
use crate::measure::{Atom, CellDensity, CircleLayer, CurvatureMeasure};
use crate::metric::{BoundaryMode, Region, SingularMetric};
use crate::potential::HarmonicTerm;
use crate::verify::{self, ValidationReport};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario field error: {0}")]
    Field(String),
    #[error("engine error: {0}")]
    Engine(String),
}

impl From<crate::measure::MeasureError> for ScenarioError {
    fn from(e: crate::measure::MeasureError) -> Self {
        ScenarioError::Field(e.to_string())
    }
}

impl From<crate::metric::MetricError> for ScenarioError {
    fn from(e: crate::metric::MetricError) -> Self {
        ScenarioError::Engine(e.to_string())
    }
}

impl From<crate::potential::PotentialError> for ScenarioError {
    fn from(e: crate::potential::PotentialError) -> Self {
        ScenarioError::Engine(e.to_string())
    }
}

impl From<crate::verify::VerifyError> for ScenarioError {
    fn from(e: crate::verify::VerifyError) -> Self {
        ScenarioError::Engine(e.to_string())
    }
}

impl From<crate::annulus::AnnulusError> for ScenarioError {
    fn from(e: crate::annulus::AnnulusError) -> Self {
        ScenarioError::Engine(e.to_string())
    }
}

impl From<crate::cone::ConeError> for ScenarioError {
    fn from(e: crate::cone::ConeError) -> Self {
        ScenarioError::Engine(e.to_string())
    }
}

/// 17-significant-digit decimal formatting, reproducible across platforms.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtomSpec {
    pub p: [f64; 2],
    pub k: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LayerSpec {
    pub c: [f64; 2],
    #[serde(rename = "R")]
    pub radius: f64,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<f64>>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DensitySpec {
    pub n: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub layers: Vec<LayerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<CurvatureMeasure, ScenarioError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { position: Complex64::new(a.p[0], a.p[1]), mass: a.k })
            .collect();
        let mut layers = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            layers.push(build_layer(l)?);
        }
        let density = match &self.density {
            Some(d) => Some(CellDensity::new(d.n, d.values.clone())?),
            None => None,
        };
        Ok(CurvatureMeasure::new(atoms, layers, density)?)
    }
}

pub fn build_layer(l: &LayerSpec) -> Result<CircleLayer, ScenarioError> {
    let center = Complex64::new(l.c[0], l.c[1]);
    match &l.density {
        None => Ok(CircleLayer::uniform(center, l.radius, l.mass)?),
        Some(values) => {
            let layer = CircleLayer::piecewise(center, l.radius, l.phase, values.clone())?;
            if (layer.total_mass() - l.mass).abs() > 1e-9 * l.mass.abs().max(1.0) {
                return Err(ScenarioError::Field(format!(
                    "layer mass {} disagrees with the density integral {}",
                    l.mass,
                    layer.total_mass()
                )));
            }
            Ok(layer)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HarmonicSpec {
    /// coefficient pairs [a_j, b_j] of Σ Re((a_j + i b_j) z^j)
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux_radius: Option<f64>,
}

impl HarmonicSpec {
    pub fn build(&self) -> Result<HarmonicTerm, ScenarioError> {
        let h = HarmonicTerm::poly(self.coeffs.iter().map(|c| (c[0], c[1])).collect())?;
        match self.flux_radius {
            Some(r) => Ok(h.with_flux(r)?),
            None => Ok(h),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    #[default]
    Open,
    Closed,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum RegionSpec {
    Disc([f64; 3]),
    Chart,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObstacleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OuterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnnulusSpec {
    pub outer: OuterSpec,
    pub obstacle: ObstacleSpec,
}

impl AnnulusSpec {
    pub fn build(&self) -> Result<AnnulusRegion, ScenarioError> {
        let outer = match (&self.outer.circle, &self.outer.polygon) {
            (Some(c), None) => Outer::Circle { center: Complex64::new(c[0], c[1]), radius: c[2] },
            (None, Some(p)) => {
                Outer::Polygon(p.iter().map(|q| Complex64::new(q[0], q[1])).collect())
            }
            _ => {
                return Err(ScenarioError::Field(
                    "outer needs exactly one of circle/polygon".into(),
                ))
            }
        };
        let obstacle = match (&self.obstacle.disc, &self.obstacle.segment, &self.obstacle.polygon)
        {
            (Some(d), None, None) => {
                Obstacle::Disc { center: Complex64::new(d[0], d[1]), radius: d[2] }
            }
            (None, Some(s), None) => Obstacle::Segment {
                a: Complex64::new(s[0][0], s[0][1]),
                b: Complex64::new(s[1][0], s[1][1]),
            },
            (None, None, Some(p)) => {
                Obstacle::Polygon(p.iter().map(|q| Complex64::new(q[0], q[1])).collect())
            }
            _ => {
                return Err(ScenarioError::Field(
                    "obstacle needs exactly one of disc/segment/polygon".into(),
                ))
            }
        };
        Ok(AnnulusRegion { outer, obstacle })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    SegmentBound,
    AreaBounds,
    Troyanov,
    Cusp,
    Grotzsch,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ValidateSpec {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConvergeSpec {
    pub layer: LayerSpec,
    pub ms: Vec<usize>,
    pub probes: Vec<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContSpec {
    pub theta: f64,
    pub d: f64,
    pub rs: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GrotzschCheckSpec {
    pub region: AnnulusSpec,
    pub r: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ModulusSpec {
    #[serde(default)]
    pub round: Vec<[f64; 2]>,
    #[serde(default)]
    pub grotzsch: Vec<f64>,
    #[serde(default)]
    pub regions: Vec<AnnulusSpec>,
    #[serde(default)]
    pub checks: Vec<GrotzschCheckSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Dist,
    Area,
    Validate,
    Converge,
    Cont,
    Modulus,
}

/// One scenario file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Scenario {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonic: Option<HarmonicSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<[[f64; 2]; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cont: Option<ContSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    fn metric(&self) -> Result<SingularMetric, ScenarioError> {
        let measure = self.measure.as_ref().map(|m| m.build()).transpose()?.unwrap_or_default();
        let harmonic =
            self.harmonic.as_ref().map(|h| h.build()).transpose()?.unwrap_or_default();
        let mode = match self.mode {
            ModeSpec::Open => BoundaryMode::Open,
            ModeSpec::Closed => BoundaryMode::Closed,
        };
        Ok(SingularMetric::new(measure, harmonic, mode)?)
    }
}

/// Output of a run: CSV text, JSON summary, and the overall verdict.
pub struct RunResult {
    pub csv: String,
    pub summary: serde_json::Value,
    pub failures: usize,
    pub rows: usize,
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunResult, ScenarioError> {
    let inner = || run_dispatch(scenario);
    match scenario.jobs {
        Some(jobs) if jobs > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ScenarioError::Engine(e.to_string()))?
            .install(inner),
        _ => inner(),
    }
}

fn run_dispatch(scenario: &Scenario) -> Result<RunResult, ScenarioError> {
    let mut csv = String::new();
    let mut fails = 0usize;
    let mut rows = 0usize;
    let mut extra = serde_json::Map::new();
    match scenario.command {
        Command::Dist => {
            let metric = scenario.metric()?;
            let probes = scenario
                .probes
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("dist needs probes".into()))?;
            let levels = scenario.levels.unwrap_or(7);
            csv.push_str("pair,ax,ay,bx,by,level,graph_value,estimate,extrapolated\n");
            let mut tables = Vec::new();
            for (pi, pair) in probes.iter().enumerate() {
                let z = Complex64::new(pair[0][0], pair[0][1]);
                let zp = Complex64::new(pair[1][0], pair[1][1]);
                let est = metric.distance(z, zp, levels)?;
                let mut table = Vec::new();
                for (k, le) in est.per_level.iter().enumerate() {
                    let extrap = if k + 1 == est.per_level.len() {
                        est.extrapolated.map(fmt_f).unwrap_or_default()
                    } else {
                        String::new()
                    };
                    csv.push_str(&format!(
                        "{pi},{},{},{},{},{},{},{},{extrap}\n",
                        fmt_f(z.re),
                        fmt_f(z.im),
                        fmt_f(zp.re),
                        fmt_f(zp.im),
                        le.level,
                        fmt_f(le.graph_value),
                        fmt_f(le.value),
                    ));
                    table.push(serde_json::json!({
                        "level": le.level,
                        "graph_value": le.graph_value,
                        "estimate": le.value,
                    }));
                    rows += 1;
                }
                tables.push(serde_json::json!({
                    "pair": pi,
                    "estimate": est.estimate,
                    "extrapolated": est.extrapolated,
                    "boundary_atoms": est.boundary_atoms,
                    "levels": table,
                }));
            }
            extra.insert("distances".into(), serde_json::Value::Array(tables));
        }
        Command::Area => {
            let metric = scenario.metric()?;
            let region = scenario
                .region
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("area needs a region".into()))?;
            let (reg, desc) = match region {
                RegionSpec::Disc(d) => (
                    Region::Disc { center: Complex64::new(d[0], d[1]), radius: d[2] },
                    ("disc", d[0], d[1], d[2]),
                ),
                RegionSpec::Chart => (Region::Chart, ("chart", 0.0, 0.0, 0.5)),
            };
            let value = metric.area(reg)?;
            csv.push_str("region,cx,cy,radius,area\n");
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                desc.0,
                fmt_f(desc.1),
                fmt_f(desc.2),
                fmt_f(desc.3),
                fmt_f(value)
            ));
            rows += 1;
            extra.insert("area".into(), serde_json::json!(value));
        }
        Command::Validate => {
            let spec = scenario
                .validate
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("validate needs a suite".into()))?;
            let (text, f, r) = run_suite(scenario, spec)?;
            csv.push_str(&text);
            fails += f;
            rows += r;
        }
        Command::Converge => {
            let spec = scenario
                .converge
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("converge needs its payload".into()))?;
            let layer = build_layer(&spec.layer)?;
            let probes: Vec<(Complex64, Complex64)> = spec
                .probes
                .iter()
                .map(|p| {
                    (Complex64::new(p[0][0], p[0][1]), Complex64::new(p[1][0], p[1][1]))
                })
                .collect();
            let level = scenario.levels.unwrap_or(7);
            let table = verify::convergence_experiment(&layer, &spec.ms, &probes, level)?;
            csv.push_str("probe,m,estimate,limit,rel_error\n");
            for row in &table.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.probe,
                    row.m,
                    fmt_f(row.estimate),
                    fmt_f(row.limit),
                    fmt_f(row.rel_error)
                ));
                rows += 1;
            }
            let errs: Vec<_> = table
                .max_errors(&spec.ms)
                .into_iter()
                .map(|(m, e)| serde_json::json!({"m": m, "max_rel_error": e}))
                .collect();
            extra.insert("max_errors".into(), serde_json::Value::Array(errs));
        }
        Command::Cont => {
            let spec = scenario
                .cont
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("cont needs its payload".into()))?;
            let cone = ConeSpec::new(spec.theta)?;
            csv.push_str("theta,d,r,resolution,is_disc\n");
            for &r in &spec.rs {
                let isd = cone.disc_check(spec.d, r, spec.resolution)?;
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f(spec.theta),
                    fmt_f(spec.d),
                    fmt_f(r),
                    spec.resolution,
                    isd
                ));
                rows += 1;
            }
            match cone.cont_radius(spec.d) {
                Ok(c) => {
                    extra.insert("cont_radius".into(), serde_json::json!(c));
                }
                Err(e) => {
                    extra.insert("cont_radius_flag".into(), serde_json::json!(e.to_string()));
                }
            }
        }
        Command::Modulus => {
            let spec = scenario
                .modulus
                .as_ref()
                .ok_or_else(|| ScenarioError::Field("modulus needs its payload".into()))?;
            let grid = scenario.grid.unwrap_or(512);
            csv.push_str("kind,p1,p2,value,left,right,verdict\n");
            for r in &spec.round {
                let v = annulus::modulus_round(r[0], r[1])?;
                csv.push_str(&format!(
                    "round,{},{},{},,,\n",
                    fmt_f(r[0]),
                    fmt_f(r[1]),
                    fmt_f(v)
                ));
                rows += 1;
            }
            for &r in &spec.grotzsch {
                let v = annulus::grotzsch_modulus(r)?;
                csv.push_str(&format!("grotzsch,{},,{},,,\n", fmt_f(r), fmt_f(v)));
                rows += 1;
            }
            for region in &spec.regions {
                let v = annulus::discrete_modulus(&region.build()?, grid)?;
                csv.push_str(&format!("discrete,{grid},,{},,,\n", fmt_f(v)));
                rows += 1;
            }
            for check in &spec.checks {
                let rep = annulus::check_grotzsch_bound(&check.region.build()?, check.r, grid)?;
                if !rep.pass {
                    fails += 1;
                }
                csv.push_str(&format!(
                    "check,{},,,{},{},{}\n",
                    fmt_f(check.r),
                    fmt_f(rep.left),
                    fmt_f(rep.right),
                    if rep.pass { "pass" } else { "fail" }
                ));
                rows += 1;
            }
        }
    }
    let mut summary = serde_json::Map::new();
    summary.insert(
        "config".into(),
        serde_json::to_value(scenario).map_err(ScenarioError::Parse)?,
    );
    summary.insert("rows".into(), serde_json::json!(rows));
    summary.insert(
        "verdicts".into(),
        serde_json::json!({"pass": rows.saturating_sub(fails), "fail": fails}),
    );
    for (k, v) in extra {
        summary.insert(k, v);
    }
    Ok(RunResult { csv, summary: serde_json::Value::Object(summary), failures: fails, rows })
}

fn validate_row(csv: &mut String, idx: usize, rep: &ValidationReport) -> bool {
    csv.push_str(&format!(
        "{idx},\"{}\",{},{},{},{},{}\n",
        rep.instance.replace('"', "'"),
        fmt_f(rep.left),
        fmt_f(rep.right),
        fmt_f(rep.margin),
        fmt_f(rep.tol),
        if rep.pass { "pass" } else { "fail" }
    ));
    rep.pass
}

fn run_suite(
    scenario: &Scenario,
    spec: &ValidateSpec,
) -> Result<(String, usize, usize), ScenarioError> {
    let mut csv = String::new();
    let mut fails = 0usize;
    let mut rows = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    match spec.suite {
        Suite::SegmentBound => {
            csv.push_str("index,instance,left,right,margin,tol,verdict\n");
            let count = spec.count.unwrap_or(1000);
            let mut done = 0;
            while done < count {
                let mu = verify::random_atomic_measure(&mut rng, 8, TAU - 0.1);
                let (z, zp) = verify::random_probe_pair(&mut rng);
                if z == zp {
                    continue;
                }
                let rep = verify::check_segment_bound(&mu, z, zp)?;
                if !validate_row(&mut csv, done, &rep) {
                    fails += 1;
                }
                rows += 1;
                done += 1;
            }
        }
        Suite::AreaBounds => {
            csv.push_str("index,instance,left,right,margin,tol,verdict\n");
            let count = spec.count.unwrap_or(200);
            let level = scenario.levels.unwrap_or(6);
            for idx in 0..count {
                let mu = verify::random_atomic_measure(&mut rng, 5, TAU - 0.3);
                let metric = SingularMetric::open(mu, HarmonicTerm::zero())?;
                let x = {
                    use rand::Rng;
                    let r = 0.15 * rng.random::<f64>();
                    let phi = TAU * rng.random::<f64>();
                    Complex64::new(r * phi.cos(), r * phi.sin())
                };
                let r = {
                    use rand::Rng;
                    rng.random_range(0.08..0.16)
                };
                let rep = verify::check_area_bounds(&metric, x, r, level)?;
                if !validate_row(&mut csv, idx, &rep.upper) {
                    fails += 1;
                }
                rows += 1;
            }
        }
        Suite::Troyanov => {
            csv.push_str("index,instance,left,right,margin,tol,verdict\n");
            let listed: [(CurvatureMeasure, f64); 3] = [
                (CurvatureMeasure::empty(), 2.0),
                (
                    CurvatureMeasure::single_atom(Complex64::new(0.0, 0.0), std::f64::consts::PI / 2.0)?,
                    2.0,
                ),
                (
                    CurvatureMeasure::single_atom(Complex64::new(0.0, 0.0), std::f64::consts::PI)?,
                    1.5,
                ),
            ];
            for (idx, (nu, p)) in listed.iter().enumerate() {
                let rep = verify::check_troyanov(nu, *p)?;
                if !validate_row(&mut csv, idx, &rep) {
                    fails += 1;
                }
                rows += 1;
            }
        }
        Suite::Cusp => {
            csv.push_str("index,instance,level,estimate,verdict\n");
            let levels = 5..=scenario.levels.unwrap_or(10).max(6);
            let staircase = verify::cusp_divergence(Complex64::new(0.1, 0.0), levels, TAU)?;
            let mut prev: Option<f64> = None;
            for (level, est) in &staircase {
                let ok = prev.is_none_or(|p| est - p >= 0.5);
                if !ok {
                    fails += 1;
                }
                csv.push_str(&format!(
                    "{rows},cusp-2pi,{level},{},{}\n",
                    fmt_f(*est),
                    if ok { "pass" } else { "fail" }
                ));
                rows += 1;
                prev = Some(*est);
            }
            let top = scenario.levels.unwrap_or(10).max(6);
            let control =
                verify::cusp_divergence(Complex64::new(0.1, 0.0), (top - 1)..=top, TAU - 0.2)?;
            let change = (control[1].1 - control[0].1).abs();
            let ok = change < 1e-3;
            if !ok {
                fails += 1;
            }
            for (level, est) in &control {
                csv.push_str(&format!(
                    "{rows},control-sub2pi,{level},{},{}\n",
                    fmt_f(*est),
                    if ok { "pass" } else { "fail" }
                ));
                rows += 1;
            }
        }
        Suite::Grotzsch => {
            csv.push_str("index,instance,left,right,margin,tol,verdict\n");
            let count = spec.count.unwrap_or(50);
            let grid = scenario.grid.unwrap_or(384);
            for idx in 0..count {
                let (region, r) = random_grotzsch_config(&mut rng, idx);
                let rep = annulus::check_grotzsch_bound(&region, r, grid)?;
                if !validate_row(&mut csv, idx, &rep) {
                    fails += 1;
                }
                rows += 1;
            }
        }
    }
    Ok((csv, fails, rows))
}

/// Random admissible Grötzsch configuration: an annulus inside `D(1)` whose
/// obstacle covers both 0 and `r`. Cycles through disc obstacles, shrunk
/// copies of `G(r)` itself, and a wiggly polygon snaking around `[0, r]`.
pub fn random_grotzsch_config<R: rand::Rng>(rng: &mut R, idx: usize) -> (AnnulusRegion, f64) {
    let r = rng.random_range(0.25..0.65);
    match idx % 3 {
        0 => {
            let rin: f64 = r / 2.0 + rng.random_range(0.06..0.2);
            let rout = (rin + rng.random_range(0.15..0.3)).min(0.95);
            let region = AnnulusRegion {
                outer: Outer::Circle { center: Complex64::new(r / 2.0, 0.0), radius: rout },
                obstacle: Obstacle::Disc { center: Complex64::new(r / 2.0, 0.0), radius: rin },
            };
            (region, r)
        }
        1 => {
            let rout = rng.random_range(0.8..0.98);
            let region = AnnulusRegion {
                outer: Outer::Circle { center: Complex64::new(0.0, 0.0), radius: rout },
                obstacle: Obstacle::Segment {
                    a: Complex64::new(0.0, 0.0),
                    b: Complex64::new(r, 0.0),
                },
            };
            (region, r)
        }
        _ => {
            // snake polygon around [0, r]; the centerline wiggles only
            // strictly between the two marked points, so both stay inside
            let amp = rng.random_range(0.03..0.08);
            let w = rng.random_range(0.025..0.05);
            let n = 14;
            let mut top = Vec::new();
            let mut bottom = Vec::new();
            for k in 0..=n {
                let t = k as f64 / n as f64;
                let x = -0.05 + t * (r + 0.1);
                let u = (x / r).clamp(0.0, 1.0);
                let y = amp * (3.0 * std::f64::consts::PI * u).sin() * 4.0 * u * (1.0 - u);
                top.push(Complex64::new(x, y + w));
                bottom.push(Complex64::new(x, y - w));
            }
            bottom.reverse();
            top.extend(bottom);
            let region = AnnulusRegion {
                outer: Outer::Circle { center: Complex64::new(0.0, 0.0), radius: 0.95 },
                obstacle: Obstacle::Polygon(top),
            };
            (region, r)
        }
    }
}

/// Series extraction for plotting: `(file stem, csv with header x,y)`.
pub fn plotdata(results_csv: &str) -> Result<Vec<(String, String)>, ScenarioError> {
    let mut lines = results_csv.lines();
    let header = lines.next().unwrap_or("");
    let cols: Vec<&str> = header.split(',').collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let mut series: std::collections::BTreeMap<String, Vec<(String, String)>> =
        std::collections::BTreeMap::new();
    if let (Some(pair), Some(level), Some(est)) = (find("pair"), find("level"), find("estimate")) {
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() <= est.max(level).max(pair) {
                continue;
            }
            series
                .entry(format!("pair{}", f[pair]))
                .or_default()
                .push((f[level].to_string(), f[est].to_string()));
        }
    } else if let (Some(probe), Some(m), Some(err)) = (find("probe"), find("m"), find("rel_error"))
    {
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() <= err.max(m).max(probe) {
                continue;
            }
            series
                .entry(format!("probe{}", f[probe]))
                .or_default()
                .push((f[m].to_string(), f[err].to_string()));
        }
    } else if let (Some(inst), Some(level), Some(est)) =
        (find("instance"), find("level"), find("estimate"))
    {
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() <= est.max(level).max(inst) {
                continue;
            }
            series
                .entry(f[inst].replace(['"', ' '], "_"))
                .or_default()
                .push((f[level].to_string(), f[est].to_string()));
        }
    } else {
        return Err(ScenarioError::Field(format!(
            "results header `{header}` has no plottable columns"
        )));
    }
    Ok(series
        .into_iter()
        .map(|(name, rows)| {
            let mut text = String::from("x,y\n");
            for (x, y) in rows {
                text.push_str(&format!("{x},{y}\n"));
            }
            (name, text)
        })
        .collect())
}
