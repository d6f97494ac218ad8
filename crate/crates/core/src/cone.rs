//! Exact Euclidean-cone oracle: distances by unfolding, the chart-to-cone
//! coordinate change, contractibility radius, and a discrete topological
//! cross-check on a triangulated cone neighborhood.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("cone angle must be positive and finite")]
    BadAngle,
    #[error("contractibility radius at the flat-slit boundary θ = π is not defined here")]
    ThetaBoundaryCase,
    #[error("apex distance must be positive")]
    BadApexDistance,
    #[error("ball radius must be positive")]
    BadRadius,
    #[error("resolution too coarse to resolve the requested radius")]
    ResolutionTooCoarse,
    #[error("chart exponent must satisfy β > -1")]
    BadExponent,
}

/// Euclidean cone of total angle `θ`; curvature at the apex `k = 2π - θ`,
/// chart exponent `β = θ/2π - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub theta: f64,
}

impl ConeSpec {
    pub fn new(theta: f64) -> Result<Self, ConeError> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(ConeError::BadAngle);
        }
        Ok(ConeSpec { theta })
    }

    pub fn from_curvature(k: f64) -> Result<Self, ConeError> {
        Self::new(TAU - k)
    }

    pub fn curvature(&self) -> f64 {
        TAU - self.theta
    }

    pub fn beta(&self) -> f64 {
        self.theta / TAU - 1.0
    }

    /// Intrinsic distance by unfolding: with the angular gap `φ*` reduced to
    /// `[0, θ/2]`, the geodesic is the chord of the unfolded sector when
    /// `φ* < π` and passes through the apex otherwise. The gap is computed
    /// from `|Δangle|` so the distance is bitwise symmetric.
    pub fn distance(&self, a: ConePoint, b: ConePoint) -> f64 {
        let gap = (a.angle - b.angle).abs().rem_euclid(self.theta);
        let phi = gap.min(self.theta - gap);
        if phi < PI {
            let d2 = a.radius * a.radius + b.radius * b.radius
                - 2.0 * a.radius * b.radius * phi.cos();
            d2.max(0.0).sqrt()
        } else {
            a.radius + b.radius
        }
    }

    /// Contractibility radius at a point sitting at distance `d` from the
    /// apex: infinite for `θ > π`, `d·sin(θ/2)` for `θ < π` (the radius at
    /// which the two unfolded lobes first meet behind the apex).
    pub fn cont_radius(&self, d: f64) -> Result<f64, ConeError> {
        if !(d > 0.0) {
            return Err(ConeError::BadApexDistance);
        }
        if self.theta == PI {
            return Err(ConeError::ThetaBoundaryCase);
        }
        if self.theta > PI {
            Ok(f64::INFINITY)
        } else {
            Ok(d * (self.theta * 0.5).sin())
        }
    }

    /// Builds a triangulated neighborhood of the apex, extracts the closed
    /// graph-metric ball of radius `r` around the point at distance `d` from
    /// the apex, and reports whether that ball is a combinatorial disc
    /// (Euler characteristic 1, one boundary cycle, connected).
    pub fn disc_check(&self, d: f64, r: f64, resolution: usize) -> Result<bool, ConeError> {
        if !(d > 0.0) {
            return Err(ConeError::BadApexDistance);
        }
        if !(r > 0.0) {
            return Err(ConeError::BadRadius);
        }
        let mesh = ConeMesh::build(self, d, r, resolution)?;
        let dist = mesh.distances_from(mesh.base_vertex);
        let in_ball: Vec<bool> = dist.iter().map(|&v| v <= r).collect();
        Ok(mesh.is_disc(&in_ball))
    }
}

/// Point on the cone in intrinsic polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub radius: f64,
    pub angle: f64,
}

impl ConePoint {
    pub fn new(radius: f64, angle: f64) -> Self {
        ConePoint { radius, angle }
    }
}

/// Maps a chart point to cone coordinates for the metric `|z|^{2β} |dz|²`:
/// radius `|z|^{1+β}/(1+β)`, angle `(1+β)·arg z`. `z = 0` is the apex.
pub fn chart_to_cone(beta: f64, z: Complex64) -> Result<ConePoint, ConeError> {
    if !(beta > -1.0) {
        return Err(ConeError::BadExponent);
    }
    let q = 1.0 + beta;
    let rho = z.norm();
    if rho == 0.0 {
        return Ok(ConePoint::new(0.0, 0.0));
    }
    Ok(ConePoint::new(rho.powf(q) / q, q * z.arg()))
}

/// Distance between two chart points under the single-cone metric with
/// exponent `β`, via unfolding. This is the oracle the grid engine is
/// checked against.
pub fn chart_cone_distance(beta: f64, z: Complex64, w: Complex64) -> Result<f64, ConeError> {
    let cone = ConeSpec::new(TAU * (1.0 + beta))?;
    Ok(cone.distance(chart_to_cone(beta, z)?, chart_to_cone(beta, w)?))
}

/// Triangulated cone sector with the two cut rays glued.
struct ConeMesh {
    theta: f64,
    n_theta: usize,
    dr: f64,
    base_vertex: usize,
    /// triangulation triangles (vertex triples)
    triangles: Vec<[usize; 3]>,
    /// distance-graph adjacency (richer than the triangulation for lower
    /// metrication error)
    adjacency: Vec<Vec<(usize, f64)>>,
    n_vertices: usize,
}

impl ConeMesh {
    /// Vertex layout: index 0 = apex; ring `i ≥ 1` at radius `i·dr` holds
    /// `n_theta` vertices at angles `j·θ/n_theta`.
    fn vertex(&self, ring: usize, j: usize) -> usize {
        debug_assert!(ring >= 1);
        1 + (ring - 1) * self.n_theta + j.rem_euclid(self.n_theta)
    }

    fn point(&self, idx: usize) -> ConePoint {
        if idx == 0 {
            return ConePoint::new(0.0, 0.0);
        }
        let ring = (idx - 1) / self.n_theta + 1;
        let j = (idx - 1) % self.n_theta;
        ConePoint::new(ring as f64 * self.dr, j as f64 * self.theta / self.n_theta as f64)
    }

    fn build(cone: &ConeSpec, d: f64, r: f64, resolution: usize) -> Result<ConeMesh, ConeError> {
        let n_theta = resolution.max(8);
        let extent = d + r + 2.0 * r.max(d) / 16.0;
        // place the base point exactly on a ring
        let dr_target = (cone.theta * d / n_theta as f64).min(d / 4.0);
        let rings_to_d = (d / dr_target).round().max(4.0) as usize;
        let dr = d / rings_to_d as f64;
        let n_rings = (extent / dr).ceil() as usize;
        if r < 3.0 * dr.max(cone.theta * d / n_theta as f64) {
            return Err(ConeError::ResolutionTooCoarse);
        }
        let n_vertices = 1 + n_rings * n_theta;
        let mut mesh = ConeMesh {
            theta: cone.theta,
            n_theta,
            dr,
            base_vertex: 0,
            triangles: Vec::new(),
            adjacency: vec![Vec::new(); n_vertices],
            n_vertices,
        };
        mesh.base_vertex = mesh.vertex(rings_to_d, 0);

        // triangulation: fan around the apex, then quads split along one diagonal
        for j in 0..n_theta {
            mesh.triangles.push([0, mesh.vertex(1, j), mesh.vertex(1, j + 1)]);
        }
        for i in 1..n_rings {
            for j in 0..n_theta {
                let a = mesh.vertex(i, j);
                let b = mesh.vertex(i, j + 1);
                let c = mesh.vertex(i + 1, j);
                let e = mesh.vertex(i + 1, j + 1);
                mesh.triangles.push([a, b, c]);
                mesh.triangles.push([b, e, c]);
            }
        }

        // distance graph: triangulation edges plus the second diagonal and
        // knight moves, all weighted by exact cone distances
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for j in 0..n_theta {
            edges.push((0, mesh.vertex(1, j)));
        }
        for i in 1..=n_rings {
            for j in 0..n_theta {
                let a = mesh.vertex(i, j);
                edges.push((a, mesh.vertex(i, j + 1)));
                if i < n_rings {
                    edges.push((a, mesh.vertex(i + 1, j)));
                    edges.push((a, mesh.vertex(i + 1, j + 1)));
                    edges.push((mesh.vertex(i, j + 1), mesh.vertex(i + 1, j)));
                    edges.push((a, mesh.vertex(i + 1, j + 2)));
                    edges.push((a, mesh.vertex(i + 1, j + n_theta - 2)));
                }
                if i + 2 <= n_rings {
                    edges.push((a, mesh.vertex(i + 2, j + 1)));
                    edges.push((a, mesh.vertex(i + 2, j + n_theta - 1)));
                }
            }
        }
        for (u, v) in edges {
            let w = cone.distance(mesh.point(u), mesh.point(v));
            mesh.adjacency[u].push((v, w));
            mesh.adjacency[v].push((u, w));
        }
        Ok(mesh)
    }

    fn distances_from(&self, src: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n_vertices];
        let mut heap: BinaryHeap<MinEntry> = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(MinEntry { cost: 0.0, node: src });
        while let Some(MinEntry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(next, w) in &self.adjacency[node] {
                let nd = cost + w;
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(MinEntry { cost: nd, node: next });
                }
            }
        }
        dist
    }

    /// Euler characteristic + boundary-cycle count on the subcomplex of
    /// triangles whose vertices all lie in the ball.
    fn is_disc(&self, in_ball: &[bool]) -> bool {
        use std::collections::HashMap;
        let tris: Vec<&[usize; 3]> =
            self.triangles.iter().filter(|t| t.iter().all(|&v| in_ball[v])).collect();
        if tris.is_empty() {
            return false;
        }
        let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
        let mut verts: std::collections::HashSet<usize> = std::collections::HashSet::new();
        for t in &tris {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                *edge_count.entry(key).or_insert(0) += 1;
            }
            verts.extend(t.iter().copied());
        }
        let v = verts.len() as i64;
        let e = edge_count.len() as i64;
        let f = tris.len() as i64;
        let chi = v - e + f;
        if chi != 1 {
            return false;
        }
        // face connectivity via union-find over shared edges
        let mut parent: HashMap<usize, usize> = verts.iter().map(|&x| (x, x)).collect();
        fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
            let mut root = x;
            while parent[&root] != root {
                root = parent[&root];
            }
            let mut cur = x;
            while parent[&cur] != root {
                let next = parent[&cur];
                parent.insert(cur, root);
                cur = next;
            }
            root
        }
        for t in &tris {
            let a = find(&mut parent, t[0]);
            let b = find(&mut parent, t[1]);
            parent.insert(a, b);
            let b2 = find(&mut parent, t[1]);
            let c = find(&mut parent, t[2]);
            parent.insert(b2, c);
        }
        let roots: std::collections::HashSet<usize> =
            verts.iter().map(|&x| find(&mut parent, x)).collect();
        if roots.len() != 1 {
            return false;
        }
        // boundary edges appear in exactly one kept triangle; count cycles
        let boundary: Vec<(usize, usize)> =
            edge_count.iter().filter(|(_, &n)| n == 1).map(|(&e, _)| e).collect();
        let mut bparent: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &boundary {
            bparent.entry(a).or_insert(a);
            bparent.entry(b).or_insert(b);
            let ra = find(&mut bparent, a);
            let rb = find(&mut bparent, b);
            bparent.insert(ra, rb);
        }
        let cycles: std::collections::HashSet<usize> = boundary
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .map(|x| find(&mut bparent, x))
            .collect();
        cycles.len() == 1
    }
}

#[derive(PartialEq)]
struct MinEntry {
    cost: f64,
    node: usize,
}

impl Eq for MinEntry {}

impl Ord for MinEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for MinEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
