//! Dyadic grid graphs discretizing the length infimum: nodes on the lattice
//! of step `2^-level` inside the chart disc, 16-neighborhood edges weighted
//! by conformal segment lengths, Dijkstra queries and distance fields.
//!
//! Node sets are nested across levels and every 16-neighborhood edge splits
//! into two collinear edges one level finer, so per-level shortest paths are
//! non-increasing up to quadrature tolerance.

use crate::geom::Rect;
use crate::metric::{BoundaryMode, SingularMetric};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BinaryHeap;
use std::sync::Arc;

/// Neighborhood offsets: axis, diagonal and knight moves (all primitive, so
/// no edge passes through an intermediate lattice point).
const OFFSETS: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
];

pub struct GridGraph {
    pub level: u32,
    mode: BoundaryMode,
    step: f64,
    half: i64,
    q: i64,
    row_start: Vec<u32>,
    row_jmax: Vec<i64>,
    coords: Vec<(i32, i32)>,
    csr_off: Vec<u32>,
    csr_tgt: Vec<u32>,
    csr_w: Vec<f64>,
}

impl GridGraph {
    fn admits(&self, i: i64, j: i64) -> bool {
        let s = i * i + j * j;
        match self.mode {
            BoundaryMode::Closed => s <= self.q,
            BoundaryMode::Open => s < self.q,
        }
    }

    pub fn node_at(&self, i: i64, j: i64) -> Option<u32> {
        if i.abs() > self.half || !self.admits(i, j) {
            return None;
        }
        let ri = (i + self.half) as usize;
        let jmax = self.row_jmax[ri];
        if j.abs() > jmax {
            return None;
        }
        Some(self.row_start[ri] + (j + jmax) as u32)
    }

    pub fn node_pos(&self, idx: u32) -> Complex64 {
        let (i, j) = self.coords[idx as usize];
        Complex64::new(i as f64 * self.step, j as f64 * self.step)
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn build(metric: &SingularMetric, level: u32, mode: BoundaryMode) -> GridGraph {
        assert!((1..=14).contains(&level));
        let half = 1i64 << (level - 1);
        let q = half * half;
        let step = 0.5 / half as f64;
        let rows = (2 * half + 1) as usize;
        let mut row_jmax = vec![-1i64; rows];
        let mut row_start = vec![0u32; rows + 1];
        let mut coords: Vec<(i32, i32)> = Vec::new();
        for ri in 0..rows {
            let i = ri as i64 - half;
            let rem = q - i * i;
            let mut jmax = if rem < 0 { -1 } else { (rem as f64).sqrt() as i64 + 2 };
            while jmax >= 0 {
                let s = i * i + jmax * jmax;
                let ok = match mode {
                    BoundaryMode::Closed => s <= q,
                    BoundaryMode::Open => s < q,
                };
                if ok {
                    break;
                }
                jmax -= 1;
            }
            row_jmax[ri] = jmax;
            row_start[ri] = coords.len() as u32;
            if jmax >= 0 {
                for j in -jmax..=jmax {
                    coords.push((i as i32, j as i32));
                }
            }
        }
        row_start[rows] = coords.len() as u32;
        let n = coords.len();

        let mut graph = GridGraph {
            level,
            mode,
            step,
            half,
            q,
            row_start,
            row_jmax,
            coords,
            csr_off: vec![0u32; n + 1],
            csr_tgt: Vec::new(),
            csr_w: Vec::new(),
        };

        // degree pass
        for idx in 0..n {
            let (i, j) = graph.coords[idx];
            let mut deg = 0u32;
            for (di, dj) in OFFSETS {
                if graph.node_at(i as i64 + di, j as i64 + dj).is_some() {
                    deg += 1;
                }
            }
            graph.csr_off[idx + 1] = graph.csr_off[idx] + deg;
        }
        let total = graph.csr_off[n] as usize;
        let mut csr_tgt = vec![0u32; total];
        let mut csr_w = vec![0f64; total];

        // weight pass, parallel over contiguous node chunks
        let n_chunks = rayon::current_num_threads().max(1) * 8;
        let chunk_nodes = n.div_ceil(n_chunks).max(1);
        let mut jobs: Vec<(usize, usize, &mut [u32], &mut [f64])> = Vec::new();
        {
            let mut tgt_rest: &mut [u32] = &mut csr_tgt;
            let mut w_rest: &mut [f64] = &mut csr_w;
            let mut node0 = 0usize;
            while node0 < n {
                let node1 = (node0 + chunk_nodes).min(n);
                let take = (graph.csr_off[node1] - graph.csr_off[node0]) as usize;
                let (t_a, t_b) = tgt_rest.split_at_mut(take);
                let (w_a, w_b) = w_rest.split_at_mut(take);
                tgt_rest = t_b;
                w_rest = w_b;
                jobs.push((node0, node1, t_a, w_a));
                node0 = node1;
            }
        }
        jobs.into_par_iter().for_each(|(node0, node1, tgt_slice, w_slice)| {
            let base = graph.csr_off[node0] as usize;
            for idx in node0..node1 {
                let (i, j) = graph.coords[idx];
                let here = graph.node_pos(idx as u32);
                let mut cursor = graph.csr_off[idx] as usize - base;
                for (di, dj) in OFFSETS {
                    if let Some(nbr) = graph.node_at(i as i64 + di, j as i64 + dj) {
                        tgt_slice[cursor] = nbr;
                        w_slice[cursor] = metric.segment_length(here, graph.node_pos(nbr));
                        cursor += 1;
                    }
                }
            }
        });
        graph.csr_tgt = csr_tgt;
        graph.csr_w = csr_w;
        graph
    }

    /// Endpoint connectors: the up-to-16 lattice nodes in the two-cell
    /// window around `z` (a superset of the containing cell's corners at
    /// the next level, which keeps refinement monotone), weighted by exact
    /// connector segments.
    pub fn connectors(&self, metric: &SingularMetric, z: Complex64) -> Vec<(u32, f64)> {
        let ix = (z.re / self.step).floor() as i64;
        let jy = (z.im / self.step).floor() as i64;
        let mut out = Vec::with_capacity(16);
        for i in (ix - 1)..=(ix + 2) {
            for j in (jy - 1)..=(jy + 2) {
                if let Some(idx) = self.node_at(i, j) {
                    let node = self.node_pos(idx);
                    let w = if node == z { 0.0 } else { metric.segment_length(z, node) };
                    if w.is_finite() {
                        out.push((idx, w));
                    }
                }
            }
        }
        out
    }

    /// Multi-source / multi-target Dijkstra; returns the best total cost and
    /// the node path realizing it.
    pub fn route(
        &self,
        sources: &[(u32, f64)],
        targets: &[(u32, f64)],
    ) -> (f64, Option<Vec<u32>>) {
        let n = self.n_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut settled = vec![false; n];
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        for &(node, w) in sources {
            if w.is_finite() && w < dist[node as usize] {
                dist[node as usize] = w;
                heap.push(HeapEntry { cost: w, node });
            }
        }
        let mut target_w = std::collections::HashMap::new();
        for &(node, w) in targets {
            target_w
                .entry(node)
                .and_modify(|x: &mut f64| *x = x.min(w))
                .or_insert(w);
        }
        let mut best = f64::INFINITY;
        let mut best_node = u32::MAX;
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost >= best {
                break;
            }
            let ni = node as usize;
            if settled[ni] {
                continue;
            }
            settled[ni] = true;
            if let Some(&w) = target_w.get(&node) {
                if cost + w < best {
                    best = cost + w;
                    best_node = node;
                }
            }
            let lo = self.csr_off[ni] as usize;
            let hi = self.csr_off[ni + 1] as usize;
            for k in lo..hi {
                let next = self.csr_tgt[k] as usize;
                let w = self.csr_w[k];
                if !w.is_finite() || settled[next] {
                    continue;
                }
                let nd = cost + w;
                if nd < dist[next] {
                    dist[next] = nd;
                    prev[next] = node;
                    heap.push(HeapEntry { cost: nd, node: next as u32 });
                }
            }
        }
        if best_node == u32::MAX {
            return (f64::INFINITY, None);
        }
        let mut path = vec![best_node];
        let mut cur = best_node;
        while prev[cur as usize] != u32::MAX {
            cur = prev[cur as usize];
            path.push(cur);
        }
        path.reverse();
        (best, Some(path))
    }

    /// Point-to-point query with endpoint connectors.
    pub fn shortest_path(
        &self,
        metric: &SingularMetric,
        z: Complex64,
        zp: Complex64,
    ) -> (f64, Option<Vec<u32>>) {
        let sources = self.connectors(metric, z);
        let targets = self.connectors(metric, zp);
        self.route(&sources, &targets)
    }

    fn full_dijkstra(&self, sources: &[(u32, f64)]) -> (Vec<f64>, Vec<u32>) {
        let n = self.n_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![u32::MAX; n];
        let mut settled = vec![false; n];
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        for &(node, w) in sources {
            if w.is_finite() && w < dist[node as usize] {
                dist[node as usize] = w;
                heap.push(HeapEntry { cost: w, node });
            }
        }
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            let ni = node as usize;
            if settled[ni] {
                continue;
            }
            settled[ni] = true;
            let lo = self.csr_off[ni] as usize;
            let hi = self.csr_off[ni + 1] as usize;
            for k in lo..hi {
                let next = self.csr_tgt[k] as usize;
                let w = self.csr_w[k];
                if !w.is_finite() || settled[next] {
                    continue;
                }
                let nd = cost + w;
                if nd < dist[next] {
                    dist[next] = nd;
                    prev[next] = node;
                    heap.push(HeapEntry { cost: nd, node: next as u32 });
                }
            }
        }
        (dist, prev)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source distance field on a grid graph.
pub struct DistanceField {
    graph: Arc<GridGraph>,
    pub center: Complex64,
    pub dist: Vec<f64>,
    prev: Vec<u32>,
}

impl DistanceField {
    pub(crate) fn compute(
        graph: Arc<GridGraph>,
        metric: &SingularMetric,
        center: Complex64,
    ) -> DistanceField {
        let sources = graph.connectors(metric, center);
        let (dist, prev) = graph.full_dijkstra(&sources);
        DistanceField { graph, center, dist, prev }
    }

    pub fn graph(&self) -> &GridGraph {
        &self.graph
    }

    /// Node mask of the ball `{dist <= r}`; monotone in `r`.
    pub fn mask(&self, r: f64) -> Vec<bool> {
        self.dist.iter().map(|&d| d <= r).collect()
    }

    /// Tightens the field near the sphere `{dist ≈ r}` by corner-shortcut
    /// smoothing of the per-node paths (validators use this before
    /// extracting ball areas).
    pub fn smooth_band(&mut self, metric: &SingularMetric, r: f64, band: f64) {
        let lo = r * (1.0 - band);
        let hi = r * (1.0 + band);
        let updates: Vec<(usize, f64)> = (0..self.dist.len())
            .into_par_iter()
            .filter(|&idx| self.dist[idx].is_finite() && self.dist[idx] >= lo && self.dist[idx] <= hi)
            .map(|idx| {
                let mut nodes = vec![idx as u32];
                let mut cur = idx as u32;
                while self.prev[cur as usize] != u32::MAX {
                    cur = self.prev[cur as usize];
                    nodes.push(cur);
                }
                nodes.reverse();
                let mut pts: Vec<Complex64> = Vec::with_capacity(nodes.len() + 1);
                pts.push(self.center);
                pts.extend(nodes.iter().map(|&nd| self.graph.node_pos(nd)));
                pts.dedup();
                let smoothed = if pts.len() >= 2 { metric.smooth_polyline(&mut pts) } else { 0.0 };
                (idx, smoothed)
            })
            .collect();
        for (idx, v) in updates {
            if v < self.dist[idx] {
                self.dist[idx] = v;
            }
        }
    }

    /// Conformal area of the metric ball `{dist <= r}`: sub-cell fractions
    /// by bilinear interpolation of the field, times per-cell conformal
    /// masses.
    pub fn mask_area(&self, metric: &SingularMetric, r: f64) -> f64 {
        let g = &self.graph;
        let s = g.step();
        let cells: Vec<(i64, i64)> = {
            let mut v = Vec::new();
            for ri in 0..g.row_jmax.len() {
                let i = ri as i64 - g.half;
                let jmax = g.row_jmax[ri];
                if jmax < 0 {
                    continue;
                }
                for j in -jmax..=jmax {
                    v.push((i, j));
                }
            }
            v
        };
        let corner = |i: i64, j: i64| -> f64 {
            g.node_at(i, j).map_or(1e30, |idx| self.dist[idx as usize].min(1e30))
        };
        cells
            .par_iter()
            .map(|&(i, j)| {
                let d = [corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)];
                if d.iter().all(|&x| x > r) {
                    return 0.0;
                }
                let frac = level_set_fraction(d, r);
                if frac <= 0.0 {
                    return 0.0;
                }
                let rect = Rect::new(
                    i as f64 * s,
                    (i + 1) as f64 * s,
                    j as f64 * s,
                    (j + 1) as f64 * s,
                );
                frac * metric.cell_area(&rect)
            })
            .sum()
    }
}

/// Fraction of the unit cell where the bilinear interpolant of the corner
/// values (order: (0,0), (1,0), (1,1), (0,1)) is ≤ `r`, by the polygon-clip
/// form of marching squares.
pub fn level_set_fraction(d: [f64; 4], r: f64) -> f64 {
    const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let inside: Vec<bool> = d.iter().map(|&x| x <= r).collect();
    let mut poly: Vec<(f64, f64)> = Vec::with_capacity(8);
    for k in 0..4 {
        let k2 = (k + 1) % 4;
        if inside[k] {
            poly.push(CORNERS[k]);
        }
        if inside[k] != inside[k2] {
            let t = ((r - d[k]) / (d[k2] - d[k])).clamp(0.0, 1.0);
            let (x0, y0) = CORNERS[k];
            let (x1, y1) = CORNERS[k2];
            poly.push((x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
    }
    if poly.len() < 3 {
        return if inside.iter().all(|&b| b) { 1.0 } else { 0.0 };
    }
    let mut area = 0.0;
    for k in 0..poly.len() {
        let (x0, y0) = poly[k];
        let (x1, y1) = poly[(k + 1) % poly.len()];
        area += x0 * y1 - x1 * y0;
    }
    (0.5 * area).abs().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CurvatureMeasure;
    use crate::metric::{BoundaryMode, SingularMetric};
    use crate::potential::HarmonicTerm;

    fn flat(mode: BoundaryMode) -> SingularMetric {
        SingularMetric::new(CurvatureMeasure::empty(), HarmonicTerm::zero(), mode).unwrap()
    }

    #[test]
    fn node_counts_and_nesting() {
        let m = flat(BoundaryMode::Closed);
        let g1 = GridGraph::build(&m, 1, BoundaryMode::Closed);
        assert_eq!(g1.n_nodes(), 5);
        let g2 = GridGraph::build(&m, 2, BoundaryMode::Closed);
        // every level-1 node is a level-2 node at doubled indices
        for idx in 0..g1.n_nodes() {
            let (i, j) = g1.coords[idx];
            assert!(g2.node_at(2 * i as i64, 2 * j as i64).is_some());
        }
        // open mode drops the boundary nodes
        let go = GridGraph::build(&m, 2, BoundaryMode::Open);
        assert!(go.node_at(2, 0).is_none());
        assert!(go.node_at(1, 1).is_some());
    }

    #[test]
    fn flat_route_is_straight() {
        let m = flat(BoundaryMode::Open);
        let g = GridGraph::build(&m, 5, BoundaryMode::Open);
        let z = Complex64::new(-0.2, 0.0);
        let zp = Complex64::new(0.2, 0.0);
        let (raw, path) = g.shortest_path(&m, z, zp);
        assert!(path.is_some());
        // graph value within the 16-neighborhood metrication bound
        assert!(raw >= 0.4 - 1e-9 && raw < 0.4 * 1.03, "{raw}");
    }

    #[test]
    fn level_set_fraction_cases() {
        assert_eq!(level_set_fraction([0.0, 0.0, 0.0, 0.0], 1.0), 1.0);
        assert_eq!(level_set_fraction([2.0, 2.0, 2.0, 2.0], 1.0), 0.0);
        // half-plane cut through the middle
        let f = level_set_fraction([0.0, 1.0, 1.0, 0.0], 0.5);
        assert!((f - 0.5).abs() < 1e-12);
        // one corner in
        let f = level_set_fraction([0.0, 1.0, 2.0, 1.0], 0.5);
        assert!((f - 0.125).abs() < 1e-12);
    }
}
