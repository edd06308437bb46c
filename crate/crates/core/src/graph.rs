//! Weighted graphs with a positive vertex measure.
//!
//! A [`WeightedGraph`] is immutable once built. Every vertex carries a
//! measure `mu(x) > 0`, every edge a weight `w_xy > 0`, and the graph is
//! always connected. The measure turns the plain weighted graph into the
//! operator
//!
//! ```text
//! Δf(x) = (1/mu(x)) Σ_{y~x} w_xy (f(y) - f(x))
//! ```
//!
//! which is the non-normalized Laplacian for `mu ≡ 1` and the normalized one
//! for `mu(x) = d_x`. The carré du champ `Γ` is built from the same data.
//!
//! Distances are hop counts; edge weights never enter them.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, VecDeque};
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the vertex measure of a graph is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureMode {
    /// `mu ≡ 1`, the non-normalized Laplacian.
    Unit,
    /// `mu(x) = d_x`, the weighted degree; the normalized Laplacian.
    Degree,
    /// `mu ≡ c`.
    Constant(f64),
    /// One value per vertex, in vertex order.
    Explicit(Vec<f64>),
}

impl MeasureMode {
    fn resolve(&self, degrees: &[f64]) -> Result<Vec<f64>> {
        let n = degrees.len();
        let mu = match self {
            MeasureMode::Unit => vec![1.0; n],
            MeasureMode::Degree => degrees.to_vec(),
            MeasureMode::Constant(c) => vec![*c; n],
            MeasureMode::Explicit(values) => {
                if values.len() != n {
                    return Err(Error::MeasureLength {
                        expected: n,
                        got: values.len(),
                    });
                }
                values.clone()
            }
        };
        for (vertex, &m) in mu.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonPositiveMeasure { vertex, mu: m });
            }
        }
        Ok(mu)
    }

    /// The constant value of the measure, if it is constant by construction.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            MeasureMode::Unit => Some(1.0),
            MeasureMode::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

/// An undirected edge `{u, v}` with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
    measure: Vec<f64>,
    mode: MeasureMode,
}

impl WeightedGraph {
    /// Builds a graph on vertices `0..n` labelled by their index.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], mode: MeasureMode) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges, mode)
    }

    pub fn with_labels(
        labels: Vec<String>,
        edges: &[(usize, usize, f64)],
        mode: MeasureMode,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if n == 1 {
            return Err(Error::InvalidParameter(
                "a graph needs at least two vertices".into(),
            ));
        }
        let mut seen_labels = BTreeSet::new();
        for label in &labels {
            if !seen_labels.insert(label.as_str()) {
                return Err(Error::DuplicateVertexId(label.clone()));
            }
        }

        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            if a >= n {
                return Err(Error::UnknownVertex(a));
            }
            if b >= n {
                return Err(Error::UnknownVertex(b));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight { u, v, w });
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            canonical.push(Edge { u, v, w });
        }
        canonical.sort_by_key(|e| (e.u, e.v));

        let mut adjacency = vec![Vec::new(); n];
        for e in &canonical {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(y, _)| y);
        }
        let degrees: Vec<f64> = adjacency
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();

        if !is_connected(&adjacency) {
            return Err(Error::Disconnected);
        }
        let measure = mode.resolve(&degrees)?;

        Ok(Self {
            labels,
            edges: canonical,
            adjacency,
            degrees,
            measure,
            mode,
        })
    }

    /// Same vertices and edges, new measure.
    pub fn with_measure(&self, mode: MeasureMode) -> Result<Self> {
        let measure = mode.resolve(&self.degrees)?;
        Ok(Self {
            measure,
            mode,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `x` with edge weights, sorted by neighbour index.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> Option<f64> {
        let list = &self.adjacency[x];
        list.binary_search_by_key(&y, |&(z, _)| z)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measure_mode(&self) -> &MeasureMode {
        &self.mode
    }

    /// The common value of the measure when it is constant on all vertices.
    pub fn constant_measure(&self) -> Option<f64> {
        let first = self.measure[0];
        self.measure
            .iter()
            .all(|&m| m == first)
            .then_some(first)
    }

    /// Weighted degree `d_x = Σ_{y~x} w_xy`.
    pub fn degree(&self, x: usize) -> f64 {
        self.degrees[x]
    }

    /// Maximal weighted degree `d_G`.
    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().cloned().fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn min_measure(&self) -> f64 {
        self.measure.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `max_x d_x / mu(x)`.
    pub fn d_non(&self) -> f64 {
        (0..self.n())
            .map(|x| self.degrees[x] / self.measure[x])
            .fold(0.0, f64::max)
    }

    /// `max_x max_{y~x} mu(x) / w_xy`.
    pub fn d_nor(&self) -> f64 {
        (0..self.n())
            .flat_map(|x| {
                let mu = self.measure[x];
                self.adjacency[x].iter().map(move |&(_, w)| mu / w)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    /// Stable hash of the vertex count, edges and measure.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n().hash(&mut h);
        for e in &self.edges {
            (e.u, e.v, e.w.to_bits()).hash(&mut h);
        }
        for m in &self.measure {
            m.to_bits().hash(&mut h);
        }
        h.finish()
    }

    fn check_len(&self, f: &[f64]) {
        assert_eq!(
            f.len(),
            self.n(),
            "vertex function has {} values, graph has {} vertices",
            f.len(),
            self.n()
        );
    }

    /// `Δf(x)`.
    pub fn laplacian_at(&self, f: &[f64], x: usize) -> f64 {
        self.check_len(f);
        self.laplacian_at_with(|v| f[v], x)
    }

    pub(crate) fn laplacian_at_with(&self, f: impl Fn(usize) -> f64, x: usize) -> f64 {
        let fx = f(x);
        let sum: f64 = self.adjacency[x]
            .iter()
            .map(|&(y, w)| w * (f(y) - fx))
            .sum();
        sum / self.measure[x]
    }

    /// `Δf` at every vertex.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.check_len(f);
        (0..self.n()).map(|x| self.laplacian_at_with(|v| f[v], x)).collect()
    }

    /// The matrix of `Δ`, so that `(L f)_x = Δf(x)`. Rows sum to zero.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            let mu = self.measure[x];
            for &(y, w) in &self.adjacency[x] {
                m[(x, y)] = w / mu;
            }
            m[(x, x)] = -self.degrees[x] / mu;
        }
        m
    }

    /// `Γ(f, h)(x) = (1/2mu(x)) Σ_{y~x} w_xy (f(y)-f(x)) (h(y)-h(x))`.
    pub fn gamma_at(&self, f: &[f64], h: &[f64], x: usize) -> f64 {
        self.check_len(f);
        self.check_len(h);
        self.gamma_at_with(|v| f[v], |v| h[v], x)
    }

    pub(crate) fn gamma_at_with(
        &self,
        f: impl Fn(usize) -> f64,
        h: impl Fn(usize) -> f64,
        x: usize,
    ) -> f64 {
        let (fx, hx) = (f(x), h(x));
        let sum: f64 = self.adjacency[x]
            .iter()
            .map(|&(y, w)| w * (f(y) - fx) * (h(y) - hx))
            .sum();
        sum / (2.0 * self.measure[x])
    }

    /// `Γ(f, h)` at every vertex.
    pub fn gamma(&self, f: &[f64], h: &[f64]) -> Vec<f64> {
        self.check_len(f);
        self.check_len(h);
        (0..self.n())
            .map(|x| self.gamma_at_with(|v| f[v], |v| h[v], x))
            .collect()
    }

    /// `Σ_x mu(x) Γ(f,h)(x) + Σ_x mu(x) f(x) Δh(x)`; zero up to rounding.
    pub fn summation_by_parts_residual(&self, f: &[f64], h: &[f64]) -> f64 {
        let gamma = self.gamma(f, h);
        let lap = self.laplacian(h);
        (0..self.n())
            .map(|x| self.measure[x] * (gamma[x] + f[x] * lap[x]))
            .sum()
    }

    /// `Δ(f²) - 2Γ(f) - 2fΔf` at every vertex; zero up to rounding.
    pub fn chain_rule_residual(&self, f: &[f64]) -> Vec<f64> {
        let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
        let lap_sq = self.laplacian(&sq);
        let gamma = self.gamma(f, f);
        let lap = self.laplacian(f);
        (0..self.n())
            .map(|x| lap_sq[x] - 2.0 * gamma[x] - 2.0 * f[x] * lap[x])
            .collect()
    }

    /// Hop counts from `x` to every vertex.
    pub fn bfs_distances(&self, x: usize) -> Vec<usize> {
        self.multi_source_bfs(&[x])
    }

    fn multi_source_bfs(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &(y, _) in &self.adjacency[v] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[v] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn hop_distance(&self, x: usize, y: usize) -> usize {
        self.bfs_distances(x)[y]
    }

    /// `{y : dist(x, y) <= r}`.
    pub fn ball(&self, x: usize, r: usize) -> VertexSet {
        let dist = self.bfs_distances(x);
        let members = (0..self.n()).filter(|&y| dist[y] <= r);
        VertexSet::from_sorted(self, members.collect())
    }

    /// `min_{x∈S1, y∈S2} dist(x, y)`.
    pub fn set_distance(&self, s1: &VertexSet, s2: &VertexSet) -> Result<usize> {
        if s1.is_empty() || s2.is_empty() {
            return Err(Error::EmptySet);
        }
        let dist = self.multi_source_bfs(s1.members());
        Ok(s2.iter().map(|y| dist[y]).min().unwrap_or(usize::MAX))
    }

    pub fn diameter(&self) -> usize {
        (0..self.n())
            .map(|x| self.bfs_distances(x).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Sum of weights of edges with exactly one endpoint in `s`.
    pub fn boundary_weight(&self, s: &VertexSet) -> f64 {
        self.edges
            .iter()
            .filter(|e| s.contains(e.u) != s.contains(e.v))
            .map(|e| e.w)
            .sum()
    }

    /// Sum of weights of edges with both endpoints in `s`.
    pub fn interior_weight(&self, s: &VertexSet) -> f64 {
        self.edges
            .iter()
            .filter(|e| s.contains(e.u) && s.contains(e.v))
            .map(|e| e.w)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

fn is_connected(adjacency: &[Vec<(usize, f64)>]) -> bool {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(y, _) in &adjacency[v] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

/// A set of vertices with its cached measure.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    members: Vec<usize>,
    measure: f64,
}

impl VertexSet {
    pub fn new(g: &WeightedGraph, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = vertices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&v| v >= g.n()) {
            return Err(Error::UnknownVertex(bad));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(g, members))
    }

    fn from_sorted(g: &WeightedGraph, members: Vec<usize>) -> Self {
        let measure = members.iter().map(|&v| g.mu(v)).sum();
        Self { members, measure }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `mu(S)`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        !self.members.iter().any(|&v| other.contains(v))
    }

    /// Characteristic function `χ_S` on a graph with `n` vertices.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut chi = vec![0.0; n];
        for &v in &self.members {
            chi[v] = 1.0;
        }
        chi
    }
}

/// Cartesian product `G1 × G2`.
///
/// Vertex `(i, j)` has index `i * |V2| + j` and label `(label_i,label_j)`.
/// `(x1,y1) ~ (x2,y2)` when `x1 = x2, y1 ~ y2` (weight from `G2`) or
/// `x1 ~ x2, y1 = y2` (weight from `G1`).
pub fn cartesian_product(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    measure: MeasureMode,
) -> Result<WeightedGraph> {
    let (n1, n2) = (g1.n(), g2.n());
    let mut labels = Vec::with_capacity(n1 * n2);
    for a in g1.labels() {
        for b in g2.labels() {
            labels.push(format!("({a},{b})"));
        }
    }
    let mut edges = Vec::with_capacity(n1 * g2.edges().len() + n2 * g1.edges().len());
    for i in 0..n1 {
        for e in g2.edges() {
            edges.push((i * n2 + e.u, i * n2 + e.v, e.w));
        }
    }
    for e in g1.edges() {
        for j in 0..n2 {
            edges.push((e.u * n2 + j, e.v * n2 + j, e.w));
        }
    }
    WeightedGraph::with_labels(labels, &edges, measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(a: f64, b: f64, c: f64, mode: MeasureMode) -> WeightedGraph {
        WeightedGraph::new(3, &[(0, 1, a), (1, 2, c), (0, 2, b)], mode).unwrap()
    }

    fn cycle(n: usize, mode: MeasureMode) -> WeightedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        WeightedGraph::new(n, &edges, mode).unwrap()
    }

    #[test]
    fn degree_measure_of_weighted_triangle() {
        let (a, b, c) = (1.0, 2.0, 3.0);
        let g = triangle(a, b, c, MeasureMode::Degree);
        assert_eq!(g.measure(), &[a + b, a + c, b + c]);
    }

    #[test]
    fn single_edge_unit() {
        let g = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Unit).unwrap();
        assert_eq!(g.measure(), &[1.0, 1.0]);
        assert_eq!(g.max_degree(), 1.0);
    }

    #[test]
    fn construction_errors() {
        let err = WeightedGraph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)], MeasureMode::Unit);
        assert!(matches!(err, Err(Error::Disconnected)));
        let err = WeightedGraph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)], MeasureMode::Unit);
        assert!(matches!(err, Err(Error::DuplicateEdge(0, 1))));
        let err = WeightedGraph::new(2, &[(0, 1, 0.0)], MeasureMode::Unit);
        assert!(matches!(err, Err(Error::NonPositiveWeight { .. })));
        let err = WeightedGraph::new(2, &[(0, 1, 1.0), (1, 1, 1.0)], MeasureMode::Unit);
        assert!(matches!(err, Err(Error::SelfLoop(1))));
        let err = WeightedGraph::new(2, &[(0, 5, 1.0)], MeasureMode::Unit);
        assert!(matches!(err, Err(Error::UnknownVertex(5))));
        let err = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Constant(-1.0));
        assert!(matches!(err, Err(Error::NonPositiveMeasure { .. })));
        let err = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Explicit(vec![1.0]));
        assert!(matches!(err, Err(Error::MeasureLength { .. })));
    }

    #[test]
    fn d_non_d_nor() {
        let k4: Vec<_> = (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| (i, j, 1.0)))
            .collect();
        let unit = WeightedGraph::new(4, &k4, MeasureMode::Unit).unwrap();
        assert_eq!((unit.d_non(), unit.d_nor()), (3.0, 1.0));
        let deg = unit.with_measure(MeasureMode::Degree).unwrap();
        assert_eq!((deg.d_non(), deg.d_nor()), (1.0, 3.0));

        let c12 = cycle(12, MeasureMode::Constant(2.0));
        assert_eq!((c12.d_non(), c12.d_nor()), (1.0, 2.0));
    }

    #[test]
    fn laplacian_and_gamma_on_an_edge() {
        let g = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Unit).unwrap();
        let chi = [0.0, 1.0];
        assert_eq!(g.laplacian_at(&chi, 0), 1.0);
        assert_eq!(g.laplacian_at(&chi, 1), -1.0);
        assert_eq!(g.gamma_at(&chi, &chi, 0), 0.5);
        assert_eq!(g.laplacian(&[3.0, 3.0]), vec![0.0, 0.0]);
        assert_eq!(g.gamma(&[3.0, 3.0], &chi), vec![0.0, 0.0]);
    }

    #[test]
    fn laplacian_matrix_rows_sum_to_zero() {
        let g = triangle(1.0, 2.0, 3.0, MeasureMode::Explicit(vec![0.5, 2.0, 7.0]));
        let m = g.laplacian_matrix();
        for x in 0..3 {
            assert!(m.row(x).sum().abs() < 1e-15);
        }
        let f = [0.3, -1.2, 4.0];
        let lf = &m * nalgebra::DVector::from_column_slice(&f);
        for x in 0..3 {
            assert!((lf[x] - g.laplacian_at(&f, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn metrics() {
        let c12 = cycle(12, MeasureMode::Unit);
        assert_eq!(c12.diameter(), 6);
        assert_eq!(c12.hop_distance(3, 3), 0);
        assert_eq!(c12.ball(0, 0).members(), &[0]);
        assert_eq!(c12.ball(0, 2).members(), &[0, 1, 2, 10, 11]);
        let s1 = VertexSet::new(&c12, [0, 1]).unwrap();
        let s2 = VertexSet::new(&c12, [5, 6]).unwrap();
        assert_eq!(c12.set_distance(&s1, &s2).unwrap(), 4);
    }

    #[test]
    fn k2_times_k2_is_c4() {
        let k2 = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Unit).unwrap();
        let c4 = cartesian_product(&k2, &k2, MeasureMode::Unit).unwrap();
        assert_eq!(c4.n(), 4);
        assert_eq!(c4.edges().len(), 4);
        assert!((0..4).all(|x| c4.neighbors(x).len() == 2));
        assert_eq!(c4.diameter(), 2);
        assert_eq!(c4.label(3), "(1,1)");
    }

    #[test]
    fn vertex_set_basics() {
        let g = cycle(5, MeasureMode::Constant(2.0));
        let s = VertexSet::new(&g, [3, 1, 3]).unwrap();
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.measure(), 4.0);
        assert_eq!(s.indicator(5), vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(VertexSet::new(&g, [9]).is_err());
        let empty = VertexSet::new(&g, []).unwrap();
        assert_eq!(empty.measure(), 0.0);
    }
}
