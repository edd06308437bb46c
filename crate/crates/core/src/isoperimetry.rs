//! Expansion of vertex sets and exact multi-way isoperimetric constants.
//!
//! `h_k` is the minimum over `k` disjoint nonempty sets of the largest
//! expansion among them; the partition variant additionally requires the sets
//! to cover `V`. Both are computed by exhaustive enumeration of assignments
//! `V → {0, 1, …, k}` (0 meaning unassigned) in canonical form, where the first
//! occurrences of the labels `1..k` appear in increasing vertex order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};

/// Default cap on the number of canonical assignments visited.
pub const DEFAULT_BUDGET: f64 = 1e9;

/// `φ(S) = |E(S, V∖S)|_w / μ(S)`.
pub fn expansion(g: &WeightedGraph, s: &VertexSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(g.boundary_weight(s) / s.measure())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Subpartition,
    Partition,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subpartition" => Ok(Mode::Subpartition),
            "partition" => Ok(Mode::Partition),
            _ => Err(Error::InvalidParameter(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubpartitionResult {
    pub k: usize,
    pub mode: Mode,
    pub value: f64,
    pub witness: Vec<VertexSet>,
    /// Part label of every vertex, 0 for unassigned.
    pub assignment: Vec<usize>,
}

/// Stirling number of the second kind as a float.
fn stirling2(n: usize, k: usize) -> f64 {
    let mut row = vec![0.0f64; k + 1];
    row[0] = 1.0;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as f64 * row[j] + row[j - 1];
        }
        row[0] = 0.0;
    }
    row[k]
}

/// Number of canonical assignments the enumeration visits. A subpartition of
/// `V` into `k` labelled-by-first-occurrence parts plus an unassigned block is
/// a partition of `N + 1` elements into `k + 1` blocks.
pub fn enumeration_size(n: usize, k: usize, mode: Mode) -> f64 {
    match mode {
        Mode::Partition => stirling2(n, k),
        Mode::Subpartition => stirling2(n + 1, k + 1),
    }
}

pub fn multiway_constant(g: &WeightedGraph, k: usize, mode: Mode) -> Result<SubpartitionResult> {
    multiway_constant_with_budget(g, k, mode, DEFAULT_BUDGET)
}

pub fn multiway_constant_with_budget(
    g: &WeightedGraph,
    k: usize,
    mode: Mode,
    budget: f64,
) -> Result<SubpartitionResult> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let needed = enumeration_size(n, k, mode);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut search = Search {
        g,
        k,
        allow_unassigned: mode == Mode::Subpartition,
        part: vec![0; n],
        boundary: vec![0.0; k + 1],
        measure: vec![0.0; k + 1],
        best_value: f64::INFINITY,
        best: None,
    };
    search.descend(0, 0);
    let assignment = search.best.expect("k <= N admits an assignment");
    let witness: Vec<VertexSet> = (1..=k)
        .map(|p| {
            VertexSet::new(g, (0..n).filter(|&v| assignment[v] == p))
                .expect("indices are in range")
        })
        .collect();
    let value = witness
        .iter()
        .map(|s| expansion(g, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(SubpartitionResult {
        k,
        mode,
        value,
        witness,
        assignment,
    })
}

struct Search<'a> {
    g: &'a WeightedGraph,
    k: usize,
    allow_unassigned: bool,
    part: Vec<usize>,
    boundary: Vec<f64>,
    measure: Vec<f64>,
    best_value: f64,
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, v: usize, used: usize) {
        let n = self.part.len();
        if n - v < self.k - used {
            return;
        }
        if v == n {
            let value = (1..=self.k)
                .map(|p| self.boundary[p] / self.measure[p])
                .fold(0.0, f64::max);
            if self.best.is_none() || value < self.best_value - 1e-12 * self.best_value.max(1.0) {
                self.best_value = value;
                self.best = Some(self.part.clone());
            }
            return;
        }
        if self.allow_unassigned {
            self.descend(v + 1, used);
        }
        let top = (used + 1).min(self.k);
        for p in 1..=top {
            self.assign(v, p);
            self.descend(v + 1, used.max(p));
            self.unassign(v, p);
        }
    }

    // boundary of p changes by the edges from v leaving p minus those entering it
    fn delta(&self, v: usize, p: usize) -> f64 {
        let inside: f64 = self
            .g
            .neighbors(v)
            .iter()
            .filter(|&&(u, _)| u < v && self.part[u] == p)
            .map(|&(_, w)| w)
            .sum();
        self.g.degree(v) - 2.0 * inside
    }

    fn assign(&mut self, v: usize, p: usize) {
        let d = self.delta(v, p);
        self.part[v] = p;
        self.boundary[p] += d;
        self.measure[p] += self.g.mu(v);
    }

    fn unassign(&mut self, v: usize, p: usize) {
        self.part[v] = 0;
        let d = self.delta(v, p);
        self.boundary[p] -= d;
        self.measure[p] -= self.g.mu(v);
    }
}

/// The two-way constant together with a minimizing set.
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerResult {
    pub value: f64,
    /// `S` with `μ(S) ≤ μ(V)/2` and `φ(S) = value`; `(S, V∖S)` attains `h_2`.
    pub witness: VertexSet,
    /// Number of connected sets examined.
    pub visited: f64,
}

/// Default cap on the number of connected sets examined by [`cheeger_constant`].
pub const DEFAULT_CHEEGER_BUDGET: f64 = 1e8;

/// `h_2` computed as `min { φ(S) : μ(S) ≤ μ(V)/2 }`.
///
/// The two quantities agree: one of any two disjoint sets has at most half
/// the total measure, and conversely `(S, V∖S)` is admissible with
/// `φ(V∖S) ≤ φ(S)`. A minimizer can be taken connected, because the
/// expansion of a disjoint union is a mediant of the expansions of its
/// components. Connected sets are enumerated once each, grown from their
/// smallest vertex through exclusive neighbourhoods.
pub fn cheeger_constant(g: &WeightedGraph, budget: f64) -> Result<CheegerResult> {
    let n = g.n();
    let half = 0.5 * g.total_measure() * (1.0 + 1e-12);
    let mut search = ConnectedSearch {
        g,
        half,
        budget,
        visited: 0.0,
        in_sub: vec![false; n],
        adj_count: vec![0; n],
        sub: Vec::new(),
        best_value: f64::INFINITY,
        best: Vec::new(),
    };
    for root in 0..n {
        if g.mu(root) > half {
            continue;
        }
        let ext: Vec<usize> = g
            .neighbors(root)
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| u > root)
            .collect();
        search.push(root);
        let done = search.extend(root, ext, g.degree(root), g.mu(root));
        search.pop(root);
        done?;
    }
    let witness = VertexSet::new(g, search.best.iter().copied())?;
    Ok(CheegerResult {
        value: g.boundary_weight(&witness) / witness.measure(),
        witness,
        visited: search.visited,
    })
}

struct ConnectedSearch<'a> {
    g: &'a WeightedGraph,
    half: f64,
    budget: f64,
    visited: f64,
    in_sub: Vec<bool>,
    adj_count: Vec<usize>,
    sub: Vec<usize>,
    best_value: f64,
    best: Vec<usize>,
}

impl ConnectedSearch<'_> {
    fn push(&mut self, w: usize) {
        self.in_sub[w] = true;
        self.sub.push(w);
        for &(u, _) in self.g.neighbors(w) {
            self.adj_count[u] += 1;
        }
    }

    fn pop(&mut self, w: usize) {
        self.in_sub[w] = false;
        self.sub.pop();
        for &(u, _) in self.g.neighbors(w) {
            self.adj_count[u] -= 1;
        }
    }

    fn extend(&mut self, root: usize, mut ext: Vec<usize>, boundary: f64, measure: f64) -> Result<()> {
        self.visited += 1.0;
        if self.visited > self.budget {
            return Err(Error::SearchBudgetExceeded(self.budget));
        }
        let value = boundary / measure;
        if self.best.is_empty() || value < self.best_value - 1e-12 * self.best_value.max(1.0) {
            self.best_value = value;
            self.best = self.sub.clone();
        }
        while let Some(w) = ext.pop() {
            let m = measure + self.g.mu(w);
            if m > self.half {
                continue;
            }
            let mut next = ext.clone();
            next.extend(
                self.g
                    .neighbors(w)
                    .iter()
                    .map(|&(u, _)| u)
                    .filter(|&u| u > root && !self.in_sub[u] && self.adj_count[u] == 0),
            );
            let inside: f64 = self
                .g
                .neighbors(w)
                .iter()
                .filter(|&&(u, _)| self.in_sub[u])
                .map(|&(_, wt)| wt)
                .sum();
            let b = boundary + self.g.degree(w) - 2.0 * inside;
            self.push(w);
            let r = self.extend(root, next, b, m);
            self.pop(w);
            r?;
        }
        Ok(())
    }
}

/// Lower bound on `h_2` from routing the demand `μ(s)μ(t)` between every
/// pair along shortest paths, split evenly among them.
///
/// If the heaviest edge carries `c·w_e`, then `μ(S)μ(V∖S) ≤ c·|E(S, V∖S)|_w`
/// for every `S`, hence `φ(S) ≥ μ(V)/(2c)` whenever `μ(S) ≤ μ(V)/2`.
pub fn cheeger_flow_lower_bound(g: &WeightedGraph) -> f64 {
    let n = g.n();
    let mut load = vec![Vec::new(); n];
    for x in 0..n {
        load[x] = vec![0.0; g.neighbors(x).len()];
    }
    let slot = |x: usize, y: usize| {
        g.neighbors(x)
            .binary_search_by(|&(u, _)| u.cmp(&y))
            .expect("adjacent vertices")
    };
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        dist.fill(usize::MAX);
        sigma.fill(0.0);
        delta.fill(0.0);
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        order.push(s);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(u, _) in g.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    order.push(u);
                }
                if dist[u] == dist[v] + 1 {
                    sigma[u] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            let carried = g.mu(s) * g.mu(w) + delta[w];
            for &(v, _) in g.neighbors(w) {
                if dist[v] + 1 == dist[w] {
                    let share = sigma[v] / sigma[w] * carried;
                    delta[v] += share;
                    load[v][slot(v, w)] += share;
                }
            }
        }
    }
    let mut congestion: f64 = 0.0;
    for x in 0..n {
        for (i, &(y, w)) in g.neighbors(x).iter().enumerate() {
            if x < y {
                // each unordered pair was routed from both ends
                let total = 0.5 * (load[x][i] + load[y][slot(y, x)]);
                congestion = congestion.max(total / w);
            }
        }
    }
    g.total_measure() / (2.0 * congestion)
}

/// Upper bound on `h_2` from the threshold sets of `f`: the best
/// `max(φ(S), φ(V∖S))` over prefixes `S` of the vertices sorted by `f`.
pub fn sweep_upper_bound(g: &WeightedGraph, f: &[f64]) -> Result<(f64, VertexSet)> {
    if f.len() != g.n() {
        return Err(Error::FunctionLength {
            expected: g.n(),
            got: f.len(),
        });
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let total = g.total_measure();
    let mut inside = vec![false; g.n()];
    let (mut boundary, mut measure) = (0.0, 0.0);
    let mut best = (f64::INFINITY, 0);
    for (i, &v) in order.iter().enumerate().take(g.n() - 1) {
        let into: f64 = g
            .neighbors(v)
            .iter()
            .filter(|&&(u, _)| inside[u])
            .map(|&(_, w)| w)
            .sum();
        boundary += g.degree(v) - 2.0 * into;
        measure += g.mu(v);
        inside[v] = true;
        let value = (boundary / measure).max(boundary / (total - measure));
        if value < best.0 {
            best = (value, i + 1);
        }
    }
    let set = VertexSet::new(g, order[..best.1].iter().copied())?;
    Ok((best.0, set))
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichCheck {
    pub k: usize,
    pub h_k: f64,
    pub partition_h_k: f64,
    /// `h_{k+1}` when `k < N`.
    pub h_next: Option<f64>,
    pub holds: bool,
}

/// `h_k ≤ 𝔥_k ≤ k·h_k` and `h_k ≤ h_{k+1}`.
pub fn sandwich_check(g: &WeightedGraph, k: usize) -> Result<SandwichCheck> {
    let h_k = multiway_constant(g, k, Mode::Subpartition)?.value;
    let partition_h_k = multiway_constant(g, k, Mode::Partition)?.value;
    let h_next = if k < g.n() {
        Some(multiway_constant(g, k + 1, Mode::Subpartition)?.value)
    } else {
        None
    };
    let tol = |x: f64| 1e-12 * x.abs().max(1.0);
    let holds = h_k <= partition_h_k + tol(partition_h_k)
        && partition_h_k <= k as f64 * h_k + tol(partition_h_k)
        && h_next.is_none_or(|h| h_k <= h + tol(h));
    Ok(SandwichCheck {
        k,
        h_k,
        partition_h_k,
        h_next,
        holds,
    })
}
