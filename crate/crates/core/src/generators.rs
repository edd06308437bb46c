//! Deterministic constructors for the graph families used throughout the
//! crate.
//!
//! Labelling conventions:
//!
//! * `Cycle`, `Path`, `Complete`, `Hypercube`: vertices `0..N`; hypercube
//!   vertices are bit strings and `v ~ v ^ (1 << b)`.
//! * `Dumbbell{n}`: `0..n` is the first clique with bridge end `y0 = n-1`,
//!   `n..2n` the second with `y0' = n`; the bridge is `(n-1, n)`.
//! * `Triangle`: `x, y, z` with `w_xy = a`, `w_xz = b`, `w_yz = c`.
//! * `Tetrahedron`: `x1..x4`, three perfect matchings of weight `a`
//!   (`x1x4`, `x2x3`), `b` (`x1x2`, `x3x4`) and `c` (`x1x3`, `x2x4`).
//! * `AbelianCayley`: tuples modulo `orders`, indexed row-major; `u ~ u + s`.
//! * `MimuraProduct{n}`: `K_n × K_2` through [`cartesian_product`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cartesian_product, MeasureMode, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    Hypercube { d: usize },
    AbelianCayley { orders: Vec<usize>, generators: Vec<Vec<i64>> },
    Dumbbell { n: usize },
    Triangle { a: f64, b: f64, c: f64 },
    Tetrahedron { a: f64, b: f64, c: f64 },
    MimuraProduct { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub measure: MeasureMode,
}

impl FamilySpec {
    pub fn new(family: Family, measure: MeasureMode) -> Self {
        Self { family, measure }
    }
}

/// Explicit triangle measure from the values at `z`, `y` and `x`
/// (in that order, matching the weights opposite to each vertex).
pub fn triangle_measure(at_z: f64, at_y: f64, at_x: f64) -> MeasureMode {
    MeasureMode::Explicit(vec![at_x, at_y, at_z])
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn complete_edges(n: usize, offset: usize) -> Vec<(usize, usize, f64)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (offset + i, offset + j, 1.0)))
        .collect()
}

pub fn generate(spec: &FamilySpec) -> Result<WeightedGraph> {
    let measure = spec.measure.clone();
    match &spec.family {
        Family::Cycle { n } => {
            let n = *n;
            if n < 3 {
                return Err(invalid(format!("cycle needs n >= 3, got {n}")));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
            WeightedGraph::new(n, &edges, measure)
        }
        Family::Path { n } => {
            let n = *n;
            if n < 2 {
                return Err(invalid(format!("path needs n >= 2, got {n}")));
            }
            let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
            WeightedGraph::new(n, &edges, measure)
        }
        Family::Complete { n } => {
            if *n < 2 {
                return Err(invalid(format!("complete graph needs n >= 2, got {n}")));
            }
            WeightedGraph::new(*n, &complete_edges(*n, 0), measure)
        }
        Family::Hypercube { d } => {
            let d = *d;
            if !(1..=16).contains(&d) {
                return Err(invalid(format!("hypercube dimension must be in 1..=16, got {d}")));
            }
            let n = 1usize << d;
            let edges: Vec<_> = (0..n)
                .flat_map(|v| {
                    (0..d)
                        .map(move |b| (v, v ^ (1 << b), 1.0))
                        .filter(|&(u, w, _)| u < w)
                })
                .collect();
            WeightedGraph::new(n, &edges, measure)
        }
        Family::AbelianCayley { orders, generators } => cayley(orders, generators, measure),
        Family::Dumbbell { n } => {
            let n = *n;
            if n < 3 {
                return Err(invalid(format!("dumbbell needs n >= 3, got {n}")));
            }
            let mut edges = complete_edges(n, 0);
            edges.extend(complete_edges(n, n));
            edges.push((n - 1, n, 1.0));
            WeightedGraph::new(2 * n, &edges, measure)
        }
        Family::Triangle { a, b, c } => {
            positive("a", *a)?;
            positive("b", *b)?;
            positive("c", *c)?;
            let labels = ["x", "y", "z"].map(String::from).to_vec();
            WeightedGraph::with_labels(labels, &[(0, 1, *a), (0, 2, *b), (1, 2, *c)], measure)
        }
        Family::Tetrahedron { a, b, c } => {
            positive("a", *a)?;
            positive("b", *b)?;
            positive("c", *c)?;
            let labels = ["x1", "x2", "x3", "x4"].map(String::from).to_vec();
            let edges = [
                (0, 3, *a),
                (1, 2, *a),
                (0, 1, *b),
                (2, 3, *b),
                (0, 2, *c),
                (1, 3, *c),
            ];
            WeightedGraph::with_labels(labels, &edges, measure)
        }
        Family::MimuraProduct { n } => {
            if *n < 2 {
                return Err(invalid(format!("K_n x K_2 needs n >= 2, got {n}")));
            }
            let kn = WeightedGraph::new(*n, &complete_edges(*n, 0), MeasureMode::Unit)?;
            let k2 = WeightedGraph::new(2, &[(0, 1, 1.0)], MeasureMode::Unit)?;
            cartesian_product(&kn, &k2, measure)
        }
    }
}

fn cayley(orders: &[usize], generators: &[Vec<i64>], measure: MeasureMode) -> Result<WeightedGraph> {
    if orders.is_empty() || orders.iter().any(|&m| m < 2) {
        return Err(invalid("every cyclic factor needs order >= 2"));
    }
    let n: usize = orders.iter().product();
    if n > 1 << 16 {
        return Err(invalid(format!("group of order {n} is too large")));
    }
    let rank = orders.len();
    let reduce = |s: &[i64]| -> Vec<usize> {
        s.iter()
            .zip(orders)
            .map(|(&c, &m)| c.rem_euclid(m as i64) as usize)
            .collect()
    };
    let mut gens = BTreeSet::new();
    for s in generators {
        if s.len() != rank {
            return Err(invalid(format!(
                "generator {s:?} has {} coordinates, group has {rank}",
                s.len()
            )));
        }
        let r = reduce(s);
        if r.iter().all(|&c| c == 0) {
            return Err(invalid("the identity cannot be a generator"));
        }
        gens.insert(r);
    }
    if gens.is_empty() {
        return Err(invalid("generating set is empty"));
    }
    for s in &gens {
        let inverse: Vec<usize> = s.iter().zip(orders).map(|(&c, &m)| (m - c) % m).collect();
        if !gens.contains(&inverse) {
            return Err(invalid(format!("generating set is not symmetric: missing inverse of {s:?}")));
        }
    }

    let decode = |mut idx: usize| -> Vec<usize> {
        let mut coords = vec![0; rank];
        for i in (0..rank).rev() {
            coords[i] = idx % orders[i];
            idx /= orders[i];
        }
        coords
    };
    let encode = |coords: &[usize]| -> usize {
        coords
            .iter()
            .zip(orders)
            .fold(0, |acc, (&c, &m)| acc * m + c)
    };

    let mut edge_set = BTreeSet::new();
    for u in 0..n {
        let cu = decode(u);
        for s in &gens {
            let cv: Vec<usize> = cu
                .iter()
                .zip(s)
                .zip(orders)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect();
            let v = encode(&cv);
            edge_set.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<_> = edge_set.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
    let labels = (0..n)
        .map(|i| {
            let c: Vec<String> = decode(i).iter().map(|v| v.to_string()).collect();
            format!("({})", c.join(","))
        })
        .collect();
    WeightedGraph::with_labels(labels, &edges, measure).map_err(|e| match e {
        Error::Disconnected => invalid("generators do not generate the group"),
        other => other,
    })
}

/// The standard generators `±e_i` of `Z_{m1} × ... × Z_{mr}`.
pub fn torus_generators(rank: usize) -> Vec<Vec<i64>> {
    (0..rank)
        .flat_map(|i| {
            [1i64, -1].into_iter().map(move |sign| {
                let mut g = vec![0; rank];
                g[i] = sign;
                g
            })
        })
        .collect()
}

/// Functions on the dumbbell `G_n` whose Γ₂ at the bridge end `y0` is negative.
///
/// `f0` is `0` on the first clique, `1` at `y0'` and `2` on the rest of the
/// second clique. `g0` exists only for `n = 3`: `1` at `y0`, `-1` on the rest
/// of the first clique, `4` at `y0'` and `7` on the rest of the second.
pub fn dumbbell_witness_functions(n: usize) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if n < 3 {
        return Err(invalid(format!("dumbbell needs n >= 3, got {n}")));
    }
    let (y0, y0p) = (n - 1, n);
    let mut f0 = vec![0.0; 2 * n];
    for (v, value) in f0.iter_mut().enumerate().skip(n) {
        *value = if v == y0p { 1.0 } else { 2.0 };
    }
    let g0 = (n == 3).then(|| {
        (0..2 * n)
            .map(|v| match v {
                _ if v == y0 => 1.0,
                _ if v < n => -1.0,
                _ if v == y0p => 4.0,
                _ => 7.0,
            })
            .collect()
    });
    Ok((f0, g0))
}

/// A function on `G × G` (row-major) built from `f` around `x`:
/// `F(a, b) = f(a) + f(b) - f(x)`.
///
/// It satisfies `F(x,x) = f(x)`, `F(a,x) = f(a)`, `F(x,b) = f(b)` and
/// `F(a,b) = F(x,b) + F(a,x) - F(x,x)` on every pair, so both slices through
/// `(x,x)` reproduce `f` and all mixed second differences vanish.
pub fn product_tightness_function(g: &WeightedGraph, f: &[f64], x: usize) -> Vec<f64> {
    let n = g.n();
    assert_eq!(f.len(), n, "function length must match the graph");
    let fx = f[x];
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            out.push(f[a] + f[b] - fx);
        }
    }
    out
}
