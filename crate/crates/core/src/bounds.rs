//! A ledger of the inequalities relating curvature, eigenvalues, multi-way
//! isoperimetric constants, concentration and diameter.
//!
//! Every entry is stated as `lhs ≤ rhs` with `slack = rhs − lhs`, and passes
//! when `slack ≥ −tol·max(1, |lhs|, |rhs|)`. Inequalities that only hold under
//! a curvature hypothesis require a [`GraphCertificate`]; inequalities with an
//! unspecified universal constant are reported with the implied constant and
//! never pass or fail.

use std::collections::BTreeMap;
use std::f64::consts::{E, SQRT_2};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::curvature::{cd_check_graph, curvature_sweep, Dimension, GraphCertificate};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::isoperimetry::{
    cheeger_constant, cheeger_flow_lower_bound, multiway_constant_with_budget, sweep_upper_bound,
    Mode,
};
use crate::spectral::{decompose, SpectralDecomposition};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 42;

/// `(e − 1)/(2e)`.
pub fn buser_constant() -> f64 {
    (E - 1.0) / (2.0 * E)
}

/// `(20√2 e/(e − 1))²`.
pub fn ratio_constant() -> f64 {
    (20.0 * SQRT_2 * E / (E - 1.0)).powi(2)
}

/// `(e − 1)²/(40√2 e²)`.
pub fn higher_buser_constant() -> f64 {
    (E - 1.0).powi(2) / (40.0 * SQRT_2 * E * E)
}

/// `40e/(e − 1)`.
pub fn diameter_constant() -> f64 {
    40.0 * E / (E - 1.0)
}

/// `(e − 1)/(20√2 e)`.
pub fn concentration_constant() -> f64 {
    (E - 1.0) / (20.0 * SQRT_2 * E)
}

/// `⌊x⌋` after a relative upward nudge of `1e-12`, so that values that are
/// integers up to rounding do not drop by one.
pub fn nudged_floor(x: f64) -> f64 {
    (x + 1e-12 * x.abs().max(1.0)).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub tag: String,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: Status,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundEntry {
    fn new(name: &str, tag: &str, k: Option<usize>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let mut e = Self {
            name: name.into(),
            tag: tag.into(),
            k,
            lhs,
            rhs,
            slack: rhs - lhs,
            status: Status::Pass,
            inputs: BTreeMap::new(),
            note: None,
        };
        e.grade(tol);
        e
    }

    fn report_only(name: &str, tag: &str, k: Option<usize>, lhs: f64, rhs: f64) -> Self {
        let mut e = Self::new(name, tag, k, lhs, rhs, DEFAULT_TOL);
        e.status = Status::ReportOnly;
        e
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    /// Recomputes Pass/Fail with tolerance `tol`.
    pub fn grade(&mut self, tol: f64) {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.status = if self.slack >= -tol * scale {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn skip(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.note = Some(reason.into());
        self
    }
}

fn require_cd(g: &WeightedGraph, cert: Option<&GraphCertificate>, k: f64) -> Result<()> {
    match cert {
        Some(c) if c.implies(g, k) => Ok(()),
        Some(c) if !c.is_for(g) => Err(Error::PreconditionNotCertified(
            "certificate belongs to a different graph".into(),
        )),
        Some(c) => Err(Error::PreconditionNotCertified(format!(
            "certified curvature {} is below {k}",
            c.curvature()
        ))),
        None => Err(Error::PreconditionNotCertified(format!(
            "CD({k}, inf) is not certified"
        ))),
    }
}

fn require_dec(g: &WeightedGraph, dec: &SpectralDecomposition) -> Result<()> {
    if dec.is_for(g) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "spectral decomposition belongs to a different graph".into(),
        ))
    }
}

fn lambda_k(dec: &SpectralDecomposition, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::KOutOfRange { k, n: dec.n() });
    }
    dec.lambda(k)
}

fn set_json(g: &WeightedGraph, s: &VertexSet) -> Value {
    Value::from(s.iter().map(|v| g.label(v).to_string()).collect::<Vec<_>>())
}

fn buser_entry(g: &WeightedGraph, dec: &SpectralDecomposition, h2: f64, tol: f64) -> BoundEntry {
    let l2 = dec.eigenvalues()[1];
    let lhs = buser_constant() * (l2 / g.d_nor()).sqrt();
    BoundEntry::new("buser", "cd0", Some(2), lhs, h2, tol)
        .with("lambda_2", l2)
        .with("h_2", h2)
        .with("d_nor", g.d_nor())
        .with("constant", buser_constant())
}

/// `((e − 1)/(2e)) √(λ₂/D^nor) ≤ h₂` on a `CD(0, ∞)` graph.
pub fn buser_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    require_cd(g, cert, 0.0)?;
    Ok(buser_entry(g, dec, h2, DEFAULT_TOL))
}

fn buser_general_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: f64,
    tol: f64,
) -> BoundEntry {
    let l2 = dec.eigenvalues()[1];
    let dn = g.d_nor();
    let rhs = 8.0 * ((dn * k).sqrt() * h2).max((E / (E - 1.0)).powi(2) * dn * h2 * h2);
    BoundEntry::new("buser", "general", Some(2), l2, rhs, tol)
        .with("lambda_2", l2)
        .with("h_2", h2)
        .with("d_nor", dn)
        .with("curvature_deficit", k)
}

/// `λ₂ ≤ 8 max{√(D^nor K) h₂, (e/(e − 1))² D^nor h₂²}` on a `CD(−K, ∞)` graph.
pub fn buser_general_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: f64,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("K must be nonnegative, got {k}")));
    }
    require_dec(g, dec)?;
    require_cd(g, cert, -k)?;
    Ok(buser_general_entry(g, dec, h2, k, DEFAULT_TOL))
}

fn improved_cheeger_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: usize,
    tol: f64,
) -> Result<BoundEntry> {
    let l2 = dec.eigenvalues()[1];
    let lk = lambda_k(dec, k)?;
    let rhs = 10.0 * (2.0 * g.d_non()).sqrt() * k as f64 * l2 / lk.sqrt();
    Ok(BoundEntry::new("improved_cheeger", "universal", Some(k), h2, rhs, tol)
        .with("lambda_2", l2)
        .with("lambda_k", lk)
        .with("h_2", h2)
        .with("d_non", g.d_non()))
}

/// `h₂ ≤ 10 √(2 D^non) k λ₂/√λ_k` on every graph.
pub fn improved_cheeger_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: usize,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    improved_cheeger_entry(g, dec, h2, k, DEFAULT_TOL)
}

fn eigenvalue_ratio_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    k: usize,
    tol: f64,
) -> Result<BoundEntry> {
    let l2 = dec.eigenvalues()[1];
    let lk = lambda_k(dec, k)?;
    let rhs = ratio_constant() * g.d_non() * g.d_nor() * (k * k) as f64 * l2;
    Ok(BoundEntry::new("eigenvalue_ratio", "cd0", Some(k), lk, rhs, tol)
        .with("lambda_2", l2)
        .with("lambda_k", lk)
        .with("ratio", lk / l2)
        .with("d_non", g.d_non())
        .with("d_nor", g.d_nor())
        .with("constant", ratio_constant()))
}

/// `λ_k ≤ (20√2 e/(e − 1))² D^non D^nor k² λ₂` on a `CD(0, ∞)` graph.
pub fn eigenvalue_ratio_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    k: usize,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    require_cd(g, cert, 0.0)?;
    eigenvalue_ratio_entry(g, dec, k, DEFAULT_TOL)
}

fn higher_buser_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: usize,
    tol: f64,
) -> Result<BoundEntry> {
    let lk = lambda_k(dec, k)?;
    let lhs = higher_buser_constant() / (g.d_nor() * g.d_non().sqrt()) / k as f64 * lk.sqrt();
    Ok(BoundEntry::new("higher_buser", "cd0", Some(k), lhs, h2, tol)
        .with("lambda_k", lk)
        .with("h_2", h2)
        .with("constant", higher_buser_constant()))
}

/// `((e − 1)²/(40√2 e²)) (1/(D^nor √D^non)) (1/k) √λ_k ≤ h₂` on a `CD(0, ∞)`
/// graph.
pub fn higher_buser_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    h2: f64,
    k: usize,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    require_cd(g, cert, 0.0)?;
    higher_buser_entry(g, dec, h2, k, DEFAULT_TOL)
}

fn validate_pair(g: &WeightedGraph, s1: &VertexSet, s2: &VertexSet) -> Result<usize> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    if !s1.is_disjoint(s2) {
        return Err(Error::SetsNotDisjoint);
    }
    g.set_distance(s1, s2)
}

fn validate_rho(g: &WeightedGraph, s1: &VertexSet, s2: &VertexSet, rho: usize) -> Result<usize> {
    let dist = validate_pair(g, s1, s2)?;
    if rho < 1 {
        return Err(Error::InvalidParameter("rho must be at least 1".into()));
    }
    if dist <= rho {
        return Err(Error::DistanceTooSmall { dist, rho });
    }
    Ok(dist)
}

fn pair_inputs(g: &WeightedGraph, e: BoundEntry, s1: &VertexSet, s2: &VertexSet) -> BoundEntry {
    let total = g.total_measure();
    e.with("s1", s1.measure() / total)
        .with("s2", s2.measure() / total)
        .with("set_1", set_json(g, s1))
        .with("set_2", set_json(g, s2))
}

/// `λ₂ μ(V) ≤ (1/dist²)(1/s₁ + 1/s₂)(|E|_w − |E_{S₁}|_w − |E_{S₂}|_w)`.
pub fn finer_cheeger_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
) -> Result<BoundEntry> {
    finer_cheeger_entry(g, dec, s1, s2, DEFAULT_TOL)
}

fn finer_cheeger_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
    tol: f64,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    let dist = validate_pair(g, s1, s2)? as f64;
    let total = g.total_measure();
    let (a, b) = (s1.measure() / total, s2.measure() / total);
    let l2 = dec.eigenvalues()[1];
    let outside = g.total_weight() - g.interior_weight(s1) - g.interior_weight(s2);
    let rhs = (1.0 / a + 1.0 / b) * outside / (dist * dist);
    let e = BoundEntry::new("finer_cheeger", "universal", None, l2 * total, rhs, tol)
        .with("lambda_2", l2)
        .with("distance", dist);
    Ok(pair_inputs(g, e, s1, s2))
}

/// `s₂ ≤ (1 − s₁) exp{−ln(1 + 2s₁) ⌊λ₂ ρ/(2 D^non)⌋}` when `dist(S₁, S₂) > ρ ≥ 1`.
pub fn am_concentration_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
    rho: usize,
) -> Result<BoundEntry> {
    am_concentration_entry(g, dec, s1, s2, rho, DEFAULT_TOL)
}

fn am_concentration_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
    rho: usize,
    tol: f64,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    let dist = validate_rho(g, s1, s2, rho)?;
    let total = g.total_measure();
    let (a, b) = (s1.measure() / total, s2.measure() / total);
    let l2 = dec.eigenvalues()[1];
    let steps = nudged_floor(l2 * rho as f64 / (2.0 * g.d_non()));
    let rhs = (1.0 - a) * (-(1.0 + 2.0 * a).ln() * steps).exp();
    let e = BoundEntry::new("concentration", "lambda_2", None, b, rhs, tol)
        .with("lambda_2", l2)
        .with("rho", rho)
        .with("distance", dist)
        .with("floor", steps);
    Ok(pair_inputs(g, e, s1, s2))
}

/// The `λ_k` form of the concentration inequality on a `CD(0, ∞)` graph, with
/// floor argument `((e − 1)/(20√2 e D^non k)) √(λ_k ρ/D^nor)`.
pub fn am_concentration_k_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
    rho: usize,
    k: usize,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    require_cd(g, cert, 0.0)?;
    am_concentration_k_entry(g, dec, s1, s2, rho, k, DEFAULT_TOL)
}

fn am_concentration_k_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    s1: &VertexSet,
    s2: &VertexSet,
    rho: usize,
    k: usize,
    tol: f64,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    let dist = validate_rho(g, s1, s2, rho)?;
    let lk = lambda_k(dec, k)?;
    let total = g.total_measure();
    let (a, b) = (s1.measure() / total, s2.measure() / total);
    let arg = concentration_constant() / (g.d_non() * k as f64)
        * (lk * rho as f64 / g.d_nor()).sqrt();
    let steps = nudged_floor(arg);
    let rhs = (1.0 - a) * (-(1.0 + 2.0 * a).ln() * steps).exp();
    let e = BoundEntry::new("concentration", "lambda_k", Some(k), b, rhs, tol)
        .with("lambda_k", lk)
        .with("rho", rho)
        .with("distance", dist)
        .with("floor", steps);
    Ok(pair_inputs(g, e, s1, s2))
}

fn log_measure_ratio(g: &WeightedGraph) -> f64 {
    (g.total_measure() / g.min_measure()).log2()
}

/// `diam ≤ 2 ⌊√(2 D^non/λ₂) log₂(μ(V)/min μ)⌋` on every graph.
pub fn diameter_check(g: &WeightedGraph, dec: &SpectralDecomposition) -> Result<BoundEntry> {
    diameter_entry(g, dec, DEFAULT_TOL)
}

fn diameter_entry(g: &WeightedGraph, dec: &SpectralDecomposition, tol: f64) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    let l2 = dec.eigenvalues()[1];
    let rhs = 2.0 * nudged_floor((2.0 * g.d_non() / l2).sqrt() * log_measure_ratio(g));
    Ok(
        BoundEntry::new("diameter", "lambda_2", None, g.diameter() as f64, rhs, tol)
            .with("lambda_2", l2)
            .with("log2_measure_ratio", log_measure_ratio(g)),
    )
}

/// `diam ≤ 2 ⌊(40e/(e − 1)) D^non √D^nor (k/√λ_k) log₂(μ(V)/min μ)⌋` on a
/// `CD(0, ∞)` graph.
pub fn diameter_k_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    k: usize,
    cert: Option<&GraphCertificate>,
) -> Result<BoundEntry> {
    require_cd(g, cert, 0.0)?;
    diameter_k_entry(g, dec, k, DEFAULT_TOL)
}

fn diameter_k_entry(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    k: usize,
    tol: f64,
) -> Result<BoundEntry> {
    require_dec(g, dec)?;
    let lk = lambda_k(dec, k)?;
    let arg = diameter_constant() * g.d_non() * g.d_nor().sqrt() * k as f64 / lk.sqrt()
        * log_measure_ratio(g);
    let rhs = 2.0 * nudged_floor(arg);
    Ok(
        BoundEntry::new("diameter", "lambda_k", Some(k), g.diameter() as f64, rhs, tol)
            .with("lambda_k", lk)
            .with("constant", diameter_constant()),
    )
}

/// Implied constants of the isoperimetric ratio estimates. The main entry
/// compares `h_k` with `D^non D^nor k √(ln k) h₂`; with a genus bound `g ≥ 1`
/// a second entry uses `D^non D^nor ln(g + 1) k h₂`.
pub fn iso_ratio_report(
    g: &WeightedGraph,
    h_k: f64,
    h2: f64,
    k: usize,
    genus_bound: Option<f64>,
) -> Result<Vec<BoundEntry>> {
    if k < 2 || k > g.n() {
        return Err(Error::KOutOfRange { k, n: g.n() });
    }
    let scale = g.d_non() * g.d_nor() * h2;
    let rhs = scale * k as f64 * (k as f64).ln().sqrt();
    let mut out = vec![BoundEntry::report_only("isoperimetric_ratio", "log", Some(k), h_k, rhs)
        .with("h_k", h_k)
        .with("h_2", h2)
        .with("implied_constant", h_k / rhs)];
    if let Some(genus) = genus_bound {
        if !(genus >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "genus bound must be at least 1, got {genus}"
            )));
        }
        let rhs = scale * (genus + 1.0).ln() * k as f64;
        out.push(
            BoundEntry::report_only("isoperimetric_ratio", "genus", Some(k), h_k, rhs)
                .with("genus_bound", genus)
                .with("implied_constant", h_k / rhs),
        );
    }
    Ok(out)
}

/// Maximum number of neighbours.
pub fn max_vertex_degree(g: &WeightedGraph) -> usize {
    (0..g.n()).map(|x| g.neighbors(x).len()).max().unwrap_or(0)
}

/// Implied constant of `𝔥_k ≤ C d_G k² √(ln k) 𝔥₂` for unweighted graphs with
/// unit measure.
pub fn partition_ratio_report(
    g: &WeightedGraph,
    partition_h_k: f64,
    partition_h2: f64,
    k: usize,
) -> Result<BoundEntry> {
    if !g.is_unweighted() || g.measure().iter().any(|&m| m != 1.0) {
        return Err(Error::PreconditionNotCertified(
            "partition ratio needs unit weights and unit measure".into(),
        ));
    }
    let kf = k as f64;
    let rhs = max_vertex_degree(g) as f64 * kf * kf * kf.ln().sqrt() * partition_h2;
    Ok(
        BoundEntry::report_only("partition_ratio", "log", Some(k), partition_h_k, rhs)
            .with("implied_constant", partition_h_k / rhs)
            .with("d_g", max_vertex_degree(g)),
    )
}

/// `d_G/2 ≤ h₃/h₂`, the lower bound known for `K_N × K_2`.
pub fn mimura_check(g: &WeightedGraph, h3: f64, h2: f64) -> BoundEntry {
    let d = max_vertex_degree(g) as f64;
    BoundEntry::new("mimura", "product", Some(3), d / 2.0, h3 / h2, DEFAULT_TOL)
        .with("h_3", h3)
        .with("h_2", h2)
        .with("d_g", d)
}

/// A pair of sets for the concentration checks, with `ρ < dist(S₁, S₂)`.
#[derive(Debug, Clone)]
pub struct SetPair {
    pub s1: VertexSet,
    pub s2: VertexSet,
    pub rho: usize,
}

/// Deterministic pairs of balls around far-apart vertices. For each sample a
/// random centre `x` is drawn, `y` is a vertex at maximal distance from it,
/// and radii are drawn so that the balls stay at distance at least two; `ρ`
/// is one less than that distance.
pub fn sample_set_pairs(g: &WeightedGraph, count: usize, seed: u64) -> Vec<SetPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if g.diameter() < 2 {
        return out;
    }
    for _ in 0..count {
        let x = rng.gen_range(0..g.n());
        let dist = g.bfs_distances(x);
        let far = *dist.iter().max().expect("nonempty graph");
        if far < 2 {
            continue;
        }
        let candidates: Vec<usize> = (0..g.n()).filter(|&v| dist[v] == far).collect();
        let y = *candidates.choose(&mut rng).expect("farthest vertex exists");
        let r1 = rng.gen_range(0..=far - 2);
        let r2 = rng.gen_range(0..=far - 2 - r1);
        let s1 = g.ball(x, r1);
        let s2 = g.ball(y, r2);
        let d = g.set_distance(&s1, &s2).expect("nonempty balls");
        out.push(SetPair { s1, s2, rho: d - 1 });
    }
    out
}

/// What is known about `h₂` for a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum H2Estimate {
    Exact(f64),
    Bounds { lower: f64, upper: f64 },
}

impl H2Estimate {
    pub fn lower(&self) -> f64 {
        match *self {
            H2Estimate::Exact(v) => v,
            H2Estimate::Bounds { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            H2Estimate::Exact(v) => v,
            H2Estimate::Bounds { upper, .. } => upper,
        }
    }

    pub fn exact(&self) -> Option<f64> {
        match *self {
            H2Estimate::Exact(v) => Some(v),
            H2Estimate::Bounds { .. } => None,
        }
    }
}

/// Exact `h₂` through the connected-set search, or certified bounds when the
/// search exceeds `budget`: `max(λ₂/2, flow bound)` from below and a sweep over
/// `ψ₂` from above.
pub fn estimate_h2(g: &WeightedGraph, dec: &SpectralDecomposition, budget: f64) -> Result<H2Estimate> {
    match cheeger_constant(g, budget) {
        Ok(r) => Ok(H2Estimate::Exact(r.value)),
        Err(Error::SearchBudgetExceeded(_)) => {
            let lower = (0.5 * dec.eigenvalues()[1]).max(cheeger_flow_lower_bound(g));
            let (upper, _) = sweep_upper_bound(g, &dec.eigenfunction(2)?)?;
            Ok(H2Estimate::Bounds { lower, upper })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportOptions {
    pub seed: u64,
    pub tol: f64,
    /// Evaluate curvature-gated checks without a certificate, as ReportOnly.
    pub force: bool,
    /// Number of sampled set pairs for the concentration checks.
    pub sampled_pairs: usize,
    #[serde(skip)]
    pub explicit_pairs: Vec<SetPair>,
    pub genus_bound: Option<f64>,
    /// Add the `d_G/2 ≤ h₃/h₂` entry; meaningful for `K_N × K_2`.
    pub mimura_evidence: bool,
    /// Cap on canonical assignments per multi-way enumeration.
    pub enumeration_budget: f64,
    /// Cap on connected sets examined for `h₂`.
    pub cheeger_budget: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            force: false,
            sampled_pairs: 4,
            explicit_pairs: Vec::new(),
            genus_bound: None,
            mimura_evidence: false,
            enumeration_budget: 1e7,
            cheeger_budget: 1e7,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexCurvature {
    pub vertex: String,
    /// `K(x, ∞)`; `null` in JSON when it is `−∞`.
    pub curvature: f64,
    pub cd0: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSummary {
    pub cd0: bool,
    pub failing_vertices: Vec<String>,
    pub min_curvature: f64,
    /// Curvature bound `K` for which `CD(K, ∞)` was verified on every vertex.
    pub certified: Option<f64>,
    pub per_vertex: Vec<VertexCurvature>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub schema: String,
    pub vertices: usize,
    pub k_max: usize,
    pub options: ReportOptions,
    pub curvature: CurvatureSummary,
    pub h2: H2Estimate,
    pub entries: Vec<BoundEntry>,
}

impl BoundsReport {
    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    pub fn has_failures(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    pub fn entries_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a BoundEntry> + 'a {
        self.entries.iter().filter(move |e| e.name == name)
    }
}

/// Certificate for the largest `K` the curvature sweep supports, slightly
/// lowered to absorb rounding. `CD(0, ∞)` is tried first.
fn certify(g: &WeightedGraph, tol: f64) -> Result<(CurvatureSummary, Option<GraphCertificate>)> {
    let sweep = curvature_sweep(g, Dimension::Infinite)?;
    let zero = cd_check_graph(g, 0.0, Dimension::Infinite, tol);
    let min_curvature = sweep.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let cert = if zero.holds {
        zero.certificate()
    } else if min_curvature.is_finite() {
        let k = min_curvature - 1e-6 * min_curvature.abs().max(1.0);
        cd_check_graph(g, k, Dimension::Infinite, tol).certificate()
    } else {
        None
    };
    let per_vertex: Vec<VertexCurvature> = sweep
        .iter()
        .zip(&zero.per_vertex)
        .map(|(c, z)| VertexCurvature {
            vertex: g.label(c.vertex).to_string(),
            curvature: c.value,
            cd0: z.holds,
        })
        .collect();
    let summary = CurvatureSummary {
        cd0: zero.holds,
        failing_vertices: zero
            .failing_vertices()
            .into_iter()
            .map(|v| g.label(v).to_string())
            .collect(),
        min_curvature,
        certified: cert.as_ref().map(|c| c.curvature()),
        per_vertex,
    };
    Ok((summary, cert))
}

/// Runs every applicable check for `k = 2..=k_max`.
pub fn full_report(g: &WeightedGraph, k_max: usize, options: &ReportOptions) -> Result<BoundsReport> {
    let n = g.n();
    if k_max < 2 || k_max > n {
        return Err(Error::KOutOfRange { k: k_max, n });
    }
    let tol = options.tol;
    let dec = decompose(g)?;
    let (curvature, cert) = certify(g, tol)?;
    let cd0 = cert.as_ref().is_some_and(|c| c.implies(g, 0.0));
    let h2 = estimate_h2(g, &dec, options.cheeger_budget)?;
    let mut entries = Vec::new();

    // Applies the curvature gate to a computed entry.
    let gate = |mut e: BoundEntry, certified: bool| {
        if certified {
            e
        } else if options.force {
            e.status = Status::ReportOnly;
            e.note = Some("hypothesis not certified; evaluated because of --force".into());
            e
        } else {
            e.skip("curvature hypothesis not certified")
        }
    };
    // Entries evaluated on one side of an h₂ bracket are only conclusive if
    // they pass.
    let bracket = |e: BoundEntry| {
        if h2.exact().is_some() || e.status != Status::Fail {
            e.with("h_2_source", if h2.exact().is_some() { "exact" } else { "bound" })
        } else {
            e.skip("h_2 beyond search budget and its bounds are inconclusive")
        }
    };

    entries.push(bracket(gate(buser_entry(g, &dec, h2.lower(), tol), cd0)));
    if let Some(c) = &cert {
        let k = (-c.curvature()).max(0.0);
        entries.push(bracket(buser_general_entry(g, &dec, h2.lower(), k, tol)));
    } else {
        entries.push(
            buser_general_entry(g, &dec, h2.lower(), f64::INFINITY, tol)
                .skip("no finite curvature lower bound"),
        );
    }
    entries.push(diameter_entry(g, &dec, tol)?);

    for k in 2..=k_max {
        entries.push(bracket(improved_cheeger_entry(g, &dec, h2.upper(), k, tol)?));
        entries.push(gate(eigenvalue_ratio_entry(g, &dec, k, tol)?, cd0));
        if !cd0 {
            let l2 = dec.eigenvalues()[1];
            let lk = dec.lambda(k)?;
            entries.push(
                BoundEntry::report_only(
                    "eigenvalue_ratio",
                    "observed",
                    Some(k),
                    lk / l2,
                    ratio_constant() * g.d_non() * g.d_nor() * (k * k) as f64,
                )
                .with("lambda_2", l2)
                .with("lambda_k", lk),
            );
        }
        entries.push(bracket(gate(higher_buser_entry(g, &dec, h2.lower(), k, tol)?, cd0)));
        entries.push(gate(diameter_k_entry(g, &dec, k, tol)?, cd0));
    }

    let mut pairs = options.explicit_pairs.clone();
    pairs.extend(sample_set_pairs(g, options.sampled_pairs, options.seed));
    for (i, pair) in pairs.iter().enumerate() {
        let mark = |e: BoundEntry| e.with("pair", i);
        entries.push(mark(finer_cheeger_entry(g, &dec, &pair.s1, &pair.s2, tol)?));
        entries.push(mark(am_concentration_entry(g, &dec, &pair.s1, &pair.s2, pair.rho, tol)?));
        for k in 2..=k_max {
            let e = am_concentration_k_entry(g, &dec, &pair.s1, &pair.s2, pair.rho, k, tol)?;
            entries.push(mark(gate(e, cd0)));
        }
    }
    if pairs.is_empty() {
        entries.push(
            BoundEntry::new("concentration", "lambda_2", None, 0.0, 0.0, tol)
                .skip("no set pair at distance two or more"),
        );
    }

    multiway_entries(g, k_max, options, &h2, cd0, &mut entries)?;

    entries.sort_by(|a, b| (a.name.as_str(), a.k).cmp(&(b.name.as_str(), b.k)));
    Ok(BoundsReport {
        schema: crate::io::SCHEMA.to_string(),
        vertices: n,
        k_max,
        options: options.clone(),
        curvature,
        h2,
        entries,
    })
}

fn multiway_entries(
    g: &WeightedGraph,
    k_max: usize,
    options: &ReportOptions,
    h2: &H2Estimate,
    cd0: bool,
    entries: &mut Vec<BoundEntry>,
) -> Result<()> {
    let tol = options.tol;
    let budget = options.enumeration_budget;
    let compute = |k: usize, mode: Mode| match multiway_constant_with_budget(g, k, mode, budget) {
        Ok(r) => Ok(Some(r.value)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let top = (k_max + 1).min(g.n());
    let mut sub = BTreeMap::new();
    let mut part = BTreeMap::new();
    for k in 2..=top {
        if k == 2 {
            if let Some(v) = h2.exact() {
                sub.insert(2, v);
            }
        } else if let Some(v) = compute(k, Mode::Subpartition)? {
            sub.insert(k, v);
        }
        if k <= k_max {
            if let Some(v) = compute(k, Mode::Partition)? {
                part.insert(k, v);
            }
        }
    }
    let unit = g.is_unweighted() && g.measure().iter().all(|&m| m == 1.0);
    let skipped = |name: &str, k: usize| {
        BoundEntry::new(name, "enumeration", Some(k), 0.0, 0.0, tol)
            .skip("multi-way enumeration exceeds its budget")
    };
    for k in 2..=k_max {
        match (sub.get(&k), part.get(&k)) {
            (Some(&hk), Some(&pk)) => {
                entries.push(
                    BoundEntry::new("sandwich", "lower", Some(k), hk, pk, tol)
                        .with("h_k", hk)
                        .with("partition_h_k", pk),
                );
                entries.push(
                    BoundEntry::new("sandwich", "upper", Some(k), pk, k as f64 * hk, tol)
                        .with("h_k", hk)
                        .with("partition_h_k", pk),
                );
            }
            _ => entries.push(skipped("sandwich", k)),
        }
        if let (Some(&hk), Some(&hn)) = (sub.get(&k), sub.get(&(k + 1))) {
            entries.push(BoundEntry::new("multiway_monotone", "next", Some(k), hk, hn, tol));
        }
        if k > 2 {
            match (sub.get(&k), h2.exact()) {
                (Some(&hk), Some(h2v)) => {
                    for mut e in iso_ratio_report(g, hk, h2v, k, options.genus_bound)? {
                        if !cd0 {
                            e.note = Some("curvature hypothesis not certified".into());
                        }
                        entries.push(e);
                    }
                }
                _ => entries.push(skipped("isoperimetric_ratio", k)),
            }
            if unit {
                match (part.get(&k), part.get(&2)) {
                    (Some(&pk), Some(&p2)) => entries.push(partition_ratio_report(g, pk, p2, k)?),
                    _ => entries.push(skipped("partition_ratio", k)),
                }
            }
        }
    }
    if options.mimura_evidence {
        match (sub.get(&3), h2.exact()) {
            (Some(&h3), Some(h2v)) => entries.push(mimura_check(g, h3, h2v)),
            _ => entries.push(skipped("mimura", 3)),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, Family, FamilySpec};
    use crate::graph::MeasureMode;

    fn gen(family: Family, measure: MeasureMode) -> WeightedGraph {
        generate(&FamilySpec::new(family, measure)).unwrap()
    }

    #[test]
    fn constants_from_e() {
        assert!((buser_constant() - 0.316_060_279_414_278_6).abs() < 1e-15);
        assert!((diameter_constant() - 40.0 * E / (E - 1.0)).abs() < 1e-15);
        assert!((ratio_constant().sqrt() * concentration_constant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn floor_nudge() {
        assert_eq!(nudged_floor(2.999_999_999_999_999_6), 3.0);
        assert_eq!(nudged_floor(2.5), 2.0);
        assert_eq!(nudged_floor(0.0), 0.0);
    }

    #[test]
    fn k2_buser_closed_form() {
        let g = gen(Family::Complete { n: 2 }, MeasureMode::Unit);
        let dec = decompose(&g).unwrap();
        let cert = cd_check_graph(&g, 0.0, Dimension::Infinite, DEFAULT_TOL).certificate();
        let e = buser_check(&g, &dec, 1.0, cert.as_ref()).unwrap();
        assert!((e.lhs - buser_constant() * 2f64.sqrt()).abs() < 1e-12);
        assert!(e.passed());
        assert!(matches!(
            buser_check(&g, &dec, 1.0, None),
            Err(Error::PreconditionNotCertified(_))
        ));
    }

    #[test]
    fn adjacent_sets_are_too_close() {
        let g = gen(Family::Cycle { n: 8 }, MeasureMode::Unit);
        let dec = decompose(&g).unwrap();
        let s1 = VertexSet::new(&g, 0..4).unwrap();
        let s2 = VertexSet::new(&g, 4..8).unwrap();
        assert!(matches!(
            am_concentration_check(&g, &dec, &s1, &s2, 1),
            Err(Error::DistanceTooSmall { dist: 1, rho: 1 })
        ));
        assert!(finer_cheeger_check(&g, &dec, &s1, &s2).unwrap().passed());
        assert!(matches!(
            finer_cheeger_check(&g, &dec, &s1, &s1),
            Err(Error::SetsNotDisjoint)
        ));
    }

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let g = gen(Family::Cycle { n: 20 }, MeasureMode::Unit);
        let a = sample_set_pairs(&g, 6, 42);
        let b = sample_set_pairs(&g, 6, 42);
        assert_eq!(a.len(), 6);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.s1, q.s1);
            assert_eq!(p.s2, q.s2);
            assert!(g.set_distance(&p.s1, &p.s2).unwrap() > p.rho);
            assert!(p.rho >= 1);
        }
        let k4 = gen(Family::Complete { n: 4 }, MeasureMode::Unit);
        assert!(sample_set_pairs(&k4, 3, 42).is_empty());
    }

    #[test]
    fn report_entries_are_sorted() {
        let g = gen(Family::Cycle { n: 8 }, MeasureMode::Constant(2.0));
        let r = full_report(&g, 3, &ReportOptions::default()).unwrap();
        let keys: Vec<_> = r.entries.iter().map(|e| (e.name.clone(), e.k)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(!r.has_failures());
        assert!(r.curvature.cd0);
    }
}
