//! Bakry-Émery curvature: the Γ₂ operator, its local matrix at a vertex,
//! curvature-dimension checks and the exact best curvature constant.
//!
//! At a vertex `x` all three quadratic forms `f ↦ Γ₂(f)(x)`, `f ↦ Γ(f)(x)`
//! and `f ↦ (Δf(x))²` only see `f` on the two-ball `B₂(x)`. [`LocalForms`]
//! stores them as matrices over that ball, ordered as the centre, then the
//! neighbours, then the sphere of radius two. `CD(K, n)` holds at `x` iff
//!
//! ```text
//! Q = Γ₂(x) - K·Γ(x) - (1/n)·d dᵀ
//! ```
//!
//! is positive semidefinite, where `d` is the row of `Δ` at `x`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cartesian_product, MeasureMode, WeightedGraph};
use crate::linalg::{min_eigen, symmetric_pinv};

/// Relative PSD tolerance: `λ_min(Q) >= -PSD_TOL * max(1, ‖Q‖_F)`.
pub const PSD_TOL: f64 = 1e-9;
/// Relative eigenvalue cutoff of the pseudo-inverse in the Schur complement.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Dimension parameter `n` of `CD(K, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    /// `1/n`, zero for `n = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Dimension::Finite(n) => 1.0 / n,
            Dimension::Infinite => 0.0,
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            Dimension::Finite(n) if !(n > 0.0) => Err(Error::InvalidParameter(format!(
                "dimension must be positive, got {n}"
            ))),
            other => Ok(other),
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Dimension::Infinite),
            _ => s
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension `{s}`")))
                .and_then(|n| Dimension::Finite(n).validate()),
        }
    }
}

fn gamma2_bilinear_with(
    g: &WeightedGraph,
    f: &dyn Fn(usize) -> f64,
    h: &dyn Fn(usize) -> f64,
    x: usize,
) -> f64 {
    let gamma_x = g.gamma_at_with(f, h, x);
    let lap_gamma = g
        .neighbors(x)
        .iter()
        .map(|&(y, w)| w * (g.gamma_at_with(f, h, y) - gamma_x))
        .sum::<f64>()
        / g.mu(x);
    let lap_f = |v: usize| g.laplacian_at_with(f, v);
    let lap_h = |v: usize| g.laplacian_at_with(h, v);
    let cross_fh = g.gamma_at_with(f, lap_h, x);
    let cross_hf = g.gamma_at_with(h, lap_f, x);
    0.5 * (lap_gamma - cross_fh - cross_hf)
}

/// `Γ₂(f, h)(x) = ½{ΔΓ(f,h) − Γ(f,Δh) − Γ(h,Δf)}(x)`.
pub fn gamma2_bilinear(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> f64 {
    assert_eq!(f.len(), g.n());
    assert_eq!(h.len(), g.n());
    gamma2_bilinear_with(g, &|v| f[v], &|v| h[v], x)
}

/// `Γ₂(f)(x)` composed from the Laplacian and Γ operators.
pub fn gamma2_value(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    gamma2_bilinear(g, f, f, x)
}

/// `Γ₂(f)(x)` from the closed expansion in second differences
/// `f(x) − 2f(y) + f(z)` along paths `x ~ y ~ z`.
pub fn gamma2_explicit(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    assert_eq!(f.len(), g.n());
    let mu_x = g.mu(x);
    let fx = f[x];
    let mut hessian = 0.0;
    let mut outer = 0.0;
    for &(y, wxy) in g.neighbors(x) {
        let inner: f64 = g
            .neighbors(y)
            .iter()
            .map(|&(z, wyz)| wyz * (fx - 2.0 * f[y] + f[z]).powi(2))
            .sum();
        hessian += wxy / g.mu(y) * inner;
        outer += wxy * (f[y] - fx).powi(2) * g.degree(y) / g.mu(y);
    }
    hessian /= 4.0 * mu_x;
    outer /= 4.0 * mu_x;
    let lap = g.laplacian_at(f, x);
    let gamma = g.gamma_at(f, f, x);
    hessian + 0.5 * lap * lap - 0.5 * g.degree(x) / mu_x * gamma - outer
}

/// The Γ₂, Γ and Laplacian forms at one vertex, restricted to `B₂(x)`.
#[derive(Debug, Clone)]
pub struct LocalForms {
    pub center: usize,
    /// Centre, neighbours (ascending), then the distance-two sphere (ascending).
    pub support: Vec<usize>,
    /// Number of neighbours; they occupy `support[1..=inner]`.
    pub inner: usize,
    pub gamma2: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
    pub laplacian_row: DVector<f64>,
    graph_order: usize,
}

impl LocalForms {
    /// `f` restricted to the support, in support order.
    pub fn restrict(&self, f: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.support.len(), self.support.iter().map(|&v| f[v]))
    }

    /// A full vertex function that equals `local` on the support and zero
    /// elsewhere.
    pub fn embed(&self, local: &DVector<f64>) -> Vec<f64> {
        let mut f = vec![0.0; self.graph_order];
        for (i, &v) in self.support.iter().enumerate() {
            f[v] = local[i];
        }
        f
    }

    /// `Γ₂(f)(x)` through the matrix.
    pub fn gamma2_quadratic(&self, f: &[f64]) -> f64 {
        let v = self.restrict(f);
        v.dot(&(&self.gamma2 * &v))
    }

    /// `Γ₂(x) − (1/n) d dᵀ`.
    pub fn dimension_form(&self, n: Dimension) -> DMatrix<f64> {
        let d = &self.laplacian_row;
        &self.gamma2 - (d * d.transpose()) * n.reciprocal()
    }

    /// `Γ₂(x) − K Γ(x) − (1/n) d dᵀ`.
    pub fn cd_form(&self, k: f64, n: Dimension) -> DMatrix<f64> {
        self.dimension_form(n) - &self.gamma * k
    }

    pub fn check(&self, k: f64, n: Dimension, tol: f64) -> CdCheck {
        let q = self.cd_form(k, n);
        let scale = q.norm().max(1.0);
        let (lambda_min, v) = min_eigen(&q);
        let holds = lambda_min >= -tol * scale;
        CdCheck {
            vertex: self.center,
            holds,
            min_eigenvalue: lambda_min,
            scale,
            witness: (!holds).then(|| self.embed(&v)),
        }
    }
}

/// Builds Γ₂(x), Γ(x) and the Laplacian row by polarization over the
/// indicator functions of `B₂(x)`.
pub fn local_forms(g: &WeightedGraph, x: usize) -> LocalForms {
    let dist = g.bfs_distances(x);
    let mut support = vec![x];
    support.extend(g.neighbors(x).iter().map(|&(y, _)| y));
    let inner = support.len() - 1;
    support.extend((0..g.n()).filter(|&v| dist[v] == 2));
    let m = support.len();

    let indicator = |target: usize| move |v: usize| if v == target { 1.0 } else { 0.0 };
    let mut gamma2 = DMatrix::zeros(m, m);
    let mut gamma = DMatrix::zeros(m, m);
    let mut laplacian_row = DVector::zeros(m);
    for i in 0..m {
        let ei = indicator(support[i]);
        laplacian_row[i] = g.laplacian_at_with(ei, x);
        for j in i..m {
            let ej = indicator(support[j]);
            let g2 = gamma2_bilinear_with(g, &ei, &ej, x);
            gamma2[(i, j)] = g2;
            gamma2[(j, i)] = g2;
            let g1 = g.gamma_at_with(ei, ej, x);
            gamma[(i, j)] = g1;
            gamma[(j, i)] = g1;
        }
    }
    LocalForms {
        center: x,
        support,
        inner,
        gamma2,
        gamma,
        laplacian_row,
        graph_order: g.n(),
    }
}

/// Outcome of a PSD test of the `CD(K, n)` form at one vertex.
#[derive(Debug, Clone, Serialize)]
pub struct CdCheck {
    pub vertex: usize,
    pub holds: bool,
    pub min_eigenvalue: f64,
    /// `max(1, ‖Q‖_F)`; the tolerance is relative to it.
    pub scale: f64,
    /// Eigenvector of the smallest eigenvalue when the check fails.
    pub witness: Option<Vec<f64>>,
}

pub fn cd_check(g: &WeightedGraph, x: usize, k: f64, n: Dimension, tol: f64) -> CdCheck {
    local_forms(g, x).check(k, n, tol)
}

/// A machine-verified statement that a specific graph satisfies `CD(K, n)`
/// at every vertex. Only [`GraphCdCheck::certificate`] creates one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphCertificate {
    curvature: f64,
    dimension: Dimension,
    fingerprint: u64,
}

impl GraphCertificate {
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn is_for(&self, g: &WeightedGraph) -> bool {
        self.fingerprint == g.fingerprint()
    }

    /// Whether this certificate implies `CD(k, ∞)` on `g`.
    pub fn implies(&self, g: &WeightedGraph, k: f64) -> bool {
        self.is_for(g) && self.curvature >= k
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphCdCheck {
    pub curvature: f64,
    pub dimension: Dimension,
    pub holds: bool,
    pub per_vertex: Vec<CdCheck>,
    #[serde(skip)]
    fingerprint: u64,
}

impl GraphCdCheck {
    pub fn failing_vertices(&self) -> Vec<usize> {
        self.per_vertex
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.vertex)
            .collect()
    }

    pub fn certificate(&self) -> Option<GraphCertificate> {
        self.holds.then_some(GraphCertificate {
            curvature: self.curvature,
            dimension: self.dimension,
            fingerprint: self.fingerprint,
        })
    }
}

/// `CD(K, n)` at every vertex.
pub fn cd_check_graph(g: &WeightedGraph, k: f64, n: Dimension, tol: f64) -> GraphCdCheck {
    let per_vertex: Vec<CdCheck> = (0..g.n()).map(|x| cd_check(g, x, k, n, tol)).collect();
    GraphCdCheck {
        curvature: k,
        dimension: n,
        holds: per_vertex.iter().all(|c| c.holds),
        per_vertex,
        fingerprint: g.fingerprint(),
    }
}

/// The best constant `K(x, n)` together with a function attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureCertificate {
    pub vertex: usize,
    pub dimension: Dimension,
    /// `K(x, n)`; `-inf` when no finite constant works.
    pub value: f64,
    /// Whether `CD(0, n)` holds at the vertex.
    pub psd_at_zero: bool,
    /// A minimizer of `(Γ₂ − (1/n)(Δ)²)/Γ` when `value` is finite, otherwise a
    /// function with `Γ(f)(x) = 0` and `Γ₂(f)(x) − (1/n)(Δf(x))² < 0`.
    pub witness: Vec<f64>,
}

/// `K(x, n) = inf { (Γ₂(f) − (1/n)(Δf)²)(x) / Γ(f)(x) : Γ(f)(x) > 0 }`.
///
/// The centre value is pinned to zero. On the neighbours Γ(x) is a positive
/// diagonal `D`; the sphere-two coordinates are eliminated through the Schur
/// complement `Q̂ = Q_ii − Q_io Q_oo⁺ Q_oi`, and `K` is the smallest
/// eigenvalue of the pencil `(Q̂, D)`. A non-PSD `Q_oo`, or a coupling
/// `Q_oi` leaving the range of `Q_oo`, makes the infimum `−∞`.
pub fn curvature_value(g: &WeightedGraph, x: usize, n: Dimension) -> Result<CurvatureCertificate> {
    let n = n.validate()?;
    let forms = local_forms(g, x);
    curvature_from_forms(&forms, n)
}

pub fn curvature_from_forms(forms: &LocalForms, n: Dimension) -> Result<CurvatureCertificate> {
    let x = forms.center;
    let inner = forms.inner;
    if inner == 0 {
        return Err(Error::DegenerateVertex(x));
    }
    let q = forms.dimension_form(n);
    let scale = q.norm().max(1.0);
    let m = forms.support.len();
    let outer = m - 1 - inner;
    let psd_at_zero = forms.check(0.0, n, PSD_TOL).holds;

    let q_ii = q.view((1, 1), (inner, inner)).into_owned();
    let diag: Vec<f64> = (1..=inner).map(|i| forms.gamma[(i, i)]).collect();

    let embed_parts = |u: &DVector<f64>, v: Option<&DVector<f64>>| {
        let mut local = DVector::zeros(m);
        local.rows_mut(1, inner).copy_from(u);
        if let Some(v) = v {
            local.rows_mut(1 + inner, outer).copy_from(v);
        }
        forms.embed(&local)
    };

    let (schur, back) = if outer == 0 {
        (q_ii, None)
    } else {
        let q_oo = q.view((1 + inner, 1 + inner), (outer, outer)).into_owned();
        let q_oi = q.view((1 + inner, 1), (outer, inner)).into_owned();

        let (lambda_oo, v_oo) = min_eigen(&q_oo);
        if lambda_oo < -PSD_TOL * scale {
            return Ok(CurvatureCertificate {
                vertex: x,
                dimension: n,
                value: f64::NEG_INFINITY,
                psd_at_zero,
                witness: embed_parts(&DVector::zeros(inner), Some(&v_oo)),
            });
        }

        let (pinv, kernel) = symmetric_pinv(&q_oo, PINV_CUTOFF);
        let leak = &kernel * &q_oi;
        if leak.norm() > PSD_TOL * scale {
            // push along a kernel direction of Q_oo that Q_oi sees
            let j = (0..inner)
                .max_by(|&a, &b| leak.column(a).norm().total_cmp(&leak.column(b).norm()))
                .unwrap_or(0);
            let mut u = DVector::zeros(inner);
            u[j] = 1.0;
            let kvec = leak.column(j).into_owned();
            let a = u.dot(&(q.view((1, 1), (inner, inner)) * &u));
            let b = kvec.dot(&kvec);
            let s = (a.abs() + 1.0) / b;
            let v = kvec * s;
            return Ok(CurvatureCertificate {
                vertex: x,
                dimension: n,
                value: f64::NEG_INFINITY,
                psd_at_zero,
                witness: embed_parts(&u, Some(&v)),
            });
        }
        let q_io = q_oi.transpose();
        let schur = &q_ii - &q_io * &pinv * &q_oi;
        (schur, Some((pinv, q_oi)))
    };

    let inv_sqrt: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut pencil = schur;
    for i in 0..inner {
        for j in 0..inner {
            pencil[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let (value, y) = min_eigen(&pencil);
    let u = DVector::from_iterator(inner, (0..inner).map(|i| y[i] * inv_sqrt[i]));
    let witness = match back {
        None => embed_parts(&u, None),
        Some((pinv, q_oi)) => {
            let v = -(&pinv * &q_oi * &u);
            embed_parts(&u, Some(&v))
        }
    };
    Ok(CurvatureCertificate {
        vertex: x,
        dimension: n,
        value,
        psd_at_zero,
        witness,
    })
}

/// `K(x, n)` at every vertex.
pub fn curvature_sweep(g: &WeightedGraph, n: Dimension) -> Result<Vec<CurvatureCertificate>> {
    (0..g.n()).map(|x| curvature_value(g, x, n)).collect()
}

/// Parts of the superadditivity comparison at `(x, y)` in `G1 × G2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductResidual {
    /// `Γ₂(F)(x, y)` on the product.
    pub product: f64,
    /// `Γ₂(F_y)(x)` on the first factor.
    pub first_slice: f64,
    /// `Γ₂(F^x)(y)` on the second factor.
    pub second_slice: f64,
}

impl ProductResidual {
    pub fn residual(&self) -> f64 {
        self.product - self.first_slice - self.second_slice
    }

    pub fn scale(&self) -> f64 {
        (self.product.abs() + self.first_slice.abs() + self.second_slice.abs()).max(1.0)
    }
}

/// Compares `Γ₂(F)(x,y)` with `Γ₂(F_y)(x) + Γ₂(F^x)(y)` for a function `F`
/// on `G1 × G2` stored row-major. Both factors must carry the unit measure.
pub fn product_superadditivity_residual(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    f: &[f64],
    x: usize,
    y: usize,
) -> Result<ProductResidual> {
    for g in [g1, g2] {
        if g.measure().iter().any(|&m| m != 1.0) {
            return Err(Error::PreconditionNotCertified(
                "superadditivity needs unit measures on both factors".into(),
            ));
        }
    }
    let (n1, n2) = (g1.n(), g2.n());
    if f.len() != n1 * n2 {
        return Err(Error::FunctionLength {
            expected: n1 * n2,
            got: f.len(),
        });
    }
    if x >= n1 {
        return Err(Error::UnknownVertex(x));
    }
    if y >= n2 {
        return Err(Error::UnknownVertex(y));
    }
    let product = cartesian_product(g1, g2, MeasureMode::Unit)?;
    let first: Vec<f64> = (0..n1).map(|a| f[a * n2 + y]).collect();
    let second: Vec<f64> = (0..n2).map(|b| f[x * n2 + b]).collect();
    Ok(ProductResidual {
        product: gamma2_value(&product, f, x * n2 + y),
        first_slice: gamma2_value(g1, &first, x),
        second_slice: gamma2_value(g2, &second, y),
    })
}

/// Curvature-dimension pair guaranteed for `G1 × G2` when the factors satisfy
/// `CD(K1, n1)` and `CD(K2, n2)` with constant measures `mu1`, `mu2` and the
/// product carries the constant measure `mu12`.
///
/// With constant measures the product Laplacian splits as
/// `(mu1/mu12) Δ1 + (mu2/mu12) Δ2`, so each factor's operators are rescaled
/// linearly and the result is `CD(min(mu1 K1, mu2 K2) / mu12, n1 + n2)`.
/// All unit measures give `CD(min(K1, K2), n1 + n2)`.
pub fn product_cd_bound(
    k1: f64,
    n1: Dimension,
    k2: f64,
    n2: Dimension,
    mu1: f64,
    mu2: f64,
    mu12: f64,
) -> Result<(f64, Dimension)> {
    for (name, mu) in [("mu1", mu1), ("mu2", mu2), ("mu12", mu12)] {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {mu}")));
        }
    }
    let k = (mu1 * k1).min(mu2 * k2) / mu12;
    let n = match (n1.validate()?, n2.validate()?) {
        (Dimension::Finite(a), Dimension::Finite(b)) => Dimension::Finite(a + b),
        _ => Dimension::Infinite,
    };
    Ok((k, n))
}
