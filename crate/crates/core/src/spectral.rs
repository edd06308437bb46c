//! Spectrum of the μ-Laplacian and the heat semigroup `P_t = e^{tΔ}`.
//!
//! Eigenpairs come from the symmetric matrix `S = M^{-1/2}(D - W)M^{-1/2}`;
//! an eigenvector `v` of `S` maps to `ψ = M^{-1/2} v`, which makes the
//! eigenfunctions orthonormal for `⟨f, h⟩_μ = Σ μ(x) f(x) h(x)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::GraphCertificate;
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::linalg::sorted_eigen;

/// Largest graph handled by the dense eigensolver.
pub const MAX_DENSE_VERTICES: usize = 3000;

/// Relative slack used by the inequality checks.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column `i` is `ψ_{i+1}`.
    eigenfunctions: DMatrix<f64>,
    measure: Vec<f64>,
    laplacian: DMatrix<f64>,
    fingerprint: u64,
}

pub fn decompose(g: &WeightedGraph) -> Result<SpectralDecomposition> {
    let n = g.n();
    if n > MAX_DENSE_VERTICES {
        return Err(Error::TooLarge(n));
    }
    let inv_sqrt: Vec<f64> = g.measure().iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for x in 0..n {
        s[(x, x)] = g.degree(x) * inv_sqrt[x] * inv_sqrt[x];
        for &(y, w) in g.neighbors(x) {
            s[(x, y)] = -w * inv_sqrt[x] * inv_sqrt[y];
        }
    }
    let (mut eigenvalues, vectors) = sorted_eigen(&s);
    let mut eigenfunctions = vectors;
    for x in 0..n {
        eigenfunctions.row_mut(x).scale_mut(inv_sqrt[x]);
    }
    if eigenfunctions.column(0).sum() < 0.0 {
        eigenfunctions.column_mut(0).neg_mut();
    }
    // the constant mode is exact; pin away rounding noise
    eigenvalues[0] = eigenvalues[0].max(0.0);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenfunctions,
        measure: g.measure().to_vec(),
        laplacian: g.laplacian_matrix(),
        fingerprint: g.fingerprint(),
    })
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `λ_1 ≤ … ≤ λ_N`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `λ_k`, 1-indexed.
    pub fn lambda(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.n() {
            return Err(Error::KOutOfRange { k, n: self.n() });
        }
        Ok(self.eigenvalues[k - 1])
    }

    /// `ψ_k`, 1-indexed.
    pub fn eigenfunction(&self, k: usize) -> Result<Vec<f64>> {
        self.lambda(k)?;
        Ok(self.eigenfunctions.column(k - 1).iter().copied().collect())
    }

    pub fn eigenfunctions(&self) -> &DMatrix<f64> {
        &self.eigenfunctions
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn is_for(&self, g: &WeightedGraph) -> bool {
        self.fingerprint == g.fingerprint()
    }

    pub fn inner(&self, f: &[f64], h: &[f64]) -> f64 {
        self.check_len(f);
        self.check_len(h);
        f.iter()
            .zip(h)
            .zip(&self.measure)
            .map(|((a, b), m)| a * b * m)
            .sum()
    }

    fn check_len(&self, f: &[f64]) {
        assert_eq!(f.len(), self.n(), "function length must match the vertex count");
    }

    /// `Δf` through the stored Laplacian matrix.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.check_len(f);
        (&self.laplacian * DVector::from_column_slice(f))
            .iter()
            .copied()
            .collect()
    }

    /// `max_i ‖Δψ_i + λ_i ψ_i‖_∞`.
    pub fn eigen_residual(&self) -> f64 {
        let r = &self.laplacian * &self.eigenfunctions
            + &self.eigenfunctions * DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        r.amax()
    }

    /// `max_{ij} |⟨ψ_i, ψ_j⟩_μ − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.measure));
        let gram = self.eigenfunctions.transpose() * m * &self.eigenfunctions;
        (gram - DMatrix::identity(self.n(), self.n())).amax()
    }

    pub fn heat(&self, t: f64) -> Result<HeatOperator<'_>> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        Ok(HeatOperator { dec: self, t })
    }
}

/// `P_t f`. `P_0` is the identity.
pub fn heat_apply(dec: &SpectralDecomposition, f: &[f64], t: f64) -> Result<Vec<f64>> {
    Ok(dec.heat(t)?.apply(f))
}

/// The kernel `p_t(x, y)`, so that `P_t f(x) = Σ_y p_t(x, y) f(y) μ(y)`.
pub fn heat_kernel(dec: &SpectralDecomposition, t: f64) -> Result<DMatrix<f64>> {
    Ok(dec.heat(t)?.kernel())
}

#[derive(Debug, Clone, Copy)]
pub struct HeatOperator<'a> {
    dec: &'a SpectralDecomposition,
    t: f64,
}

impl HeatOperator<'_> {
    pub fn time(&self) -> f64 {
        self.t
    }

    fn damping(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dec.n(),
            self.dec.eigenvalues.iter().map(|l| (-l * self.t).exp()),
        )
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.dec.check_len(f);
        if self.t == 0.0 {
            return f.to_vec();
        }
        let weighted = DVector::from_iterator(
            f.len(),
            f.iter().zip(&self.dec.measure).map(|(a, m)| a * m),
        );
        let coeffs = self.dec.eigenfunctions.tr_mul(&weighted).component_mul(&self.damping());
        (&self.dec.eigenfunctions * coeffs).iter().copied().collect()
    }

    pub fn kernel(&self) -> DMatrix<f64> {
        let psi = &self.dec.eigenfunctions;
        let mut scaled = psi.clone();
        for (mut col, d) in scaled.column_iter_mut().zip(self.damping().iter()) {
            col *= *d;
        }
        scaled * psi.transpose()
    }
}

/// Residuals of the basic semigroup identities for one choice of `f, h, s, t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SemigroupResiduals {
    /// `max |⟨P_t f, h⟩_μ − ⟨f, P_t h⟩_μ|`.
    pub self_adjoint: f64,
    /// `‖P_t Δf − Δ P_t f‖_∞`.
    pub commutation: f64,
    /// `‖P_t P_s f − P_{t+s} f‖_∞`.
    pub semigroup: f64,
    /// Smallest raw kernel entry at time `t`.
    pub kernel_min: f64,
    /// `max_x |Σ_y p_t(x, y) μ(y) − 1|`.
    pub kernel_mass: f64,
    /// `max(1, ‖f‖_∞, ‖h‖_∞)`; residuals are meant to be read relative to it.
    pub scale: f64,
}

impl SemigroupResiduals {
    /// Kernel entries in `[-1e-10, 0)` count as rounding.
    pub fn kernel_nonnegative(&self) -> bool {
        self.kernel_min >= -1e-10
    }

    pub fn within(&self, tol: f64) -> bool {
        let bound = tol * self.scale;
        self.self_adjoint <= bound
            && self.commutation <= bound
            && self.semigroup <= bound
            && self.kernel_mass <= tol
            && self.kernel_nonnegative()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn semigroup_residuals(
    dec: &SpectralDecomposition,
    f: &[f64],
    h: &[f64],
    s: f64,
    t: f64,
) -> Result<SemigroupResiduals> {
    let pt = dec.heat(t)?;
    let ps = dec.heat(s)?;
    let pts = dec.heat(t + s)?;
    let ptf = pt.apply(f);
    let self_adjoint = (dec.inner(&ptf, h) - dec.inner(f, &pt.apply(h))).abs();
    let commutation = sup_diff(&pt.apply(&dec.laplacian(f)), &dec.laplacian(&ptf));
    let semigroup = sup_diff(&pt.apply(&ps.apply(f)), &pts.apply(f));
    let kernel = pt.kernel();
    let kernel_min = kernel.min();
    let kernel_mass = (0..dec.n())
        .map(|x| {
            let mass: f64 = (0..dec.n()).map(|y| kernel[(x, y)] * dec.measure[y]).sum();
            (mass - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(SemigroupResiduals {
        self_adjoint,
        commutation,
        semigroup,
        kernel_min,
        kernel_mass,
        scale: sup(f).max(sup(h)).max(1.0),
    })
}

/// Result of checking `lhs ≤ rhs`, possibly pointwise. For pointwise checks
/// the reported sides belong to the vertex with the smallest margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub tolerance: f64,
    pub worst_vertex: Option<usize>,
}

impl InequalityCheck {
    pub fn scalar(lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        let tolerance = rel_tol * lhs.abs().max(rhs.abs()).max(1.0);
        let slack = rhs - lhs;
        Self {
            holds: slack >= -tolerance,
            lhs,
            rhs,
            slack,
            tolerance,
            worst_vertex: None,
        }
    }

    pub fn pointwise(lhs: &[f64], rhs: &[f64], rel_tol: f64) -> Self {
        assert_eq!(lhs.len(), rhs.len());
        let mut worst: Option<(usize, Self)> = None;
        for (x, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
            let c = Self::scalar(l, r, rel_tol);
            let margin = c.slack + c.tolerance;
            if worst.is_none_or(|(_, w)| margin < w.slack + w.tolerance) {
                worst = Some((x, c));
            }
        }
        let (x, mut c) = worst.expect("at least one vertex");
        c.worst_vertex = Some(x);
        c
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

fn require_curvature(g: &WeightedGraph, cert: Option<&GraphCertificate>, k: f64) -> Result<()> {
    match cert {
        Some(c) if c.implies(g, k) => Ok(()),
        Some(c) if !c.is_for(g) => Err(Error::PreconditionNotCertified(
            "certificate belongs to a different graph".into(),
        )),
        Some(c) => Err(Error::PreconditionNotCertified(format!(
            "certified curvature {} is below the required {k}",
            c.curvature()
        ))),
        None => Err(Error::PreconditionNotCertified(format!(
            "a CD({k}, inf) certificate is required"
        ))),
    }
}

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.n() {
        return Err(Error::FunctionLength {
            expected: g.n(),
            got: f.len(),
        });
    }
    Ok(())
}

/// `Γ(P_t f) ≤ e^{2Kt} P_t Γ(f)` pointwise on a graph certified `CD(−K, ∞)`.
pub fn gradient_estimate_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    cert: Option<&GraphCertificate>,
    f: &[f64],
    t: f64,
    k: f64,
) -> Result<InequalityCheck> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("K must be nonnegative, got {k}")));
    }
    require_dec(g, dec)?;
    require_curvature(g, cert, -k)?;
    check_len(g, f)?;
    let pt = dec.heat(t)?;
    let ptf = pt.apply(f);
    let lhs = g.gamma(&ptf, &ptf);
    let factor = (2.0 * k * t).exp();
    let rhs: Vec<f64> = pt.apply(&g.gamma(f, f)).iter().map(|v| factor * v).collect();
    Ok(InequalityCheck::pointwise(&lhs, &rhs, CHECK_TOL))
}

/// `2t Γ(P_t f) ≤ P_t(f²) − (P_t f)²` pointwise on a `CD(0, ∞)` graph.
pub fn reverse_poincare_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    cert: Option<&GraphCertificate>,
    f: &[f64],
    t: f64,
) -> Result<InequalityCheck> {
    require_dec(g, dec)?;
    require_curvature(g, cert, 0.0)?;
    check_len(g, f)?;
    let pt = dec.heat(t)?;
    let ptf = pt.apply(f);
    let squares: Vec<f64> = f.iter().map(|v| v * v).collect();
    let rhs: Vec<f64> = pt
        .apply(&squares)
        .iter()
        .zip(&ptf)
        .map(|(a, b)| a - b * b)
        .collect();
    let lhs: Vec<f64> = g.gamma(&ptf, &ptf).iter().map(|v| 2.0 * t * v).collect();
    Ok(InequalityCheck::pointwise(&lhs, &rhs, CHECK_TOL))
}

/// `‖h‖_1 = Σ μ(x) |h(x)|`.
pub fn l1_norm(g: &WeightedGraph, h: &[f64]) -> f64 {
    h.iter().zip(g.measure()).map(|(v, m)| v.abs() * m).sum()
}

/// `‖√Γ(f)‖_1`.
pub fn gradient_l1(g: &WeightedGraph, f: &[f64]) -> f64 {
    let root: Vec<f64> = g.gamma(f, f).iter().map(|v| v.max(0.0).sqrt()).collect();
    l1_norm(g, &root)
}

/// `‖f − P_t f‖_1 ≤ √(2t) ‖√Γ(f)‖_1` on a `CD(0, ∞)` graph.
pub fn l1_contraction_check(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    cert: Option<&GraphCertificate>,
    f: &[f64],
    t: f64,
) -> Result<InequalityCheck> {
    require_dec(g, dec)?;
    require_curvature(g, cert, 0.0)?;
    check_len(g, f)?;
    let ptf = dec.heat(t)?.apply(f);
    let diff: Vec<f64> = f.iter().zip(&ptf).map(|(a, b)| a - b).collect();
    Ok(InequalityCheck::scalar(
        l1_norm(g, &diff),
        (2.0 * t).sqrt() * gradient_l1(g, f),
        CHECK_TOL,
    ))
}

/// `‖√Γ(χ_S)‖_1 ≤ √(2 D^nor) |E(S, V∖S)|`.
pub fn boundary_measure_check(g: &WeightedGraph, s: &VertexSet) -> InequalityCheck {
    let chi = s.indicator(g.n());
    InequalityCheck::scalar(
        gradient_l1(g, &chi),
        (2.0 * g.d_nor()).sqrt() * g.boundary_weight(s),
        CHECK_TOL,
    )
}
