//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use curvegraph::generators::{generate, Family, FamilySpec};
use curvegraph::graph::{MeasureMode, VertexSet, WeightedGraph};
use curvegraph::isoperimetry::Mode;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn gen(family: Family, measure: MeasureMode) -> WeightedGraph {
    generate(&FamilySpec::new(family, measure)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

pub fn random_set(rng: &mut ChaCha8Rng, g: &WeightedGraph) -> VertexSet {
    loop {
        let members: Vec<usize> = (0..g.n()).filter(|_| rng.gen_bool(0.4)).collect();
        if !members.is_empty() {
            return VertexSet::new(g, members).unwrap();
        }
    }
}

/// Largest entrywise difference relative to the largest entry of `expected`.
pub fn relative_gap(actual: &DMatrix<f64>, expected: &DMatrix<f64>) -> f64 {
    (actual - expected).amax() / expected.amax().max(1e-300)
}

/// Γ₂(x) of the triangle with edges xy = a, xz = b, yz = c and measure
/// μ(x) = C, μ(y) = B, μ(z) = A, written in the order (x, y, z).
pub fn triangle_gamma2_closed_form(a: f64, b: f64, c: f64, ma: f64, mb: f64, mc: f64) -> DMatrix<f64> {
    let e00 = 3.0 * a * a / mb + 3.0 * b * b / ma + (a + b).powi(2) / mc;
    let e01 = b * c / ma - a * (3.0 * a + c) / mb - a * (a + b) / mc;
    let e02 = a * c / mb - b * (3.0 * b + c) / ma - b * (a + b) / mc;
    let e11 = b * c / ma + 3.0 * a * (a + c) / mb + a * (a - b) / mc;
    let e12 = 2.0 * a * b / mc - 2.0 * a * c / mb - 2.0 * b * c / ma;
    let e22 = 3.0 * b * (b + c) / ma + b * (b - a) / mc + a * c / mb;
    DMatrix::from_row_slice(3, 3, &[e00, e01, e02, e01, e11, e12, e02, e12, e22]) / (4.0 * mc)
}

/// 4A²Γ₂(x1) of the tetrahedron with constant measure A.
pub fn tetrahedron_gamma2_closed_form(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    let s = 2.0 * (a * b + a * c + b * c);
    let (ab, ac, bc) = (2.0 * a * b, 2.0 * a * c, 2.0 * b * c);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            s + 4.0 * (a * a + b * b + c * c),
            -ab + ac - bc - 4.0 * b * b,
            ab - ac - bc - 4.0 * c * c,
            -ab - ac + bc - 4.0 * a * a,
            -ab + ac - bc - 4.0 * b * b,
            s + 4.0 * b * b,
            -ab - ac + bc,
            -bc - ac + ab,
            ab - ac - bc - 4.0 * c * c,
            -ab - ac + bc,
            s + 4.0 * c * c,
            -ab + ac - bc,
            -ab - ac + bc - 4.0 * a * a,
            -bc - ac + ab,
            -ab + ac - bc,
            s + 4.0 * a * a,
        ],
    )
}

/// `1 − cos(2π⌊k/2⌋/N)` for `k = 1..=N`.
pub fn cycle_spectrum(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n)
        .map(|k| 1.0 - (2.0 * std::f64::consts::PI * (k / 2) as f64 / n as f64).cos())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Multi-way constant by trying every map `V → {0..k}` with no symmetry
/// reduction and no incremental bookkeeping.
pub fn naive_multiway(g: &WeightedGraph, k: usize, mode: Mode) -> f64 {
    let n = g.n();
    let mut digits = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let admissible = mode == Mode::Subpartition || digits.iter().all(|&d| d > 0);
        if admissible {
            let mut boundary = vec![0.0; k + 1];
            let mut measure = vec![0.0; k + 1];
            for (v, &d) in digits.iter().enumerate() {
                measure[d] += g.mu(v);
            }
            if (1..=k).all(|p| measure[p] > 0.0) {
                for e in g.edges() {
                    let (pu, pv) = (digits[e.u], digits[e.v]);
                    if pu != pv {
                        boundary[pu] += e.w;
                        boundary[pv] += e.w;
                    }
                }
                let value = (1..=k)
                    .map(|p| boundary[p] / measure[p])
                    .fold(0.0, f64::max);
                best = best.min(value);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            digits[i] += 1;
            if digits[i] <= k {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Multiset equality of two spectra after sorting.
pub fn spectra_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
