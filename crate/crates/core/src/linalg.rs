//! Small dense helpers on top of nalgebra's symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending. Ties keep the
/// solver's order.
pub(crate) fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue with a unit eigenvector.
pub(crate) fn min_eigen(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (values, vectors) = sorted_eigen(m);
    (values[0], vectors.column(0).into_owned())
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix together with the
/// orthogonal projector onto its kernel. Eigenvalues with magnitude below
/// `rel_cutoff * max|λ|` count as zero.
pub(crate) fn symmetric_pinv(m: &DMatrix<f64>, rel_cutoff: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let (values, vectors) = sorted_eigen(m);
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = rel_cutoff * largest;
    let mut pinv = DMatrix::zeros(n, n);
    let mut kernel = DMatrix::zeros(n, n);
    for (i, &lambda) in values.iter().enumerate() {
        let v = vectors.column(i);
        let outer = v * v.transpose();
        if largest == 0.0 || lambda.abs() <= cutoff {
            kernel += outer;
        } else {
            pinv += outer / lambda;
        }
    }
    (pinv, kernel)
}
