//! Thin wrappers over nalgebra's Hermitian eigensolver and SVD with sorted outputs.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` belongs to `values[i]`.
    pub vectors: CMatrix,
}

#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending.
    pub values: Vec<f64>,
    /// Left singular vectors as columns.
    pub u: CMatrix,
    /// Right singular vectors as columns.
    pub v: CMatrix,
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).values
}

pub fn lambda_min(m: &CMatrix) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn lambda_max(m: &CMatrix) -> f64 {
    eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let dec = SVD::new(m.clone(), true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u = CMatrix::from_fn(rows, k, |r, c| u[(r, order[c])]);
    let v = CMatrix::from_fn(cols, k, |r, c| v_t[(order[c], r)].conj());
    Svd { values, u, v }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let dec = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = dec.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn max_abs(m: &CMatrix) -> f64 {
    max_abs_iter(m.iter())
}

pub fn max_abs_iter<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    it.into_iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Columns of `m` selected by `cols`.
pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// `diag(block, ..., block)` with `count` copies.
pub fn block_diagonal(block: &CMatrix, count: usize) -> CMatrix {
    let b = block.nrows();
    let mut out = CMatrix::zeros(b * count, b * count);
    for k in 0..count {
        out.view_mut((k * b, k * b), (b, b)).copy_from(block);
    }
    out
}
