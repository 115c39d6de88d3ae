//! Row-major tensor helpers. Axis 0 varies slowest.

use nalgebra::{DMatrix, DMatrixView};

pub fn flat_len(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Zero-based multi-index of `flat` in a cube of side `n`.
pub fn unflatten(mut flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    for a in (0..dim).rev() {
        idx[a] = flat % n;
        flat /= n;
    }
    idx
}

pub fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Applies `mat` along `axis`: `out[.., i, ..] = Σ_j mat[i, j] data[.., j, ..]`.
pub fn mode_product(data: &[f64], shape: &[usize], axis: usize, mat: &DMatrix<f64>) -> (Vec<f64>, Vec<usize>) {
    assert_eq!(data.len(), flat_len(shape));
    assert_eq!(mat.ncols(), shape[axis]);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    let m = mat.nrows();
    let mt = mat.transpose();
    let mut out = vec![0.0; outer * m * inner];
    for o in 0..outer {
        // A row-major (n x inner) block is a column-major (inner x n) matrix.
        let block = DMatrixView::from_slice(&data[o * n * inner..(o + 1) * n * inner], inner, n);
        let prod = block * &mt;
        out[o * m * inner..(o + 1) * m * inner].copy_from_slice(prod.as_slice());
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = m;
    (out, new_shape)
}

/// Applies one matrix per axis.
pub fn kron_apply(data: &[f64], shape: &[usize], mats: &[&DMatrix<f64>]) -> (Vec<f64>, Vec<usize>) {
    let mut cur = data.to_vec();
    let mut cur_shape = shape.to_vec();
    for (axis, mat) in mats.iter().enumerate() {
        let (next, next_shape) = mode_product(&cur, &cur_shape, axis, mat);
        cur = next;
        cur_shape = next_shape;
    }
    (cur, cur_shape)
}

/// Dense Kronecker product consistent with row-major flattening.
pub fn kron(mats: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = mats[0].clone();
    for m in &mats[1..] {
        out = out.kronecker(m);
    }
    out
}
