use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::domain::BoxDomain;
use super::potential::PotentialSpec;
use super::sine;
use super::tensor::unflatten;
use crate::error::{Error, Result};

/// Largest tensor basis diagonalized densely.
pub const MAX_DENSE_SIZE: usize = 4096;

/// Truncated eigenbasis of `-Δ + V` with Dirichlet conditions on a box.
///
/// Coefficients everywhere are stored in the tensor sine basis (row-major
/// multi-index). When `V` is constant the eigenvectors are the sine modes
/// themselves and eigenvalues are kept in tensor order; otherwise they are
/// sorted ascending and `eigenvectors` holds them as columns.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    domain: BoxDomain,
    modes: usize,
    potential: PotentialSpec,
    eigenvalues: Vec<f64>,
    eigenvectors: Option<DMatrix<f64>>,
}

pub fn build_basis(domain: BoxDomain, potential: PotentialSpec, modes: usize) -> Result<Arc<SpectralBasis>> {
    check_inputs(&domain, &potential, modes)?;
    if let Some(c) = potential.constant_value() {
        let eigenvalues = laplace_eigenvalues(&domain, modes).into_iter().map(|l| l + c).collect();
        return Ok(Arc::new(SpectralBasis {
            domain,
            modes,
            potential,
            eigenvalues,
            eigenvectors: None,
        }));
    }
    build_basis_galerkin(domain, potential, modes)
}

/// Always assembles and diagonalizes the Galerkin matrix.
pub fn build_basis_galerkin(domain: BoxDomain, potential: PotentialSpec, modes: usize) -> Result<Arc<SpectralBasis>> {
    check_inputs(&domain, &potential, modes)?;
    let n = modes.pow(domain.dim() as u32);
    if n > MAX_DENSE_SIZE {
        return Err(Error::config(
            "modes",
            format!("{n} basis functions exceed the dense limit {MAX_DENSE_SIZE} for a non-constant potential"),
        ));
    }
    let mut h = potential.galerkin_matrix(domain.side(), modes);
    for (i, l) in laplace_eigenvalues(&domain, modes).into_iter().enumerate() {
        h[(i, i)] += l;
    }
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut q = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        // Fix the sign so the basis is reproducible.
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v = -v;
        }
        q.set_column(col, &v);
    }
    let ortho = (q.transpose() * &q - DMatrix::identity(n, n)).amax();
    if ortho > 1e-10 {
        return Err(Error::IllPosed(format!("eigenvector matrix orthogonality defect {ortho:e}")));
    }
    Ok(Arc::new(SpectralBasis {
        domain,
        modes,
        potential,
        eigenvalues,
        eigenvectors: Some(q),
    }))
}

fn check_inputs(domain: &BoxDomain, potential: &PotentialSpec, modes: usize) -> Result<()> {
    if modes == 0 {
        return Err(Error::config("modes", "modes per axis must be at least 1"));
    }
    domain.check_dim(potential.dim())?;
    if !potential.sup_norm().is_finite() {
        return Err(Error::config("potential", "potential must be bounded"));
    }
    Ok(())
}

fn laplace_eigenvalues(domain: &BoxDomain, modes: usize) -> Vec<f64> {
    let d = domain.dim();
    let n = modes.pow(d as u32);
    let axis: Vec<f64> = (1..=modes).map(|k| sine::eigenvalue(domain.side(), k)).collect();
    (0..n)
        .map(|f| unflatten(f, modes, d).iter().map(|&i| axis[i]).sum())
        .collect()
}

impl SpectralBasis {
    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn side(&self) -> f64 {
        self.domain.side()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns in tensor sine coordinates; `None` means identity.
    pub fn eigenvectors(&self) -> Option<&DMatrix<f64>> {
        self.eigenvectors.as_ref()
    }

    pub fn is_diagonal(&self) -> bool {
        self.eigenvectors.is_none()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same box, truncation and potential.
    pub fn same_space(&self, other: &SpectralBasis) -> bool {
        self.domain == other.domain && self.modes == other.modes && self.potential == other.potential
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.modes, self.dim())
    }

    pub fn to_eigen(&self, c: &DVector<f64>) -> DVector<f64> {
        match &self.eigenvectors {
            None => c.clone(),
            Some(q) => q.tr_mul(c),
        }
    }

    pub fn from_eigen(&self, c: &DVector<f64>) -> DVector<f64> {
        match &self.eigenvectors {
            None => c.clone(),
            Some(q) => q * c,
        }
    }

    /// `Qᵀ A Q` for a matrix given in tensor coordinates.
    pub fn matrix_to_eigen(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.eigenvectors {
            None => a.clone(),
            Some(q) => q.transpose() * a * q,
        }
    }

    /// `e^{-tλ_k}` in eigen ordering.
    pub fn decay(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.eigenvalues.iter().map(|&l| (-t * l).exp()))
    }

    /// Dense `e^{-tH}` in tensor coordinates.
    pub fn semigroup_matrix(&self, t: f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&self.decay(t));
        match &self.eigenvectors {
            None => d,
            Some(q) => q * d * q.transpose(),
        }
    }

    /// Applies `e^{-tH}` to tensor coefficients.
    pub fn apply_semigroup(&self, c: &DVector<f64>, t: f64) -> DVector<f64> {
        let decay = self.decay(t);
        match &self.eigenvectors {
            None => c.component_mul(&decay),
            Some(q) => q * q.tr_mul(c).component_mul(&decay),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{Piecewise1d, PotentialSpec};

    fn dom(d: usize, l: f64) -> BoxDomain {
        BoxDomain::new(d, l).unwrap()
    }

    #[test]
    fn closed_form_1d() {
        let b = build_basis(dom(1, 1.0), PotentialSpec::zero(1), 4).unwrap();
        let expect = [PI * PI, 4.0 * PI * PI, 9.0 * PI * PI, 16.0 * PI * PI];
        for (a, e) in b.eigenvalues().iter().zip(expect) {
            assert_eq!(*a, e);
        }
        assert!((b.eigenvalues()[1] - 39.478).abs() < 1e-3);
    }

    #[test]
    fn tensor_sum_2d() {
        let b = build_basis(dom(2, 2.0), PotentialSpec::zero(2), 2).unwrap();
        assert_eq!(b.len(), 4);
        assert!((b.eigenvalues()[0] - PI * PI / 2.0).abs() < 1e-14);
        assert_eq!(b.multi_index(1), vec![0, 1]);
    }

    #[test]
    fn constant_shift() {
        let c = 2.5;
        let b = build_basis(dom(1, 1.0), PotentialSpec::constant(1, c).unwrap(), 4).unwrap();
        assert!(b.is_diagonal());
        let g = build_basis_galerkin(dom(1, 1.0), PotentialSpec::constant(1, c).unwrap(), 4).unwrap();
        for k in 0..4 {
            assert!((b.eigenvalues()[k] - (sine::eigenvalue(1.0, k + 1) + c)).abs() < 1e-12);
            assert!((g.eigenvalues()[k] - b.eigenvalues()[k]).abs() < 1e-10);
        }
        let q = g.eigenvectors().unwrap();
        assert!((q.abs() - DMatrix::identity(4, 4)).amax() < 1e-10);
    }

    #[test]
    fn galerkin_path_agrees_for_zero_potential() {
        let z = PotentialSpec::zero(2);
        let a = build_basis(dom(2, 3.0), z.clone(), 5).unwrap();
        let b = build_basis_galerkin(dom(2, 3.0), z, 5).unwrap();
        let mut ea = a.eigenvalues().to_vec();
        ea.sort_by(f64::total_cmp);
        for (x, y) in ea.iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn negative_potential_lower_bound() {
        let v = PotentialSpec::separable(vec![Piecewise1d {
            edges: vec![-0.5, 0.5],
            values: vec![-3.0],
            outside: 0.0,
        }])
        .unwrap();
        for side in [2.0, 4.0, 8.0] {
            let b = build_basis(dom(1, side), v.clone(), 24).unwrap();
            assert!(b.min_eigenvalue() >= -v.neg_part_bound());
            assert!(b.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_zero_modes_and_dim_mismatch() {
        assert!(build_basis(dom(1, 1.0), PotentialSpec::zero(1), 0).is_err());
        assert!(matches!(
            build_basis(dom(2, 1.0), PotentialSpec::zero(1), 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
