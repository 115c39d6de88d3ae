use nalgebra::{Cholesky, DMatrix, SymmetricEigen, SVD};

use super::problem::ControlProblem;
use crate::error::{Error, Result};

/// Condition number of the Gramian above which the cost is ill-posed.
const MAX_GRAMIAN_CONDITION: f64 = 1e14;

/// Result of solving `X = Y Z` in the least-squares sense.
#[derive(Debug, Clone)]
pub struct Factorization {
    /// `Y⁺ X`.
    pub z: DMatrix<f64>,
    /// `‖X - Y Z‖_F / ‖X‖_F`.
    pub residual: f64,
    /// Spectral norm of `Z`.
    pub norm: f64,
}

fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false).singular_values.max()
}

/// `Z = Y⁺ X`. Succeeds iff `‖X - Y Z‖ ≤ tol ‖X‖`, i.e. `Ran X ⊆ Ran Y`
/// numerically. Singular values of `Y` below `1e-13 σ_max` are dropped.
pub fn factorize(x: &DMatrix<f64>, y: &DMatrix<f64>, tol: f64) -> Result<Factorization> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: y.nrows(),
            found: x.nrows(),
        });
    }
    let svd = SVD::new(y.clone(), true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.max();
    let cutoff = 1e-13 * smax;
    let utx = u.tr_mul(x);
    let mut scaled = DMatrix::zeros(svd.singular_values.len(), x.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            scaled.set_row(i, &(utx.row(i) / s));
        }
    }
    let z = vt.tr_mul(&scaled);
    let xn = x.norm();
    let residual = if xn == 0.0 { 0.0 } else { (x - y * &z).norm() / xn };
    if residual > tol {
        return Err(Error::RangeFailure { residual, tolerance: tol });
    }
    let norm = spectral_norm(&z);
    Ok(Factorization { z, residual, norm })
}

impl ControlProblem {
    /// `M^{1/2}` of the indicator Gram in tensor coordinates.
    fn gram_sqrt(&self) -> DMatrix<f64> {
        let eig = SymmetricEigen::new((**self.gram()).clone());
        let s = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        &eig.eigenvectors * DMatrix::from_diagonal(&s) * eig.eigenvectors.transpose()
    }

    /// Dense `B^T` from isometric control coordinates: block `j` is
    /// `gain sqrt(w_j) e^{-(T-s_j)H} M^{1/2}`.
    pub fn assemble_controllability(&self) -> DMatrix<f64> {
        let n = self.basis().len();
        let grid = self.grid();
        let half = self.gram_sqrt();
        let mut a = DMatrix::zeros(n, n * grid.len());
        for (j, (&s, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
            let e = self.basis().semigroup_matrix(self.horizon() - s);
            let block = e * &half * (self.gain() * w.sqrt());
            a.view_mut((0, j * n), (n, n)).copy_from(&block);
        }
        a
    }

    /// Operator norm of `u0 ↦` minimal-norm null-control, from the SVD of
    /// the assembled controllability map.
    pub fn control_cost(&self) -> Result<f64> {
        let a = self.assemble_controllability();
        let svd = SVD::new(a, true, false);
        let s = &svd.singular_values;
        let (smax, smin) = (s.max(), s.min());
        let cond = (smax / smin).powi(2);
        if !(smin > 0.0) || cond > MAX_GRAMIAN_CONDITION {
            return Err(Error::IllPosed(format!("controllability Gramian condition number {cond:e}")));
        }
        let u = svd.u.unwrap();
        let e = self.basis().semigroup_matrix(self.horizon());
        let mut m = u.tr_mul(&e);
        for (i, &si) in s.iter().enumerate() {
            m.row_mut(i).scale_mut(1.0 / si);
        }
        Ok(spectral_norm(&m))
    }

    /// `∫_0^T e^{-tH} B B^* e^{-tH} dt` in eigen coordinates, by the grid.
    pub fn observability_gramian(&self) -> DMatrix<f64> {
        let n = self.basis().len();
        let m = self.gram_eigen();
        let g2 = self.gain() * self.gain();
        let mut g = DMatrix::zeros(n, n);
        for (&s, &w) in self.grid().nodes().iter().zip(self.grid().weights()) {
            let d = self.basis().decay(s);
            for l in 0..n {
                for k in 0..n {
                    g[(k, l)] += g2 * w * d[k] * m[(k, l)] * d[l];
                }
            }
        }
        g
    }

    /// The same Gramian in closed form, `M_kl (1 - e^{-(λk+λl)T}) / (λk+λl)`.
    pub fn observability_gramian_exact(&self) -> DMatrix<f64> {
        let lam = self.basis().eigenvalues();
        let t = self.horizon();
        let g2 = self.gain() * self.gain();
        DMatrix::from_fn(lam.len(), lam.len(), |k, l| {
            let s = lam[k] + lam[l];
            let f = if s.abs() < 1e-12 { t } else { -(-s * t).exp_m1() / s };
            g2 * self.gram_eigen()[(k, l)] * f
        })
    }

    /// Smallest `C` with `‖e^{-TH} v‖² ≤ C² ∫_0^T ‖B^* e^{-tH} v‖² dt`:
    /// the square root of the top eigenvalue of the pencil `(e^{-2TH}, G_obs)`.
    pub fn observability_constant(&self) -> Result<f64> {
        let g = self.observability_gramian();
        let g = (&g + g.transpose()) * 0.5;
        let eig = SymmetricEigen::new(g.clone());
        let trace = g.trace();
        let min = eig.eigenvalues.min();
        if !(min > 1e-14 * trace) {
            return Err(Error::IllPosed(format!(
                "observability Gramian min eigenvalue {min:e} below 1e-14 x trace {trace:e}"
            )));
        }
        let chol = Cholesky::new(g).ok_or_else(|| Error::IllPosed("observability Gramian not positive definite".into()))?;
        let e = DMatrix::from_diagonal(&self.basis().decay(self.horizon()));
        let l_inv_e = chol
            .l()
            .solve_lower_triangular(&e)
            .ok_or_else(|| Error::IllPosed("singular Cholesky factor".into()))?;
        Ok(spectral_norm(&l_inv_e))
    }

    /// `F = -Z` with `Z = (B^T)⁺ e^{-TH}`, mapping initial data to isometric
    /// control coordinates.
    pub fn feedback(&self, tol: f64) -> Result<Factorization> {
        let x = self.basis().semigroup_matrix(self.horizon());
        let y = self.assemble_controllability();
        let mut f = factorize(&x, &y, tol)?;
        f.z = -f.z;
        Ok(f)
    }
}
