use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::basis::SpectralBasis;
use super::sine;
use super::tensor::{flatten, kron_apply};
use crate::error::{Error, Result};
use crate::quadrature::{composite_max_width, Rule};

/// A function on a box, as tensor sine coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    basis: Arc<SpectralBasis>,
    coeffs: DVector<f64>,
}

impl SpectralField {
    pub fn new(basis: Arc<SpectralBasis>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: Arc<SpectralBasis>) -> Self {
        let n = basis.len();
        Self {
            basis,
            coeffs: DVector::zeros(n),
        }
    }

    /// The sine mode with one-based multi-index `k`.
    pub fn mode(basis: Arc<SpectralBasis>, k: &[usize]) -> Result<Self> {
        basis.domain().check_dim(k.len())?;
        if k.iter().any(|&ki| ki == 0 || ki > basis.modes()) {
            return Err(Error::Precondition(format!("mode index {k:?} outside 1..={}", basis.modes())));
        }
        let zero_based: Vec<usize> = k.iter().map(|&i| i - 1).collect();
        let mut f = Self::zeros(basis);
        let idx = flatten(&zero_based, f.basis.modes());
        f.coeffs[idx] = 1.0;
        Ok(f)
    }

    /// L² projection of `f` by tensor Gauss–Legendre quadrature. `breaks`
    /// are extra panel edges (use the kinks of `f`), shared by every axis.
    pub fn project(basis: Arc<SpectralBasis>, breaks: &[f64], f: impl Fn(&[f64]) -> f64) -> Self {
        let h = basis.domain().half();
        let mut b: Vec<f64> = breaks.iter().copied().filter(|x| x.abs() < h).collect();
        b.push(-h);
        b.push(h);
        b.sort_by(f64::total_cmp);
        b.dedup();
        let width = (basis.side() / basis.modes() as f64).min(0.25 * basis.side());
        let rule = composite_max_width(&b, 16, width);
        Self::project_with_rule(basis, &rule, f)
    }

    pub fn project_with_rule(basis: Arc<SpectralBasis>, rule: &Rule, f: impl Fn(&[f64]) -> f64) -> Self {
        let d = basis.dim();
        let q = rule.len();
        let total = q.pow(d as u32);
        let mut vals = vec![0.0; total];
        let mut x = vec![0.0; d];
        for (flat, v) in vals.iter_mut().enumerate() {
            let idx = super::tensor::unflatten(flat, q, d);
            let mut w = 1.0;
            for a in 0..d {
                x[a] = rule.nodes[idx[a]];
                w *= rule.weights[idx[a]];
            }
            *v = w * f(&x);
        }
        let phi_t = sine::mode_matrix(basis.side(), basis.modes(), &rule.nodes).transpose();
        let mats: Vec<&DMatrix<f64>> = vec![&phi_t; d];
        let (c, _) = kron_apply(&vals, &vec![q; d], &mats);
        Self {
            coeffs: DVector::from_vec(c),
            basis,
        }
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<f64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    fn check_same(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.same_space(&other.basis) {
            Ok(())
        } else {
            Err(Error::Precondition("fields live on different bases".into()))
        }
    }

    pub fn dot(&self, other: &SpectralField) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.coeffs.dot(&other.coeffs))
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        Self {
            basis: self.basis.clone(),
            coeffs: &self.coeffs * a,
        }
    }

    /// `e^{-tH} u`.
    pub fn semigroup_apply(&self, t: f64) -> Result<SpectralField> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Precondition(format!("semigroup time must be nonnegative, got {t}")));
        }
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.basis.apply_semigroup(&self.coeffs, t),
        })
    }

    /// Projection of `χ_{target box} u` (extended by zero) onto `target`.
    fn project_box(&self, target: &Arc<SpectralBasis>) -> SpectralField {
        let (ls, ns) = (self.basis.side(), self.basis.modes());
        let (lt, nt) = (target.side(), target.modes());
        let h = 0.5 * ls.min(lt);
        let o = sine::overlap_matrix(lt, nt, ls, ns, -h, h);
        let d = self.basis.dim();
        let mats: Vec<&DMatrix<f64>> = vec![&o; d];
        let (c, _) = kron_apply(self.coeffs.as_slice(), &vec![ns; d], &mats);
        Self {
            basis: target.clone(),
            coeffs: DVector::from_vec(c),
        }
    }

    /// Zero extension onto a larger box, projected onto its truncated basis.
    pub fn embed(&self, target: &Arc<SpectralBasis>) -> Result<SpectralField> {
        self.basis.domain().check_dim(target.dim())?;
        if target.side() < self.basis.side() {
            return Err(Error::Precondition(format!(
                "embedding target side {} smaller than source side {}",
                target.side(),
                self.basis.side()
            )));
        }
        Ok(self.project_box(target))
    }

    /// Restriction to a smaller centered box, projected onto its basis.
    pub fn restrict(&self, target: &Arc<SpectralBasis>) -> Result<SpectralField> {
        self.basis.domain().check_dim(target.dim())?;
        if target.side() > self.basis.side() {
            return Err(Error::Precondition(format!(
                "restriction target side {} larger than source side {}",
                target.side(),
                self.basis.side()
            )));
        }
        Ok(self.project_box(target))
    }

    /// Values at arbitrary points.
    pub fn evaluate(&self, points: &[Vec<f64>]) -> Vec<f64> {
        let d = self.basis.dim();
        let (side, n) = (self.basis.side(), self.basis.modes());
        points
            .iter()
            .map(|x| {
                let per_axis: Vec<Vec<f64>> = x.iter().map(|&xi| sine::modes(side, n, xi)).collect();
                let mut s = 0.0;
                for (flat, c) in self.coeffs.iter().enumerate() {
                    if *c == 0.0 {
                        continue;
                    }
                    let idx = self.basis.multi_index(flat);
                    let mut p = *c;
                    for a in 0..d {
                        p *= per_axis[a][idx[a]];
                    }
                    s += p;
                }
                s
            })
            .collect()
    }

    /// Values on the tensor grid `axes[0] x axes[1] x ...`, row-major.
    pub fn evaluate_grid(&self, axes: &[&[f64]]) -> Vec<f64> {
        let d = self.basis.dim();
        assert_eq!(axes.len(), d);
        let (side, n) = (self.basis.side(), self.basis.modes());
        let mats: Vec<DMatrix<f64>> = axes.iter().map(|pts| sine::mode_matrix(side, n, pts)).collect();
        let refs: Vec<&DMatrix<f64>> = mats.iter().collect();
        kron_apply(self.coeffs.as_slice(), &vec![n; d], &refs).0
    }
}
