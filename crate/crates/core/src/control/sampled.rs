use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::grid::TimeGrid;
use super::problem::ControlProblem;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureOptions;
use crate::sets::{cross_gram, ControlRegion};
use crate::spectral::{SpectralBasis, SpectralField};

/// A control sampled on a time grid. At node `j` the control is the
/// restriction `χ_ω φ_j` of the field with tensor sine coefficients
/// `generators[j]`, so `‖f‖² = Σ_j w_j φ_jᵀ M φ_j`.
#[derive(Debug, Clone)]
pub struct TimeSampledControl {
    grid: Arc<TimeGrid>,
    basis: Arc<SpectralBasis>,
    region: Arc<ControlRegion>,
    gram: Arc<DMatrix<f64>>,
    generators: Vec<DVector<f64>>,
}

impl TimeSampledControl {
    pub fn from_generators(problem: &ControlProblem, generators: Vec<DVector<f64>>) -> Result<Self> {
        if generators.len() != problem.grid().len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} grid nodes",
                generators.len(),
                problem.grid().len()
            )));
        }
        let n = problem.basis().len();
        if let Some(bad) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self {
            grid: problem.grid().clone(),
            basis: problem.basis().clone(),
            region: problem.region().clone(),
            gram: problem.gram().clone(),
            generators,
        })
    }

    pub fn zeros(problem: &ControlProblem) -> Self {
        let n = problem.basis().len();
        Self::from_generators(problem, vec![DVector::zeros(n); problem.grid().len()]).unwrap()
    }

    /// Samples `s ↦ generator(s)` at the grid nodes.
    pub fn from_fn(problem: &ControlProblem, f: impl Fn(f64) -> DVector<f64>) -> Result<Self> {
        let gens = problem.grid().nodes().iter().map(|&s| f(s)).collect();
        Self::from_generators(problem, gens)
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn region(&self) -> &Arc<ControlRegion> {
        &self.region
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    /// Projection of the node value `χ_ω φ_j` onto the basis.
    pub fn value(&self, j: usize) -> SpectralField {
        SpectralField::new(self.basis.clone(), &*self.gram * &self.generators[j]).unwrap()
    }

    pub fn generator(&self, j: usize) -> SpectralField {
        SpectralField::new(self.basis.clone(), self.generators[j].clone()).unwrap()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch("controls on different time grids".into()));
        }
        if !self.basis.same_space(&other.basis) || *self.region != *other.region {
            return Err(Error::Precondition("controls of different problems".into()));
        }
        Ok(())
    }

    /// `∫_0^T ⟨f(s), g(s)⟩_{L²(ω)} ds`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .generators
            .iter()
            .zip(&other.generators)
            .zip(self.grid.weights())
            .map(|((a, b), w)| w * a.dot(&(&*self.gram * b)))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).unwrap().max(0.0).sqrt()
    }

    fn map(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Self {
        Self {
            generators: self.generators.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|g| g * a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, b) in out.generators.iter_mut().zip(&other.generators) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Node values extended by zero and projected onto `target`'s basis.
    /// `target` must contain the control region.
    pub fn embed_values(&self, target: &SpectralBasis, opts: &QuadratureOptions) -> Result<Vec<DVector<f64>>> {
        if !self.region.within_box(target.side()) {
            return Err(Error::Precondition("embedding target does not contain the control region".into()));
        }
        let c = cross_gram(&self.region, target, &self.basis, opts)?;
        Ok(self.generators.iter().map(|g| &c * g).collect())
    }
}

/// `∫_0^T ⟨f(s), g(s)⟩_{L²} ds` for controls of different problems sharing
/// a time grid, computed exactly on the intersection of their regions.
pub fn cross_pairing(f: &TimeSampledControl, g: &TimeSampledControl, opts: &QuadratureOptions) -> Result<f64> {
    if *f.grid != *g.grid {
        return Err(Error::GridMismatch("pairing controls on different time grids".into()));
    }
    let common = f.region.intersect(&g.region)?;
    if common.is_empty() {
        return Ok(0.0);
    }
    let x = cross_gram(&common, &f.basis, &g.basis, opts)?;
    Ok(f
        .generators
        .iter()
        .zip(&g.generators)
        .zip(f.grid.weights())
        .map(|((a, b), w)| w * a.dot(&(&x * b)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ProblemSpec;
    use crate::sets::ThickPattern;
    use crate::spectral::{BoxDomain, PotentialSpec};

    fn problem(side: f64, modes: usize) -> ControlProblem {
        let domain = BoxDomain::new(1, side).unwrap();
        let region = ThickPattern::stripes(2.0, 0.0, 1.0, 1).unwrap().region(&domain).unwrap();
        ProblemSpec::new(domain, PotentialSpec::zero(1), region, modes, TimeGrid::new(1.0, 4, 3).unwrap())
            .assemble()
            .unwrap()
    }

    #[test]
    fn values_lie_in_gram_range() {
        let p = problem(4.0, 6);
        let f = TimeSampledControl::from_fn(&p, |s| DVector::from_fn(6, |i, _| (s + i as f64).sin())).unwrap();
        let m = p.gram();
        let pinv = (**m).clone().pseudo_inverse(1e-10).unwrap();
        for j in 0..p.grid().len() {
            let v = f.value(j);
            let proj = &**m * (&pinv * v.coeffs());
            assert!((proj - v.coeffs()).amax() < 1e-8);
        }
    }

    #[test]
    fn quadrature_parseval() {
        let p = problem(4.0, 6);
        let f = TimeSampledControl::from_fn(&p, |s| DVector::from_fn(6, |i, _| (s * (i + 1) as f64).cos())).unwrap();
        let direct: f64 = (0..p.grid().len())
            .map(|j| p.grid().weights()[j] * f.generators()[j].dot(&f.value(j).into_coeffs()))
            .sum();
        assert!((f.norm().powi(2) - direct).abs() < 1e-13);
    }

    #[test]
    fn cross_pairing_with_self_is_norm() {
        let p = problem(4.0, 6);
        let f = TimeSampledControl::from_fn(&p, |s| DVector::from_fn(6, |i, _| (s - i as f64).sin())).unwrap();
        let q = cross_pairing(&f, &f, &QuadratureOptions::default()).unwrap();
        assert!((q - f.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn embedding_preserves_norm_for_resolved_controls() {
        let small = problem(4.0, 6);
        let big = problem(8.0, 48);
        let f = TimeSampledControl::from_fn(&small, |s| DVector::from_fn(6, |i, _| if i == 0 { 1.0 + s } else { 0.0 })).unwrap();
        let vals = f.embed_values(big.basis(), &QuadratureOptions::default()).unwrap();
        let en: f64 = vals.iter().zip(f.grid().weights()).map(|(v, w)| w * v.norm_squared()).sum();
        // Loss comes only from the jumps of χ_ω φ at the region edges.
        assert!(en.sqrt() <= f.norm() + 1e-12);
        assert!((en.sqrt() - f.norm()).abs() < 0.05 * f.norm());
    }
}
