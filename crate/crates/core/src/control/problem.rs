use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::grid::TimeGrid;
use super::sampled::TimeSampledControl;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureOptions;
use crate::sets::{indicator_gram, ControlRegion};
use crate::spectral::{build_basis, BoxDomain, PotentialSpec, SpectralBasis, SpectralField};

/// Everything that defines one control problem `u' + H u = gain · χ_ω f`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: BoxDomain,
    pub potential: PotentialSpec,
    pub region: ControlRegion,
    pub modes: usize,
    pub grid: TimeGrid,
    pub epsilon: f64,
    pub quadrature: QuadratureOptions,
    pub gain: f64,
}

impl ProblemSpec {
    pub fn new(domain: BoxDomain, potential: PotentialSpec, region: ControlRegion, modes: usize, grid: TimeGrid) -> Self {
        Self {
            domain,
            potential,
            region,
            modes,
            grid,
            epsilon: 1e-8,
            quadrature: QuadratureOptions::default(),
            gain: 1.0,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.check_dim(self.potential.dim())?;
        self.domain.check_dim(self.region.dim())?;
        if self.domain.dim() > 2 {
            return Err(Error::config("dim", "dynamics are supported in dimension 1 or 2"));
        }
        if !self.region.within_box(self.domain.side()) {
            return Err(Error::config("region", "control region must lie inside the box"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config("epsilon", format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.gain.is_finite() && self.gain != 0.0) {
            return Err(Error::config("gain", "gain must be finite and nonzero"));
        }
        if self.modes == 0 {
            return Err(Error::config("modes", "modes per axis must be at least 1"));
        }
        if self.quadrature.order == 0 || self.quadrature.panels == 0 {
            return Err(Error::config("quadrature", "order and panels must be positive"));
        }
        Ok(())
    }

    pub fn assemble(&self) -> Result<ControlProblem> {
        self.validate()?;
        let basis = build_basis(self.domain, self.potential.clone(), self.modes)?;
        let gram = indicator_gram(&self.region, &basis, &self.quadrature)?;
        let gram_eig = basis.matrix_to_eigen(&gram);
        Ok(ControlProblem {
            spec: self.clone(),
            basis,
            grid: Arc::new(self.grid.clone()),
            region: Arc::new(self.region.clone()),
            gram: Arc::new(gram),
            gram_eig: Arc::new(gram_eig),
        })
    }
}

/// An assembled problem: basis, indicator Gram (tensor and eigen coordinates).
#[derive(Debug, Clone)]
pub struct ControlProblem {
    spec: ProblemSpec,
    basis: Arc<SpectralBasis>,
    grid: Arc<TimeGrid>,
    region: Arc<ControlRegion>,
    gram: Arc<DMatrix<f64>>,
    gram_eig: Arc<DMatrix<f64>>,
}

impl ControlProblem {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn region(&self) -> &Arc<ControlRegion> {
        &self.region
    }

    /// `∫_ω φ_k φ_m` in tensor sine coordinates.
    pub fn gram(&self) -> &Arc<DMatrix<f64>> {
        &self.gram
    }

    pub fn gram_eigen(&self) -> &DMatrix<f64> {
        &self.gram_eig
    }

    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon
    }

    pub fn gain(&self) -> f64 {
        self.spec.gain
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    /// Same assembled operators, different regularization.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<ControlProblem> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config("epsilon", format!("epsilon must be positive, got {epsilon}")));
        }
        let mut p = self.clone();
        p.spec.epsilon = epsilon;
        Ok(p)
    }

    /// Same problem with the control operator scaled by `gain`.
    pub fn with_gain(&self, gain: f64) -> Result<ControlProblem> {
        if !(gain.is_finite() && gain != 0.0) {
            return Err(Error::config("gain", "gain must be finite and nonzero"));
        }
        let mut p = self.clone();
        p.spec.gain = gain;
        Ok(p)
    }

    pub(crate) fn check_field(&self, u: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(u.basis(), &self.basis) || u.basis().same_space(&self.basis) {
            Ok(())
        } else {
            Err(Error::Precondition("field is not on the problem's basis".into()))
        }
    }

    pub(crate) fn check_control(&self, f: &TimeSampledControl) -> Result<()> {
        if !(Arc::ptr_eq(f.grid(), &self.grid) || **f.grid() == *self.grid) {
            return Err(Error::GridMismatch("control sampled on a different time grid".into()));
        }
        if f.generators().len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "control has {} samples, grid has {} nodes",
                f.generators().len(),
                self.grid.len()
            )));
        }
        if !(Arc::ptr_eq(f.region(), &self.region) || **f.region() == *self.region) {
            return Err(Error::Precondition("control lives on a different region".into()));
        }
        if !f.basis().same_space(&self.basis) {
            return Err(Error::Precondition("control lives on a different basis".into()));
        }
        Ok(())
    }

    /// Time to the horizon for every grid node, `T - s_j`.
    fn lags(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.horizon();
        self.grid.nodes().iter().map(move |s| t - s)
    }

    /// `e^{-τλ}` for every node lag, in eigen ordering.
    pub(crate) fn lag_decays(&self) -> Vec<DVector<f64>> {
        self.lags().map(|tau| self.basis.decay(tau)).collect()
    }

    /// Adjoint in eigen coordinates: node generators `gain · e^{-τ_j Λ} q`.
    pub(crate) fn adjoint_eigen(&self, q: &DVector<f64>, decays: &[DVector<f64>]) -> Vec<DVector<f64>> {
        decays.iter().map(|d| q.component_mul(d) * self.gain()).collect()
    }

    /// Controllability map in eigen coordinates.
    pub(crate) fn map_eigen(&self, gens: &[DVector<f64>], decays: &[DVector<f64>]) -> DVector<f64> {
        let n = self.basis.len();
        let mut y = DVector::zeros(n);
        for ((c, d), &w) in gens.iter().zip(decays).zip(self.grid.weights()) {
            let mc = &*self.gram_eig * c;
            y += mc.component_mul(d) * (w * self.gain());
        }
        y
    }

    /// `B^T f = ∫_0^T e^{-(T-s)H} B f(s) ds` by the grid quadrature.
    pub fn controllability_map(&self, f: &TimeSampledControl) -> Result<SpectralField> {
        self.check_control(f)?;
        let decays = self.lag_decays();
        let gens: Vec<DVector<f64>> = f.generators().iter().map(|c| self.basis.to_eigen(c)).collect();
        let y = self.map_eigen(&gens, &decays);
        SpectralField::new(self.basis.clone(), self.basis.from_eigen(&y))
    }

    /// `(B^T)^* g`: at node `s`, the restriction to `ω` of `e^{-(T-s)H} g`.
    pub fn controllability_adjoint(&self, g: &SpectralField) -> Result<TimeSampledControl> {
        self.check_field(g)?;
        let decays = self.lag_decays();
        let q = self.basis.to_eigen(g.coeffs());
        let gens = self
            .adjoint_eigen(&q, &decays)
            .into_iter()
            .map(|c| self.basis.from_eigen(&c))
            .collect();
        TimeSampledControl::from_generators(self, gens)
    }

    /// `u(t) = e^{-tH} u0 + ∫_0^t e^{-(t-s)H} B f(s) ds`.
    pub fn mild_solution(&self, u0: &SpectralField, f: &TimeSampledControl, t: f64) -> Result<SpectralField> {
        self.check_field(u0)?;
        self.check_control(f)?;
        let sub = self.grid.partial(t)?;
        let n = self.basis.len();
        let mut acc = self.basis.to_eigen(u0.coeffs()).component_mul(&self.basis.decay(t));
        let gens = f.generators();
        for node in &sub {
            let mut c = DVector::zeros(n);
            for &(j, l) in &node.interp {
                c.axpy(l, &gens[j], 1.0);
            }
            let mc = self.basis.to_eigen(&(&*self.gram * c));
            acc += mc.component_mul(&self.basis.decay(t - node.time)) * (node.weight * self.gain());
        }
        SpectralField::new(self.basis.clone(), self.basis.from_eigen(&acc))
    }
}
