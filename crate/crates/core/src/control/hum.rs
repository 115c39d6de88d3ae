use nalgebra::DVector;

use super::problem::ControlProblem;
use super::sampled::TimeSampledControl;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const CG_TOLERANCE: f64 = 1e-10;
pub const CG_MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone)]
pub struct NullControl {
    pub control: TimeSampledControl,
    /// `‖e^{-TH} u0 + B^T f‖`.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Relative CG residual after each iteration.
    pub history: Vec<f64>,
}

impl ControlProblem {
    /// Penalized HUM: solves `(ε + B^T (B^T)^*) q = -e^{-TH} u0` by
    /// Jacobi-preconditioned conjugate gradients, applying the Gramian as
    /// the controllability map composed with its adjoint, and returns
    /// `f = (B^T)^* q`.
    pub fn min_norm_null_control(&self, u0: &SpectralField) -> Result<NullControl> {
        self.check_field(u0)?;
        let basis = self.basis();
        let n = basis.len();
        let decays = self.lag_decays();
        let final_decay = basis.decay(self.horizon());
        let u0_hat = basis.to_eigen(u0.coeffs());
        let b = -u0_hat.component_mul(&final_decay);
        let b_norm = b.norm();
        let eps = self.epsilon();

        let apply = |q: &DVector<f64>| -> DVector<f64> {
            let gens = self.adjoint_eigen(q, &decays);
            self.map_eigen(&gens, &decays) + q * eps
        };
        let g2 = self.gain() * self.gain();
        let mut diag = DVector::from_element(n, eps);
        for (d, &w) in decays.iter().zip(self.grid().weights()) {
            for k in 0..n {
                diag[k] += g2 * w * self.gram_eigen()[(k, k)] * d[k] * d[k];
            }
        }

        let mut q = DVector::zeros(n);
        let mut history = Vec::new();
        if b_norm > 0.0 {
            let mut r = b.clone();
            let mut z = r.component_div(&diag);
            let mut p = z.clone();
            let mut rz = r.dot(&z);
            let mut converged = false;
            for _ in 0..CG_MAX_ITERATIONS {
                let ap = apply(&p);
                let alpha = rz / p.dot(&ap);
                q.axpy(alpha, &p, 1.0);
                r.axpy(-alpha, &ap, 1.0);
                let rel = r.norm() / b_norm;
                history.push(rel);
                if rel <= CG_TOLERANCE {
                    converged = true;
                    break;
                }
                z = r.component_div(&diag);
                let rz_new = r.dot(&z);
                p = &z + &p * (rz_new / rz);
                rz = rz_new;
            }
            if !converged {
                return Err(Error::CgNotConverged {
                    iterations: history.len(),
                    final_residual: *history.last().unwrap_or(&f64::NAN),
                    history,
                });
            }
        }

        let gens_hat = self.adjoint_eigen(&q, &decays);
        let end = u0_hat.component_mul(&final_decay) + self.map_eigen(&gens_hat, &decays);
        let gens = gens_hat.iter().map(|c| basis.from_eigen(c)).collect();
        Ok(NullControl {
            control: TimeSampledControl::from_generators(self, gens)?,
            residual_norm: end.norm(),
            iterations: history.len(),
            history,
        })
    }
}
