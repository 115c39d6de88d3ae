use std::sync::Arc;

use super::basis::{build_basis, SpectralBasis};
use super::domain::BoxDomain;
use super::field::SpectralField;
use crate::bounds::{crude_growth_constants, semigroup_bound};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReferenceOptions {
    /// Modes per axis on the reference box. Defaults to keeping the
    /// source resolution (modes per unit length).
    pub modes: Option<usize>,
    /// Largest acceptable proxy budget.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReferenceEvolution {
    pub field: SpectralField,
    /// Certified bound on the squared L² error of using the reference box
    /// in place of the whole space.
    pub budget: f64,
    pub reference_side: f64,
}

/// Squared-norm budget `2C exp(-side²/(32t)) ‖u‖²` for replacing the whole
/// space by a box of side `side`.
pub fn proxy_budget(dim: usize, t: f64, side: f64, v_minus_sup: f64, norm_sq: f64) -> f64 {
    if t == 0.0 || norm_sq == 0.0 {
        return 0.0;
    }
    let (c0, c1) = crude_growth_constants(v_minus_sup);
    semigroup_bound(t, dim, side, v_minus_sup, c0, c1)
        .map(|b| b.part_c * norm_sq)
        .unwrap_or(f64::INFINITY)
}

/// Basis on the box `factor` times larger, same potential.
pub fn reference_basis(basis: &SpectralBasis, factor: f64, modes: Option<usize>) -> Result<Arc<SpectralBasis>> {
    if !(factor >= 2.0 && factor.is_finite()) {
        return Err(Error::Precondition(format!("reference factor must be at least 2, got {factor}")));
    }
    let side = factor * basis.side();
    let modes = modes.unwrap_or_else(|| (basis.modes() as f64 * factor).ceil() as usize);
    build_basis(BoxDomain::new(basis.dim(), side)?, basis.potential().clone(), modes)
}

/// `e^{-tH}` on a box `factor` times larger, with its certified proxy budget.
pub fn reference_semigroup_apply(
    u: &SpectralField,
    t: f64,
    factor: f64,
    opts: ReferenceOptions,
) -> Result<ReferenceEvolution> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("time must be nonnegative, got {t}")));
    }
    let rb = reference_basis(u.basis(), factor, opts.modes)?;
    let side = rb.side();
    let budget = proxy_budget(rb.dim(), t, side, rb.potential().neg_part_bound(), u.norm().powi(2));
    if let Some(tol) = opts.tolerance {
        if budget > tol {
            return Err(Error::BudgetExceeded { budget, tolerance: tol });
        }
    }
    let field = u.embed(&rb)?.semigroup_apply(t)?;
    Ok(ReferenceEvolution {
        field,
        budget,
        reference_side: side,
    })
}
