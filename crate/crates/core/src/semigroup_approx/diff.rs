use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::{crude_growth_constants, semigroup_bound};
use crate::error::{Error, Result};
use crate::spectral::tensor::kron_apply;
use crate::spectral::{build_basis, proxy_budget, sine, BoxDomain, SpectralBasis, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffOptions {
    /// Reference box side over `L`. At least 4.
    pub ref_factor: f64,
    /// Modes per unit length on `Λ_L` and the reference box. Defaults to
    /// the resolution of `u0`.
    pub modes_per_unit: Option<f64>,
}

impl Default for DiffOptions {
    fn default() -> Self {
        Self {
            ref_factor: 4.0,
            modes_per_unit: None,
        }
    }
}

/// Squared norms of the box/whole-space semigroup discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemigroupDiff {
    pub d: usize,
    /// Side of the box supporting `u0`.
    pub r: f64,
    pub l: f64,
    pub t: f64,
    /// `‖(e^{-tH} - e^{-tH_L}) u0‖²` on `Λ_L`.
    pub inside: f64,
    /// `‖e^{-tH} u0‖²` off `Λ_L`, read off the reference-space difference.
    pub outside: f64,
    /// How far the zero-extended box solution, once projected onto the
    /// reference basis, leaks outside `Λ_L`: `|outside - ‖e^{-tH} u0‖²_{off Λ_L}|`.
    pub leakage: f64,
    /// `‖(e^{-tH} - e^{-tH_L}) u0‖²`.
    pub total: f64,
    /// `|total - inside - outside|`.
    pub pythagoras_gap: f64,
    /// Bound on `inside` and on `outside`.
    pub bound_ab: f64,
    /// Bound on `total`.
    pub bound_c: f64,
    /// Certified error of the reference box standing in for the whole space.
    pub budget: f64,
    pub reference_side: f64,
    /// The reference budget exceeds the measured total, so the measurement
    /// cannot resolve the true value.
    pub inconclusive: bool,
}

impl SemigroupDiff {
    pub fn violations(&self) -> usize {
        [self.inside > self.bound_ab, self.outside > self.bound_ab, self.total > self.bound_c]
            .iter()
            .filter(|&&v| v)
            .count()
    }
}

/// `cᵀ (O_1 ⊗ … ⊗ O_d) c` with `O_j` the overlap matrix on `[lo_j, hi_j]`.
pub(crate) fn box_norm_sq(u: &SpectralField, lo: &[f64], hi: &[f64]) -> f64 {
    let b = u.basis();
    let (side, n, d) = (b.side(), b.modes(), b.dim());
    let mats: Vec<DMatrix<f64>> = (0..d).map(|j| sine::self_overlap(side, n, lo[j], hi[j])).collect();
    let refs: Vec<&DMatrix<f64>> = mats.iter().collect();
    let (w, _) = kron_apply(u.coeffs().as_slice(), &vec![n; d], &refs);
    u.coeffs().iter().zip(&w).map(|(a, b)| a * b).sum()
}

/// Squared norm of `u` outside the centered cube of side `l`, split into
/// `2d` disjoint slabs.
fn outside_norm_sq(u: &SpectralField, l: f64) -> f64 {
    let d = u.basis().dim();
    let h = u.basis().domain().half();
    let hl = 0.5 * l;
    let mut total = 0.0;
    for axis in 0..d {
        for (a, b) in [(-h, -hl), (hl, h)] {
            if b <= a {
                continue;
            }
            let mut lo = vec![-h; d];
            let mut hi = vec![h; d];
            for j in 0..axis {
                lo[j] = -hl;
                hi[j] = hl;
            }
            lo[axis] = a;
            hi[axis] = b;
            total += box_norm_sq(u, &lo, &hi);
        }
    }
    total
}

fn modes_for(side: f64, density: f64) -> usize {
    ((side * density) - 1e-9).ceil().max(1.0) as usize
}

/// Box semigroup on `Λ_L` against the semigroup on a reference box taken as
/// the whole space. `u0` lives on `Λ_R`, its basis box.
pub fn semigroup_diff(u0: &SpectralField, t: f64, l: f64, opts: DiffOptions) -> Result<SemigroupDiff> {
    if !(opts.ref_factor >= 4.0 && opts.ref_factor.is_finite()) {
        return Err(Error::Precondition(format!(
            "reference box must be at least 4 L, got factor {}",
            opts.ref_factor
        )));
    }
    let b = u0.basis();
    let density = opts.modes_per_unit.unwrap_or(b.modes() as f64 / b.side());
    let side = opts.ref_factor * l;
    let reference = build_basis(BoxDomain::new(b.dim(), side)?, b.potential().clone(), modes_for(side, density))?;
    semigroup_diff_against(u0, t, l, &reference, opts.modes_per_unit)
}

/// As [`semigroup_diff`] with an explicit reference basis, which may be as
/// small as `Λ_L` itself.
pub fn semigroup_diff_against(
    u0: &SpectralField,
    t: f64,
    l: f64,
    reference: &Arc<SpectralBasis>,
    modes_per_unit: Option<f64>,
) -> Result<SemigroupDiff> {
    let b = u0.basis();
    let (d, r) = (b.dim(), b.side());
    reference.domain().check_dim(d)?;
    if !(l >= 2.0 * r) {
        return Err(Error::Precondition(format!("L = {l} must be at least 2R = {}", 2.0 * r)));
    }
    if reference.side() < l {
        return Err(Error::Precondition(format!(
            "reference side {} smaller than L = {l}",
            reference.side()
        )));
    }
    let v_minus = b.potential().neg_part_bound();
    let (c0, c1) = crude_growth_constants(v_minus);
    let bound = semigroup_bound(t, d, l, v_minus, c0, c1)?;

    let density = modes_per_unit.unwrap_or(b.modes() as f64 / r);
    let box_l = if (reference.side() - l).abs() <= 1e-12 * l {
        reference.clone()
    } else {
        build_basis(BoxDomain::new(d, l)?, b.potential().clone(), modes_for(l, density))?
    };

    let whole = u0.embed(reference)?.semigroup_apply(t)?;
    let local = u0.embed(&box_l)?.semigroup_apply(t)?.embed(reference)?;
    let diff = whole.sub(&local)?;

    let hl = vec![0.5 * l; d];
    let neg: Vec<f64> = hl.iter().map(|x| -x).collect();
    let inside = box_norm_sq(&diff, &neg, &hl);
    let outside = outside_norm_sq(&diff, l);
    let leakage = (outside - outside_norm_sq(&whole, l)).abs();
    let total = diff.norm().powi(2);
    let norm_sq = u0.norm().powi(2);
    let budget = proxy_budget(d, t, reference.side(), v_minus, norm_sq);
    Ok(SemigroupDiff {
        d,
        r,
        l,
        t,
        inside,
        outside,
        leakage,
        total,
        pythagoras_gap: (total - inside - outside).abs(),
        bound_ab: bound.part_ab * norm_sq,
        bound_c: bound.part_c * norm_sq,
        budget,
        reference_side: reference.side(),
        inconclusive: budget > total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{region_norm, ControlRegion, RegionPiece};
    use crate::quadrature::QuadratureOptions;
    use crate::spectral::PotentialSpec;

    fn bump(d: usize, modes: usize) -> SpectralField {
        let b = build_basis(BoxDomain::new(d, 1.0).unwrap(), PotentialSpec::zero(d), modes).unwrap();
        SpectralField::mode(b, &vec![1; d]).unwrap()
    }

    #[test]
    fn unit_bump_example() {
        let r = semigroup_diff(&bump(1, 8), 0.1, 4.0, DiffOptions::default()).unwrap();
        assert!((r.bound_c - 4.0 * (-5f64).exp()).abs() < 1e-15);
        assert_eq!(r.violations(), 0);
        assert!(r.pythagoras_gap < 1e-10);
        assert!(r.total > 0.0);
        assert!(!r.inconclusive);
    }

    #[test]
    fn reference_equal_to_box_collapses() {
        let u = bump(1, 8);
        let reference = build_basis(BoxDomain::new(1, 4.0).unwrap(), PotentialSpec::zero(1), 32).unwrap();
        let r = semigroup_diff_against(&u, 0.1, 4.0, &reference, None).unwrap();
        assert!(r.total <= 1e-10 && r.inside <= 1e-10);
    }

    #[test]
    fn rejects_small_box() {
        let e = semigroup_diff(&bump(1, 8), 0.1, 1.5, DiffOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        let opts = DiffOptions {
            ref_factor: 3.0,
            modes_per_unit: None,
        };
        assert!(semigroup_diff(&bump(1, 8), 0.1, 4.0, opts).is_err());
    }

    #[test]
    fn box_norms_match_pointwise_quadrature() {
        let b = build_basis(BoxDomain::new(2, 4.0).unwrap(), PotentialSpec::zero(2), 6).unwrap();
        let u = SpectralField::project(b, &[], |x| (x[0] - 0.3).exp() * (1.0 + x[1] * x[1]).recip());
        let region = ControlRegion::new(2, vec![RegionPiece::Cuboid {
            lo: vec![-1.0, -0.5],
            hi: vec![1.5, 2.0],
        }])
        .unwrap();
        let opts = QuadratureOptions { order: 16, panels: 8 };
        let want = region_norm(&u, &region, &opts).unwrap().powi(2);
        let got = box_norm_sq(&u, &[-1.0, -0.5], &[1.5, 2.0]);
        assert!((got - want).abs() < 1e-12 * want.max(1.0), "{got} {want}");
        let split = outside_norm_sq(&u, 2.0) + box_norm_sq(&u, &[-1.0, -1.0], &[1.0, 1.0]);
        assert!((split - u.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn decreasing_in_box_size() {
        let u = bump(1, 8);
        let totals: Vec<f64> = [2.0, 4.0, 6.0, 8.0]
            .iter()
            .map(|&l| semigroup_diff(&u, 0.5, l, DiffOptions::default()).unwrap().total)
            .collect();
        assert!(totals.windows(2).all(|w| w[1] < w[0]), "{totals:?}");
    }

    #[test]
    fn log_decay_beats_envelope_slope() {
        for t in [0.1, 0.5] {
            let u = bump(1, 8);
            let pts: Vec<(f64, f64)> = [4.0, 6.0, 8.0]
                .iter()
                .map(|&l| (l * l, semigroup_diff(&u, t, l, DiffOptions::default()).unwrap().total.ln()))
                .collect();
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            assert!(slope <= -0.8 / (32.0 * t), "t = {t}: slope {slope}");
        }
    }

    #[test]
    fn two_dimensional_point() {
        let r = semigroup_diff(&bump(2, 8), 0.5, 2.0, DiffOptions::default()).unwrap();
        assert_eq!(r.violations(), 0);
        assert!(r.pythagoras_gap < 1e-10, "{r:?}");
        assert!(r.leakage < 1e-5);
        assert!((r.bound_ab - 4.0 * (-0.25f64).exp()).abs() < 1e-14);
    }
}
