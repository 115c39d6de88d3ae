use serde::Serialize;

use crate::bounds::{crude_growth_constants, semigroup_bound};
use crate::error::{Error, Result};
use crate::spectral::{build_basis, proxy_budget, BoxDomain, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePoint {
    pub l: f64,
    /// `‖(e^{-tH_ref} - e^{-tH_L}) g‖`, the box solution extended by zero.
    pub norm: f64,
    /// Squared-norm envelope `2C exp(-L²/(32t)) ‖g‖²` plus the reference budget.
    pub envelope_sq: f64,
}

/// Strong convergence of box semigroups along `l_seq`, measured on the
/// reference box carrying `g`. Each box keeps the resolution of `g`.
pub fn strong_convergence_probe(g: &SpectralField, t: f64, l_seq: &[f64]) -> Result<Vec<ProbePoint>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("probe time must be positive, got {t}")));
    }
    let b = g.basis();
    let (d, side) = (b.dim(), b.side());
    if l_seq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("box sides must be strictly increasing".into()));
    }
    if let Some(&l) = l_seq.iter().find(|&&l| !(l > 0.0 && l <= side)) {
        return Err(Error::Precondition(format!("box side {l} outside (0, {side}]")));
    }
    let density = b.modes() as f64 / side;
    let whole = g.semigroup_apply(t)?;
    let v_minus = b.potential().neg_part_bound();
    let (c0, c1) = crude_growth_constants(v_minus);
    let norm_sq = g.norm().powi(2);
    let budget = proxy_budget(d, t, side, v_minus, norm_sq);
    l_seq
        .iter()
        .map(|&l| {
            let local = if (l - side).abs() <= 1e-12 * side {
                g.semigroup_apply(t)?
            } else {
                let modes = ((l * density) - 1e-9).ceil().max(1.0) as usize;
                let bl = build_basis(BoxDomain::new(d, l)?, b.potential().clone(), modes)?;
                g.restrict(&bl)?.semigroup_apply(t)?.embed(b)?
            };
            let bound = semigroup_bound(t, d, l, v_minus, c0, c1)?;
            Ok(ProbePoint {
                l,
                norm: whole.sub(&local)?.norm(),
                envelope_sq: bound.part_c * norm_sq + budget,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PotentialSpec;

    fn bump_on_reference() -> SpectralField {
        let b = build_basis(BoxDomain::new(1, 1.0).unwrap(), PotentialSpec::zero(1), 8).unwrap();
        let reference = build_basis(BoxDomain::new(1, 32.0).unwrap(), PotentialSpec::zero(1), 256).unwrap();
        SpectralField::mode(b, &[1]).unwrap().embed(&reference).unwrap()
    }

    #[test]
    fn strictly_decreasing_below_envelope() {
        let g = bump_on_reference();
        let pts = strong_convergence_probe(&g, 0.1, &[2.0, 4.0, 8.0]).unwrap();
        assert!(pts.windows(2).all(|w| w[1].norm < w[0].norm), "{pts:?}");
        let last = pts.last().unwrap();
        assert!(last.norm.powi(2) <= last.envelope_sq);
    }

    #[test]
    fn zero_field_and_full_box() {
        let g = bump_on_reference();
        let z = strong_convergence_probe(&g.scale(0.0), 0.1, &[2.0, 4.0]).unwrap();
        assert!(z.iter().all(|p| p.norm == 0.0));
        let full = strong_convergence_probe(&g, 0.1, &[32.0]).unwrap();
        assert!(full[0].norm <= 1e-12);
    }

    #[test]
    fn rejects_bad_sequences() {
        let g = bump_on_reference();
        assert!(strong_convergence_probe(&g, 0.1, &[4.0, 2.0]).is_err());
        assert!(strong_convergence_probe(&g, 0.1, &[64.0]).is_err());
        assert!(strong_convergence_probe(&g, 0.0, &[4.0]).is_err());
    }
}
