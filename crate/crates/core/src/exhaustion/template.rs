use serde::{Deserialize, Serialize};

use crate::control::{ProblemSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureOptions;
use crate::sets::{ControlRegion, EquidistributedSet, ThickPattern};
use crate::spectral::{BoxDomain, PotentialSpec};

/// Modes per axis as a function of the box side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeRule {
    Fixed(usize),
    /// `ceil(density · side)`, keeping spatial resolution constant.
    PerUnitLength(f64),
}

impl ModeRule {
    pub fn modes(&self, side: f64) -> Result<usize> {
        match *self {
            ModeRule::Fixed(n) if n > 0 => Ok(n),
            ModeRule::PerUnitLength(rho) if rho > 0.0 && rho.is_finite() => {
                Ok(((rho * side) - 1e-9).ceil().max(1.0) as usize)
            }
            _ => Err(Error::config("modes", "mode rule must give at least one mode")),
        }
    }
}

/// A control set defined on the whole space, cut down to each box.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionTemplate {
    Full,
    Thick(ThickPattern),
    Equidistributed(EquidistributedSet),
}

impl RegionTemplate {
    pub fn region(&self, domain: &BoxDomain) -> Result<ControlRegion> {
        match self {
            RegionTemplate::Full => Ok(ControlRegion::full(domain)),
            RegionTemplate::Thick(p) => p.region(domain),
            RegionTemplate::Equidistributed(s) => s.region(domain.side()),
        }
    }
}

/// A control problem with the box left open.
#[derive(Debug, Clone)]
pub struct ProblemTemplate {
    pub dim: usize,
    pub potential: PotentialSpec,
    pub region: RegionTemplate,
    pub modes: ModeRule,
    pub grid: TimeGrid,
    pub epsilon: f64,
    pub gain: f64,
    pub quadrature: QuadratureOptions,
}

impl ProblemTemplate {
    pub fn new(dim: usize, potential: PotentialSpec, region: RegionTemplate, modes: ModeRule, grid: TimeGrid) -> Self {
        Self {
            dim,
            potential,
            region,
            modes,
            grid,
            epsilon: 1e-8,
            gain: 1.0,
            quadrature: QuadratureOptions::default(),
        }
    }

    pub fn spec(&self, side: f64) -> Result<ProblemSpec> {
        let domain = BoxDomain::new(self.dim, side)?;
        let mut spec = ProblemSpec::new(
            domain,
            self.potential.clone(),
            self.region.region(&domain)?,
            self.modes.modes(side)?,
            self.grid.clone(),
        );
        spec.epsilon = self.epsilon;
        spec.gain = self.gain;
        spec.quadrature = self.quadrature;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_rules() {
        assert_eq!(ModeRule::Fixed(32).modes(128.0).unwrap(), 32);
        assert_eq!(ModeRule::PerUnitLength(8.0).modes(4.0).unwrap(), 32);
        assert_eq!(ModeRule::PerUnitLength(8.0).modes(32.0).unwrap(), 256);
        assert_eq!(ModeRule::PerUnitLength(0.3).modes(1.0).unwrap(), 1);
        assert!(ModeRule::Fixed(0).modes(1.0).is_err());
        assert!(ModeRule::PerUnitLength(-1.0).modes(1.0).is_err());
    }

    #[test]
    fn stripes_follow_the_box() {
        let t = ProblemTemplate::new(
            1,
            PotentialSpec::zero(1),
            RegionTemplate::Thick(ThickPattern::stripes(2.0, 0.0, 1.0, 1).unwrap()),
            ModeRule::PerUnitLength(8.0),
            TimeGrid::new(1.0, 4, 4).unwrap(),
        );
        let opts = QuadratureOptions::default();
        for side in [4.0, 8.0, 16.0] {
            let s = t.spec(side).unwrap();
            assert!((s.region.measure(&opts) - side / 2.0).abs() < 1e-12);
            assert_eq!(s.modes, (8.0 * side) as usize);
        }
    }
}
