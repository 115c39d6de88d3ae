use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The open cube `(-side/2, side/2)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    dim: usize,
    side: f64,
}

impl BoxDomain {
    pub fn new(dim: usize, side: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dim", "dimension must be at least 1"));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::config("side", format!("side must be positive, got {side}")));
        }
        Ok(Self { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn half(&self) -> f64 {
        0.5 * self.side
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Whether `other` is a (non-strict) sub-box of `self`.
    pub fn contains_box(&self, other: &BoxDomain) -> bool {
        self.dim == other.dim && other.side <= self.side
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|&xi| xi.abs() < self.half())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(BoxDomain::new(0, 1.0).is_err());
        assert!(BoxDomain::new(1, 0.0).is_err());
        assert!(BoxDomain::new(1, f64::NAN).is_err());
    }

    #[test]
    fn nesting_follows_side() {
        let a = BoxDomain::new(2, 2.0).unwrap();
        let b = BoxDomain::new(2, 4.0).unwrap();
        assert!(b.contains_box(&a));
        assert!(!a.contains_box(&b));
        assert!(!b.contains_box(&BoxDomain::new(1, 1.0).unwrap()));
        assert!(a.contains_point(&[0.9, -0.9]));
        assert!(!a.contains_point(&[1.0, 0.0]));
    }
}
