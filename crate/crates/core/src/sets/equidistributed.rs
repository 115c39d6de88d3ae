use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::region::{ControlRegion, RegionPiece};

/// One `δ`-ball in every cell `G n + [0, G)^d` of the lattice.
///
/// Cell corners sit on `G Z^d`, so `Λ_L` is tiled by whole cells exactly
/// when `L / G` is an even integer.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistributedSet {
    dim: usize,
    g: f64,
    delta: f64,
    offsets: BTreeMap<Vec<i64>, Vec<f64>>,
}

impl EquidistributedSet {
    pub fn new(dim: usize, g: f64, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dim", "dimension must be at least 1"));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::config("region.g", "G must be positive"));
        }
        if !(delta > 0.0 && delta < 0.5 * g) {
            return Err(Error::config(
                "region.delta",
                format!("delta must lie in (0, G/2) = (0, {}), got {delta}", 0.5 * g),
            ));
        }
        Ok(Self {
            dim,
            g,
            delta,
            offsets: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn cell_lo(&self, cell: &[i64]) -> Vec<f64> {
        cell.iter().map(|&n| n as f64 * self.g).collect()
    }

    /// Places the ball of `cell` at `center`.
    pub fn with_center(mut self, cell: Vec<i64>, center: Vec<f64>) -> Result<Self> {
        if cell.len() != self.dim || center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: cell.len().min(center.len()),
            });
        }
        let lo = self.cell_lo(&cell);
        let slack = 1e-12 * self.g;
        for a in 0..self.dim {
            if center[a] - self.delta < lo[a] - slack || center[a] + self.delta > lo[a] + self.g + slack {
                return Err(Error::config(
                    "region.offsets",
                    format!("ball around {center:?} leaves lattice cell {cell:?}"),
                ));
            }
        }
        self.offsets.insert(cell, center);
        Ok(self)
    }

    /// Uniform random centers in the admissible sub-cell of every cell of `Λ_L`.
    pub fn with_random_centers(mut self, side: f64, seed: u64) -> Result<Self> {
        let cells = self.cells_in(side)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free = 0.5 * self.g - self.delta;
        for cell in cells {
            let lo = self.cell_lo(&cell);
            let center = lo.iter().map(|l| l + 0.5 * self.g + rng.random_range(-free..=free)).collect();
            self.offsets.insert(cell, center);
        }
        Ok(self)
    }

    pub fn center(&self, cell: &[i64]) -> Vec<f64> {
        self.offsets
            .get(cell)
            .cloned()
            .unwrap_or_else(|| self.cell_lo(cell).iter().map(|l| l + 0.5 * self.g).collect())
    }

    fn cells_in(&self, side: f64) -> Result<Vec<Vec<i64>>> {
        let m = side / self.g;
        let mr = m.round();
        if !(side > 0.0) || (m - mr).abs() > 1e-9 * m.max(1.0) || mr < 2.0 || (mr as i64) % 2 != 0 {
            return Err(Error::config(
                "side",
                format!("L = {side} must be an even multiple of G = {} so lattice cells tile the box", self.g),
            ));
        }
        let half = (mr as i64) / 2;
        let d = self.dim;
        let per_axis = 2 * half;
        let total = (per_axis as usize).pow(d as u32);
        Ok((0..total)
            .map(|mut flat| {
                let mut cell = vec![0i64; d];
                for a in (0..d).rev() {
                    cell[a] = (flat % per_axis as usize) as i64 - half;
                    flat /= per_axis as usize;
                }
                cell
            })
            .collect())
    }

    /// `S_δ ∩ Λ_L`.
    pub fn region(&self, side: f64) -> Result<ControlRegion> {
        let pieces = self
            .cells_in(side)?
            .into_iter()
            .map(|cell| RegionPiece::ball(self.center(&cell), self.delta))
            .collect();
        ControlRegion::new(self.dim, pieces)
    }
}
