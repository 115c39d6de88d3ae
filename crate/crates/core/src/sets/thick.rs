use crate::error::{Error, Result};
use crate::spectral::BoxDomain;

use super::region::{ControlRegion, RegionPiece};

/// Periodic union of axis-aligned cells: `S = ∪_n ∪_c (c + n p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThickPattern {
    period: Vec<f64>,
    cells: Vec<(Vec<f64>, Vec<f64>)>,
}

impl ThickPattern {
    pub fn new(period: Vec<f64>, cells: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let d = period.len();
        if d == 0 {
            return Err(Error::config("pattern.period", "need at least one axis"));
        }
        if period.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::config("pattern.period", "periods must be positive"));
        }
        for (i, (lo, hi)) in cells.iter().enumerate() {
            if lo.len() != d || hi.len() != d {
                return Err(Error::config(format!("pattern.cells[{i}]"), "cell dimension differs from period"));
            }
            for a in 0..d {
                if !(lo[a] >= 0.0 && lo[a] < hi[a] && hi[a] <= period[a]) {
                    return Err(Error::config(
                        format!("pattern.cells[{i}]"),
                        "cells must satisfy 0 <= lo < hi <= period on every axis",
                    ));
                }
            }
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let overlap = (0..d).all(|a| cells[i].0[a] < cells[j].1[a] && cells[j].0[a] < cells[i].1[a]);
                if overlap {
                    return Err(Error::config(format!("pattern.cells[{j}]"), format!("cell overlaps cell {i}")));
                }
            }
        }
        Ok(Self { period, cells })
    }

    /// `∪_k [2k, 2k+1]` style stripes: one cell `[lo, hi]` per period on every axis.
    pub fn stripes(period: f64, lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![period; dim], vec![(vec![lo; dim], vec![hi; dim])])
    }

    pub fn dim(&self) -> usize {
        self.period.len()
    }

    pub fn period(&self) -> &[f64] {
        &self.period
    }

    pub fn cells(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.cells
    }

    /// `S ∩ Λ_L` as a union of boxes.
    pub fn region(&self, domain: &BoxDomain) -> Result<ControlRegion> {
        domain.check_dim(self.dim())?;
        let d = self.dim();
        let h = domain.half();
        let mut pieces = Vec::new();
        for (lo, hi) in &self.cells {
            let ranges: Vec<(i64, i64)> = (0..d)
                .map(|a| {
                    let p = self.period[a];
                    (((-h - hi[a]) / p).floor() as i64, ((h - lo[a]) / p).ceil() as i64)
                })
                .collect();
            let mut n: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            'outer: loop {
                let plo: Vec<f64> = (0..d).map(|a| (lo[a] + n[a] as f64 * self.period[a]).max(-h)).collect();
                let phi: Vec<f64> = (0..d).map(|a| (hi[a] + n[a] as f64 * self.period[a]).min(h)).collect();
                if plo.iter().zip(&phi).all(|(a, b)| a < b) {
                    pieces.push(RegionPiece::Cuboid { lo: plo, hi: phi });
                }
                for a in (0..d).rev() {
                    if n[a] < ranges[a].1 {
                        n[a] += 1;
                        continue 'outer;
                    }
                    n[a] = ranges[a].0;
                }
                break;
            }
        }
        pieces.sort_by(|a, b| {
            let (RegionPiece::Cuboid { lo: la, .. }, RegionPiece::Cuboid { lo: lb, .. }) = (a, b) else {
                unreachable!()
            };
            la.iter().zip(lb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });
        ControlRegion::new(d, pieces)
    }

    /// Length of `[x, x + a] ∩ ∪_n [lo + n p, hi + n p]`.
    fn axis_cover(lo: f64, hi: f64, p: f64, x: f64, a: f64) -> f64 {
        let n0 = ((x - hi) / p).floor() as i64;
        let n1 = ((x + a - lo) / p).ceil() as i64;
        (n0..=n1)
            .map(|n| {
                let s = lo + n as f64 * p;
                let e = hi + n as f64 * p;
                ((x + a).min(e) - x.max(s)).max(0.0)
            })
            .sum()
    }

    /// `|S ∩ (x + [0, a])|`.
    pub fn window_measure(&self, x: &[f64], a: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|(lo, hi)| {
                (0..self.dim())
                    .map(|i| Self::axis_cover(lo[i], hi[i], self.period[i], x[i], a[i]))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Infimum over `x` of `|S ∩ (x + [0,a])| / Π a_i`. The window measure is
/// multilinear between breakpoints of the cell and window edges, so its
/// minimum is attained on the breakpoint grid of one period.
pub fn best_thickness(pattern: &ThickPattern, a: &[f64]) -> Result<f64> {
    let d = pattern.dim();
    if a.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.len() });
    }
    if a.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Precondition("window sides must be positive".into()));
    }
    if pattern.cells.is_empty() {
        return Ok(0.0);
    }
    let grids: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let p = pattern.period[i];
            let mut g = vec![0.0];
            for (lo, hi) in &pattern.cells {
                for v in [lo[i], hi[i], lo[i] - a[i], hi[i] - a[i]] {
                    g.push(v.rem_euclid(p));
                }
            }
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        })
        .collect();
    let vol: f64 = a.iter().product();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    'outer: loop {
        for i in 0..d {
            x[i] = grids[i][idx[i]];
        }
        best = best.min(pattern.window_measure(&x, a) / vol);
        for i in (0..d).rev() {
            if idx[i] + 1 < grids[i].len() {
                idx[i] += 1;
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Whether `S` is `(γ, a)`-thick.
pub fn thickness_check(pattern: &ThickPattern, gamma: f64, a: &[f64]) -> bool {
    match best_thickness(pattern, a) {
        Ok(best) => best >= gamma - 1e-12,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureOptions;

    fn stripes() -> ThickPattern {
        ThickPattern::stripes(2.0, 0.0, 1.0, 1).unwrap()
    }

    #[test]
    fn stripe_examples() {
        let s = stripes();
        assert!(thickness_check(&s, 0.5, &[2.0]));
        assert!(!thickness_check(&s, 0.6, &[2.0]));
        assert!((best_thickness(&s, &[2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(best_thickness(&s, &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn whole_space_is_fully_thick() {
        let s = ThickPattern::new(vec![1.0, 1.0], vec![(vec![0.0, 0.0], vec![1.0, 1.0])]).unwrap();
        assert!(thickness_check(&s, 1.0, &[0.3, 2.7]));
    }

    #[test]
    fn overlapping_cells_rejected() {
        let e = ThickPattern::new(vec![2.0], vec![(vec![0.0], vec![1.0]), (vec![0.5], vec![1.5])]);
        assert!(e.is_err());
        assert!(ThickPattern::new(vec![2.0], vec![(vec![0.0], vec![2.5])]).is_err());
    }

    #[test]
    fn region_in_box() {
        let s = stripes();
        let r = s.region(&BoxDomain::new(1, 4.0).unwrap()).unwrap();
        assert_eq!(r.pieces().len(), 2);
        assert!((r.measure(&QuadratureOptions::default()) - 2.0).abs() < 1e-15);
        let r = s.region(&BoxDomain::new(1, 5.0).unwrap()).unwrap();
        // (-2.5, 2.5) meets [-2,-1], [0,1], [2,2.5].
        assert!((r.measure(&QuadratureOptions::default()) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_checkerboard() {
        let s = ThickPattern::new(
            vec![2.0, 2.0],
            vec![(vec![0.0, 0.0], vec![1.0, 1.0]), (vec![1.0, 1.0], vec![2.0, 2.0])],
        )
        .unwrap();
        assert!((best_thickness(&s, &[2.0, 2.0]).unwrap() - 0.5).abs() < 1e-14);
        let r = s.region(&BoxDomain::new(2, 4.0).unwrap()).unwrap();
        assert!((r.measure(&QuadratureOptions::default()) - 8.0).abs() < 1e-13);
    }
}
