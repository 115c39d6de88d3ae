use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{composite_max_width, composite_with_breaks, QuadratureOptions, Rule};
use crate::spectral::{sine, tensor::kron, BoxDomain, SpectralBasis, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub enum RegionPiece {
    Cuboid {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// A disk intersected with the box `[clip_lo, clip_hi]` (possibly infinite).
    Ball {
        center: Vec<f64>,
        radius: f64,
        clip_lo: Vec<f64>,
        clip_hi: Vec<f64>,
    },
}

impl RegionPiece {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        let d = center.len();
        if d == 1 {
            return RegionPiece::Cuboid {
                lo: vec![center[0] - radius],
                hi: vec![center[0] + radius],
            };
        }
        RegionPiece::Ball {
            center,
            radius,
            clip_lo: vec![f64::NEG_INFINITY; d],
            clip_hi: vec![f64::INFINITY; d],
        }
    }

    fn dim(&self) -> usize {
        match self {
            RegionPiece::Cuboid { lo, .. } => lo.len(),
            RegionPiece::Ball { center, .. } => center.len(),
        }
    }

    /// Tight bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            RegionPiece::Cuboid { lo, hi } => (lo.clone(), hi.clone()),
            RegionPiece::Ball {
                center,
                radius,
                clip_lo,
                clip_hi,
            } => (
                center.iter().zip(clip_lo).map(|(c, l)| (c - radius).max(*l)).collect(),
                center.iter().zip(clip_hi).map(|(c, h)| (c + radius).min(*h)).collect(),
            ),
        }
    }

    /// Whether the open pieces share interior points. Exact except for two
    /// clipped disks, which are only compared through their bounding boxes
    /// when both are unclipped.
    fn overlaps(&self, other: &RegionPiece) -> bool {
        let (alo, ahi) = self.bounds();
        let (blo, bhi) = other.bounds();
        if alo.iter().zip(&bhi).any(|(l, h)| l >= h) || blo.iter().zip(&ahi).any(|(l, h)| l >= h) {
            return false;
        }
        match (self, other) {
            (RegionPiece::Cuboid { .. }, RegionPiece::Cuboid { .. }) => true,
            (RegionPiece::Cuboid { lo, hi }, disk @ RegionPiece::Ball { .. })
            | (disk @ RegionPiece::Ball { .. }, RegionPiece::Cuboid { lo, hi }) => {
                let RegionPiece::Ball { center, radius, clip_lo, clip_hi } = disk else { unreachable!() };
                let blo: Vec<f64> = lo.iter().zip(clip_lo).map(|(a, b)| a.max(*b)).collect();
                let bhi: Vec<f64> = hi.iter().zip(clip_hi).map(|(a, b)| a.min(*b)).collect();
                if blo.iter().zip(&bhi).any(|(l, h)| l >= h) {
                    return false;
                }
                let dist2: f64 = center
                    .iter()
                    .zip(blo.iter().zip(&bhi))
                    .map(|(c, (l, h))| (c - c.clamp(*l, *h)).powi(2))
                    .sum();
                dist2 < radius * radius
            }
            (
                RegionPiece::Ball { center: c1, radius: r1, clip_lo: l1, clip_hi: h1 },
                RegionPiece::Ball { center: c2, radius: r2, clip_lo: l2, clip_hi: h2 },
            ) => {
                let unclipped = l1.iter().chain(l2).all(|v| v.is_infinite()) && h1.iter().chain(h2).all(|v| v.is_infinite());
                let dist2: f64 = c1.iter().zip(c2).map(|(a, b)| (a - b) * (a - b)).sum();
                unclipped && dist2 < (r1 + r2) * (r1 + r2)
            }
        }
    }

    fn is_empty(&self) -> bool {
        let (lo, hi) = self.bounds();
        lo.iter().zip(&hi).any(|(a, b)| !(a < b))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            RegionPiece::Cuboid { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(&xi, (&l, &h))| xi > l && xi < h),
            RegionPiece::Ball {
                center,
                radius,
                clip_lo,
                clip_hi,
            } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                r2 < radius * radius && x.iter().zip(clip_lo.iter().zip(clip_hi)).all(|(&xi, (&l, &h))| xi > l && xi < h)
            }
        }
    }

    /// Intersection with an axis-aligned box.
    fn clip(&self, blo: &[f64], bhi: &[f64]) -> RegionPiece {
        match self {
            RegionPiece::Cuboid { lo, hi } => RegionPiece::Cuboid {
                lo: lo.iter().zip(blo).map(|(a, b)| a.max(*b)).collect(),
                hi: hi.iter().zip(bhi).map(|(a, b)| a.min(*b)).collect(),
            },
            RegionPiece::Ball {
                center,
                radius,
                clip_lo,
                clip_hi,
            } => RegionPiece::Ball {
                center: center.clone(),
                radius: *radius,
                clip_lo: clip_lo.iter().zip(blo).map(|(a, b)| a.max(*b)).collect(),
                clip_hi: clip_hi.iter().zip(bhi).map(|(a, b)| a.min(*b)).collect(),
            },
        }
    }

    fn measure(&self, opts: &QuadratureOptions) -> f64 {
        match self {
            RegionPiece::Cuboid { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product(),
            RegionPiece::Ball { radius, .. } => {
                if self.bounds() == RegionPiece::ball_bounds(self) {
                    PI * radius * radius
                } else {
                    let mut total = 0.0;
                    for_each_disk_slice(self, 0.0, opts, |x_w, ylo, yhi| {
                        total += x_w.1 * (yhi - ylo);
                    });
                    total
                }
            }
        }
    }

    fn ball_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            RegionPiece::Ball { center, radius, .. } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            _ => self.bounds(),
        }
    }
}

/// Calls `f((x, weight), y_lo, y_hi)` for the slices of a clipped disk in
/// the plane, using `x = cx + r sin θ` so the weight includes `r cos θ`.
/// `wavenumber` is the largest spatial frequency of the integrand.
fn for_each_disk_slice(piece: &RegionPiece, wavenumber: f64, opts: &QuadratureOptions, mut f: impl FnMut((f64, f64), f64, f64)) {
    let RegionPiece::Ball {
        center,
        radius,
        clip_lo,
        clip_hi,
    } = piece
    else {
        unreachable!()
    };
    let (cx, cy, r) = (center[0], center[1], *radius);
    let to_theta = |x: f64| ((x - cx) / r).clamp(-1.0, 1.0).asin();
    let t_lo = to_theta(clip_lo[0]);
    let t_hi = to_theta(clip_hi[0]);
    if !(t_hi > t_lo) {
        return;
    }
    let mut breaks = vec![t_lo, t_hi];
    for c in [clip_lo[1], clip_hi[1]] {
        let s = (c - cy).abs() / r;
        if s < 1.0 {
            let t = s.acos();
            breaks.extend([-t, t]);
        }
    }
    breaks.retain(|t| *t >= t_lo && *t <= t_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let panels = opts.panels.max((2.0 * wavenumber * r).ceil() as usize);
    let rule = composite_with_breaks(&breaks, opts.order, panels);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = cx + r * t.sin();
        let h = r * t.cos();
        let ylo = (cy - h).max(clip_lo[1]);
        let yhi = (cy + h).min(clip_hi[1]);
        if yhi > ylo {
            f((x, w * r * t.cos()), ylo, yhi);
        }
    }
}

/// A finite union of pairwise disjoint boxes and (clipped) disks.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlRegion {
    dim: usize,
    pieces: Vec<RegionPiece>,
}

impl ControlRegion {
    pub fn new(dim: usize, pieces: Vec<RegionPiece>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("region.dim", "dimension must be at least 1"));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            match p {
                RegionPiece::Cuboid { lo, hi } => {
                    if lo.iter().chain(hi).any(|v| !v.is_finite()) || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                        return Err(Error::DegenerateRegion(format!("piece {i}: need finite lo < hi")));
                    }
                }
                RegionPiece::Ball { center, radius, .. } => {
                    if dim != 2 {
                        return Err(Error::DegenerateRegion(format!("piece {i}: disks need dimension 2")));
                    }
                    if !(radius.is_finite() && *radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
                        return Err(Error::DegenerateRegion(format!("piece {i}: need finite center and positive radius")));
                    }
                    if p.is_empty() {
                        return Err(Error::DegenerateRegion(format!("piece {i}: clipped disk is empty")));
                    }
                }
            }
        }
        for j in 0..pieces.len() {
            for i in 0..j {
                if pieces[i].overlaps(&pieces[j]) {
                    return Err(Error::DegenerateRegion(format!("piece {j} overlaps piece {i}")));
                }
            }
        }
        Ok(Self { dim, pieces })
    }

    pub fn full(domain: &BoxDomain) -> Self {
        let h = domain.half();
        Self {
            dim: domain.dim(),
            pieces: vec![RegionPiece::Cuboid {
                lo: vec![-h; domain.dim()],
                hi: vec![h; domain.dim()],
            }],
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, pieces: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[RegionPiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn measure(&self, opts: &QuadratureOptions) -> f64 {
        self.pieces.iter().map(|p| p.measure(opts)).sum()
    }

    /// Intersection with the centered box of side `side`.
    pub fn clip_to_box(&self, side: f64) -> Self {
        let h = 0.5 * side;
        let lo = vec![-h; self.dim];
        let hi = vec![h; self.dim];
        Self {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.clip(&lo, &hi)).filter(|p| !p.is_empty()).collect(),
        }
    }

    /// Whether every piece lies in the closed centered box of side `side`.
    pub fn within_box(&self, side: f64) -> bool {
        let h = 0.5 * side + 1e-12 * side.max(1.0);
        self.pieces.iter().all(|p| {
            let (lo, hi) = p.bounds();
            lo.iter().all(|&v| v >= -h) && hi.iter().all(|&v| v <= h)
        })
    }

    /// Intersection of two regions. Disk–disk intersections are supported only
    /// for identical disks.
    pub fn intersect(&self, other: &ControlRegion) -> Result<ControlRegion> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let (alo, ahi) = a.bounds();
                let (blo, bhi) = b.bounds();
                if alo.iter().zip(&bhi).any(|(l, h)| l >= h) || blo.iter().zip(&ahi).any(|(l, h)| l >= h) {
                    continue;
                }
                let piece = match (a, b) {
                    (RegionPiece::Cuboid { lo, hi }, other_piece) | (other_piece, RegionPiece::Cuboid { lo, hi }) => {
                        other_piece.clip(lo, hi)
                    }
                    (
                        RegionPiece::Ball {
                            center: c1, radius: r1, ..
                        },
                        RegionPiece::Ball {
                            center: c2,
                            radius: r2,
                            clip_lo,
                            clip_hi,
                        },
                    ) => {
                        if c1 != c2 || r1 != r2 {
                            return Err(Error::NoQuadratureSupport("intersection of distinct disks".into()));
                        }
                        a.clip(clip_lo, clip_hi)
                    }
                };
                if !piece.is_empty() {
                    pieces.push(piece);
                }
            }
        }
        Ok(ControlRegion { dim: self.dim, pieces })
    }

    /// Complement inside the centered box of side `side`, for box-only regions.
    pub fn complement_in(&self, side: f64) -> Result<ControlRegion> {
        let h = 0.5 * side;
        let mut coords: Vec<Vec<f64>> = vec![vec![-h, h]; self.dim];
        for p in &self.pieces {
            match p {
                RegionPiece::Cuboid { lo, hi } => {
                    for a in 0..self.dim {
                        coords[a].push(lo[a].clamp(-h, h));
                        coords[a].push(hi[a].clamp(-h, h));
                    }
                }
                RegionPiece::Ball { .. } => {
                    return Err(Error::NoQuadratureSupport("complement of a disk union".into()));
                }
            }
        }
        for c in &mut coords {
            c.sort_by(f64::total_cmp);
            c.dedup();
        }
        let shape: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
        let total: usize = shape.iter().product();
        let mut pieces = Vec::new();
        for flat in 0..total {
            let mut rem = flat;
            let mut idx = vec![0; self.dim];
            for a in (0..self.dim).rev() {
                idx[a] = rem % shape[a];
                rem /= shape[a];
            }
            let lo: Vec<f64> = (0..self.dim).map(|a| coords[a][idx[a]]).collect();
            let hi: Vec<f64> = (0..self.dim).map(|a| coords[a][idx[a] + 1]).collect();
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            if !self.contains(&mid) {
                pieces.push(RegionPiece::Cuboid { lo, hi });
            }
        }
        Ok(ControlRegion { dim: self.dim, pieces })
    }
}

fn piece_cross_gram(piece: &RegionPiece, a: &SpectralBasis, b: &SpectralBasis, opts: &QuadratureOptions) -> DMatrix<f64> {
    let (la, na) = (a.side(), a.modes());
    let (lb, nb) = (b.side(), b.modes());
    match piece {
        RegionPiece::Cuboid { lo, hi } => {
            let mats: Vec<DMatrix<f64>> = (0..a.dim())
                .map(|i| sine::overlap_matrix(la, na, lb, nb, lo[i], hi[i]))
                .collect();
            kron(&mats.iter().collect::<Vec<_>>())
        }
        RegionPiece::Ball { .. } => {
            let wavenumber = PI * (na as f64 / la).max(nb as f64 / lb);
            let mut out = DMatrix::zeros(na * na, nb * nb);
            for_each_disk_slice(piece, wavenumber, opts, |(x, w), ylo, yhi| {
                let pa = sine::modes(la, na, x);
                let pb = sine::modes(lb, nb, x);
                let y = sine::overlap_matrix(la, na, lb, nb, ylo, yhi);
                for i0 in 0..na {
                    for j0 in 0..nb {
                        let s = w * pa[i0] * pb[j0];
                        if s == 0.0 {
                            continue;
                        }
                        let mut block = out.view_mut((i0 * na, j0 * nb), (na, nb));
                        block += &y * s;
                    }
                }
            });
            out
        }
    }
}

/// `∫_ω φ^a_k φ^b_m` in tensor sine coordinates of both bases.
pub fn cross_gram(region: &ControlRegion, a: &SpectralBasis, b: &SpectralBasis, opts: &QuadratureOptions) -> Result<DMatrix<f64>> {
    a.domain().check_dim(region.dim())?;
    b.domain().check_dim(region.dim())?;
    let parts: Vec<DMatrix<f64>> = region.pieces.par_iter().map(|p| piece_cross_gram(p, a, b, opts)).collect();
    let mut out = DMatrix::zeros(a.len(), b.len());
    for p in parts {
        out += p;
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateRegion("non-finite Gram entries".into()));
    }
    Ok(out)
}

/// `M_km = ∫_ω φ_k φ_m`, symmetrized.
pub fn indicator_gram(region: &ControlRegion, basis: &SpectralBasis, opts: &QuadratureOptions) -> Result<DMatrix<f64>> {
    if !region.within_box(basis.side()) {
        return Err(Error::Precondition("control region must lie inside the basis box".into()));
    }
    let m = cross_gram(region, basis, basis, opts)?;
    Ok((&m + m.transpose()) * 0.5)
}

/// `‖χ_ω u‖` by pointwise quadrature of `u²` over each piece.
pub fn region_norm(u: &SpectralField, region: &ControlRegion, opts: &QuadratureOptions) -> Result<f64> {
    let basis = u.basis();
    basis.domain().check_dim(region.dim())?;
    let clipped = region.clip_to_box(basis.side());
    if clipped.is_empty() && !region.is_empty() {
        return Err(Error::NoQuadratureSupport("region misses the field's box".into()));
    }
    let width = basis.side() / (basis.modes() as f64).max(1.0);
    let order = opts.order.max(12);
    let axis_rule = |lo: f64, hi: f64| -> Rule { composite_max_width(&[lo, hi], order, width) };
    let mut total = 0.0;
    for p in clipped.pieces() {
        match p {
            RegionPiece::Cuboid { lo, hi } => {
                let rules: Vec<Rule> = (0..region.dim()).map(|a| axis_rule(lo[a], hi[a])).collect();
                let axes: Vec<&[f64]> = rules.iter().map(|r| r.nodes.as_slice()).collect();
                let vals = u.evaluate_grid(&axes);
                let shape: Vec<usize> = rules.iter().map(|r| r.len()).collect();
                for (flat, v) in vals.iter().enumerate() {
                    let mut rem = flat;
                    let mut w = 1.0;
                    for a in (0..shape.len()).rev() {
                        w *= rules[a].weights[rem % shape[a]];
                        rem /= shape[a];
                    }
                    total += w * v * v;
                }
            }
            RegionPiece::Ball { .. } => {
                let wavenumber = PI * basis.modes() as f64 / basis.side();
                for_each_disk_slice(p, wavenumber, opts, |(x, w), ylo, yhi| {
                    let r = axis_rule(ylo, yhi);
                    let vals = u.evaluate_grid(&[&[x], &r.nodes]);
                    total += w * vals.iter().zip(&r.weights).map(|(v, wy)| wy * v * v).sum::<f64>();
                });
            }
        }
    }
    Ok(total.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, PotentialSpec};
    use nalgebra::{DVector, SymmetricEigen};

    fn basis(d: usize, l: f64, n: usize) -> std::sync::Arc<SpectralBasis> {
        build_basis(BoxDomain::new(d, l).unwrap(), PotentialSpec::zero(d), n).unwrap()
    }

    #[test]
    fn full_region_gram_is_identity() {
        let b = basis(2, 2.0, 4);
        let m = indicator_gram(&ControlRegion::full(b.domain()), &b, &QuadratureOptions::default()).unwrap();
        assert!((m - DMatrix::identity(16, 16)).amax() < 1e-13);
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let cube = |lo: f64, hi: f64| RegionPiece::Cuboid { lo: vec![lo, 0.0], hi: vec![hi, 1.0] };
        assert!(ControlRegion::new(2, vec![cube(0.0, 1.0), cube(0.5, 1.5)]).is_err());
        assert!(ControlRegion::new(2, vec![cube(0.0, 1.0), cube(1.0, 1.5)]).is_ok());
        // Disk near the corner of a box without touching it.
        let near = RegionPiece::ball(vec![1.3, 1.3], 0.4);
        assert!(ControlRegion::new(2, vec![cube(0.0, 1.0), near]).is_ok());
        let hit = RegionPiece::ball(vec![1.2, 1.2], 0.4);
        assert!(ControlRegion::new(2, vec![cube(0.0, 1.0), hit]).is_err());
        let a = RegionPiece::ball(vec![-1.0, -1.0], 0.3);
        let b = RegionPiece::ball(vec![-1.0, -0.5], 0.3);
        assert!(ControlRegion::new(2, vec![a, b]).is_err());
    }

    #[test]
    fn empty_region_gram_is_zero() {
        let b = basis(1, 2.0, 4);
        let m = indicator_gram(&ControlRegion::empty(1), &b, &QuadratureOptions::default()).unwrap();
        assert_eq!(m.amax(), 0.0);
    }

    #[test]
    fn disk_gram_matches_polar_oracle() {
        let b = basis(2, 2.0, 4);
        let disk = ControlRegion::new(2, vec![RegionPiece::ball(vec![0.2, -0.1], 0.3)]).unwrap();
        let m = indicator_gram(&disk, &b, &QuadratureOptions::default()).unwrap();
        // Oracle: polar coordinates with a fine tensor rule.
        let rr = crate::quadrature::composite(0.0, 0.3, 20, 4);
        let tr = crate::quadrature::composite(0.0, 2.0 * PI, 20, 16);
        let phi = |k: usize, x: f64, y: f64| {
            let idx = b.multi_index(k);
            sine::mode(2.0, idx[0] + 1, x) * sine::mode(2.0, idx[1] + 1, y)
        };
        for &(k, l) in &[(0usize, 0usize), (0, 5), (3, 12), (15, 15)] {
            let mut s = 0.0;
            for (&r, &wr) in rr.nodes.iter().zip(&rr.weights) {
                for (&t, &wt) in tr.nodes.iter().zip(&tr.weights) {
                    let (x, y) = (0.2 + r * t.cos(), -0.1 + r * t.sin());
                    s += wr * wt * r * phi(k, x, y) * phi(l, x, y);
                }
            }
            assert!((m[(k, l)] - s).abs() < 1e-8, "{k} {l}: {} vs {s}", m[(k, l)]);
        }
        assert!((disk.measure(&QuadratureOptions::default()) - PI * 0.09).abs() < 1e-14);
    }

    #[test]
    fn clipped_disk_measure() {
        let disk = ControlRegion::new(2, vec![RegionPiece::ball(vec![0.9, 0.0], 0.3)]).unwrap();
        let clipped = disk.clip_to_box(2.0);
        // Circular segment cut at distance 0.1 from the center.
        let (r, d): (f64, f64) = (0.3, 0.1);
        let seg = r * r * (d / r).acos() - d * (r * r - d * d).sqrt();
        let want = PI * r * r - seg;
        assert!((clipped.measure(&QuadratureOptions::default()) - want).abs() < 1e-10);
    }

    #[test]
    fn gram_spectrum_and_pythagoras() {
        let b = basis(1, 4.0, 12);
        let region = ControlRegion::new(
            1,
            vec![
                RegionPiece::Cuboid { lo: vec![-1.5], hi: vec![-0.5] },
                RegionPiece::Cuboid { lo: vec![0.3], hi: vec![1.9] },
            ],
        )
        .unwrap();
        let opts = QuadratureOptions::default();
        let m = indicator_gram(&region, &b, &opts).unwrap();
        let eig = SymmetricEigen::new(m.clone());
        assert!(eig.eigenvalues.iter().all(|&l| (-1e-9..=1.0 + 1e-9).contains(&l)));
        let c = DVector::from_fn(12, |i, _| ((i as f64) * 1.3).sin());
        let u = SpectralField::new(b.clone(), c.clone()).unwrap();
        let inside = region_norm(&u, &region, &opts).unwrap();
        let outside = region_norm(&u, &region.complement_in(4.0).unwrap(), &opts).unwrap();
        assert!((inside * inside + outside * outside - u.norm().powi(2)).abs() < 1e-10);
        assert!((inside * inside - c.dot(&(&m * &c))).abs() < 1e-10);
    }

    #[test]
    fn nested_regions_are_ordered() {
        let b = basis(2, 2.0, 3);
        let opts = QuadratureOptions::default();
        let small = ControlRegion::new(2, vec![RegionPiece::ball(vec![0.0, 0.0], 0.3)]).unwrap();
        let big = ControlRegion::new(
            2,
            vec![RegionPiece::Cuboid {
                lo: vec![-0.4, -0.4],
                hi: vec![0.4, 0.4],
            }],
        )
        .unwrap();
        let d = indicator_gram(&big, &b, &opts).unwrap() - indicator_gram(&small, &b, &opts).unwrap();
        let eig = SymmetricEigen::new(d);
        assert!(eig.eigenvalues.min() > -1e-9);
    }

    #[test]
    fn disk_region_norm_matches_gram() {
        let b = basis(2, 2.0, 5);
        let opts = QuadratureOptions::default();
        let disk = ControlRegion::new(2, vec![RegionPiece::ball(vec![-0.3, 0.4], 0.35)]).unwrap();
        let m = indicator_gram(&disk, &b, &opts).unwrap();
        let c = DVector::from_fn(25, |i, _| ((i as f64) * 0.7).cos());
        let u = SpectralField::new(b, c.clone()).unwrap();
        let q = region_norm(&u, &disk, &opts).unwrap();
        assert!((q * q - c.dot(&(&m * &c))).abs() < 1e-9);
    }

    #[test]
    fn degenerate_pieces_rejected() {
        assert!(ControlRegion::new(1, vec![RegionPiece::Cuboid { lo: vec![1.0], hi: vec![1.0] }]).is_err());
        assert!(ControlRegion::new(2, vec![RegionPiece::ball(vec![0.0, 0.0], 0.0)]).is_err());
    }
}
