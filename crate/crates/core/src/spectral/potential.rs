use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sine::self_overlap;
use super::tensor::kron;
use crate::error::{Error, Result};

/// Piecewise constant function of one variable: `values[i]` on
/// `[edges[i], edges[i+1])`, `outside` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piecewise1d {
    #[serde(default)]
    pub edges: Vec<f64>,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub outside: f64,
}

impl Piecewise1d {
    pub fn constant(c: f64) -> Self {
        Self {
            edges: Vec::new(),
            values: Vec::new(),
            outside: c,
        }
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !self.outside.is_finite() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(key, "potential values must be finite"));
        }
        if self.edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::config(key, "edges must be finite"));
        }
        if self.edges.is_empty() {
            if !self.values.is_empty() {
                return Err(Error::config(key, "values given without edges"));
            }
            return Ok(());
        }
        if self.values.len() + 1 != self.edges.len() {
            return Err(Error::config(
                key,
                format!("{} edges need {} values, got {}", self.edges.len(), self.edges.len() - 1, self.values.len()),
            ));
        }
        if self.edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config(key, "edges must be strictly increasing"));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.edges.len() < 2 || x < self.edges[0] || x >= *self.edges.last().unwrap() {
            return self.outside;
        }
        let i = self.edges.partition_point(|&e| e <= x) - 1;
        self.values[i]
    }

    fn max(&self) -> f64 {
        self.values.iter().copied().fold(self.outside, f64::max)
    }

    fn min(&self) -> f64 {
        self.values.iter().copied().fold(self.outside, f64::min)
    }

    fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.outside)
    }

    /// `∫ v φ_k φ_m` over the box.
    fn galerkin(&self, side: f64, n: usize) -> DMatrix<f64> {
        let h = 0.5 * side;
        let mut out = DMatrix::identity(n, n) * self.outside;
        for (i, &v) in self.values.iter().enumerate() {
            let (lo, hi) = (self.edges[i], self.edges[i + 1]);
            if v != self.outside && hi > -h && lo < h {
                out += self_overlap(side, n, lo, hi) * (v - self.outside);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialKind {
    Zero,
    /// `V(x) = Σ_i v_i(x_i)`.
    Separable(Vec<Piecewise1d>),
    /// Cell values on a regular grid over `[lo, hi]`, zero outside. Row-major.
    Grid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<usize>,
        values: Vec<f64>,
    },
}

/// A bounded potential together with its sup norm and a bound on its negative part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    dim: usize,
    kind: PotentialKind,
    sup_norm: f64,
    neg_part_bound: f64,
}

impl PotentialSpec {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kind: PotentialKind::Zero,
            sup_norm: 0.0,
            neg_part_bound: 0.0,
        }
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        let mut axes = vec![Piecewise1d::constant(0.0); dim];
        axes[0] = Piecewise1d::constant(c);
        Self::separable(axes)
    }

    pub fn separable(axes: Vec<Piecewise1d>) -> Result<Self> {
        let dim = axes.len();
        if dim == 0 {
            return Err(Error::config("potential.axes", "at least one axis required"));
        }
        for (i, a) in axes.iter().enumerate() {
            a.validate(&format!("potential.axes[{i}]"))?;
        }
        let sup_norm = axes.iter().map(|a| a.max().abs().max(a.min().abs())).sum();
        let neg_part_bound = axes.iter().map(|a| (-a.min()).max(0.0)).sum();
        Ok(Self {
            dim,
            kind: PotentialKind::Separable(axes),
            sup_norm,
            neg_part_bound,
        })
    }

    pub fn grid(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dim = cells.len();
        if dim == 0 || lo.len() != dim || hi.len() != dim {
            return Err(Error::config("potential.grid", "lo, hi and cells must have the same nonzero length"));
        }
        if dim > 2 {
            return Err(Error::config("potential.grid", "grid potentials support dimension 1 or 2"));
        }
        if cells.iter().any(|&c| c == 0) {
            return Err(Error::config("potential.grid.cells", "cell counts must be positive"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::config("potential.grid", "need finite lo < hi on every axis"));
        }
        let n: usize = cells.iter().product();
        if values.len() != n {
            return Err(Error::config(
                "potential.grid.values",
                format!("expected {n} values for the cell grid, got {}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("potential.grid.values", "values must be finite"));
        }
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let neg_part_bound = values.iter().fold(0.0f64, |m, &v| m.max(-v));
        Ok(Self {
            dim,
            kind: PotentialKind::Grid { lo, hi, cells, values },
            sup_norm,
            neg_part_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn neg_part_bound(&self) -> f64 {
        self.neg_part_bound
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Separable(axes) => axes.iter().all(|a| a.is_constant() && a.outside == 0.0),
            PotentialKind::Grid { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// The constant value when `V` is constant on all of space.
    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(0.0),
            PotentialKind::Separable(axes) => {
                if axes.iter().all(Piecewise1d::is_constant) {
                    Some(axes.iter().map(|a| a.outside).sum())
                } else {
                    None
                }
            }
            PotentialKind::Grid { values, .. } => values.iter().all(|&v| v == 0.0).then_some(0.0),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Separable(axes) => axes.iter().zip(x).map(|(a, &xi)| a.eval(xi)).sum(),
            PotentialKind::Grid { lo, hi, cells, values } => {
                let mut flat = 0;
                for i in 0..self.dim {
                    if x[i] < lo[i] || x[i] >= hi[i] {
                        return 0.0;
                    }
                    let c = (((x[i] - lo[i]) / (hi[i] - lo[i])) * cells[i] as f64) as usize;
                    flat = flat * cells[i] + c.min(cells[i] - 1);
                }
                values[flat]
            }
        }
    }

    /// Galerkin matrix `∫ V φ_k φ_m` in the tensor sine basis with `n` modes per axis.
    pub(crate) fn galerkin_matrix(&self, side: f64, n: usize) -> DMatrix<f64> {
        let total = n.pow(self.dim as u32);
        match &self.kind {
            PotentialKind::Zero => DMatrix::zeros(total, total),
            PotentialKind::Separable(axes) => {
                let eye = DMatrix::identity(n, n);
                let mut out = DMatrix::zeros(total, total);
                for (axis, a) in axes.iter().enumerate() {
                    let g = a.galerkin(side, n);
                    let mats: Vec<&DMatrix<f64>> = (0..self.dim).map(|i| if i == axis { &g } else { &eye }).collect();
                    out += kron(&mats);
                }
                out
            }
            PotentialKind::Grid { lo, hi, cells, values } => {
                let axis_mats: Vec<Vec<DMatrix<f64>>> = (0..self.dim)
                    .map(|i| {
                        let h = (hi[i] - lo[i]) / cells[i] as f64;
                        (0..cells[i])
                            .map(|c| self_overlap(side, n, lo[i] + c as f64 * h, lo[i] + (c + 1) as f64 * h))
                            .collect()
                    })
                    .collect();
                if self.dim == 1 {
                    let mut out = DMatrix::zeros(n, n);
                    for (c, v) in values.iter().enumerate() {
                        out += &axis_mats[0][c] * *v;
                    }
                    out
                } else {
                    let mut out = DMatrix::zeros(total, total);
                    for c0 in 0..cells[0] {
                        let mut inner = DMatrix::zeros(n, n);
                        for c1 in 0..cells[1] {
                            let v = values[c0 * cells[1] + c1];
                            if v != 0.0 {
                                inner += &axis_mats[1][c1] * v;
                            }
                        }
                        out += kron(&[&axis_mats[0][c0], &inner]);
                    }
                    out
                }
            }
        }
    }
}
