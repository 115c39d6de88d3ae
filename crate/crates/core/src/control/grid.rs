use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, lagrange_weights, mapped};

/// A quadrature node of a partial time integral, with the Lagrange weights
/// that interpolate grid samples to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubNode {
    pub time: f64,
    pub weight: f64,
    pub interp: Vec<(usize, f64)>,
}

/// Composite Gauss–Legendre rule on `[0, T]` with `M` equal intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    intervals: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TimeGrid {
    pub fn new(horizon: f64, intervals: usize, order: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::config("horizon", format!("T must be positive, got {horizon}")));
        }
        if intervals == 0 {
            return Err(Error::config("intervals", "need at least one time interval"));
        }
        if order == 0 {
            return Err(Error::config("order", "time quadrature order must be at least 1"));
        }
        let reference = gauss_legendre(order);
        let h = horizon / intervals as f64;
        let mut nodes = Vec::with_capacity(intervals * order);
        let mut weights = Vec::with_capacity(intervals * order);
        for i in 0..intervals {
            let r = mapped(&reference, i as f64 * h, (i + 1) as f64 * h);
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Ok(Self {
            horizon,
            intervals,
            order,
            nodes,
            weights,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature for `∫_0^t` built from whole intervals plus a Gauss rule
    /// on the partial interval, whose samples are interpolated from that
    /// interval's nodes.
    pub fn partial(&self, t: f64) -> Result<Vec<SubNode>> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Precondition(format!("time {t} outside [0, {}]", self.horizon)));
        }
        let h = self.horizon / self.intervals as f64;
        let q = self.order;
        let full = ((t / h).floor() as usize).min(self.intervals);
        let mut out: Vec<SubNode> = (0..full * q)
            .map(|j| SubNode {
                time: self.nodes[j],
                weight: self.weights[j],
                interp: vec![(j, 1.0)],
            })
            .collect();
        let start = full as f64 * h;
        if full < self.intervals && t > start {
            let idx: Vec<usize> = (full * q..(full + 1) * q).collect();
            let local: Vec<f64> = idx.iter().map(|&j| self.nodes[j]).collect();
            let r = mapped(&gauss_legendre(q), start, t);
            for (&s, &w) in r.nodes.iter().zip(&r.weights) {
                let l = lagrange_weights(&local, s);
                out.push(SubNode {
                    time: s,
                    weight: w,
                    interp: idx.iter().copied().zip(l).collect(),
                });
            }
        }
        Ok(out)
    }
}
