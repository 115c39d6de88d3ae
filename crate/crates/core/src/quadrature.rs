//! Composite Gauss–Legendre rules.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

/// Order and panel count of a composite rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOptions {
    pub order: usize,
    pub panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            order: 8,
            panels: 4,
        }
    }
}

/// Nodes and weights on a bounded interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// Gauss–Legendre nodes on [-1, 1] in ascending order.
pub fn gauss_legendre(order: usize) -> Rule {
    let order = NonZeroUsize::new(order.max(1)).unwrap();
    let mut pairs: Vec<(f64, f64)> = if order.get() == 1 {
        vec![(0.0, 2.0)]
    } else {
        GaussLegendre::new(order)
            .as_node_weight_pairs()
            .to_vec()
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Single Gauss–Legendre panel mapped to [a, b].
pub fn mapped(reference: &Rule, a: f64, b: f64) -> Rule {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Rule {
        nodes: reference.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: reference.weights.iter().map(|&w| half * w).collect(),
    }
}

/// `panels` equal panels on [a, b].
pub fn composite(a: f64, b: f64, order: usize, panels: usize) -> Rule {
    composite_with_breaks(&[a, b], order, panels)
}

/// Equal panels on each segment between consecutive break points.
/// Segments of zero length are skipped.
pub fn composite_with_breaks(breaks: &[f64], order: usize, panels_per_segment: usize) -> Rule {
    let reference = gauss_legendre(order);
    let panels = panels_per_segment.max(1);
    let mut rule = Rule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if !(b > a) {
            continue;
        }
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let hi = if p + 1 == panels { b } else { lo + h };
            rule.extend(mapped(&reference, lo, hi));
        }
    }
    rule
}

/// Panels of width at most `max_width`, aligned with every break point.
pub fn composite_max_width(breaks: &[f64], order: usize, max_width: f64) -> Rule {
    let reference = gauss_legendre(order);
    let mut rule = Rule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if !(b > a) {
            continue;
        }
        let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let hi = if p + 1 == panels { b } else { lo + h };
            rule.extend(mapped(&reference, lo, hi));
        }
    }
    rule
}

/// Lagrange basis weights at `x` for the given distinct nodes.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            let mut l = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if j != i {
                    l *= (x - xj) / (nodes[i] - xj);
                }
            }
            l
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_is_exact_for_polynomials() {
        for order in 1..=12 {
            let r = gauss_legendre(order);
            assert_eq!(r.len(), order);
            for deg in 0..(2 * order) {
                let got = r.integrate(|x| x.powi(deg as i32));
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "order {order} deg {deg}");
            }
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn composite_weights_sum_to_length() {
        let r = composite(-1.5, 2.0, 4, 7);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 3.5).abs() < 1e-14);
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn composite_integrates_oscillatory() {
        let r = composite(0.0, 3.0, 16, 8);
        let got = r.integrate(|x| (5.0 * x).sin());
        let exact = (1.0 - (15.0f64).cos()) / 5.0;
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn breaks_are_respected() {
        let r = composite_max_width(&[-2.0, -0.5, 0.5, 2.0], 3, 0.6);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 4.0).abs() < 1e-14);
        let got = r.integrate(|x| if x.abs() < 0.5 { 1.0 } else { 0.0 });
        assert!((got - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lagrange_reproduces_cubic() {
        let nodes = [0.1, 0.4, 0.7, 0.95];
        let f = |x: f64| 1.0 - 2.0 * x + x * x * x;
        let w = lagrange_weights(&nodes, 0.55);
        let got: f64 = w.iter().zip(&nodes).map(|(w, &x)| w * f(x)).sum();
        assert!((got - f(0.55)).abs() < 1e-14);
    }
}
