//! Free heat evolution on the line by Gaussian-kernel quadrature.

use crate::quadrature::composite;

/// `(e^{tΔ} u0)(x)` for `u0` supported in `support`, evaluated at `points`.
pub fn evolve_1d(u0: impl Fn(f64) -> f64, support: (f64, f64), t: f64, points: &[f64]) -> Vec<f64> {
    let (a, b) = support;
    if t == 0.0 {
        return points.iter().map(|&x| if x > a && x < b { u0(x) } else { 0.0 }).collect();
    }
    let width = (b - a).max(1e-300);
    // Panels no wider than a fraction of the kernel width.
    let panels = ((width / (0.25 * (4.0 * t).sqrt())).ceil() as usize).clamp(8, 4096);
    let rule = composite(a, b, 16, panels);
    let norm = 1.0 / (4.0 * std::f64::consts::PI * t).sqrt();
    let samples: Vec<f64> = rule.nodes.iter().map(|&y| u0(y)).collect();
    points
        .iter()
        .map(|&x| {
            let mut s = 0.0;
            for ((y, w), f) in rule.nodes.iter().zip(&rule.weights).zip(&samples) {
                let r = x - y;
                s += w * f * (-r * r / (4.0 * t)).exp();
            }
            norm * s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_slab_matches_erf_free_identity() {
        // Total mass is conserved by the free heat flow.
        let xs: Vec<f64> = (0..4001).map(|i| -10.0 + 0.005 * i as f64).collect();
        let v = evolve_1d(|_| 1.0, (-0.5, 0.5), 0.3, &xs);
        let mass: f64 = v.iter().sum::<f64>() * 0.005;
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_time_returns_data() {
        let v = evolve_1d(|y| y * y, (-1.0, 1.0), 0.0, &[0.5, 2.0]);
        assert_eq!(v, vec![0.25, 0.0]);
    }
}
