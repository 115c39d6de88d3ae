use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::brownian_exit_bound;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub start_points: Vec<Vec<f64>>,
    /// Add the analytic Brownian-bridge crossing probability per step.
    #[serde(default = "yes")]
    pub bridge: bool,
}

fn yes() -> bool {
    true
}

impl McConfig {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64, start_points: Vec<Vec<f64>>) -> Self {
        Self {
            n_paths,
            n_steps,
            seed,
            start_points,
            bridge: true,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if self.n_paths < 1000 {
            return Err(Error::config("n_paths", format!("need at least 1000 paths, got {}", self.n_paths)));
        }
        if self.n_steps < 100 {
            return Err(Error::config("n_steps", format!("need at least 100 steps, got {}", self.n_steps)));
        }
        let Some(first) = self.start_points.first() else {
            return Err(Error::config("start_points", "no start points"));
        };
        let d = first.len();
        if d == 0 || self.start_points.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::config("start_points", "start points must share a positive dimension and be finite"));
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McPoint {
    pub start: Vec<f64>,
    pub estimate: f64,
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub d: usize,
    /// Worst case over start points.
    pub estimate: f64,
    pub ci_halfwidth: f64,
    /// Index of the worst start point.
    pub worst: usize,
    pub per_point: Vec<McPoint>,
    /// `2d exp(-L²/(32t))`.
    pub bound: f64,
}

fn path_rng(seed: u64, start: usize, path: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(start as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(path as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Probability that a Brownian bridge from `x0` to `x1` over time `dt`
/// leaves `(-h, h)`, to first order in the two faces.
fn bridge_exit(x0: f64, x1: f64, h: f64, dt: f64) -> f64 {
    let up = (-2.0 * (h - x0) * (h - x1) / dt).exp();
    let down = (-2.0 * (h + x0) * (h + x1) / dt).exp();
    (up + down).min(1.0)
}

/// Conditional probability of the event given the sampled path, so each
/// path contributes a value in `[0, 1]` rather than a bare indicator.
fn path_value(x0: &[f64], r: f64, l: f64, t: f64, steps: usize, bridge: bool, rng: &mut ChaCha8Rng) -> f64 {
    let dt = t / steps as f64;
    let sd = dt.sqrt();
    let (hr, hl) = (0.5 * r, 0.5 * l);
    let mut x = x0.to_vec();
    let mut exited = x.iter().any(|v| v.abs() >= hl);
    let mut stay = 1.0;
    for _ in 0..steps {
        for xi in x.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            let next = *xi + sd * z;
            if !exited {
                if next.abs() >= hl {
                    exited = true;
                } else if bridge {
                    stay *= 1.0 - bridge_exit(*xi, next, hl, dt);
                }
            }
            *xi = next;
        }
    }
    if x.iter().any(|v| v.abs() >= hr) {
        return 0.0;
    }
    if exited {
        1.0
    } else {
        1.0 - stay
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Monte Carlo estimate of `P_x{b_t ∈ Λ_R, b_s ∉ Λ_L for some s ≤ t}`
/// for standard Brownian motion, worst case over the start points.
///
/// The half-width is three standard errors, floored at `3 / n_paths` so a
/// run with no events still reports a nonzero interval.
pub fn mc_exit_probability(r: f64, l: f64, t: f64, cfg: &McConfig) -> Result<McEstimate> {
    let d = cfg.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::config("R", format!("must be positive, got {r}")));
    }
    if !(l >= 2.0 * r && l.is_finite()) {
        return Err(Error::config("L", format!("L = {l} must be at least 2R = {}", 2.0 * r)));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::config("t", format!("must be positive, got {t}")));
    }
    let bound = brownian_exit_bound(d, l, t)?.raw;
    let n = cfg.n_paths as f64;
    let per_point: Vec<McPoint> = cfg
        .start_points
        .iter()
        .enumerate()
        .map(|(si, x0)| {
            let values: Vec<f64> = (0..cfg.n_paths)
                .into_par_iter()
                .map(|p| path_value(x0, r, l, t, cfg.n_steps, cfg.bridge, &mut path_rng(cfg.seed, si, p)))
                .collect();
            let mean = pairwise_sum(&values) / n;
            let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
            let var = pairwise_sum(&sq) / (n - 1.0);
            McPoint {
                start: x0.clone(),
                estimate: mean,
                ci_halfwidth: (3.0 * (var / n).sqrt()).max(3.0 / n),
            }
        })
        .collect();
    let worst = (0..per_point.len())
        .max_by(|&a, &b| {
            let ka = per_point[a].estimate + per_point[a].ci_halfwidth;
            let kb = per_point[b].estimate + per_point[b].ci_halfwidth;
            ka.total_cmp(&kb).then(b.cmp(&a))
        })
        .unwrap();
    Ok(McEstimate {
        d,
        estimate: per_point[worst].estimate,
        ci_halfwidth: per_point[worst].ci_halfwidth,
        worst,
        per_point,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(paths: usize, d: usize) -> McConfig {
        McConfig::new(paths, 200, 7, vec![vec![0.0; d]])
    }

    #[test]
    fn far_box_gives_zero_with_floor() {
        let e = mc_exit_probability(1.0, 100.0, 1.0, &cfg(2000, 1)).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert!((e.ci_halfwidth - 3.0 / 2000.0).abs() < 1e-18);
    }

    #[test]
    fn bound_dominates() {
        let e = mc_exit_probability(1.0, 8.0, 1.0, &cfg(5000, 1)).unwrap();
        assert!((e.bound - 2.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(e.estimate + e.ci_halfwidth <= e.bound);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let c = McConfig::new(3000, 100, 42, vec![vec![0.0, 0.1], vec![0.2, -0.3]]);
        let a = mc_exit_probability(1.0, 4.0, 1.0, &c).unwrap();
        let b = mc_exit_probability(1.0, 4.0, 1.0, &c).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn matches_reflection_principle_in_one_dimension() {
        // For a start at 0 the event is, up to a negligible double-crossing
        // term, "end in (-1/2, 1/2) after touching ±2", which by reflection
        // has probability P(b_1 ∈ (3.5, 4.5)) + P(b_1 ∈ (-4.5, -3.5)).
        let phi = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
        let want = 2.0 * (phi(4.5) - phi(3.5));
        let e = mc_exit_probability(1.0, 4.0, 1.0, &McConfig::new(200_000, 200, 3, vec![vec![0.0]])).unwrap();
        assert!((e.estimate - want).abs() <= e.ci_halfwidth, "{} vs {want}", e.estimate);
    }

    #[test]
    fn bridge_correction_raises_estimate() {
        let mut c = McConfig::new(20_000, 100, 11, vec![vec![0.0]]);
        let with = mc_exit_probability(1.0, 4.0, 1.0, &c).unwrap().estimate;
        c.bridge = false;
        let without = mc_exit_probability(1.0, 4.0, 1.0, &c).unwrap().estimate;
        assert!(with > without);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            mc_exit_probability(1.0, 4.0, 1.0, &cfg(10, 1)),
            Err(Error::Config { .. })
        ));
        assert!(mc_exit_probability(1.0, 1.5, 1.0, &cfg(1000, 1)).is_err());
        let mut c = cfg(1000, 1);
        c.n_steps = 10;
        assert!(c.validate().is_err());
    }
}
