//! One-dimensional Dirichlet sine modes and their exact overlap integrals.
//!
//! Mode `k >= 1` on a box of side `l` is `sqrt(2/l) sin(k pi (x + l/2) / l)`,
//! extended by zero outside `(-l/2, l/2)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

pub fn eigenvalue(side: f64, k: usize) -> f64 {
    let w = k as f64 * PI / side;
    w * w
}

pub fn mode(side: f64, k: usize, x: f64) -> f64 {
    let h = 0.5 * side;
    if x <= -h || x >= h {
        return 0.0;
    }
    (2.0 / side).sqrt() * (k as f64 * PI * (x + h) / side).sin()
}

/// Values of modes `1..=n` at `x`.
pub fn modes(side: f64, n: usize, x: f64) -> Vec<f64> {
    (1..=n).map(|k| mode(side, k, x)).collect()
}

/// `points.len() x n` matrix of mode values.
pub fn mode_matrix(side: f64, n: usize, points: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), n, |i, k| mode(side, k + 1, points[i]))
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `cos(theta + j pi / 2)` without rounding the quarter turns.
fn cos_quarter(theta: f64, j: i64) -> f64 {
    match j.rem_euclid(4) {
        0 => theta.cos(),
        1 => -theta.sin(),
        2 => -theta.cos(),
        _ => theta.sin(),
    }
}

/// `∫_lo^hi cos(alpha x + j pi/2) dx`, stable as `alpha -> 0`.
fn cos_integral(alpha: f64, j: i64, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (hi - lo) * cos_quarter(alpha * mid, j) * sinc(alpha * half)
}

/// `∫_lo^hi φ^A_k φ^B_m dx` for `k in 1..=na`, `m in 1..=nb`, where `A` and
/// `B` are centered boxes of sides `side_a`, `side_b`. The interval is clipped
/// to both supports.
pub fn overlap_matrix(side_a: f64, na: usize, side_b: f64, nb: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let h = 0.5 * side_a.min(side_b);
    let lo = lo.max(-h);
    let hi = hi.min(h);
    let mut out = DMatrix::zeros(na, nb);
    if !(hi > lo) {
        return out;
    }
    let scale = 1.0 / (side_a * side_b).sqrt();
    for m in 1..=nb {
        let c = m as f64 * PI / side_b;
        for k in 1..=na {
            let a = k as f64 * PI / side_a;
            let j_diff = k as i64 - m as i64;
            let j_sum = k as i64 + m as i64;
            out[(k - 1, m - 1)] =
                scale * (cos_integral(a - c, j_diff, lo, hi) - cos_integral(a + c, j_sum, lo, hi));
        }
    }
    out
}

/// Overlap of the basis with itself on `[lo, hi]`.
pub fn self_overlap(side: f64, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let mut m = overlap_matrix(side, n, side, n, lo, hi);
    m = (&m + m.transpose()) * 0.5;
    m
}
