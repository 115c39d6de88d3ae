//! Closed-form cost and approximation bounds.
//!
//! Large bounds are evaluated in log space. Anything beyond the `f64` range
//! comes back as `+inf` with `overflow` set, so sweeps never abort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    /// Natural log of the exact value (finite even when `value` overflows).
    pub log_value: f64,
    pub overflow: bool,
}

impl BoundValue {
    pub fn from_log(log_value: f64) -> Self {
        let value = log_value.exp();
        let overflow = !value.is_finite();
        Self {
            value: if overflow { f64::INFINITY } else { value },
            log_value,
            overflow,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be positive and finite, got {x}")))
    }
}

fn nonnegative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be nonnegative, got {x}")))
    }
}

fn check_equidistributed(g: f64, delta: f64) -> Result<()> {
    positive("G", g)?;
    positive("delta", delta)?;
    if delta > 0.5 * g {
        return Err(Error::Precondition(format!("delta = {delta} must not exceed G/2 = {}", 0.5 * g)));
    }
    Ok(())
}

/// Parameters of the thick-set and equidistributed-set cost bounds.
///
/// `k` and `n` stand for unspecified universal constants. Their defaults of 1
/// are illustrative only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostBoundInputs {
    pub d: usize,
    pub t: f64,
    pub gamma: f64,
    pub a: Vec<f64>,
    pub g: f64,
    pub delta: f64,
    pub v_sup: f64,
    pub e: f64,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "one")]
    pub n: f64,
    /// Threshold time of the equidistributed cost bound, if known.
    #[serde(default)]
    pub t_prime: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl CostBoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::config("d", "dimension must be at least 1"));
        }
        if self.a.len() != self.d {
            return Err(Error::config("a", format!("need {} window sides, got {}", self.d, self.a.len())));
        }
        let wrap = |key: &str, r: Result<()>| r.map_err(|e| Error::config(key, e.to_string()));
        wrap("t", positive("T", self.t))?;
        wrap("gamma", positive("gamma", self.gamma))?;
        if self.gamma > 1.0 {
            return Err(Error::config("gamma", "gamma must lie in (0, 1]"));
        }
        for &ai in &self.a {
            wrap("a", positive("a_i", ai))?;
        }
        wrap("delta", check_equidistributed(self.g, self.delta))?;
        wrap("v_sup", nonnegative("V_sup", self.v_sup))?;
        wrap("e", nonnegative("E", self.e))?;
        wrap("k", positive("K", self.k))?;
        wrap("n", positive("N", self.n))?;
        Ok(())
    }

    /// True when a threshold time is given and `T` exceeds it.
    pub fn beyond_threshold_time(&self) -> bool {
        self.t_prime.is_some_and(|tp| self.t > tp)
    }
}

/// Cost bound for thick control sets: `K̃^{1/2} exp(K̃ / (2T))` with
/// `K̃ = (K^d / γ)^{K (d + |a|_1)}`.
pub fn ev_cost_bound(gamma: f64, a: &[f64], d: usize, t: f64, k: f64) -> Result<BoundValue> {
    positive("gamma", gamma)?;
    if gamma > 1.0 {
        return Err(Error::Precondition(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    positive("T", t)?;
    positive("K", k)?;
    if a.len() != d || d == 0 {
        return Err(Error::DimensionMismatch { expected: d, found: a.len() });
    }
    for &ai in a {
        positive("a_i", ai)?;
    }
    let a1: f64 = a.iter().sum();
    let log_kt = k * (d as f64 + a1) * (d as f64 * k.ln() - gamma.ln());
    let kt = log_kt.exp();
    Ok(BoundValue::from_log(0.5 * log_kt + kt / (2.0 * t)))
}

/// Spectral inequality constant `(δ/G)^{N(1 + G^{4/3} V^{2/3} + G sqrt(E))}`.
pub fn sfuc_constant(d: usize, n: f64, delta: f64, g: f64, e: f64, v_sup: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    check_equidistributed(g, delta)?;
    positive("N", n)?;
    nonnegative("E", e)?;
    nonnegative("V_sup", v_sup)?;
    let exponent = n * (1.0 + g.powf(4.0 / 3.0) * v_sup.powf(2.0 / 3.0) + g * e.sqrt());
    Ok((delta / g).powf(exponent))
}

/// `c_* = (ln(G/δ))² (N G + 4/ln 2)²`.
pub fn nttv_c_star(g: f64, delta: f64, n: f64) -> Result<f64> {
    check_equidistributed(g, delta)?;
    positive("N", n)?;
    let l = (g / delta).ln();
    let m = n * g + 4.0 / std::f64::consts::LN_2;
    Ok(l * l * m * m)
}

/// Cost bound for equidistributed sets:
/// `2 e^{V} (G/δ)^{N(1 + G^{4/3} V^{2/3})/2} e^{c_*/T}`.
pub fn nttv_cost_bound(g: f64, delta: f64, v_sup: f64, t: f64, n: f64, d: usize) -> Result<BoundValue> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    positive("T", t)?;
    nonnegative("V_sup", v_sup)?;
    let c_star = nttv_c_star(g, delta, n)?;
    let power = n * (1.0 + g.powf(4.0 / 3.0) * v_sup.powf(2.0 / 3.0)) / 2.0;
    let log = std::f64::consts::LN_2 + v_sup + power * (g / delta).ln() + c_star / t;
    Ok(BoundValue::from_log(log))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemigroupBound {
    /// The constant `C(t, d, V_-)`.
    pub constant: f64,
    /// Bound for the inside difference and for the outside tail.
    pub part_ab: f64,
    /// Bound for the total difference (twice `part_ab`).
    pub part_c: f64,
}

/// `(c0, c1)` of the crude estimate `‖e^{-tH(0,-2V_-)}‖_{1→1} ≤ e^{2t‖V_-‖}`.
pub fn crude_growth_constants(v_minus_sup: f64) -> (f64, f64) {
    (1.0, 2.0 * v_minus_sup)
}

pub fn semigroup_constant(t: f64, d: usize, v_minus_sup: f64, c0: f64, c1: f64) -> f64 {
    let base = 2.0 * d as f64;
    if v_minus_sup == 0.0 {
        base
    } else {
        base * c0 * (t * c1).exp()
    }
}

/// `C exp(-L²/(32 t))`, with the doubled variant for the total difference.
pub fn semigroup_bound(t: f64, d: usize, l: f64, v_minus_sup: f64, c0: f64, c1: f64) -> Result<SemigroupBound> {
    positive("t", t)?;
    positive("L", l)?;
    nonnegative("V_minus_sup", v_minus_sup)?;
    let constant = semigroup_constant(t, d, v_minus_sup, c0, c1);
    let part_ab = constant * (-l * l / (32.0 * t)).exp();
    Ok(SemigroupBound {
        constant,
        part_ab,
        part_c: 2.0 * part_ab,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitBound {
    pub raw: f64,
    pub clamped: f64,
}

/// `2d exp(-L²/(32t))`, raw and clamped to a probability.
pub fn brownian_exit_bound(d: usize, l: f64, t: f64) -> Result<ExitBound> {
    positive("t", t)?;
    positive("L", l)?;
    let raw = 2.0 * d as f64 * (-l * l / (32.0 * t)).exp();
    Ok(ExitBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}
