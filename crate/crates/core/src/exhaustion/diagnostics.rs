use std::f64::consts::{PI, SQRT_2};

use nalgebra::DVector;
use serde::Serialize;

use super::run::{pairing_table, solve_scales, ExhaustionReport};
use super::template::ProblemTemplate;
use crate::control::{ProblemSpec, TimeSampledControl};
use crate::error::{Error, Result};
use crate::sets::ControlRegion;
use crate::spectral::{tensor, BoxDomain, PotentialSpec, SpectralField};

/// Empirical bound `c = max_n ‖f_n‖` and whether the second half of the
/// sequence spreads by less than `fraction` of its largest value. A failed
/// scale fails the check.
pub fn uniform_bound_check(report: &ExhaustionReport, fraction: f64) -> (bool, f64) {
    uniform_bound(&report.control_norms(), fraction)
}

pub fn uniform_bound(norms: &[Option<f64>], fraction: f64) -> (bool, f64) {
    let ok: Vec<f64> = norms.iter().flatten().copied().collect();
    let c = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if ok.is_empty() || ok.len() != norms.len() || !c.is_finite() {
        return (false, c);
    }
    let tail = &ok[ok.len() / 2..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    (spread < fraction, c)
}

/// Cauchy test in the weak topology: every `|⟨f_n - f_m, ψ_j⟩|` for the two
/// largest consecutive scale pairs is below `tolerance`.
pub fn weak_convergence_diagnostic(report: &ExhaustionReport, tolerance: f64) -> Result<bool> {
    weak_cauchy(&report.weak_convergence, tolerance)
}

pub(crate) fn weak_cauchy(table: &[Vec<Vec<Option<f64>>>], tolerance: f64) -> Result<bool> {
    let k = table.len();
    if k < 3 {
        return Err(Error::Precondition(format!("weak diagnostic needs at least 3 scales, got {k}")));
    }
    let tests = table[0][0].len();
    if tests < 5 {
        return Err(Error::Precondition(format!("weak diagnostic needs at least 5 test functions, got {tests}")));
    }
    Ok([(k - 3, k - 2), (k - 2, k - 1)]
        .iter()
        .all(|&(n, m)| table[n][m].iter().all(|v| matches!(v, Some(x) if x.abs() < tolerance))))
}

/// Scale-independent test functions on the box of side `inner` centred at
/// the origin: `a(s) φ_k` with `a ∈ {1, √2 cos(π s/T)}` and `φ_k` the low
/// modes of that box, taken in order of `k` then `a`.
pub fn default_test_functions(template: &ProblemTemplate, count: usize, inner: f64) -> Result<Vec<TimeSampledControl>> {
    let d = template.dim;
    let domain = BoxDomain::new(d, inner)?;
    let per_axis = count.div_ceil(2).max(1);
    let spec = ProblemSpec::new(
        domain,
        PotentialSpec::zero(d),
        ControlRegion::full(&domain),
        per_axis,
        template.grid.clone(),
    );
    let problem = spec.assemble()?;
    let horizon = template.grid.horizon();
    let n = problem.basis().len();
    // Along the first axis, lowest mode elsewhere.
    let flat = |k: usize| {
        let mut idx = vec![0; d];
        idx[0] = k;
        tensor::flatten(&idx, per_axis)
    };
    (0..count)
        .map(|i| {
            let (k, cosine) = (i / 2, i % 2 == 1);
            let e = flat(k);
            TimeSampledControl::from_fn(&problem, |s| {
                let a = if cosine { SQRT_2 * (PI * s / horizon).cos() } else { 1.0 };
                let mut v = DVector::zeros(n);
                v[e] = a;
                v
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackProbe {
    pub l: Vec<f64>,
    /// Per scale: `max_i ‖F_n u0_i‖ / ‖u0_i‖`.
    pub norm_estimates: Vec<Option<f64>>,
    /// Weak diagnostic per initial datum, when there are enough scales and
    /// test functions to run it.
    pub weak: Vec<Option<bool>>,
    /// `min_n` of the norm estimates, the finite stand-in for `liminf`.
    pub liminf_estimate: f64,
}

/// Applies the minimal-norm feedback of every scale to each datum.
pub fn feedback_convergence_probe(
    template: &ProblemTemplate,
    u0_list: &[SpectralField],
    l_seq: &[f64],
    tests: &[TimeSampledControl],
    tolerance: f64,
) -> Result<FeedbackProbe> {
    if u0_list.is_empty() {
        return Err(Error::config("u0", "need at least one initial datum"));
    }
    let mut estimates: Vec<Option<f64>> = vec![Some(0.0); l_seq.len()];
    let mut weak = Vec::with_capacity(u0_list.len());
    for u in u0_list {
        let outcomes = solve_scales(template, u, l_seq)?;
        for (est, o) in estimates.iter_mut().zip(&outcomes) {
            *est = match (*est, o.record.cost_estimate) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        let controls: Vec<_> = outcomes.into_iter().map(|o| o.control).collect();
        let table = pairing_table(&controls, tests, &template.quadrature)?;
        weak.push(weak_cauchy(&table, tolerance).ok());
    }
    let liminf_estimate = estimates.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    Ok(FeedbackProbe {
        l: l_seq.to_vec(),
        norm_estimates: estimates,
        weak,
        liminf_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let norms = [Some(0.9), Some(0.95), Some(0.93), Some(0.94)];
        assert_eq!(uniform_bound(&norms, 0.1), (true, 0.95));
        let doubling = [Some(1.0), Some(2.0), Some(4.0), Some(8.0)];
        assert_eq!(uniform_bound(&doubling, 0.1), (false, 8.0));
        assert!(!uniform_bound(&[Some(1.0), None, Some(1.0)], 0.1).0);
        assert_eq!(uniform_bound(&[Some(0.0); 3], 0.1), (true, 0.0));
    }

    fn table(rows: &[Vec<f64>]) -> Vec<Vec<Vec<Option<f64>>>> {
        let k = rows.len();
        (0..k)
            .map(|n| (0..k).map(|m| rows[n].iter().zip(&rows[m]).map(|(a, b)| Some(a - b)).collect()).collect())
            .collect()
    }

    #[test]
    fn weak_examples() {
        let same = table(&vec![vec![0.3, -1.0, 2.0, 0.0, 5.0]; 4]);
        assert!(weak_cauchy(&same, 1e-300).unwrap());
        let alternating: Vec<Vec<f64>> = (0..4).map(|n| vec![if n % 2 == 0 { 1.0 } else { -1.0 }; 5]).collect();
        assert!(!weak_cauchy(&table(&alternating), 0.5).unwrap());
        assert!(weak_cauchy(&table(&vec![vec![0.0; 5]; 2]), 1.0).is_err());
        assert!(weak_cauchy(&table(&vec![vec![0.0; 4]; 3]), 1.0).is_err());
        let mut failed = table(&vec![vec![0.0; 5]; 3]);
        failed[1][2][0] = None;
        assert!(!weak_cauchy(&failed, 1.0).unwrap());
    }
}
