use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::template::ProblemTemplate;
use crate::control::{cross_pairing, ControlProblem, TimeSampledControl};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureOptions;
use crate::spectral::{proxy_budget, SpectralBasis, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleRecord {
    pub l: f64,
    pub modes: usize,
    pub control_norm: Option<f64>,
    /// `‖u_n(T)‖` on `Λ_{L_n}`.
    pub residual: Option<f64>,
    /// `‖f_n‖ / ‖u0_n‖`, a lower estimate of the control cost at this scale.
    pub cost_estimate: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiagnostics {
    /// Scale whose control stands in for the limit.
    pub l: f64,
    pub limit_control_norm: f64,
    /// Final state on the reference box driven by the embedded control.
    pub limit_residual_on_reference: f64,
    pub reference_side: f64,
    /// Certified norm error of the reference box standing in for the whole space.
    pub proxy_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionReport {
    pub records: Vec<ScaleRecord>,
    /// `weak_convergence[n][m][j] = ⟨f_n - f_m, ψ_j⟩`, `None` where a scale failed.
    pub weak_convergence: Vec<Vec<Vec<Option<f64>>>>,
    pub limit: Option<LimitDiagnostics>,
    /// Reference-box distance of the final states when the smallest-scale
    /// control is reused on every box.
    pub strong_differences: Vec<Option<f64>>,
    #[serde(skip)]
    pub controls: Vec<Option<TimeSampledControl>>,
}

impl ExhaustionReport {
    pub fn control_norms(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.control_norm).collect()
    }
}

/// Final state on `target` of `u' + H u = gain · f` with `f` a control of
/// another problem, embedded through the cross-Gram of its region.
pub fn final_state_on(
    target: &Arc<SpectralBasis>,
    u0: &SpectralField,
    f: &TimeSampledControl,
    gain: f64,
    opts: &QuadratureOptions,
) -> Result<SpectralField> {
    if !target.same_space(u0.basis()) {
        return Err(Error::Precondition("initial state not on the target basis".into()));
    }
    let grid = f.grid();
    let horizon = grid.horizon();
    let mut acc = target.to_eigen(u0.coeffs()).component_mul(&target.decay(horizon));
    for (v, (&s, &w)) in f.embed_values(target, opts)?.iter().zip(grid.nodes().iter().zip(grid.weights())) {
        acc += target.to_eigen(v).component_mul(&target.decay(horizon - s)) * (w * gain);
    }
    SpectralField::new(target.clone(), target.from_eigen(&acc))
}

struct Scale {
    problem: ControlProblem,
    u0: SpectralField,
}

fn prepare(template: &ProblemTemplate, u_tilde: &SpectralField, l: f64) -> Result<Scale> {
    let problem = template.spec(l)?.assemble()?;
    let u0 = u_tilde.restrict(problem.basis())?;
    Ok(Scale { problem, u0 })
}

pub(crate) struct ScaleOutcome {
    pub record: ScaleRecord,
    pub control: Option<TimeSampledControl>,
}

pub(crate) fn solve_scales(template: &ProblemTemplate, u_tilde: &SpectralField, l_seq: &[f64]) -> Result<Vec<ScaleOutcome>> {
    if l_seq.is_empty() {
        return Err(Error::config("L", "need at least one scale"));
    }
    if l_seq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("L", "scales must be strictly increasing"));
    }
    if let Some(&l) = l_seq.iter().find(|&&l| l > u_tilde.basis().side()) {
        return Err(Error::config("L", format!("scale {l} exceeds the reference box {}", u_tilde.basis().side())));
    }
    Ok(l_seq
        .par_iter()
        .map(|&l| {
            let mut record = ScaleRecord {
                l,
                modes: template.modes.modes(l).unwrap_or(0),
                control_norm: None,
                residual: None,
                cost_estimate: None,
                iterations: None,
                error: None,
            };
            let solved = prepare(template, u_tilde, l).and_then(|s| {
                let nc = s.problem.min_norm_null_control(&s.u0)?;
                Ok((s, nc))
            });
            match solved {
                Ok((s, nc)) => {
                    let norm = nc.control.norm();
                    let u0n = s.u0.norm();
                    record.control_norm = Some(norm);
                    record.residual = Some(nc.residual_norm);
                    record.cost_estimate = Some(if u0n > 0.0 { norm / u0n } else { 0.0 });
                    record.iterations = Some(nc.iterations);
                    ScaleOutcome {
                        record,
                        control: Some(nc.control),
                    }
                }
                Err(e) => {
                    record.error = Some(e.to_string());
                    ScaleOutcome { record, control: None }
                }
            }
        })
        .collect())
}

pub(crate) fn pairing_table(
    controls: &[Option<TimeSampledControl>],
    tests: &[TimeSampledControl],
    opts: &QuadratureOptions,
) -> Result<Vec<Vec<Vec<Option<f64>>>>> {
    let p: Vec<Option<Vec<f64>>> = controls
        .par_iter()
        .map(|c| {
            c.as_ref()
                .map(|f| tests.iter().map(|psi| cross_pairing(f, psi, opts)).collect::<Result<Vec<f64>>>())
                .transpose()
        })
        .collect::<Result<_>>()?;
    let k = controls.len();
    Ok((0..k)
        .map(|n| {
            (0..k)
                .map(|m| {
                    (0..tests.len())
                        .map(|j| match (&p[n], &p[m]) {
                            (Some(a), Some(b)) => Some(a[j] - b[j]),
                            _ => None,
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// Minimal-norm null-controls on `Λ_{L_n}` for `u0 = ũ|_{Λ_{L_n}}`, their
/// weak pairings against `tests`, and validation of the largest-scale control
/// on the reference box carrying `ũ`.
///
/// Solver failures at one scale are recorded and the sweep continues.
pub fn run_exhaustion(
    template: &ProblemTemplate,
    u_tilde: &SpectralField,
    l_seq: &[f64],
    tests: &[TimeSampledControl],
) -> Result<ExhaustionReport> {
    let opts = template.quadrature;
    let outcomes = solve_scales(template, u_tilde, l_seq)?;
    let (records, controls): (Vec<_>, Vec<_>) = outcomes.into_iter().map(|o| (o.record, o.control)).unzip();
    let weak_convergence = pairing_table(&controls, tests, &opts)?;

    let reference = u_tilde.basis();
    let gain = template.gain;
    let limit = match controls.iter().rposition(|c| c.is_some()) {
        Some(k) => {
            let f = controls[k].as_ref().unwrap();
            let state = final_state_on(reference, u_tilde, f, gain, &opts)?;
            let norm = f.norm();
            let scale = u_tilde.norm() + gain.abs() * template.grid.horizon().sqrt() * norm;
            let v_minus = reference.potential().neg_part_bound();
            let budget = proxy_budget(reference.dim(), template.grid.horizon(), reference.side(), v_minus, 1.0);
            Some(LimitDiagnostics {
                l: l_seq[k],
                limit_control_norm: norm,
                limit_residual_on_reference: state.norm(),
                reference_side: reference.side(),
                proxy_error: budget.sqrt() * scale,
            })
        }
        None => None,
    };

    let strong_differences = strong_input_differences(template, u_tilde, l_seq, &controls)?;
    Ok(ExhaustionReport {
        records,
        weak_convergence,
        limit,
        strong_differences,
        controls,
    })
}

/// Reuses the smallest-scale control on every box and measures how far the
/// box final state is from the reference one.
fn strong_input_differences(
    template: &ProblemTemplate,
    u_tilde: &SpectralField,
    l_seq: &[f64],
    controls: &[Option<TimeSampledControl>],
) -> Result<Vec<Option<f64>>> {
    let Some(f) = controls.first().and_then(|c| c.as_ref()) else {
        return Ok(vec![None; l_seq.len()]);
    };
    let opts = template.quadrature;
    let reference = u_tilde.basis();
    let whole = final_state_on(reference, u_tilde, f, template.gain, &opts)?;
    l_seq
        .par_iter()
        .map(|&l| {
            let spec = template.spec(l)?;
            let basis = crate::spectral::build_basis(spec.domain, spec.potential.clone(), spec.modes)?;
            let u0 = u_tilde.restrict(&basis)?;
            let local = final_state_on(&basis, &u0, f, template.gain, &opts)?.embed(reference)?;
            Ok(Some(whole.sub(&local)?.norm()))
        })
        .collect()
}
