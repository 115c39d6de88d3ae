use nullctl::exhaustion::{
    default_test_functions, run_exhaustion, uniform_bound_check, weak_convergence_diagnostic, ExhaustionReport,
};
use nullctl::spectral::{build_basis, BoxDomain};
use serde::Serialize;

use super::{check_initial, initial, positive_axis, results, Outcome, Setup};
use crate::config::ExhaustRun;
use crate::error::{AtKey, CliError};
use crate::output::{Cell, Table};

#[derive(Serialize)]
struct Results<'a> {
    reference_side: f64,
    reference_modes: usize,
    initial_norm: f64,
    uniform_bound: f64,
    uniform_passed: bool,
    weak_passed: bool,
    residual_allowance: Option<f64>,
    report: &'a ExhaustionReport,
}

pub fn run(cfg: &ExhaustRun, seed: u64) -> Result<Outcome, CliError> {
    let ex = &cfg.exhaust;
    let scales = positive_axis(&ex.scales, "exhaust.scales")?;
    if scales.len() < 3 {
        return Err(CliError::invalid("exhaust.scales", "the weak diagnostic needs at least 3 scales"));
    }
    if ex.test_functions < 5 {
        return Err(CliError::invalid("exhaust.test_functions", "the weak diagnostic needs at least 5 test functions"));
    }
    let side = ex.reference_side;
    if !(side >= scales[scales.len() - 1]) {
        return Err(CliError::invalid("exhaust.reference_side", "must contain the largest scale"));
    }
    let setup = Setup::new(&cfg.problem, seed, side)?;
    for &l in &scales {
        setup.spec(l)?;
    }
    let template = setup.template()?;
    let ref_modes = template.modes.modes(side).at("problem")?;
    check_initial(&cfg.initial, template.dim, ref_modes, side)?;
    let c = &cfg.check;
    for (key, v) in [
        ("check.uniform_fraction", c.uniform_fraction),
        ("check.weak_tolerance", c.weak_tolerance),
        ("check.residual_factor", c.residual_factor),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::invalid(key, "must be positive"));
        }
    }

    let domain = BoxDomain::new(template.dim, side).at("exhaust.reference_side")?;
    let reference = build_basis(domain, template.potential.clone(), ref_modes).at("exhaust.reference_side")?;
    let u = initial(&cfg.initial, &reference)?;
    let tests = default_test_functions(&template, ex.test_functions, 1.0).at("exhaust.test_functions")?;
    let report = run_exhaustion(&template, &u, &scales, &tests).at("exhaust")?;
    for r in &report.records {
        match &r.error {
            None => println!(
                "exhaust L={}: modes={} |f|={:.6e} residual={:.3e}",
                r.l,
                r.modes,
                r.control_norm.unwrap_or(f64::NAN),
                r.residual.unwrap_or(f64::NAN)
            ),
            Some(e) => println!("exhaust L={}: failed: {e}", r.l),
        }
    }

    let mut failures = Vec::new();
    for r in &report.records {
        if let Some(e) = &r.error {
            failures.push(format!("L={}: {e}", r.l));
        }
    }
    let (uniform_passed, uniform_bound) = uniform_bound_check(&report, c.uniform_fraction);
    if !uniform_passed {
        failures.push(format!("control norms not uniformly bounded within {}", c.uniform_fraction));
    }
    let weak_passed = weak_convergence_diagnostic(&report, c.weak_tolerance).at("check.weak_tolerance")?;
    if !weak_passed {
        failures.push(format!("weak pairings of the top scales above {:e}", c.weak_tolerance));
    }
    let allowance = report.limit.as_ref().map(|lim| c.residual_factor * u.norm() + lim.proxy_error);
    match (&report.limit, allowance) {
        (Some(lim), Some(a)) if lim.limit_residual_on_reference > a => failures.push(format!(
            "limit residual {:e} on the reference box above {a:e}",
            lim.limit_residual_on_reference
        )),
        (None, _) => failures.push("no scale produced a control".into()),
        _ => {}
    }

    let mut table = Table::new(&["side", "modes", "control_norm", "residual", "cost_estimate", "iterations", "error"]);
    for r in &report.records {
        table.push(vec![
            Cell::from(r.l),
            r.modes.into(),
            r.control_norm.into(),
            r.residual.into(),
            r.cost_estimate.into(),
            r.iterations.into(),
            r.error.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    Ok(Outcome {
        table,
        results: results(&Results {
            reference_side: side,
            reference_modes: ref_modes,
            initial_norm: u.norm(),
            uniform_bound,
            uniform_passed,
            weak_passed,
            residual_allowance: allowance,
            report: &report,
        }),
        failures,
    })
}
