use nullctl::semigroup_approx::{semigroup_diff, DiffOptions, SemigroupDiff};
use nullctl::spectral::{build_basis, BoxDomain, PotentialSpec};

use super::{check_initial, dims, initial, positive_axis, results, Outcome};
use crate::config::SemigroupRun;
use crate::error::{AtKey, CliError};
use crate::output::{Cell, Table};

pub fn run(cfg: &SemigroupRun) -> Result<Outcome, CliError> {
    let s = &cfg.semigroup;
    let dims = dims(&s.dims, "semigroup.dims")?;
    let times = positive_axis(&s.times, "semigroup.times")?;
    let sides = positive_axis(&s.sides, "semigroup.sides")?;
    let r = s.support_side;
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::invalid("semigroup.support_side", "must be positive"));
    }
    if sides[0] < 2.0 * r {
        return Err(CliError::invalid("semigroup.sides", format!("every side must be at least 2R = {}", 2.0 * r)));
    }
    if !(s.ref_factor >= 4.0 && s.ref_factor.is_finite()) {
        return Err(CliError::invalid("semigroup.ref_factor", "must be at least 4"));
    }
    if s.modes == 0 {
        return Err(CliError::invalid("semigroup.modes", "must be at least 1"));
    }
    if let Some(rho) = s.modes_per_unit {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(CliError::invalid("semigroup.modes_per_unit", "must be positive"));
        }
    }
    for &d in &dims {
        check_initial(&cfg.initial, d, s.modes, r)?;
    }
    let c = &cfg.check;
    if !(c.max_gap >= 0.0) {
        return Err(CliError::invalid("check.max_gap", "must be nonnegative"));
    }
    let opts = DiffOptions {
        ref_factor: s.ref_factor,
        modes_per_unit: s.modes_per_unit,
    };

    let mut rows: Vec<SemigroupDiff> = Vec::new();
    let mut failures = Vec::new();
    for &d in &dims {
        let basis = build_basis(BoxDomain::new(d, r).at("semigroup.support_side")?, PotentialSpec::zero(d), s.modes)
            .at("semigroup")?;
        let u0 = initial(&cfg.initial, &basis)?;
        for &t in &times {
            let mut last = f64::INFINITY;
            for &l in &sides {
                let p = semigroup_diff(&u0, t, l, opts).at(&format!("semigroup[d={d}, t={t}, L={l}]"))?;
                println!(
                    "semigroup-diff d={d} t={t} L={l}: inside={:.3e} outside={:.3e} total={:.3e} bound={:.3e}",
                    p.inside, p.outside, p.total, p.bound_c
                );
                let at = format!("d={d} t={t} L={l}");
                if p.violations() > 0 {
                    failures.push(format!("{at}: {} part(s) above the bound", p.violations()));
                }
                if !(p.pythagoras_gap <= c.max_gap) {
                    failures.push(format!("{at}: Pythagoras gap {:e}", p.pythagoras_gap));
                }
                if p.total > last {
                    failures.push(format!("{at}: difference grew with L"));
                }
                last = p.total;
                rows.push(p);
            }
        }
    }

    let mut table = Table::new(&[
        "d",
        "t",
        "side",
        "inside",
        "outside",
        "total",
        "leakage",
        "pythagoras_gap",
        "bound_ab",
        "bound_c",
        "budget",
        "reference_side",
        "inconclusive",
        "violations",
    ]);
    for p in &rows {
        table.push(vec![
            Cell::from(p.d),
            p.t.into(),
            p.l.into(),
            p.inside.into(),
            p.outside.into(),
            p.total.into(),
            p.leakage.into(),
            p.pythagoras_gap.into(),
            p.bound_ab.into(),
            p.bound_c.into(),
            p.budget.into(),
            p.reference_side.into(),
            p.inconclusive.into(),
            p.violations().into(),
        ]);
    }
    Ok(Outcome {
        table,
        results: results(&rows),
        failures,
    })
}
