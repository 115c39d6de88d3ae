use nullctl::semigroup_approx::{mc_exit_probability, McConfig, McEstimate};

use super::{dims, join, positive_axis, results, Outcome};
use crate::config::McRun;
use crate::error::{AtKey, CliError};
use crate::output::{Cell, Table};

pub fn run(cfg: &McRun, seed: u64) -> Result<Outcome, CliError> {
    let m = &cfg.mc;
    let dims = dims(&m.dims, "mc.dims")?;
    let times = positive_axis(&m.times, "mc.times")?;
    let sides = positive_axis(&m.sides, "mc.sides")?;
    if !(m.radius > 0.0 && m.radius.is_finite()) {
        return Err(CliError::invalid("mc.radius", "must be positive"));
    }
    if sides[0] < 2.0 * m.radius {
        return Err(CliError::invalid("mc.sides", format!("every side must be at least 2R = {}", 2.0 * m.radius)));
    }
    if m.start_fractions.is_empty() || m.start_fractions.iter().any(|f| !(f.abs() <= 1.0)) {
        return Err(CliError::invalid("mc.start_fractions", "need fractions in [-1, 1]"));
    }
    let config_for = |d: usize| {
        let starts = m.start_fractions.iter().map(|f| vec![f * 0.5 * m.radius; d]).collect();
        McConfig {
            bridge: m.bridge,
            ..McConfig::new(m.paths, m.steps, seed, starts)
        }
    };
    config_for(1).validate().at("mc")?;

    let mut rows: Vec<(f64, f64, McEstimate)> = Vec::new();
    let mut failures = Vec::new();
    for &d in &dims {
        let mcfg = config_for(d);
        for &t in &times {
            for &l in &sides {
                let est = mc_exit_probability(m.radius, l, t, &mcfg).at(&format!("mc[d={d}, t={t}, L={l}]"))?;
                let upper = est.estimate + est.ci_halfwidth;
                println!(
                    "mc-exit d={d} t={t} L={l}: p={:.4e} ± {:.2e} bound={:.4e}",
                    est.estimate, est.ci_halfwidth, est.bound
                );
                if !(upper <= est.bound) {
                    failures.push(format!("d={d} t={t} L={l}: estimate + CI {upper:e} above bound {:e}", est.bound));
                }
                rows.push((t, l, est));
            }
        }
    }

    let mut table = Table::new(&[
        "d",
        "t",
        "side",
        "paths",
        "steps",
        "bridge",
        "estimate",
        "ci_halfwidth",
        "upper",
        "bound",
        "worst_start",
    ]);
    let mut json = Vec::new();
    for (t, l, est) in &rows {
        table.push(vec![
            Cell::from(est.d),
            (*t).into(),
            (*l).into(),
            m.paths.into(),
            m.steps.into(),
            m.bridge.into(),
            est.estimate.into(),
            est.ci_halfwidth.into(),
            (est.estimate + est.ci_halfwidth).into(),
            est.bound.into(),
            join(&est.per_point[est.worst].start).into(),
        ]);
        json.push(serde_json::json!({ "t": t, "side": l, "estimate": est }));
    }
    Ok(Outcome {
        table,
        results: results(&json),
        failures,
    })
}
