use serde::Serialize;

use super::{check_initial, initial, positive_axis, results, Outcome, Setup};
use crate::config::ControlRun;
use crate::error::{AtKey, CliError};
use crate::output::{Cell, Table};

#[derive(Serialize)]
struct Point {
    side: f64,
    epsilon: f64,
    modes: usize,
    nodes: usize,
    initial_norm: f64,
    control_norm: f64,
    residual: f64,
    iterations: usize,
    control_cost: Option<f64>,
    observability_constant: Option<f64>,
}

pub fn run(cfg: &ControlRun) -> Result<Outcome, CliError> {
    let p = &cfg.problem;
    let (sides, side_key) = if cfg.sweep.side.is_empty() {
        let side = p.side.ok_or_else(|| CliError::invalid("problem.side", "give a side or a `sweep.side` list"))?;
        (vec![side], "problem.side")
    } else {
        (cfg.sweep.side.clone(), "sweep.side")
    };
    let sides = positive_axis(&sides, side_key)?;
    let eps = if cfg.sweep.epsilon.is_empty() {
        vec![p.epsilon]
    } else {
        positive_axis(&cfg.sweep.epsilon, "sweep.epsilon")?
    };
    let check = &cfg.check;
    if check.duality.is_some() && !cfg.cost {
        return Err(CliError::invalid("check.duality", "needs `cost = true`"));
    }
    let setup = Setup::new(p, 0, sides[sides.len() - 1])?;
    let specs = sides.iter().map(|&s| setup.spec(s)).collect::<Result<Vec<_>, _>>()?;
    for s in &specs {
        check_initial(&cfg.initial, s.domain.dim(), s.modes, s.domain.side())?;
    }

    let mut points = Vec::new();
    for (spec, &side) in specs.iter().zip(&sides) {
        let problem = spec.assemble().at("problem")?;
        let u0 = initial(&cfg.initial, problem.basis())?;
        let (cost, obs) = if cfg.cost {
            let key = format!("sweep.side[{side}]");
            (Some(problem.control_cost().at(&key)?), Some(problem.observability_constant().at(&key)?))
        } else {
            (None, None)
        };
        for &e in &eps {
            let key = format!("sweep[side={side}, epsilon={e}]");
            let sol = problem.with_epsilon(e).at("sweep.epsilon")?.min_norm_null_control(&u0).at(&key)?;
            let point = Point {
                side,
                epsilon: e,
                modes: spec.modes,
                nodes: problem.grid().len(),
                initial_norm: u0.norm(),
                control_norm: sol.control.norm(),
                residual: sol.residual_norm,
                iterations: sol.iterations,
                control_cost: cost,
                observability_constant: obs,
            };
            println!(
                "control L={side} eps={e:e}: |f|={:.6e} residual={:.3e} iterations={}",
                point.control_norm, point.residual, point.iterations
            );
            points.push(point);
        }
    }

    let mut failures = Vec::new();
    for pt in &points {
        let at = format!("L={} eps={:e}", pt.side, pt.epsilon);
        if let Some(max) = check.max_residual {
            if !(pt.residual <= max) {
                failures.push(format!("{at}: residual {:e} above {max:e}", pt.residual));
            }
        }
        if let Some(want) = check.control_norm {
            let rel = (pt.control_norm - want).abs() / want.abs();
            if !(rel <= check.rtol) {
                failures.push(format!("{at}: control norm {:e} differs from {want:e} by {rel:e} relative", pt.control_norm));
            }
        }
        if let (Some(tol), Some(c), Some(o)) = (check.duality, pt.control_cost, pt.observability_constant) {
            let rel = (c - o).abs() / o.abs();
            if !(rel <= tol) {
                failures.push(format!("{at}: control cost {c:e} and observability constant {o:e} differ by {rel:e}"));
            }
        }
    }

    let mut table = Table::new(&[
        "side",
        "epsilon",
        "modes",
        "nodes",
        "initial_norm",
        "control_norm",
        "residual",
        "iterations",
        "control_cost",
        "observability_constant",
    ]);
    for pt in &points {
        table.push(vec![
            Cell::from(pt.side),
            pt.epsilon.into(),
            pt.modes.into(),
            pt.nodes.into(),
            pt.initial_norm.into(),
            pt.control_norm.into(),
            pt.residual.into(),
            pt.iterations.into(),
            pt.control_cost.into(),
            pt.observability_constant.into(),
        ]);
    }
    Ok(Outcome {
        table,
        results: results(&points),
        failures,
    })
}
