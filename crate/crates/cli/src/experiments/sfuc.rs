use nalgebra::SymmetricEigen;
use nullctl::bounds::sfuc_constant;
use nullctl::quadrature::QuadratureOptions;
use nullctl::sets::{indicator_gram, EquidistributedSet};
use nullctl::spectral::{build_basis, BoxDomain};
use serde::Serialize;

use super::{positive_axis, potential, results, strip_region, Outcome};
use crate::config::SfucRun;
use crate::error::{AtKey, CliError};
use crate::output::{Cell, Table};

#[derive(Serialize)]
struct Row {
    side: f64,
    energy: f64,
    modes: usize,
    subspace_dim: usize,
    /// Smallest eigenvalue of the indicator Gram matrix on the spectral
    /// subspace; `None` when the subspace is empty.
    measured_constant: Option<f64>,
    formula_constant: f64,
}

pub fn run(cfg: &SfucRun, seed: u64) -> Result<Outcome, CliError> {
    let s = &cfg.sfuc;
    if s.dim == 0 || s.dim > 2 {
        return Err(CliError::invalid("sfuc.dim", "dimension must be 1 or 2"));
    }
    let sides = positive_axis(&s.sides, "sfuc.sides")?;
    let energies = super::axis(&s.energies, "sfuc.energies")?;
    if energies[0] < 0.0 {
        return Err(CliError::invalid("sfuc.energies", "energies must be nonnegative"));
    }
    if !(s.modes_per_unit > 0.0 && s.modes_per_unit.is_finite()) {
        return Err(CliError::invalid("sfuc.modes_per_unit", "must be positive"));
    }
    if !(s.n > 0.0 && s.n.is_finite()) {
        return Err(CliError::invalid("sfuc.n", "must be positive"));
    }
    if !(cfg.check.max_spread >= 1.0) {
        return Err(CliError::invalid("check.max_spread", "must be at least 1"));
    }
    let v = potential(&s.potential, s.dim, "sfuc.potential")?;
    let mut set = EquidistributedSet::new(s.dim, s.g, s.delta).map_err(|e| strip_region(e, "sfuc"))?;
    if s.random_centers {
        set = set.with_random_centers(sides[sides.len() - 1], seed).at("sfuc.sides")?;
    }

    // Bases and regions first, so a bad energy fails before any Gram matrix.
    let mut setups = Vec::new();
    for &l in &sides {
        let region = set.region(l).at("sfuc.sides")?;
        let modes = ((s.modes_per_unit * l) - 1e-9).ceil().max(1.0) as usize;
        let basis = build_basis(BoxDomain::new(s.dim, l).at("sfuc.sides")?, v.clone(), modes).at("sfuc")?;
        let top = energies[energies.len() - 1];
        if top >= basis.max_eigenvalue() {
            return Err(CliError::invalid(
                "sfuc.energies",
                format!(
                    "E = {top} is not below the resolved spectrum (largest eigenvalue {:.4} at L = {l}); raise modes_per_unit",
                    basis.max_eigenvalue()
                ),
            ));
        }
        setups.push((l, modes, basis, region));
    }

    let mut rows = Vec::new();
    for (l, modes, basis, region) in &setups {
        let gram = indicator_gram(region, basis, &QuadratureOptions::default()).at("sfuc")?;
        let gram = basis.matrix_to_eigen(&gram);
        for &e in &energies {
            let keep: Vec<usize> = (0..basis.len()).filter(|&k| basis.eigenvalues()[k] <= e).collect();
            let measured = if keep.is_empty() {
                None
            } else {
                let sub = gram.select_rows(&keep).select_columns(&keep);
                Some(SymmetricEigen::new(sub).eigenvalues.min())
            };
            let formula = sfuc_constant(s.dim, s.n, s.delta, s.g, e, v.sup_norm()).at("sfuc")?;
            match measured {
                Some(m) => println!("sfuc L={l} E={e}: dim={} measured={m:.6e} formula={formula:.3e}", keep.len()),
                None => println!("sfuc L={l} E={e}: empty spectral subspace"),
            }
            rows.push(Row {
                side: *l,
                energy: e,
                modes: *modes,
                subspace_dim: keep.len(),
                measured_constant: measured,
                formula_constant: formula,
            });
        }
    }

    let mut failures = Vec::new();
    for r in &rows {
        if let Some(m) = r.measured_constant {
            if !(m > 0.0) {
                failures.push(format!("L={} E={}: measured constant {m:e} not positive", r.side, r.energy));
            }
            if m < r.formula_constant {
                failures.push(format!("L={} E={}: measured {m:e} below the formula {:e}", r.side, r.energy, r.formula_constant));
            }
        }
    }
    for &e in &energies {
        let vals: Vec<f64> = rows.iter().filter(|r| r.energy == e).filter_map(|r| r.measured_constant).collect();
        if vals.len() > 1 {
            let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            if !(hi <= cfg.check.max_spread * lo) {
                failures.push(format!("E={e}: measured constants spread by {:.3} across L", hi / lo));
            }
        }
    }

    rows.sort_by(|a, b| a.side.total_cmp(&b.side).then(a.energy.total_cmp(&b.energy)));
    let mut table = Table::new(&["L", "E", "modes", "subspace_dim", "measured_constant", "formula_constant", "vacuous"]);
    for r in &rows {
        table.push(vec![
            Cell::from(r.side),
            r.energy.into(),
            r.modes.into(),
            r.subspace_dim.into(),
            r.measured_constant.into(),
            r.formula_constant.into(),
            r.measured_constant.is_none().into(),
        ]);
    }
    Ok(Outcome {
        table,
        results: results(&rows),
        failures,
    })
}
