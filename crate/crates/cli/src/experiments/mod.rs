use std::f64::consts::PI;
use std::sync::Arc;

use nullctl::control::{ProblemSpec, TimeGrid};
use nullctl::exhaustion::{ModeRule, ProblemTemplate, RegionTemplate};
use nullctl::sets::{ControlRegion, EquidistributedSet, RegionPiece, ThickPattern};
use nullctl::spectral::{BoxDomain, Piecewise1d, PotentialSpec, SpectralBasis, SpectralField};

use crate::config::{InitialConfig, PotentialConfig, ProblemConfig, RegionConfig, RunConfig};
use crate::error::{AtKey, CliError};
use crate::output::Table;

mod bounds;
mod control;
mod exhaust;
mod mc;
mod semigroup;
mod sfuc;

pub struct Outcome {
    pub table: Table,
    pub results: serde_json::Value,
    pub failures: Vec<String>,
}

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    match cfg {
        RunConfig::Control(c) => control::run(c),
        RunConfig::Exhaust(c) => exhaust::run(c, seed),
        RunConfig::SemigroupDiff(c) => semigroup::run(c),
        RunConfig::McExit(c) => mc::run(c, seed),
        RunConfig::Sfuc(c) => sfuc::run(c, seed),
        RunConfig::CostBounds(c) => bounds::run(c),
    }
}

fn results<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("reports serialize")
}

/// Sorted copy of a sweep axis; rejects empty, duplicate and non-finite entries.
fn axis(values: &[f64], key: &str) -> Result<Vec<f64>, CliError> {
    if values.is_empty() {
        return Err(CliError::invalid(key, "needs at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::invalid(key, "values must be finite"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::invalid(key, "duplicate values"));
    }
    Ok(v)
}

fn positive_axis(values: &[f64], key: &str) -> Result<Vec<f64>, CliError> {
    let v = axis(values, key)?;
    if v[0] <= 0.0 {
        return Err(CliError::invalid(key, "values must be positive"));
    }
    Ok(v)
}

fn dims(values: &[usize], key: &str) -> Result<Vec<usize>, CliError> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() || v[0] == 0 || v[v.len() - 1] > 2 {
        return Err(CliError::invalid(key, "dimensions must be 1 or 2"));
    }
    Ok(v)
}

fn potential(cfg: &PotentialConfig, dim: usize, key: &str) -> Result<PotentialSpec, CliError> {
    match cfg {
        PotentialConfig::Zero {} => Ok(PotentialSpec::zero(dim)),
        PotentialConfig::Constant { value } => PotentialSpec::constant(dim, *value).at(key),
        PotentialConfig::Separable { axes } => {
            if axes.len() != dim {
                return Err(CliError::invalid(format!("{key}.axes"), format!("need {dim} axis profiles, got {}", axes.len())));
            }
            let profiles = axes
                .iter()
                .map(|a| Piecewise1d {
                    edges: a.edges.clone(),
                    values: a.values.clone(),
                    outside: a.outside,
                })
                .collect();
            PotentialSpec::separable(profiles).at(key)
        }
    }
}

/// A control set cut down to each box of a sweep.
enum RegionSource {
    Template(RegionTemplate),
    Fixed(ControlRegion),
}

impl RegionSource {
    /// `seed_side` is the largest box; random ball centers are drawn there so
    /// smaller boxes see the same balls.
    fn new(cfg: &RegionConfig, dim: usize, seed: u64, seed_side: f64, key: &str) -> Result<Self, CliError> {
        Ok(match cfg {
            RegionConfig::Full {} => RegionSource::Template(RegionTemplate::Full),
            RegionConfig::Stripes { period, lo, hi } => {
                RegionSource::Template(RegionTemplate::Thick(ThickPattern::stripes(*period, *lo, *hi, dim).at(key)?))
            }
            RegionConfig::Pattern { period, cells } => {
                let cells = cells.iter().map(|c| (c.lo.clone(), c.hi.clone())).collect();
                let p = ThickPattern::new(period.clone(), cells).at(key)?;
                if p.dim() != dim {
                    return Err(CliError::invalid(format!("{key}.period"), format!("pattern has dimension {}, problem {dim}", p.dim())));
                }
                RegionSource::Template(RegionTemplate::Thick(p))
            }
            RegionConfig::Equidistributed { g, delta, random_centers } => {
                let mut set = EquidistributedSet::new(dim, *g, *delta).map_err(|e| strip_region(e, key))?;
                if *random_centers {
                    set = set.with_random_centers(seed_side, seed).at(key)?;
                }
                RegionSource::Template(RegionTemplate::Equidistributed(set))
            }
            RegionConfig::Boxes { pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|c| RegionPiece::Cuboid {
                        lo: c.lo.clone(),
                        hi: c.hi.clone(),
                    })
                    .collect();
                RegionSource::Fixed(ControlRegion::new(dim, pieces).at(key)?)
            }
        })
    }

    fn region(&self, domain: &BoxDomain) -> nullctl::Result<ControlRegion> {
        match self {
            RegionSource::Template(t) => t.region(domain),
            RegionSource::Fixed(r) => Ok(r.clone()),
        }
    }
}

/// Library keys for set parameters already start with `region.`.
fn strip_region(e: nullctl::Error, key: &str) -> CliError {
    let parent = key.strip_suffix(".region").unwrap_or(key);
    Err::<(), _>(e).at(parent).unwrap_err()
}

fn mode_rule(p: &ProblemConfig) -> Result<ModeRule, CliError> {
    match (p.modes, p.modes_per_unit) {
        (Some(n), None) => Ok(ModeRule::Fixed(n)),
        (None, Some(rho)) => Ok(ModeRule::PerUnitLength(rho)),
        _ => Err(CliError::invalid("problem.modes", "give exactly one of `modes` and `modes_per_unit`")),
    }
}

/// Everything of a problem except the box.
struct Setup {
    dim: usize,
    potential: PotentialSpec,
    region: RegionSource,
    modes: ModeRule,
    grid: TimeGrid,
    epsilon: f64,
    gain: f64,
}

impl Setup {
    fn new(p: &ProblemConfig, seed: u64, seed_side: f64) -> Result<Self, CliError> {
        if p.dim == 0 || p.dim > 2 {
            return Err(CliError::invalid("problem.dim", "dimension must be 1 or 2"));
        }
        let modes = mode_rule(p)?;
        modes.modes(seed_side).at("problem")?;
        Ok(Self {
            dim: p.dim,
            potential: potential(&p.potential, p.dim, "problem.potential")?,
            region: RegionSource::new(&p.region, p.dim, seed, seed_side, "problem.region")?,
            modes,
            grid: TimeGrid::new(p.horizon, p.intervals, p.order).at("problem")?,
            epsilon: p.epsilon,
            gain: p.gain,
        })
    }

    fn spec(&self, side: f64) -> Result<ProblemSpec, CliError> {
        let domain = BoxDomain::new(self.dim, side).at("problem.side")?;
        let mut spec = ProblemSpec::new(
            domain,
            self.potential.clone(),
            self.region.region(&domain).map_err(|e| strip_region(e, "problem.region"))?,
            self.modes.modes(side).at("problem")?,
            self.grid.clone(),
        );
        spec.epsilon = self.epsilon;
        spec.gain = self.gain;
        spec.validate().at("problem")?;
        Ok(spec)
    }

    fn template(&self) -> Result<ProblemTemplate, CliError> {
        let RegionSource::Template(region) = &self.region else {
            return Err(CliError::invalid("problem.region.kind", "fixed boxes do not extend with the domain"));
        };
        let mut t = ProblemTemplate::new(self.dim, self.potential.clone(), region.clone(), self.modes, self.grid.clone());
        t.epsilon = self.epsilon;
        t.gain = self.gain;
        Ok(t)
    }
}

/// Checks an initial datum against the basis it will live on.
fn check_initial(cfg: &InitialConfig, dim: usize, modes: usize, side: f64) -> Result<(), CliError> {
    match cfg {
        InitialConfig::Mode { index } => {
            if index.len() != 1 && index.len() != dim {
                return Err(CliError::invalid("initial.index", format!("need 1 or {dim} indices")));
            }
            if index.iter().any(|&k| k == 0 || k > modes) {
                return Err(CliError::invalid("initial.index", format!("indices must lie in 1..={modes}")));
            }
        }
        InitialConfig::Bump { radius } => {
            if !(*radius > 0.0 && *radius <= 0.5 * side) {
                return Err(CliError::invalid("initial.radius", format!("radius must lie in (0, {}]", 0.5 * side)));
            }
        }
    }
    Ok(())
}

fn initial(cfg: &InitialConfig, basis: &Arc<SpectralBasis>) -> Result<SpectralField, CliError> {
    check_initial(cfg, basis.dim(), basis.modes(), basis.side())?;
    match cfg {
        InitialConfig::Mode { index } => {
            let k = if index.len() == 1 { vec![index[0]; basis.dim()] } else { index.clone() };
            SpectralField::mode(basis.clone(), &k).at("initial")
        }
        InitialConfig::Bump { radius } => {
            let r = *radius;
            Ok(SpectralField::project(basis.clone(), &[-r, r], |x| {
                x.iter()
                    .map(|&xi| if xi.abs() < r { (PI * xi / (2.0 * r)).cos().powi(2) } else { 0.0 })
                    .product()
            }))
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}
