//! TOML run configurations. Every table rejects unknown keys.

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Control,
    Exhaust,
    SemigroupDiff,
    McExit,
    Sfuc,
    CostBounds,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Control => "control",
            Experiment::Exhaust => "exhaust",
            Experiment::SemigroupDiff => "semigroup-diff",
            Experiment::McExit => "mc-exit",
            Experiment::Sfuc => "sfuc",
            Experiment::CostBounds => "cost-bounds",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Experiment::Control,
            Experiment::Exhaust,
            Experiment::SemigroupDiff,
            Experiment::McExit,
            Experiment::Sfuc,
            Experiment::CostBounds,
        ]
        .into_iter()
        .find(|e| e.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum RunConfig {
    Control(ControlRun),
    Exhaust(ExhaustRun),
    SemigroupDiff(SemigroupRun),
    McExit(McRun),
    Sfuc(SfucRun),
    CostBounds(BoundsRun),
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::invalid("(syntax)", e.message()))?;
        let kind = match table.remove("experiment") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return Err(CliError::invalid("experiment", "must be a string")),
            None => return Err(CliError::invalid("experiment", "missing experiment kind")),
        };
        let Some(experiment) = Experiment::parse(&kind) else {
            return Err(CliError::invalid(
                "experiment",
                format!("unknown kind `{kind}`, expected control, exhaust, semigroup-diff, mc-exit, sfuc or cost-bounds"),
            ));
        };
        let value = toml::Value::Table(table);
        Ok(match experiment {
            Experiment::Control => RunConfig::Control(body(value)?),
            Experiment::Exhaust => RunConfig::Exhaust(body(value)?),
            Experiment::SemigroupDiff => RunConfig::SemigroupDiff(body(value)?),
            Experiment::McExit => RunConfig::McExit(body(value)?),
            Experiment::Sfuc => RunConfig::Sfuc(body(value)?),
            Experiment::CostBounds => RunConfig::CostBounds(body(value)?),
        })
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            RunConfig::Control(_) => Experiment::Control,
            RunConfig::Exhaust(_) => Experiment::Exhaust,
            RunConfig::SemigroupDiff(_) => Experiment::SemigroupDiff,
            RunConfig::McExit(_) => Experiment::McExit,
            RunConfig::Sfuc(_) => Experiment::Sfuc,
            RunConfig::CostBounds(_) => Experiment::CostBounds,
        }
    }

    pub fn common(&self) -> (&Option<u64>, &OutputConfig) {
        match self {
            RunConfig::Control(r) => (&r.seed, &r.output),
            RunConfig::Exhaust(r) => (&r.seed, &r.output),
            RunConfig::SemigroupDiff(r) => (&r.seed, &r.output),
            RunConfig::McExit(r) => (&r.seed, &r.output),
            RunConfig::Sfuc(r) => (&r.seed, &r.output),
            RunConfig::CostBounds(r) => (&r.seed, &r.output),
        }
    }
}

fn body<T: for<'de> Deserialize<'de>>(value: toml::Value) -> Result<T, CliError> {
    let de = value.clone();
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        CliError::invalid(if key == "." { "(root)".into() } else { key }, e.into_inner().message().to_string())
    })
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File stem, defaults to the experiment name.
    pub name: Option<String>,
}

fn one() -> f64 {
    1.0
}

fn default_intervals() -> usize {
    32
}

fn default_order() -> usize {
    4
}

fn default_epsilon() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub dim: usize,
    /// Box side when no sweep is given.
    pub side: Option<f64>,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub gain: f64,
    pub modes: Option<usize>,
    pub modes_per_unit: Option<f64>,
    #[serde(default)]
    pub potential: PotentialConfig,
    pub region: RegionConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero {},
    Constant {
        value: f64,
    },
    /// `V(x) = Σ_i v_i(x_i)`, one piecewise-constant profile per axis.
    Separable {
        axes: Vec<AxisProfile>,
    },
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig::Zero {}
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisProfile {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub outside: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionConfig {
    Full {},
    /// `∪_k [period k + lo, period k + hi]` along every axis.
    Stripes {
        period: f64,
        lo: f64,
        hi: f64,
    },
    Pattern {
        period: Vec<f64>,
        cells: Vec<Cell>,
    },
    Equidistributed {
        g: f64,
        delta: f64,
        /// Uniform random ball centers drawn from the run seed.
        #[serde(default)]
        random_centers: bool,
    },
    /// Fixed boxes, not extended with the domain.
    Boxes {
        pieces: Vec<Cell>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Tensor sine mode; a single index is repeated on every axis.
    Mode { index: Vec<usize> },
    /// `Π_i cos²(π x_i / (2r))` on `(-r, r)^d`.
    Bump {
        #[serde(default = "half")]
        radius: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Mode { index: vec![1] }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub side: Vec<f64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlCheck {
    pub max_residual: Option<f64>,
    pub control_norm: Option<f64>,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    /// Relative tolerance between control cost and observability constant.
    pub duality: Option<f64>,
}

impl Default for ControlCheck {
    fn default() -> Self {
        Self {
            max_residual: None,
            control_norm: None,
            rtol: default_rtol(),
            duality: None,
        }
    }
}

fn default_rtol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    /// Also compute the control cost and observability constant.
    #[serde(default)]
    pub cost: bool,
    #[serde(default)]
    pub check: ControlCheck,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustSection {
    pub scales: Vec<f64>,
    pub reference_side: f64,
    #[serde(default = "five")]
    pub test_functions: usize,
}

fn five() -> usize {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustCheck {
    #[serde(default = "tenth")]
    pub uniform_fraction: f64,
    #[serde(default = "milli")]
    pub weak_tolerance: f64,
    #[serde(default = "milli")]
    pub residual_factor: f64,
}

impl Default for ExhaustCheck {
    fn default() -> Self {
        Self {
            uniform_fraction: tenth(),
            weak_tolerance: milli(),
            residual_factor: milli(),
        }
    }
}

fn tenth() -> f64 {
    0.1
}

fn milli() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    pub exhaust: ExhaustSection,
    #[serde(default)]
    pub check: ExhaustCheck,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSection {
    pub dims: Vec<usize>,
    /// Side `R` of the box carrying the initial datum.
    pub support_side: f64,
    pub modes: usize,
    pub times: Vec<f64>,
    pub sides: Vec<f64>,
    #[serde(default = "four")]
    pub ref_factor: f64,
    pub modes_per_unit: Option<f64>,
}

fn four() -> f64 {
    4.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupCheck {
    #[serde(default = "gap_tol")]
    pub max_gap: f64,
}

impl Default for SemigroupCheck {
    fn default() -> Self {
        Self { max_gap: gap_tol() }
    }
}

fn gap_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub semigroup: SemigroupSection,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub check: SemigroupCheck,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub dims: Vec<usize>,
    pub radius: f64,
    pub times: Vec<f64>,
    pub sides: Vec<f64>,
    pub paths: usize,
    pub steps: usize,
    #[serde(default = "yes")]
    pub bridge: bool,
    /// Start points `f·(R/2, …, R/2)`, one per fraction.
    #[serde(default = "default_fractions")]
    pub start_fractions: Vec<f64>,
}

fn yes() -> bool {
    true
}

fn default_fractions() -> Vec<f64> {
    vec![0.0, 1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub mc: McSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfucSection {
    pub dim: usize,
    pub g: f64,
    pub delta: f64,
    pub energies: Vec<f64>,
    pub sides: Vec<f64>,
    pub modes_per_unit: f64,
    /// `N` in the formula constant.
    #[serde(default = "one")]
    pub n: f64,
    #[serde(default)]
    pub random_centers: bool,
    #[serde(default)]
    pub potential: PotentialConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfucCheck {
    /// Largest allowed ratio of measured constants across sides.
    #[serde(default = "two")]
    pub max_spread: f64,
}

impl Default for SfucCheck {
    fn default() -> Self {
        Self { max_spread: two() }
    }
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfucRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub sfuc: SfucSection,
    #[serde(default)]
    pub check: SfucCheck,
}

/// Golden values on bound rows: `expect` and `expect_aux` compare the
/// `value` and `aux` columns, `expect_log` compares logarithms (for bounds
/// that overflow), all to `rtol`.
fn round_off() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvEntry {
    pub gamma: f64,
    pub a: Vec<f64>,
    pub d: usize,
    pub t: f64,
    /// Universal constant; 1 when omitted (illustrative).
    pub k: Option<f64>,
    pub expect: Option<f64>,
    pub expect_log: Option<f64>,
    pub expect_aux: Option<f64>,
    #[serde(default = "round_off")]
    pub rtol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfucEntry {
    pub d: usize,
    /// Dimensional constant; 1 when omitted (illustrative).
    pub n: Option<f64>,
    pub delta: f64,
    pub g: f64,
    pub e: f64,
    pub v_sup: f64,
    pub expect: Option<f64>,
    pub expect_log: Option<f64>,
    pub expect_aux: Option<f64>,
    #[serde(default = "round_off")]
    pub rtol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NttvEntry {
    pub g: f64,
    pub delta: f64,
    pub v_sup: f64,
    pub t: f64,
    pub n: Option<f64>,
    pub d: usize,
    /// Threshold time; rows with `t > t_prime` are flagged.
    pub t_prime: Option<f64>,
    pub expect: Option<f64>,
    pub expect_log: Option<f64>,
    pub expect_aux: Option<f64>,
    #[serde(default = "round_off")]
    pub rtol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupEntry {
    pub t: f64,
    pub d: usize,
    pub l: f64,
    #[serde(default)]
    pub v_minus: f64,
    pub expect: Option<f64>,
    pub expect_log: Option<f64>,
    pub expect_aux: Option<f64>,
    #[serde(default = "round_off")]
    pub rtol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExitEntry {
    pub d: usize,
    pub l: f64,
    pub t: f64,
    pub expect: Option<f64>,
    pub expect_log: Option<f64>,
    pub expect_aux: Option<f64>,
    #[serde(default = "round_off")]
    pub rtol: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(default)]
    pub ev: Vec<EvEntry>,
    #[serde(default)]
    pub sfuc: Vec<SfucEntry>,
    #[serde(default)]
    pub nttv: Vec<NttvEntry>,
    #[serde(default)]
    pub semigroup: Vec<SemigroupEntry>,
    #[serde(default)]
    pub exit: Vec<ExitEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsRun {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub bounds: BoundsSection,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse(
            "experiment = \"control\"\n[problem]\ndim = 1\nside = 2.0\nmodes = 3\n[problem.region]\nkind = \"full\"\n",
        )
        .unwrap();
        let RunConfig::Control(c) = cfg else { panic!() };
        assert_eq!((c.problem.intervals, c.problem.order, c.problem.epsilon), (32, 4, 1e-8));
        assert!(matches!(c.problem.potential, PotentialConfig::Zero {}));
        assert_eq!(c.check.rtol, 1e-5);
        assert!(matches!(c.initial, InitialConfig::Mode { ref index } if index == &[1]));
    }

    #[test]
    fn nested_unknown_key_reports_path() {
        let err = RunConfig::parse("experiment = \"mc-exit\"\n[mc]\ndims = [1]\nradius = 1.0\ntimes = [1.0]\nsides = [4.0]\npaths = 1000\nsteps = 100\nbridges = false\n")
            .unwrap_err();
        let CliError::Validation { key, message } = err else { panic!() };
        assert_eq!(key, "mc.bridges");
        assert!(message.contains("bridges"), "{message}");
    }

    #[test]
    fn tagged_region_rejects_foreign_fields() {
        let text = "experiment = \"control\"\n[problem]\ndim = 1\nside = 2.0\nmodes = 3\n[problem.region]\nkind = \"full\"\nperiod = 2.0\n";
        let err = RunConfig::parse(text).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref key, .. } if key.starts_with("problem.region")), "{err}");
    }
}
