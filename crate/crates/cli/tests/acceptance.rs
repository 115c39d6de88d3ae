//! The ten acceptance criteria, one line each. Criteria backed by an
//! experiment go through the runner with `--check` on the shipped configs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::DVector;
use nullctl::bounds::{brownian_exit_bound, ev_cost_bound, nttv_cost_bound, semigroup_bound, sfuc_constant};
use nullctl::control::{ProblemSpec, TimeGrid, TimeSampledControl};
use nullctl::semigroup_approx::{mc_exit_probability, strong_convergence_probe, McConfig};
use nullctl::sets::{ControlRegion, ThickPattern};
use nullctl::spectral::{build_basis, BoxDomain, Piecewise1d, PotentialSpec, SpectralField};
use nullctl_cli::{run, Args};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_config(name: &str, out: &Path) -> Result<(), String> {
    let args = Args {
        config: config(name),
        check: true,
        out: Some(out.to_path_buf()),
        seed: None,
    };
    run(&args).map(|_| ()).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn scalar_oracle() -> Outcome {
    let start = Instant::now();
    let domain = BoxDomain::new(1, PI).unwrap();
    let mut spec = ProblemSpec::new(
        domain,
        PotentialSpec::zero(1),
        ControlRegion::full(&domain),
        1,
        TimeGrid::new(1.0, 32, 4).unwrap(),
    );
    spec.epsilon = 1e-12;
    let p = spec.assemble().map_err(|e| e.to_string())?;
    let u0 = SpectralField::mode(p.basis().clone(), &[1]).unwrap();
    let sol = p.min_norm_null_control(&u0).map_err(|e| e.to_string())?;
    let e1 = (-1.0f64).exp();
    let want = e1 * (2.0 / (1.0 - e1 * e1)).sqrt();
    let rel = (sol.control.norm() - want).abs() / want;
    ensure(rel <= 1e-5, || format!("|f| = {} vs {want}, rel {rel:e}", sol.control.norm()))?;
    ensure(sol.residual_norm <= 1e-6, || format!("residual {:e}", sol.residual_norm))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("|f| = {:.7} (closed form {want:.7}), residual {:.1e}", sol.control.norm(), sol.residual_norm))
}

fn surjective_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let well = |d: usize| {
        let axis = Piecewise1d {
            edges: vec![-0.5, 0.5],
            values: vec![-3.0],
            outside: 1.0,
        };
        PotentialSpec::separable(vec![axis; d]).unwrap()
    };
    for (d, n) in [(1, 16), (2, 8), (2, 16)] {
        for v in [PotentialSpec::zero(d), well(d)] {
            let domain = BoxDomain::new(d, 4.0).unwrap();
            let spec = ProblemSpec::new(domain, v, ControlRegion::full(&domain), n, TimeGrid::new(1.0, 8, 4).unwrap());
            let p = spec.assemble().map_err(|e| e.to_string())?;
            let len = p.basis().len();
            let u0 = SpectralField::new(p.basis().clone(), DVector::from_fn(len, |_, _| rng.random_range(-1.0..1.0))).unwrap();
            let horizon = p.horizon();
            let f = TimeSampledControl::from_fn(&p, |s| -u0.semigroup_apply(s).unwrap().into_coeffs() / horizon)
                .map_err(|e| e.to_string())?;
            let end = p.mild_solution(&u0, &f, horizon).map_err(|e| e.to_string())?;
            let rel = end.norm() / u0.norm();
            worst = worst.max(rel);
            ensure(rel <= 1e-8, || format!("d={d} N={n}: |u(T)| / |u0| = {rel:e}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("worst |u(T)|/|u0| = {worst:.1e}"))
}

fn duality_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let period = rng.random_range(1.0..3.0);
        let lo = rng.random_range(0.0..0.5) * period;
        let hi = lo + rng.random_range(0.2..0.5) * period;
        let side = [4.0, 6.0, 8.0][i % 3];
        let n = rng.random_range(4..=16);
        let horizon = rng.random_range(0.5..2.0);
        let intervals = rng.random_range(4..=16);
        let domain = BoxDomain::new(1, side).unwrap();
        let region = ThickPattern::stripes(period, lo, hi, 1).unwrap().region(&domain).unwrap();
        let grid = TimeGrid::new(horizon, intervals, 4).unwrap();
        let p = ProblemSpec::new(domain, PotentialSpec::zero(1), region, n, grid)
            .assemble()
            .map_err(|e| e.to_string())?;
        let cost = p.control_cost().map_err(|e| format!("problem {i}: {e}"))?;
        let obs = p.observability_constant().map_err(|e| format!("problem {i}: {e}"))?;
        let rel = (cost - obs).abs() / obs;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("problem {i}: cost {cost:e} vs observability {obs:e}"))?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("worst relative gap {worst:.1e} over 10 problems"))
}

fn timed_config(name: &str, out: &Path, limit: Duration) -> Outcome {
    let start = Instant::now();
    run_config(name, out)?;
    within(start.elapsed(), limit)?;
    Ok(format!("{name} passes its checks in {:.1?}", start.elapsed()))
}

fn monte_carlo(out: &Path) -> Outcome {
    let start = Instant::now();
    run_config("mc-exit.toml", out)?;
    // CI scaling on every cell whose interval is set by the sample spread
    // rather than the zero-hit floor 3/n.
    let mut ratios = Vec::new();
    for d in [1, 2] {
        for l in [4.0, 8.0, 16.0] {
            let starts = vec![vec![0.0; d], vec![0.5; d]];
            let small = mc_exit_probability(1.0, l, 1.0, &McConfig::new(100_000, 200, 20240607, starts.clone()))
                .map_err(|e| e.to_string())?;
            if small.per_point.iter().all(|p| p.ci_halfwidth <= 3.0 / 100_000.0) {
                continue;
            }
            let big = mc_exit_probability(1.0, l, 1.0, &McConfig::new(400_000, 200, 20240607, starts))
                .map_err(|e| e.to_string())?;
            for (a, b) in small.per_point.iter().zip(&big.per_point) {
                if a.ci_halfwidth > 3.0 / 100_000.0 {
                    let r = b.ci_halfwidth / a.ci_halfwidth;
                    ensure((0.4..=0.6).contains(&r), || format!("d={d} L={l}: CI ratio {r:.3}"))?;
                    ratios.push(r);
                }
            }
        }
    }
    ensure(!ratios.is_empty(), || "no cell with a sampled CI".into())?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("every cell below 2d e^(-L²/32); CI ratios at 4x paths {ratios:.3?}"))
}

fn strong_probe() -> Outcome {
    let start = Instant::now();
    let reference = build_basis(BoxDomain::new(1, 32.0).unwrap(), PotentialSpec::zero(1), 256).unwrap();
    let g = SpectralField::project(reference, &[-0.5, 0.5], |x| {
        if x[0].abs() < 0.5 {
            (PI * x[0]).cos().powi(2)
        } else {
            0.0
        }
    });
    let pts = strong_convergence_probe(&g, 0.1, &[2.0, 4.0, 6.0, 8.0]).map_err(|e| e.to_string())?;
    ensure(pts.windows(2).all(|w| w[1].norm < w[0].norm), || format!("not decreasing: {pts:?}"))?;
    let last = pts.last().unwrap();
    ensure(last.norm.powi(2) <= last.envelope_sq, || format!("{last:?}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    let norms: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.norm)).collect();
    Ok(format!("norms {}; final² {:.1e} ≤ {:.1e}", norms.join(" > "), last.norm.powi(2), last.envelope_sq))
}

fn golden_bounds(out: &Path) -> Outcome {
    let start = Instant::now();
    run_config("cost-bounds.toml", out)?;
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    let mut worst = 0.0f64;
    let mut check = |name: &str, got: f64, want: f64| {
        let r = rel(got, want);
        worst = worst.max(r);
        ensure(r <= 1e-12, || format!("{name}: {got:e} vs {want:e}"))
    };
    let e = |x: f64| x.exp();
    check("ev", ev_cost_bound(1.0, &[1.0], 1, 1.0, 1.0).unwrap().value, e(0.5))?;
    let over = ev_cost_bound(0.5, &[2.0], 1, 0.5, 2.0).unwrap();
    ensure(over.overflow && over.value.is_infinite(), || "overflow sentinel missing".into())?;
    check("ev log", over.log_value, 4096f64.ln() / 2.0 + 4096.0)?;
    check("sfuc", sfuc_constant(1, 2.0, 1.0, 4.0, 0.0, 0.0).unwrap(), 0.0625)?;
    let expo = 3.0 * (1.0 + 2f64.powf(4.0 / 3.0) + 4.0);
    check("sfuc2", sfuc_constant(1, 3.0, 0.5, 2.0, 4.0, 1.0).unwrap(), 0.25f64.powf(expo))?;
    let ln2 = 2f64.ln();
    let c_star = ln2 * ln2 * (1.0 + 4.0 / ln2).powi(2);
    check("nttv", nttv_cost_bound(1.0, 0.5, 0.0, c_star, 1.0, 1).unwrap().value, 2.0 * 2f64.sqrt() * e(1.0))?;
    let sg = semigroup_bound(0.1, 1, 4.0, 0.0, 1.0, 0.0).unwrap();
    check("semigroup ab", sg.part_ab, 2.0 * e(-5.0))?;
    check("semigroup c", sg.part_c, 4.0 * e(-5.0))?;
    check("semigroup 2d", semigroup_bound(1.0, 2, 16.0, 0.0, 1.0, 0.0).unwrap().part_ab, 4.0 * e(-8.0))?;
    check("exit", brownian_exit_bound(1, 8.0, 1.0).unwrap().raw, 2.0 * e(-2.0))?;
    let vac = brownian_exit_bound(1, 4.0, 1.0).unwrap();
    check("exit raw", vac.raw, 2.0 * e(-0.5))?;
    ensure(vac.clamped == 1.0, || format!("clamped {}", vac.clamped))?;
    check("exit 3d", brownian_exit_bound(3, 16.0, 0.5).unwrap().raw, 6.0 * e(-16.0))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("all golden values within {worst:.1e} relative"))
}

fn deterministic(first: &Path, scratch: &Path) -> Outcome {
    let mut files = Vec::new();
    for (cfg, stem) in [("mc-exit.toml", "mc-exit"), ("exhaust.toml", "exhaust")] {
        run_config(cfg, scratch)?;
        for ext in ["csv", "json"] {
            let name = format!("{stem}.{ext}");
            let a = std::fs::read(first.join(&name)).map_err(|e| format!("{name}: {e}"))?;
            let b = std::fs::read(scratch.join(&name)).map_err(|e| format!("{name}: {e}"))?;
            ensure(a == b, || format!("{name} differs between runs"))?;
            files.push(name);
        }
    }
    Ok(format!("byte-identical: {}", files.join(", ")))
}

#[test]
fn acceptance() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let out = first.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("scalar oracle", Box::new(scalar_oracle)),
        ("surjective-control identity", Box::new(surjective_identity)),
        ("duality oracle", Box::new(duality_oracle)),
        ("semigroup inequality grid", Box::new(|| timed_config("semigroup-diff.toml", out, Duration::from_secs(120)))),
        ("Monte Carlo exit probability", Box::new(|| monte_carlo(out))),
        ("exhaustion run", Box::new(|| timed_config("exhaust.toml", out, Duration::from_secs(600)))),
        ("strong semigroup convergence", Box::new(strong_probe)),
        ("bound golden values", Box::new(|| golden_bounds(out))),
        ("spectral inequality scale-freeness", Box::new(|| timed_config("sfuc.toml", out, Duration::from_secs(60)))),
        ("determinism", Box::new(|| deterministic(out, second.path()))),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
