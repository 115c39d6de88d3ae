use std::path::Path;
use std::process::{Command, Output};

fn nullctl(config: &Path, extra: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nullctl"));
    cmd.arg(config).args(extra).env_remove(nullctl_cli::OUT_DIR_ENV);
    if let Some(dir) = env_out {
        cmd.env(nullctl_cli::OUT_DIR_ENV, dir);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const MINIMAL: &str = r#"
experiment = "control"
[problem]
dim = 1
side = 2.0
modes = 4
[problem.region]
kind = "full"
"#;

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn minimal_config_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.toml", MINIMAL);
    let out = dir.path().join("out");
    let o = nullctl(&cfg, &["--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("control.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("schema_version,side,epsilon"));
    assert!(lines[1].starts_with("1,2e0,1e-8,4,"));
    assert!(!csv.contains('\r'));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("control.json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "control");
    assert_eq!(json["checks"]["passed"], true);
}

#[test]
fn delta_at_half_period_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        r#"
experiment = "control"
[problem]
dim = 1
side = 4.0
modes = 8
[problem.region]
kind = "equidistributed"
g = 1.0
delta = 0.5
"#,
    );
    let out = dir.path().join("out");
    let o = nullctl(&cfg, &["--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("problem.region.delta") && err.contains("(0, G/2)"), "{err}");
    assert!(err.contains("bad.toml"), "{err}");
    assert!(!out.exists(), "nothing written on validation failure");
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "typo.toml", &MINIMAL.replace("modes = 4", "modes = 4\nmodez = 5"));
    let o = nullctl(&cfg, &[], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("problem") && stderr(&o).contains("modez"), "{}", stderr(&o));

    let cfg = write(dir.path(), "kind.toml", "experiment = \"nope\"\n");
    let o = nullctl(&cfg, &[], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("experiment"));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = nullctl(&dir.path().join("absent.toml"), &[], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_check_exits_4_only_with_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "chk.toml", &format!("{MINIMAL}[check]\ncontrol_norm = 123.0\n"));
    let out = dir.path().join("out");
    let o = nullctl(&cfg, &["--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let o = nullctl(&cfg, &["--check", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("control norm"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("control.json")).unwrap()).unwrap();
    assert_eq!(json["checks"]["passed"], false);
}

#[test]
fn stalled_solver_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "stall.toml",
        r#"
experiment = "control"
[problem]
dim = 1
side = 4.0
modes = 64
intervals = 8
order = 2
epsilon = 1e-300
[problem.region]
kind = "stripes"
period = 2.0
lo = 0.0
hi = 1.0
[initial]
kind = "bump"
"#,
    );
    let out = dir.path().join("out");
    let o = nullctl(&cfg, &["--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("sweep[side=4"), "{}", stderr(&o));
    assert!(!out.join("control.csv").exists());
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.toml", &format!("{MINIMAL}[output]\ndir = \"from-config\"\nname = \"m\"\n"));
    let env_dir = dir.path().join("from-env");
    let flag_dir = dir.path().join("from-flag");
    let o = nullctl(&cfg, &[], Some(&env_dir));
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("m.csv").exists());
    let o = nullctl(&cfg, &["--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("m.csv").exists());
}

#[test]
fn seeded_runs_are_byte_identical_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sfuc.toml",
        r#"
experiment = "sfuc"
[sfuc]
dim = 1
g = 1.0
delta = 0.2
energies = [0.1, 20.0, 40.0]
sides = [4.0, 8.0]
modes_per_unit = 3
random_centers = true
"#,
    );
    let run = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = nullctl(&cfg, &["--seed", seed, "--out", out.to_str().unwrap()], None);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (std::fs::read(out.join("sfuc.csv")).unwrap(), std::fs::read(out.join("sfuc.json")).unwrap())
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
    // E = 0.1 lies below the first eigenvalue on both boxes.
    let csv = String::from_utf8(a.0).unwrap();
    let vacuous: Vec<&str> = csv.lines().filter(|l| l.ends_with(",true")).collect();
    assert_eq!(vacuous.len(), 2, "{csv}");
    assert!(vacuous.iter().all(|l| l.contains(",1e-1,") && l.contains(",0,,")));
}

#[test]
fn energy_above_resolved_spectrum_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sfuc.toml",
        r#"
experiment = "sfuc"
[sfuc]
dim = 1
g = 1.0
delta = 0.25
energies = [500.0]
sides = [4.0]
modes_per_unit = 2
"#,
    );
    let o = nullctl(&cfg, &[], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sfuc.energies"), "{}", stderr(&o));
}

#[test]
fn shipped_configs_parse() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut kinds = Vec::new();
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let cfg = nullctl_cli::RunConfig::parse(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        kinds.push(cfg.experiment().name());
    }
    kinds.sort_unstable();
    kinds.dedup();
    assert_eq!(kinds, ["control", "cost-bounds", "exhaust", "mc-exit", "semigroup-diff", "sfuc"]);
}
