//! The `dirlab` binary: exit codes, CSV output and config handling.

use std::process::Command;

fn dirlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dirlab")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn set_build_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) = dirlab(&["set", "build", "-D", "set.depth=3", "-D", "name=\"c3\"", "--out-dir", out]);
    assert_eq!(code, 0);
    assert!(stdout.contains("set.build.gaps = 15"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("c3.set.build.csv")).unwrap();
    assert!(csv.starts_with("gap_start,gap_length,generation,unresolved\n"));
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "name = \"series\"\n[set]\nkind = \"cantor\"\nratio = 0.2\ndepth = 6\n[params]\nterms = 20\n").unwrap();
    let (code, stdout, _) = dirlab(&["capacity", "series", "-c", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("capacity.series.verdict = converges"), "{stdout}");
    let (code, stdout, _) = dirlab(&["capacity", "series", "-c", cfg.to_str().unwrap(), "-D", "set.ratio=", "-D", "set.rule=super_exponential", "-D", "set.depth=4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("capacity.series.verdict = diverges"), "{stdout}");
}

#[test]
fn hypotheses_not_met_exits_two() {
    let (code, stdout, _) = dirlab(&["capacity", "cyclic", "-D", "set.depth=12"]);
    assert_eq!(code, 2, "{stdout}");
    assert!(stdout.contains("hypotheses_not_met = mu(E_t) = O(h(t))"), "{stdout}");
    let (code, stdout, _) = dirlab(&["capacity", "cyclic", "-D", "set.kind=point"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("verdict = cyclic"));
}

#[test]
fn usage_errors() {
    let (code, _, err) = dirlab(&["set", "build", "-c", "/nonexistent/scenario.toml"]);
    assert_eq!(code, 64);
    assert!(err.contains("cannot read"));
    let (code, _, _) = dirlab(&["set", "build", "-D", "set.kind=torus"]);
    assert_eq!(code, 64);
    let (code, _, _) = dirlab(&["carleson", "nope"]);
    assert_eq!(code, 64);
    let (code, _, _) = dirlab(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn numerical_failure_exits_one() {
    // a point far inside the trusted floor of a shallow set
    let (code, _, err) = dirlab(&["dirichlet", "mu", "-D", "set.depth=2", "-D", "measure.kind=\"point_mass\"", "-D", "measure.theta=3.14", "-D", "measure.mass=1.0"]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("numerical failure"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = |t: &'static str| ["--threads", t, "dirichlet", "local", "-D", "set.depth=8"];
    let (c1, one, _) = dirlab(&args("1"));
    let (c3, three, _) = dirlab(&args("3"));
    assert_eq!((c1, c3), (0, 0));
    assert_eq!(one, three);
}

#[test]
fn tol_flag_reaches_quadrature() {
    let (code, _, err) = dirlab(&["--tol=-1", "set", "stats"]);
    assert_eq!(code, 64, "{err}");
    assert!(err.contains("tolerances must be positive"), "{err}");
}

#[test]
fn experiments_are_listed_and_run() {
    let (code, stdout, _) = dirlab(&["experiment", "list"]);
    assert_eq!(code, 0);
    assert!(stdout.lines().any(|l| l == "cantor-threshold"));
    let (code, stdout, _) = dirlab(&["experiment", "run", "cantor-threshold", "-D", "set.depth=10"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("dirichlet.threshold.monotone = true"), "{stdout}");
}
