use std::fs;
use std::path::{Path, PathBuf};

use spacey::{fixtures, io as sio};
use spacey_cli::{run, EXIT_INVALID, EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn srw(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("srw").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const POWER_DIVERGENT: &str = "srw-hypermatrix v1 order=3 dim=2\n0 1 1 1\n1 0 0 0\n";

#[test]
fn check_reports_validity_and_property_b() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", POWER_DIVERGENT);
    let r = srw(&["check", s(&h)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.stdout, "valid=true property_b=true\n");

    let urn = write(
        &dir,
        "urn.txt",
        &sio::format_hypermatrix(&fixtures::polya_urn()),
    );
    assert_eq!(
        srw(&["check", s(&urn)]).stdout,
        "valid=true property_b=true\n"
    );

    let ident = write(
        &dir,
        "id.txt",
        "srw-hypermatrix v1 order=3 dim=2\n1 0 1 0\n0 1 0 1\n",
    );
    assert_eq!(
        srw(&["check", s(&ident)]).stdout,
        "valid=true property_b=false\n"
    );

    let bad = write(
        &dir,
        "bad.txt",
        "srw-hypermatrix v1 order=3 dim=2\n0 1 1 1\n1 0 0 0.5\n",
    );
    let r = srw(&["check", s(&bad)]);
    assert_eq!(r.code, EXIT_INVALID);
    assert_eq!(r.stdout, "valid=false\n");
    assert!(r.stderr.contains("column 3"));
}

#[test]
fn power_method_fails_strictly_and_euler_converges() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", POWER_DIVERGENT);
    let r = srw(&["--strict", "stationary", s(&h), "--method", "power"]);
    assert_eq!(r.code, EXIT_NOT_CONVERGED);
    assert!(r.stderr.contains("converged=false"));
    // Without --strict non-convergence is only reported.
    assert_eq!(
        srw(&["stationary", s(&h), "--method", "power"]).code,
        EXIT_OK
    );

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for method in ["euler", "auto"] {
        let r = srw(&["--strict", "stationary", s(&h), "--method", method]);
        assert_eq!(r.code, EXIT_OK);
        let x: Vec<f64> = r
            .stdout
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert!((x[0] - golden).abs() < 1e-9 && (x[1] - (1.0 - golden)).abs() < 1e-9);
    }
}

#[test]
fn stationary_trace_is_tsv() {
    let dir = TempDir::new().unwrap();
    let h = write(
        &dir,
        "h.txt",
        &sio::format_hypermatrix(&fixtures::four_state_r1()),
    );
    let trace = dir.path().join("trace.tsv");
    let r = srw(&[
        "stationary",
        s(&h),
        "--method",
        "power",
        "--alpha",
        "0.4",
        "--trace",
        s(&trace),
    ]);
    assert_eq!(r.code, EXIT_OK);
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration\tresidual"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (i, v) = l.split_once('\t').unwrap();
            (i.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().enumerate().all(|(k, (i, _))| *i == k + 1));
    assert!(rows.last().unwrap().1 <= 1e-10);
}

#[test]
fn surfer_with_teleportation_file() {
    let dir = TempDir::new().unwrap();
    let h = write(
        &dir,
        "h.txt",
        &sio::format_hypermatrix(&fixtures::four_state_r1()),
    );
    let v = write(&dir, "v.txt", "0.1 0.2 0.3 0.4\n");
    let r = srw(&[
        "stationary",
        s(&h),
        "--method",
        "euler",
        "--alpha",
        "0.3",
        "--telep",
        s(&v),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let short = write(&dir, "short.txt", "0.5 0.5\n");
    let r = srw(&["stationary", s(&h), "--alpha", "0.3", "--telep", s(&short)]);
    assert_eq!(r.code, EXIT_INVALID);
    assert_eq!(
        srw(&["stationary", s(&h), "--telep", s(&v)]).code,
        EXIT_INVALID
    );
}

#[test]
fn simulate_is_reproducible_and_feeds_learn_and_check() {
    let dir = TempDir::new().unwrap();
    let h = write(
        &dir,
        "h.txt",
        &sio::format_hypermatrix(&fixtures::four_state_r1()),
    );
    let args = [
        "simulate",
        s(&h),
        "--steps",
        "100",
        "--seed",
        "7",
        "--start",
        "1",
        "--count",
        "4",
    ];
    let a = srw(&args);
    let b = srw(&args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 4);
    assert!(a
        .stdout
        .lines()
        .all(|l| l.split_whitespace().count() == 101 && l.starts_with("1 ")));

    let traj = write(&dir, "traj.txt", &a.stdout);
    let fitted = dir.path().join("fit.txt");
    let r = srw(&[
        "learn",
        s(&traj),
        "--dim",
        "4",
        "--max-iters",
        "200",
        "--out",
        s(&fitted),
    ]);
    assert!(r.code == EXIT_OK, "{}", r.stderr);
    let trace: Vec<f64> = r
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(
        srw(&["check", s(&fitted)]).stdout,
        "valid=true property_b=true\n"
    );

    let r = srw(&[
        "evaluate",
        s(&traj),
        "--models",
        &format!("zeroth,first,second,srw={}", s(&fitted)),
        "--train",
        s(&traj),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let names: Vec<&str> = r
        .stdout
        .lines()
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(names, ["model", "zeroth", "first", "second", "srw"]);
}

#[test]
fn simulate_to_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", POWER_DIVERGENT);
    let out = dir.path().join("t.txt");
    let a = srw(&[
        "simulate",
        s(&h),
        "--steps",
        "30",
        "--seed",
        "1",
        "--start",
        "2",
    ]);
    let b = srw(&[
        "simulate",
        s(&h),
        "--steps",
        "30",
        "--seed",
        "1",
        "--start",
        "2",
        "--out",
        s(&out),
    ]);
    assert_eq!(b.stdout, "");
    assert_eq!(fs::read_to_string(&out).unwrap(), a.stdout);
    assert_eq!(
        srw(&["simulate", s(&h), "--steps", "3", "--start", "3"]).code,
        EXIT_INVALID
    );
}

#[test]
fn dynamics2_golden() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", POWER_DIVERGENT);
    let r = srw(&["dynamics2", s(&h), "--points", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(
        r.stdout,
        "x\tf\n0\t1e0\n0.5\t1.6666666666666663e-1\n1\t-5e-1\n"
    );
    assert!(r.stderr.contains("stable"));
    let r = srw(&["dynamics2", s(&h)]);
    assert_eq!(r.stdout.lines().count(), 402);
}

#[test]
fn fixed_points_of_r1_include_the_basis_vectors() {
    let dir = TempDir::new().unwrap();
    let h = write(
        &dir,
        "h.txt",
        &sio::format_hypermatrix(&fixtures::four_state_r1()),
    );
    let r = srw(&["fixed-points", s(&h), "--starts", "20", "--seed", "0"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.lines().any(|l| l == "0 1 0 0"));
    assert!(r.stdout.lines().any(|l| l == "0 0 1 0"));
}

#[test]
fn pair_stationary_output() {
    let dir = TempDir::new().unwrap();
    let h = write(
        &dir,
        "h.txt",
        &sio::format_hypermatrix(&fixtures::second_order_example()),
    );
    let r = srw(&["pair-stationary", s(&h)]);
    assert_eq!(r.code, EXIT_OK);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "X");
    assert_eq!(lines[4], "marginal");
    assert_eq!(lines[6], "column_marginal");
    let urn = write(
        &dir,
        "urn.txt",
        &sio::format_hypermatrix(&fixtures::polya_urn()),
    );
    assert_eq!(srw(&["pair-stationary", s(&urn)]).code, EXIT_INVALID);
}

#[test]
fn evaluate_argument_errors() {
    let dir = TempDir::new().unwrap();
    let traj = write(&dir, "t.txt", "1 2 1 2 1\n");
    assert_eq!(
        srw(&["evaluate", s(&traj), "--models", "first"]).code,
        EXIT_INVALID
    );
    assert_eq!(
        srw(&["evaluate", s(&traj), "--models", "srw"]).code,
        EXIT_INVALID
    );
    assert_eq!(
        srw(&["evaluate", s(&traj), "--models", "nope"]).code,
        EXIT_INVALID
    );
    let r = srw(&[
        "evaluate",
        s(&traj),
        "--models",
        "first",
        "--train",
        s(&traj),
    ]);
    assert_eq!(r.stdout, "model\trmse\nfirst\t0\n");
}

#[test]
fn io_and_usage_errors() {
    assert_eq!(srw(&["check", "/nonexistent/h.txt"]).code, EXIT_IO);
    assert_eq!(srw(&["frobnicate"]).code, EXIT_INVALID);
    assert_eq!(srw(&["stationary"]).code, EXIT_INVALID);
    let r = srw(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("pair-stationary"));
}
