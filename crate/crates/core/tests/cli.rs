use std::path::Path;
use std::process::{Command, Output};

use okamoto::export::read_points_csv;

fn okamoto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okamoto"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn eval_identity_parameter() {
    let out = okamoto(&["eval", "--a", "1/3", "--x", "0.7317"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let v: f64 = field(&text, "value").parse().unwrap();
    assert!((v - 0.7317).abs() < 1e-12, "{v}");
    assert!(text.starts_with("a: "));
    assert_eq!(field(&text, "seed"), "1");
}

#[test]
fn eval_cantor_midpoint() {
    let out = okamoto(&["eval", "--a", "0.5", "--x", "0.5"]);
    assert!(out.status.success());
    let v: f64 = field(&stdout(&out), "value").parse().unwrap();
    assert_eq!(v, 0.5);
}

#[test]
fn eval_exact_rational() {
    let out = okamoto(&["eval", "--a", "2/3", "--x", "1/3", "--exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "value"), "2/3");
    assert_eq!(field(&text, "mode"), "exact");
}

#[test]
fn eval_triadic_notation() {
    let out = okamoto(&["eval", "--a", "3/5", "--x", "2/3^1", "--exact"]);
    assert_eq!(field(&stdout(&out), "value"), "2/5");
}

#[test]
fn too_few_digits_is_a_numerical_failure() {
    let out = okamoto(&["eval", "--a", "0.6", "--x", "0.3", "--digits", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
}

#[test]
fn bad_parameter_is_a_usage_failure() {
    assert_eq!(okamoto(&["eval", "--a", "1.5", "--x", "0.3"]).status.code(), Some(1));
    assert_eq!(okamoto(&["eval", "--a", "0.6"]).status.code(), Some(1));
    assert_eq!(okamoto(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(okamoto(&["--help"]).status.code(), Some(0));
}

#[test]
fn a0_reports_certified_root() {
    let out = okamoto(&["a0", "--tol", "1e-14"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let a0: f64 = field(&text, "a0").parse().unwrap();
    let residual: f64 = field(&text, "residual").parse().unwrap();
    assert!(a0 > 0.5592 && a0 < 0.5593);
    assert!(residual < 1e-12);
}

#[test]
fn classify_above_two_thirds() {
    let text = stdout(&okamoto(&["classify", "--a", "0.7"]));
    assert!(text.contains("nowhere differentiable"), "{text}");
    let text = stdout(&okamoto(&["classify", "--a", "1/3", "--exact"]));
    assert_eq!(field(&text, "region"), "identity");
}

#[test]
fn dim_reports_slope_near_reference() {
    let out = okamoto(&["dim", "--a", "2/3", "--levels", "1..10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let slope_line = text.lines().find(|l| l.starts_with("# slope=")).unwrap();
    let slope: f64 = slope_line["# slope=".len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 1.4649735207179272).abs() < 1e-6, "{slope}");
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 11);
}

#[test]
fn iterate_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f4.csv");
    let out = okamoto(&[
        "iterate", "--a", "0.6", "--level", "4", "-o", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let file = read_points_csv(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(file.points.len(), 82);
    assert_eq!(file.header.a, "0.6");
    assert_eq!(file.points[1], (1.0 / 81.0, 0.6f64.powi(4)));
    assert_eq!(file.points[81], (1.0, 1.0));
}

#[test]
fn iterate_svg_has_one_polyline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.svg");
    okamoto(&["iterate", "--a", "2/3", "--level", "3", "--format", "svg", "-o", path.to_str().unwrap()]);
    let svg = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.contains("a=0.6666666666666666 mode=float"));
}

#[test]
fn chaos_output_is_seed_reproducible_and_thread_independent() {
    let base = ["chaos", "--a", "2/3", "--points", "2000", "--chains", "4"];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        stdout(&okamoto(&args))
    };
    let one = run(&["--seed", "9", "--threads", "1"]);
    assert_eq!(one, run(&["--seed", "9", "--threads", "4"]));
    assert_ne!(one, run(&["--seed", "10"]));
    assert!(one.starts_with("# a=0.6666666666666666 mode=float seed=9"));
}

#[test]
fn digit_experiment_reports_mean() {
    let text = stdout(&okamoto(&["experiment", "digits", "--samples", "50", "--n", "600"]));
    let mean: f64 = field(&text, "mean").parse().unwrap();
    assert!((mean - 1.0 / 3.0).abs() < 0.02, "{mean}");
}
