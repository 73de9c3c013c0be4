use std::path::Path;
use std::process::{Command, Output};

fn wqed(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wqed"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("WQED_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SWEEP: &str = r#"{
  "geometry": {"kind": "nested", "spacing_over_pi": 0.01},
  "outputs": ["concurrence", "g2_zero", "mandel_q"],
  "sweep": [
    {"parameter": "drive.rabi", "min": 0.5, "max": 2.5, "points": 5},
    {"parameter": "geometry.spacing_over_pi", "min": 0.01, "max": 0.05, "points": 3}
  ]
}"#;

#[test]
fn sweep_csv_is_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SWEEP);
    let one = wqed(&["sweep", &cfg], Some("1"));
    let four = wqed(&["sweep", &cfg], Some("4"));
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega0,kdx_over_pi,concurrence,g2_zero,mandel_q"));
    assert_eq!(lines.count(), 15);
}

#[test]
fn sweep_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SWEEP);
    let out = dir.path().join("out.csv");
    let o = wqed(&["sweep", &cfg, "--out", out.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("omega0,"));
}

#[test]
fn scenario_writes_tables_with_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = wqed(&["scenario", "fig2", "--set", "sweep.points=5", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let nested = std::fs::read_to_string(dir.path().join("fig2_nested.csv")).unwrap();
    assert_eq!(
        nested.lines().next(),
        Some("kdx_over_pi,rate_e_plus,rate_e_minus,rate_plus_g,rate_minus_g")
    );
    assert_eq!(nested.lines().count(), 6);
    assert!(dir.path().join("fig2_small.csv").exists());
}

#[test]
fn steady_reports_entanglement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"geometry": {"kind": "nested", "spacing_over_pi": 0.01}, "drive": {"rabi": 1.5}}"#,
    );
    let o = wqed(&["steady", &cfg], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let c: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("concurrence = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(c > 0.99);
    assert!(text.contains("row,col,re,im"));
}

#[test]
fn rates_and_slh_check_succeed() {
    let o = wqed(&["rates", "--geometry", "nested", "--spacing-over-pi", "0.01"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lifetime_undriven_mode = "));
    let o = wqed(&["slh-check", "--geometry", "braided", "--grid", "10"], None);
    assert!(o.status.success());
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    // config errors
    let unknown = write(dir.path(), "u.json", r#"{"geometry": {"kind": "nested", "spacing_over_pi": 0.1}, "extra": 1}"#);
    assert_eq!(wqed(&["steady", &unknown], None).status.code(), Some(2));
    assert_eq!(wqed(&["scenario", "fig9"], None).status.code(), Some(2));
    assert_eq!(wqed(&["scenario", "fig1c", "--set", "drive.nope=1"], None).status.code(), Some(2));
    assert_eq!(wqed(&["rates", "--geometry", "spiral", "--spacing-over-pi", "0.1"], None).status.code(), Some(2));
    // physics error: zero-spacing small atoms have no unique steady state
    let dark = write(dir.path(), "d.json", r#"{"geometry": {"kind": "small", "spacing_over_pi": 0}}"#);
    assert_eq!(wqed(&["steady", &dark], None).status.code(), Some(3));
    // I/O error
    let missing = dir.path().join("missing.json");
    assert_eq!(wqed(&["sweep", missing.to_str().unwrap()], None).status.code(), Some(4));
}
