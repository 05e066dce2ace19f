use std::process::Command;

use hhorder::harness::{run_theorem_suite, Render, SuiteResult, ThresholdResult, Format};

fn hhorder(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hhorder"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn suite_passes_and_exits_zero() {
    let (code, stdout, _) = hhorder(&["suite"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.ends_with("0 failed\n"));
    assert!(!stdout.contains("FAIL "));
}

#[test]
fn suite_json_round_trips_and_is_deterministic() {
    let (_, first, _) = hhorder(&["suite", "--format", "json"]);
    let (_, second, _) = hhorder(&["--format", "json", "suite"]);
    assert_eq!(first, second);
    let parsed: SuiteResult = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed, run_theorem_suite());
    assert_eq!(parsed.render(Format::Json).unwrap(), first);
}

#[test]
fn suite_claim_ids_are_unique() {
    let suite = run_theorem_suite();
    let mut ids: Vec<&str> = suite
        .claims
        .iter()
        .map(|c| c.id.as_str())
        .chain(suite.thresholds.iter().map(|t| t.id.as_str()))
        .collect();
    let n = ids.len();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), n);
}

#[test]
fn regime_csv_has_27_rows() {
    let (code, stdout, _) = hhorder(&["regime", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 28);
    assert!(lines[0].starts_with("parameter,target,relation,"));
    assert!(lines.contains(&"4,midpoint,Incomparable,true,true,mixed,1/4,1/96,1/2,-1/24"));
    assert!(lines.iter().any(|l| l.starts_with("-10,trapezoid,Incomparable,")));
}

#[test]
fn compare_reports_witnesses() {
    let (code, stdout, _) = hhorder(&["compare", "T:a=4", "midpoint"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("T:a=4 incomparable midpoint\n"));
    assert!(stdout.contains("witness max(t-1/4, 0): gap 1/96"));
    let (_, csv, _) = hhorder(&["compare", "T:a=6", "mid", "--format", "csv"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "T:a=6,midpoint,LessOrEqual,true,true,nonnegative,3,,,,");
}

#[test]
fn threshold_command() {
    let (code, stdout, _) = hhorder(&["threshold", "T", "trapezoid", "LE", "-10", "0", "--format", "json"]);
    assert_eq!(code, 0);
    let r: ThresholdResult = serde_json::from_str(&stdout).unwrap();
    assert_eq!(r.bracket.exact.unwrap(), hhorder::rational::int(-6));
    let (code, _, stderr) = hhorder(&["threshold", "T", "uniform", "LE", "1", "5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("no bracket"));
}

#[test]
fn sample_g_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let (code, stdout, _) = hhorder(&["sample-g", "T:a=4", "midpoint", "-o", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "x,G");
    assert_eq!(lines.len(), 1025);
    assert_eq!(lines[1], "0.00000000000000e0,0.00000000000000e0");
}

#[test]
fn spot_check_uses_the_seed() {
    let (code, a, _) = hhorder(&["spot-check", "davg", "uniform", "--count", "20", "--seed", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let (_, b, _) = hhorder(&["spot-check", "davg", "uniform", "--count", "20", "--seed", "3", "--format", "csv"]);
    let (_, c, _) = hhorder(&["spot-check", "davg", "uniform", "--count", "20", "--seed", "4", "--format", "csv"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.lines().nth(1).unwrap().contains(",0,"));
}

#[test]
fn bad_input_is_an_error() {
    let (code, _, stderr) = hhorder(&["compare", "T:a=0.5", "midpoint"]);
    assert_eq!(code, 2);
    assert!(stderr.starts_with("error:"));
    let (code, _, _) = hhorder(&["compare", "S1:alpha=1", "midpoint"]);
    assert_eq!(code, 2);
}
