use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::{Duration, TimeZone, Utc};
use debtjudge_core::{ContestEngine, EventLog, GateStatus, MetricSnapshot, ScoreWeights};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debtjudge"))
        .args(args)
        .env_remove("DEBTJUDGE_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn snapshot(team: &str, analysis: &str, tdr: f64) -> MetricSnapshot {
    MetricSnapshot {
        project_key: team.into(),
        analysis_id: analysis.into(),
        analysed_at: Utc.with_ymd_and_hms(2020, 4, 1, 9, 0, 0).unwrap(),
        ncloc: 1000,
        code_smells: 20,
        sqale_debt_ratio: tdr,
        duplicated_lines_density: 0.0,
        comment_lines_density: 10.0,
        security_remediation_effort: 0.0,
        reliability_remediation_effort: 0.0,
        cognitive_complexity: 100,
        cyclomatic_complexity: 200,
        functions: 80,
        bugs: 0,
        vulnerabilities: 0,
        violations: 20,
        blocker_violations: 0,
        major_violations: 5,
    }
}

/// Writes a contest log with one submission per `(team, tdr)` pair.
fn seed_log(dir: &Path, teams: &[(&str, f64)]) {
    let (mut log, _) = EventLog::open(dir.join("events.jsonl")).unwrap();
    let mut engine = ContestEngine::new(ScoreWeights::default());
    let t0 = Utc.with_ymd_and_hms(2020, 4, 1, 10, 0, 0).unwrap();
    for (i, (team, tdr)) in teams.iter().enumerate() {
        let ev = engine
            .prepare_submission(team, snapshot(team, &format!("an-{i}"), *tdr), GateStatus::Passed, t0 + Duration::hours(i as i64))
            .unwrap();
        log.append(&ev).unwrap();
        engine.apply(&ev).unwrap();
    }
}

#[test]
fn penalty_grading_reproduces_distribution() {
    let o = run(&[
        "grade",
        "--measures",
        fixture("penalty_cohort").to_str().unwrap(),
        "--gate",
        fixture("penalty_gate.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["distribution"]["failed"], 6);
    assert_eq!(v["distribution"]["warning"], 6);
    assert_eq!(v["distribution"]["passed"], 1);
}

#[test]
fn empty_measures_directory_grades_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["grade", "--measures", dir.path().to_str().unwrap(), "--gate", fixture("penalty_gate.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("distribution: failed 0, warning 0, passed 0"));
}

#[test]
fn missing_gate_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["grade", "--measures", dir.path().to_str().unwrap(), "--gate", "/nonexistent/gate.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gate_without_conditions_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let gate = dir.path().join("gate.toml");
    std::fs::write(&gate, "[penalty]\nwarning_fraction = 0.05\n").unwrap();
    let o = run(&["grade", "--measures", dir.path().to_str().unwrap(), "--gate", gate.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_export_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"project_key\": \"x\", \"measures\": [").unwrap();
    let o = run(&["grade", "--measures", dir.path().to_str().unwrap(), "--gate", fixture("penalty_gate.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.json"));
}

#[test]
fn missing_dataset_exits_2() {
    let o = run(&["report", "comparison", "--dataset", "/nonexistent/cohort.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn machine_reports_parse() {
    for kind in ["normality", "comparison", "summary"] {
        let o = run(&["report", kind, "--dataset", fixture("sample_cohort.csv").to_str().unwrap(), "--format", "machine"]);
        assert!(o.status.success(), "{kind}: {}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["report"], kind);
        assert_eq!(v["penalising_n"], 11);
        assert_eq!(v["rewarding_n"], 13);
        let expected = if kind == "comparison" { 8 } else { 16 };
        assert_eq!(v["results"].as_array().unwrap().len(), expected);
    }
}

#[test]
fn report_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.txt");
    let o = run(&[
        "report",
        "normality",
        "--dataset",
        fixture("sample_cohort.csv").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(std::fs::read_to_string(out).unwrap().contains("Penalising W"));
}

#[test]
fn corrupt_log_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    seed_log(dir.path(), &[("team-a", 1.0)]);
    let log = dir.path().join("events.jsonl");
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str("{not json\n");
    std::fs::write(&log, text).unwrap();
    let o = run(&["export", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn award_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    seed_log(dir.path(), &[("team-a", 1.0), ("team-b", 2.0), ("team-c", 3.0), ("team-d", 4.0)]);
    let data = dir.path().to_str().unwrap();
    for team in ["team-a", "team-b", "team-c", "team-d"] {
        let o = run(&["qualify", team, "--gate-ok", "--use-cases-ok", "--data-dir", data]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let policy = dir.path().join("policy.toml");
    std::fs::write(&policy, "[reward]\nbonus_schedule = [0.9, 0.6, 0.3]\nmax_grade = 10.0\n").unwrap();
    let args = ["award", "--policy", policy.to_str().unwrap(), "--data-dir", data, "--format", "json"];
    let first = run(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
    let v: Value = serde_json::from_str(&stdout(&first)).unwrap();
    let bonuses: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["bonus"].as_f64().unwrap()).collect();
    assert_eq!(bonuses, vec![0.9, 0.6, 0.3, 0.0]);
}

#[test]
fn all_unqualified_prints_empty_bonus_table() {
    let dir = tempfile::tempdir().unwrap();
    seed_log(dir.path(), &[("team-a", 1.0), ("team-b", 2.0)]);
    let policy = dir.path().join("policy.toml");
    std::fs::write(&policy, "").unwrap();
    let o = run(&["award", "--policy", policy.to_str().unwrap(), "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("no bonuses awarded"));
}

#[test]
fn qualify_unknown_team_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    seed_log(dir.path(), &[("team-a", 1.0)]);
    let o = run(&["qualify", "team-z", "--gate-ok", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn export_csv_and_bad_as_of() {
    let dir = tempfile::tempdir().unwrap();
    seed_log(dir.path(), &[("team-a", 2.0), ("team-b", 1.0)]);
    let data = dir.path().to_str().unwrap();
    let o = run(&["export", "--format", "csv", "--data-dir", data]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("1,team-b,"));
    let o = run(&["export", "--as-of", "yesterday", "--data-dir", data]);
    assert_eq!(o.status.code(), Some(1));
}
