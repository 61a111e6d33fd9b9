use chrono::{DateTime, TimeZone, Utc};

use crate::metrics::MetricSnapshot;

pub fn at(day: u32, hour: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 4, day, hour, 0, 0).unwrap()
}

pub fn snapshot() -> MetricSnapshot {
    MetricSnapshot {
        project_key: "sd-19-20-01".into(),
        analysis_id: "a-1".into(),
        analysed_at: at(1, 0),
        ncloc: 1000,
        code_smells: 20,
        sqale_debt_ratio: 1.0,
        duplicated_lines_density: 1.0,
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

/// Snapshot whose default-weight score equals `tdr` (duplication and
/// remediation efforts are zero).
pub fn snapshot_for(team: &str, analysis_id: &str, tdr: f64) -> MetricSnapshot {
    MetricSnapshot {
        project_key: team.into(),
        analysis_id: analysis_id.into(),
        sqale_debt_ratio: tdr,
        duplicated_lines_density: 0.0,
        ..snapshot()
    }
}
