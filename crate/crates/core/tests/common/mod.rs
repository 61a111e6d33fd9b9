#![allow(dead_code)]

use chrono::{DateTime, Duration, TimeZone, Utc};
use debtjudge_core::MetricSnapshot;
use proptest::prelude::*;

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 3, 2, 8, 0, 0).unwrap()
}

/// Coarse grids so that ties on score and on early cascade fields happen often.
pub fn snapshot_strategy() -> impl Strategy<Value = MetricSnapshot> {
    (
        (1u64..4000, 0u64..300, 0u32..12, 0u32..8, 0u32..60),
        (0u32..5, 0u32..5, 0u64..400, 0u64..200, 0u64..600),
        (0u64..4, 0u64..3, 0u64..50, 0u64..50, 0u64..50),
    )
        .prop_map(|((ncloc, smells, tdr, dup, comment), (sec, rel, cognitive, functions, extra), (bugs, vulns, v, b, m))| {
            let violations = v + b + m;
            MetricSnapshot {
                project_key: "p".into(),
                analysis_id: "a".into(),
                analysed_at: t0(),
                ncloc,
                code_smells: smells,
                sqale_debt_ratio: tdr as f64 * 0.5,
                duplicated_lines_density: dup as f64 * 1.25,
                comment_lines_density: comment as f64 * 0.5,
                security_remediation_effort: sec as f64 * 30.0,
                reliability_remediation_effort: rel as f64 * 15.0,
                cognitive_complexity: cognitive,
                cyclomatic_complexity: functions + extra,
                functions,
                bugs,
                vulnerabilities: vulns,
                violations,
                blocker_violations: b,
                major_violations: m,
            }
        })
}

pub fn at_minute(m: i64) -> DateTime<Utc> {
    t0() + Duration::minutes(m)
}

/// Deterministic valid snapshot varying with `i`.
pub fn snapshot_like(i: usize) -> MetricSnapshot {
    MetricSnapshot {
        project_key: format!("p{i}"),
        analysis_id: format!("a{i}"),
        analysed_at: t0(),
        ncloc: 1000 + i as u64,
        code_smells: 10,
        sqale_debt_ratio: 1.0,
        duplicated_lines_density: 0.0,
        comment_lines_density: 12.0,
        security_remediation_effort: 0.0,
        reliability_remediation_effort: 0.0,
        cognitive_complexity: 50,
        cyclomatic_complexity: 90,
        functions: 40,
        bugs: 0,
        vulnerabilities: 0,
        violations: 10,
        blocker_violations: 1,
        major_violations: 2,
    }
}
