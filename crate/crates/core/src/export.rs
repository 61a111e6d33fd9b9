//! Leaderboard export as JSON documents and comma-separated tables.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::contest::LeaderboardEntry;
use crate::gate::GateStatus;

pub const API_SCHEMA_VERSION: u32 = 1;

/// One leaderboard line with the score, its addends and every tie-break column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub team: String,
    pub qualified: bool,
    pub submissions_count: usize,
    pub submission_id: u64,
    pub analysis_id: String,
    pub received_at: DateTime<Utc>,
    pub gate_status: GateStatus,
    pub score: f64,
    pub tdr: f64,
    pub dcd: f64,
    pub pb_re: f64,
    pub sv_re: f64,
    pub technical_debt_ratio: f64,
    pub smell_severity: f64,
    pub duplicated_lines_density: f64,
    pub bugs: u64,
    pub vulnerabilities: u64,
    pub cyclomatic_complexity: u64,
    pub cognitive_complexity: u64,
    pub comment_density: f64,
}

impl From<&LeaderboardEntry> for LeaderboardRow {
    fn from(e: &LeaderboardEntry) -> Self {
        let b = &e.best;
        Self {
            rank: e.rank,
            team: e.team.clone(),
            qualified: e.qualified,
            submissions_count: e.submissions_count,
            submission_id: b.submission_id,
            analysis_id: b.snapshot.analysis_id.clone(),
            received_at: b.received_at,
            gate_status: b.gate_status,
            score: b.score.value,
            tdr: b.score.components.tdr,
            dcd: b.score.components.dcd,
            pb_re: b.score.components.pb_re,
            sv_re: b.score.components.sv_re,
            technical_debt_ratio: b.key.technical_debt_ratio,
            smell_severity: b.key.smell_severity,
            duplicated_lines_density: b.key.duplicated_lines_density,
            bugs: b.key.bugs,
            vulnerabilities: b.key.vulnerabilities,
            cyclomatic_complexity: b.key.cyclomatic_complexity,
            cognitive_complexity: b.key.cognitive_complexity,
            comment_density: b.key.comment_density,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardDocument {
    pub schema_version: u32,
    pub as_of: Option<DateTime<Utc>>,
    pub entries: Vec<LeaderboardRow>,
}

impl LeaderboardDocument {
    pub fn new(entries: &[LeaderboardEntry], as_of: Option<DateTime<Utc>>) -> Self {
        Self { schema_version: API_SCHEMA_VERSION, as_of, entries: entries.iter().map(LeaderboardRow::from).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("leaderboard serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.entries {
            w.serialize(row).expect("in-memory csv write");
        }
        if self.entries.is_empty() {
            // Keep the header even for an empty contest.
            return format!("{}\n", CSV_HEADER.join(","));
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
    }
}

const CSV_HEADER: [&str; 21] = [
    "rank",
    "team",
    "qualified",
    "submissions_count",
    "submission_id",
    "analysis_id",
    "received_at",
    "gate_status",
    "score",
    "tdr",
    "dcd",
    "pb_re",
    "sv_re",
    "technical_debt_ratio",
    "smell_severity",
    "duplicated_lines_density",
    "bugs",
    "vulnerabilities",
    "cyclomatic_complexity",
    "cognitive_complexity",
    "comment_density",
];
