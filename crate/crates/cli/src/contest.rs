//! Commands over the persisted contest: qualification, awards, export.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use debtjudge_core::{
    apply_bonus, assign_rewards, ContestEngine, EventLog, LeaderboardDocument, PolicyConfig, Qualification,
};
use debtjudge_service::payload::parse_timestamp;
use debtjudge_service::ServiceConfig;
use serde::{Deserialize, Serialize};

use crate::{CliError, ExportFormat};

fn load_engine(cfg: &ServiceConfig) -> Result<ContestEngine, CliError> {
    let events = EventLog::read(cfg.log_path())?;
    ContestEngine::replay(cfg.weights, &events).map_err(|e| CliError::Io(format!("event log replay failed: {e}")))
}

/// Appends a qualification event for a team that has submitted.
///
/// Writes to the same log as the service; run it while the service is
/// stopped, or restart the service afterwards to pick the change up.
pub fn qualify(cfg: &ServiceConfig, team: &str, gate_ok: bool, use_cases_ok: bool) -> Result<Qualification, CliError> {
    let (mut log, events) = EventLog::open(cfg.log_path())?;
    let mut engine =
        ContestEngine::replay(cfg.weights, &events).map_err(|e| CliError::Io(format!("event log replay failed: {e}")))?;
    let event = engine.prepare_qualification(team, gate_ok, use_cases_ok)?;
    log.append(&event)?;
    engine.apply(&event)?;
    Ok(engine.qualification(team).expect("team exists"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AwardRow {
    pub rank: usize,
    pub team: String,
    pub qualified: bool,
    pub bonus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_grade: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AwardTable {
    pub max_grade: f64,
    pub rows: Vec<AwardRow>,
}

#[derive(Deserialize)]
struct GradeLine {
    team: String,
    grade: f64,
}

fn load_grades(path: &Path) -> Result<HashMap<String, f64>, CliError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{display}: {e}")))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut grades = HashMap::new();
    for line in rdr.deserialize::<GradeLine>() {
        let line = line.map_err(|e| CliError::Validation(format!("{display}: {e}")))?;
        if !(line.grade.is_finite() && line.grade >= 0.0) {
            return Err(CliError::Validation(format!("{display}: grade for {} must be non-negative", line.team)));
        }
        grades.insert(line.team, line.grade);
    }
    Ok(grades)
}

/// Bonus table over the final ranking. Pure with respect to the log, so
/// re-running gives the same table.
pub fn award(cfg: &ServiceConfig, policy_file: &Path, grades: Option<&Path>) -> Result<AwardTable, CliError> {
    let reward = PolicyConfig::load(policy_file)?.reward;
    let engine = load_engine(cfg)?;
    let grades = grades.map(load_grades).transpose()?;
    let ranking = engine.final_ranking();
    let awards = assign_rewards(&ranking, |t| engine.qualification(t).is_some_and(|q| q.qualified()), &reward);
    let rows = awards
        .into_iter()
        .map(|a| {
            let grade = grades.as_ref().and_then(|g| g.get(&a.team).copied());
            AwardRow {
                final_grade: grade.map(|g| apply_bonus(g, a.bonus, &reward)),
                grade,
                rank: a.rank,
                team: a.team,
                qualified: a.qualified,
                bonus: a.bonus,
            }
        })
        .collect();
    Ok(AwardTable { max_grade: reward.max_grade, rows })
}

impl AwardTable {
    /// Lists the teams that receive a bonus, then the skipped unqualified
    /// teams that ranked above the last bonus.
    pub fn render(&self) -> String {
        let awarded: Vec<&AwardRow> = self.rows.iter().filter(|r| r.bonus > 0.0).collect();
        let mut out = String::new();
        if awarded.is_empty() {
            out.push_str("no bonuses awarded\n");
        } else {
            let width = awarded.iter().map(|r| r.team.len()).max().unwrap_or(0).max(4);
            let _ = writeln!(out, "{:>4}  {:<width$}  {:>5}  {:>5}  {:>5}", "rank", "team", "bonus", "grade", "final");
            for r in &awarded {
                let g = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
                let _ = writeln!(out, "{:>4}  {:<width$}  {:>5.2}  {:>5}  {:>5}", r.rank, r.team, r.bonus, g(r.grade), g(r.final_grade));
            }
        }
        let last = awarded.last().map_or(usize::MAX, |r| r.rank);
        let skipped: Vec<&str> =
            self.rows.iter().filter(|r| !r.qualified && r.rank < last).map(|r| r.team.as_str()).collect();
        if !skipped.is_empty() {
            let _ = writeln!(out, "not qualified: {}", skipped.join(", "));
        }
        out
    }
}

pub fn export_leaderboard(cfg: &ServiceConfig, format: ExportFormat, as_of: Option<&str>) -> Result<String, CliError> {
    let as_of = as_of.map(parse_timestamp).transpose().map_err(|e| CliError::Validation(e.to_string()))?;
    let engine = load_engine(cfg)?;
    let doc = LeaderboardDocument::new(&engine.leaderboard(as_of), as_of);
    Ok(match format {
        ExportFormat::Json => doc.to_json() + "\n",
        ExportFormat::Csv => doc.to_csv(),
    })
}
