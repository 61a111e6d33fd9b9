//! Contest bookkeeping: submissions, each team's best record, the ranking,
//! qualification flags and historical positions.
//!
//! The engine is a state machine driven by [`Event`]s. Writers first
//! `prepare_*` an event (pure validation against current state), persist
//! it, then `apply` it. Replaying the same events in order rebuilds the
//! same state.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Days, NaiveDate, NaiveTime, TimeDelta, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::GateStatus;
use crate::grading::Qualification;
use crate::metrics::{
    compare_entries, compute_derived, compute_score, tiebreak_key, DerivedMetrics, MetricSnapshot, MetricsError,
    Score, ScoreWeights, TieBreakKey,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContestError {
    #[error("analysis {0} was already submitted")]
    DuplicateAnalysis(String),
    #[error("unknown team {0}")]
    UnknownTeam(String),
    #[error("invalid range: {from} is after {to}")]
    InvalidRange { from: DateTime<Utc>, to: DateTime<Utc> },
    #[error("event out of sequence: expected submission {expected}, got {got}")]
    OutOfSequence { expected: u64, got: u64 },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Persisted form of an accepted submission. Score, derived metrics and the
/// tie-break key are recomputed from the snapshot on apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRecord {
    pub submission_id: u64,
    pub team: String,
    pub received_at: DateTime<Utc>,
    pub gate_status: GateStatus,
    pub snapshot: MetricSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualificationRecord {
    pub team: String,
    pub gate_ok: bool,
    pub use_cases_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Submission(SubmissionRecord),
    Qualification(QualificationRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub submission_id: u64,
    pub team: String,
    pub snapshot: MetricSnapshot,
    pub derived: DerivedMetrics,
    pub score: Score,
    pub key: TieBreakKey,
    pub received_at: DateTime<Utc>,
    pub gate_status: GateStatus,
}

impl Submission {
    fn ranks_before(&self, other: &Submission) -> bool {
        match compare_entries((&self.score, &self.key), (&other.score, &other.key)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.submission_id < other.submission_id,
        }
    }

    fn ranking_cmp(&self, other: &Submission) -> Ordering {
        compare_entries((&self.score, &self.key), (&other.score, &other.key))
            .then(self.submission_id.cmp(&other.submission_id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub team: String,
    pub best: Submission,
    pub qualified: bool,
    pub submissions_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionHistory {
    pub team: String,
    pub series: Vec<(NaiveDate, usize)>,
}

/// Result of applying a submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitOutcome {
    pub submission_id: u64,
    pub team: String,
    pub rank: usize,
    pub previous_rank: Option<usize>,
    pub best_improved: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamActivity {
    pub team: String,
    pub submissions: usize,
    pub first_at: DateTime<Utc>,
    pub last_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub total_submissions: usize,
    pub teams: Vec<TeamActivity>,
}

#[derive(Debug, Clone)]
struct TeamState {
    best: usize,
    count: usize,
    first_at: DateTime<Utc>,
    last_at: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct ContestEngine {
    weights: ScoreWeights,
    submissions: Vec<Submission>,
    analysis_ids: HashSet<String>,
    teams: BTreeMap<String, TeamState>,
    qualifications: BTreeMap<String, QualificationRecord>,
    /// Team names in current rank order.
    ranking: Vec<String>,
}

impl Default for ContestEngine {
    fn default() -> Self {
        Self::new(ScoreWeights::default())
    }
}

impl ContestEngine {
    pub fn new(weights: ScoreWeights) -> Self {
        Self {
            weights,
            submissions: Vec::new(),
            analysis_ids: HashSet::new(),
            teams: BTreeMap::new(),
            qualifications: BTreeMap::new(),
            ranking: Vec::new(),
        }
    }

    /// Rebuilds an engine from a persisted event sequence.
    pub fn replay<'a>(weights: ScoreWeights, events: impl IntoIterator<Item = &'a Event>) -> Result<Self, ContestError> {
        let mut engine = Self::new(weights);
        for e in events {
            engine.apply(e)?;
        }
        Ok(engine)
    }

    pub fn weights(&self) -> &ScoreWeights {
        &self.weights
    }

    pub fn submission_count(&self) -> usize {
        self.submissions.len()
    }

    pub fn submissions(&self) -> &[Submission] {
        &self.submissions
    }

    pub fn contains_analysis(&self, analysis_id: &str) -> bool {
        self.analysis_ids.contains(analysis_id)
    }

    pub fn has_team(&self, team: &str) -> bool {
        self.teams.contains_key(team)
    }

    /// Validates a submission against the current state and assigns its id,
    /// without changing anything.
    pub fn prepare_submission(
        &self,
        team: &str,
        snapshot: MetricSnapshot,
        gate_status: GateStatus,
        received_at: DateTime<Utc>,
    ) -> Result<Event, ContestError> {
        if self.analysis_ids.contains(&snapshot.analysis_id) {
            return Err(ContestError::DuplicateAnalysis(snapshot.analysis_id));
        }
        snapshot.validate()?;
        compute_derived(&snapshot)?;
        Ok(Event::Submission(SubmissionRecord {
            submission_id: self.submissions.len() as u64 + 1,
            team: team.to_string(),
            received_at,
            gate_status,
            snapshot,
        }))
    }

    pub fn prepare_qualification(&self, team: &str, gate_ok: bool, use_cases_ok: bool) -> Result<Event, ContestError> {
        if !self.teams.contains_key(team) {
            return Err(ContestError::UnknownTeam(team.to_string()));
        }
        Ok(Event::Qualification(QualificationRecord { team: team.to_string(), gate_ok, use_cases_ok }))
    }

    /// Applies an event. Returns the submission outcome for submission events.
    pub fn apply(&mut self, event: &Event) -> Result<Option<SubmitOutcome>, ContestError> {
        match event {
            Event::Submission(rec) => self.apply_submission(rec).map(Some),
            Event::Qualification(rec) => {
                if !self.teams.contains_key(&rec.team) {
                    return Err(ContestError::UnknownTeam(rec.team.clone()));
                }
                self.qualifications.insert(rec.team.clone(), rec.clone());
                Ok(None)
            }
        }
    }

    fn apply_submission(&mut self, rec: &SubmissionRecord) -> Result<SubmitOutcome, ContestError> {
        let expected = self.submissions.len() as u64 + 1;
        if rec.submission_id != expected {
            return Err(ContestError::OutOfSequence { expected, got: rec.submission_id });
        }
        if self.analysis_ids.contains(&rec.snapshot.analysis_id) {
            return Err(ContestError::DuplicateAnalysis(rec.snapshot.analysis_id.clone()));
        }
        rec.snapshot.validate()?;
        let derived = compute_derived(&rec.snapshot)?;
        let sub = Submission {
            submission_id: rec.submission_id,
            team: rec.team.clone(),
            score: compute_score(&derived, &self.weights),
            key: tiebreak_key(&rec.snapshot, rec.received_at),
            derived,
            snapshot: rec.snapshot.clone(),
            received_at: rec.received_at,
            gate_status: rec.gate_status,
        };

        let previous_rank = self.rank_of(&rec.team);
        let idx = self.submissions.len();
        let best_improved = match self.teams.get_mut(&rec.team) {
            Some(state) => {
                state.count += 1;
                state.first_at = state.first_at.min(sub.received_at);
                state.last_at = state.last_at.max(sub.received_at);
                if sub.ranks_before(&self.submissions[state.best]) {
                    state.best = idx;
                    true
                } else {
                    false
                }
            }
            None => {
                self.teams.insert(
                    rec.team.clone(),
                    TeamState { best: idx, count: 1, first_at: sub.received_at, last_at: sub.received_at },
                );
                self.ranking.push(rec.team.clone());
                true
            }
        };
        let score = sub.score.value;
        self.analysis_ids.insert(sub.snapshot.analysis_id.clone());
        self.submissions.push(sub);
        if best_improved {
            self.rerank();
        }
        Ok(SubmitOutcome {
            submission_id: rec.submission_id,
            team: rec.team.clone(),
            rank: self.rank_of(&rec.team).expect("team ranked after submit"),
            previous_rank,
            best_improved,
            score,
        })
    }

    fn rerank(&mut self) {
        let subs = &self.submissions;
        let teams = &self.teams;
        self.ranking
            .sort_by(|a, b| subs[teams[a].best].ranking_cmp(&subs[teams[b].best]));
    }

    fn rank_of(&self, team: &str) -> Option<usize> {
        self.ranking.iter().position(|t| t == team).map(|i| i + 1)
    }

    pub fn submit(
        &mut self,
        team: &str,
        snapshot: MetricSnapshot,
        gate_status: GateStatus,
        received_at: DateTime<Utc>,
    ) -> Result<SubmitOutcome, ContestError> {
        let event = self.prepare_submission(team, snapshot, gate_status, received_at)?;
        Ok(self.apply(&event)?.expect("submission event yields an outcome"))
    }

    pub fn set_qualification(&mut self, team: &str, gate_ok: bool, use_cases_ok: bool) -> Result<Qualification, ContestError> {
        let event = self.prepare_qualification(team, gate_ok, use_cases_ok)?;
        self.apply(&event)?;
        Ok(self.qualification(team).expect("team exists"))
    }

    /// Effective qualification. Until an operator sets the flags, the gate
    /// flag follows the team's best submission and the use-case flag is
    /// unconfirmed (false).
    pub fn qualification(&self, team: &str) -> Option<Qualification> {
        let state = self.teams.get(team)?;
        Some(match self.qualifications.get(team) {
            Some(q) => Qualification {
                team: team.to_string(),
                gate_passed: q.gate_ok,
                all_use_cases_implemented: q.use_cases_ok,
            },
            None => Qualification {
                team: team.to_string(),
                gate_passed: self.submissions[state.best].gate_status == GateStatus::Passed,
                all_use_cases_implemented: false,
            },
        })
    }

    fn is_qualified(&self, team: &str) -> bool {
        self.qualification(team).is_some_and(|q| q.qualified())
    }

    /// Team names in current rank order.
    pub fn final_ranking(&self) -> Vec<String> {
        self.ranking.clone()
    }

    /// Ranking over each team's best submission. With `as_of`, only
    /// submissions received at or before that instant count.
    pub fn leaderboard(&self, as_of: Option<DateTime<Utc>>) -> Vec<LeaderboardEntry> {
        match as_of {
            None => self
                .ranking
                .iter()
                .enumerate()
                .map(|(i, team)| {
                    let state = &self.teams[team];
                    LeaderboardEntry {
                        rank: i + 1,
                        team: team.clone(),
                        best: self.submissions[state.best].clone(),
                        qualified: self.is_qualified(team),
                        submissions_count: state.count,
                    }
                })
                .collect(),
            Some(t) => self.leaderboard_at(t),
        }
    }

    fn leaderboard_at(&self, as_of: DateTime<Utc>) -> Vec<LeaderboardEntry> {
        self.ranked_bests(as_of)
            .into_iter()
            .enumerate()
            .map(|(i, (best, count))| LeaderboardEntry {
                rank: i + 1,
                team: best.team.clone(),
                best: best.clone(),
                qualified: self.is_qualified(&best.team),
                submissions_count: count,
            })
            .collect()
    }

    fn ranked_bests(&self, as_of: DateTime<Utc>) -> Vec<(&Submission, usize)> {
        let mut bests: BTreeMap<&str, (&Submission, usize)> = BTreeMap::new();
        for sub in self.submissions.iter().filter(|s| s.received_at <= as_of) {
            bests
                .entry(sub.team.as_str())
                .and_modify(|(best, count)| {
                    *count += 1;
                    if sub.ranks_before(best) {
                        *best = sub;
                    }
                })
                .or_insert((sub, 1));
        }
        let mut ranked: Vec<_> = bests.into_values().collect();
        ranked.sort_by(|a, b| a.0.ranking_cmp(b.0));
        ranked
    }

    /// Rank at the end of every UTC day from the team's first submission up
    /// to and including `until`.
    pub fn position_history(&self, team: &str, until: NaiveDate) -> Result<PositionHistory, ContestError> {
        let unknown = || ContestError::UnknownTeam(team.to_string());
        let first_day = self.teams.get(team).ok_or_else(unknown)?.first_at.date_naive();
        if until < first_day {
            return Err(unknown());
        }
        let mut series = Vec::new();
        let mut day = first_day;
        while day <= until {
            let end_of_day = end_of_utc_day(day);
            let rank = self
                .ranked_bests(end_of_day)
                .iter()
                .position(|(best, _)| best.team == team)
                .map(|i| i + 1)
                .ok_or_else(unknown)?;
            series.push((day, rank));
            day = day.checked_add_days(Days::new(1)).ok_or_else(unknown)?;
        }
        Ok(PositionHistory { team: team.to_string(), series })
    }

    /// Submissions received in `[from, to]`, in chronological order.
    pub fn submissions_in_range(&self, from: DateTime<Utc>, to: DateTime<Utc>) -> Result<Vec<&Submission>, ContestError> {
        if from > to {
            return Err(ContestError::InvalidRange { from, to });
        }
        let mut out: Vec<&Submission> = self
            .submissions
            .iter()
            .filter(|s| s.received_at >= from && s.received_at <= to)
            .collect();
        out.sort_by_key(|s| (s.received_at, s.submission_id));
        Ok(out)
    }

    pub fn stats_summary(&self) -> StatsSummary {
        StatsSummary {
            total_submissions: self.submissions.len(),
            teams: self
                .teams
                .iter()
                .map(|(team, s)| TeamActivity {
                    team: team.clone(),
                    submissions: s.count,
                    first_at: s.first_at,
                    last_at: s.last_at,
                })
                .collect(),
        }
    }
}

/// Last representable instant of a UTC day.
pub fn end_of_utc_day(day: NaiveDate) -> DateTime<Utc> {
    day.and_time(NaiveTime::MIN).and_utc() + TimeDelta::days(1) - TimeDelta::nanoseconds(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{at, snapshot_for};

    #[test]
    fn first_submission_ranks_first() {
        let mut e = ContestEngine::default();
        let out = e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(1, 10)).unwrap();
        assert_eq!(out.rank, 1);
        assert_eq!(out.previous_rank, None);
        assert!(out.best_improved);
    }

    #[test]
    fn worse_resubmission_keeps_best() {
        let mut e = ContestEngine::default();
        e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(1, 10)).unwrap();
        e.submit("B", snapshot_for("B", "b1", 2.0), GateStatus::Passed, at(1, 11)).unwrap();
        let out = e.submit("A", snapshot_for("A", "a2", 3.0), GateStatus::Passed, at(1, 12)).unwrap();
        assert!(!out.best_improved);
        assert_eq!(out.rank, 1);
        let lb = e.leaderboard(None);
        assert_eq!(lb[0].best.snapshot.analysis_id, "a1");
        assert_eq!(lb[0].submissions_count, 2);
    }

    #[test]
    fn equal_score_lower_tdr_moves_up() {
        let mut e = ContestEngine::default();
        // Both score 2.0: A via tdr=2, B via duplication=2.
        let mut a = snapshot_for("A", "a1", 0.0);
        a.sqale_debt_ratio = 2.0;
        let mut b = snapshot_for("B", "b1", 0.0);
        b.duplicated_lines_density = 2.0;
        e.submit("A", a, GateStatus::Passed, at(1, 10)).unwrap();
        let out = e.submit("B", b, GateStatus::Passed, at(1, 11)).unwrap();
        assert_eq!(out.rank, 1);
        // Still behind B, whose tdr is 0.
        let mut a2 = snapshot_for("A", "a2", 0.0);
        a2.sqale_debt_ratio = 1.0;
        a2.duplicated_lines_density = 1.0;
        let out = e.submit("A", a2, GateStatus::Passed, at(1, 12)).unwrap();
        assert!(out.best_improved);
        assert_eq!(out.rank, 2);
        // Same score and tdr as B; wins further down the cascade on comments.
        let mut a3 = snapshot_for("A", "a3", 0.0);
        a3.duplicated_lines_density = 2.0;
        a3.comment_lines_density = 50.0;
        let out = e.submit("A", a3, GateStatus::Passed, at(1, 13)).unwrap();
        assert!(out.best_improved);
        assert_eq!(out.rank, 1);
        assert_eq!(out.previous_rank, Some(2));
    }

    #[test]
    fn duplicate_analysis_is_rejected_without_change() {
        let mut e = ContestEngine::default();
        e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(1, 10)).unwrap();
        let err = e.submit("A", snapshot_for("A", "a1", 0.5), GateStatus::Passed, at(1, 11)).unwrap_err();
        assert_eq!(err, ContestError::DuplicateAnalysis("a1".into()));
        assert_eq!(e.submission_count(), 1);
    }

    #[test]
    fn empty_project_propagates() {
        let mut e = ContestEngine::default();
        let mut s = snapshot_for("A", "a1", 1.0);
        s.ncloc = 0;
        assert_eq!(
            e.submit("A", s, GateStatus::Passed, at(1, 10)),
            Err(ContestError::Metrics(MetricsError::EmptyProject))
        );
        assert_eq!(e.submission_count(), 0);
    }

    #[test]
    fn leaderboard_orders_and_filters() {
        let mut e = ContestEngine::default();
        assert!(e.leaderboard(None).is_empty());
        e.submit("B", snapshot_for("B", "b1", 4.0), GateStatus::Passed, at(1, 10)).unwrap();
        e.submit("A", snapshot_for("A", "a1", 0.0), GateStatus::Passed, at(2, 10)).unwrap();
        let lb = e.leaderboard(None);
        assert_eq!(lb.iter().map(|x| (x.rank, x.team.as_str())).collect::<Vec<_>>(), [(1, "A"), (2, "B")]);
        assert!(e.leaderboard(Some(at(1, 9))).is_empty());
        let day1 = e.leaderboard(Some(at(1, 23)));
        assert_eq!(day1.len(), 1);
        assert_eq!(day1[0].team, "B");
        assert_eq!(e.leaderboard(Some(at(3, 0))), e.leaderboard(None));
    }

    #[test]
    fn history_tracks_overtaking() {
        let mut e = ContestEngine::default();
        e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(1, 10)).unwrap();
        e.submit("B", snapshot_for("B", "b1", 0.5), GateStatus::Passed, at(2, 10)).unwrap();
        let h = e.position_history("A", at(3, 0).date_naive()).unwrap();
        let ranks: Vec<usize> = h.series.iter().map(|p| p.1).collect();
        assert_eq!(ranks, [1, 2, 2]);
        assert_eq!(h.series[0].0, at(1, 0).date_naive());
        assert_eq!(e.position_history("Z", at(3, 0).date_naive()), Err(ContestError::UnknownTeam("Z".into())));
        assert!(e.position_history("B", at(1, 0).date_naive()).is_err());
    }

    #[test]
    fn ranges_and_summary() {
        let mut e = ContestEngine::default();
        e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(3, 10)).unwrap();
        e.submit("B", snapshot_for("B", "b1", 0.5), GateStatus::Passed, at(1, 10)).unwrap();
        e.submit("A", snapshot_for("A", "a2", 0.7), GateStatus::Passed, at(2, 10)).unwrap();
        let all = e.submissions_in_range(at(1, 0), at(4, 0)).unwrap();
        assert_eq!(all.iter().map(|s| s.submission_id).collect::<Vec<_>>(), [2, 3, 1]);
        assert!(e.submissions_in_range(at(5, 0), at(6, 0)).unwrap().is_empty());
        assert!(matches!(e.submissions_in_range(at(4, 0), at(1, 0)), Err(ContestError::InvalidRange { .. })));
        let summary = e.stats_summary();
        assert_eq!(summary.teams.iter().map(|t| t.submissions).sum::<usize>(), summary.total_submissions);
        assert_eq!(summary.teams[0].first_at, at(2, 10));
        assert_eq!(summary.teams[0].last_at, at(3, 10));
    }

    #[test]
    fn qualification_flags() {
        let mut e = ContestEngine::default();
        e.submit("A", snapshot_for("A", "a1", 1.0), GateStatus::Passed, at(1, 10)).unwrap();
        assert!(!e.qualification("A").unwrap().qualified());
        assert!(e.set_qualification("A", true, true).unwrap().qualified());
        assert!(!e.set_qualification("A", true, false).unwrap().qualified());
        assert!(e.set_qualification("A", true, true).unwrap().qualified());
        assert!(e.leaderboard(None)[0].qualified);
        assert_eq!(e.set_qualification("Q", true, true), Err(ContestError::UnknownTeam("Q".into())));
    }

    #[test]
    fn replay_rebuilds_state() {
        let mut e = ContestEngine::default();
        let mut log = Vec::new();
        for (i, (team, score)) in [("A", 1.0), ("B", 0.2), ("A", 0.1)].into_iter().enumerate() {
            let ev = e
                .prepare_submission(team, snapshot_for(team, &format!("x{i}"), score), GateStatus::Passed, at(1, i as u32))
                .unwrap();
            e.apply(&ev).unwrap();
            log.push(ev);
        }
        let ev = e.prepare_qualification("B", true, true).unwrap();
        e.apply(&ev).unwrap();
        log.push(ev);
        let r = ContestEngine::replay(ScoreWeights::default(), &log).unwrap();
        assert_eq!(r.leaderboard(None), e.leaderboard(None));
    }

    #[test]
    fn out_of_sequence_event_rejected() {
        let e = ContestEngine::default();
        let ev = e.prepare_submission("A", snapshot_for("A", "a", 1.0), GateStatus::Passed, at(1, 1)).unwrap();
        let mut other = ContestEngine::default();
        other.apply(&ev).unwrap();
        assert!(matches!(other.apply(&ev), Err(ContestError::OutOfSequence { .. })));
    }

    #[test]
    fn end_of_day_bounds() {
        let d = at(1, 0).date_naive();
        let eod = end_of_utc_day(d);
        assert_eq!(eod.date_naive(), d);
        assert_eq!((eod + TimeDelta::nanoseconds(1)).date_naive(), d.succ_opt().unwrap());
    }
}
