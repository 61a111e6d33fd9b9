//! Scoring, quality gates, grading policies, the contest leaderboard engine
//! and the cohort statistics used to compare grading strategies.

pub mod contest;
pub mod eventlog;
pub mod export;
pub mod gate;
pub mod grading;
pub mod measures;
pub mod metrics;
pub mod stats;

#[cfg(test)]
mod testutil;

pub use contest::{
    end_of_utc_day, ContestEngine, ContestError, Event, LeaderboardEntry, PositionHistory, QualificationRecord,
    StatsSummary, SubmissionRecord, SubmitOutcome, Submission, TeamActivity,
};
pub use eventlog::{EventLog, LogError, LOG_SCHEMA_VERSION};
pub use export::{LeaderboardDocument, LeaderboardRow, API_SCHEMA_VERSION};
pub use gate::{
    default_gate, evaluate_gate, validate_gate, Comparator, ConditionVerdict, GateCondition, GateError, GateReport,
    GateStatus,
};
pub use grading::{
    apply_bonus, apply_penalty, assign_rewards, Award, PenaltyPolicy, PolicyConfig, PolicyError, Qualification,
    RewardPolicy,
};
pub use measures::{MeasureExport, MeasureFileError, MeasuresResponse};
pub use metrics::{
    compare_entries, compute_derived, compute_score, parse_measures, tiebreak_key, AnalysisMeta, DerivedMetrics,
    MetricField, MetricSnapshot, MetricsError, Score, ScoreComponents, ScoreWeights, TieBreakKey,
};
