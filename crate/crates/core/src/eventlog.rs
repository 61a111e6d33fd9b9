//! Append-only JSON-lines event log.
//!
//! One record per line: `{"schema_version":1,"event":"submission",...}` or
//! `{"schema_version":1,"event":"qualification",...}`. Records are fsynced
//! before `append` returns.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contest::Event;

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("event log {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("event log {path}, line {line}: {message}")]
    Corrupt { path: String, line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct Record<E> {
    schema_version: u32,
    #[serde(flatten)]
    event: E,
}

pub fn encode(event: &Event) -> String {
    serde_json::to_string(&Record { schema_version: LOG_SCHEMA_VERSION, event }).expect("events serialize")
}

fn decode(line: &str) -> Result<Event, String> {
    let rec: Record<Event> = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if rec.schema_version != LOG_SCHEMA_VERSION {
        return Err(format!("unsupported schema_version {}", rec.schema_version));
    }
    Ok(rec.event)
}

/// Parses a whole log. Blank lines are skipped; any other unparseable line
/// is an error carrying its 1-based line number.
pub fn read_events(reader: impl BufRead, path: &str) -> Result<Vec<Event>, LogError> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| LogError::Io { path: path.to_string(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let event = decode(&line).map_err(|message| LogError::Corrupt { path: path.to_string(), line: i + 1, message })?;
        events.push(event);
    }
    Ok(events)
}

pub struct EventLog {
    path: PathBuf,
    file: File,
}

impl EventLog {
    /// Opens (creating if needed) the log at `path` and returns the events
    /// already in it.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Vec<Event>), LogError> {
        let path = path.as_ref().to_path_buf();
        let display = path.display().to_string();
        let io = |source| LogError::Io { path: display.clone(), source };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let events = match File::open(&path) {
            Ok(f) => read_events(BufReader::new(f), &display)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io(e)),
        };
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        Ok((Self { path, file }, events))
    }

    /// Reads a log without opening it for writing.
    pub fn read(path: impl AsRef<Path>) -> Result<Vec<Event>, LogError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        match File::open(path) {
            Ok(f) => read_events(BufReader::new(f), &display),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(source) => Err(LogError::Io { path: display, source }),
        }
    }

    pub fn append(&mut self, event: &Event) -> Result<(), LogError> {
        let mut line = encode(event);
        line.push('\n');
        let io = |source| LogError::Io { path: self.path.display().to_string(), source };
        self.file.write_all(line.as_bytes()).map_err(io)?;
        self.file.sync_data().map_err(io)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contest::QualificationRecord;

    fn qual(team: &str) -> Event {
        Event::Qualification(QualificationRecord { team: team.into(), gate_ok: true, use_cases_ok: false })
    }

    #[test]
    fn record_shape() {
        let line = encode(&qual("A"));
        assert_eq!(line, r#"{"schema_version":1,"event":"qualification","team":"A","gate_ok":true,"use_cases_ok":false}"#);
        assert_eq!(decode(&line).unwrap(), qual("A"));
    }

    #[test]
    fn corrupt_line_reports_number() {
        let text = format!("{}\n\n{{not json\n", encode(&qual("A")));
        match read_events(text.as_bytes(), "mem") {
            Err(LogError::Corrupt { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let future = r#"{"schema_version":9,"event":"qualification","team":"A","gate_ok":true,"use_cases_ok":true}"#;
        assert!(matches!(read_events(future.as_bytes(), "mem"), Err(LogError::Corrupt { line: 1, .. })));
    }
}
