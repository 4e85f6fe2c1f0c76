use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::GatewayError;
use crate::classifier::GestureModel;
use crate::metrics::{analyze, AnalysisReport};
use crate::session::{
    read_log, EventSink, IntentProvider, JsonlSink, LogEntry, Session, SessionConfig,
    SessionControl, SessionError, SessionEvent, SessionOutcome, TrialRecord,
};
use crate::sources::{RecordingTee, SignalSource};

/// One session's files:
///
/// ```text
/// config.toml  recording.emgr  trials.jsonl
/// model_block1.json  model_block2.json
/// report.json  confusion_block{2,4}.csv  similarity_{baseline,free,delta}.csv
/// ```
#[derive(Debug, Clone)]
pub struct SessionDir {
    root: PathBuf,
}

impl SessionDir {
    pub fn create(root: impl AsRef<Path>) -> std::io::Result<Self> {
        fs::create_dir_all(root.as_ref())?;
        Ok(SessionDir {
            root: root.as_ref().to_path_buf(),
        })
    }

    /// An existing directory, for analysis.
    pub fn open(root: impl AsRef<Path>) -> std::io::Result<Self> {
        let root = root.as_ref().to_path_buf();
        if !root.is_dir() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} is not a directory", root.display()),
            ));
        }
        Ok(SessionDir { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn config_path(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn recording_path(&self) -> PathBuf {
        self.root.join("recording.emgr")
    }

    pub fn log_path(&self) -> PathBuf {
        self.root.join("trials.jsonl")
    }

    pub fn model_path(&self, block: u8) -> PathBuf {
        self.root.join(format!("model_block{block}.json"))
    }

    pub fn write_config(&self, config: &SessionConfig) -> Result<(), GatewayError> {
        fs::write(self.config_path(), config.to_toml())?;
        Ok(())
    }

    pub fn sink(&self) -> Result<PersistSink, GatewayError> {
        Ok(PersistSink {
            log: JsonlSink::create(self.log_path())?,
            dir: self.clone(),
        })
    }

    pub fn entries(&self) -> Result<Vec<LogEntry>, GatewayError> {
        Ok(read_log(self.log_path())?)
    }

    /// Re-derives the report from `trials.jsonl` and writes it next to it.
    pub fn write_report(&self) -> Result<AnalysisReport, GatewayError> {
        let report = analyze(&self.entries()?)?;
        report.write(&self.root)?;
        Ok(report)
    }
}

/// Writes every event to the log, and model snapshots as they are trained.
///
/// The log is flushed at each trial result so an interrupted session leaves
/// a readable prefix. Nothing is ever dropped here.
pub struct PersistSink {
    log: JsonlSink<BufWriter<File>>,
    dir: SessionDir,
}

impl EventSink for PersistSink {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        self.log.emit(entry)?;
        match &entry.event {
            SessionEvent::ModelTrained { block, model } => {
                model.save(self.dir.model_path(*block))?;
                self.log.flush()?;
            }
            SessionEvent::TrialResult(_)
            | SessionEvent::BlockStatus { .. }
            | SessionEvent::SessionFinished { .. } => self.log.flush()?,
            _ => {}
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SessionError> {
        self.log.flush()
    }
}

fn prepare<S: SignalSource>(
    config: &SessionConfig,
    source: S,
    source_name: &str,
    dir: &SessionDir,
    control: SessionControl,
    extra: Vec<Box<dyn EventSink>>,
) -> Result<Session<RecordingTee<S, BufWriter<File>>>, GatewayError> {
    dir.write_config(config)?;
    let tee = RecordingTee::create(source, dir.recording_path())?;
    let mut session = Session::new(config.clone(), tee)?
        .with_sink(dir.sink()?)
        .with_control(control)
        .with_source_name(source_name);
    for s in extra {
        session.add_sink(s);
    }
    Ok(session)
}

/// Runs all four blocks into `dir` and writes the report. The recording is
/// closed even when the session fails.
pub fn run_persisted<S: SignalSource>(
    config: &SessionConfig,
    source: S,
    source_name: &str,
    dir: &SessionDir,
    intents: &mut dyn IntentProvider,
    control: SessionControl,
    extra: Vec<Box<dyn EventSink>>,
) -> Result<(SessionOutcome, AnalysisReport), GatewayError> {
    let mut session = prepare(config, source, source_name, dir, control, extra)?;
    let result = session.run(intents);
    session.into_source().finish()?;
    let outcome = result?;
    let report = dir.write_report()?;
    Ok((outcome, report))
}

/// Calibration only: block 1 and its model.
pub fn run_block1_persisted<S: SignalSource>(
    config: &SessionConfig,
    source: S,
    source_name: &str,
    dir: &SessionDir,
    control: SessionControl,
) -> Result<(Vec<TrialRecord>, GestureModel), GatewayError> {
    let mut session = prepare(config, source, source_name, dir, control, Vec::new())?;
    let result = session.run_block1();
    session.into_source().finish()?;
    Ok(result?)
}
