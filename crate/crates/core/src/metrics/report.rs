use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::baseline::{baseline_and_delta, BaselineDelta, BaselineOptions};
use super::scores::{accuracy, confusion, ConfusionMatrix};
use super::MetricsError;
use crate::session::{records, FeedbackCondition, LogEntry, SessionEvent, TrialRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub block: u8,
    pub trials: usize,
    pub aborted: usize,
    /// From the decisions logged during the session.
    pub accuracy: Option<f64>,
    pub frames: usize,
}

/// Everything `analyze` derives from one session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub condition: FeedbackCondition,
    pub blocks: Vec<BlockSummary>,
    pub confusion_block2: ConfusionMatrix,
    pub confusion_block4: ConfusionMatrix,
    pub baseline: BaselineDelta,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `report.json` plus CSV matrices for plotting.
    pub fn write(&self, dir: impl AsRef<Path>) -> std::io::Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        fs::write(
            dir.join("confusion_block4.csv"),
            self.confusion_block4.to_csv(),
        )?;
        fs::write(
            dir.join("confusion_block2.csv"),
            self.confusion_block2.to_csv(),
        )?;
        fs::write(
            dir.join("similarity_baseline.csv"),
            self.baseline.d_baseline.to_csv(),
        )?;
        fs::write(
            dir.join("similarity_free.csv"),
            self.baseline.d_free.to_csv(),
        )?;
        let mut delta = self.baseline.d_free.clone();
        delta.values = self.baseline.d_d.clone();
        fs::write(dir.join("similarity_delta.csv"), delta.to_csv())?;
        Ok(())
    }
}

fn block(records: &[TrialRecord], b: u8) -> Vec<TrialRecord> {
    records.iter().filter(|r| r.block == b).cloned().collect()
}

/// Scores a session from its log alone.
pub fn analyze(entries: &[LogEntry]) -> Result<AnalysisReport, MetricsError> {
    let config = entries
        .iter()
        .find_map(|e| match &e.event {
            SessionEvent::SessionStarted { config, .. } => Some(config.as_ref().clone()),
            _ => None,
        })
        .ok_or(MetricsError::MissingConfig)?;
    let all = records(entries);
    let blocks = (1..=4u8)
        .map(|b| {
            let rs = block(&all, b);
            let frames = entries
                .iter()
                .filter(|e| matches!(&e.event, SessionEvent::ProbabilityFrame(f) if f.block == b))
                .count();
            BlockSummary {
                block: b,
                trials: rs.len(),
                aborted: rs.iter().filter(|r| r.aborted).count(),
                accuracy: accuracy(&rs).ok(),
                frames,
            }
        })
        .collect();
    let options = BaselineOptions {
        model: config.model,
        threshold: config.threshold,
        ..BaselineOptions::default()
    };
    let (b1, b2, b4) = (block(&all, 1), block(&all, 2), block(&all, 4));
    Ok(AnalysisReport {
        condition: config.condition,
        blocks,
        confusion_block2: confusion(&b2),
        confusion_block4: confusion(&b4),
        baseline: baseline_and_delta(&b1, &b2, &b4, &options)?,
    })
}
