use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::classifier::Outcome;
use crate::gesture::{Gesture, NUM_CLASSES};
use crate::session::TrialRecord;

/// Scored trials: not aborted and carrying a decision.
fn scored(records: &[TrialRecord]) -> impl Iterator<Item = (Gesture, Outcome)> + '_ {
    records
        .iter()
        .filter(|r| !r.aborted)
        .filter_map(|r| r.outcome().map(|o| (r.intended, o)))
}

/// Fraction of scored trials whose decision equals the intended label.
pub fn accuracy(records: &[TrialRecord]) -> Result<f64, MetricsError> {
    let (mut n, mut correct) = (0usize, 0usize);
    for (intended, outcome) in scored(records) {
        n += 1;
        correct += usize::from(outcome == Outcome::Label(intended));
    }
    if n == 0 {
        return Err(MetricsError::Empty);
    }
    Ok(correct as f64 / n as f64)
}

/// Intended label (rows, canonical order) against outcome (9 labels, then
/// `NoClass`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
    /// Row-normalized; rows without trials stay zero.
    pub rates: Vec<Vec<f64>>,
    pub empty_rows: Vec<Gesture>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("intended");
        for g in Gesture::ALL {
            out.push(',');
            out.push_str(g.name());
        }
        out.push_str(",NoClass\n");
        for (g, row) in Gesture::ALL.iter().zip(&self.rates) {
            out.push_str(g.name());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion(records: &[TrialRecord]) -> ConfusionMatrix {
    let mut counts = vec![vec![0usize; NUM_CLASSES + 1]; NUM_CLASSES];
    for (intended, outcome) in scored(records) {
        counts[intended.index()][outcome.column()] += 1;
    }
    let mut empty_rows = Vec::new();
    let rates = counts
        .iter()
        .zip(Gesture::ALL)
        .map(|(row, g)| {
            let n: usize = row.iter().sum();
            if n == 0 {
                empty_rows.push(g);
                vec![0.0; row.len()]
            } else {
                row.iter().map(|&c| c as f64 / n as f64).collect()
            }
        })
        .collect();
    ConfusionMatrix {
        counts,
        rates,
        empty_rows,
    }
}
