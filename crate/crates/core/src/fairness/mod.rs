//! Group-fairness metrics over binary classifier outputs.
//!
//! Every signed gap is oriented as `unprivileged - privileged`. Metrics
//! that combine two conditions (equalized odds, conditional use accuracy)
//! are scalarized as the larger of the two absolute gaps.

mod confusion;
mod metrics;
mod registry;

pub use confusion::{confusion, ConfusionCounts, Rates};
pub use metrics::{
    accuracy_equality_gap, balance_negative_gap, balance_positive_gap, calibration_gap,
    conditional_statistical_parity, conditional_use_accuracy_gap, equal_acceptance_rate_gap,
    equal_opportunity_gap, equalized_odds_gap, predictive_equality_gap, predictive_parity_gap,
    statistical_parity_difference, treatment_equality, Measure, MetricValue, ParityCounts,
    Proportion, DEFAULT_CALIBRATION_BINS,
};
pub use registry::MetricId;

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Privileged,
    Unprivileged,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Privileged => "privileged",
            Group::Unprivileged => "unprivileged",
        }
    }

    pub fn other(self) -> Group {
        match self {
            Group::Privileged => Group::Unprivileged,
            Group::Unprivileged => Group::Privileged,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One classified subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub group: Group,
    pub predicted: bool,
    pub actual: bool,
    pub score: Option<f64>,
    pub legitimate: Option<String>,
}

impl Record {
    pub fn new(group: Group, predicted: bool, actual: bool) -> Self {
        Self {
            group,
            predicted,
            actual,
            score: None,
            legitimate: None,
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn with_legitimate(mut self, value: impl Into<String>) -> Self {
        self.legitimate = Some(value.into());
        self
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PredictionsError {
    #[error("record {index}: score {score} outside [0, 1]")]
    ScoreOutOfRange { index: usize, score: f64 },
}

/// Classifier outputs tagged with protected-group membership.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupedPredictions {
    records: Vec<Record>,
}

impl GroupedPredictions {
    pub fn new(records: Vec<Record>) -> Result<Self, PredictionsError> {
        for (index, r) in records.iter().enumerate() {
            if let Some(score) = r.score {
                if !(0.0..=1.0).contains(&score) {
                    return Err(PredictionsError::ScoreOutOfRange { index, score });
                }
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn group(&self, g: Group) -> impl Iterator<Item = &Record> + '_ {
        self.records.iter().filter(move |r| r.group == g)
    }

    pub fn group_len(&self, g: Group) -> usize {
        self.group(g).count()
    }

    pub fn counts(&self, g: Group) -> ConfusionCounts {
        confusion(self.group(g))
    }

    /// True when every record carries a score.
    pub fn has_scores(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.score.is_some())
    }

    /// Same records with the two group labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            records: self
                .records
                .iter()
                .map(|r| Record {
                    group: r.group.other(),
                    ..r.clone()
                })
                .collect(),
        }
    }
}
