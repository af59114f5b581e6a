//! Comply-or-explain reports: one verdict per policy constraint, the
//! evidence behind it, and text/JSON renderings.

mod json;
mod render;

pub use json::{from_json, to_json};
pub use render::{render, render_strategy, RenderMode};

use crate::decision::StrategyChoice;
use crate::fairness::{ConfusionCounts, Measure, MetricId, MetricValue};
use crate::ingest::{CompositionAudit, GroupBinding};
use crate::interval::Interval;
use crate::policy::{ContextFinding, PolicyDocument, ViolationMode};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const SCHEMA_VERSION: u32 = 1;

pub const OUTSIDE_INTERVAL: &str = "value outside legitimate interval";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Comply,
    Explain,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Comply => "comply",
            Status::Explain => "explain",
            Status::Error => "error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a metric's input turned out: computed (possibly undefined), or an
/// operational failure such as a missing score column.
pub type MetricOutcome = Result<MetricValue, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintVerdict {
    pub constraint: MetricId,
    pub value: Measure,
    /// Declared range widened by the tolerance.
    pub interval: Interval,
    pub declared_range: Interval,
    pub tolerance: f64,
    pub status: Status,
    pub explanation: String,
    pub per_group: BTreeMap<String, BTreeMap<String, f64>>,
    pub notes: Vec<String>,
}

impl ConstraintVerdict {
    pub fn new(constraint: &crate::policy::MetricConstraint, outcome: &MetricOutcome) -> Self {
        let interval = constraint.effective_range();
        let mut v = ConstraintVerdict {
            constraint: constraint.metric,
            value: Measure::Undefined {
                reason: String::new(),
            },
            interval,
            declared_range: constraint.range,
            tolerance: constraint.tolerance,
            status: Status::Error,
            explanation: String::new(),
            per_group: BTreeMap::new(),
            notes: Vec::new(),
        };
        match outcome {
            Err(e) => {
                v.value = Measure::Undefined { reason: e.clone() };
                v.explanation = e.clone();
            }
            Ok(mv) => {
                v.value = mv.value.clone();
                v.per_group = mv.per_group.clone();
                v.notes = mv.notes.clone();
                match &mv.value {
                    Measure::Defined { value } if interval.contains(*value) => {
                        v.status = Status::Comply;
                        v.explanation = "value inside legitimate interval".into();
                    }
                    Measure::Defined { .. } => {
                        v.status = Status::Explain;
                        v.explanation = OUTSIDE_INTERVAL.into();
                    }
                    Measure::Undefined { reason } => {
                        v.status = Status::Explain;
                        v.explanation = reason.clone();
                    }
                }
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionVerdict {
    pub audit: CompositionAudit,
    pub status: Status,
    pub explanation: String,
}

impl From<CompositionAudit> for CompositionVerdict {
    fn from(audit: CompositionAudit) -> Self {
        let (status, explanation) = if audit.within_range {
            (Status::Comply, "deviation inside legitimate interval")
        } else {
            (Status::Explain, "deviation from reference share outside legitimate interval")
        };
        Self {
            audit,
            status,
            explanation: explanation.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modality {
    pub display_mode: bool,
    pub agent_mode: bool,
}

/// Median and interquartile range of one group's scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub n: u64,
    pub median: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionsTrace {
    pub records: u64,
    pub confusion: BTreeMap<String, ConfusionCounts>,
    pub scores: BTreeMap<String, ScoreSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub schema_version: u32,
    pub policy_name: String,
    pub created_at: Option<String>,
    pub modality: Modality,
    pub on_violation: ViolationMode,
    pub overall: Status,
    pub findings: Vec<ContextFinding>,
    pub binding: Option<GroupBinding>,
    pub predictions: Option<PredictionsTrace>,
    pub verdicts: Vec<ConstraintVerdict>,
    pub composition: Option<CompositionVerdict>,
    pub strategy: Option<StrategyChoice>,
    /// Operational problems that did not stop the report.
    pub errors: Vec<String>,
}

impl ComplianceReport {
    /// Recompute `overall` from the parts.
    pub fn refresh_overall(&mut self) {
        let mut overall = Status::Comply;
        if self.findings.iter().any(|f| !f.is_approved()) {
            overall = Status::Explain;
        }
        let statuses = self
            .verdicts
            .iter()
            .map(|v| v.status)
            .chain(self.composition.iter().map(|c| c.status));
        overall = statuses.fold(overall, Status::max);
        if !self.errors.is_empty() {
            overall = Status::Error;
        }
        self.overall = overall;
    }

    /// First thing that kept the report from complying, for halt notices.
    pub fn first_violation(&self) -> Option<String> {
        if let Some(f) = self.findings.iter().find(|f| !f.is_approved()) {
            return Some(format!(
                "{} `{}`: {}",
                f.item,
                f.subject,
                f.reason.as_deref().unwrap_or("violation")
            ));
        }
        if let Some(v) = self.verdicts.iter().find(|v| v.status != Status::Comply) {
            return Some(format!("constraint {}: {}", v.constraint, v.explanation));
        }
        self.composition
            .as_ref()
            .filter(|c| c.status != Status::Comply)
            .map(|c| format!("composition: {}", c.explanation))
    }
}

/// Inputs to [`evaluate`] beyond the policy itself.
#[derive(Debug, Clone, Default)]
pub struct Evidence {
    pub metrics: BTreeMap<MetricId, MetricOutcome>,
    pub composition: Option<CompositionAudit>,
    pub findings: Vec<ContextFinding>,
    pub strategy: Option<StrategyChoice>,
    pub binding: Option<GroupBinding>,
    pub predictions: Option<PredictionsTrace>,
    pub errors: Vec<String>,
}

/// One verdict per metric constraint, in policy order. A constraint with no
/// outcome in `evidence` gets status `error`.
pub fn evaluate(policy: &PolicyDocument, evidence: Evidence) -> ComplianceReport {
    let verdicts = policy
        .metrics
        .iter()
        .map(|c| {
            let outcome = evidence
                .metrics
                .get(&c.metric)
                .cloned()
                .unwrap_or_else(|| Err("metric not computed".into()));
            ConstraintVerdict::new(c, &outcome)
        })
        .collect();
    let mut report = ComplianceReport {
        schema_version: SCHEMA_VERSION,
        policy_name: policy.name.clone(),
        created_at: None,
        modality: Modality {
            display_mode: true,
            agent_mode: false,
        },
        on_violation: policy.on_violation,
        overall: Status::Comply,
        findings: evidence.findings,
        binding: evidence.binding,
        predictions: evidence.predictions,
        verdicts,
        composition: evidence.composition.map(CompositionVerdict::from),
        strategy: evidence.strategy,
        errors: evidence.errors,
    };
    report.refresh_overall();
    report
}

#[cfg(test)]
mod tests;
