//! The policy language: machine-readable operational context for an
//! autonomous decision system.
//!
//! A policy names the protected attribute, the fairness metrics it holds the
//! system to (each with a legitimate interval), the data sources and models
//! the system may use, an optional decision problem, and what to do on a
//! violation.
//!
//! ```text
//! policy "Scenario 1" {
//!   protected_attribute sex { privileged = "Male"; unprivileged = "Female" }
//!   favorable_outcome occupation { value = "Exec-managerial" }
//!   metric statistical_parity_difference { range = [-0.01, 0.01] }
//!   approved_source "https://archive.ics.uci.edu/dataset/2/adult"
//! }
//! ```
//!
//! Grammar:
//!
//! ```text
//! document    := "policy" STRING "{" item* "}"
//! item        := protected | favorable | metric | source | model
//!              | composition | decision | on_violation
//! protected   := "protected_attribute" name "{" field* "}"
//! favorable   := "favorable_outcome" name "{" field* "}"
//! metric      := "metric" IDENT "{" field* "}"
//! source      := "approved_source" STRING
//! model       := "model" STRING "{" field* "}"
//! composition := "composition" "{" field* "}"
//! decision    := "decision" "{" field* "}"
//! on_violation:= "on_violation" "=" ("explain" | "halt")
//! field       := IDENT "=" value
//! value       := STRING | NUMBER | IDENT | "[" (value ("," value)* ","?)? "]"
//! interval    := "[" NUMBER "," NUMBER "]"
//! name        := IDENT | STRING
//! ```
//!
//! Items and fields end with `;` or a line break. `#` starts a comment.
//! Identifiers match `[a-z_][a-z0-9_]*`; numbers are decimal with an optional
//! sign and fraction; strings are double-quoted with `\"`, `\\`, `\n` and
//! `\t` escapes.

mod check;
mod context;
mod diagnostic;
mod format;
mod lexer;
mod parser;

pub use context::{check_manifest, ContextFinding, FindingStatus, ManifestItem};
pub use diagnostic::{Diagnostic, DiagnosticKind, Diagnostics, Position};
pub use format::serialize_policy;

use crate::decision::DecisionSpec;
use crate::fairness::{MetricId, DEFAULT_CALIBRATION_BINS};
use crate::interval::Interval;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectedSpec {
    pub attribute: String,
    pub privileged_value: String,
    pub unprivileged_value: String,
}

/// Column whose value equal to `value` counts as the favorable outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FavorableSpec {
    pub column: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConstraint {
    pub metric: MetricId,
    pub range: Interval,
    /// Calibration bins; ignored by other metrics.
    pub bins: u32,
    pub tolerance: f64,
    pub description: Option<String>,
    /// Legitimate-factor strata for conditional statistical parity.
    pub strata: Option<BTreeSet<String>>,
}

impl MetricConstraint {
    pub fn new(metric: MetricId, range: Interval) -> Self {
        Self {
            metric,
            range,
            bins: DEFAULT_CALIBRATION_BINS,
            tolerance: 0.0,
            description: None,
            strata: None,
        }
    }

    /// Range grown by the tolerance.
    pub fn effective_range(&self) -> Interval {
        self.range.widen(self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: String,
    pub description: Option<String>,
    pub model_card_url: Option<String>,
    pub acceptable_uses: BTreeSet<String>,
    pub synthetic_data_capability: bool,
}

impl ModelSpec {
    pub fn new(model_id: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            description: None,
            model_card_url: None,
            acceptable_uses: BTreeSet::new(),
            synthetic_data_capability: false,
        }
    }
}

/// Expected share of the unprivileged group among protected-attribute values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub reference_share: f64,
    pub range: Interval,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationMode {
    #[default]
    Explain,
    Halt,
}

impl fmt::Display for ViolationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationMode::Explain => "explain",
            ViolationMode::Halt => "halt",
        })
    }
}

/// A semantically checked policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub name: String,
    pub protected: ProtectedSpec,
    pub favorable: Option<FavorableSpec>,
    pub metrics: Vec<MetricConstraint>,
    pub approved_sources: BTreeSet<String>,
    pub approved_models: BTreeMap<String, ModelSpec>,
    pub composition: Option<CompositionSpec>,
    pub decision: Option<DecisionSpec>,
    pub on_violation: ViolationMode,
}

impl PolicyDocument {
    pub fn new(name: impl Into<String>, protected: ProtectedSpec) -> Self {
        Self {
            name: name.into(),
            protected,
            favorable: None,
            metrics: Vec::new(),
            approved_sources: BTreeSet::new(),
            approved_models: BTreeMap::new(),
            composition: None,
            decision: None,
            on_violation: ViolationMode::Explain,
        }
    }

    pub fn metric(&self, id: MetricId) -> Option<&MetricConstraint> {
        self.metrics.iter().find(|m| m.metric == id)
    }

    pub fn requires_scores(&self) -> bool {
        self.metrics.iter().any(|m| m.metric.requires_scores())
    }
}

/// Parse and check a policy.
pub fn parse_policy(text: &str) -> Result<PolicyDocument, Diagnostics> {
    let tokens = lexer::tokenize(text).map_err(Diagnostics)?;
    let raw = parser::parse_tokens(&tokens).map_err(|d| Diagnostics(vec![d]))?;
    check::check(raw).map_err(Diagnostics)
}

/// Like [`parse_policy`], but accepts arbitrary bytes and reports invalid
/// UTF-8 as a lexical error.
pub fn parse_policy_bytes(bytes: &[u8]) -> Result<PolicyDocument, Diagnostics> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_policy(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            // valid prefix is UTF-8 by construction
            let prefix = std::str::from_utf8(valid).unwrap_or_default();
            let line = prefix.matches('\n').count() + 1;
            let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(Diagnostics(vec![Diagnostic::new(
                DiagnosticKind::Lex,
                Position {
                    line,
                    column,
                    offset: e.valid_up_to(),
                },
                "invalid UTF-8",
            )]))
        }
    }
}

#[cfg(test)]
mod tests;
