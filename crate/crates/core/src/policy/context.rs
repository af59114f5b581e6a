use super::PolicyDocument;
use crate::ingest::RunManifest;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestItem {
    DatasetSource,
    Model,
    DeclaredUse,
    Synthetic,
}

impl fmt::Display for ManifestItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ManifestItem::DatasetSource => "dataset source",
            ManifestItem::Model => "model",
            ManifestItem::DeclaredUse => "declared use",
            ManifestItem::Synthetic => "synthetic data",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Approved,
    Violation,
}

/// Verdict on one manifest entry against the policy's approved context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextFinding {
    pub item: ManifestItem,
    pub subject: String,
    pub status: FindingStatus,
    pub reason: Option<String>,
}

impl ContextFinding {
    fn approved(item: ManifestItem, subject: impl Into<String>) -> Self {
        Self {
            item,
            subject: subject.into(),
            status: FindingStatus::Approved,
            reason: None,
        }
    }

    fn violation(item: ManifestItem, subject: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            item,
            subject: subject.into(),
            status: FindingStatus::Violation,
            reason: Some(reason.into()),
        }
    }

    pub fn is_approved(&self) -> bool {
        self.status == FindingStatus::Approved
    }
}

/// One finding per manifest entry. Sources are compared after trimming
/// surrounding whitespace; everything else by exact string equality.
pub fn check_manifest(doc: &PolicyDocument, manifest: &RunManifest) -> Vec<ContextFinding> {
    let mut out = Vec::new();
    let source = manifest.dataset_source.trim();
    out.push(if doc.approved_sources.contains(source) {
        ContextFinding::approved(ManifestItem::DatasetSource, source)
    } else {
        ContextFinding::violation(ManifestItem::DatasetSource, source, "unknown source")
    });

    let model = manifest
        .model_id
        .as_deref()
        .map(|id| (id, doc.approved_models.get(id)));
    if let Some((id, spec)) = model {
        out.push(match spec {
            Some(_) => ContextFinding::approved(ManifestItem::Model, id),
            None => ContextFinding::violation(ManifestItem::Model, id, "unknown model"),
        });
    }

    if let Some(use_) = manifest.declared_use.as_deref() {
        out.push(match model {
            Some((_, Some(spec))) if spec.acceptable_uses.contains(use_) => {
                ContextFinding::approved(ManifestItem::DeclaredUse, use_)
            }
            Some((_, Some(_))) => {
                ContextFinding::violation(ManifestItem::DeclaredUse, use_, "use not acceptable")
            }
            Some((id, None)) => ContextFinding::violation(
                ManifestItem::DeclaredUse,
                use_,
                format!("use not acceptable: model `{id}` is not approved"),
            ),
            None => ContextFinding::violation(
                ManifestItem::DeclaredUse,
                use_,
                "use not acceptable: no model declared",
            ),
        });
    }

    if manifest.synthetic {
        out.push(match model {
            Some((_, Some(spec))) if spec.synthetic_data_capability => {
                ContextFinding::approved(ManifestItem::Synthetic, "true")
            }
            Some((id, Some(_))) => ContextFinding::violation(
                ManifestItem::Synthetic,
                "true",
                format!("synthetic data requested but model `{id}` lacks the capability"),
            ),
            Some((id, None)) => ContextFinding::violation(
                ManifestItem::Synthetic,
                "true",
                format!("synthetic data requested from unapproved model `{id}`"),
            ),
            None => ContextFinding::violation(
                ManifestItem::Synthetic,
                "true",
                "synthetic data requested but no model declared",
            ),
        });
    }
    out
}
