use super::{Dataset, IngestError};
use crate::fairness::{ParityCounts, Proportion};
use crate::policy::PolicyDocument;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Per-group tallies of a dataset bound to a policy's protected attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBinding {
    pub attribute: String,
    pub privileged_value: String,
    pub unprivileged_value: String,
    /// Favorable/total per group; totals only when the policy names no
    /// favorable outcome.
    pub counts: ParityCounts,
    pub outcome_column: Option<String>,
    pub favorable_value: Option<String>,
    /// Rows whose protected value matches neither group.
    pub excluded: u64,
    pub excluded_values: BTreeMap<String, u64>,
}

impl GroupBinding {
    pub fn total_rows(&self) -> u64 {
        self.counts.privileged.total + self.counts.unprivileged.total + self.excluded
    }

    pub fn has_outcome(&self) -> bool {
        self.outcome_column.is_some()
    }
}

pub fn bind_groups(ds: &Dataset, policy: &PolicyDocument) -> Result<GroupBinding, IngestError> {
    let p = &policy.protected;
    let attr = ds.column_index(&p.attribute)?;
    let outcome = policy
        .favorable
        .as_ref()
        .map(|f| ds.column_index(&f.column).map(|i| (i, f.value.as_str())))
        .transpose()?;

    let mut privileged = Proportion::default();
    let mut unprivileged = Proportion::default();
    let mut excluded_values: BTreeMap<String, u64> = BTreeMap::new();
    for row in &ds.rows {
        let value = row[attr].as_str();
        let slot = if value == p.privileged_value {
            &mut privileged
        } else if value == p.unprivileged_value {
            &mut unprivileged
        } else {
            *excluded_values.entry(value.to_string()).or_default() += 1;
            continue;
        };
        slot.total += 1;
        if let Some((col, fav)) = outcome {
            if row[col] == fav {
                slot.favorable += 1;
            }
        }
    }
    if privileged.total == 0 && unprivileged.total == 0 {
        return Err(IngestError::EmptyGroups {
            attribute: p.attribute.clone(),
            privileged: p.privileged_value.clone(),
            unprivileged: p.unprivileged_value.clone(),
        });
    }
    Ok(GroupBinding {
        attribute: p.attribute.clone(),
        privileged_value: p.privileged_value.clone(),
        unprivileged_value: p.unprivileged_value.clone(),
        counts: ParityCounts {
            privileged,
            unprivileged,
        },
        outcome_column: policy.favorable.as_ref().map(|f| f.column.clone()),
        favorable_value: policy.favorable.as_ref().map(|f| f.value.clone()),
        excluded: excluded_values.values().sum(),
        excluded_values,
    })
}
