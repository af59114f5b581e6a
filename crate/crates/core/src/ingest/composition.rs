use super::IngestError;
use crate::interval::Interval;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Shares of each observed protected-attribute value, and how far the
/// unprivileged share sits from a reference share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionAudit {
    pub counts: BTreeMap<String, u64>,
    pub shares: BTreeMap<String, f64>,
    pub total: u64,
    pub unprivileged_value: String,
    pub unprivileged_share: f64,
    pub reference_share: f64,
    /// `unprivileged_share - reference_share`
    pub deviation: f64,
    pub range: Interval,
    pub within_range: bool,
}

pub fn composition_audit<S: AsRef<str>>(
    labels: &[S],
    unprivileged_value: &str,
    reference_share: f64,
    range: Interval,
) -> Result<CompositionAudit, IngestError> {
    if labels.is_empty() {
        return Err(IngestError::NoLabels);
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref().to_string()).or_default() += 1;
    }
    let total = labels.len() as u64;
    let shares: BTreeMap<String, f64> = counts
        .iter()
        .map(|(k, &n)| (k.clone(), n as f64 / total as f64))
        .collect();
    let unprivileged_share = shares.get(unprivileged_value).copied().unwrap_or(0.0);
    let deviation = unprivileged_share - reference_share;
    Ok(CompositionAudit {
        counts,
        shares,
        total,
        unprivileged_value: unprivileged_value.to_string(),
        unprivileged_share,
        reference_share,
        deviation,
        within_range: range.contains(deviation),
        range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn range(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn balanced_labels_comply() {
        let labels = ["F", "M", "F", "M"];
        let a = composition_audit(&labels, "F", 0.5, range(-0.05, 0.05)).unwrap();
        assert_eq!(a.deviation, 0.0);
        assert!(a.within_range);
    }

    #[test]
    fn proportion_arithmetic() {
        let mut labels = vec!["Female"; 16];
        labels.extend(vec!["Male"; 84]);
        let a = composition_audit(&labels, "Female", 0.4975, range(-0.05, 0.05)).unwrap();
        assert_eq!(a.unprivileged_share, 0.16);
        assert!((a.deviation - (-0.3375)).abs() < 1e-12);
        assert!(!a.within_range);
    }

    #[test]
    fn absent_value_has_zero_share() {
        let a = composition_audit(&["M", "M"], "F", 0.0, range(0.0, 0.0)).unwrap();
        assert_eq!(a.unprivileged_share, 0.0);
        assert!(a.within_range);
    }

    #[test]
    fn empty_labels_error() {
        let empty: [&str; 0] = [];
        assert!(matches!(
            composition_audit(&empty, "F", 0.5, range(0.0, 1.0)),
            Err(IngestError::NoLabels)
        ));
    }

    proptest! {
        #[test]
        fn shares_sum_to_one(labels in prop::collection::vec("[a-d]", 1..200)) {
            let a = composition_audit(&labels, "a", 0.5, range(-1.0, 1.0)).unwrap();
            let sum: f64 = a.shares.values().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert_eq!(a.counts.values().sum::<u64>(), labels.len() as u64);
        }
    }
}
