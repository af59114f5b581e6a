//! End-to-end evaluation: manifest check, group binding, metrics,
//! composition audit and decision, collected into one report.

use crate::decision::{decide, DecisionError};
use crate::fairness::{self as fm, Group, GroupedPredictions, MetricId, MetricValue};
use crate::ingest::{bind_groups, composition_audit, Dataset, GroupBinding, IngestError, RunManifest};
use crate::interval::{iqr, median};
use crate::policy::{check_manifest, MetricConstraint, PolicyDocument};
use crate::report::{evaluate, ComplianceReport, Evidence, MetricOutcome, PredictionsTrace, ScoreSummary};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("decision: {0}")]
    Decision(#[from] DecisionError),
}

pub const NO_PREDICTIONS: &str = "no predictions supplied";

/// Value of one constraint's metric. Dataset-level metrics read the group
/// binding; the rest need classifier predictions.
pub fn compute_metric(
    c: &MetricConstraint,
    binding: &GroupBinding,
    predictions: Option<&GroupedPredictions>,
) -> MetricOutcome {
    let id = c.metric;
    if id.uses_dataset_outcomes() {
        return Ok(if binding.has_outcome() {
            fm::statistical_parity_difference(&binding.counts)
        } else {
            MetricValue::unavailable(id, "no favorable outcome declared")
        });
    }
    let Some(gp) = predictions else {
        return Ok(MetricValue::unavailable(id, NO_PREDICTIONS));
    };
    if id.requires_scores() && !gp.has_scores() {
        return Err(format!("scores missing: `{id}` needs a score on every prediction record"));
    }
    Ok(match id {
        MetricId::StatisticalParityDifference => unreachable!("handled above"),
        MetricId::EqualAcceptanceRateGap => fm::equal_acceptance_rate_gap(gp),
        MetricId::PredictiveParityGap => fm::predictive_parity_gap(gp),
        MetricId::EqualOpportunityGap => fm::equal_opportunity_gap(gp),
        MetricId::PredictiveEqualityGap => fm::predictive_equality_gap(gp),
        MetricId::EqualizedOddsGap => fm::equalized_odds_gap(gp),
        MetricId::AccuracyEqualityGap => fm::accuracy_equality_gap(gp),
        MetricId::ConditionalUseAccuracyGap => fm::conditional_use_accuracy_gap(gp),
        MetricId::TreatmentEquality => fm::treatment_equality(gp),
        MetricId::ConditionalStatisticalParity => {
            fm::conditional_statistical_parity(gp, c.strata.as_ref())
        }
        MetricId::CalibrationGap => fm::calibration_gap(gp, c.bins),
        MetricId::BalancePositiveGap => fm::balance_positive_gap(gp),
        MetricId::BalanceNegativeGap => fm::balance_negative_gap(gp),
    })
}

fn predictions_trace(gp: &GroupedPredictions) -> PredictionsTrace {
    let mut confusion = BTreeMap::new();
    let mut scores = BTreeMap::new();
    for g in [Group::Privileged, Group::Unprivileged] {
        confusion.insert(g.as_str().to_string(), gp.counts(g));
        let s: Vec<f64> = gp.group(g).filter_map(|r| r.score).collect();
        if let (Ok(median), Ok(iqr)) = (median(&s), iqr(&s)) {
            scores.insert(
                g.as_str().to_string(),
                ScoreSummary {
                    n: s.len() as u64,
                    median,
                    iqr,
                },
            );
        }
    }
    PredictionsTrace {
        records: gp.len() as u64,
        confusion,
        scores,
    }
}

/// Inputs for one evaluation run.
#[derive(Debug, Clone, Copy)]
pub struct Run<'a> {
    pub policy: &'a PolicyDocument,
    pub dataset: &'a Dataset,
    pub predictions: Option<&'a GroupedPredictions>,
    pub manifest: Option<&'a RunManifest>,
}

/// Errors returned here are operational (unusable input); policy
/// violations are reported inside the [`ComplianceReport`].
pub fn run(r: Run<'_>) -> Result<ComplianceReport, PipelineError> {
    let policy = r.policy;
    let findings = r
        .manifest
        .map(|m| check_manifest(policy, m))
        .unwrap_or_default();
    let binding = bind_groups(r.dataset, policy)?;

    let mut metrics = BTreeMap::new();
    let mut errors = Vec::new();
    for c in &policy.metrics {
        let outcome = compute_metric(c, &binding, r.predictions);
        if let Err(e) = &outcome {
            errors.push(format!("{}: {e}", c.metric));
        }
        metrics.insert(c.metric, outcome);
    }

    let composition = match &policy.composition {
        Some(spec) => {
            let labels: Vec<&str> = r.dataset.column(&policy.protected.attribute)?.collect();
            Some(composition_audit(
                &labels,
                &policy.protected.unprivileged_value,
                spec.reference_share,
                spec.range,
            )?)
        }
        None => None,
    };
    let strategy = policy.decision.as_ref().map(decide).transpose()?;

    Ok(evaluate(
        policy,
        Evidence {
            metrics,
            composition,
            findings,
            strategy,
            binding: Some(binding),
            predictions: r.predictions.map(predictions_trace),
            errors,
        },
    ))
}
