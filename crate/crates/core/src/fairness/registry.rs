use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Built-in metric identifiers accepted by policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    StatisticalParityDifference,
    EqualAcceptanceRateGap,
    PredictiveParityGap,
    EqualOpportunityGap,
    PredictiveEqualityGap,
    EqualizedOddsGap,
    AccuracyEqualityGap,
    ConditionalUseAccuracyGap,
    TreatmentEquality,
    ConditionalStatisticalParity,
    CalibrationGap,
    BalancePositiveGap,
    BalanceNegativeGap,
}

impl MetricId {
    pub const ALL: [MetricId; 13] = [
        MetricId::StatisticalParityDifference,
        MetricId::EqualAcceptanceRateGap,
        MetricId::PredictiveParityGap,
        MetricId::EqualOpportunityGap,
        MetricId::PredictiveEqualityGap,
        MetricId::EqualizedOddsGap,
        MetricId::AccuracyEqualityGap,
        MetricId::ConditionalUseAccuracyGap,
        MetricId::TreatmentEquality,
        MetricId::ConditionalStatisticalParity,
        MetricId::CalibrationGap,
        MetricId::BalancePositiveGap,
        MetricId::BalanceNegativeGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::StatisticalParityDifference => "statistical_parity_difference",
            MetricId::EqualAcceptanceRateGap => "equal_acceptance_rate_gap",
            MetricId::PredictiveParityGap => "predictive_parity_gap",
            MetricId::EqualOpportunityGap => "equal_opportunity_gap",
            MetricId::PredictiveEqualityGap => "predictive_equality_gap",
            MetricId::EqualizedOddsGap => "equalized_odds_gap",
            MetricId::AccuracyEqualityGap => "accuracy_equality_gap",
            MetricId::ConditionalUseAccuracyGap => "conditional_use_accuracy_gap",
            MetricId::TreatmentEquality => "treatment_equality",
            MetricId::ConditionalStatisticalParity => "conditional_statistical_parity",
            MetricId::CalibrationGap => "calibration_gap",
            MetricId::BalancePositiveGap => "balance_positive_gap",
            MetricId::BalanceNegativeGap => "balance_negative_gap",
        }
    }

    /// Needs per-record scores.
    pub fn requires_scores(self) -> bool {
        matches!(
            self,
            MetricId::CalibrationGap | MetricId::BalancePositiveGap | MetricId::BalanceNegativeGap
        )
    }

    /// Computed from the dataset's favorable-outcome column rather than
    /// from classifier predictions.
    pub fn uses_dataset_outcomes(self) -> bool {
        self == MetricId::StatisticalParityDifference
    }

    /// Signed gaps negate under a group swap; the rest are magnitudes.
    pub fn is_signed(self) -> bool {
        !matches!(
            self,
            MetricId::EqualizedOddsGap
                | MetricId::ConditionalUseAccuracyGap
                | MetricId::ConditionalStatisticalParity
                | MetricId::CalibrationGap
        )
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric id `{0}`")]
pub struct UnknownMetric(pub String);

impl FromStr for MetricId {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownMetric(s.to_string()))
    }
}
