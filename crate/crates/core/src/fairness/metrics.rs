use super::confusion::ratio;
use super::{ConfusionCounts, Group, GroupedPredictions, MetricId, Record};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_CALIBRATION_BINS: u32 = 10;

/// A metric result: a number, or the reason it cannot be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    Defined { value: f64 },
    Undefined { reason: String },
}

impl Measure {
    pub fn value(&self) -> Option<f64> {
        match self {
            Measure::Defined { value } => Some(*value),
            Measure::Undefined { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Measure::Defined { .. } => None,
            Measure::Undefined { reason } => Some(reason),
        }
    }

    fn undefined(reason: impl Into<String>) -> Self {
        Measure::Undefined {
            reason: reason.into(),
        }
    }
}

/// Metric value plus the per-group quantities it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: MetricId,
    pub value: Measure,
    /// group name -> quantity name -> value
    pub per_group: BTreeMap<String, BTreeMap<String, f64>>,
    /// Skipped bins/strata and similar remarks.
    pub notes: Vec<String>,
}

impl MetricValue {
    fn new(metric: MetricId) -> Self {
        Self {
            metric,
            value: Measure::undefined("not computed"),
            per_group: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, g: Group, key: impl Into<String>, v: f64) {
        self.per_group
            .entry(g.as_str().to_string())
            .or_default()
            .insert(key.into(), v);
    }

    fn defined(mut self, v: f64) -> Self {
        self.value = Measure::Defined { value: v };
        self
    }

    fn undefined(mut self, reason: impl Into<String>) -> Self {
        self.value = Measure::undefined(reason);
        self
    }

    pub fn get(&self) -> Option<f64> {
        self.value.value()
    }

    /// A value that could not be computed at all, e.g. for lack of input.
    pub fn unavailable(metric: MetricId, reason: impl Into<String>) -> Self {
        Self::new(metric).undefined(reason)
    }

    fn record_counts(&mut self, g: Group, c: &ConfusionCounts) {
        self.record(g, "tp", c.tp as f64);
        self.record(g, "fp", c.fp as f64);
        self.record(g, "tn", c.tn as f64);
        self.record(g, "fn", c.fn_ as f64);
    }
}

/// Favorable count out of a group total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub favorable: u64,
    pub total: u64,
}

impl Proportion {
    pub fn new(favorable: u64, total: u64) -> Self {
        debug_assert!(favorable <= total);
        Self { favorable, total }
    }

    pub fn rate(&self) -> Option<f64> {
        ratio(self.favorable, self.total)
    }
}

/// Favorable/total tallies for both groups.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCounts {
    pub privileged: Proportion,
    pub unprivileged: Proportion,
}

impl ParityCounts {
    pub fn get(&self, g: Group) -> Proportion {
        match g {
            Group::Privileged => self.privileged,
            Group::Unprivileged => self.unprivileged,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            privileged: self.unprivileged,
            unprivileged: self.privileged,
        }
    }

    /// Favorable = actual label 1.
    pub fn from_outcomes(gp: &GroupedPredictions) -> Self {
        Self::tally(gp, |r| r.actual)
    }

    /// Favorable = predicted label 1.
    pub fn from_decisions(gp: &GroupedPredictions) -> Self {
        Self::tally(gp, |r| r.predicted)
    }

    fn tally(gp: &GroupedPredictions, favorable: impl Fn(&Record) -> bool) -> Self {
        let mut out = Self::default();
        for r in gp.records() {
            let p = match r.group {
                Group::Privileged => &mut out.privileged,
                Group::Unprivileged => &mut out.unprivileged,
            };
            p.total += 1;
            if favorable(r) {
                p.favorable += 1;
            }
        }
        out
    }
}

const GROUPS: [Group; 2] = [Group::Unprivileged, Group::Privileged];

fn parity_gap(metric: MetricId, counts: &ParityCounts) -> MetricValue {
    let mut mv = MetricValue::new(metric);
    for g in GROUPS {
        let p = counts.get(g);
        mv.record(g, "favorable", p.favorable as f64);
        mv.record(g, "total", p.total as f64);
        if let Some(rate) = p.rate() {
            mv.record(g, "proportion", rate);
        }
    }
    match (counts.unprivileged.rate(), counts.privileged.rate()) {
        (Some(u), Some(p)) => mv.defined(u - p),
        _ => {
            let g = if counts.unprivileged.total == 0 {
                Group::Unprivileged
            } else {
                Group::Privileged
            };
            mv.undefined(format!("empty group: {g} group has no members"))
        }
    }
}

/// `P(favorable | unprivileged) - P(favorable | privileged)`.
pub fn statistical_parity_difference(counts: &ParityCounts) -> MetricValue {
    parity_gap(MetricId::StatisticalParityDifference, counts)
}

/// Statistical parity over predicted labels.
pub fn equal_acceptance_rate_gap(gp: &GroupedPredictions) -> MetricValue {
    parity_gap(
        MetricId::EqualAcceptanceRateGap,
        &ParityCounts::from_decisions(gp),
    )
}

fn empty_group(gp: &GroupedPredictions) -> Option<Group> {
    GROUPS.into_iter().find(|&g| gp.group_len(g) == 0)
}

/// Per-group rate from confusion counts, differenced unprivileged minus
/// privileged.
fn rate_gap(
    metric: MetricId,
    gp: &GroupedPredictions,
    name: &str,
    rate: impl Fn(&ConfusionCounts) -> Option<f64>,
    why_undefined: &str,
) -> MetricValue {
    let mut mv = MetricValue::new(metric);
    if let Some(g) = empty_group(gp) {
        return mv.undefined(format!("empty group: {g} group has no records"));
    }
    let mut vals = [0.0; 2];
    for (i, g) in GROUPS.into_iter().enumerate() {
        let c = gp.counts(g);
        mv.record_counts(g, &c);
        match rate(&c) {
            Some(v) => {
                mv.record(g, name, v);
                vals[i] = v;
            }
            None => return mv.undefined(format!("{g} group has {why_undefined}")),
        }
    }
    mv.defined(vals[0] - vals[1])
}

/// `PPV(unprivileged) - PPV(privileged)`.
pub fn predictive_parity_gap(gp: &GroupedPredictions) -> MetricValue {
    rate_gap(
        MetricId::PredictiveParityGap,
        gp,
        "ppv",
        |c| c.rates().ppv,
        "no predicted positives (TP + FP = 0)",
    )
}

/// `FNR(unprivileged) - FNR(privileged)`.
pub fn equal_opportunity_gap(gp: &GroupedPredictions) -> MetricValue {
    rate_gap(
        MetricId::EqualOpportunityGap,
        gp,
        "fnr",
        |c| c.rates().fnr,
        "no actual positives (TP + FN = 0)",
    )
}

/// `FPR(unprivileged) - FPR(privileged)`.
pub fn predictive_equality_gap(gp: &GroupedPredictions) -> MetricValue {
    rate_gap(
        MetricId::PredictiveEqualityGap,
        gp,
        "fpr",
        |c| c.rates().fpr,
        "no actual negatives (FP + TN = 0)",
    )
}

/// `accuracy(unprivileged) - accuracy(privileged)`.
pub fn accuracy_equality_gap(gp: &GroupedPredictions) -> MetricValue {
    rate_gap(
        MetricId::AccuracyEqualityGap,
        gp,
        "accuracy",
        ConfusionCounts::accuracy,
        "no records",
    )
}

fn max_abs_of_two(
    metric: MetricId,
    (a_name, a): (&str, MetricValue),
    (b_name, b): (&str, MetricValue),
) -> MetricValue {
    let mut mv = MetricValue::new(metric);
    for part in [&a, &b] {
        for (g, qs) in &part.per_group {
            mv.per_group
                .entry(g.clone())
                .or_default()
                .extend(qs.iter().map(|(k, v)| (k.clone(), *v)));
        }
    }
    let (ga, gb) = match (&a.value, &b.value) {
        (Measure::Defined { value: x }, Measure::Defined { value: y }) => (*x, *y),
        (Measure::Undefined { reason }, _) | (_, Measure::Undefined { reason }) => {
            return mv.undefined(reason.clone())
        }
    };
    mv.notes.push(format!("{a_name} = {ga}"));
    mv.notes.push(format!("{b_name} = {gb}"));
    mv.defined(ga.abs().max(gb.abs()))
}

/// `max(|TPR gap|, |FPR gap|)`.
pub fn equalized_odds_gap(gp: &GroupedPredictions) -> MetricValue {
    let tpr = rate_gap(
        MetricId::EqualizedOddsGap,
        gp,
        "tpr",
        |c| c.rates().tpr,
        "no actual positives (TP + FN = 0)",
    );
    let fpr = predictive_equality_gap(gp);
    max_abs_of_two(MetricId::EqualizedOddsGap, ("tpr_gap", tpr), ("fpr_gap", fpr))
}

/// `max(|PPV gap|, |NPV gap|)`.
pub fn conditional_use_accuracy_gap(gp: &GroupedPredictions) -> MetricValue {
    let ppv = predictive_parity_gap(gp);
    let npv = rate_gap(
        MetricId::ConditionalUseAccuracyGap,
        gp,
        "npv",
        |c| c.rates().npv,
        "no predicted negatives (TN + FN = 0)",
    );
    max_abs_of_two(
        MetricId::ConditionalUseAccuracyGap,
        ("ppv_gap", ppv),
        ("npv_gap", npv),
    )
}

/// FN/FP ratio balance by cross-multiplication:
/// `(FN_u * FP_p - FN_p * FP_u) / max(1, FN_u * FP_p + FN_p * FP_u)`.
pub fn treatment_equality(gp: &GroupedPredictions) -> MetricValue {
    let mut mv = MetricValue::new(MetricId::TreatmentEquality);
    if let Some(g) = empty_group(gp) {
        return mv.undefined(format!("empty group: {g} group has no records"));
    }
    let u = gp.counts(Group::Unprivileged);
    let p = gp.counts(Group::Privileged);
    for (g, c) in [(Group::Unprivileged, &u), (Group::Privileged, &p)] {
        mv.record(g, "fn", c.fn_ as f64);
        mv.record(g, "fp", c.fp as f64);
    }
    // u128 keeps the products exact for any u64 counts.
    let a = u.fn_ as u128 * p.fp as u128;
    let b = p.fn_ as u128 * u.fp as u128;
    let num = a as f64 - b as f64;
    let den = (a + b).max(1) as f64;
    mv.defined(num / den)
}

/// Largest per-stratum acceptance-rate gap, over strata of the legitimate
/// factor. `strata = None` uses every observed value.
pub fn conditional_statistical_parity(
    gp: &GroupedPredictions,
    strata: Option<&BTreeSet<String>>,
) -> MetricValue {
    let mut mv = MetricValue::new(MetricId::ConditionalStatisticalParity);
    let missing = gp
        .records()
        .iter()
        .filter(|r| r.legitimate.is_none())
        .count();
    if missing > 0 {
        return mv.undefined(format!("{missing} records carry no legitimate factor"));
    }
    let mut tallies: BTreeMap<&str, ParityCounts> = BTreeMap::new();
    if let Some(wanted) = strata {
        for s in wanted {
            tallies.entry(s.as_str()).or_default();
        }
    }
    for r in gp.records() {
        let key = r.legitimate.as_deref().unwrap_or_default();
        if strata.is_some_and(|w| !w.contains(key)) {
            continue;
        }
        let t = tallies.entry(key).or_default();
        let p = match r.group {
            Group::Privileged => &mut t.privileged,
            Group::Unprivileged => &mut t.unprivileged,
        };
        p.total += 1;
        p.favorable += r.predicted as u64;
    }
    let mut best: Option<f64> = None;
    for (stratum, t) in &tallies {
        match (t.unprivileged.rate(), t.privileged.rate()) {
            (Some(u), Some(p)) => {
                mv.record(Group::Unprivileged, format!("stratum[{stratum}].acceptance_rate"), u);
                mv.record(Group::Privileged, format!("stratum[{stratum}].acceptance_rate"), p);
                let gap = (u - p).abs();
                best = Some(best.map_or(gap, |b| b.max(gap)));
            }
            _ => mv.notes.push(format!(
                "stratum `{stratum}` skipped: a group has no members"
            )),
        }
    }
    match best {
        Some(v) => mv.defined(v),
        None => mv.undefined("no stratum contains both groups"),
    }
}

fn missing_scores(gp: &GroupedPredictions) -> bool {
    gp.records().iter().any(|r| r.score.is_none())
}

fn bin_of(score: f64, bins: usize) -> usize {
    ((score * bins as f64).floor() as usize).min(bins - 1)
}

/// Largest per-bin gap in `P(Y = 1 | score bin, group)` over equal-width
/// bins on `[0, 1]`. Bins missing either group are skipped.
pub fn calibration_gap(gp: &GroupedPredictions, bins: u32) -> MetricValue {
    let mut mv = MetricValue::new(MetricId::CalibrationGap);
    if missing_scores(gp) {
        return mv.undefined("scores missing");
    }
    let bins = bins.max(1) as usize;
    // [group][bin] -> (positives, n)
    let mut table = [vec![(0u64, 0u64); bins], vec![(0u64, 0u64); bins]];
    for r in gp.records() {
        let gi = (r.group == Group::Privileged) as usize;
        let cell = &mut table[gi][bin_of(r.score.unwrap_or_default(), bins)];
        cell.0 += r.actual as u64;
        cell.1 += 1;
    }
    let width = 1.0 / bins as f64;
    let mut best: Option<f64> = None;
    for (b, (&(up, un), &(pp, pn))) in table[0].iter().zip(&table[1]).enumerate() {
        let label = format!("bin[{:.4},{:.4}]", b as f64 * width, (b + 1) as f64 * width);
        for (g, pos, n) in [(Group::Unprivileged, up, un), (Group::Privileged, pp, pn)] {
            if n > 0 {
                mv.record(g, format!("{label}.n"), n as f64);
                mv.record(g, format!("{label}.positive_rate"), pos as f64 / n as f64);
            }
        }
        if un == 0 || pn == 0 {
            if un + pn > 0 {
                mv.notes.push(format!("{label} skipped: a group is absent"));
            }
            continue;
        }
        let gap = (up as f64 / un as f64 - pp as f64 / pn as f64).abs();
        best = Some(best.map_or(gap, |x| x.max(gap)));
    }
    match best {
        Some(v) => mv.defined(v),
        None => mv.undefined("no comparable bin"),
    }
}

fn balance_gap(gp: &GroupedPredictions, metric: MetricId, class: bool) -> MetricValue {
    let mut mv = MetricValue::new(metric);
    if missing_scores(gp) {
        return mv.undefined("scores missing");
    }
    let class_name = if class { "positive" } else { "negative" };
    let mut means = [0.0; 2];
    for (i, g) in GROUPS.into_iter().enumerate() {
        let mut scores: Vec<f64> = gp
            .group(g)
            .filter(|r| r.actual == class)
            .filter_map(|r| r.score)
            .collect();
        if scores.is_empty() {
            return mv.undefined(format!("{g} group has no actual {class_name} records"));
        }
        // sorted so the sum does not depend on record order
        scores.sort_by(f64::total_cmp);
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        mv.record(g, "n", scores.len() as f64);
        mv.record(g, "mean_score", mean);
        means[i] = mean;
    }
    mv.defined(means[0] - means[1])
}

/// Mean score among actual positives, unprivileged minus privileged.
pub fn balance_positive_gap(gp: &GroupedPredictions) -> MetricValue {
    balance_gap(gp, MetricId::BalancePositiveGap, true)
}

/// Mean score among actual negatives, unprivileged minus privileged.
pub fn balance_negative_gap(gp: &GroupedPredictions) -> MetricValue {
    balance_gap(gp, MetricId::BalanceNegativeGap, false)
}
