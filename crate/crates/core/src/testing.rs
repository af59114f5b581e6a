//! Proptest strategies for the core types, shared by this crate's tests and
//! downstream test suites (enable the `testing` feature).

use crate::decision::{Criterion, DecisionSpec, PayoffMatrix};
use crate::fairness::{Group, GroupedPredictions, MetricId, Record};
use crate::interval::Interval;
use crate::policy::{
    CompositionSpec, FavorableSpec, MetricConstraint, ModelSpec, PolicyDocument, ProtectedSpec,
    ViolationMode,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z_][a-z0-9_]{0,8}",
        "[ -~]{0,12}",
        any::<String>().prop_map(|s| s.chars().take(12).collect()),
    ]
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i32..1000).prop_map(|n| n as f64 / 100.0),
        -1.0f64..1.0,
        prop::num::f64::NORMAL,
        Just(0.0),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (number(), number()).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

fn metric_constraint() -> impl Strategy<Value = MetricConstraint> {
    (
        prop::sample::select(MetricId::ALL.to_vec()),
        interval(),
        2u32..50,
        prop_oneof![Just(0.0), 0.0f64..0.5],
        prop::option::of(text()),
        prop::option::of(prop::collection::btree_set(text(), 0..4)),
    )
        .prop_map(|(metric, range, bins, tolerance, description, strata)| {
            let mut m = MetricConstraint::new(metric, range);
            if metric == MetricId::CalibrationGap {
                m.bins = bins;
            }
            if metric == MetricId::ConditionalStatisticalParity {
                m.strata = strata;
            }
            m.tolerance = tolerance;
            m.description = description;
            m
        })
}

fn model_spec() -> impl Strategy<Value = ModelSpec> {
    (
        text(),
        prop::option::of(text()),
        prop::option::of(text()),
        prop::collection::btree_set(text(), 0..4),
        any::<bool>(),
    )
        .prop_map(|(id, description, url, uses, synth)| ModelSpec {
            model_id: id,
            description,
            model_card_url: url,
            acceptable_uses: uses,
            synthetic_data_capability: synth,
        })
}

fn decision_spec() -> impl Strategy<Value = DecisionSpec> {
    (1usize..5, 1usize..5)
        .prop_flat_map(|(a, s)| {
            (
                prop::collection::vec(prop::collection::vec(number(), s), a),
                prop::collection::vec(text(), a),
                prop::collection::vec(text(), s),
                prop::sample::select(vec![Criterion::Wald, Criterion::Hurwicz, Criterion::Savage]),
                prop_oneof![Just(0.5), 0.0f64..=1.0],
            )
        })
        .prop_map(|(values, actions, states, criterion, lambda)| {
            let matrix = PayoffMatrix::new(actions, states, values).unwrap();
            DecisionSpec {
                matrix,
                criterion,
                lambda,
            }
        })
}

pub fn policy_document() -> impl Strategy<Value = PolicyDocument> {
    let protected = (text(), text(), text())
        .prop_filter("distinct groups", |(_, p, u)| p != u)
        .prop_map(|(attribute, privileged_value, unprivileged_value)| ProtectedSpec {
            attribute,
            privileged_value,
            unprivileged_value,
        });
    let favorable = prop::option::of((text(), text()).prop_map(|(column, value)| FavorableSpec { column, value }));
    let metrics = prop::collection::vec(metric_constraint(), 0..6);
    // the checker trims sources, so none carry outer whitespace
    let sources = prop::collection::btree_set("[!-~]([ -~]{0,20}[!-~])?", 0..3);
    let models = prop::collection::vec(model_spec(), 0..3);
    let composition = prop::option::of(
        (0.0f64..=1.0, interval()).prop_map(|(reference_share, range)| CompositionSpec {
            reference_share,
            range,
        }),
    );
    (
        text(),
        protected,
        favorable,
        metrics,
        sources,
        models,
        composition,
        prop::option::of(decision_spec()),
        any::<bool>(),
    )
        .prop_map(
            |(name, protected, favorable, metrics, sources, models, composition, decision, halt)| {
                let mut doc = PolicyDocument::new(name, protected);
                doc.favorable = favorable;
                let mut seen = BTreeSet::new();
                doc.metrics = metrics
                    .into_iter()
                    .filter(|m| seen.insert(m.metric))
                    .filter(|m| doc.favorable.is_some() || m.metric != MetricId::StatisticalParityDifference)
                    .collect();
                doc.approved_sources = sources;
                doc.approved_models = models.into_iter().map(|m| (m.model_id.clone(), m)).collect();
                doc.composition = composition;
                doc.decision = decision;
                doc.on_violation = if halt {
                    ViolationMode::Halt
                } else {
                    ViolationMode::Explain
                };
                doc
            },
        )
}


/// Payoff grids up to 6x6 with integer entries in [-50, 50], so criterion
/// scores are exact.
pub fn payoff_grid() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(a, s)| {
        prop::collection::vec(prop::collection::vec((-50i32..=50).prop_map(f64::from), s), a)
    })
}

/// Up to 80 records over both groups, three legitimate-factor strata, and
/// scores on every record or none.
pub fn grouped_predictions() -> impl Strategy<Value = GroupedPredictions> {
    let record = (any::<bool>(), any::<bool>(), any::<bool>(), 0.0f64..=1.0, 0usize..3);
    (prop::collection::vec(record, 0..80), any::<bool>()).prop_map(|(rows, scored)| {
        let records = rows
            .into_iter()
            .map(|(privileged, pred, actual, score, stratum)| {
                let g = if privileged {
                    Group::Privileged
                } else {
                    Group::Unprivileged
                };
                let r = Record::new(g, pred, actual).with_legitimate(["x", "y", "z"][stratum]);
                if scored {
                    r.with_score(score)
                } else {
                    r
                }
            })
            .collect();
        GroupedPredictions::new(records).expect("scores drawn from [0, 1]")
    })
}
