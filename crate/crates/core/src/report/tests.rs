use super::*;
use crate::decision::{wald, PayoffMatrix};
use crate::fairness::{statistical_parity_difference, ParityCounts, Proportion};
use crate::ingest::composition_audit;
use crate::policy::{parse_policy, MetricConstraint};
use proptest::prelude::*;

const POLICY: &str = r#"
policy "Scenario 1" {
  protected_attribute sex { privileged = "Male"; unprivileged = "Female" }
  favorable_outcome occupation { value = "Exec-managerial" }
  metric statistical_parity_difference { range = [-0.01, 0.01] }
}
"#;

fn adult_counts() -> ParityCounts {
    ParityCounts {
        privileged: Proportion::new(4338, 31648),
        unprivileged: Proportion::new(1748, 15351),
    }
}

fn spd(range: Interval) -> MetricConstraint {
    MetricConstraint::new(MetricId::StatisticalParityDifference, range)
}

fn value(v: f64) -> MetricOutcome {
    Ok(MetricValue {
        metric: MetricId::StatisticalParityDifference,
        value: Measure::Defined { value: v },
        per_group: BTreeMap::new(),
        notes: vec![],
    })
}

fn scenario_report() -> ComplianceReport {
    let policy = parse_policy(POLICY).unwrap();
    let mut evidence = Evidence::default();
    evidence.metrics.insert(
        MetricId::StatisticalParityDifference,
        Ok(statistical_parity_difference(&adult_counts())),
    );
    evidence.binding = Some(crate::ingest::GroupBinding {
        attribute: "sex".into(),
        privileged_value: "Male".into(),
        unprivileged_value: "Female".into(),
        counts: adult_counts(),
        outcome_column: Some("occupation".into()),
        favorable_value: Some("Exec-managerial".into()),
        excluded: 0,
        excluded_values: BTreeMap::new(),
    });
    evaluate(&policy, evidence)
}

#[test]
fn outside_interval_explains() {
    let v = ConstraintVerdict::new(
        &spd(Interval::new(-0.01, 0.01).unwrap()),
        &Ok(statistical_parity_difference(&adult_counts())),
    );
    assert_eq!(v.status, Status::Explain);
    assert_eq!(v.explanation, "value outside legitimate interval");
    assert!((v.value.value().unwrap() - -0.023201469667745764).abs() < 1e-12);
}

#[test]
fn interior_point_complies() {
    let v = ConstraintVerdict::new(&spd(Interval::new(-0.01, 0.01).unwrap()), &value(0.0));
    assert_eq!(v.status, Status::Comply);
}

#[test]
fn undefined_carries_reason() {
    let outcome = Ok(MetricValue::unavailable(
        MetricId::PredictiveParityGap,
        "empty group: unprivileged group has no records",
    ));
    let c = MetricConstraint::new(MetricId::PredictiveParityGap, Interval::new(-0.1, 0.1).unwrap());
    let v = ConstraintVerdict::new(&c, &outcome);
    assert_eq!(v.status, Status::Explain);
    assert!(v.explanation.contains("empty group"));
}

#[test]
fn tolerance_widens_interval() {
    let mut c = spd(Interval::new(-0.01, 0.01).unwrap());
    c.tolerance = 0.02;
    let v = ConstraintVerdict::new(&c, &value(-0.025));
    assert_eq!(v.status, Status::Comply);
    assert_eq!(v.interval, Interval::new(-0.03, 0.03).unwrap());
}

#[test]
fn missing_outcome_is_error() {
    let policy = parse_policy(POLICY).unwrap();
    let r = evaluate(&policy, Evidence::default());
    assert_eq!(r.verdicts[0].status, Status::Error);
    assert_eq!(r.overall, Status::Error);
}

#[test]
fn overall_status() {
    let r = scenario_report();
    assert_eq!(r.verdicts.len(), 1);
    assert_eq!(r.overall, Status::Explain);
    assert_eq!(r.first_violation().unwrap(), "constraint statistical_parity_difference: value outside legitimate interval");

    let mut policy = parse_policy(POLICY).unwrap();
    policy.metrics[0].range = Interval::new(-0.05, 0.05).unwrap();
    let mut evidence = Evidence::default();
    evidence.metrics.insert(
        MetricId::StatisticalParityDifference,
        Ok(statistical_parity_difference(&adult_counts())),
    );
    let r = evaluate(&policy, evidence.clone());
    assert_eq!(r.overall, Status::Comply);
    assert!(r.first_violation().is_none());

    let mut labels = vec!["Female"; 3];
    labels.extend(vec!["Male"; 17]);
    evidence.composition =
        Some(composition_audit(&labels, "Female", 0.4975, Interval::new(-0.05, 0.05).unwrap()).unwrap());
    let r = evaluate(&policy, evidence);
    assert_eq!(r.overall, Status::Explain);
    assert!(r.first_violation().unwrap().starts_with("composition"));
}

#[test]
fn agent_mode_comply_lines() {
    let mut policy = parse_policy(POLICY).unwrap();
    policy.metrics[0].range = Interval::new(-0.05, 0.05).unwrap();
    let mut evidence = Evidence::default();
    evidence.metrics.insert(MetricId::StatisticalParityDifference, value(0.0));
    let r = evaluate(&policy, evidence);
    let text = render(&r, Some(RenderMode::Agent), false);
    assert!(!text.is_empty());
    for line in text.lines() {
        assert!(line.ends_with("comply"), "{line}");
    }
}

#[test]
fn agent_mode_explains() {
    let text = render(&scenario_report(), Some(RenderMode::Agent), false);
    assert!(text.contains(
        "Constraint statistical_parity_difference: explain — value outside legitimate interval"
    ));
}

#[test]
fn display_shows_group_proportions() {
    let text = render(&scenario_report(), Some(RenderMode::Display), false);
    assert!(text.contains("4338 of 31648 favorable, proportion 0.13707027300303337"), "{text}");
    assert!(text.contains("1748 of 15351 favorable, proportion 0.11386880333528761"), "{text}");
    assert!(text.contains("[-0.01, 0.01]"));
    assert!(!text.contains('\x1b'));
    assert!(render(&scenario_report(), Some(RenderMode::Display), true).contains('\x1b'));
}

#[test]
fn rendering_is_deterministic() {
    let a = scenario_report();
    let b = scenario_report();
    assert_eq!(render(&a, None, false), render(&b, None, false));
    assert_eq!(to_json(&a), to_json(&b));
}

#[test]
fn both_modalities_agent_first() {
    let mut r = scenario_report();
    r.modality = Modality {
        display_mode: true,
        agent_mode: true,
    };
    let text = render(&r, None, false);
    let agent_at = text.find("Constraint statistical_parity_difference").unwrap();
    let display_at = text.find("Compliance report").unwrap();
    assert!(agent_at < display_at);
}

#[test]
fn display_includes_regret_matrix() {
    let mut r = scenario_report();
    let m = PayoffMatrix::from_values(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap();
    r.strategy = Some(crate::decision::savage(&m));
    let text = render(&r, Some(RenderMode::Display), false);
    assert!(text.contains("regrets:"));
    assert!(text.contains("a1: [2, 0]"), "{text}");
    r.strategy = Some(wald(&m));
    assert!(!render(&r, Some(RenderMode::Display), false).contains("regrets:"));
}

#[test]
fn empty_constraints_json() {
    let policy = crate::policy::PolicyDocument::new(
        "empty",
        crate::policy::ProtectedSpec {
            attribute: "sex".into(),
            privileged_value: "M".into(),
            unprivileged_value: "F".into(),
        },
    );
    let r = evaluate(&policy, Evidence::default());
    assert_eq!(r.overall, Status::Comply);
    let v: serde_json::Value = serde_json::from_slice(&to_json(&r)).unwrap();
    assert_eq!(v["verdicts"], serde_json::json!([]));
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
}

#[test]
fn json_round_trip_and_digits() {
    let r = scenario_report();
    let bytes = to_json(&r);
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert!(text.contains("-0.023201469667745764"), "{text}");
    assert_eq!(from_json(&bytes).unwrap(), r);
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    assert_eq!(
        keys,
        [
            "schema_version",
            "policy_name",
            "created_at",
            "modality",
            "on_violation",
            "overall",
            "findings",
            "binding",
            "predictions",
            "verdicts",
            "composition",
            "strategy",
            "errors"
        ]
    );
}

proptest! {
    #[test]
    fn widening_never_breaks_compliance(
        v in -1.0f64..1.0,
        lo in -1.0f64..1.0,
        w in 0.0f64..1.0,
        grow in 0.0f64..1.0,
    ) {
        let narrow = Interval::new(lo, lo + w).unwrap();
        let wide = Interval::new(lo - grow, lo + w + grow).unwrap();
        let a = ConstraintVerdict::new(&spd(narrow), &value(v));
        let b = ConstraintVerdict::new(&spd(wide), &value(v));
        if a.status == Status::Comply {
            prop_assert_eq!(b.status, Status::Comply);
        }
        prop_assert_eq!(a.status == Status::Comply, narrow.contains(v));
    }
}
