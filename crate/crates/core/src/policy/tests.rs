use super::*;
use crate::decision::{Criterion, PayoffMatrix};
use crate::ingest::RunManifest;
use crate::testing::policy_document;
use proptest::prelude::*;

const SCENARIO_1: &str = r#"
policy "Scenario 1" {
  protected_attribute sex { privileged = "Male"; unprivileged = "Female" }
  favorable_outcome occupation { value = "Exec-managerial" }
  metric statistical_parity_difference { range = [-0.01, 0.01] }
  approved_source "https://archive.ics.uci.edu/dataset/2/adult"
}
"#;

const RECRUITMENT: &str = r#"
policy "recruitment" {
  protected_attribute sex {
    privileged = "Male"
    unprivileged = "Female"
  }
  approved_source "https://archive.ics.uci.edu/dataset/2/adult"
  model "google/gemma-2-2b-it" {
    description = "small instruction-tuned model"
    acceptable_uses = ["recruitment"]
    synthetic_data_capability = true
  }
}
"#;

fn errors(src: &str) -> Diagnostics {
    parse_policy(src).expect_err("expected diagnostics")
}

fn wrap(items: &str) -> String {
    format!(
        "policy \"p\" {{\n  protected_attribute sex {{ privileged = \"M\"; unprivileged = \"F\" }}\n{items}\n}}\n"
    )
}

#[test]
fn minimal_policy_has_no_metrics() {
    let doc = parse_policy(
        "policy \"min\" {\n  protected_attribute sex { privileged = \"Male\"; unprivileged = \"Female\" }\n}\n",
    )
    .unwrap();
    assert_eq!(doc.name, "min");
    assert_eq!(doc.protected.attribute, "sex");
    assert_eq!(doc.protected.privileged_value, "Male");
    assert_eq!(doc.protected.unprivileged_value, "Female");
    assert!(doc.metrics.is_empty());
    assert_eq!(doc.on_violation, ViolationMode::Explain);
}

#[test]
fn metric_block_carries_its_range() {
    let doc = parse_policy(SCENARIO_1).unwrap();
    let m = doc.metric(MetricId::StatisticalParityDifference).unwrap();
    assert_eq!(m.range, Interval::new(-0.01, 0.01).unwrap());
    assert_eq!(m.bins, DEFAULT_CALIBRATION_BINS);
    assert_eq!(m.tolerance, 0.0);
    assert_eq!(
        doc.favorable,
        Some(FavorableSpec {
            column: "occupation".into(),
            value: "Exec-managerial".into()
        })
    );
    assert!(doc
        .approved_sources
        .contains("https://archive.ics.uci.edu/dataset/2/adult"));
}

#[test]
fn unclosed_brace_reported_at_eof() {
    let src = "policy \"p\" {\n  protected_attribute sex { privileged = \"M\"; unprivileged = \"F\" }\n";
    let d = errors(src);
    assert_eq!(d.0.len(), 1);
    let diag = &d.0[0];
    assert_eq!(diag.kind, DiagnosticKind::Syntax);
    assert_eq!(diag.position.offset, src.len());
    assert_eq!(diag.position.line, 3);
    assert!(diag.message.contains("1:12"), "{}", diag.message);
}

#[test]
fn lexical_errors_are_reported() {
    let d = errors("policy \"p\" { @ }");
    assert!(d.has_kind(DiagnosticKind::Lex));
    assert_eq!(d.0[0].position.to_string(), "1:14");

    let d = errors("policy \"unterminated {");
    assert!(d.has_kind(DiagnosticKind::Lex));

    let d = parse_policy_bytes(b"policy \"p\xff\" {}").unwrap_err();
    assert!(d.has_kind(DiagnosticKind::Lex));
    assert_eq!(d.0[0].position.offset, 9);
}

#[test]
fn syntax_error_for_unknown_item() {
    let d = errors(&wrap("  rule x { }"));
    assert!(d.has_kind(DiagnosticKind::Syntax));
    assert!(d.to_string().contains("rule"));
}

#[test]
fn inverted_range_is_semantic() {
    let d = errors(&wrap("  metric statistical_parity_difference { range = [0.01, -0.01] }"));
    assert!(d.has_kind(DiagnosticKind::Semantic));
    assert!(d.to_string().contains("range inverted"), "{d}");
}

#[test]
fn unknown_metric_lists_registry() {
    let d = errors(&wrap("  metric vibes_gap { range = [0, 1] }"));
    let text = d.to_string();
    assert!(text.contains("vibes_gap"));
    assert!(text.contains("equalized_odds_gap"));
}

#[test]
fn duplicates_are_rejected() {
    let twice = "  metric equalized_odds_gap { range = [0, 0.1] }\n";
    let d = errors(&wrap(&format!("{twice}{twice}")));
    assert!(d.to_string().contains("duplicate metric"));

    let d = errors(&wrap(
        "  protected_attribute race { privileged = \"a\"; unprivileged = \"b\" }",
    ));
    assert!(d.to_string().contains("duplicate"));

    let d = errors(&wrap("  approved_source \"x\"\n  approved_source \"x\""));
    assert!(d.to_string().contains("duplicate approved_source"));
}

#[test]
fn field_checks() {
    for (item, needle) in [
        ("  metric calibration_gap { range = [0, 1]; bins = 1 }", "bins"),
        ("  metric calibration_gap { range = [0, 1]; bins = 2.5 }", "bins"),
        ("  metric equalized_odds_gap { range = [0, 1]; bins = 4 }", "bins"),
        ("  metric equalized_odds_gap { range = [0, 1]; tolerance = -1 }", "tolerance"),
        ("  metric equalized_odds_gap { range = [0, 1, 2] }", "interval"),
        ("  metric equalized_odds_gap { }", "range"),
        ("  metric equalized_odds_gap { range = [0, 1]; colour = 1 }", "colour"),
        ("  metric equalized_odds_gap { range = [0, 1e5] }", ""),
        ("  on_violation = panic", "on_violation"),
        ("  composition { reference_share = 1.5; range = [0, 1] }", "reference_share"),
    ] {
        let d = errors(&wrap(item));
        assert!(!d.0.is_empty(), "{item}");
        assert!(d.to_string().contains(needle), "{item}: {d}");
    }
}

#[test]
fn statistical_parity_needs_favorable_outcome() {
    let d = errors(&wrap("  metric statistical_parity_difference { range = [-0.1, 0.1] }"));
    assert!(d.to_string().contains("favorable_outcome"), "{d}");
}

#[test]
fn same_group_values_rejected() {
    let d = errors("policy \"p\" { protected_attribute sex { privileged = \"M\"; unprivileged = \"M\" } }");
    assert!(d.has_kind(DiagnosticKind::Semantic));
}

#[test]
fn missing_protected_attribute() {
    let d = errors("policy \"p\" { }");
    assert!(d.to_string().contains("protected_attribute"));
}

#[test]
fn decision_block() {
    let doc = parse_policy(&wrap(
        r#"  decision {
    actions = ["High", "Average", "Short"]
    states = ["Disaster", "Medium", "Good"]
    payoffs = [[1, 1, 1], [-1, 1, 1], [-1, -1, 1]]
    criterion = hurwicz
    lambda = 0.25
  }"#,
    ))
    .unwrap();
    let d = doc.decision.unwrap();
    assert_eq!(d.criterion, Criterion::Hurwicz);
    assert_eq!(d.lambda, 0.25);
    assert_eq!(d.matrix.values()[1], vec![-1.0, 1.0, 1.0]);

    let d = errors(&wrap(
        "  decision { actions = [\"a\"]; states = [\"s\", \"t\"]; payoffs = [[1]]; criterion = wald }",
    ));
    assert!(d.to_string().contains("payoff"), "{d}");
}

#[test]
fn diagnostics_are_sorted_and_inside_input() {
    let src = wrap(
        "  metric nope { range = [1, 0] }\n  metric calibration_gap { range = [2, 1]; bins = 0 }",
    );
    let d = errors(&src);
    assert!(d.0.len() >= 3);
    assert!(d.0.windows(2).all(|w| w[0].position.offset <= w[1].position.offset));
    assert!(d.0.iter().all(|x| x.position.offset <= src.len()));
}

#[test]
fn serialized_scenario_contains_range() {
    let doc = parse_policy(SCENARIO_1).unwrap();
    let text = serialize_policy(&doc);
    assert!(text.contains("range = [-0.01, 0.01]"), "{text}");
    assert_eq!(parse_policy(&text).unwrap(), doc);
    assert_eq!(serialize_policy(&parse_policy(&text).unwrap()), text);
}

#[test]
fn empty_metrics_round_trip() {
    let doc = PolicyDocument::new(
        "empty",
        ProtectedSpec {
            attribute: "sex".into(),
            privileged_value: "Male".into(),
            unprivileged_value: "Female".into(),
        },
    );
    assert_eq!(parse_policy(&serialize_policy(&doc)).unwrap(), doc);
}

#[test]
fn default_lambda_is_elided_and_restored() {
    let mut doc = parse_policy(SCENARIO_1).unwrap();
    let m = PayoffMatrix::from_values(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    doc.decision = Some(DecisionSpec::new(m, Criterion::Hurwicz));
    let text = serialize_policy(&doc);
    assert!(!text.contains("lambda"));
    let back = parse_policy(&text).unwrap();
    assert_eq!(back.decision.as_ref().unwrap().lambda, 0.5);
    assert_eq!(back, doc);
}

fn manifest(source: &str, model: Option<&str>, use_: Option<&str>, synthetic: bool) -> RunManifest {
    RunManifest {
        dataset_source: source.into(),
        model_id: model.map(Into::into),
        declared_use: use_.map(Into::into),
        synthetic,
    }
}

#[test]
fn approved_source() {
    let doc = parse_policy(SCENARIO_1).unwrap();
    let f = check_manifest(
        &doc,
        &manifest("https://archive.ics.uci.edu/dataset/2/adult", None, None, false),
    );
    assert_eq!(f.len(), 1);
    assert!(f[0].is_approved());

    let f = check_manifest(&doc, &manifest("https://example.org/data.csv", None, None, false));
    assert_eq!(f[0].reason.as_deref(), Some("unknown source"));
}

#[test]
fn model_use_membership() {
    let doc = parse_policy(RECRUITMENT).unwrap();
    let src = "https://archive.ics.uci.edu/dataset/2/adult";
    let ok = check_manifest(&doc, &manifest(src, Some("google/gemma-2-2b-it"), Some("recruitment"), false));
    assert_eq!(ok.len(), 3);
    assert!(ok.iter().all(ContextFinding::is_approved));

    let bad = check_manifest(&doc, &manifest(src, Some("google/gemma-2-2b-it"), Some("credit-scoring"), false));
    let use_finding = bad.iter().find(|f| f.item == ManifestItem::DeclaredUse).unwrap();
    assert_eq!(use_finding.status, FindingStatus::Violation);
    assert_eq!(use_finding.reason.as_deref(), Some("use not acceptable"));

    let unknown = check_manifest(&doc, &manifest(src, Some("other/model"), None, false));
    assert_eq!(unknown[1].reason.as_deref(), Some("unknown model"));
}

#[test]
fn synthetic_capability() {
    let mut doc = parse_policy(RECRUITMENT).unwrap();
    let src = "https://archive.ics.uci.edu/dataset/2/adult";
    let m = manifest(src, Some("google/gemma-2-2b-it"), None, true);
    assert!(check_manifest(&doc, &m).iter().all(ContextFinding::is_approved));

    doc.approved_models
        .get_mut("google/gemma-2-2b-it")
        .unwrap()
        .synthetic_data_capability = false;
    let f = check_manifest(&doc, &m);
    assert!(!f.last().unwrap().is_approved());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn serialize_then_parse_is_identity(doc in policy_document()) {
        let text = serialize_policy(&doc);
        let back = parse_policy(&text).map_err(|d| TestCaseError::fail(format!("{d}\n{text}")))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_policy(&back), text);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        if let Err(d) = parse_policy_bytes(&bytes) {
            prop_assert!(!d.0.is_empty());
            for x in &d.0 {
                prop_assert!(x.position.offset <= bytes.len());
                prop_assert!(x.position.line >= 1 && x.position.column >= 1);
            }
        }
    }

    #[test]
    fn mutated_policies_never_panic(
        cut in 0usize..400,
        insert in "[{}\\[\\]=;,\"#\n a-z0-9.-]{0,6}",
    ) {
        let mut src = SCENARIO_1.to_string();
        let at = (0..=cut.min(src.len())).rev().find(|&i| src.is_char_boundary(i)).unwrap_or(0);
        src.insert_str(at, &insert);
        let _ = parse_policy(&src);
    }
}
