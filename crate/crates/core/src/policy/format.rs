//! Canonical policy text.
//!
//! Sections are written in a fixed order (protected attribute, favorable
//! outcome, metrics, sources, models, composition, decision, violation
//! mode), one field per line, two-space indentation. Fields equal to their
//! defaults are omitted.

use super::{MetricConstraint, ModelSpec, PolicyDocument, ViolationMode};
use crate::decision::{DecisionSpec, DEFAULT_HURWICZ_LAMBDA};
use crate::fairness::DEFAULT_CALIBRATION_BINS;
use crate::interval::Interval;
use std::fmt::Write;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn name(s: &str) -> String {
    if is_ident(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

/// Shortest decimal that parses back to the same value; never uses
/// exponent notation.
fn num(x: f64) -> String {
    format!("{x}")
}

fn interval(i: &Interval) -> String {
    format!("[{}, {}]", num(i.lo()), num(i.hi()))
}

fn string_list<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let parts: Vec<String> = items.into_iter().map(|s| quote(s)).collect();
    format!("[{}]", parts.join(", "))
}

fn metric(out: &mut String, m: &MetricConstraint) {
    let _ = writeln!(out, "  metric {} {{", m.metric);
    let _ = writeln!(out, "    range = {}", interval(&m.range));
    if m.bins != DEFAULT_CALIBRATION_BINS {
        let _ = writeln!(out, "    bins = {}", m.bins);
    }
    if m.tolerance != 0.0 {
        let _ = writeln!(out, "    tolerance = {}", num(m.tolerance));
    }
    if let Some(s) = &m.strata {
        let _ = writeln!(out, "    strata = {}", string_list(s));
    }
    if let Some(d) = &m.description {
        let _ = writeln!(out, "    description = {}", quote(d));
    }
    out.push_str("  }\n");
}

fn model(out: &mut String, m: &ModelSpec) {
    let _ = writeln!(out, "  model {} {{", quote(&m.model_id));
    if let Some(d) = &m.description {
        let _ = writeln!(out, "    description = {}", quote(d));
    }
    if let Some(u) = &m.model_card_url {
        let _ = writeln!(out, "    model_card_url = {}", quote(u));
    }
    let _ = writeln!(out, "    acceptable_uses = {}", string_list(&m.acceptable_uses));
    let _ = writeln!(
        out,
        "    synthetic_data_capability = {}",
        m.synthetic_data_capability
    );
    out.push_str("  }\n");
}

fn decision(out: &mut String, d: &DecisionSpec) {
    out.push_str("  decision {\n");
    let _ = writeln!(out, "    actions = {}", string_list(d.matrix.actions()));
    let _ = writeln!(out, "    states = {}", string_list(d.matrix.states()));
    out.push_str("    payoffs = [\n");
    for row in d.matrix.values() {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        let _ = writeln!(out, "      [{}],", cells.join(", "));
    }
    out.push_str("    ]\n");
    let _ = writeln!(out, "    criterion = {}", d.criterion);
    if d.lambda != DEFAULT_HURWICZ_LAMBDA {
        let _ = writeln!(out, "    lambda = {}", num(d.lambda));
    }
    out.push_str("  }\n");
}

/// Canonical text for `doc`; parsing it yields an equal document.
pub fn serialize_policy(doc: &PolicyDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "policy {} {{", quote(&doc.name));

    let p = &doc.protected;
    let _ = writeln!(out, "  protected_attribute {} {{", name(&p.attribute));
    let _ = writeln!(out, "    privileged = {}", quote(&p.privileged_value));
    let _ = writeln!(out, "    unprivileged = {}", quote(&p.unprivileged_value));
    out.push_str("  }\n");

    if let Some(f) = &doc.favorable {
        let _ = writeln!(out, "  favorable_outcome {} {{", name(&f.column));
        let _ = writeln!(out, "    value = {}", quote(&f.value));
        out.push_str("  }\n");
    }
    for m in &doc.metrics {
        metric(&mut out, m);
    }
    for s in &doc.approved_sources {
        let _ = writeln!(out, "  approved_source {}", quote(s));
    }
    for m in doc.approved_models.values() {
        model(&mut out, m);
    }
    if let Some(c) = &doc.composition {
        out.push_str("  composition {\n");
        let _ = writeln!(out, "    reference_share = {}", num(c.reference_share));
        let _ = writeln!(out, "    range = {}", interval(&c.range));
        out.push_str("  }\n");
    }
    if let Some(d) = &doc.decision {
        decision(&mut out, d);
    }
    if doc.on_violation != ViolationMode::Explain {
        let _ = writeln!(out, "  on_violation = {}", doc.on_violation);
    }
    out.push_str("}\n");
    out
}
