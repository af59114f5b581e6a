use super::{ComplianceReport, ConstraintVerdict, Status};
use crate::decision::StrategyChoice;
use crate::fairness::Measure;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// Full trace for a human reader.
    Display,
    /// One sentence per verdict.
    Agent,
}

struct Style {
    color: bool,
}

impl Style {
    fn status(&self, s: Status) -> String {
        if !self.color {
            return s.to_string();
        }
        let code = match s {
            Status::Comply => "32",
            Status::Explain => "33",
            Status::Error => "31",
        };
        format!("\x1b[{code}m{s}\x1b[0m")
    }

    fn heading(&self, h: &str) -> String {
        if self.color {
            format!("\x1b[1m{h}\x1b[0m")
        } else {
            h.to_string()
        }
    }
}

fn measure(m: &Measure) -> String {
    match m {
        Measure::Defined { value } => value.to_string(),
        Measure::Undefined { reason } => format!("undefined ({reason})"),
    }
}

fn ratio(num: u64, den: u64) -> String {
    if den == 0 {
        "undefined".into()
    } else {
        (num as f64 / den as f64).to_string()
    }
}

fn agent(out: &mut String, r: &ComplianceReport, st: &Style) {
    let line = |out: &mut String, subject: &str, status: Status, reason: &str| {
        let _ = if status == Status::Comply {
            writeln!(out, "{subject}: {}", st.status(status))
        } else {
            writeln!(out, "{subject}: {} — {reason}", st.status(status))
        };
    };
    for f in &r.findings {
        let status = if f.is_approved() {
            Status::Comply
        } else {
            Status::Explain
        };
        let subject = format!("Context {} {}", f.item, f.subject);
        line(out, &subject, status, f.reason.as_deref().unwrap_or(""));
    }
    for v in &r.verdicts {
        line(out, &format!("Constraint {}", v.constraint), v.status, &v.explanation);
    }
    if let Some(c) = &r.composition {
        line(out, "Composition", c.status, &c.explanation);
    }
    for e in &r.errors {
        line(out, "Error", Status::Error, e);
    }
    let open = r.findings.iter().filter(|f| !f.is_approved()).count()
        + r.verdicts.iter().filter(|v| v.status != Status::Comply).count()
        + r.composition.iter().filter(|c| c.status != Status::Comply).count()
        + r.errors.len();
    line(out, "Overall", r.overall, &format!("{open} item(s) not in compliance"));
}

fn verdict(out: &mut String, v: &ConstraintVerdict, st: &Style) {
    let _ = writeln!(out, "  {}: {}", v.constraint, st.status(v.status));
    let _ = writeln!(out, "    value       {}", measure(&v.value));
    if v.tolerance != 0.0 {
        let _ = writeln!(out, "    range       {} (tolerance {})", v.declared_range, v.tolerance);
    }
    let _ = writeln!(out, "    interval    {}", v.interval);
    let _ = writeln!(out, "    explanation {}", v.explanation);
    for (group, quantities) in &v.per_group {
        for (k, x) in quantities {
            let _ = writeln!(out, "    {group}.{k} = {x}");
        }
    }
    for n in &v.notes {
        let _ = writeln!(out, "    note: {n}");
    }
}

fn strategy(out: &mut String, s: &StrategyChoice, st: &Style) {
    let _ = writeln!(out, "{}", st.heading(&format!("Decision ({})", s.criterion)));
    if let Some(l) = s.lambda {
        let _ = writeln!(out, "  lambda = {l}");
    }
    let states = s.matrix.states();
    let _ = writeln!(out, "  payoffs: {}", states.join(" | "));
    for (a, row) in s.matrix.actions().iter().zip(s.matrix.values()) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "    {a}: [{}]", cells.join(", "));
    }
    if let Some(regrets) = &s.regret_matrix {
        let _ = writeln!(out, "  regrets:");
        for (a, row) in s.matrix.actions().iter().zip(regrets) {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "    {a}: [{}]", cells.join(", "));
        }
    }
    let _ = writeln!(out, "  scores:");
    for (a, score) in s.matrix.actions().iter().zip(&s.per_action_scores) {
        let _ = writeln!(out, "    {a}: {score}");
    }
    let _ = writeln!(
        out,
        "  chosen: {} (action {}, value {})",
        s.chosen_action_label, s.chosen_action_index, s.criterion_value
    );
}

fn display(out: &mut String, r: &ComplianceReport, st: &Style) {
    let _ = writeln!(out, "{}", st.heading(&format!("Compliance report: {}", r.policy_name)));
    if let Some(t) = &r.created_at {
        let _ = writeln!(out, "created: {t}");
    }
    let _ = writeln!(out, "overall: {}", st.status(r.overall));
    let _ = writeln!(out, "on violation: {}", r.on_violation);

    if !r.errors.is_empty() {
        let _ = writeln!(out, "\n{}", st.heading("Errors"));
        for e in &r.errors {
            let _ = writeln!(out, "  {e}");
        }
    }

    if !r.findings.is_empty() {
        let _ = writeln!(out, "\n{}", st.heading("Operational context"));
        for f in &r.findings {
            match &f.reason {
                None => {
                    let _ = writeln!(out, "  {} {}: approved", f.item, f.subject);
                }
                Some(reason) => {
                    let _ = writeln!(out, "  {} {}: violation ({reason})", f.item, f.subject);
                }
            }
        }
    }

    if let Some(b) = &r.binding {
        let _ = writeln!(out, "\n{}", st.heading(&format!("Groups by `{}`", b.attribute)));
        for (role, value, p) in [
            ("privileged", &b.privileged_value, b.counts.privileged),
            ("unprivileged", &b.unprivileged_value, b.counts.unprivileged),
        ] {
            if b.has_outcome() {
                let _ = writeln!(
                    out,
                    "  {role} \"{value}\": {} of {} favorable, proportion {}",
                    p.favorable,
                    p.total,
                    ratio(p.favorable, p.total)
                );
            } else {
                let _ = writeln!(out, "  {role} \"{value}\": {} rows", p.total);
            }
        }
        if let (Some(col), Some(val)) = (&b.outcome_column, &b.favorable_value) {
            let _ = writeln!(out, "  favorable outcome: {col} = \"{val}\"");
        }
        let _ = writeln!(out, "  excluded rows: {}", b.excluded);
        for (v, n) in &b.excluded_values {
            let _ = writeln!(out, "    \"{v}\": {n}");
        }
    }

    if let Some(p) = &r.predictions {
        let _ = writeln!(out, "\n{}", st.heading(&format!("Predictions ({} records)", p.records)));
        for (g, c) in &p.confusion {
            let _ = writeln!(out, "  {g}: tp {} fp {} tn {} fn {}", c.tp, c.fp, c.tn, c.fn_);
        }
        for (g, s) in &p.scores {
            let _ = writeln!(out, "  {g} scores: n {} median {} iqr {}", s.n, s.median, s.iqr);
        }
    }

    let _ = writeln!(out, "\n{}", st.heading("Constraints"));
    if r.verdicts.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for v in &r.verdicts {
        verdict(out, v, st);
    }

    if let Some(c) = &r.composition {
        let a = &c.audit;
        let _ = writeln!(out, "\n{}", st.heading("Composition"));
        for (value, share) in &a.shares {
            let _ = writeln!(out, "  \"{value}\": {} of {}, share {share}", a.counts[value], a.total);
        }
        let _ = writeln!(
            out,
            "  unprivileged \"{}\" share {} vs reference {}: deviation {}",
            a.unprivileged_value, a.unprivileged_share, a.reference_share, a.deviation
        );
        let _ = writeln!(out, "  interval {}: {}", a.range, st.status(c.status));
    }

    if let Some(s) = &r.strategy {
        out.push('\n');
        strategy(out, s, st);
    }
}

/// The decision part of the display trace on its own.
pub fn render_strategy(s: &StrategyChoice, color: bool) -> String {
    let mut out = String::new();
    strategy(&mut out, s, &Style { color });
    out
}

/// Text rendering. With both modality flags set and `mode` = `None`, the
/// agent summary comes first, then the display trace.
pub fn render(report: &ComplianceReport, mode: Option<RenderMode>, color: bool) -> String {
    let st = Style { color };
    let mut out = String::new();
    let (show_agent, show_display) = match mode {
        Some(RenderMode::Agent) => (true, false),
        Some(RenderMode::Display) => (false, true),
        None => (report.modality.agent_mode, report.modality.display_mode),
    };
    if show_agent {
        agent(&mut out, report, &st);
    }
    if show_agent && show_display {
        out.push('\n');
    }
    if show_display {
        display(&mut out, report, &st);
    }
    out
}
