//! Semantic checks turning the raw item tree into a [`PolicyDocument`].

use super::diagnostic::{Diagnostic, DiagnosticKind, Position};
use super::parser::{Body, Field, Item, RawDocument, Value, ValueKind};
use super::{
    CompositionSpec, FavorableSpec, MetricConstraint, ModelSpec, PolicyDocument, ProtectedSpec,
    ViolationMode,
};
use crate::decision::{Criterion, DecisionSpec, PayoffMatrix, DEFAULT_HURWICZ_LAMBDA};
use crate::fairness::MetricId;
use crate::interval::Interval;
use std::collections::{BTreeMap, BTreeSet};

struct Checker {
    diags: Vec<Diagnostic>,
}

type Fields<'a> = BTreeMap<&'a str, &'a Field>;

impl Checker {
    fn error(&mut self, pos: Position, msg: impl Into<String>) {
        self.diags
            .push(Diagnostic::new(DiagnosticKind::Semantic, pos, msg));
    }

    fn fields<'a>(&mut self, what: &str, body: &'a Body, allowed: &[&str]) -> Fields<'a> {
        let mut out = BTreeMap::new();
        let Body::Block(fields) = body else {
            return out;
        };
        for f in fields {
            if !allowed.contains(&f.name.as_str()) {
                self.error(
                    f.pos,
                    format!(
                        "unknown field `{}` in {what} (allowed: {})",
                        f.name,
                        allowed.join(", ")
                    ),
                );
            } else if out.insert(f.name.as_str(), f).is_some() {
                self.error(f.pos, format!("duplicate field `{}` in {what}", f.name));
            }
        }
        out
    }

    fn required<'a>(
        &mut self,
        fields: &Fields<'a>,
        name: &str,
        what: &str,
        pos: Position,
    ) -> Option<&'a Value> {
        match fields.get(name) {
            Some(f) => Some(&f.value),
            None => {
                self.error(pos, format!("{what} is missing `{name}`"));
                None
            }
        }
    }

    fn type_error(&mut self, v: &Value, expected: &str) {
        self.error(
            v.pos,
            format!("expected {expected}, found {}", v.describe()),
        );
    }

    fn string(&mut self, v: &Value) -> Option<String> {
        match &v.kind {
            ValueKind::Str(s) => Some(s.clone()),
            _ => {
                self.type_error(v, "a string");
                None
            }
        }
    }

    fn number(&mut self, v: &Value) -> Option<f64> {
        match v.kind {
            ValueKind::Number(n) if n.is_finite() => Some(n),
            ValueKind::Number(_) => {
                self.error(v.pos, "number out of range");
                None
            }
            _ => {
                self.type_error(v, "a number");
                None
            }
        }
    }

    fn ident<'v>(&mut self, v: &'v Value) -> Option<&'v str> {
        match &v.kind {
            ValueKind::Ident(s) => Some(s),
            _ => {
                self.type_error(v, "an identifier");
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value) -> Option<bool> {
        match &v.kind {
            ValueKind::Ident(s) if s == "true" => Some(true),
            ValueKind::Ident(s) if s == "false" => Some(false),
            _ => {
                self.type_error(v, "`true` or `false`");
                None
            }
        }
    }

    fn list<'v>(&mut self, v: &'v Value, expected: &str) -> Option<&'v [Value]> {
        match &v.kind {
            ValueKind::List(items) => Some(items),
            _ => {
                self.type_error(v, expected);
                None
            }
        }
    }

    fn string_list(&mut self, v: &Value) -> Option<Vec<String>> {
        let items = self.list(v, "a list of strings")?;
        let mut ok = true;
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match self.string(it) {
                Some(s) => out.push(s),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn string_set(&mut self, v: &Value) -> Option<BTreeSet<String>> {
        let list = self.string_list(v)?;
        let n = list.len();
        let set: BTreeSet<String> = list.into_iter().collect();
        if set.len() != n {
            self.error(v.pos, "duplicate entries in list");
            return None;
        }
        Some(set)
    }

    fn interval(&mut self, v: &Value) -> Option<Interval> {
        let items = self.list(v, "an interval `[lo, hi]`")?;
        if items.len() != 2 {
            self.error(
                v.pos,
                format!("interval needs exactly 2 numbers, found {}", items.len()),
            );
            return None;
        }
        let lo = self.number(&items[0]);
        let hi = self.number(&items[1]);
        let (lo, hi) = (lo?, hi?);
        match Interval::new(lo, hi) {
            Ok(i) => Some(i),
            Err(_) => {
                self.error(
                    v.pos,
                    format!("range inverted: lower bound {lo} exceeds upper bound {hi}"),
                );
                None
            }
        }
    }

    fn matrix(&mut self, v: &Value) -> Option<Vec<Vec<f64>>> {
        let rows = self.list(v, "a list of payoff rows")?;
        let mut ok = true;
        let mut out = Vec::new();
        for row in rows {
            let Some(cells) = self.list(row, "a payoff row") else {
                ok = false;
                continue;
            };
            let mut r = Vec::with_capacity(cells.len());
            for c in cells {
                match self.number(c) {
                    Some(n) => r.push(n),
                    None => ok = false,
                }
            }
            out.push(r);
        }
        ok.then_some(out)
    }

    fn label(&mut self, item: &Item) -> (String, Position) {
        item.label
            .clone()
            .unwrap_or_else(|| (String::new(), item.pos))
    }

    fn protected(&mut self, item: &Item) -> Option<ProtectedSpec> {
        let (attribute, _) = self.label(item);
        let what = "protected_attribute";
        let f = self.fields(what, &item.body, &["privileged", "unprivileged"]);
        let p = self
            .required(&f, "privileged", what, item.pos)
            .and_then(|v| self.string(v));
        let u = self
            .required(&f, "unprivileged", what, item.pos)
            .and_then(|v| self.string(v));
        let (privileged_value, unprivileged_value) = (p?, u?);
        if privileged_value == unprivileged_value {
            self.error(
                item.pos,
                format!("privileged and unprivileged values are both \"{privileged_value}\""),
            );
            return None;
        }
        Some(ProtectedSpec {
            attribute,
            privileged_value,
            unprivileged_value,
        })
    }

    fn favorable(&mut self, item: &Item) -> Option<FavorableSpec> {
        let (column, _) = self.label(item);
        let f = self.fields("favorable_outcome", &item.body, &["value"]);
        let value = self
            .required(&f, "value", "favorable_outcome", item.pos)
            .and_then(|v| self.string(v))?;
        Some(FavorableSpec { column, value })
    }

    fn metric(&mut self, item: &Item) -> Option<MetricConstraint> {
        let (name, name_pos) = self.label(item);
        let what = format!("metric `{name}`");
        let f = self.fields(
            &what,
            &item.body,
            &["range", "bins", "tolerance", "description", "strata"],
        );
        let id = match name.parse::<MetricId>() {
            Ok(id) => Some(id),
            Err(e) => {
                let known: Vec<_> = MetricId::ALL.iter().map(|m| m.as_str()).collect();
                self.error(name_pos, format!("{e} (known: {})", known.join(", ")));
                None
            }
        };
        let range = self
            .required(&f, "range", &what, item.pos)
            .and_then(|v| self.interval(v));
        let mut c = MetricConstraint::new(id?, range?);
        if let Some(field) = f.get("bins") {
            if c.metric != MetricId::CalibrationGap {
                self.error(field.pos, "`bins` applies only to calibration_gap");
            } else if let Some(n) = self.number(&field.value) {
                if n.fract() != 0.0 || !(2.0..=1e6).contains(&n) {
                    self.error(field.value.pos, "`bins` must be an integer of at least 2");
                } else {
                    c.bins = n as u32;
                }
            }
        }
        if let Some(field) = f.get("tolerance") {
            if let Some(t) = self.number(&field.value) {
                if t < 0.0 {
                    self.error(field.value.pos, "`tolerance` must be nonnegative");
                } else {
                    c.tolerance = t;
                }
            }
        }
        if let Some(field) = f.get("description") {
            c.description = self.string(&field.value);
        }
        if let Some(field) = f.get("strata") {
            if c.metric != MetricId::ConditionalStatisticalParity {
                self.error(
                    field.pos,
                    "`strata` applies only to conditional_statistical_parity",
                );
            } else {
                c.strata = self.string_set(&field.value);
            }
        }
        Some(c)
    }

    fn model(&mut self, item: &Item) -> Option<ModelSpec> {
        let (model_id, _) = self.label(item);
        let f = self.fields(
            "model",
            &item.body,
            &[
                "description",
                "model_card_url",
                "acceptable_uses",
                "synthetic_data_capability",
            ],
        );
        let mut m = ModelSpec::new(model_id);
        if let Some(field) = f.get("description") {
            m.description = self.string(&field.value);
        }
        if let Some(field) = f.get("model_card_url") {
            m.model_card_url = self.string(&field.value);
        }
        if let Some(field) = f.get("acceptable_uses") {
            m.acceptable_uses = self.string_set(&field.value).unwrap_or_default();
        }
        if let Some(field) = f.get("synthetic_data_capability") {
            m.synthetic_data_capability = self.boolean(&field.value).unwrap_or(false);
        }
        Some(m)
    }

    fn composition(&mut self, item: &Item) -> Option<CompositionSpec> {
        let what = "composition";
        let f = self.fields(what, &item.body, &["reference_share", "range"]);
        let share = self
            .required(&f, "reference_share", what, item.pos)
            .and_then(|v| {
                let s = self.number(v)?;
                if (0.0..=1.0).contains(&s) {
                    Some(s)
                } else {
                    self.error(v.pos, "`reference_share` must lie in [0, 1]");
                    None
                }
            });
        let range = self
            .required(&f, "range", what, item.pos)
            .and_then(|v| self.interval(v));
        Some(CompositionSpec {
            reference_share: share?,
            range: range?,
        })
    }

    fn decision(&mut self, item: &Item) -> Option<DecisionSpec> {
        let what = "decision";
        let f = self.fields(
            what,
            &item.body,
            &["actions", "states", "payoffs", "criterion", "lambda"],
        );
        let actions = self
            .required(&f, "actions", what, item.pos)
            .and_then(|v| self.string_list(v));
        let states = self
            .required(&f, "states", what, item.pos)
            .and_then(|v| self.string_list(v));
        let payoffs = self
            .required(&f, "payoffs", what, item.pos)
            .and_then(|v| self.matrix(v));
        let criterion = self
            .required(&f, "criterion", what, item.pos)
            .and_then(|v| {
                let name = self.ident(v)?;
                match name.parse::<Criterion>() {
                    Ok(c) => Some(c),
                    Err(e) => {
                        self.error(v.pos, e.to_string());
                        None
                    }
                }
            });
        let mut lambda = Some(DEFAULT_HURWICZ_LAMBDA);
        if let Some(field) = f.get("lambda") {
            lambda = self.number(&field.value).and_then(|l| {
                if (0.0..=1.0).contains(&l) {
                    Some(l)
                } else {
                    self.error(field.value.pos, "`lambda` must lie in [0, 1]");
                    None
                }
            });
        }
        let matrix = match PayoffMatrix::new(actions?, states?, payoffs?) {
            Ok(m) => m,
            Err(e) => {
                let pos = f.get("payoffs").map_or(item.pos, |p| p.pos);
                self.error(pos, format!("invalid payoff matrix: {e}"));
                return None;
            }
        };
        Some(DecisionSpec {
            matrix,
            criterion: criterion?,
            lambda: lambda?,
        })
    }
}

fn once<T>(
    cx: &mut Checker,
    slot: &mut Option<(T, Position)>,
    item: &Item,
    value: Option<T>,
) {
    if let Some((_, first)) = slot {
        let first = *first;
        cx.error(
            item.pos,
            format!("duplicate `{}` section (first at {first})", item.keyword),
        );
        return;
    }
    if let Some(v) = value {
        *slot = Some((v, item.pos));
    }
}

pub(crate) fn check(raw: RawDocument) -> Result<PolicyDocument, Vec<Diagnostic>> {
    let mut cx = Checker { diags: Vec::new() };
    let mut protected = None;
    let mut favorable = None;
    let mut composition = None;
    let mut decision = None;
    let mut on_violation = None;
    let mut metrics: Vec<(MetricConstraint, Position)> = Vec::new();
    let mut sources: BTreeMap<String, Position> = BTreeMap::new();
    let mut models: BTreeMap<String, (ModelSpec, Position)> = BTreeMap::new();
    // sections present even if their content failed to check
    let mut seen_protected = false;

    for item in &raw.items {
        match item.keyword.as_str() {
            "protected_attribute" => {
                seen_protected = true;
                let v = cx.protected(item);
                once(&mut cx, &mut protected, item, v);
            }
            "favorable_outcome" => {
                let v = cx.favorable(item);
                once(&mut cx, &mut favorable, item, v);
            }
            "composition" => {
                let v = cx.composition(item);
                once(&mut cx, &mut composition, item, v);
            }
            "decision" => {
                let v = cx.decision(item);
                once(&mut cx, &mut decision, item, v);
            }
            "on_violation" => {
                let v = match &item.body {
                    Body::Assign(v) => match cx.ident(v) {
                        Some("explain") => Some(ViolationMode::Explain),
                        Some("halt") => Some(ViolationMode::Halt),
                        Some(other) => {
                            cx.error(
                                v.pos,
                                format!("unknown on_violation mode `{other}` (expected explain or halt)"),
                            );
                            None
                        }
                        None => None,
                    },
                    _ => None,
                };
                once(&mut cx, &mut on_violation, item, v);
            }
            "metric" => {
                if let Some(m) = cx.metric(item) {
                    if let Some((_, first)) = metrics.iter().find(|(c, _)| c.metric == m.metric) {
                        let first = *first;
                        cx.error(
                            item.pos,
                            format!("duplicate metric `{}` (first at {first})", m.metric),
                        );
                    } else {
                        metrics.push((m, item.pos));
                    }
                }
            }
            "approved_source" => {
                let (url, pos) = cx.label(item);
                let url = url.trim().to_string();
                if url.is_empty() {
                    cx.error(pos, "approved_source must not be empty");
                } else if let Some(first) = sources.get(&url) {
                    let first = *first;
                    cx.error(pos, format!("duplicate approved_source (first at {first})"));
                } else {
                    sources.insert(url, pos);
                }
            }
            "model" => {
                if let Some(m) = cx.model(item) {
                    if let Some((_, first)) = models.get(&m.model_id) {
                        let first = *first;
                        cx.error(
                            item.pos,
                            format!("duplicate model `{}` (first at {first})", m.model_id),
                        );
                    } else {
                        models.insert(m.model_id.clone(), (m, item.pos));
                    }
                }
            }
            // parser only admits known keywords
            other => cx.error(item.pos, format!("unknown item `{other}`")),
        }
    }

    if !seen_protected {
        cx.error(Position::START, "policy has no `protected_attribute` section");
    }
    if favorable.is_none() {
        if let Some((_, pos)) = metrics
            .iter()
            .find(|(m, _)| m.metric.uses_dataset_outcomes())
        {
            cx.error(
                *pos,
                "statistical_parity_difference needs a `favorable_outcome` section",
            );
        }
    }

    if !cx.diags.is_empty() {
        cx.diags.sort_by_key(|d| d.position);
        return Err(cx.diags);
    }
    let Some((protected, _)) = protected else {
        // unreachable: a missing or failed section produced a diagnostic
        return Err(vec![Diagnostic::new(
            DiagnosticKind::Semantic,
            Position::START,
            "policy has no valid `protected_attribute` section",
        )]);
    };
    Ok(PolicyDocument {
        name: raw.name,
        protected,
        favorable: favorable.map(|(f, _)| f),
        metrics: metrics.into_iter().map(|(m, _)| m).collect(),
        approved_sources: sources.into_keys().collect(),
        approved_models: models
            .into_iter()
            .map(|(k, (m, _))| (k, m))
            .collect(),
        composition: composition.map(|(c, _)| c),
        decision: decision.map(|(d, _)| d),
        on_violation: on_violation.map(|(v, _)| v).unwrap_or_default(),
    })
}
