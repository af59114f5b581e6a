//! Games against nature: choose an action when payoffs depend on an
//! unknown state of the world.
//!
//! Three criteria are provided:
//!
//! * **Wald** (maximin): score each action by its worst payoff, pick the best.
//! * **Hurwicz**: score each action by `λ·max + (1 − λ)·min` of its row.
//! * **Savage** (minimax regret): regret is the shortfall against the best
//!   payoff available in the same state; pick the action whose worst regret
//!   is smallest.
//!
//! Ties always go to the lowest action index.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

pub const DEFAULT_HURWICZ_LAMBDA: f64 = 0.5;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("payoff matrix has no actions")]
    NoActions,
    #[error("payoff matrix has no states")]
    NoStates,
    #[error("expected {expected} action labels, found {found}")]
    ActionCount { expected: usize, found: usize },
    #[error("row {row} has {found} payoffs, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("payoff at row {row}, column {col} is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("hurwicz lambda must lie in [0, 1], got {0}")]
    Lambda(f64),
    #[error("unknown criterion `{0}` (expected wald, hurwicz or savage)")]
    UnknownCriterion(String),
    #[error("matrix file: {0}")]
    Csv(String),
    #[error("matrix file line {line}: `{cell}` is not a number")]
    BadNumber { line: u64, cell: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Wald,
    Hurwicz,
    Savage,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Wald => "wald",
            Criterion::Hurwicz => "hurwicz",
            Criterion::Savage => "savage",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = DecisionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wald" => Ok(Criterion::Wald),
            "hurwicz" => Ok(Criterion::Hurwicz),
            "savage" => Ok(Criterion::Savage),
            other => Err(DecisionError::UnknownCriterion(other.to_string())),
        }
    }
}

/// Rectangular, nonempty grid of finite payoffs with row/column labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    actions: Vec<String>,
    states: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl PayoffMatrix {
    pub fn new(
        actions: Vec<String>,
        states: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, DecisionError> {
        if values.is_empty() {
            return Err(DecisionError::NoActions);
        }
        if actions.len() != values.len() {
            return Err(DecisionError::ActionCount {
                expected: values.len(),
                found: actions.len(),
            });
        }
        if states.is_empty() {
            return Err(DecisionError::NoStates);
        }
        for (row, r) in values.iter().enumerate() {
            if r.len() != states.len() {
                return Err(DecisionError::Ragged {
                    row,
                    expected: states.len(),
                    found: r.len(),
                });
            }
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(DecisionError::NonFinite { row, col });
            }
        }
        Ok(Self {
            actions,
            states,
            values,
        })
    }

    /// Unlabelled matrix; actions are named `a0, a1, ...` and states `s0, s1, ...`.
    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self, DecisionError> {
        let n_states = values.first().map_or(0, Vec::len);
        let actions = (0..values.len()).map(|i| format!("a{i}")).collect();
        let states = (0..n_states).map(|j| format!("s{j}")).collect();
        Self::new(actions, states, values)
    }

    /// CSV grid: header row holds state labels after a corner cell, each
    /// following row starts with its action label.
    pub fn from_csv(reader: impl Read) -> Result<Self, DecisionError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| DecisionError::Csv(e.to_string()))?
            .clone();
        let states: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut actions = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| DecisionError::Csv(e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let mut cells = rec.iter();
            actions.push(cells.next().unwrap_or_default().to_string());
            let row = cells
                .map(|c| {
                    c.parse::<f64>().map_err(|_| DecisionError::BadNumber {
                        line,
                        cell: c.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            values.push(row);
        }
        Self::new(actions, states, values)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn n_actions(&self) -> usize {
        self.values.len()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    fn row_min(row: &[f64]) -> f64 {
        row.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn row_max(row: &[f64]) -> f64 {
        row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `r_ij = max_k a_kj - a_ij`.
    pub fn regret_matrix(&self) -> Vec<Vec<f64>> {
        let col_max: Vec<f64> = (0..self.n_states())
            .map(|j| {
                self.values
                    .iter()
                    .map(|r| r[j])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        self.values
            .iter()
            .map(|r| r.iter().zip(&col_max).map(|(a, m)| m - a).collect())
            .collect()
    }
}

/// Outcome of applying a criterion to a payoff matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyChoice {
    pub criterion: Criterion,
    pub chosen_action_index: usize,
    pub chosen_action_label: String,
    pub criterion_value: f64,
    pub per_action_scores: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub regret_matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    pub matrix: PayoffMatrix,
}

/// First index attaining the optimum.
fn first_best(scores: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if better(s, scores[best]) {
            best = i;
        }
    }
    best
}

fn choice(
    m: &PayoffMatrix,
    criterion: Criterion,
    scores: Vec<f64>,
    idx: usize,
    regret_matrix: Option<Vec<Vec<f64>>>,
    lambda: Option<f64>,
) -> StrategyChoice {
    StrategyChoice {
        criterion,
        chosen_action_index: idx,
        chosen_action_label: m.actions[idx].clone(),
        criterion_value: scores[idx],
        per_action_scores: scores,
        regret_matrix,
        lambda,
        matrix: m.clone(),
    }
}

/// Maximin.
pub fn wald(m: &PayoffMatrix) -> StrategyChoice {
    let scores: Vec<f64> = m.values.iter().map(|r| PayoffMatrix::row_min(r)).collect();
    let idx = first_best(&scores, |a, b| a > b);
    choice(m, Criterion::Wald, scores, idx, None, None)
}

/// Optimism-weighted blend of row max and row min.
pub fn hurwicz(m: &PayoffMatrix, lambda: f64) -> Result<StrategyChoice, DecisionError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(DecisionError::Lambda(lambda));
    }
    let scores: Vec<f64> = m
        .values
        .iter()
        .map(|r| lambda * PayoffMatrix::row_max(r) + (1.0 - lambda) * PayoffMatrix::row_min(r))
        .collect();
    let idx = first_best(&scores, |a, b| a > b);
    Ok(choice(m, Criterion::Hurwicz, scores, idx, None, Some(lambda)))
}

/// Minimax regret.
pub fn savage(m: &PayoffMatrix) -> StrategyChoice {
    let regrets = m.regret_matrix();
    let scores: Vec<f64> = regrets.iter().map(|r| PayoffMatrix::row_max(r)).collect();
    let idx = first_best(&scores, |a, b| a < b);
    choice(m, Criterion::Savage, scores, idx, Some(regrets), None)
}

/// A decision problem as declared in a policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSpec {
    pub matrix: PayoffMatrix,
    pub criterion: Criterion,
    /// Only consulted by the Hurwicz criterion.
    pub lambda: f64,
}

impl DecisionSpec {
    pub fn new(matrix: PayoffMatrix, criterion: Criterion) -> Self {
        Self {
            matrix,
            criterion,
            lambda: DEFAULT_HURWICZ_LAMBDA,
        }
    }
}

pub fn decide(spec: &DecisionSpec) -> Result<StrategyChoice, DecisionError> {
    match spec.criterion {
        Criterion::Wald => Ok(wald(&spec.matrix)),
        Criterion::Hurwicz => hurwicz(&spec.matrix, spec.lambda),
        Criterion::Savage => Ok(savage(&spec.matrix)),
    }
}
