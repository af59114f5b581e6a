use super::Record;
use serde::{Deserialize, Serialize};

/// TP/FP/TN/FN tallies for one group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn rates(&self) -> Rates {
        Rates::from_counts(self)
    }

    /// `(tp + tn) / total`, undefined on an empty group.
    pub fn accuracy(&self) -> Option<f64> {
        ratio(self.tp + self.tn, self.total())
    }

    /// Share of predicted positives.
    pub fn acceptance_rate(&self) -> Option<f64> {
        ratio(self.tp + self.fp, self.total())
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Tally records by `(predicted, actual)` quadrant.
pub fn confusion<'a>(records: impl IntoIterator<Item = &'a Record>) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for r in records {
        c.add(r.predicted, r.actual);
    }
    c
}

pub(crate) fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Confusion-matrix rates; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: Option<f64>,
    pub tnr: Option<f64>,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub fdr: Option<f64>,
    #[serde(rename = "for")]
    pub for_: Option<f64>,
}

impl Rates {
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let actual_pos = c.tp + c.fn_;
        let actual_neg = c.fp + c.tn;
        let pred_pos = c.tp + c.fp;
        let pred_neg = c.tn + c.fn_;
        Self {
            tpr: ratio(c.tp, actual_pos),
            fnr: ratio(c.fn_, actual_pos),
            tnr: ratio(c.tn, actual_neg),
            fpr: ratio(c.fp, actual_neg),
            ppv: ratio(c.tp, pred_pos),
            fdr: ratio(c.fp, pred_pos),
            npv: ratio(c.tn, pred_neg),
            for_: ratio(c.fn_, pred_neg),
        }
    }
}
