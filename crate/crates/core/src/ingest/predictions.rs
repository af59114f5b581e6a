use super::{read_dataset, IngestError};
use crate::fairness::{Group, GroupedPredictions, Record};
use crate::policy::ProtectedSpec;
use std::io::Read;
use std::path::Path;

fn label(cell: &str, row: u64, column: &str) -> Result<bool, IngestError> {
    match cell.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(IngestError::BadValue {
            row,
            message: format!("`{column}` must be 0 or 1, found `{other}`"),
        }),
    }
}

/// Prediction CSV with columns `group,predicted,actual` and optional
/// `score,legitimate`. A group cell is `privileged`/`unprivileged`, or the
/// protected value itself when `protected` is given.
pub fn read_predictions(
    reader: impl Read,
    protected: Option<&ProtectedSpec>,
) -> Result<GroupedPredictions, IngestError> {
    let ds = read_dataset(reader, "predictions")?;
    let group_i = ds.column_index("group")?;
    let pred_i = ds.column_index("predicted")?;
    let actual_i = ds.column_index("actual")?;
    let score_i = ds.column_index("score").ok();
    let legit_i = ds.column_index("legitimate").ok();

    let mut records = Vec::with_capacity(ds.len());
    for (i, row) in ds.rows.iter().enumerate() {
        let row_no = i as u64 + 2;
        let g = row[group_i].trim();
        let group = match g {
            "privileged" => Group::Privileged,
            "unprivileged" => Group::Unprivileged,
            v if protected.is_some_and(|p| p.privileged_value == v) => Group::Privileged,
            v if protected.is_some_and(|p| p.unprivileged_value == v) => Group::Unprivileged,
            other => {
                return Err(IngestError::BadValue {
                    row: row_no,
                    message: format!("unknown group `{other}`"),
                })
            }
        };
        let mut rec = Record::new(
            group,
            label(&row[pred_i], row_no, "predicted")?,
            label(&row[actual_i], row_no, "actual")?,
        );
        if let Some(si) = score_i {
            let cell = row[si].trim();
            if !cell.is_empty() {
                let s: f64 = cell.parse().map_err(|_| IngestError::BadValue {
                    row: row_no,
                    message: format!("score `{cell}` is not a number"),
                })?;
                if !(0.0..=1.0).contains(&s) {
                    return Err(IngestError::BadValue {
                        row: row_no,
                        message: format!("score {s} outside [0, 1]"),
                    });
                }
                rec.score = Some(s);
            }
        }
        if let Some(li) = legit_i {
            let cell = row[li].trim();
            if !cell.is_empty() {
                rec.legitimate = Some(cell.to_string());
            }
        }
        records.push(rec);
    }
    // scores were range-checked above
    GroupedPredictions::new(records).map_err(|e| IngestError::BadValue {
        row: 0,
        message: e.to_string(),
    })
}

pub fn read_predictions_file(
    path: &Path,
    protected: Option<&ProtectedSpec>,
) -> Result<GroupedPredictions, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_predictions(std::io::BufReader::new(file), protected)
}
