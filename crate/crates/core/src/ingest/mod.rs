//! Tabular inputs: datasets, prediction files and run manifests.

mod bind;
mod composition;
mod dataset;
mod manifest;
mod predictions;

pub use bind::{bind_groups, GroupBinding};
pub use composition::{composition_audit, CompositionAudit};
pub use dataset::{read_dataset, read_dataset_file, write_dataset, Dataset};
pub use manifest::{parse_manifest, RunManifest};
pub use predictions::{read_predictions, read_predictions_file};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing header row")]
    MissingHeader,
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged {
        row: u64,
        expected: u64,
        found: u64,
    },
    #[error("row {row}: invalid UTF-8")]
    InvalidUtf8 { row: u64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("both protected groups are empty (no rows with `{attribute}` = \"{privileged}\" or \"{unprivileged}\")")]
    EmptyGroups {
        attribute: String,
        privileged: String,
        unprivileged: String,
    },
    #[error("row {row}: {message}")]
    BadValue { row: u64, message: String },
    #[error("no labels to audit")]
    NoLabels,
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

impl IngestError {
    fn from_csv(e: csv::Error) -> Self {
        // the header is row 1, the first data record row 2
        let row = |pos: Option<&csv::Position>| pos.map_or(0, |p| p.record() + 1);
        match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => IngestError::Ragged {
                row: row(pos.as_ref()),
                expected: *expected_len,
                found: *len,
            },
            csv::ErrorKind::Utf8 { pos, .. } => IngestError::InvalidUtf8 {
                row: row(pos.as_ref()),
            },
            _ => IngestError::Csv(e.to_string()),
        }
    }
}
