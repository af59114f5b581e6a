use super::IngestError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// What a run intends to use: data source, model and purpose.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub dataset_source: String,
    pub model_id: Option<String>,
    pub declared_use: Option<String>,
    pub synthetic: bool,
}

/// Flat `key=value` lines. Blank lines and `#` comments are ignored;
/// `dataset_source` is required.
pub fn parse_manifest(text: &str) -> Result<RunManifest, IngestError> {
    let mut m = RunManifest::default();
    let mut source = None;
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| IngestError::Manifest { line, message };
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found `{trimmed}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let non_empty = |v: &str| (!v.is_empty()).then(|| v.to_string());
        match key {
            "dataset_source" => {
                source = Some(non_empty(value).ok_or_else(|| err("empty dataset_source".into()))?)
            }
            "model_id" => m.model_id = non_empty(value),
            "declared_use" => m.declared_use = non_empty(value),
            "synthetic" => {
                m.synthetic = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(format!("synthetic must be true or false, found `{other}`"))),
                }
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    m.dataset_source = source.ok_or(IngestError::Manifest {
        line: 0,
        message: "missing dataset_source".into(),
    })?;
    Ok(m)
}
