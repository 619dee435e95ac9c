//! Canonical JSON persistence for trained ensembles.
//!
//! The layout is documented in `docs/model-format.md`. Field order is fixed
//! and reals are written as shortest round-trip decimals, so saving a loaded
//! model reproduces the original bytes.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::LabelSet;
use crate::ensemble::EnsembleModel;
use crate::error::{Error, Result};
use crate::features::{FeatureLimits, FeatureSpec, TfIdfModel, Vocabulary};
use crate::svm::{LinearModel, TrainConfig};

pub const FORMAT_NAME: &str = "varid-ensemble";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    format_version: u64,
    labels: Vec<String>,
    members: Vec<MemberRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberRecord {
    feature: String,
    train_config: ConfigRecord,
    n_documents: usize,
    vocabulary: Vec<String>,
    document_frequency: Vec<u32>,
    idf: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigRecord {
    c: f64,
    tolerance: f64,
    max_epochs: usize,
    seed: u64,
}

impl From<&TrainConfig> for ConfigRecord {
    fn from(c: &TrainConfig) -> Self {
        ConfigRecord {
            c: c.c,
            tolerance: c.tolerance,
            max_epochs: c.max_epochs,
            seed: c.seed,
        }
    }
}

impl From<ConfigRecord> for TrainConfig {
    fn from(c: ConfigRecord) -> Self {
        TrainConfig {
            c: c.c,
            tolerance: c.tolerance,
            max_epochs: c.max_epochs,
            seed: c.seed,
        }
    }
}

fn to_file(model: &EnsembleModel) -> ModelFile {
    ModelFile {
        format: FORMAT_NAME.to_owned(),
        format_version: FORMAT_VERSION,
        labels: model.label_set().labels().to_vec(),
        members: model
            .members()
            .iter()
            .map(|m| {
                let tfidf = m.tfidf();
                let vocab = tfidf.vocabulary();
                MemberRecord {
                    feature: tfidf.spec().to_string(),
                    train_config: m.config().into(),
                    n_documents: vocab.n_documents(),
                    vocabulary: vocab.terms().to_vec(),
                    document_frequency: vocab.document_frequency().to_vec(),
                    idf: tfidf.idf().to_vec(),
                    weights: m.weights().to_vec(),
                }
            })
            .collect(),
    }
}

fn from_file(file: ModelFile) -> Result<EnsembleModel> {
    if file.format != FORMAT_NAME {
        return Err(Error::ModelFormat(format!(
            "unexpected format {:?}",
            file.format
        )));
    }
    let label_set = LabelSet::try_from(file.labels)?;
    let members = file
        .members
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let in_member = |e: Error| Error::ModelFormat(format!("member {i}: {e}"));
            let spec = FeatureSpec::parse_with(&rec.feature, &FeatureLimits::unbounded())
                .map_err(in_member)?;
            let vocabulary =
                Vocabulary::from_parts(rec.vocabulary, rec.document_frequency, rec.n_documents)
                    .map_err(in_member)?;
            let tfidf = TfIdfModel::from_parts(spec, vocabulary, rec.idf).map_err(in_member)?;
            LinearModel::from_parts(
                label_set.clone(),
                tfidf,
                rec.weights,
                rec.train_config.into(),
            )
            .map_err(in_member)
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::new(label_set, members)
}

/// Serializes to the canonical text form, newline terminated.
pub fn to_string(model: &EnsembleModel) -> Result<String> {
    let mut s = serde_json::to_string(&to_file(model))
        .map_err(|e| Error::Internal(format!("model serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn byte_offset(content: &str, line: usize, column: usize) -> usize {
    let line_start: usize = content
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(content.len())
}

pub fn from_str(content: &str) -> Result<EnsembleModel> {
    let syntax = |e: serde_json::Error| {
        Error::ModelFormat(format!(
            "parse error at byte offset {}: {e}",
            byte_offset(content, e.line(), e.column())
        ))
    };
    let value: serde_json::Value = serde_json::from_str(content).map_err(syntax)?;
    match value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(FORMAT_VERSION) => {}
        Some(other) => return Err(Error::UnsupportedVersion(other)),
        None => return Err(Error::ModelFormat("missing format_version".into())),
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::ModelFormat(format!("schema error: {e}")))?;
    from_file(file)
}

/// Writes the model atomically: a temporary file in the target directory is
/// renamed over `path`.
pub fn save(model: &EnsembleModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = to_string(model)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(body.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<EnsembleModel> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&content)
}
