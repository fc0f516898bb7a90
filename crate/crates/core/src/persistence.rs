//! Versioned, checksummed file storage for assessments, catalogs and
//! integrated assessments.
//!
//! A file is a canonical JSON envelope:
//! `{"checksum", "kind", "payload", "schema_version"}` where the checksum is
//! the SHA-256 of the payload's compact canonical bytes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::assessment::{Assessment, AssessmentRepr, InvariantViolation};
use crate::canonical::{to_canonical_bytes, to_canonical_string};
use crate::catalog::{Catalog, RightEntry};
use crate::scoring::Level;
use crate::workflow::IntegratedAssessment;

pub const CURRENT_SCHEMA_VERSION: u64 = 2;
pub const FILE_EXTENSION: &str = ".hria.json";

#[derive(Debug, Error)]
pub enum PersistenceError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("checksum mismatch (recorded {recorded}, computed {computed})")]
    ChecksumMismatch { recorded: String, computed: String },
    #[error("unsupported schema_version {0} (this engine reads 1..={CURRENT_SCHEMA_VERSION})")]
    UnknownSchema(u64),
    #[error("unknown document kind {0:?}")]
    UnknownKind(String),
    #[error("expected a {expected} file, found {found}")]
    WrongKind { expected: DocumentKind, found: DocumentKind },
    #[error(transparent)]
    InvariantViolation(#[from] InvariantViolation),
}

impl PersistenceError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Assessment,
    Catalog,
    Integrated,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Assessment => "assessment",
            DocumentKind::Catalog => "catalog",
            DocumentKind::Integrated => "integrated",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [DocumentKind::Assessment, DocumentKind::Catalog, DocumentKind::Integrated]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

impl std::fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Document {
    Assessment(Assessment),
    Catalog(Catalog),
    Integrated(IntegratedAssessment),
}

impl Document {
    pub fn kind(&self) -> DocumentKind {
        match self {
            Document::Assessment(_) => DocumentKind::Assessment,
            Document::Catalog(_) => DocumentKind::Catalog,
            Document::Integrated(_) => DocumentKind::Integrated,
        }
    }

    fn payload(&self) -> Value {
        let v = match self {
            Document::Assessment(a) => serde_json::to_value(a),
            Document::Catalog(c) => serde_json::to_value(c),
            Document::Integrated(i) => serde_json::to_value(i),
        };
        v.expect("documents serialize to JSON")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEnvelope {
    pub schema_version: u64,
    pub kind: DocumentKind,
    pub payload: Value,
    pub checksum: String,
}

impl FileEnvelope {
    pub fn wrap(doc: &Document) -> Self {
        let payload = doc.payload();
        Self {
            schema_version: CURRENT_SCHEMA_VERSION,
            kind: doc.kind(),
            checksum: checksum(&payload),
            payload,
        }
    }
}

/// Lowercase hex SHA-256 of the payload's compact canonical bytes.
pub fn checksum(payload: &Value) -> String {
    let bytes = to_canonical_bytes(payload).expect("json values serialize");
    format!("{:x}", Sha256::digest(&bytes))
}

/// Canonical file text for `doc`.
pub fn to_file_string(doc: &Document) -> String {
    to_canonical_string(&FileEnvelope::wrap(doc)).expect("json values serialize")
}

/// Parses, verifies, migrates and validates file text.
pub fn from_file_str(text: &str) -> Result<Document, PersistenceError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| PersistenceError::Malformed(e.to_string()))?;
    let Value::Object(mut obj) = raw else {
        return Err(PersistenceError::Malformed("top level must be an object".into()));
    };
    let version = obj
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| PersistenceError::Malformed("missing integer schema_version".into()))?;
    if !(1..=CURRENT_SCHEMA_VERSION).contains(&version) {
        return Err(PersistenceError::UnknownSchema(version));
    }
    let kind_str = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| PersistenceError::Malformed("missing string kind".into()))?;
    let kind = DocumentKind::parse(kind_str).ok_or_else(|| PersistenceError::UnknownKind(kind_str.to_string()))?;
    let recorded = obj
        .get("checksum")
        .and_then(Value::as_str)
        .ok_or_else(|| PersistenceError::Malformed("missing string checksum".into()))?
        .to_string();
    let mut payload = obj
        .remove("payload")
        .ok_or_else(|| PersistenceError::Malformed("missing payload".into()))?;

    // The checksum covers the payload as written, before any migration.
    let computed = checksum(&payload);
    if computed != recorded {
        return Err(PersistenceError::ChecksumMismatch { recorded, computed });
    }
    if version == 1 {
        migrate_v1(kind, &mut payload)?;
    }
    decode(kind, payload)
}

fn decode(kind: DocumentKind, payload: Value) -> Result<Document, PersistenceError> {
    let shape = |e: serde_path_to_error::Error<serde_json::Error>| {
        let path = e.path().to_string();
        PersistenceError::InvariantViolation(InvariantViolation {
            path: if path == "." { "payload".into() } else { path },
            message: e.into_inner().to_string(),
        })
    };
    match kind {
        DocumentKind::Assessment => {
            let repr: AssessmentRepr = serde_path_to_error::deserialize(payload).map_err(shape)?;
            Ok(Document::Assessment(Assessment::try_from(repr)?))
        }
        DocumentKind::Catalog => {
            #[derive(Deserialize)]
            struct Entries {
                entries: Vec<RightEntry>,
            }
            let e: Entries = serde_path_to_error::deserialize(payload).map_err(shape)?;
            let c = Catalog::from_entries(e.entries).map_err(|e| InvariantViolation {
                path: "payload.entries".into(),
                message: e.to_string(),
            })?;
            Ok(Document::Catalog(c))
        }
        DocumentKind::Integrated => {
            let i: IntegratedAssessment = serde_path_to_error::deserialize(payload).map_err(shape)?;
            i.validate().map_err(|m| InvariantViolation {
                path: "payload".into(),
                message: m,
            })?;
            Ok(Document::Integrated(i))
        }
    }
}

/// Version 1 stored levels as integers 1-4. Everything else is unchanged.
fn migrate_v1(kind: DocumentKind, payload: &mut Value) -> Result<(), InvariantViolation> {
    const RATING_FIELDS: [&str; 4] = ["probability", "exposure", "gravity", "effort"];
    match kind {
        DocumentKind::Assessment => {
            if let Some(risks) = payload.get_mut("risks").and_then(Value::as_array_mut) {
                for (i, risk) in risks.iter_mut().enumerate() {
                    if let Some(Value::Object(r)) = risk.get_mut("initial") {
                        levels_to_names(r, &RATING_FIELDS, &format!("risks[{i}].initial"))?;
                    }
                }
            }
            if let Some(rounds) = payload.get_mut("rounds").and_then(Value::as_array_mut) {
                for (i, round) in rounds.iter_mut().enumerate() {
                    if let Some(Value::Object(r)) = round.get_mut("residual") {
                        levels_to_names(r, &RATING_FIELDS, &format!("rounds[{i}].residual"))?;
                    }
                }
            }
        }
        DocumentKind::Integrated => {
            if let Some(Value::Object(rights)) = payload.get_mut("per_right") {
                for (key, right) in rights.iter_mut() {
                    let Value::Object(r) = right else { continue };
                    levels_to_names(r, &["max_level", "integrated_level"], &format!("per_right.{key}"))?;
                    if let Some(Value::Array(cs)) = r.get_mut("components") {
                        for (j, c) in cs.iter_mut().enumerate() {
                            if let Value::Object(c) = c {
                                levels_to_names(c, &["level"], &format!("per_right.{key}.components[{j}]"))?;
                            }
                        }
                    }
                }
            }
        }
        DocumentKind::Catalog => {}
    }
    Ok(())
}

fn levels_to_names(obj: &mut Map<String, Value>, fields: &[&str], path: &str) -> Result<(), InvariantViolation> {
    for field in fields {
        if let Some(v) = obj.get_mut(*field) {
            if let Some(n) = v.as_u64() {
                let level = u8::try_from(n)
                    .ok()
                    .and_then(Level::from_ordinal)
                    .ok_or_else(|| InvariantViolation {
                        path: format!("{path}.{field}"),
                        message: format!("level ordinal {n} outside 1..=4"),
                    })?;
                *v = Value::String(level.as_str().to_string());
            }
        }
    }
    Ok(())
}

/// Writes `doc` atomically: a temporary file in the target directory is
/// flushed to disk and renamed over `path`.
pub fn save(doc: &Document, path: impl AsRef<Path>) -> Result<(), PersistenceError> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| PersistenceError::io(path, e))?;
    // Temporary files are private; keep the target's mode, or the usual one.
    let permissions = match fs::metadata(path) {
        Ok(meta) => Some(meta.permissions()),
        Err(_) => default_permissions(),
    };
    if let Some(p) = permissions {
        tmp.as_file().set_permissions(p).map_err(|e| PersistenceError::io(path, e))?;
    }
    tmp.write_all(to_file_string(doc).as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| PersistenceError::io(path, e))?;
    tmp.persist(path).map_err(|e| PersistenceError::io(path, e.error))?;
    Ok(())
}

#[cfg(unix)]
fn default_permissions() -> Option<fs::Permissions> {
    use std::os::unix::fs::PermissionsExt;
    Some(fs::Permissions::from_mode(0o644))
}

#[cfg(not(unix))]
fn default_permissions() -> Option<fs::Permissions> {
    None
}

pub fn load(path: impl AsRef<Path>) -> Result<Document, PersistenceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| PersistenceError::io(path, e))?;
    from_file_str(&text)
}

pub fn save_assessment(assessment: &Assessment, path: impl AsRef<Path>) -> Result<(), PersistenceError> {
    save(&Document::Assessment(assessment.clone()), path)
}

pub fn load_assessment(path: impl AsRef<Path>) -> Result<Assessment, PersistenceError> {
    match load(path)? {
        Document::Assessment(a) => Ok(a),
        other => Err(PersistenceError::WrongKind {
            expected: DocumentKind::Assessment,
            found: other.kind(),
        }),
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, PersistenceError> {
    match load(path)? {
        Document::Catalog(c) => Ok(c),
        other => Err(PersistenceError::WrongKind {
            expected: DocumentKind::Catalog,
            found: other.kind(),
        }),
    }
}

pub fn load_integrated(path: impl AsRef<Path>) -> Result<IntegratedAssessment, PersistenceError> {
    match load(path)? {
        Document::Integrated(i) => Ok(i),
        other => Err(PersistenceError::WrongKind {
            expected: DocumentKind::Integrated,
            found: other.kind(),
        }),
    }
}

/// File stem of an assessment file, without the `.hria.json` suffix.
pub fn file_id(path: &Path) -> Option<&str> {
    path.file_name()?.to_str()?.strip_suffix(FILE_EXTENSION).filter(|s| !s.is_empty())
}
