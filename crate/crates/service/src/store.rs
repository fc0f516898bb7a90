//! Assessment files under a root directory, one writer at a time per file.
//!
//! Files stay the source of truth: every read loads from disk and every
//! mutation is saved (atomically) before the lock is released.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use hria_core::assessment::is_token;
use hria_core::persistence::{self, FILE_EXTENSION};
use hria_core::{Assessment, AssessmentError, AssessmentMetadata, Catalog, Document};
use serde::Serialize;

use crate::error::ApiError;

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub id: String,
    pub title: String,
    pub stage: hria_core::Stage,
    pub revision: u64,
    pub risks: usize,
}

pub struct Store {
    root: PathBuf,
    catalog: Catalog,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>, catalog: Catalog) -> Self {
        Self {
            root: root.into(),
            catalog,
            locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Builtin rights plus any configured custom catalog.
    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    fn path_for(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}{FILE_EXTENSION}"))
    }

    fn existing_path(&self, id: &str) -> Result<PathBuf, ApiError> {
        if !is_token(id) {
            return Err(ApiError::not_found(format!("no assessment {id:?}")));
        }
        let path = self.path_for(id);
        if !path.is_file() {
            return Err(ApiError::not_found(format!("no assessment {id:?}")));
        }
        Ok(path)
    }

    fn lock_for(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    pub fn load(&self, id: &str) -> Result<Assessment, ApiError> {
        Ok(persistence::load_assessment(self.existing_path(id)?)?)
    }

    pub fn list(&self) -> Result<Vec<Summary>, ApiError> {
        let entries = fs::read_dir(&self.root).map_err(|e| ApiError::internal(e.to_string()))?;
        let mut ids: Vec<String> = entries
            .filter_map(Result::ok)
            .filter_map(|e| persistence::file_id(&e.path()).map(str::to_string))
            .filter(|id| is_token(id))
            .collect();
        ids.sort();
        let mut out = Vec::new();
        for id in ids {
            // Unreadable or foreign files are skipped, not fatal for the listing.
            if let Ok(a) = self.load(&id) {
                out.push(Summary {
                    title: a.title().to_string(),
                    stage: a.stage(),
                    revision: a.revision(),
                    risks: a.risks().len(),
                    id,
                });
            }
        }
        Ok(out)
    }

    pub async fn create(&self, metadata: AssessmentMetadata) -> Result<Assessment, ApiError> {
        let a = Assessment::new(metadata)?;
        let id = a.id().to_string();
        let lock = self.lock_for(&id);
        let _guard = lock.lock().await;
        let path = self.path_for(&id);
        if path.exists() {
            return Err(ApiError::new(
                axum::http::StatusCode::CONFLICT,
                "exists",
                format!("assessment {id:?} already exists"),
            ));
        }
        persistence::save(&Document::Assessment(a.clone()), &path)?;
        Ok(a)
    }

    /// Applies `f` under the assessment's write lock. `if_match`, when given,
    /// must equal the current revision. The result is saved before returning.
    pub async fn mutate<T>(
        &self,
        id: &str,
        if_match: Option<u64>,
        f: impl FnOnce(&mut Assessment) -> Result<T, AssessmentError>,
    ) -> Result<(Assessment, T), ApiError> {
        let path = self.existing_path(id)?;
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        let mut a = persistence::load_assessment(&path)?;
        if let Some(expected) = if_match {
            if expected != a.revision() {
                return Err(ApiError::conflict(expected, a.revision()));
            }
        }
        let out = f(&mut a)?;
        persistence::save(&Document::Assessment(a.clone()), &path)?;
        Ok((a, out))
    }
}
