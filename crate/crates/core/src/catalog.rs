//! Registry of rights and freedoms that risks can be assessed against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("right key {0:?} is already registered")]
    DuplicateKey(String),
    #[error("right key {0:?} is not a non-empty ascii kebab-case identifier")]
    InvalidKey(String),
    #[error("right {0:?} has an empty title")]
    EmptyTitle(String),
    #[error("builtin right {0:?} cannot be redefined")]
    BuiltinModified(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightEntry {
    pub key: String,
    pub title: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_notes: Option<String>,
    #[serde(default)]
    pub builtin: bool,
}

impl RightEntry {
    /// A project-specific (non-builtin) entry.
    pub fn custom(key: impl Into<String>, title: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            title: title.into(),
            description: description.into(),
            context_notes: None,
            builtin: false,
        }
    }

    pub fn with_context_notes(mut self, notes: impl Into<String>) -> Self {
        self.context_notes = Some(notes.into());
        self
    }
}

/// Ascii kebab-case: lowercase alphanumeric words joined by single hyphens.
pub fn is_kebab_case(key: &str) -> bool {
    !key.is_empty()
        && key
            .split('-')
            .all(|word| !word.is_empty() && word.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()))
}

/// Immutable catalog value. Registration returns a new catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    entries: Vec<RightEntry>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Catalog {
    pub fn builtin() -> Self {
        Self {
            entries: builtin_catalog(),
        }
    }

    /// Builds a catalog from the builtin set plus `custom` entries, in order.
    pub fn with_custom<'a>(custom: impl IntoIterator<Item = &'a RightEntry>) -> Result<Self, CatalogError> {
        custom
            .into_iter()
            .try_fold(Self::builtin(), |catalog, entry| catalog.register(entry.clone()))
    }

    pub fn register(&self, mut entry: RightEntry) -> Result<Catalog, CatalogError> {
        if !is_kebab_case(&entry.key) {
            return Err(CatalogError::InvalidKey(entry.key));
        }
        if entry.title.trim().is_empty() {
            return Err(CatalogError::EmptyTitle(entry.key));
        }
        if self.get(&entry.key).is_some() {
            return Err(CatalogError::DuplicateKey(entry.key));
        }
        entry.builtin = false;
        let mut entries = self.entries.clone();
        entries.push(entry);
        Ok(Catalog { entries })
    }

    pub fn get(&self, key: &str) -> Option<&RightEntry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn entries(&self) -> &[RightEntry] {
        &self.entries
    }

    pub fn custom_entries(&self) -> impl Iterator<Item = &RightEntry> {
        self.entries.iter().filter(|e| !e.builtin)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rebuilds a catalog from serialized entries, checking that builtin
    /// entries are exactly the engine's builtin set.
    pub fn from_entries(entries: Vec<RightEntry>) -> Result<Catalog, CatalogError> {
        let builtin = builtin_catalog();
        for entry in entries.iter().filter(|e| e.builtin) {
            match builtin.iter().find(|b| b.key == entry.key) {
                Some(b) if b == entry => {}
                _ => return Err(CatalogError::BuiltinModified(entry.key.clone())),
            }
        }
        Catalog::with_custom(entries.iter().filter(|e| !e.builtin))
    }
}

macro_rules! builtin {
    ($key:expr, $title:expr, $description:expr) => {
        RightEntry {
            key: $key.to_string(),
            title: $title.to_string(),
            description: $description.to_string(),
            context_notes: None,
            builtin: true,
        }
    };
    ($key:expr, $title:expr, $description:expr, $notes:expr) => {
        RightEntry {
            context_notes: Some($notes.to_string()),
            ..builtin!($key, $title, $description)
        }
    };
}

pub const BUILTIN_KEYS: [&str; 9] = [
    "human-dignity",
    "non-discrimination",
    "personal-identity",
    "personal-integrity",
    "self-determination",
    "freedom-expression-thought",
    "assembly-association",
    "confidentiality-communications",
    "privacy-data-protection",
];

/// The nine builtin rights, in a fixed order.
pub fn builtin_catalog() -> Vec<RightEntry> {
    vec![
        builtin!(
            "human-dignity",
            "Respect for human dignity",
            "The inherent worth of every person as a foundation for all other rights; data uses must not treat people as mere objects of processing.",
            "Relevant to intrusive monitoring, exposure of vulnerable persons and processing that humiliates or degrades."
        ),
        builtin!(
            "non-discrimination",
            "Freedom from discrimination",
            "Protection against unequal treatment on protected grounds, including bias introduced by profiling and automated decision-making.",
            "Relevant to automated profiling, behavioural advertising and law-enforcement uses of data-intensive systems."
        ),
        builtin!(
            "personal-identity",
            "Physical, psychological, and social identity",
            "Control over the information that identifies a person and over how that person is represented in the social community."
        ),
        builtin!(
            "personal-integrity",
            "Physical, psychological and moral integrity and the intimate sphere",
            "Freedom from interference with body and mind, including respect for the intimate sphere of the individual.",
            "Relevant to invasive collection such as implanted devices and biometric processing."
        ),
        builtin!(
            "self-determination",
            "Self-determination and personal autonomy",
            "The ability to take decisions freely and have them respected, to develop one's personality and relationships, and to control one's own information."
        ),
        builtin!(
            "freedom-expression-thought",
            "Freedom of expression and freedom of thought, conscience and religion",
            "The freedom to hold opinions and beliefs and to impart and receive information and ideas without interference."
        ),
        builtin!(
            "assembly-association",
            "Freedom of assembly and association",
            "The freedom to gather and to form or join groups without being deterred by identification or monitoring of participants."
        ),
        builtin!(
            "confidentiality-communications",
            "The right to the confidentiality of communications",
            "Secrecy of correspondence and other communications, including protection of traffic data against unjustified monitoring or retention.",
            "Relevant to workplace monitoring of e-mail, telephone and social media, and to retention for security purposes."
        ),
        builtin!(
            "privacy-data-protection",
            "Data protection and the right to privacy",
            "Protection of private life and of personal data throughout collection, storage, sharing and further use."
        ),
    ]
}
