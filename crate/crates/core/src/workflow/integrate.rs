//! Integrated assessment across the components of a multi-factor system.
//!
//! Each component contributes, per right, the highest current level among its
//! scored risks on that right. When at least `threshold` components reach
//! Medium or above on the same right, the integrated level is raised one step
//! above the maximum to reflect the cumulative effect. The rule is reported
//! explicitly so assessors can override it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assessment::Assessment;
use crate::catalog::Catalog;
use crate::scoring::Level;

pub const DEFAULT_ESCALATION_THRESHOLD: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrationError {
    #[error("no component assessments given")]
    EmptyInput,
    #[error("component {component:?}: {message}")]
    CatalogMismatch { component: String, message: String },
    #[error("component {0:?} listed more than once")]
    DuplicateComponent(String),
    #[error("escalation threshold must be a positive integer")]
    InvalidThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLevel {
    pub component: String,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratedRight {
    pub max_level: Level,
    /// Components at Medium or above on this right.
    pub contributing: u32,
    pub escalated: bool,
    pub integrated_level: Level,
    pub components: Vec<ComponentLevel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratedAssessment {
    pub component_refs: Vec<String>,
    /// `None` disables escalation (plain per-right maximum).
    pub escalation_threshold: Option<u32>,
    pub per_right: BTreeMap<String, IntegratedRight>,
    /// `component/risk` references of precautionary risks, which carry no level.
    #[serde(default)]
    pub precautionary: Vec<String>,
}

impl IntegratedAssessment {
    pub fn escalated_rights(&self) -> impl Iterator<Item = &str> {
        self.per_right
            .iter()
            .filter(|(_, r)| r.escalated)
            .map(|(k, _)| k.as_str())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.component_refs.is_empty() {
            return Err("component_refs must not be empty".into());
        }
        if self.escalation_threshold == Some(0) {
            return Err("escalation_threshold must be positive".into());
        }
        for (key, right) in &self.per_right {
            let recomputed = integrate_levels(
                &right.components.iter().map(|c| c.level).collect::<Vec<_>>(),
                self.escalation_threshold,
            )
            .map(|r| IntegratedRight {
                components: right.components.clone(),
                ..r
            });
            if recomputed.as_ref() != Some(right) {
                return Err(format!("per_right.{key} does not match its component levels"));
            }
        }
        Ok(())
    }
}

/// Applies the escalation rule to the per-component levels of one right.
/// Returns `None` for an empty slice.
pub fn integrate_levels(levels: &[Level], threshold: Option<u32>) -> Option<IntegratedRight> {
    let max_level = levels.iter().copied().max()?;
    let contributing = levels.iter().filter(|l| **l >= Level::Medium).count() as u32;
    let escalated = threshold.is_some_and(|t| contributing >= t) && max_level < Level::VeryHigh;
    let integrated_level = if threshold.is_some_and(|t| contributing >= t) {
        max_level.step_up()
    } else {
        max_level
    };
    Some(IntegratedRight {
        max_level,
        contributing,
        escalated,
        integrated_level,
        components: Vec::new(),
    })
}

pub fn integrate(
    components: &[&Assessment],
    catalog: &Catalog,
    threshold: Option<u32>,
) -> Result<IntegratedAssessment, IntegrationError> {
    if components.is_empty() {
        return Err(IntegrationError::EmptyInput);
    }
    if threshold == Some(0) {
        return Err(IntegrationError::InvalidThreshold);
    }
    let mut ids = BTreeSet::new();
    for c in components {
        if !ids.insert(c.id()) {
            return Err(IntegrationError::DuplicateComponent(c.id().to_string()));
        }
        check_catalog(c, catalog)?;
    }

    let mut per_right: BTreeMap<String, Vec<ComponentLevel>> = BTreeMap::new();
    let mut precautionary = Vec::new();
    for c in components {
        let mut levels: BTreeMap<&str, Level> = BTreeMap::new();
        for risk in c.risks() {
            if risk.is_precautionary() {
                precautionary.push(format!("{}/{}", c.id(), risk.id()));
            }
            if let Some(level) = risk.current_level() {
                let slot = levels.entry(risk.right_key()).or_insert(level);
                *slot = (*slot).max(level);
            }
        }
        for (right, level) in levels {
            per_right.entry(right.to_string()).or_default().push(ComponentLevel {
                component: c.id().to_string(),
                level,
            });
        }
    }

    let per_right = per_right
        .into_iter()
        .map(|(key, components)| {
            let levels: Vec<Level> = components.iter().map(|c| c.level).collect();
            let mut right = integrate_levels(&levels, threshold).expect("at least one component per right");
            right.components = components;
            (key, right)
        })
        .collect();

    Ok(IntegratedAssessment {
        component_refs: components.iter().map(|c| c.id().to_string()).collect(),
        escalation_threshold: threshold,
        per_right,
        precautionary,
    })
}

/// Extends `base` with every component's custom rights. A key defined
/// differently by two sources is a mismatch.
pub fn shared_catalog(base: &Catalog, components: &[&Assessment]) -> Result<Catalog, IntegrationError> {
    let mut catalog = base.clone();
    for c in components {
        for entry in c.custom_rights() {
            match catalog.get(&entry.key) {
                Some(known) if known.title == entry.title && known.description == entry.description => {}
                Some(_) => {
                    return Err(IntegrationError::CatalogMismatch {
                        component: c.id().to_string(),
                        message: format!("right {:?} is defined differently elsewhere", entry.key),
                    })
                }
                None => {
                    catalog = catalog.register(entry.clone()).map_err(|e| IntegrationError::CatalogMismatch {
                        component: c.id().to_string(),
                        message: e.to_string(),
                    })?
                }
            }
        }
    }
    Ok(catalog)
}

fn check_catalog(component: &Assessment, catalog: &Catalog) -> Result<(), IntegrationError> {
    let mismatch = |message: String| IntegrationError::CatalogMismatch {
        component: component.id().to_string(),
        message,
    };
    for entry in component.custom_rights() {
        match catalog.get(&entry.key) {
            Some(shared) if shared.title == entry.title && shared.description == entry.description => {}
            Some(_) => return Err(mismatch(format!("right {:?} differs from the shared catalog", entry.key))),
            None => return Err(mismatch(format!("right {:?} is missing from the shared catalog", entry.key))),
        }
    }
    for risk in component.risks() {
        if !catalog.contains(risk.right_key()) {
            return Err(mismatch(format!(
                "risk {:?} references right {:?} not in the shared catalog",
                risk.id(),
                risk.right_key()
            )));
        }
    }
    Ok(())
}
