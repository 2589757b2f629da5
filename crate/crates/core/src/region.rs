//! Regions and the registry they live in.
//!
//! A country or basin is the finest spatial unit carried by any dataset;
//! aggregation groups are pooled multi-country units used by company
//! profiles. Regions are opaque keys, no geometry.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Opaque region key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(String);

impl RegionId {
    pub fn new(id: impl Into<String>) -> Self {
        RegionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RegionId {
    fn from(s: &str) -> Self {
        RegionId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Country,
    Basin,
    AggregationGroup,
}

impl RegionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionKind::Country => "country",
            RegionKind::Basin => "basin",
            RegionKind::AggregationGroup => "aggregation_group",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "country" => Some(RegionKind::Country),
            "basin" => Some(RegionKind::Basin),
            "aggregation_group" => Some(RegionKind::AggregationGroup),
            _ => None,
        }
    }
}

/// A registered region. Basins carry their parent country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    pub kind: RegionKind,
    pub parent: Option<RegionId>,
    pub display_name: String,
}

/// Id-unique region registry, built once at ingestion and read-only after.
#[derive(Debug, Clone, Default)]
pub struct RegionRegistry {
    regions: BTreeMap<RegionId, Region>,
}

/// Structural violations found while assembling a registry.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("duplicate region id {0}")]
    DuplicateId(RegionId),
    #[error("basin {basin} references unknown parent {parent}")]
    UnknownParent { basin: RegionId, parent: RegionId },
    #[error("basin {basin} parent {parent} is not a country")]
    ParentNotCountry { basin: RegionId, parent: RegionId },
    #[error("basin {0} has no parent country")]
    BasinWithoutParent(RegionId),
    #[error("{kind} region {id} must not have a parent")]
    UnexpectedParent { kind: &'static str, id: RegionId },
}

impl RegionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert one region, checking id uniqueness and parent shape.
    /// Parent existence is deferred to [`RegionRegistry::validate`] so files
    /// may list basins before their countries.
    pub fn insert(&mut self, region: Region) -> Result<(), RegistryError> {
        match region.kind {
            RegionKind::Basin => {
                if region.parent.is_none() {
                    return Err(RegistryError::BasinWithoutParent(region.id));
                }
            }
            RegionKind::Country | RegionKind::AggregationGroup => {
                if region.parent.is_some() {
                    return Err(RegistryError::UnexpectedParent {
                        kind: region.kind.as_str(),
                        id: region.id,
                    });
                }
            }
        }
        if self.regions.contains_key(&region.id) {
            return Err(RegistryError::DuplicateId(region.id));
        }
        self.regions.insert(region.id.clone(), region);
        Ok(())
    }

    /// Check cross-region invariants: every basin parent exists and is a country.
    pub fn validate(&self) -> Result<(), RegistryError> {
        for region in self.regions.values() {
            if region.kind == RegionKind::Basin {
                let parent = region.parent.as_ref().expect("checked at insert");
                match self.regions.get(parent) {
                    None => {
                        return Err(RegistryError::UnknownParent {
                            basin: region.id.clone(),
                            parent: parent.clone(),
                        })
                    }
                    Some(p) if p.kind != RegionKind::Country => {
                        return Err(RegistryError::ParentNotCountry {
                            basin: region.id.clone(),
                            parent: parent.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &RegionId) -> Option<&Region> {
        self.regions.get(id)
    }

    pub fn contains(&self, id: &RegionId) -> bool {
        self.regions.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// All regions in id order.
    pub fn iter(&self) -> impl Iterator<Item = &Region> {
        self.regions.values()
    }

    /// Basins of a country, in id order.
    pub fn basins_of(&self, country: &RegionId) -> Vec<&Region> {
        self.regions
            .values()
            .filter(|r| r.kind == RegionKind::Basin && r.parent.as_ref() == Some(country))
            .collect()
    }
}
