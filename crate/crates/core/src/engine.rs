//! Regional intensity table and company models.
//!
//! Every covered region gets one intensity: its fused emissions divided by
//! its total production. A partially measured country inherits the
//! production-weighted mean of its basin intensities for the rest of its
//! production, overriding a country-level estimate. Company emissions are
//! regional intensity times allocated production, accumulated in
//! lexicographic key order so results are bit-identical across runs and
//! thread counts.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::DomainError;
use crate::fusion::{self, FusedEmissions, FusionProvenance};
use crate::ingest::{CompanyCategory, CompanyProfile};
use crate::region::{RegionId, RegionKind, RegionRegistry};
use crate::scope::SourceScope;
use crate::units::{intensity, MethaneIntensity, MethaneMass, ProductionVolume};

/// One row of the regional intensity table.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionalIntensity {
    pub intensity: MethaneIntensity,
    pub emissions: MethaneMass,
    pub production: ProductionVolume,
    pub provenance: FusionProvenance,
    pub scope: SourceScope,
}

/// Audit record for a country whose intensity came from its basins.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualNote {
    pub country: RegionId,
    pub basins: Vec<RegionId>,
    /// Estimate that was set aside in favour of the basin-weighted value.
    pub overridden_estimate: Option<MethaneMass>,
}

#[derive(Debug, Clone, Default)]
pub struct RegionalIntensityTable {
    entries: BTreeMap<RegionId, RegionalIntensity>,
    uncovered: BTreeSet<RegionId>,
    residual_notes: Vec<ResidualNote>,
}

impl RegionalIntensityTable {
    pub fn get(&self, region: &RegionId) -> Option<&RegionalIntensity> {
        self.entries.get(region)
    }

    pub fn contains(&self, region: &RegionId) -> bool {
        self.entries.contains_key(region)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&RegionId, &RegionalIntensity)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Regions of the registry (countries and basins) without an entry.
    pub fn uncovered(&self) -> impl Iterator<Item = &RegionId> {
        self.uncovered.iter()
    }

    pub fn residual_notes(&self) -> &[ResidualNote] {
        &self.residual_notes
    }

    /// Total production over covered country-level regions plus uncovered
    /// regions; used for coverage shares. Basin production is already part
    /// of its country's, so only countries count.
    pub fn country_production_total(&self, registry: &RegionRegistry) -> f64 {
        registry
            .iter()
            .filter(|r| r.kind == RegionKind::Country)
            .filter_map(|r| self.entries.get(&r.id))
            .map(|e| e.production.total())
            .sum()
    }
}

/// Build the per-region intensity table for one target year.
pub fn build_intensity_table(
    registry: &RegionRegistry,
    fused: &BTreeMap<RegionId, FusedEmissions>,
    production: &BTreeMap<RegionId, ProductionVolume>,
) -> Result<RegionalIntensityTable, DomainError> {
    let mut table = RegionalIntensityTable::default();

    // Direct entries first: any region with a fused emissions value.
    for (region, fused_value) in fused {
        let volume = production
            .get(region)
            .copied()
            .unwrap_or(ProductionVolume::ZERO);
        let regional = intensity(fused_value.methane, volume, region.as_str())?;
        table.entries.insert(
            region.clone(),
            RegionalIntensity {
                intensity: regional,
                emissions: fused_value.methane,
                production: volume,
                provenance: fused_value.provenance,
                scope: fused_value.chosen,
            },
        );
    }

    // Countries with covered basins: the basin-weighted mean stands in for
    // the whole country unless the country itself is measured.
    for country in registry.iter().filter(|r| r.kind == RegionKind::Country) {
        let keep_own = matches!(
            table.entries.get(&country.id),
            Some(e) if e.provenance == FusionProvenance::MeasurementDirect
        );
        if keep_own {
            continue;
        }
        let basins: Vec<RegionId> = registry
            .basins_of(&country.id)
            .iter()
            .filter(|b| table.entries.contains_key(&b.id))
            .map(|b| b.id.clone())
            .collect();
        if basins.is_empty() {
            continue;
        }
        let pairs: Vec<(MethaneIntensity, ProductionVolume)> = basins
            .iter()
            .map(|b| {
                let e = &table.entries[b];
                (e.intensity, e.production)
            })
            .collect();
        let residual = fusion::rest_of_country_intensity(&country.id, &pairs)?;
        let scope = fusion::combine_scopes(
            &basins
                .iter()
                .map(|b| table.entries[b].scope)
                .collect::<Vec<_>>(),
        );

        let volume = production
            .get(&country.id)
            .copied()
            .unwrap_or(ProductionVolume::ZERO);
        if volume.total() <= 0.0 {
            // Nothing to apply the residual intensity to; the country stays
            // uncovered.
            continue;
        }
        let overridden_estimate = table.entries.get(&country.id).map(|e| e.emissions);
        table.entries.insert(
            country.id.clone(),
            RegionalIntensity {
                intensity: residual,
                emissions: residual.emissions_for(volume),
                production: volume,
                provenance: FusionProvenance::BasinWeightedResidual,
                scope,
            },
        );
        table.residual_notes.push(ResidualNote {
            country: country.id.clone(),
            basins,
            overridden_estimate,
        });
    }

    table.uncovered = registry
        .iter()
        .filter(|r| r.kind != RegionKind::AggregationGroup)
        .filter(|r| !table.entries.contains_key(&r.id))
        .map(|r| r.id.clone())
        .collect();

    Ok(table)
}

/// Pooled intensity of an aggregation: total member emissions over total
/// member production, members missing from the table treated as uncovered.
pub fn aggregation_intensity(
    group_id: &str,
    members: &[RegionId],
    table: &RegionalIntensityTable,
) -> Result<MethaneIntensity, DomainError> {
    let mut sorted: Vec<&RegionId> = members.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut total_emissions = 0.0;
    let mut total_production = 0.0;
    for member in sorted {
        if let Some(entry) = table.get(member) {
            total_emissions += entry.emissions.kilograms();
            total_production += entry.production.total();
        }
    }
    if total_production <= 0.0 {
        return Err(DomainError::UncoveredGroup {
            group: group_id.to_string(),
        });
    }
    MethaneIntensity::new(total_emissions / total_production)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContributionKind {
    Allocation,
    Aggregation,
}

impl ContributionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContributionKind::Allocation => "allocation",
            ContributionKind::Aggregation => "aggregation",
        }
    }
}

/// One line of a company's per-region breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionContribution {
    pub key: String,
    pub kind: ContributionKind,
    pub allocated: ProductionVolume,
    pub covered: bool,
    pub intensity: Option<MethaneIntensity>,
    pub emissions: MethaneMass,
    pub provenance: Option<FusionProvenance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanyModelResult {
    pub company: String,
    pub category: CompanyCategory,
    pub total_emissions: MethaneMass,
    pub covered_production: ProductionVolume,
    pub uncovered_production: ProductionVolume,
    pub model_intensity: MethaneIntensity,
    pub contributions: Vec<RegionContribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Emissions for the production in covered regions only.
    CoveredOnly,
    /// Model intensity applied to covered plus uncovered production.
    FullProduction,
}

/// Emissions projection for a modelled company.
pub fn total_emissions_projection(
    result: &CompanyModelResult,
    mode: ProjectionMode,
) -> MethaneMass {
    match mode {
        ProjectionMode::CoveredOnly => result.total_emissions,
        ProjectionMode::FullProduction => result
            .model_intensity
            .emissions_for(result.covered_production + result.uncovered_production),
    }
}

// Per-key accumulation state before intensities are applied.
struct PendingContribution {
    kind: ContributionKind,
    volumes: Vec<ProductionVolume>,
    members: Vec<RegionId>,
}

/// Model one company against the regional intensity table.
///
/// Contributions are grouped by region (or group) key, each key's volumes
/// summed in ascending value order, and keys processed lexicographically:
/// permuting or splitting the allocation list cannot change any output bit.
pub fn model_company(
    profile: &CompanyProfile,
    table: &RegionalIntensityTable,
) -> Result<CompanyModelResult, DomainError> {
    let mut pending: BTreeMap<(String, ContributionKind), PendingContribution> = BTreeMap::new();

    for allocation in &profile.allocations {
        let key = (
            allocation.region.as_str().to_string(),
            ContributionKind::Allocation,
        );
        pending
            .entry(key)
            .or_insert_with(|| PendingContribution {
                kind: ContributionKind::Allocation,
                volumes: Vec::new(),
                members: Vec::new(),
            })
            .volumes
            .push(allocation.production);
    }
    for group in &profile.aggregation_groups {
        let key = (group.group_id.clone(), ContributionKind::Aggregation);
        let entry = pending.entry(key).or_insert_with(|| PendingContribution {
            kind: ContributionKind::Aggregation,
            volumes: Vec::new(),
            members: group.members.clone(),
        });
        entry.volumes.push(group.production);
    }

    let mut contributions = Vec::with_capacity(pending.len());
    let mut total_emissions = MethaneMass::ZERO;
    let mut covered = ProductionVolume::ZERO;
    let mut uncovered = ProductionVolume::ZERO;

    for ((key, _), mut item) in pending {
        // Ascending component order makes the per-key sum independent of
        // input order.
        item.volumes.sort_by(|a, b| {
            (a.oil_boe(), a.gas_boe())
                .partial_cmp(&(b.oil_boe(), b.gas_boe()))
                .expect("volumes are finite")
        });
        let allocated = item
            .volumes
            .iter()
            .fold(ProductionVolume::ZERO, |acc, v| acc + *v);

        let (covered_here, regional, provenance) = match item.kind {
            ContributionKind::Allocation => {
                let region = RegionId::new(key.clone());
                match table.get(&region) {
                    Some(entry) => (true, Some(entry.intensity), Some(entry.provenance)),
                    None => (false, None, None),
                }
            }
            ContributionKind::Aggregation => {
                match aggregation_intensity(&key, &item.members, table) {
                    Ok(pooled) => (true, Some(pooled), None),
                    // A group whose members are all uncovered degrades to
                    // uncovered production, like a bare uncovered country.
                    Err(DomainError::UncoveredGroup { .. }) => (false, None, None),
                    Err(other) => return Err(other),
                }
            }
        };

        let emissions = match (covered_here, regional) {
            (true, Some(i)) => i.emissions_for(allocated),
            _ => MethaneMass::ZERO,
        };
        if covered_here {
            covered = covered + allocated;
            total_emissions = total_emissions + emissions;
        } else {
            uncovered = uncovered + allocated;
        }
        contributions.push(RegionContribution {
            key,
            kind: item.kind,
            allocated,
            covered: covered_here,
            intensity: regional,
            emissions,
            provenance,
        });
    }

    if covered.total() <= 0.0 {
        return Err(DomainError::NoCoverage {
            company: profile.name.clone(),
        });
    }
    let model_intensity = intensity(total_emissions, covered, &profile.name)?;

    Ok(CompanyModelResult {
        company: profile.name.clone(),
        category: profile.category,
        total_emissions,
        covered_production: covered,
        uncovered_production: uncovered,
        model_intensity,
        contributions,
    })
}
