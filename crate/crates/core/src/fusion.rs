//! Best-available-data fusion of emission records.
//!
//! A measurement beats an estimate for the same region-year, always. Where
//! only basins of a country are measured, the country's remaining production
//! is assigned the basin intensities' production-weighted mean.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::ingest::EmissionDataset;
use crate::region::RegionId;
use crate::scope::{SourceClass, SourceScope};
use crate::units::{MethaneIntensity, MethaneMass, ProductionVolume};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionProvenance {
    MeasurementDirect,
    EstimateDirect,
    BasinWeightedResidual,
}

impl FusionProvenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            FusionProvenance::MeasurementDirect => "measurement_direct",
            FusionProvenance::EstimateDirect => "estimate_direct",
            FusionProvenance::BasinWeightedResidual => "basin_weighted_residual",
        }
    }
}

/// The emissions value chosen for one region-year.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedEmissions {
    pub region: RegionId,
    pub year: u16,
    pub methane: MethaneMass,
    pub chosen: SourceScope,
    pub provenance: FusionProvenance,
}

/// Pick the best available record for a region-year.
pub fn fuse(
    region: &RegionId,
    year: u16,
    emissions: &EmissionDataset,
) -> Result<FusedEmissions, DomainError> {
    let measurement = emissions.record(region, year, SourceClass::Measurement);
    let estimate = emissions.record(region, year, SourceClass::Estimate);
    let (row, provenance) = match (measurement, estimate) {
        (Some(m), _) => (m, FusionProvenance::MeasurementDirect),
        (None, Some(e)) => (e, FusionProvenance::EstimateDirect),
        (None, None) => {
            return Err(DomainError::NoEmissionData {
                region: region.to_string(),
                year,
            })
        }
    };
    Ok(FusedEmissions {
        region: region.clone(),
        year,
        methane: row.methane,
        chosen: row.scope,
        provenance,
    })
}

/// Production-weighted mean of basin intensities: the intensity assigned to
/// the rest of a partially measured country.
pub fn rest_of_country_intensity(
    country: &RegionId,
    basins: &[(MethaneIntensity, ProductionVolume)],
) -> Result<MethaneIntensity, DomainError> {
    if basins.is_empty() {
        return Err(DomainError::EmptyBasinList {
            country: country.to_string(),
        });
    }
    let total: f64 = basins.iter().map(|(_, p)| p.total()).sum();
    if total <= 0.0 {
        return Err(DomainError::ZeroProduction {
            region: country.to_string(),
        });
    }
    let weighted: f64 = basins.iter().map(|(i, p)| i.value() * p.total()).sum();
    MethaneIntensity::new(weighted / total)
}

/// Residual intensity when some basins may lack production rows: weighted
/// where every weight is known and positive in total, otherwise an equal
/// mean with the degradation flagged for the audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualIntensity {
    pub intensity: MethaneIntensity,
    pub equal_weights_fallback: bool,
}

pub fn residual_intensity(
    country: &RegionId,
    basins: &[(MethaneIntensity, Option<ProductionVolume>)],
) -> Result<ResidualIntensity, DomainError> {
    if basins.is_empty() {
        return Err(DomainError::EmptyBasinList {
            country: country.to_string(),
        });
    }
    let weights: Option<Vec<f64>> = basins.iter().map(|(_, p)| p.map(|p| p.total())).collect();
    if let Some(weights) = weights {
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            let weighted: f64 = basins
                .iter()
                .zip(&weights)
                .map(|((i, _), w)| i.value() * w)
                .sum();
            return Ok(ResidualIntensity {
                intensity: MethaneIntensity::new(weighted / total)?,
                equal_weights_fallback: false,
            });
        }
    }
    let mean = basins.iter().map(|(i, _)| i.value()).sum::<f64>() / basins.len() as f64;
    Ok(ResidualIntensity {
        intensity: MethaneIntensity::new(mean)?,
        equal_weights_fallback: true,
    })
}

/// Scope metadata for a basin-weighted residual value. The label stays
/// measurement-class only when every contributing basin is measured, and
/// super-emitter coverage only when every basin includes it.
pub fn combine_scopes(scopes: &[SourceScope]) -> SourceScope {
    let all_measured = scopes
        .iter()
        .all(|s| s.source_class == SourceClass::Measurement);
    let class = if all_measured {
        SourceClass::Measurement
    } else {
        SourceClass::Estimate
    };
    SourceScope {
        source_class: class,
        includes_super_emitters: scopes.iter().all(|s| s.includes_super_emitters),
        uncertainty_rel: None,
    }
}
