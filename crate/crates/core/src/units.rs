//! Unit-carrying quantity types.
//!
//! Everything downstream of ingestion works in two canonical units:
//! kilograms of CH4 for emissions and barrels of oil equivalent for
//! production. Conversions happen once, at the boundary.

use serde::{Deserialize, Serialize};
use std::ops::Add;

use crate::error::{DomainError, Result};

pub const KG_PER_MEGATON: f64 = 1.0e9;
pub const KG_PER_KILOTON: f64 = 1.0e6;

/// Default gas conversion factor: standard cubic feet per boe.
pub const DEFAULT_GAS_BOE_FACTOR_SCF: f64 = 5800.0;

fn check_non_negative(quantity: &'static str, value: f64) -> Result<f64, DomainError> {
    if !value.is_finite() {
        return Err(DomainError::NonFinite { quantity, value });
    }
    if value < 0.0 {
        return Err(DomainError::Negative { quantity, value });
    }
    Ok(value)
}

/// A methane mass, stored in kilograms of CH4.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethaneMass(f64);

impl MethaneMass {
    pub const ZERO: MethaneMass = MethaneMass(0.0);

    pub fn from_kilograms(kg: f64) -> Result<Self, DomainError> {
        Ok(MethaneMass(check_non_negative("methane mass (kg)", kg)?))
    }

    pub fn from_megatons(mt: f64) -> Result<Self, DomainError> {
        Ok(MethaneMass(
            check_non_negative("methane mass (Mt)", mt)? * KG_PER_MEGATON,
        ))
    }

    pub fn from_kilotons(kt: f64) -> Result<Self, DomainError> {
        Ok(MethaneMass(
            check_non_negative("methane mass (kt)", kt)? * KG_PER_KILOTON,
        ))
    }

    pub fn kilograms(&self) -> f64 {
        self.0
    }

    pub fn megatons(&self) -> f64 {
        self.0 / KG_PER_MEGATON
    }
}

impl Add for MethaneMass {
    type Output = MethaneMass;

    fn add(self, rhs: MethaneMass) -> MethaneMass {
        MethaneMass(self.0 + rhs.0)
    }
}

/// Oil and gas production volumes, both in barrels of oil equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductionVolume {
    oil_boe: f64,
    gas_boe: f64,
}

impl ProductionVolume {
    pub const ZERO: ProductionVolume = ProductionVolume {
        oil_boe: 0.0,
        gas_boe: 0.0,
    };

    pub fn new(oil_boe: f64, gas_boe: f64) -> Result<Self, DomainError> {
        Ok(ProductionVolume {
            oil_boe: check_non_negative("oil production (boe)", oil_boe)?,
            gas_boe: check_non_negative("gas production (boe)", gas_boe)?,
        })
    }

    pub fn oil_boe(&self) -> f64 {
        self.oil_boe
    }

    pub fn gas_boe(&self) -> f64 {
        self.gas_boe
    }

    pub fn total(&self) -> f64 {
        self.oil_boe + self.gas_boe
    }
}

impl Add for ProductionVolume {
    type Output = ProductionVolume;

    fn add(self, rhs: ProductionVolume) -> ProductionVolume {
        ProductionVolume {
            oil_boe: self.oil_boe + rhs.oil_boe,
            gas_boe: self.gas_boe + rhs.gas_boe,
        }
    }
}

/// Methane intensity in kg CH4 per boe.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethaneIntensity(f64);

impl MethaneIntensity {
    pub fn new(kg_per_boe: f64) -> Result<Self, DomainError> {
        Ok(MethaneIntensity(check_non_negative(
            "methane intensity (kg/boe)",
            kg_per_boe,
        )?))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Emissions implied by applying this intensity to a production volume.
    pub fn emissions_for(&self, production: ProductionVolume) -> MethaneMass {
        MethaneMass(self.0 * production.total())
    }

    /// Emissions implied for a bare boe total.
    pub fn emissions_for_boe(&self, boe: f64) -> MethaneMass {
        MethaneMass(self.0 * boe)
    }
}

/// Regional intensity: emissions divided by the region's total production.
///
/// Construction is forbidden when total production is zero; `region` names
/// the offender in the error.
pub fn intensity(
    emissions: MethaneMass,
    production: ProductionVolume,
    region: &str,
) -> Result<MethaneIntensity, DomainError> {
    let total = production.total();
    if total <= 0.0 {
        return Err(DomainError::ZeroProduction {
            region: region.to_string(),
        });
    }
    Ok(MethaneIntensity(emissions.kilograms() / total))
}

/// Convert a raw gas volume in standard cubic feet to boe.
pub fn convert_gas_volume(raw_scf: f64, factor_scf_per_boe: f64) -> Result<f64> {
    if !factor_scf_per_boe.is_finite() || factor_scf_per_boe <= 0.0 {
        return Err(crate::error::Error::Config(format!(
            "gas conversion factor must be positive, got {factor_scf_per_boe}"
        )));
    }
    check_non_negative("raw gas volume (scf)", raw_scf)?;
    Ok(raw_scf / factor_scf_per_boe)
}
