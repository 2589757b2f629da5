//! Production file: `region_id,year,source,oil_boe,gas_value,gas_unit`.
//!
//! `source` is one of `liquids`, `gas`, `gas_monthly`. Gas may be given in
//! `boe` or in raw `scf`; scf converts at this boundary with the configured
//! factor, so everything downstream sees boe.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_f64, read_table};
use crate::error::Result;
use crate::region::{RegionId, RegionRegistry};
use crate::units::convert_gas_volume;

const REQUIRED: &[&str] = &[
    "region_id",
    "year",
    "source",
    "oil_boe",
    "gas_value",
    "gas_unit",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProductionSource {
    LiquidsDb,
    GasDb,
    GasMonthlyDb,
}

impl ProductionSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProductionSource::LiquidsDb => "liquids",
            ProductionSource::GasDb => "gas",
            ProductionSource::GasMonthlyDb => "gas_monthly",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "liquids" => Some(ProductionSource::LiquidsDb),
            "gas" => Some(ProductionSource::GasDb),
            "gas_monthly" => Some(ProductionSource::GasMonthlyDb),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductionRow {
    pub region: RegionId,
    pub year: u16,
    pub source: ProductionSource,
    pub oil_boe: f64,
    /// Always boe; scf inputs are converted during parsing.
    pub gas_boe: f64,
}

/// All production rows, keyed by (region, year, source).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductionDataset {
    rows: BTreeMap<(RegionId, u16, ProductionSource), ProductionRow>,
}

impl ProductionDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &ProductionRow> {
        self.rows.values()
    }

    fn get(
        &self,
        region: &RegionId,
        year: u16,
        source: ProductionSource,
    ) -> Option<&ProductionRow> {
        self.rows.get(&(region.clone(), year, source))
    }

    pub fn liquids(&self, region: &RegionId, year: u16) -> Option<f64> {
        self.get(region, year, ProductionSource::LiquidsDb)
            .map(|r| r.oil_boe)
    }

    pub fn annual_gas(&self, region: &RegionId, year: u16) -> Option<f64> {
        self.get(region, year, ProductionSource::GasDb)
            .map(|r| r.gas_boe)
    }

    pub fn monthly_gas(&self, region: &RegionId, year: u16) -> Option<f64> {
        self.get(region, year, ProductionSource::GasMonthlyDb)
            .map(|r| r.gas_boe)
    }

    /// Annual gas history up to and including `up_to`, year ascending.
    pub fn gas_history(&self, region: &RegionId, up_to: u16) -> Vec<(u16, f64)> {
        self.rows
            .values()
            .filter(|r| {
                r.source == ProductionSource::GasDb && r.region == *region && r.year <= up_to
            })
            .map(|r| (r.year, r.gas_boe))
            .collect()
    }

    /// True when the region has any gas-side data at all.
    pub fn has_gas_data(&self, region: &RegionId) -> bool {
        self.rows.values().any(|r| {
            r.region == *region
                && matches!(
                    r.source,
                    ProductionSource::GasDb | ProductionSource::GasMonthlyDb
                )
        })
    }

    pub fn insert_row(&mut self, row: ProductionRow) -> bool {
        let key = (row.region.clone(), row.year, row.source);
        if self.rows.contains_key(&key) {
            return false;
        }
        self.rows.insert(key, row);
        true
    }

    /// Canonical serialization under the ingestion schema (gas always boe).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("region_id,year,source,oil_boe,gas_value,gas_unit\n");
        for row in self.rows.values() {
            writeln!(
                out,
                "{},{},{},{},{},boe",
                row.region,
                row.year,
                row.source.as_str(),
                fmt_f64(row.oil_boe),
                fmt_f64(row.gas_boe),
            )
            .unwrap();
        }
        out
    }
}

pub fn parse_production(
    path: &Path,
    registry: &RegionRegistry,
    gas_boe_factor_scf: f64,
) -> Result<ProductionDataset> {
    let mut dataset = ProductionDataset::default();
    read_table(path, REQUIRED, &[], |row| {
        let region = RegionId::new(row.non_empty("region_id")?);
        if !registry.contains(&region) {
            return Err(row.error(format!("unknown region '{region}'")));
        }
        let year = row.year("year")?;
        let source_token = row.non_empty("source")?;
        let source = ProductionSource::parse(source_token)
            .ok_or_else(|| row.error(format!("unknown production source '{source_token}'")))?;
        let oil_boe = row.f64_non_negative("oil_boe")?;
        let gas_value = row.f64_non_negative("gas_value")?;
        let gas_boe = match row.non_empty("gas_unit")? {
            "boe" => gas_value,
            "scf" => convert_gas_volume(gas_value, gas_boe_factor_scf)
                .map_err(|e| row.error(e.to_string()))?,
            other => return Err(row.error(format!("unknown gas unit '{other}'"))),
        };
        let inserted = dataset.insert_row(ProductionRow {
            region: region.clone(),
            year,
            source,
            oil_boe,
            gas_boe,
        });
        if !inserted {
            return Err(row.error(format!(
                "duplicate key ({region}, {year}, {})",
                source.as_str()
            )));
        }
        Ok(())
    })?;
    Ok(dataset)
}
