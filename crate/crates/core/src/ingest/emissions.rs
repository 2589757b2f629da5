//! Emissions file:
//! `region_id,year,methane_value,methane_unit,source_class[,includes_super_emitters,uncertainty_rel]`.
//!
//! `methane_unit` is `kg`, `kt` or `mt`; masses are canonicalized to kg here.
//! At most one measurement row and one estimate row may exist per
//! region-year.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_f64, read_table};
use crate::error::Result;
use crate::region::{RegionId, RegionRegistry};
use crate::scope::{SourceClass, SourceScope};
use crate::units::MethaneMass;

const REQUIRED: &[&str] = &[
    "region_id",
    "year",
    "methane_value",
    "methane_unit",
    "source_class",
];
const OPTIONAL: &[&str] = &["includes_super_emitters", "uncertainty_rel"];

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionRow {
    pub region: RegionId,
    pub year: u16,
    pub methane: MethaneMass,
    pub scope: SourceScope,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmissionDataset {
    rows: BTreeMap<(RegionId, u16, SourceClass), EmissionRow>,
}

impl EmissionDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &EmissionRow> {
        self.rows.values()
    }

    pub fn record(&self, region: &RegionId, year: u16, class: SourceClass) -> Option<&EmissionRow> {
        self.rows.get(&(region.clone(), year, class))
    }

    /// Regions that carry any emission record for `year`, in id order.
    pub fn regions_with_data(&self, year: u16) -> BTreeSet<RegionId> {
        self.rows
            .values()
            .filter(|r| r.year == year)
            .map(|r| r.region.clone())
            .collect()
    }

    pub fn insert_row(&mut self, row: EmissionRow) -> bool {
        let key = (row.region.clone(), row.year, row.scope.source_class);
        if self.rows.contains_key(&key) {
            return false;
        }
        self.rows.insert(key, row);
        true
    }

    /// Canonical serialization under the ingestion schema (mass in kg).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "region_id,year,methane_value,methane_unit,source_class,includes_super_emitters,uncertainty_rel\n",
        );
        for row in self.rows.values() {
            writeln!(
                out,
                "{},{},{},kg,{},{},{}",
                row.region,
                row.year,
                fmt_f64(row.methane.kilograms()),
                row.scope.source_class.as_str(),
                row.scope.includes_super_emitters,
                row.scope.uncertainty_rel.map(fmt_f64).unwrap_or_default(),
            )
            .unwrap();
        }
        out
    }
}

pub fn parse_emissions(path: &Path, registry: &RegionRegistry) -> Result<EmissionDataset> {
    let mut dataset = EmissionDataset::default();
    read_table(path, REQUIRED, OPTIONAL, |row| {
        let region = RegionId::new(row.non_empty("region_id")?);
        if !registry.contains(&region) {
            return Err(row.error(format!("unknown region '{region}'")));
        }
        let year = row.year("year")?;
        let value = row.f64_non_negative("methane_value")?;
        let unit = row.non_empty("methane_unit")?.to_lowercase();
        let methane = match unit.as_str() {
            "kg" => MethaneMass::from_kilograms(value),
            "kt" => MethaneMass::from_kilotons(value),
            "mt" => MethaneMass::from_megatons(value),
            other => return Err(row.error(format!("unknown methane unit '{other}'"))),
        }
        .map_err(|e| row.error(e.to_string()))?;

        let class_token = row.non_empty("source_class")?;
        let class = SourceClass::parse(class_token)
            .ok_or_else(|| row.error(format!("unknown source class '{class_token}'")))?;
        let mut scope = SourceScope::new(class);
        if let Some(includes) = row.optional_bool("includes_super_emitters")? {
            scope = scope.with_super_emitters(includes);
        }
        if let Some(uncertainty) = row.optional_f64("uncertainty_rel")? {
            if !(0.0..=1.0).contains(&uncertainty) {
                return Err(row.error(format!(
                    "uncertainty_rel must be within [0, 1], got {uncertainty}"
                )));
            }
            scope = scope.with_uncertainty(uncertainty);
        }

        let inserted = dataset.insert_row(EmissionRow {
            region: region.clone(),
            year,
            methane,
            scope,
        });
        if !inserted {
            return Err(row.error(format!(
                "duplicate key ({region}, {year}, {})",
                class.as_str()
            )));
        }
        Ok(())
    })?;
    Ok(dataset)
}
