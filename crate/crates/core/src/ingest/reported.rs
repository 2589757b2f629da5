//! Company-reported metrics file:
//! `company,reported_methane_kg,reported_oil_boe,reported_gas_boe,reported_intensity`.
//!
//! Companies absent from this file are non-reporting. A present row must
//! carry an intensity, or a methane mass together with a production volume.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_f64, read_table};
use crate::error::Result;
use crate::units::{MethaneIntensity, MethaneMass, ProductionVolume};

const REQUIRED: &[&str] = &[
    "company",
    "reported_methane_kg",
    "reported_oil_boe",
    "reported_gas_boe",
    "reported_intensity",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportedMetrics {
    pub company: String,
    pub methane: Option<MethaneMass>,
    pub production: Option<ProductionVolume>,
    pub intensity: Option<MethaneIntensity>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportedMetricsFile {
    entries: BTreeMap<String, ReportedMetrics>,
}

impl ReportedMetricsFile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, company: &str) -> Option<&ReportedMetrics> {
        self.entries.get(company)
    }

    pub fn companies(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &ReportedMetrics> {
        self.entries.values()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "company,reported_methane_kg,reported_oil_boe,reported_gas_boe,reported_intensity\n",
        );
        for e in self.entries.values() {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.company,
                e.methane
                    .map(|m| fmt_f64(m.kilograms()))
                    .unwrap_or_default(),
                e.production
                    .map(|p| fmt_f64(p.oil_boe()))
                    .unwrap_or_default(),
                e.production
                    .map(|p| fmt_f64(p.gas_boe()))
                    .unwrap_or_default(),
                e.intensity.map(|i| fmt_f64(i.value())).unwrap_or_default(),
            )
            .unwrap();
        }
        out
    }
}

pub fn parse_reported(path: &Path) -> Result<ReportedMetricsFile> {
    let mut file = ReportedMetricsFile::default();
    read_table(path, REQUIRED, &[], |row| {
        let company = row.non_empty("company")?.to_string();
        let methane = row
            .optional_f64("reported_methane_kg")?
            .map(MethaneMass::from_kilograms)
            .transpose()
            .map_err(|e| row.error(e.to_string()))?;
        let oil = row.optional_f64("reported_oil_boe")?;
        let gas = row.optional_f64("reported_gas_boe")?;
        let production =
            match (oil, gas) {
                (None, None) => None,
                (Some(oil), Some(gas)) => {
                    Some(ProductionVolume::new(oil, gas).map_err(|e| row.error(e.to_string()))?)
                }
                _ => return Err(row.error(
                    "reported_oil_boe and reported_gas_boe must be given together or not at all",
                )),
            };
        let intensity = row
            .optional_f64("reported_intensity")?
            .map(MethaneIntensity::new)
            .transpose()
            .map_err(|e| row.error(e.to_string()))?;

        if intensity.is_none() && !(methane.is_some() && production.is_some()) {
            return Err(row.error(format!(
                "reporting company '{company}' must provide an intensity, or methane mass plus production"
            )));
        }
        if file
            .entries
            .insert(
                company.clone(),
                ReportedMetrics {
                    company: company.clone(),
                    methane,
                    production,
                    intensity,
                },
            )
            .is_some()
        {
            return Err(row.error(format!("duplicate reported row for company '{company}'")));
        }
        Ok(())
    })?;
    Ok(file)
}
