//! Pipeline orchestration: validate -> estimate -> fuse -> model ->
//! benchmark -> report, plus the artifact files each stage writes.
//!
//! A model run is flattened into plain row tables before writing so the
//! benchmark and report stages can rebuild their inputs from disk. All
//! artifact content is assembled in memory first and written in one pass;
//! a failed run leaves no partial output directory behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::engine::{self, ContributionKind, ProjectionMode, RegionalIntensityTable};
use crate::error::{Error, Result};
use crate::estimator;
use crate::fusion::{self, FusedEmissions, FusionProvenance};
use crate::ingest::{
    self, CompanyCategory, CompanyProfile, EmissionDataset, ProductionDataset, ReportedMetricsFile,
};
use crate::region::{RegionId, RegionKind, RegionRegistry};
use crate::scope::SourceClass;
use crate::stats::{self, CategoryStats, ModelledIntensity, OutlierReason};
use crate::units::{MethaneIntensity, ProductionVolume};

/// The four dataset files a model run consumes.
#[derive(Debug, Clone)]
pub struct InputPaths {
    pub regions: PathBuf,
    pub production: PathBuf,
    pub emissions: PathBuf,
    pub profiles: PathBuf,
}

fn fmt(value: f64) -> String {
    format!("{value}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Flattened artifact rows
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IntensityTableRow {
    pub region: String,
    pub kind: String,
    pub intensity: f64,
    pub emissions_kg: f64,
    pub oil_boe: f64,
    pub gas_boe: f64,
    pub provenance: String,
    pub source_class: String,
    pub includes_super_emitters: bool,
    pub uncertainty_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UncoveredRow {
    pub region: String,
    pub kind: String,
    pub oil_boe: f64,
    pub gas_boe: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProductionAuditRow {
    pub region: String,
    pub year: u16,
    pub method: String,
    pub gas_boe: f64,
    /// `source:year` pairs joined with `;`.
    pub inputs: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FusionAuditRow {
    pub region: String,
    pub year: u16,
    pub measurement_kg: Option<f64>,
    pub estimate_kg: Option<f64>,
    pub chosen_class: String,
    pub provenance: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CompanyRow {
    pub company: String,
    pub category: CompanyCategory,
    pub model_emissions_kg: f64,
    pub covered_oil_boe: f64,
    pub covered_gas_boe: f64,
    pub uncovered_oil_boe: f64,
    pub uncovered_gas_boe: f64,
    pub model_intensity: f64,
    pub full_production_emissions_kg: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BreakdownRow {
    pub company: String,
    pub key: String,
    pub kind: String,
    pub covered: bool,
    pub intensity: Option<f64>,
    pub oil_boe: f64,
    pub gas_boe: f64,
    pub emissions_kg: f64,
    pub provenance: String,
}

/// Everything one model run produces.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub config: RunConfig,
    pub table: Vec<IntensityTableRow>,
    pub uncovered: Vec<UncoveredRow>,
    pub production_audit: Vec<ProductionAuditRow>,
    pub fusion_audit: Vec<FusionAuditRow>,
    pub companies: Vec<CompanyRow>,
    pub breakdown: Vec<BreakdownRow>,
    pub summary: Vec<(String, String)>,
}

// ---------------------------------------------------------------------------
// Model stage
// ---------------------------------------------------------------------------

/// Run the modelling pipeline. `threads` = 0 uses the rayon default.
pub fn run_model(paths: &InputPaths, config: &RunConfig, threads: usize) -> Result<ModelRun> {
    config.validate()?;
    let registry = ingest::parse_regions(&paths.regions)?;
    let production = ingest::parse_production(
        &paths.production,
        &registry,
        config.units.gas_boe_factor_scf,
    )?;
    let emissions = ingest::parse_emissions(&paths.emissions, &registry)?;
    let profiles = ingest::parse_profiles(&paths.profiles, &registry)?;

    compute_model_run(
        config,
        &registry,
        &production,
        &emissions,
        &profiles,
        threads,
    )
}

fn compute_model_run(
    config: &RunConfig,
    registry: &RegionRegistry,
    production: &ProductionDataset,
    emissions: &EmissionDataset,
    profiles: &[CompanyProfile],
    threads: usize,
) -> Result<ModelRun> {
    let year = config.target_year;

    // Target-year production per region.
    let mut volumes: BTreeMap<RegionId, ProductionVolume> = BTreeMap::new();
    let mut production_audit = Vec::new();
    for region in registry
        .iter()
        .filter(|r| r.kind != RegionKind::AggregationGroup)
    {
        let (volume, estimate) =
            estimator::estimate_region_production(&region.id, year, production, &config.estimator)?;
        if let Some(e) = &estimate {
            let inputs: Vec<String> = e
                .inputs_used
                .iter()
                .map(|(source, y)| format!("{}:{y}", source.as_str()))
                .collect();
            production_audit.push(ProductionAuditRow {
                region: region.id.to_string(),
                year,
                method: e.method.as_str().to_string(),
                gas_boe: e.gas_boe,
                inputs: inputs.join(";"),
            });
        }
        volumes.insert(region.id.clone(), volume);
    }

    // Best-available emissions per region.
    let mut fused: BTreeMap<RegionId, FusedEmissions> = BTreeMap::new();
    for region in emissions.regions_with_data(year) {
        fused.insert(region.clone(), fusion::fuse(&region, year, emissions)?);
    }

    let table = engine::build_intensity_table(registry, &fused, &volumes)?;

    let mut fusion_audit: BTreeMap<String, FusionAuditRow> = fused
        .values()
        .map(|f| {
            let measurement = emissions
                .record(&f.region, year, SourceClass::Measurement)
                .map(|r| r.methane.kilograms());
            let estimate = emissions
                .record(&f.region, year, SourceClass::Estimate)
                .map(|r| r.methane.kilograms());
            (
                f.region.to_string(),
                FusionAuditRow {
                    region: f.region.to_string(),
                    year,
                    measurement_kg: measurement,
                    estimate_kg: estimate,
                    chosen_class: f.chosen.source_class.as_str().to_string(),
                    provenance: f.provenance.as_str().to_string(),
                    note: String::new(),
                },
            )
        })
        .collect();
    for note in table.residual_notes() {
        let basins: Vec<String> = note.basins.iter().map(|b| b.to_string()).collect();
        let entry = table
            .get(&note.country)
            .expect("residual country is covered");
        let row = fusion_audit
            .entry(note.country.to_string())
            .or_insert_with(|| FusionAuditRow {
                region: note.country.to_string(),
                year,
                measurement_kg: None,
                estimate_kg: None,
                chosen_class: entry.scope.source_class.as_str().to_string(),
                provenance: String::new(),
                note: String::new(),
            });
        row.provenance = FusionProvenance::BasinWeightedResidual.as_str().to_string();
        row.note = match note.overridden_estimate {
            Some(_) => format!(
                "country estimate overridden by basin-weighted residual over {}",
                basins.join(";")
            ),
            None => format!("derived from basins {}", basins.join(";")),
        };
    }

    // Company models, in parallel, collected in name order.
    let mut sorted_profiles: Vec<&CompanyProfile> = profiles.iter().collect();
    sorted_profiles.sort_by(|a, b| a.name.cmp(&b.name));
    let results = run_company_models(&sorted_profiles, &table, threads)?;

    let mut companies = Vec::with_capacity(results.len());
    let mut breakdown = Vec::new();
    for result in &results {
        let full = engine::total_emissions_projection(result, ProjectionMode::FullProduction);
        companies.push(CompanyRow {
            company: result.company.clone(),
            category: result.category,
            model_emissions_kg: result.total_emissions.kilograms(),
            covered_oil_boe: result.covered_production.oil_boe(),
            covered_gas_boe: result.covered_production.gas_boe(),
            uncovered_oil_boe: result.uncovered_production.oil_boe(),
            uncovered_gas_boe: result.uncovered_production.gas_boe(),
            model_intensity: result.model_intensity.value(),
            full_production_emissions_kg: full.kilograms(),
        });
        for c in &result.contributions {
            breakdown.push(BreakdownRow {
                company: result.company.clone(),
                key: c.key.clone(),
                kind: c.kind.as_str().to_string(),
                covered: c.covered,
                intensity: c.intensity.map(|i| i.value()),
                oil_boe: c.allocated.oil_boe(),
                gas_boe: c.allocated.gas_boe(),
                emissions_kg: c.emissions.kilograms(),
                provenance: match (c.kind, c.provenance) {
                    (ContributionKind::Aggregation, _) if c.covered => "pooled".to_string(),
                    (_, Some(p)) => p.as_str().to_string(),
                    _ => "uncovered".to_string(),
                },
            });
        }
    }

    let table_rows: Vec<IntensityTableRow> = table
        .entries()
        .map(|(region, entry)| IntensityTableRow {
            region: region.to_string(),
            kind: registry
                .get(region)
                .map(|r| r.kind.as_str().to_string())
                .unwrap_or_else(|| "country".to_string()),
            intensity: entry.intensity.value(),
            emissions_kg: entry.emissions.kilograms(),
            oil_boe: entry.production.oil_boe(),
            gas_boe: entry.production.gas_boe(),
            provenance: entry.provenance.as_str().to_string(),
            source_class: entry.scope.source_class.as_str().to_string(),
            includes_super_emitters: entry.scope.includes_super_emitters,
            uncertainty_rel: entry.scope.uncertainty_rel,
        })
        .collect();

    let uncovered_rows: Vec<UncoveredRow> = table
        .uncovered()
        .map(|region| {
            let volume = volumes
                .get(region)
                .copied()
                .unwrap_or(ProductionVolume::ZERO);
            UncoveredRow {
                region: region.to_string(),
                kind: registry
                    .get(region)
                    .map(|r| r.kind.as_str().to_string())
                    .unwrap_or_else(|| "country".to_string()),
                oil_boe: volume.oil_boe(),
                gas_boe: volume.gas_boe(),
            }
        })
        .collect();

    let summary = build_summary(config, registry, &table, &companies);

    Ok(ModelRun {
        config: config.clone(),
        table: table_rows,
        uncovered: uncovered_rows,
        production_audit,
        fusion_audit: fusion_audit.into_values().collect(),
        companies,
        breakdown,
        summary,
    })
}

fn run_company_models(
    profiles: &[&CompanyProfile],
    table: &RegionalIntensityTable,
    threads: usize,
) -> Result<Vec<engine::CompanyModelResult>> {
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<std::result::Result<engine::CompanyModelResult, crate::error::DomainError>> =
        pool.install(|| {
            profiles
                .par_iter()
                .map(|p| engine::model_company(p, table))
                .collect()
        });
    // Surface the first failure in company order, independent of scheduling.
    let mut results = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        results.push(outcome?);
    }
    Ok(results)
}

fn build_summary(
    config: &RunConfig,
    registry: &RegionRegistry,
    table: &RegionalIntensityTable,
    companies: &[CompanyRow],
) -> Vec<(String, String)> {
    let covered_production: f64 = companies
        .iter()
        .map(|c| c.covered_oil_boe + c.covered_gas_boe)
        .sum();
    let uncovered_production: f64 = companies
        .iter()
        .map(|c| c.uncovered_oil_boe + c.uncovered_gas_boe)
        .sum();
    let total_emissions: f64 = companies.iter().map(|c| c.model_emissions_kg).sum();
    let unweighted_mean = if companies.is_empty() {
        0.0
    } else {
        companies.iter().map(|c| c.model_intensity).sum::<f64>() / companies.len() as f64
    };
    let weighted_mean = if covered_production > 0.0 {
        total_emissions / covered_production
    } else {
        0.0
    };
    let regional_production = table.country_production_total(registry);
    let company_share = if regional_production > 0.0 {
        (covered_production + uncovered_production) / regional_production
    } else {
        0.0
    };

    vec![
        ("target_year".into(), config.target_year.to_string()),
        ("regions_in_registry".into(), registry.len().to_string()),
        ("covered_regions".into(), table.len().to_string()),
        (
            "uncovered_regions".into(),
            table.uncovered().count().to_string(),
        ),
        ("companies".into(), companies.len().to_string()),
        (
            "company_covered_production_boe".into(),
            fmt(covered_production),
        ),
        (
            "company_uncovered_production_boe".into(),
            fmt(uncovered_production),
        ),
        ("total_model_emissions_kg".into(), fmt(total_emissions)),
        (
            "unweighted_mean_model_intensity".into(),
            fmt(unweighted_mean),
        ),
        (
            "production_weighted_mean_model_intensity".into(),
            fmt(weighted_mean),
        ),
        (
            "covered_country_production_boe".into(),
            fmt(regional_production),
        ),
        (
            "company_share_of_covered_country_production".into(),
            fmt(company_share),
        ),
    ]
}

// ---------------------------------------------------------------------------
// Artifact writing
// ---------------------------------------------------------------------------

const MODEL_FILES: &[&str] = &[
    "effective_config.toml",
    "intensity_table.csv",
    "uncovered_regions.csv",
    "production_audit.csv",
    "fusion_audit.csv",
    "companies.csv",
    "company_breakdown.csv",
    "summary.csv",
];

impl ModelRun {
    /// Artifact file contents, in writing order.
    pub fn artifact_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        files.push(("effective_config.toml".to_string(), self.config.to_toml()));

        let mut s = String::from(
            "region_id,kind,intensity_kg_per_boe,emissions_kg,oil_boe,gas_boe,provenance,source_class,includes_super_emitters,uncertainty_rel\n",
        );
        for r in &self.table {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.region,
                r.kind,
                fmt(r.intensity),
                fmt(r.emissions_kg),
                fmt(r.oil_boe),
                fmt(r.gas_boe),
                r.provenance,
                r.source_class,
                r.includes_super_emitters,
                fmt_opt(r.uncertainty_rel),
            );
        }
        files.push(("intensity_table.csv".to_string(), s));

        let mut s = String::from("region_id,kind,oil_boe,gas_boe\n");
        for r in &self.uncovered {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.region,
                r.kind,
                fmt(r.oil_boe),
                fmt(r.gas_boe)
            );
        }
        files.push(("uncovered_regions.csv".to_string(), s));

        let mut s = String::from("region_id,year,method,gas_boe,inputs\n");
        for r in &self.production_audit {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.region,
                r.year,
                r.method,
                fmt(r.gas_boe),
                r.inputs
            );
        }
        files.push(("production_audit.csv".to_string(), s));

        let mut s = String::from(
            "region_id,year,measurement_kg,estimate_kg,chosen_class,provenance,note\n",
        );
        for r in &self.fusion_audit {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.region,
                r.year,
                fmt_opt(r.measurement_kg),
                fmt_opt(r.estimate_kg),
                r.chosen_class,
                r.provenance,
                r.note
            );
        }
        files.push(("fusion_audit.csv".to_string(), s));

        let mut s = String::from(
            "company,category,model_emissions_kg,covered_oil_boe,covered_gas_boe,uncovered_oil_boe,uncovered_gas_boe,model_intensity,full_production_emissions_kg\n",
        );
        for c in &self.companies {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                c.company,
                c.category.as_str(),
                fmt(c.model_emissions_kg),
                fmt(c.covered_oil_boe),
                fmt(c.covered_gas_boe),
                fmt(c.uncovered_oil_boe),
                fmt(c.uncovered_gas_boe),
                fmt(c.model_intensity),
                fmt(c.full_production_emissions_kg),
            );
        }
        files.push(("companies.csv".to_string(), s));

        let mut s = String::from(
            "company,key,kind,covered,intensity,oil_boe,gas_boe,emissions_kg,provenance\n",
        );
        for b in &self.breakdown {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                b.company,
                b.key,
                b.kind,
                b.covered,
                fmt_opt(b.intensity),
                fmt(b.oil_boe),
                fmt(b.gas_boe),
                fmt(b.emissions_kg),
                b.provenance,
            );
        }
        files.push(("company_breakdown.csv".to_string(), s));

        let mut s = String::from("key,value\n");
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k},{v}");
        }
        files.push(("summary.csv".to_string(), s));

        files
    }
}

/// Write files into `dir`, which must not already contain anything. On any
/// write failure the partially created directory is removed.
pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<()> {
    if dir.exists() {
        let occupied = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir.display().to_string(), e))?
            .next()
            .is_some();
        if occupied {
            return Err(Error::io(
                dir.display().to_string(),
                std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    "output directory exists and is not empty",
                ),
            ));
        }
    }
    let created = !dir.exists();
    let write_all = || -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for (name, content) in files {
            let path = dir.join(name);
            std::fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        Ok(())
    };
    match write_all() {
        Ok(()) => Ok(()),
        Err(e) => {
            if created {
                let _ = std::fs::remove_dir_all(dir);
            } else {
                for (name, _) in files {
                    let _ = std::fs::remove_file(dir.join(name));
                }
            }
            Err(e)
        }
    }
}

pub fn write_model_run(run: &ModelRun, dir: &Path) -> Result<()> {
    write_files(dir, &run.artifact_files())
}

// ---------------------------------------------------------------------------
// Artifact reading
// ---------------------------------------------------------------------------

pub fn read_model_run(dir: &Path) -> Result<ModelRun> {
    for name in MODEL_FILES {
        let path = dir.join(name);
        if !path.exists() {
            return Err(Error::io(
                path.display().to_string(),
                std::io::Error::new(std::io::ErrorKind::NotFound, "missing run artifact"),
            ));
        }
    }
    let config = RunConfig::load(&dir.join("effective_config.toml"))?;

    let mut table = Vec::new();
    ingest_table(
        &dir.join("intensity_table.csv"),
        &[
            "region_id",
            "kind",
            "intensity_kg_per_boe",
            "emissions_kg",
            "oil_boe",
            "gas_boe",
            "provenance",
            "source_class",
            "includes_super_emitters",
            "uncertainty_rel",
        ],
        |row| {
            table.push(IntensityTableRow {
                region: row.non_empty("region_id")?.to_string(),
                kind: row.non_empty("kind")?.to_string(),
                intensity: row.f64("intensity_kg_per_boe")?,
                emissions_kg: row.f64("emissions_kg")?,
                oil_boe: row.f64("oil_boe")?,
                gas_boe: row.f64("gas_boe")?,
                provenance: row.non_empty("provenance")?.to_string(),
                source_class: row.non_empty("source_class")?.to_string(),
                includes_super_emitters: row
                    .optional_bool("includes_super_emitters")?
                    .unwrap_or(false),
                uncertainty_rel: row.optional_f64("uncertainty_rel")?,
            });
            Ok(())
        },
    )?;

    let mut uncovered = Vec::new();
    ingest_table(
        &dir.join("uncovered_regions.csv"),
        &["region_id", "kind", "oil_boe", "gas_boe"],
        |row| {
            uncovered.push(UncoveredRow {
                region: row.non_empty("region_id")?.to_string(),
                kind: row.non_empty("kind")?.to_string(),
                oil_boe: row.f64("oil_boe")?,
                gas_boe: row.f64("gas_boe")?,
            });
            Ok(())
        },
    )?;

    let mut production_audit = Vec::new();
    ingest_table(
        &dir.join("production_audit.csv"),
        &["region_id", "year", "method", "gas_boe", "inputs"],
        |row| {
            production_audit.push(ProductionAuditRow {
                region: row.non_empty("region_id")?.to_string(),
                year: row.year("year")?,
                method: row.non_empty("method")?.to_string(),
                gas_boe: row.f64("gas_boe")?,
                inputs: row.get("inputs").to_string(),
            });
            Ok(())
        },
    )?;

    let mut fusion_audit = Vec::new();
    ingest_table(
        &dir.join("fusion_audit.csv"),
        &[
            "region_id",
            "year",
            "measurement_kg",
            "estimate_kg",
            "chosen_class",
            "provenance",
            "note",
        ],
        |row| {
            fusion_audit.push(FusionAuditRow {
                region: row.non_empty("region_id")?.to_string(),
                year: row.year("year")?,
                measurement_kg: row.optional_f64("measurement_kg")?,
                estimate_kg: row.optional_f64("estimate_kg")?,
                chosen_class: row.non_empty("chosen_class")?.to_string(),
                provenance: row.non_empty("provenance")?.to_string(),
                note: row.get("note").to_string(),
            });
            Ok(())
        },
    )?;

    let mut companies = Vec::new();
    ingest_table(
        &dir.join("companies.csv"),
        &[
            "company",
            "category",
            "model_emissions_kg",
            "covered_oil_boe",
            "covered_gas_boe",
            "uncovered_oil_boe",
            "uncovered_gas_boe",
            "model_intensity",
            "full_production_emissions_kg",
        ],
        |row| {
            let category_token = row.non_empty("category")?;
            let category = CompanyCategory::parse(category_token)
                .ok_or_else(|| row.error(format!("unknown category '{category_token}'")))?;
            companies.push(CompanyRow {
                company: row.non_empty("company")?.to_string(),
                category,
                model_emissions_kg: row.f64("model_emissions_kg")?,
                covered_oil_boe: row.f64("covered_oil_boe")?,
                covered_gas_boe: row.f64("covered_gas_boe")?,
                uncovered_oil_boe: row.f64("uncovered_oil_boe")?,
                uncovered_gas_boe: row.f64("uncovered_gas_boe")?,
                model_intensity: row.f64("model_intensity")?,
                full_production_emissions_kg: row.f64("full_production_emissions_kg")?,
            });
            Ok(())
        },
    )?;

    let mut breakdown = Vec::new();
    ingest_table(
        &dir.join("company_breakdown.csv"),
        &[
            "company",
            "key",
            "kind",
            "covered",
            "intensity",
            "oil_boe",
            "gas_boe",
            "emissions_kg",
            "provenance",
        ],
        |row| {
            breakdown.push(BreakdownRow {
                company: row.non_empty("company")?.to_string(),
                key: row.non_empty("key")?.to_string(),
                kind: row.non_empty("kind")?.to_string(),
                covered: row.optional_bool("covered")?.unwrap_or(false),
                intensity: row.optional_f64("intensity")?,
                oil_boe: row.f64("oil_boe")?,
                gas_boe: row.f64("gas_boe")?,
                emissions_kg: row.f64("emissions_kg")?,
                provenance: row.get("provenance").to_string(),
            });
            Ok(())
        },
    )?;

    let mut summary = Vec::new();
    ingest_table(&dir.join("summary.csv"), &["key", "value"], |row| {
        summary.push((
            row.non_empty("key")?.to_string(),
            row.get("value").to_string(),
        ));
        Ok(())
    })?;

    Ok(ModelRun {
        config,
        table,
        uncovered,
        production_audit,
        fusion_audit,
        companies,
        breakdown,
        summary,
    })
}

fn ingest_table(
    path: &Path,
    columns: &[&str],
    visit: impl FnMut(&crate::ingest::Row<'_>) -> Result<()>,
) -> Result<()> {
    crate::ingest::read_table(path, columns, &[], visit)
}

// ---------------------------------------------------------------------------
// Benchmark stage
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BenchmarkRow {
    pub company: String,
    pub category: CompanyCategory,
    pub model_intensity: f64,
    pub reported_intensity: Option<f64>,
    pub ratio: Option<f64>,
    pub outlier: Option<OutlierReason>,
    pub degenerate_report: bool,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub results: Vec<BenchmarkRow>,
    pub stats: Vec<CategoryStats>,
    /// Stats rows carry a "metric/category" label; kept flat for the report.
    pub metric_labels: Vec<(String, String)>,
}

/// Benchmark a model run against reported metrics.
pub fn run_benchmark(
    run: &ModelRun,
    reported: &ReportedMetricsFile,
    config: &RunConfig,
) -> Result<BenchmarkRun> {
    let models: Vec<ModelledIntensity> = run
        .companies
        .iter()
        .map(|c| {
            Ok(ModelledIntensity {
                company: c.company.clone(),
                category: c.category,
                model_intensity: MethaneIntensity::new(c.model_intensity)?,
            })
        })
        .collect::<Result<_, crate::error::DomainError>>()?;

    let results = stats::build_benchmark(&models, reported)?;
    let (kept, excluded) =
        stats::exclude_outliers(results, &config.outliers, config.stats.quartiles)?;

    // One merged list sorted by company, outlier reasons retained.
    let mut rows: Vec<BenchmarkRow> = kept
        .iter()
        .chain(excluded.iter())
        .map(|r| BenchmarkRow {
            company: r.company.clone(),
            category: r.category,
            model_intensity: r.model_intensity.value(),
            reported_intensity: r.reported_intensity.map(|i| i.value()),
            ratio: r.ratio,
            outlier: r.outlier,
            degenerate_report: r.degenerate_report,
        })
        .collect();
    rows.sort_by(|a, b| a.company.cmp(&b.company));

    // Statistics: model intensities over everyone, reported intensities over
    // reporters, ratios over the kept set only.
    let mut stats_rows = Vec::new();
    let mut labels = Vec::new();
    let mut push_stats = |metric: &str, category: &str, values: &[f64]| -> Result<()> {
        if values.is_empty() {
            return Ok(());
        }
        let label = format!("{metric}/{category}");
        stats_rows.push(stats::category_stats(values, &label, &config.stats)?);
        labels.push((metric.to_string(), category.to_string()));
        Ok(())
    };

    let by_category = |select: &dyn Fn(&BenchmarkRow) -> Option<f64>,
                       category: Option<CompanyCategory>|
     -> Vec<f64> {
        rows.iter()
            .filter(|r| category.is_none_or(|c| r.category == c))
            .filter_map(select)
            .collect()
    };

    for (metric, select) in [
        (
            "model_intensity",
            &(|r: &BenchmarkRow| Some(r.model_intensity)) as &dyn Fn(&BenchmarkRow) -> Option<f64>,
        ),
        ("reported_intensity", &|r: &BenchmarkRow| {
            r.reported_intensity
        }),
        ("ratio", &|r: &BenchmarkRow| {
            if r.outlier.is_none() {
                r.ratio
            } else {
                None
            }
        }),
    ] {
        for category in CompanyCategory::ALL {
            push_stats(
                metric,
                category.as_str(),
                &by_category(select, Some(category)),
            )?;
        }
        push_stats(metric, "all", &by_category(select, None))?;
    }

    Ok(BenchmarkRun {
        results: rows,
        stats: stats_rows,
        metric_labels: labels,
    })
}

impl BenchmarkRun {
    pub fn artifact_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();

        let mut s = String::from(
            "company,category,model_intensity,reported_intensity,ratio,outlier,degenerate_report\n",
        );
        for r in &self.results {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.company,
                r.category.as_str(),
                fmt(r.model_intensity),
                fmt_opt(r.reported_intensity),
                fmt_opt(r.ratio),
                r.outlier.map(|o| o.as_str()).unwrap_or(""),
                r.degenerate_report,
            );
        }
        files.push(("benchmark.csv".to_string(), s));

        let mut s =
            String::from("metric,category,n,mean,median,std_dev,rel_std_dev,min,max,q1,q3\n");
        for (stats, (metric, category)) in self.stats.iter().zip(&self.metric_labels) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                metric,
                category,
                stats.n,
                fmt(stats.mean),
                fmt(stats.median),
                fmt_opt(stats.std_dev),
                fmt_opt(stats.rel_std_dev),
                fmt(stats.min),
                fmt(stats.max),
                fmt(stats.q1),
                fmt(stats.q3),
            );
        }
        files.push(("category_stats.csv".to_string(), s));

        files
    }
}

pub fn write_benchmark(bench: &BenchmarkRun, dir: &Path) -> Result<()> {
    // Benchmark artifacts extend an existing run directory.
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    for (name, content) in bench.artifact_files() {
        let path = dir.join(&name);
        std::fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}

pub fn read_benchmark(dir: &Path) -> Result<Option<BenchmarkRun>> {
    let results_path = dir.join("benchmark.csv");
    let stats_path = dir.join("category_stats.csv");
    if !results_path.exists() || !stats_path.exists() {
        return Ok(None);
    }

    let mut results = Vec::new();
    ingest_table(
        &results_path,
        &[
            "company",
            "category",
            "model_intensity",
            "reported_intensity",
            "ratio",
            "outlier",
            "degenerate_report",
        ],
        |row| {
            let category_token = row.non_empty("category")?;
            let category = CompanyCategory::parse(category_token)
                .ok_or_else(|| row.error(format!("unknown category '{category_token}'")))?;
            let outlier = match row.get("outlier") {
                "" => None,
                "manual_list" => Some(OutlierReason::ManualList),
                "iqr_rule" => Some(OutlierReason::IqrRule),
                other => return Err(row.error(format!("unknown outlier reason '{other}'"))),
            };
            results.push(BenchmarkRow {
                company: row.non_empty("company")?.to_string(),
                category,
                model_intensity: row.f64("model_intensity")?,
                reported_intensity: row.optional_f64("reported_intensity")?,
                ratio: row.optional_f64("ratio")?,
                outlier,
                degenerate_report: row.optional_bool("degenerate_report")?.unwrap_or(false),
            });
            Ok(())
        },
    )?;

    let mut stats_rows = Vec::new();
    let mut labels = Vec::new();
    ingest_table(
        &stats_path,
        &[
            "metric",
            "category",
            "n",
            "mean",
            "median",
            "std_dev",
            "rel_std_dev",
            "min",
            "max",
            "q1",
            "q3",
        ],
        |row| {
            let metric = row.non_empty("metric")?.to_string();
            let category = row.non_empty("category")?.to_string();
            let n: usize = row
                .non_empty("n")?
                .parse()
                .map_err(|_| row.error("malformed count in column 'n'"))?;
            stats_rows.push(CategoryStats {
                label: format!("{metric}/{category}"),
                n,
                mean: row.f64("mean")?,
                median: row.f64("median")?,
                std_dev: row.optional_f64("std_dev")?,
                rel_std_dev: row.optional_f64("rel_std_dev")?,
                min: row.f64("min")?,
                max: row.f64("max")?,
                q1: row.f64("q1")?,
                q3: row.f64("q3")?,
            });
            labels.push((metric, category));
            Ok(())
        },
    )?;

    Ok(Some(BenchmarkRun {
        results,
        stats: stats_rows,
        metric_labels: labels,
    }))
}

// ---------------------------------------------------------------------------
// Validation stage
// ---------------------------------------------------------------------------

/// Per-file validation outcome: row count or the first error.
pub type ValidationOutcome = (String, Result<usize>);

pub fn validate_inputs(
    regions: &Path,
    production: Option<&Path>,
    emissions: Option<&Path>,
    profiles: Option<&Path>,
    reported: Option<&Path>,
    config: &RunConfig,
) -> Vec<ValidationOutcome> {
    let mut outcomes = Vec::new();
    let registry = match ingest::parse_regions(regions) {
        Ok(reg) => {
            outcomes.push((regions.display().to_string(), Ok(reg.len())));
            Some(reg)
        }
        Err(e) => {
            outcomes.push((regions.display().to_string(), Err(e)));
            None
        }
    };

    if let Some(path) = production {
        let outcome = match &registry {
            Some(reg) => ingest::parse_production(path, reg, config.units.gas_boe_factor_scf)
                .map(|ds| ds.len()),
            None => Err(Error::Config("region registry failed to load".into())),
        };
        outcomes.push((path.display().to_string(), outcome));
    }
    if let Some(path) = emissions {
        let outcome = match &registry {
            Some(reg) => ingest::parse_emissions(path, reg).map(|ds| ds.len()),
            None => Err(Error::Config("region registry failed to load".into())),
        };
        outcomes.push((path.display().to_string(), outcome));
    }
    if let Some(path) = profiles {
        let outcome = match &registry {
            Some(reg) => ingest::parse_profiles(path, reg).map(|p| p.len()),
            None => Err(Error::Config("region registry failed to load".into())),
        };
        outcomes.push((path.display().to_string(), outcome));
    }
    if let Some(path) = reported {
        outcomes.push((
            path.display().to_string(),
            ingest::parse_reported(path).map(|f| f.len()),
        ));
    }
    outcomes
}
