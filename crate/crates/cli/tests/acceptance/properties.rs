//! Criterion 4: generated property suites, 256 cases each.

use std::collections::BTreeMap;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use methabench::config::{
    EstimatorConfig, OutlierConfig, OutlierPolicyKind, QuartileMethod, StatsConfig,
};
use methabench::engine::{self, RegionalIntensityTable};
use methabench::error::DomainError;
use methabench::estimator::{estimate_gas, EstimateMethod};
use methabench::fusion::{self, FusedEmissions, FusionProvenance};
use methabench::ingest::{
    Allocation, CompanyCategory, CompanyProfile, EmissionDataset, EmissionRow, ProductionDataset,
    ProductionRow, ProductionSource,
};
use methabench::region::{Region, RegionId, RegionKind, RegionRegistry};
use methabench::report::histogram;
use methabench::scope::{SourceClass, SourceScope};
use methabench::stats::{self, BenchmarkResult};
use methabench::units::{MethaneIntensity, MethaneMass, ProductionVolume};

const CASES: u32 = 256;
const REL_TOL: f64 = 1e-9;

fn run_suite<S, F>(name: &str, strategy: S, test: F)
where
    S: Strategy,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .unwrap_or_else(|e| panic!("property suite '{name}' failed: {e}"));
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if b == 0.0 {
        a.abs() <= tol
    } else {
        ((a - b) / b).abs() <= tol
    }
}

/// Intensity table over synthetic countries R0..Rn with given intensities.
fn table_for(intensities: &[f64]) -> RegionalIntensityTable {
    let mut registry = RegionRegistry::new();
    let mut fused = BTreeMap::new();
    let mut production = BTreeMap::new();
    for (i, &intensity) in intensities.iter().enumerate() {
        let id = RegionId::new(format!("R{i}"));
        registry
            .insert(Region {
                id: id.clone(),
                kind: RegionKind::Country,
                parent: None,
                display_name: format!("R{i}"),
            })
            .unwrap();
        let volume = ProductionVolume::new(1.0e9, 0.0).unwrap();
        production.insert(id.clone(), volume);
        fused.insert(
            id.clone(),
            FusedEmissions {
                region: id.clone(),
                year: 2022,
                methane: MethaneMass::from_kilograms(intensity * volume.total()).unwrap(),
                chosen: SourceScope::new(SourceClass::Estimate),
                provenance: FusionProvenance::EstimateDirect,
            },
        );
    }
    engine::build_intensity_table(&registry, &fused, &production).unwrap()
}

fn profile_over(allocations: Vec<(usize, f64, f64)>) -> CompanyProfile {
    CompanyProfile {
        name: "P".into(),
        category: CompanyCategory::Independent,
        allocations: allocations
            .into_iter()
            .map(|(region, oil, gas)| Allocation {
                region: RegionId::new(format!("R{region}")),
                production: ProductionVolume::new(oil, gas).unwrap(),
                basis: None,
            })
            .collect(),
        aggregation_groups: vec![],
    }
}

fn suite_fusion_priority() {
    let mass = 0.0f64..1.0e12;
    run_suite(
        "fusion priority",
        (
            proptest::option::of(mass.clone()),
            proptest::option::of(mass),
        ),
        |(measurement, estimate)| {
            let mut dataset = EmissionDataset::default();
            if let Some(kg) = measurement {
                dataset.insert_row(EmissionRow {
                    region: "R".into(),
                    year: 2022,
                    methane: MethaneMass::from_kilograms(kg).unwrap(),
                    scope: SourceScope::new(SourceClass::Measurement),
                });
            }
            if let Some(kg) = estimate {
                dataset.insert_row(EmissionRow {
                    region: "R".into(),
                    year: 2022,
                    methane: MethaneMass::from_kilograms(kg).unwrap(),
                    scope: SourceScope::new(SourceClass::Estimate),
                });
            }
            let fused = fusion::fuse(&"R".into(), 2022, &dataset);
            match (measurement, estimate) {
                (None, None) => prop_assert!(fused.is_err()),
                (Some(kg), _) => {
                    let fused = fused.unwrap();
                    prop_assert_eq!(fused.chosen.source_class, SourceClass::Measurement);
                    prop_assert_eq!(fused.methane.kilograms(), kg);
                }
                (None, Some(kg)) => {
                    let fused = fused.unwrap();
                    prop_assert_eq!(fused.chosen.source_class, SourceClass::Estimate);
                    prop_assert_eq!(fused.methane.kilograms(), kg);
                }
            }
            Ok(())
        },
    );
}

fn suite_convex_bounds() {
    // Weighted basin intensities stay inside the intensity hull.
    run_suite(
        "weighted intensity convex bound",
        proptest::collection::vec((0.0f64..10.0, 0.1f64..1.0e9), 1..8),
        |pairs| {
            let basins: Vec<_> = pairs
                .iter()
                .map(|(i, w)| {
                    (
                        MethaneIntensity::new(*i).unwrap(),
                        ProductionVolume::new(*w, 0.0).unwrap(),
                    )
                })
                .collect();
            let value = fusion::rest_of_country_intensity(&"C".into(), &basins)
                .unwrap()
                .value();
            let lo = pairs.iter().map(|(i, _)| *i).fold(f64::INFINITY, f64::min);
            let hi = pairs
                .iter()
                .map(|(i, _)| *i)
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(value >= lo - (lo.abs() + 1.0) * REL_TOL);
            prop_assert!(value <= hi + (hi.abs() + 1.0) * REL_TOL);
            Ok(())
        },
    );

    // Company model intensity is a convex combination of covered regions.
    run_suite(
        "company model convex bound",
        proptest::collection::vec((0.0f64..10.0, 1.0f64..1.0e8, 0.0f64..1.0e8), 1..6),
        |rows| {
            let intensities: Vec<f64> = rows.iter().map(|(i, _, _)| *i).collect();
            let table = table_for(&intensities);
            let profile = profile_over(
                rows.iter()
                    .enumerate()
                    .map(|(idx, (_, oil, gas))| (idx, *oil, *gas))
                    .collect(),
            );
            let result = engine::model_company(&profile, &table).unwrap();
            let lo = intensities.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = intensities
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let value = result.model_intensity.value();
            prop_assert!(value >= lo - (lo.abs() + 1.0) * REL_TOL);
            prop_assert!(value <= hi + (hi.abs() + 1.0) * REL_TOL);
            Ok(())
        },
    );
}

fn suite_allocation_splitting() {
    // Two parts and their sum allocate identically: splitting one
    // allocation cannot change a single output bit.
    run_suite(
        "allocation splitting additivity",
        (
            proptest::collection::vec((0.0f64..10.0, 1.0f64..1.0e8, 1.0f64..1.0e8), 1..4),
            (1.0f64..1.0e8, 1.0f64..1.0e8),
            (1.0f64..1.0e8, 1.0f64..1.0e8),
        ),
        |(rows, part_a, part_b)| {
            let intensities: Vec<f64> = rows.iter().map(|(i, _, _)| *i).collect();
            let table = table_for(&intensities);
            let whole = (part_a.0 + part_b.0, part_a.1 + part_b.1);

            let mut merged: Vec<(usize, f64, f64)> = rows
                .iter()
                .enumerate()
                .skip(1)
                .map(|(idx, (_, oil, gas))| (idx, *oil, *gas))
                .collect();
            let mut split = merged.clone();
            merged.push((0, whole.0, whole.1));
            split.push((0, part_a.0, part_a.1));
            split.push((0, part_b.0, part_b.1));

            let merged_result = engine::model_company(&profile_over(merged), &table).unwrap();
            let split_result = engine::model_company(&profile_over(split), &table).unwrap();
            prop_assert_eq!(
                merged_result.total_emissions.kilograms().to_bits(),
                split_result.total_emissions.kilograms().to_bits()
            );
            prop_assert_eq!(
                merged_result.model_intensity.value().to_bits(),
                split_result.model_intensity.value().to_bits()
            );
            prop_assert_eq!(
                merged_result.covered_production.total().to_bits(),
                split_result.covered_production.total().to_bits()
            );
            Ok(())
        },
    );
}

fn suite_permutation_and_rerun() {
    let allocations = proptest::collection::vec((0usize..6, 1.0f64..1.0e8, 1.0f64..1.0e8), 1..10);
    run_suite(
        "permutation invariance and bit-identical reruns",
        allocations.prop_flat_map(|v| {
            let shuffled = Just(v.clone()).prop_shuffle();
            (Just(v), shuffled)
        }),
        |(original, shuffled)| {
            let table = table_for(&[0.3, 1.1, 2.7, 0.9, 5.0, 0.05]);
            let a = engine::model_company(&profile_over(original.clone()), &table).unwrap();
            let b = engine::model_company(&profile_over(shuffled), &table).unwrap();
            let rerun = engine::model_company(&profile_over(original), &table).unwrap();
            for (x, y) in [(&a, &b), (&a, &rerun)] {
                prop_assert_eq!(
                    x.total_emissions.kilograms().to_bits(),
                    y.total_emissions.kilograms().to_bits()
                );
                prop_assert_eq!(
                    x.model_intensity.value().to_bits(),
                    y.model_intensity.value().to_bits()
                );
                prop_assert_eq!(x.contributions.len(), y.contributions.len());
            }
            Ok(())
        },
    );
}

fn suite_rel_std_dev_scale_invariance() {
    run_suite(
        "rel std dev scale invariance",
        (
            proptest::collection::vec(0.01f64..100.0, 2..20),
            0.001f64..1000.0,
        ),
        |(values, scale)| {
            let config = StatsConfig::default();
            let base = stats::category_stats(&values, "x", &config)
                .unwrap()
                .rel_std_dev
                .unwrap();
            let scaled_values: Vec<f64> = values.iter().map(|v| v * scale).collect();
            let scaled = stats::category_stats(&scaled_values, "x", &config)
                .unwrap()
                .rel_std_dev
                .unwrap();
            prop_assert!(
                rel_close(scaled, base, REL_TOL),
                "rsd {} vs {} under scale {}",
                base,
                scaled,
                scale
            );
            Ok(())
        },
    );
}

fn suite_extrapolation_identities() {
    // Monthly ratio of exactly one returns the annual baseline unchanged.
    run_suite(
        "monthly ratio identity",
        (0.0f64..1.0e9, 0.1f64..1.0e6),
        |(baseline, monthly)| {
            let mut dataset = ProductionDataset::default();
            for (year, source, gas) in [
                (2021, ProductionSource::GasDb, baseline),
                (2021, ProductionSource::GasMonthlyDb, monthly),
                (2022, ProductionSource::GasMonthlyDb, monthly),
            ] {
                dataset.insert_row(ProductionRow {
                    region: "R".into(),
                    year,
                    source,
                    oil_boe: 0.0,
                    gas_boe: gas,
                });
            }
            let estimate = estimate_gas(
                &"R".into(),
                2022,
                &dataset,
                &EstimatorConfig { trend_window: 5 },
            )
            .unwrap();
            prop_assert_eq!(estimate.method, EstimateMethod::MonthlyRatio);
            prop_assert_eq!(estimate.gas_boe.to_bits(), baseline.to_bits());
            Ok(())
        },
    );

    // A constant history extrapolates to the constant.
    run_suite(
        "constant history identity",
        (0.0f64..1.0e9, 2usize..6),
        |(level, len)| {
            let mut dataset = ProductionDataset::default();
            for i in 0..len {
                dataset.insert_row(ProductionRow {
                    region: "R".into(),
                    year: 2021 - i as u16,
                    source: ProductionSource::GasDb,
                    oil_boe: 0.0,
                    gas_boe: level,
                });
            }
            let estimate = estimate_gas(
                &"R".into(),
                2022,
                &dataset,
                &EstimatorConfig { trend_window: 5 },
            )
            .unwrap();
            prop_assert_eq!(estimate.method, EstimateMethod::Trend);
            prop_assert_eq!(estimate.gas_boe.to_bits(), level.to_bits());
            Ok(())
        },
    );
}

fn suite_histogram_conservation() {
    run_suite(
        "histogram count conservation",
        (
            proptest::collection::vec(-1.0e3f64..1.0e3, 0..200),
            0.01f64..50.0,
            -10.0f64..10.0,
        ),
        |(values, width, origin)| {
            let bins = histogram(&values, width, origin).unwrap();
            let total: usize = bins.iter().map(|b| b.count).sum();
            prop_assert_eq!(total, values.len());
            for pair in bins.windows(2) {
                prop_assert_eq!(pair[0].upper.to_bits(), pair[1].lower.to_bits());
            }
            Ok(())
        },
    );
}

fn suite_outlier_partition() {
    run_suite(
        "outlier partition disjoint union",
        (
            proptest::collection::vec(proptest::option::of(0.01f64..1.0e3), 1..20),
            0usize..4,
        ),
        |(ratios, policy_idx)| {
            let rows: Vec<BenchmarkResult> = ratios
                .iter()
                .enumerate()
                .map(|(i, ratio)| BenchmarkResult {
                    company: format!("C{i:02}"),
                    category: CompanyCategory::Independent,
                    model_intensity: MethaneIntensity::new(1.0).unwrap(),
                    reported_intensity: None,
                    ratio: *ratio,
                    outlier: None,
                    degenerate_report: false,
                })
                .collect();
            let policy = OutlierConfig {
                policy: [
                    OutlierPolicyKind::None,
                    OutlierPolicyKind::Manual,
                    OutlierPolicyKind::Iqr,
                    OutlierPolicyKind::Both,
                ][policy_idx],
                // Every third company, so the manual list is sometimes empty
                // and always names known companies.
                manual: rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % 3 == 2)
                    .map(|(_, r)| r.company.clone())
                    .collect(),
            };
            let input_names: Vec<String> = rows.iter().map(|r| r.company.clone()).collect();
            let (kept, excluded) =
                stats::exclude_outliers(rows, &policy, QuartileMethod::Linear).unwrap();

            prop_assert_eq!(kept.len() + excluded.len(), input_names.len());
            let mut union: Vec<String> = kept
                .iter()
                .chain(excluded.iter())
                .map(|r| r.company.clone())
                .collect();
            union.sort();
            let mut expected = input_names.clone();
            expected.sort();
            prop_assert_eq!(union, expected);
            prop_assert!(kept.iter().all(|r| r.outlier.is_none()));
            prop_assert!(excluded.iter().all(|r| r.outlier.is_some()));
            Ok(())
        },
    );
}

// Exercised here rather than in the engine suites: a region with emissions
// and no production must be rejected, whatever the generated emissions are.
fn suite_zero_production_rejection() {
    run_suite("zero production rejection", 0.1f64..1.0e12, |kg| {
        let mut registry = RegionRegistry::new();
        registry
            .insert(Region {
                id: "R".into(),
                kind: RegionKind::Country,
                parent: None,
                display_name: "R".into(),
            })
            .unwrap();
        let fused = BTreeMap::from([(
            RegionId::from("R"),
            FusedEmissions {
                region: "R".into(),
                year: 2022,
                methane: MethaneMass::from_kilograms(kg).unwrap(),
                chosen: SourceScope::new(SourceClass::Estimate),
                provenance: FusionProvenance::EstimateDirect,
            },
        )]);
        let err = engine::build_intensity_table(&registry, &fused, &BTreeMap::new());
        prop_assert_eq!(
            err.unwrap_err(),
            DomainError::ZeroProduction { region: "R".into() }
        );
        Ok(())
    });
}

#[test]
fn criterion_4_property_suites() {
    let started = Instant::now();
    suite_fusion_priority();
    suite_convex_bounds();
    suite_allocation_splitting();
    suite_permutation_and_rerun();
    suite_rel_std_dev_scale_invariance();
    suite_extrapolation_identities();
    suite_histogram_conservation();
    suite_outlier_partition();
    suite_zero_production_rejection();
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "property suites took {elapsed:?}, budget 30 s"
    );
    println!(
        "acceptance criterion 4 (property suites, {CASES} cases each): PASS ({:.1}s)",
        elapsed.as_secs_f64()
    );
}
