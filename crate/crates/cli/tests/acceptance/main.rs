//! Acceptance suite. Each test covers one criterion and prints one
//! PASS line; a failed assertion marks the criterion failed.

mod oracle;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use methabench::config::StatsConfig;
use methabench::engine;
use methabench::fusion::FusionProvenance;
use methabench::ingest::{Allocation, CompanyCategory, CompanyProfile};
use methabench::region::{Region, RegionId, RegionKind, RegionRegistry};
use methabench::scope::{SourceClass, SourceScope};
use methabench::stats;
use methabench::units::{MethaneMass, ProductionVolume};

const REL_TOL: f64 = 1e-9;

fn assert_rel_eq(actual: f64, expected: f64, tol: f64, what: &str) {
    if expected == 0.0 {
        assert!(actual.abs() <= tol, "{what}: expected 0, got {actual}");
    } else {
        let rel = ((actual - expected) / expected).abs();
        assert!(
            rel <= tol,
            "{what}: expected {expected}, got {actual} (rel {rel:e})"
        );
    }
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_methabench"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .unwrap_or_else(|e| panic!("failed to spawn {:?}: {e}", bin()))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap()
        .as_nanos();
    std::env::temp_dir().join(format!("methabench_{}_{}_{tag}", std::process::id(), nanos))
}

/// Tiny CSV reader for artifact files (no quoting in our artifacts).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text =
        std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    let mut lines = text.lines();
    let headers: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (headers, rows)
}

fn column(headers: &[String], name: &str) -> usize {
    headers
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing from {headers:?}"))
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form mean identity of the NOC ratio decomposition
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_noc_ratio_mean_identity() {
    let values = [51.2, 6.2, 6.2, 6.2, 6.2];
    let started = Instant::now();
    let computed = stats::category_stats(&values, "noc", &StatsConfig::default())
        .unwrap()
        .mean;
    let elapsed = started.elapsed();
    assert_rel_eq(computed, 15.2, 1e-12, "NOC ratio decomposition mean");
    assert!(
        elapsed.as_micros() < 1000,
        "mean took {elapsed:?}, budget is 1 ms"
    );
    println!("acceptance criterion 1 (NOC ratio decomposition mean 15.2): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 2: end-to-end oracle fixture
// ---------------------------------------------------------------------------

fn model_fixture_into(out: &Path, threads: Option<usize>) -> Output {
    let regions = fixture("e2e/regions.csv");
    let production = fixture("e2e/production.csv");
    let emissions = fixture("e2e/emissions.csv");
    let profiles = fixture("e2e/profiles.csv");
    let config = fixture("e2e/config.toml");
    let out_str = out.display().to_string();
    let mut args = vec![
        "model",
        "--regions",
        regions.to_str().unwrap(),
        "--production",
        production.to_str().unwrap(),
        "--emissions",
        emissions.to_str().unwrap(),
        "--profiles",
        profiles.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out_str,
    ];
    let threads_str;
    if let Some(t) = threads {
        threads_str = t.to_string();
        args.push("--threads");
        args.push(&threads_str);
    }
    run(&args)
}

#[test]
fn criterion_2_end_to_end_oracle_fixture() {
    let started = Instant::now();
    let out = tmp_dir("oracle_fixture");
    let model_out = model_fixture_into(&out, None);
    assert!(
        model_out.status.success(),
        "model failed: {}",
        String::from_utf8_lossy(&model_out.stderr)
    );
    let reported = fixture("e2e/reported.csv");
    let bench_out = run(&[
        "benchmark",
        "--run",
        out.to_str().unwrap(),
        "--reported",
        reported.to_str().unwrap(),
    ]);
    assert!(
        bench_out.status.success(),
        "benchmark failed: {}",
        String::from_utf8_lossy(&bench_out.stderr)
    );

    // Regional intensities, emissions and production against the oracle.
    let expected_table = oracle::intensity_table();
    let (headers, rows) = read_csv(&out.join("intensity_table.csv"));
    assert_eq!(rows.len(), expected_table.len(), "covered region count");
    let (c_region, c_intensity) = (
        column(&headers, "region_id"),
        column(&headers, "intensity_kg_per_boe"),
    );
    let (c_emissions, c_oil, c_gas) = (
        column(&headers, "emissions_kg"),
        column(&headers, "oil_boe"),
        column(&headers, "gas_boe"),
    );
    for row in &rows {
        let region = row[c_region].as_str();
        let (intensity, emissions, oil, gas) = expected_table[region];
        assert_rel_eq(
            row[c_intensity].parse().unwrap(),
            intensity,
            REL_TOL,
            &format!("intensity of {region}"),
        );
        assert_rel_eq(
            row[c_emissions].parse().unwrap(),
            emissions,
            REL_TOL,
            &format!("emissions of {region}"),
        );
        assert_rel_eq(
            row[c_oil].parse::<f64>().unwrap() + row[c_gas].parse::<f64>().unwrap(),
            oil + gas,
            REL_TOL,
            &format!("production of {region}"),
        );
    }

    // The uncovered country.
    let (headers, rows) = read_csv(&out.join("uncovered_regions.csv"));
    let c_region = column(&headers, "region_id");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][c_region], "NGA");

    // Gas estimation methods and values.
    let (headers, rows) = read_csv(&out.join("production_audit.csv"));
    let (c_region, c_method, c_gas) = (
        column(&headers, "region_id"),
        column(&headers, "method"),
        column(&headers, "gas_boe"),
    );
    let audit: BTreeMap<&str, (&str, f64)> = rows
        .iter()
        .map(|r| {
            (
                r[c_region].as_str(),
                (r[c_method].as_str(), r[c_gas].parse().unwrap()),
            )
        })
        .collect();
    let expected_production = oracle::production();
    assert_eq!(audit["RUS"].0, "monthly_ratio");
    assert_rel_eq(
        audit["RUS"].1,
        expected_production["RUS"].1,
        REL_TOL,
        "RUS gas",
    );
    assert_eq!(audit["QAT"].0, "trend");
    assert_rel_eq(
        audit["QAT"].1,
        expected_production["QAT"].1,
        REL_TOL,
        "QAT gas",
    );
    assert_eq!(audit["USA"].0, "direct");

    // Company models against the oracle.
    let expected_companies = oracle::companies();
    let (headers, rows) = read_csv(&out.join("companies.csv"));
    assert_eq!(rows.len(), expected_companies.len());
    let c_company = column(&headers, "company");
    let c_em = column(&headers, "model_emissions_kg");
    let (c_co, c_cg) = (
        column(&headers, "covered_oil_boe"),
        column(&headers, "covered_gas_boe"),
    );
    let (c_uo, c_ug) = (
        column(&headers, "uncovered_oil_boe"),
        column(&headers, "uncovered_gas_boe"),
    );
    let c_mi = column(&headers, "model_intensity");
    let c_full = column(&headers, "full_production_emissions_kg");
    for expected in &expected_companies {
        let row = rows
            .iter()
            .find(|r| r[c_company] == expected.name)
            .unwrap_or_else(|| panic!("missing company {}", expected.name));
        assert_rel_eq(
            row[c_em].parse().unwrap(),
            expected.emissions_kg,
            REL_TOL,
            &format!("{} emissions", expected.name),
        );
        assert_rel_eq(
            row[c_co].parse::<f64>().unwrap() + row[c_cg].parse::<f64>().unwrap(),
            expected.covered_boe,
            REL_TOL,
            &format!("{} covered production", expected.name),
        );
        let uncovered = row[c_uo].parse::<f64>().unwrap() + row[c_ug].parse::<f64>().unwrap();
        assert_rel_eq(
            uncovered,
            expected.uncovered_boe,
            REL_TOL,
            &format!("{} uncovered production", expected.name),
        );
        assert_rel_eq(
            row[c_mi].parse().unwrap(),
            expected.intensity,
            REL_TOL,
            &format!("{} model intensity", expected.name),
        );
        assert_rel_eq(
            row[c_full].parse().unwrap(),
            expected.full_projection_kg,
            REL_TOL,
            &format!("{} full-production projection", expected.name),
        );
    }

    // Ratios and the manual outlier.
    let (headers, rows) = read_csv(&out.join("benchmark.csv"));
    let c_company = column(&headers, "company");
    let c_ratio = column(&headers, "ratio");
    let c_outlier = column(&headers, "outlier");
    for expected in &expected_companies {
        let row = rows.iter().find(|r| r[c_company] == expected.name).unwrap();
        match expected.ratio {
            Some(ratio) => assert_rel_eq(
                row[c_ratio].parse().unwrap(),
                ratio,
                REL_TOL,
                &format!("{} ratio", expected.name),
            ),
            None => assert!(
                row[c_ratio].is_empty(),
                "{} must have no ratio",
                expected.name
            ),
        }
        assert_eq!(
            row[c_outlier] == "manual_list",
            expected.manual_outlier,
            "{} outlier flag",
            expected.name
        );
    }

    // Every category statistic against the oracle's own recomputation.
    let by_category = oracle::intensities_by_category();
    let reported_by_category = {
        let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for c in &expected_companies {
            if let Some(r) = c.reported_intensity {
                map.entry(c.category.to_string()).or_default().push(r);
                map.entry("all".to_string()).or_default().push(r);
            }
        }
        map
    };
    let ratios_by_category = {
        let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for c in &expected_companies {
            if c.manual_outlier {
                continue;
            }
            if let Some(r) = c.ratio {
                map.entry(c.category.to_string()).or_default().push(r);
                map.entry("all".to_string()).or_default().push(r);
            }
        }
        map
    };

    let (headers, rows) = read_csv(&out.join("category_stats.csv"));
    let c_metric = column(&headers, "metric");
    let c_category = column(&headers, "category");
    let stat_columns: Vec<(usize, &str)> = [
        "n",
        "mean",
        "median",
        "std_dev",
        "rel_std_dev",
        "min",
        "max",
        "q1",
        "q3",
    ]
    .iter()
    .map(|name| (column(&headers, name), *name))
    .collect();
    assert!(!rows.is_empty());
    for row in &rows {
        let metric = row[c_metric].as_str();
        let category = row[c_category].as_str();
        let values = match metric {
            "model_intensity" => &by_category[category],
            "reported_intensity" => &reported_by_category[category],
            "ratio" => &ratios_by_category[category],
            other => panic!("unexpected metric {other}"),
        };
        let expected = oracle::stats(values);
        for (idx, name) in &stat_columns {
            let cell = row[*idx].as_str();
            let expected_value = match *name {
                "n" => Some(expected.n as f64),
                "mean" => Some(expected.mean),
                "median" => Some(expected.median),
                "std_dev" => expected.std_dev,
                "rel_std_dev" => expected.rel_std_dev,
                "min" => Some(expected.min),
                "max" => Some(expected.max),
                "q1" => Some(expected.q1),
                "q3" => Some(expected.q3),
                _ => unreachable!(),
            };
            match expected_value {
                Some(v) => assert_rel_eq(
                    cell.parse().unwrap(),
                    v,
                    REL_TOL,
                    &format!("{metric}/{category} {name}"),
                ),
                None => assert!(cell.is_empty(), "{metric}/{category} {name} must be empty"),
            }
        }
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "fixture run took {elapsed:?}, budget 1 s"
    );
    std::fs::remove_dir_all(&out).ok();
    println!("acceptance criterion 2 (end-to-end oracle fixture): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 3: 42-company synthetic benchmark
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_synthetic_benchmark_42_companies() {
    let started = Instant::now();

    // Deterministic draw of 42 intensities inside [0.32, 2.75].
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next_unit = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let intensities: Vec<f64> = (0..42)
        .map(|_| 0.32 + (2.75 - 0.32) * next_unit())
        .collect();

    // 10 NOCs, 17 Integrated and 15 Independents.
    let categories: Vec<CompanyCategory> = std::iter::repeat_n(CompanyCategory::Noc, 10)
        .chain(std::iter::repeat_n(CompanyCategory::Integrated, 17))
        .chain(std::iter::repeat_n(CompanyCategory::Independent, 15))
        .collect();
    assert_eq!(categories.len(), 42);

    // One synthetic country per company; region emissions realize the drawn
    // intensity exactly.
    let mut registry = RegionRegistry::new();
    let mut fused = BTreeMap::new();
    let mut production = BTreeMap::new();
    let mut profiles = Vec::new();
    for (i, (&intensity, &category)) in intensities.iter().zip(&categories).enumerate() {
        let id = RegionId::new(format!("R{i:02}"));
        registry
            .insert(Region {
                id: id.clone(),
                kind: RegionKind::Country,
                parent: None,
                display_name: format!("Region {i}"),
            })
            .unwrap();
        let volume = ProductionVolume::new(6.0e8, 4.0e8).unwrap();
        production.insert(id.clone(), volume);
        fused.insert(
            id.clone(),
            methabench::fusion::FusedEmissions {
                region: id.clone(),
                year: 2022,
                methane: MethaneMass::from_kilograms(intensity * volume.total()).unwrap(),
                chosen: SourceScope::new(SourceClass::Estimate),
                provenance: FusionProvenance::EstimateDirect,
            },
        );
        profiles.push(CompanyProfile {
            name: format!("Company {i:02}"),
            category,
            allocations: vec![Allocation {
                region: id,
                production: ProductionVolume::new(5.0e7, 5.0e7).unwrap(),
                basis: None,
            }],
            aggregation_groups: vec![],
        });
    }

    let table = engine::build_intensity_table(&registry, &fused, &production).unwrap();
    let results: Vec<_> = profiles
        .iter()
        .map(|p| engine::model_company(p, &table).unwrap())
        .collect();

    let stats_config = StatsConfig::default();
    let all: Vec<f64> = results.iter().map(|r| r.model_intensity.value()).collect();
    let all_stats = stats::category_stats(&all, "all", &stats_config).unwrap();
    assert!(
        all_stats.min >= 0.32 && all_stats.max <= 2.75,
        "range [{}, {}] escapes [0.32, 2.75]",
        all_stats.min,
        all_stats.max
    );

    for category in CompanyCategory::ALL {
        let values: Vec<f64> = results
            .iter()
            .filter(|r| r.category == category)
            .map(|r| r.model_intensity.value())
            .collect();
        let expected_n = match category {
            CompanyCategory::Noc => 10,
            CompanyCategory::Integrated => 17,
            CompanyCategory::Independent => 15,
        };
        assert_eq!(values.len(), expected_n);
        let computed = stats::category_stats(&values, category.as_str(), &stats_config).unwrap();
        let expected = oracle::stats(&values);
        assert_rel_eq(
            computed.rel_std_dev.unwrap(),
            expected.rel_std_dev.unwrap(),
            REL_TOL,
            &format!("{} rel std dev", category.as_str()),
        );
        assert!(computed.min >= 0.32 && computed.max <= 2.75);
    }
    let expected_all = oracle::stats(&all);
    assert_rel_eq(
        all_stats.rel_std_dev.unwrap(),
        expected_all.rel_std_dev.unwrap(),
        REL_TOL,
        "all rel std dev",
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "synthetic benchmark took {elapsed:?}"
    );
    println!("acceptance criterion 3 (synthetic 42-company benchmark): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 4: property suites
// ---------------------------------------------------------------------------

mod properties;

// ---------------------------------------------------------------------------
// Criterion 5: ingestion robustness corpus
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_ingestion_robustness_corpus() {
    let started = Instant::now();
    let corpus = fixture("malformed");
    let mut cases: Vec<PathBuf> = std::fs::read_dir(&corpus)
        .unwrap_or_else(|e| panic!("read {}: {e}", corpus.display()))
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    cases.sort();
    assert!(
        cases.len() >= 15,
        "corpus has {} files, need at least 15",
        cases.len()
    );

    for case in &cases {
        let name = case.file_name().unwrap().to_str().unwrap();
        let out = tmp_dir(&format!("malformed_{name}"));
        let output = run_with_substitution(case, name, &out);
        assert!(
            !output.status.success(),
            "{name}: expected failure, got success"
        );
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(
            stderr.contains(name),
            "{name}: diagnostic must name the file, got: {stderr}"
        );
        let names_line = stderr.split(name).nth(1).is_some_and(|rest| {
            rest.starts_with(':') && rest[1..].chars().next().is_some_and(|c| c.is_ascii_digit())
        });
        assert!(
            names_line,
            "{name}: diagnostic must name the line, got: {stderr}"
        );
        assert!(
            !out.exists(),
            "{name}: failed run must not leave outputs behind"
        );
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "corpus took {elapsed:?}, budget 1 s"
    );
    println!(
        "acceptance criterion 5 (ingestion robustness, {} malformed files): PASS",
        cases.len()
    );
}

/// Substitute one malformed file into the otherwise-valid fixture set, based
/// on its name prefix, and run the pipeline stage that consumes it.
fn run_with_substitution(case: &Path, name: &str, out: &Path) -> Output {
    let case = case.to_str().unwrap();
    let regions = fixture("e2e/regions.csv");
    let production = fixture("e2e/production.csv");
    let emissions = fixture("e2e/emissions.csv");
    let profiles = fixture("e2e/profiles.csv");
    let out_str = out.display().to_string();

    let (regions, production, emissions, profiles) = match name.split('_').next().unwrap() {
        "regions" => (
            case,
            production.to_str().unwrap(),
            emissions.to_str().unwrap(),
            profiles.to_str().unwrap(),
        ),
        "production" => (
            regions.to_str().unwrap(),
            case,
            emissions.to_str().unwrap(),
            profiles.to_str().unwrap(),
        ),
        "emissions" => (
            regions.to_str().unwrap(),
            production.to_str().unwrap(),
            case,
            profiles.to_str().unwrap(),
        ),
        "profiles" => (
            regions.to_str().unwrap(),
            production.to_str().unwrap(),
            emissions.to_str().unwrap(),
            case,
        ),
        "reported" => {
            return run(&[
                "validate",
                "--regions",
                regions.to_str().unwrap(),
                "--reported",
                case,
            ]);
        }
        other => panic!("unexpected corpus prefix {other} for {name}"),
    };
    run(&[
        "model",
        "--regions",
        regions,
        "--production",
        production,
        "--emissions",
        emissions,
        "--profiles",
        profiles,
        "--out",
        &out_str,
    ])
}

// ---------------------------------------------------------------------------
// Criterion 6: determinism across reruns and parallelism
// ---------------------------------------------------------------------------

fn collect_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn criterion_6_model_runs_are_byte_identical() {
    let out_a = tmp_dir("det_a");
    let out_b = tmp_dir("det_b");
    let out_c = tmp_dir("det_c");
    for (out, threads) in [(&out_a, Some(1)), (&out_b, Some(1)), (&out_c, Some(4))] {
        let output = model_fixture_into(out, threads);
        assert!(
            output.status.success(),
            "model failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    let tree_a = collect_tree(&out_a);
    let tree_b = collect_tree(&out_b);
    let tree_c = collect_tree(&out_c);
    assert_eq!(
        tree_a.keys().collect::<Vec<_>>(),
        tree_b.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &tree_a {
        assert_eq!(bytes, &tree_b[name], "rerun differs in {name}");
        assert_eq!(bytes, &tree_c[name], "thread count changed bytes of {name}");
    }
    for out in [out_a, out_b, out_c] {
        std::fs::remove_dir_all(out).ok();
    }
    println!("acceptance criterion 6 (byte-identical reruns across parallelism): PASS");
}
