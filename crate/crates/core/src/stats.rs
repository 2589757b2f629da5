//! Benchmark statistics: modelled versus reported intensities, ratios,
//! per-category descriptive statistics, and outlier exclusion.

use serde::{Deserialize, Serialize};

use crate::config::{OutlierConfig, OutlierPolicyKind, QuartileMethod, StatsConfig, StdDevKind};
use crate::engine::CompanyModelResult;
use crate::error::{DomainError, Error, Result};
use crate::ingest::{CompanyCategory, ReportedMetrics, ReportedMetricsFile};
use crate::units::MethaneIntensity;

/// The slice of a company model the benchmark needs. Thin on purpose so the
/// benchmark stage can run from persisted artifacts as well as live results.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelledIntensity {
    pub company: String,
    pub category: CompanyCategory,
    pub model_intensity: MethaneIntensity,
}

impl From<&CompanyModelResult> for ModelledIntensity {
    fn from(result: &CompanyModelResult) -> Self {
        ModelledIntensity {
            company: result.company.clone(),
            category: result.category,
            model_intensity: result.model_intensity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierReason {
    ManualList,
    IqrRule,
}

impl OutlierReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutlierReason::ManualList => "manual_list",
            OutlierReason::IqrRule => "iqr_rule",
        }
    }
}

/// One company's modelled-versus-reported comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub company: String,
    pub category: CompanyCategory,
    pub model_intensity: MethaneIntensity,
    pub reported_intensity: Option<MethaneIntensity>,
    /// model / reported; present iff the reported intensity exists and is
    /// strictly positive.
    pub ratio: Option<f64>,
    pub outlier: Option<OutlierReason>,
    /// Reported methane with zero production: flagged and left without a
    /// comparable intensity.
    pub degenerate_report: bool,
}

/// Descriptive statistics of one value set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Absent for a single observation.
    pub std_dev: Option<f64>,
    /// std_dev / mean; absent when the mean is zero or std_dev is absent.
    pub rel_std_dev: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Quantile by linear interpolation between order statistics ("type 7").
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Tukey hinges: medians of the lower and upper halves, middle element
/// shared when n is odd.
fn quartiles_tukey(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    if n == 1 {
        return (sorted[0], sorted[0]);
    }
    let half = n / 2 + n % 2;
    (median_of(&sorted[..half]), median_of(&sorted[n - half..]))
}

pub fn quartiles(sorted: &[f64], method: QuartileMethod) -> (f64, f64) {
    match method {
        QuartileMethod::Linear => (quantile_linear(sorted, 0.25), quantile_linear(sorted, 0.75)),
        QuartileMethod::Tukey => quartiles_tukey(sorted),
    }
}

/// Descriptive statistics of `values` under the configured conventions.
pub fn category_stats(
    values: &[f64],
    label: &str,
    config: &StatsConfig,
) -> Result<CategoryStats, DomainError> {
    if values.is_empty() {
        return Err(DomainError::EmptyCategory);
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("statistics input is finite"));
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std_dev = match (config.std_dev, n) {
        (StdDevKind::Sample, 1) => None,
        (kind, _) => {
            let denominator = match kind {
                StdDevKind::Sample => n as f64 - 1.0,
                StdDevKind::Population => n as f64,
            };
            let ss: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
            Some((ss / denominator).sqrt())
        }
    };
    let rel_std_dev = match std_dev {
        Some(sd) if mean != 0.0 => Some(sd / mean),
        _ => None,
    };
    let (q1, q3) = quartiles(&sorted, config.quartiles);
    Ok(CategoryStats {
        label: label.to_string(),
        n,
        mean,
        median: quantile_linear(&sorted, 0.5),
        std_dev,
        rel_std_dev,
        min: sorted[0],
        max: sorted[n - 1],
        q1,
        q3,
    })
}

/// Intensity a company reports: the stated figure when given, otherwise
/// reported methane over reported production.
pub fn reported_intensity(
    report: &ReportedMetrics,
) -> Result<Option<MethaneIntensity>, DomainError> {
    if let Some(intensity) = report.intensity {
        return Ok(Some(intensity));
    }
    match (report.methane, report.production) {
        (Some(mass), Some(production)) => {
            if production.total() <= 0.0 {
                return Err(DomainError::DegenerateReport {
                    company: report.company.clone(),
                });
            }
            Ok(Some(MethaneIntensity::new(
                mass.kilograms() / production.total(),
            )?))
        }
        _ => Ok(None),
    }
}

/// Join model results with reported metrics into benchmark rows, populating
/// the model/reported ratio where a positive reported intensity exists.
pub fn build_benchmark(
    models: &[ModelledIntensity],
    reported: &ReportedMetricsFile,
) -> Result<Vec<BenchmarkResult>> {
    for company in reported.companies() {
        if !models.iter().any(|m| m.company == company) {
            return Err(Error::Config(format!(
                "reported metrics name unknown company '{company}'"
            )));
        }
    }
    models
        .iter()
        .map(|model| {
            let (reported_value, degenerate) = match reported.get(&model.company) {
                None => (None, false),
                Some(entry) => match reported_intensity(entry) {
                    Ok(value) => (value, false),
                    Err(DomainError::DegenerateReport { .. }) => (None, true),
                    Err(other) => return Err(other.into()),
                },
            };
            let ratio = reported_value
                .and_then(|r| (r.value() > 0.0).then(|| model.model_intensity.value() / r.value()));
            Ok(BenchmarkResult {
                company: model.company.clone(),
                category: model.category,
                model_intensity: model.model_intensity,
                reported_intensity: reported_value,
                ratio,
                outlier: None,
                degenerate_report: degenerate,
            })
        })
        .collect()
}

/// Partition benchmark rows into kept and excluded sets under the outlier
/// policy. The manual list applies first; the IQR rule then fences the
/// remaining ratio values at [q1 - 1.5*IQR, q3 + 1.5*IQR]. Rows without a
/// ratio are never outliers.
pub fn exclude_outliers(
    results: Vec<BenchmarkResult>,
    policy: &OutlierConfig,
    quartile_method: QuartileMethod,
) -> Result<(Vec<BenchmarkResult>, Vec<BenchmarkResult>)> {
    let use_manual = matches!(
        policy.policy,
        OutlierPolicyKind::Manual | OutlierPolicyKind::Both
    );
    let use_iqr = matches!(
        policy.policy,
        OutlierPolicyKind::Iqr | OutlierPolicyKind::Both
    );

    if use_manual {
        for name in &policy.manual {
            if !results.iter().any(|r| &r.company == name) {
                return Err(Error::Config(format!(
                    "manual outlier list names unknown company '{name}'"
                )));
            }
        }
    }

    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for mut row in results {
        if use_manual && policy.manual.iter().any(|n| n == &row.company) {
            row.outlier = Some(OutlierReason::ManualList);
            excluded.push(row);
        } else {
            kept.push(row);
        }
    }

    if use_iqr {
        let mut ratios: Vec<f64> = kept.iter().filter_map(|r| r.ratio).collect();
        if ratios.len() >= 2 {
            ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
            let (q1, q3) = quartiles(&ratios, quartile_method);
            let iqr = q3 - q1;
            let fence = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
            let mut still_kept = Vec::with_capacity(kept.len());
            for mut row in kept {
                match row.ratio {
                    Some(ratio) if ratio < fence.0 || ratio > fence.1 => {
                        row.outlier = Some(OutlierReason::IqrRule);
                        excluded.push(row);
                    }
                    _ => still_kept.push(row),
                }
            }
            kept = still_kept;
        }
    }

    Ok((kept, excluded))
}
