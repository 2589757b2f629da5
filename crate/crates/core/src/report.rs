//! Report building blocks: histogram bins, five-number boxplot summaries,
//! aligned text tables and minimal standalone SVG charts.
//!
//! Everything here is a pure function of its inputs; no clocks, no
//! environment. Identical inputs render byte-identical output.

use std::fmt::Write as _;

use crate::config::QuartileMethod;
use crate::error::{DomainError, Error, Result};
use crate::stats::{quantile_linear, quartiles};

/// One half-open histogram bin [lower, upper).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Bin `values` into half-open bins of `bin_width` anchored at `origin`.
/// Interior empty bins are kept so the table plots as a contiguous axis.
pub fn histogram(values: &[f64], bin_width: f64, origin: f64) -> Result<Vec<HistogramBin>> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::Config(format!(
            "histogram bin width must be positive, got {bin_width}"
        )));
    }
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let index_of = |v: f64| ((v - origin) / bin_width).floor() as i64;
    let first = values
        .iter()
        .copied()
        .map(index_of)
        .min()
        .expect("non-empty");
    let last = values
        .iter()
        .copied()
        .map(index_of)
        .max()
        .expect("non-empty");

    let mut counts = vec![0usize; (last - first + 1) as usize];
    for v in values {
        counts[(index_of(*v) - first) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(offset, count)| {
            let idx = first + offset as i64;
            HistogramBin {
                lower: origin + idx as f64 * bin_width,
                upper: origin + (idx + 1) as f64 * bin_width,
                count,
            }
        })
        .collect())
}

/// Five-number summary plus IQR-rule outliers for one boxplot.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoxplotSummary {
    pub label: String,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

pub fn boxplot_summary(
    values: &[f64],
    label: &str,
    method: QuartileMethod,
) -> Result<BoxplotSummary, DomainError> {
    if values.is_empty() {
        return Err(DomainError::EmptyCategory);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("boxplot input is finite"));
    let (q1, q3) = quartiles(&sorted, method);
    let iqr = q3 - q1;
    let fence = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|v| *v < fence.0 || *v > fence.1)
        .collect();
    Ok(BoxplotSummary {
        label: label.to_string(),
        n: sorted.len(),
        min: sorted[0],
        q1,
        median: quantile_linear(&sorted, 0.5),
        q3,
        max: sorted[sorted.len() - 1],
        outliers,
    })
}

/// Render rows as a fixed-width text table with a header rule.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, h) in headers.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        let _ = write!(out, "{:<width$}", h, width = widths[i]);
    }
    out.push('\n');
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{:<width$}", cell, width = widths[i]);
        }
        out.push('\n');
    }
    out
}

// SVG geometry is fixed; charts are data plotted into a 640x400 frame.
const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"  <title>{}</title>"#, xml_escape(title));
    let _ = writeln!(
        s,
        r#"  <rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"  <text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        SVG_WIDTH / 2.0,
        xml_escape(title)
    );
    s
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn axes(s: &mut String) {
    let x0 = MARGIN_LEFT;
    let y0 = SVG_HEIGHT - MARGIN_BOTTOM;
    let x1 = SVG_WIDTH - MARGIN_RIGHT;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        s,
        r#"  <line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        s,
        r#"  <line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
    );
}

/// Histogram as standalone SVG: one bar per bin, labelled axis ends.
pub fn svg_histogram(bins: &[HistogramBin], title: &str, x_label: &str) -> String {
    let mut s = svg_open(title);
    axes(&mut s);
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y0 = SVG_HEIGHT - MARGIN_BOTTOM;

    if !bins.is_empty() {
        let max_count = bins.iter().map(|b| b.count).max().unwrap_or(1).max(1) as f64;
        let bar_w = plot_w / bins.len() as f64;
        for (i, bin) in bins.iter().enumerate() {
            let h = plot_h * bin.count as f64 / max_count;
            let x = MARGIN_LEFT + i as f64 * bar_w;
            let _ = writeln!(
                s,
                r##"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4878a8" stroke="black" stroke-width="0.5"/>"##,
                x,
                y0 - h,
                bar_w,
                h
            );
        }
        let first = bins.first().expect("non-empty");
        let last = bins.last().expect("non-empty");
        let _ = writeln!(
            s,
            r#"  <text x="{MARGIN_LEFT:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.2}</text>"#,
            y0 + 16.0,
            first.lower
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.2}</text>"#,
            MARGIN_LEFT + plot_w,
            y0 + 16.0,
            last.upper
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + 4.0,
            bins.iter().map(|b| b.count).max().unwrap_or(0)
        );
    }
    let _ = writeln!(
        s,
        r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 12.0,
        xml_escape(x_label)
    );
    s.push_str("</svg>\n");
    s
}

/// Side-by-side boxplots as standalone SVG, one box per summary.
pub fn svg_boxplot(summaries: &[BoxplotSummary], title: &str, y_label: &str) -> String {
    let mut s = svg_open(title);
    axes(&mut s);
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y0 = SVG_HEIGHT - MARGIN_BOTTOM;

    if !summaries.is_empty() {
        let lo = summaries
            .iter()
            .flat_map(|b| b.outliers.iter().copied().chain([b.min]))
            .fold(f64::INFINITY, f64::min);
        let hi = summaries
            .iter()
            .flat_map(|b| b.outliers.iter().copied().chain([b.max]))
            .fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let y_of = |v: f64| y0 - plot_h * (v - lo) / span;
        let slot = plot_w / summaries.len() as f64;

        for (i, b) in summaries.iter().enumerate() {
            let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
            let half = (slot * 0.3).min(40.0);
            // Whiskers span min..max of the non-outlier body.
            let _ = writeln!(
                s,
                r#"  <line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
                y_of(b.min),
                y_of(b.max)
            );
            let _ = writeln!(
                s,
                r##"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#a8c8e8" stroke="black" stroke-width="1"/>"##,
                cx - half,
                y_of(b.q3),
                half * 2.0,
                (y_of(b.q1) - y_of(b.q3)).abs()
            );
            let _ = writeln!(
                s,
                r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                cx - half,
                y_of(b.median),
                cx + half,
                y_of(b.median)
            );
            for out in &b.outliers {
                let _ = writeln!(
                    s,
                    r#"  <circle cx="{cx:.2}" cy="{:.2}" r="3" fill="none" stroke="black" stroke-width="1"/>"#,
                    y_of(*out)
                );
            }
            let _ = writeln!(
                s,
                r#"  <text x="{cx:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                xml_escape(&b.label)
            );
        }
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{lo:.2}</text>"#,
            MARGIN_LEFT - 6.0,
            y0
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{hi:.2}</text>"#,
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"  <text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------------------
// Report document assembly
// ---------------------------------------------------------------------------

use crate::ingest::CompanyCategory;
use crate::pipeline::{BenchmarkRun, ModelRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Delimited,
    StructuredDocument,
    VectorGraphic,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [
        ReportFormat::Text,
        ReportFormat::Delimited,
        ReportFormat::StructuredDocument,
        ReportFormat::VectorGraphic,
    ];

    pub fn parse(token: &str) -> Option<Vec<ReportFormat>> {
        match token {
            "text" => Some(vec![ReportFormat::Text]),
            "csv" | "delimited" => Some(vec![ReportFormat::Delimited]),
            "json" => Some(vec![ReportFormat::StructuredDocument]),
            "svg" => Some(vec![ReportFormat::VectorGraphic]),
            "all" => Some(Self::ALL.to_vec()),
            _ => None,
        }
    }
}

fn fmt(value: f64) -> String {
    format!("{value}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt).unwrap_or_default()
}

struct MetricValues {
    label: String,
    values: Vec<f64>,
}

fn per_category(values: &[(CompanyCategory, f64)]) -> Vec<MetricValues> {
    let mut groups = Vec::new();
    for category in CompanyCategory::ALL {
        let vals: Vec<f64> = values
            .iter()
            .filter(|(c, _)| *c == category)
            .map(|(_, v)| *v)
            .collect();
        if !vals.is_empty() {
            groups.push(MetricValues {
                label: category.display_name().to_string(),
                values: vals,
            });
        }
    }
    if !values.is_empty() {
        groups.push(MetricValues {
            label: "All".to_string(),
            values: values.iter().map(|(_, v)| *v).collect(),
        });
    }
    groups
}

fn boxplot_csv(summaries: &[BoxplotSummary]) -> String {
    let mut s = String::from("category,n,min,q1,median,q3,max,outliers\n");
    for b in summaries {
        let outliers: Vec<String> = b.outliers.iter().map(|v| fmt(*v)).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            b.label,
            b.n,
            fmt(b.min),
            fmt(b.q1),
            fmt(b.median),
            fmt(b.q3),
            fmt(b.max),
            outliers.join(";"),
        );
    }
    s
}

fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut s = String::from("bin_lower,bin_upper,count\n");
    for b in bins {
        let _ = writeln!(s, "{},{},{}", fmt(b.lower), fmt(b.upper), b.count);
    }
    s
}

#[derive(serde::Serialize)]
struct ReportDocument<'a> {
    target_year: u16,
    summary: &'a [(String, String)],
    regional_intensities: &'a [crate::pipeline::IntensityTableRow],
    uncovered_regions: &'a [crate::pipeline::UncoveredRow],
    production_audit: &'a [crate::pipeline::ProductionAuditRow],
    fusion_audit: &'a [crate::pipeline::FusionAuditRow],
    companies: &'a [crate::pipeline::CompanyRow],
    company_breakdown: &'a [crate::pipeline::BreakdownRow],
    histogram_model_intensity: &'a [HistogramBin],
    boxplot_model_intensity: &'a [BoxplotSummary],
    #[serde(skip_serializing_if = "Option::is_none")]
    benchmark: Option<&'a [crate::pipeline::BenchmarkRow]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    category_stats: Option<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram_reported_intensity: Option<&'a [HistogramBin]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boxplot_reported_intensity: Option<&'a [BoxplotSummary]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boxplot_ratio: Option<&'a [BoxplotSummary]>,
}

/// Assemble report files for the requested formats. Returns (file name,
/// content) pairs; identical inputs produce byte-identical content.
pub fn render_report(
    run: &ModelRun,
    bench: Option<&BenchmarkRun>,
    formats: &[ReportFormat],
) -> Result<Vec<(String, String)>> {
    let config = &run.config;
    let quartile_method = config.stats.quartiles;

    let model_values: Vec<(CompanyCategory, f64)> = run
        .companies
        .iter()
        .map(|c| (c.category, c.model_intensity))
        .collect();
    let model_groups = per_category(&model_values);
    let model_bins = histogram(
        &model_values.iter().map(|(_, v)| *v).collect::<Vec<_>>(),
        config.report.histogram_bin_width,
        config.report.histogram_origin,
    )?;
    let model_boxes: Vec<BoxplotSummary> = model_groups
        .iter()
        .map(|g| boxplot_summary(&g.values, &g.label, quartile_method))
        .collect::<Result<_, _>>()?;

    let reported_values: Vec<(CompanyCategory, f64)> = bench
        .map(|b| {
            b.results
                .iter()
                .filter_map(|r| r.reported_intensity.map(|v| (r.category, v)))
                .collect()
        })
        .unwrap_or_default();
    let ratio_values: Vec<(CompanyCategory, f64)> = bench
        .map(|b| {
            b.results
                .iter()
                .filter(|r| r.outlier.is_none())
                .filter_map(|r| r.ratio.map(|v| (r.category, v)))
                .collect()
        })
        .unwrap_or_default();
    let reported_bins = histogram(
        &reported_values.iter().map(|(_, v)| *v).collect::<Vec<_>>(),
        config.report.histogram_bin_width,
        config.report.histogram_origin,
    )?;
    let reported_boxes: Vec<BoxplotSummary> = per_category(&reported_values)
        .iter()
        .map(|g| boxplot_summary(&g.values, &g.label, quartile_method))
        .collect::<Result<_, _>>()?;
    let ratio_boxes: Vec<BoxplotSummary> = per_category(&ratio_values)
        .iter()
        .map(|g| boxplot_summary(&g.values, &g.label, quartile_method))
        .collect::<Result<_, _>>()?;

    let mut files = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Text => {
                files.push((
                    "report.txt".to_string(),
                    text_report(run, bench, &model_boxes),
                ));
            }
            ReportFormat::Delimited => {
                files.push((
                    "histogram_model_intensity.csv".to_string(),
                    histogram_csv(&model_bins),
                ));
                files.push((
                    "boxplot_model_intensity.csv".to_string(),
                    boxplot_csv(&model_boxes),
                ));
                if bench.is_some() {
                    files.push((
                        "histogram_reported_intensity.csv".to_string(),
                        histogram_csv(&reported_bins),
                    ));
                    files.push((
                        "boxplot_reported_intensity.csv".to_string(),
                        boxplot_csv(&reported_boxes),
                    ));
                    files.push(("boxplot_ratio.csv".to_string(), boxplot_csv(&ratio_boxes)));
                }
            }
            ReportFormat::StructuredDocument => {
                let stats_doc = bench.map(|b| {
                    b.stats
                        .iter()
                        .zip(&b.metric_labels)
                        .map(|(stats, (metric, category))| {
                            serde_json::json!({
                                "metric": metric,
                                "category": category,
                                "n": stats.n,
                                "mean": stats.mean,
                                "median": stats.median,
                                "std_dev": stats.std_dev,
                                "rel_std_dev": stats.rel_std_dev,
                                "min": stats.min,
                                "max": stats.max,
                                "q1": stats.q1,
                                "q3": stats.q3,
                            })
                        })
                        .collect()
                });
                let doc = ReportDocument {
                    target_year: config.target_year,
                    summary: &run.summary,
                    regional_intensities: &run.table,
                    uncovered_regions: &run.uncovered,
                    production_audit: &run.production_audit,
                    fusion_audit: &run.fusion_audit,
                    companies: &run.companies,
                    company_breakdown: &run.breakdown,
                    histogram_model_intensity: &model_bins,
                    boxplot_model_intensity: &model_boxes,
                    benchmark: bench.map(|b| b.results.as_slice()),
                    category_stats: stats_doc,
                    histogram_reported_intensity: bench.map(|_| reported_bins.as_slice()),
                    boxplot_reported_intensity: bench.map(|_| reported_boxes.as_slice()),
                    boxplot_ratio: bench.map(|_| ratio_boxes.as_slice()),
                };
                let json = serde_json::to_string_pretty(&doc)
                    .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
                files.push(("report.json".to_string(), json + "\n"));
            }
            ReportFormat::VectorGraphic => {
                files.push((
                    "histogram_model_intensity.svg".to_string(),
                    svg_histogram(
                        &model_bins,
                        "Distribution of model methane intensity",
                        "kgCH4/boe",
                    ),
                ));
                files.push((
                    "boxplot_model_intensity.svg".to_string(),
                    svg_boxplot(
                        &model_boxes,
                        "Model methane intensity by type of company",
                        "kgCH4/boe",
                    ),
                ));
                if bench.is_some() {
                    files.push((
                        "boxplot_reported_intensity.svg".to_string(),
                        svg_boxplot(
                            &reported_boxes,
                            "Reported methane intensity by type of company",
                            "kgCH4/boe",
                        ),
                    ));
                    files.push((
                        "boxplot_ratio.svg".to_string(),
                        svg_boxplot(
                            &ratio_boxes,
                            "Model/reported intensity ratio by type of company",
                            "ratio",
                        ),
                    ));
                }
            }
        }
    }
    Ok(files)
}

fn text_report(
    run: &ModelRun,
    bench: Option<&BenchmarkRun>,
    model_boxes: &[BoxplotSummary],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Upstream methane intensity model report");
    let _ = writeln!(out, "Target year: {}", run.config.target_year);
    out.push('\n');

    out.push_str("## Summary\n\n");
    out.push_str(&text_table(
        &["key", "value"],
        &run.summary
            .iter()
            .map(|(k, v)| vec![k.clone(), v.clone()])
            .collect::<Vec<_>>(),
    ));

    out.push_str("\n## Regional methane intensities\n\n");
    out.push_str(&text_table(
        &[
            "region",
            "kind",
            "kgCH4/boe",
            "emissions_kg",
            "production_boe",
            "provenance",
            "class",
            "super_emitters",
        ],
        &run.table
            .iter()
            .map(|r| {
                vec![
                    r.region.clone(),
                    r.kind.clone(),
                    format!("{:.6}", r.intensity),
                    fmt(r.emissions_kg),
                    fmt(r.oil_boe + r.gas_boe),
                    r.provenance.clone(),
                    r.source_class.clone(),
                    r.includes_super_emitters.to_string(),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    if !run.uncovered.is_empty() {
        out.push_str("\n## Uncovered regions\n\n");
        out.push_str(&text_table(
            &["region", "kind", "production_boe"],
            &run.uncovered
                .iter()
                .map(|r| vec![r.region.clone(), r.kind.clone(), fmt(r.oil_boe + r.gas_boe)])
                .collect::<Vec<_>>(),
        ));
    }

    out.push_str("\n## Gas production estimates\n\n");
    out.push_str(&text_table(
        &["region", "year", "method", "gas_boe", "inputs"],
        &run.production_audit
            .iter()
            .map(|r| {
                vec![
                    r.region.clone(),
                    r.year.to_string(),
                    r.method.clone(),
                    fmt(r.gas_boe),
                    r.inputs.clone(),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    out.push_str("\n## Emission fusion decisions\n\n");
    out.push_str(&text_table(
        &[
            "region",
            "measurement_kg",
            "estimate_kg",
            "chosen",
            "provenance",
            "note",
        ],
        &run.fusion_audit
            .iter()
            .map(|r| {
                vec![
                    r.region.clone(),
                    fmt_opt(r.measurement_kg),
                    fmt_opt(r.estimate_kg),
                    r.chosen_class.clone(),
                    r.provenance.clone(),
                    r.note.clone(),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    out.push_str("\n## Company models\n\n");
    out.push_str(&text_table(
        &[
            "company",
            "category",
            "kgCH4/boe",
            "emissions_kg",
            "covered_boe",
            "uncovered_boe",
        ],
        &run.companies
            .iter()
            .map(|c| {
                vec![
                    c.company.clone(),
                    c.category.display_name().to_string(),
                    format!("{:.6}", c.model_intensity),
                    fmt(c.model_emissions_kg),
                    fmt(c.covered_oil_boe + c.covered_gas_boe),
                    fmt(c.uncovered_oil_boe + c.uncovered_gas_boe),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    out.push_str("\n## Company breakdown\n\n");
    out.push_str(&text_table(
        &[
            "company",
            "region_or_group",
            "kind",
            "kgCH4/boe",
            "allocated_boe",
            "emissions_kg",
            "provenance",
        ],
        &run.breakdown
            .iter()
            .map(|b| {
                vec![
                    b.company.clone(),
                    b.key.clone(),
                    b.kind.clone(),
                    b.intensity.map(|i| format!("{i:.6}")).unwrap_or_default(),
                    fmt(b.oil_boe + b.gas_boe),
                    fmt(b.emissions_kg),
                    b.provenance.clone(),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    out.push_str("\n## Model intensity distribution\n\n");
    out.push_str(&text_table(
        &["group", "n", "min", "q1", "median", "q3", "max"],
        &model_boxes
            .iter()
            .map(|b| {
                vec![
                    b.label.clone(),
                    b.n.to_string(),
                    format!("{:.4}", b.min),
                    format!("{:.4}", b.q1),
                    format!("{:.4}", b.median),
                    format!("{:.4}", b.q3),
                    format!("{:.4}", b.max),
                ]
            })
            .collect::<Vec<_>>(),
    ));

    if let Some(bench) = bench {
        out.push_str("\n## Benchmark against reported metrics\n\n");
        out.push_str(&text_table(
            &[
                "company",
                "category",
                "model",
                "reported",
                "ratio",
                "outlier",
                "degenerate",
            ],
            &bench
                .results
                .iter()
                .map(|r| {
                    vec![
                        r.company.clone(),
                        r.category.display_name().to_string(),
                        format!("{:.6}", r.model_intensity),
                        r.reported_intensity
                            .map(|v| format!("{v:.6}"))
                            .unwrap_or_default(),
                        r.ratio.map(|v| format!("{v:.4}")).unwrap_or_default(),
                        r.outlier
                            .map(|o| o.as_str().to_string())
                            .unwrap_or_default(),
                        if r.degenerate_report {
                            "yes".into()
                        } else {
                            String::new()
                        },
                    ]
                })
                .collect::<Vec<_>>(),
        ));

        out.push_str("\n## Category statistics\n\n");
        out.push_str(&text_table(
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
            &bench
                .stats
                .iter()
                .zip(&bench.metric_labels)
                .map(|(s, (metric, category))| {
                    vec![
                        metric.clone(),
                        category.clone(),
                        s.n.to_string(),
                        format!("{:.6}", s.mean),
                        format!("{:.6}", s.median),
                        s.std_dev.map(|v| format!("{v:.6}")).unwrap_or_default(),
                        s.rel_std_dev.map(|v| format!("{v:.6}")).unwrap_or_default(),
                        format!("{:.6}", s.min),
                        format!("{:.6}", s.max),
                        format!("{:.6}", s.q1),
                        format!("{:.6}", s.q3),
                    ]
                })
                .collect::<Vec<_>>(),
        ));
    }
    out
}
