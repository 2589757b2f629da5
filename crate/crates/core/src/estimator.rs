//! Target-year production estimation.
//!
//! Liquids pass straight through from the annual liquids source. Gas for the
//! modelled year is taken directly when the annual source already covers it;
//! otherwise the monthly source's year-over-year ratio is applied to the
//! annual baseline, and failing that a least-squares trend over the recent
//! annual history is extrapolated and clamped at zero.

use crate::config::EstimatorConfig;
use crate::error::DomainError;
use crate::ingest::{ProductionDataset, ProductionSource};
use crate::region::RegionId;
use crate::units::ProductionVolume;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Annual source already has the target year.
    Direct,
    /// Annual baseline scaled by the monthly year-over-year ratio.
    MonthlyRatio,
    /// Least-squares line over the recent annual history.
    Trend,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::Direct => "direct",
            EstimateMethod::MonthlyRatio => "monthly_ratio",
            EstimateMethod::Trend => "trend",
        }
    }
}

/// One region's gas estimate with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GasEstimate {
    pub region: RegionId,
    pub year: u16,
    pub gas_boe: f64,
    pub method: EstimateMethod,
    pub inputs_used: Vec<(ProductionSource, u16)>,
}

/// Least-squares line through `points`, evaluated at `x`.
fn least_squares_at(points: &[(f64, f64)], x: f64) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    mean_y + num / den * (x - mean_x)
}

pub fn estimate_gas(
    region: &RegionId,
    target_year: u16,
    production: &ProductionDataset,
    config: &EstimatorConfig,
) -> Result<GasEstimate, DomainError> {
    if let Some(gas_boe) = production.annual_gas(region, target_year) {
        return Ok(GasEstimate {
            region: region.clone(),
            year: target_year,
            gas_boe,
            method: EstimateMethod::Direct,
            inputs_used: vec![(ProductionSource::GasDb, target_year)],
        });
    }

    let baseline_year = target_year - 1;
    let baseline = production
        .annual_gas(region, baseline_year)
        .ok_or_else(|| DomainError::MissingBaseline {
            region: region.to_string(),
            year: baseline_year,
        })?;

    // Branch 1: both monthly years present and the baseline month is usable.
    if let (Some(prev), Some(curr)) = (
        production.monthly_gas(region, baseline_year),
        production.monthly_gas(region, target_year),
    ) {
        if prev > 0.0 {
            return Ok(GasEstimate {
                region: region.clone(),
                year: target_year,
                gas_boe: baseline * (curr / prev),
                method: EstimateMethod::MonthlyRatio,
                inputs_used: vec![
                    (ProductionSource::GasDb, baseline_year),
                    (ProductionSource::GasMonthlyDb, baseline_year),
                    (ProductionSource::GasMonthlyDb, target_year),
                ],
            });
        }
        // Degenerate ratio: fall through to the trend.
    }

    // Branch 2: trend over the most recent window of annual history.
    let history = production.gas_history(region, baseline_year);
    let window_start = history.len().saturating_sub(config.trend_window);
    let window = &history[window_start..];
    let inputs_used: Vec<_> = window
        .iter()
        .map(|(year, _)| (ProductionSource::GasDb, *year))
        .collect();

    let gas_boe = if window.len() < 2 {
        // Single observation: carry the last value forward.
        window.last().map(|(_, v)| *v).unwrap_or(baseline)
    } else if window.iter().all(|(_, v)| *v == window[0].1) {
        // A flat history extrapolates to itself; skip the fit so no rounding
        // sneaks in.
        window[0].1
    } else {
        let points: Vec<(f64, f64)> = window
            .iter()
            .map(|(year, v)| (f64::from(*year), *v))
            .collect();
        least_squares_at(&points, f64::from(target_year)).max(0.0)
    };

    Ok(GasEstimate {
        region: region.clone(),
        year: target_year,
        gas_boe,
        method: EstimateMethod::Trend,
        inputs_used,
    })
}

/// Target-year production for one region: liquids passed through, gas
/// estimated. Regions with no gas-side rows at all get zero gas and no
/// estimate record.
pub fn estimate_region_production(
    region: &RegionId,
    target_year: u16,
    production: &ProductionDataset,
    config: &EstimatorConfig,
) -> Result<(ProductionVolume, Option<GasEstimate>), DomainError> {
    let oil_boe = production.liquids(region, target_year).unwrap_or(0.0);
    if !production.has_gas_data(region) {
        return Ok((ProductionVolume::new(oil_boe, 0.0)?, None));
    }
    let estimate = estimate_gas(region, target_year, production, config)?;
    let volume = ProductionVolume::new(oil_boe, estimate.gas_boe)?;
    Ok((volume, Some(estimate)))
}
