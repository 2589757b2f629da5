//! Run configuration: one declarative file, overridable by CLI flags.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::units::DEFAULT_GAS_BOE_FACTOR_SCF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdDevKind {
    /// n-1 denominator.
    Sample,
    /// n denominator.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileMethod {
    /// Linear interpolation between order statistics ("type 7").
    Linear,
    /// Tukey hinges: medians of the lower and upper halves.
    Tukey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierPolicyKind {
    None,
    Manual,
    Iqr,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnitsConfig {
    /// Standard cubic feet per barrel of oil equivalent.
    pub gas_boe_factor_scf: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        UnitsConfig {
            gas_boe_factor_scf: DEFAULT_GAS_BOE_FACTOR_SCF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorConfig {
    /// Most recent annual values considered by the trend fit.
    pub trend_window: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { trend_window: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    pub std_dev: StdDevKind,
    pub quartiles: QuartileMethod,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            std_dev: StdDevKind::Sample,
            quartiles: QuartileMethod::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutlierConfig {
    pub policy: OutlierPolicyKind,
    /// Company names excluded when the policy includes the manual list.
    pub manual: Vec<String>,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        OutlierConfig {
            policy: OutlierPolicyKind::Iqr,
            manual: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub histogram_bin_width: f64,
    pub histogram_origin: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            histogram_bin_width: 0.2,
            histogram_origin: 0.0,
        }
    }
}

/// Effective configuration of a run. Echoed verbatim into the output
/// directory so every run records the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// The modelled year.
    pub target_year: u16,
    pub units: UnitsConfig,
    pub estimator: EstimatorConfig,
    pub stats: StatsConfig,
    pub outliers: OutlierConfig,
    pub report: ReportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            target_year: 2022,
            units: UnitsConfig::default(),
            estimator: EstimatorConfig::default(),
            stats: StatsConfig::default(),
            outliers: OutlierConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.units.gas_boe_factor_scf.is_finite() || self.units.gas_boe_factor_scf <= 0.0 {
            return Err(Error::Config(format!(
                "gas conversion factor must be positive, got {}",
                self.units.gas_boe_factor_scf
            )));
        }
        if self.estimator.trend_window < 2 {
            return Err(Error::Config(format!(
                "trend window must be at least 2, got {}",
                self.estimator.trend_window
            )));
        }
        if !self.report.histogram_bin_width.is_finite() || self.report.histogram_bin_width <= 0.0 {
            return Err(Error::Config(format!(
                "histogram bin width must be positive, got {}",
                self.report.histogram_bin_width
            )));
        }
        if !self.report.histogram_origin.is_finite() {
            return Err(Error::Config("histogram origin must be finite".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
