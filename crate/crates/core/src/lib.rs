//! Modelling of upstream oil & gas methane emissions and intensities for
//! company production profiles.
//!
//! The pipeline fuses measured and estimated methane emissions per region
//! with country-level production data ("best available data"), computes a
//! methane intensity per covered region, applies those intensities to
//! company production profiles, and benchmarks the modelled intensities
//! against what the companies report.
//!
//! Stages, in order:
//!
//! - [`ingest`]: strict parsing of the region registry and the production,
//!   emissions, profile and reported-metrics files
//! - [`estimator`]: target-year gas production per region (direct, monthly
//!   ratio, or trend extrapolation)
//! - [`fusion`]: measurement-over-estimate record selection and
//!   basin-weighted residual intensities
//! - [`engine`]: the regional intensity table and company models
//! - [`stats`]: modelled/reported ratios, descriptive statistics, outlier
//!   exclusion
//! - [`report`]: histograms, boxplot summaries, text/CSV/JSON/SVG rendering
//! - [`pipeline`]: orchestration and on-disk run artifacts

#![forbid(unsafe_code)]

pub mod config;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod fusion;
pub mod ingest;
pub mod pipeline;
pub mod region;
pub mod report;
pub mod scope;
pub mod stats;
pub mod units;

pub use config::RunConfig;
pub use error::{DomainError, Error, Result};
pub use region::{Region, RegionId, RegionKind, RegionRegistry};
pub use scope::{SourceClass, SourceScope};
pub use units::{convert_gas_volume, intensity, MethaneIntensity, MethaneMass, ProductionVolume};
