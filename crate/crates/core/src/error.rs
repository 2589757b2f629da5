//! Error types shared across the crate.

use thiserror::Error;

/// Computation-level failures of the domain model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("non-finite value for {quantity}: {value}")]
    NonFinite { quantity: &'static str, value: f64 },

    #[error("negative value for {quantity}: {value}")]
    Negative { quantity: &'static str, value: f64 },

    #[error("zero total production for region {region}")]
    ZeroProduction { region: String },

    #[error("no emission data for region {region} in {year}")]
    NoEmissionData { region: String, year: u16 },

    #[error("no annual gas baseline for region {region} at year {year}")]
    MissingBaseline { region: String, year: u16 },

    #[error("empty basin list for country {country}")]
    EmptyBasinList { country: String },

    #[error("company {company} has no production in covered regions")]
    NoCoverage { company: String },

    #[error("aggregation group {group} has no covered production")]
    UncoveredGroup { group: String },

    #[error("cannot compute statistics over an empty category")]
    EmptyCategory,

    #[error("company {company} reports methane mass with zero production")]
    DegenerateReport { company: String },
}

/// Top-level error, grouped by failure class so callers can map exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data, with file and 1-based line.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    /// Invalid configuration (file or flag level).
    #[error("configuration error: {0}")]
    Config(String),

    /// Domain computation failure.
    #[error(transparent)]
    Domain(#[from] DomainError),

    /// Filesystem failure with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(file: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
