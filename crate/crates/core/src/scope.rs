//! Source scope metadata carried on every emission value.
//!
//! Measurement-class data covers all upstream emissions including
//! super-emitter events; estimate-class inventories exclude them. The
//! mismatch is carried as metadata and surfaced in reports, never
//! numerically adjusted.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceClass {
    Measurement,
    Estimate,
}

impl SourceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceClass::Measurement => "measurement",
            SourceClass::Estimate => "estimate",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "measurement" => Some(SourceClass::Measurement),
            "estimate" => Some(SourceClass::Estimate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceScope {
    pub source_class: SourceClass,
    pub includes_super_emitters: bool,
    /// Relative uncertainty in [0, 1], when the source states one.
    pub uncertainty_rel: Option<f64>,
}

impl SourceScope {
    /// Scope with the class-specific default super-emitter coverage:
    /// measurements include them, estimates do not.
    pub fn new(source_class: SourceClass) -> Self {
        SourceScope {
            source_class,
            includes_super_emitters: source_class == SourceClass::Measurement,
            uncertainty_rel: None,
        }
    }

    pub fn with_super_emitters(mut self, includes: bool) -> Self {
        self.includes_super_emitters = includes;
        self
    }

    pub fn with_uncertainty(mut self, rel: f64) -> Self {
        self.uncertainty_rel = Some(rel);
        self
    }
}
