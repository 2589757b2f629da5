//! Python bindings for the methabench core types and pipeline.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use methabench::config::RunConfig;
use methabench::error::Error;
use methabench::pipeline::{self, InputPaths};
use methabench::stats;
use methabench::units;

fn to_py_err(error: Error) -> PyErr {
    match error {
        Error::Io { .. } => PyIOError::new_err(error.to_string()),
        _ => PyValueError::new_err(error.to_string()),
    }
}

fn domain_err(error: methabench::error::DomainError) -> PyErr {
    PyValueError::new_err(error.to_string())
}

/// A methane mass stored in kilograms of CH4.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct MethaneMass {
    inner: units::MethaneMass,
}

#[pymethods]
impl MethaneMass {
    #[staticmethod]
    fn from_kilograms(kg: f64) -> PyResult<Self> {
        Ok(Self {
            inner: units::MethaneMass::from_kilograms(kg).map_err(domain_err)?,
        })
    }

    #[staticmethod]
    fn from_megatons(mt: f64) -> PyResult<Self> {
        Ok(Self {
            inner: units::MethaneMass::from_megatons(mt).map_err(domain_err)?,
        })
    }

    #[staticmethod]
    fn from_kilotons(kt: f64) -> PyResult<Self> {
        Ok(Self {
            inner: units::MethaneMass::from_kilotons(kt).map_err(domain_err)?,
        })
    }

    #[getter]
    fn kilograms(&self) -> f64 {
        self.inner.kilograms()
    }

    #[getter]
    fn megatons(&self) -> f64 {
        self.inner.megatons()
    }

    fn __repr__(&self) -> String {
        format!("MethaneMass({} kg)", self.inner.kilograms())
    }
}

/// Oil and gas production volumes in barrels of oil equivalent.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct ProductionVolume {
    inner: units::ProductionVolume,
}

#[pymethods]
impl ProductionVolume {
    #[new]
    fn new(oil_boe: f64, gas_boe: f64) -> PyResult<Self> {
        Ok(Self {
            inner: units::ProductionVolume::new(oil_boe, gas_boe).map_err(domain_err)?,
        })
    }

    #[getter]
    fn oil_boe(&self) -> f64 {
        self.inner.oil_boe()
    }

    #[getter]
    fn gas_boe(&self) -> f64 {
        self.inner.gas_boe()
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn __repr__(&self) -> String {
        format!(
            "ProductionVolume(oil={} boe, gas={} boe)",
            self.inner.oil_boe(),
            self.inner.gas_boe()
        )
    }
}

/// Methane intensity in kg CH4 per boe.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct MethaneIntensity {
    inner: units::MethaneIntensity,
}

#[pymethods]
impl MethaneIntensity {
    #[new]
    fn new(kg_per_boe: f64) -> PyResult<Self> {
        Ok(Self {
            inner: units::MethaneIntensity::new(kg_per_boe).map_err(domain_err)?,
        })
    }

    #[getter]
    fn value(&self) -> f64 {
        self.inner.value()
    }

    fn __repr__(&self) -> String {
        format!("MethaneIntensity({} kgCH4/boe)", self.inner.value())
    }
}

/// Regional intensity: emissions divided by total production.
#[pyfunction]
fn intensity(emissions: &MethaneMass, production: &ProductionVolume) -> PyResult<MethaneIntensity> {
    Ok(MethaneIntensity {
        inner: units::intensity(emissions.inner, production.inner, "<python>")
            .map_err(domain_err)?,
    })
}

/// Convert a raw gas volume in standard cubic feet to boe.
#[pyfunction]
fn convert_gas_volume(raw_scf: f64, factor_scf_per_boe: f64) -> PyResult<f64> {
    units::convert_gas_volume(raw_scf, factor_scf_per_boe).map_err(to_py_err)
}

/// Production-weighted mean of (intensity, production_boe) pairs.
#[pyfunction]
fn weighted_intensity(pairs: Vec<(f64, f64)>) -> PyResult<f64> {
    let basins: Vec<_> = pairs
        .into_iter()
        .map(|(i, boe)| {
            Ok((
                units::MethaneIntensity::new(i).map_err(domain_err)?,
                units::ProductionVolume::new(boe, 0.0).map_err(domain_err)?,
            ))
        })
        .collect::<PyResult<_>>()?;
    let value = methabench::fusion::rest_of_country_intensity(
        &methabench::RegionId::new("<python>"),
        &basins,
    )
    .map_err(domain_err)?;
    Ok(value.value())
}

/// Descriptive statistics of a value list, as a dict.
#[pyfunction]
fn category_stats(py: Python<'_>, values: Vec<f64>) -> PyResult<Py<PyDict>> {
    let stats =
        stats::category_stats(&values, "python", &Default::default()).map_err(domain_err)?;
    let dict = PyDict::new(py);
    dict.set_item("n", stats.n)?;
    dict.set_item("mean", stats.mean)?;
    dict.set_item("median", stats.median)?;
    dict.set_item("std_dev", stats.std_dev)?;
    dict.set_item("rel_std_dev", stats.rel_std_dev)?;
    dict.set_item("min", stats.min)?;
    dict.set_item("max", stats.max)?;
    dict.set_item("q1", stats.q1)?;
    dict.set_item("q3", stats.q3)?;
    Ok(dict.into())
}

/// Histogram with half-open bins, returned as (lower, upper, count) tuples.
#[pyfunction]
#[pyo3(signature = (values, bin_width, origin = 0.0))]
fn histogram(values: Vec<f64>, bin_width: f64, origin: f64) -> PyResult<Vec<(f64, f64, usize)>> {
    let bins = methabench::report::histogram(&values, bin_width, origin).map_err(to_py_err)?;
    Ok(bins
        .into_iter()
        .map(|b| (b.lower, b.upper, b.count))
        .collect())
}

/// Run the model pipeline over the four dataset files. Returns one dict per
/// company; writes run artifacts when `out` is given.
#[pyfunction]
#[pyo3(signature = (regions, production, emissions, profiles, config = None, out = None, threads = 0))]
#[allow(clippy::too_many_arguments)]
fn run_model(
    py: Python<'_>,
    regions: PathBuf,
    production: PathBuf,
    emissions: PathBuf,
    profiles: PathBuf,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    threads: usize,
) -> PyResult<Vec<Py<PyDict>>> {
    let config = match config {
        Some(path) => RunConfig::load(&path).map_err(to_py_err)?,
        None => RunConfig::default(),
    };
    let paths = InputPaths {
        regions,
        production,
        emissions,
        profiles,
    };
    let run = pipeline::run_model(&paths, &config, threads).map_err(to_py_err)?;
    if let Some(out) = out {
        pipeline::write_model_run(&run, &out).map_err(to_py_err)?;
    }
    run.companies
        .iter()
        .map(|c| {
            let dict = PyDict::new(py);
            dict.set_item("company", &c.company)?;
            dict.set_item("category", c.category.as_str())?;
            dict.set_item("model_emissions_kg", c.model_emissions_kg)?;
            dict.set_item("covered_boe", c.covered_oil_boe + c.covered_gas_boe)?;
            dict.set_item("uncovered_boe", c.uncovered_oil_boe + c.uncovered_gas_boe)?;
            dict.set_item("model_intensity", c.model_intensity)?;
            dict.set_item(
                "full_production_emissions_kg",
                c.full_production_emissions_kg,
            )?;
            Ok(dict.into())
        })
        .collect()
}

/// Regional intensity table for the same inputs, as region -> dict.
#[pyfunction]
#[pyo3(signature = (regions, production, emissions, profiles, config = None))]
fn regional_intensities(
    py: Python<'_>,
    regions: PathBuf,
    production: PathBuf,
    emissions: PathBuf,
    profiles: PathBuf,
    config: Option<PathBuf>,
) -> PyResult<BTreeMap<String, Py<PyDict>>> {
    let config = match config {
        Some(path) => RunConfig::load(&path).map_err(to_py_err)?,
        None => RunConfig::default(),
    };
    let paths = InputPaths {
        regions,
        production,
        emissions,
        profiles,
    };
    let run = pipeline::run_model(&paths, &config, 1).map_err(to_py_err)?;
    run.table
        .iter()
        .map(|r| {
            let dict = PyDict::new(py);
            dict.set_item("intensity", r.intensity)?;
            dict.set_item("emissions_kg", r.emissions_kg)?;
            dict.set_item("production_boe", r.oil_boe + r.gas_boe)?;
            dict.set_item("provenance", &r.provenance)?;
            Ok((r.region.clone(), dict.into()))
        })
        .collect()
}

#[pymodule]
fn methabench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<MethaneMass>()?;
    m.add_class::<ProductionVolume>()?;
    m.add_class::<MethaneIntensity>()?;
    m.add_function(wrap_pyfunction!(intensity, m)?)?;
    m.add_function(wrap_pyfunction!(convert_gas_volume, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(category_stats, m)?)?;
    m.add_function(wrap_pyfunction!(histogram, m)?)?;
    m.add_function(wrap_pyfunction!(run_model, m)?)?;
    m.add_function(wrap_pyfunction!(regional_intensities, m)?)?;
    Ok(())
}
