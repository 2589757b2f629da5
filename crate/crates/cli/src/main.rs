//! Command-line front end: validate -> model -> benchmark -> report.
//!
//! Exit codes: 0 success, 2 usage, 3 ingestion or configuration, 4
//! computation, 5 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use methabench::config::RunConfig;
use methabench::error::Error;
use methabench::ingest;
use methabench::pipeline::{self, InputPaths};
use methabench::report::ReportFormat;

const EXIT_USAGE: u8 = 2;
const EXIT_INGESTION: u8 = 3;
const EXIT_COMPUTATION: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "methabench",
    about = "Model upstream oil & gas methane intensities and benchmark them against company reporting",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Declarative run configuration (TOML). Flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Standard cubic feet per boe for gas conversion.
    #[arg(long)]
    gas_boe_factor: Option<f64>,
    /// Most recent annual values considered by the trend fit.
    #[arg(long)]
    trend_window: Option<usize>,
    /// Manual outlier list (comma-separated company names).
    #[arg(long, value_delimiter = ',')]
    outliers: Option<Vec<String>>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(factor) = self.gas_boe_factor {
            config.units.gas_boe_factor_scf = factor;
        }
        if let Some(window) = self.trend_window {
            config.estimator.trend_window = window;
        }
        if let Some(outliers) = &self.outliers {
            // An empty flag value clears the configured list.
            config.outliers.manual = outliers.iter().filter(|s| !s.is_empty()).cloned().collect();
            if config.outliers.policy == methabench::config::OutlierPolicyKind::None
                && !config.outliers.manual.is_empty()
            {
                config.outliers.policy = methabench::config::OutlierPolicyKind::Manual;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check input files against their schemas and the region registry.
    Validate {
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        production: Option<PathBuf>,
        #[arg(long)]
        emissions: Option<PathBuf>,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        reported: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the model pipeline and write run artifacts.
    Model {
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        production: PathBuf,
        #[arg(long)]
        emissions: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        /// Output directory for run artifacts (must not already hold files).
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for company modelling (0 = automatic).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Benchmark a model run against company-reported metrics.
    Benchmark {
        /// Run directory produced by `model`.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        reported: PathBuf,
        /// Output directory; defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render report files from a run directory.
    Report {
        /// Run directory produced by `model` (and optionally `benchmark`).
        #[arg(long)]
        run: PathBuf,
        /// Output directory; defaults to `<run>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// text, csv, json, svg or all.
        #[arg(long, default_value = "all")]
        format: String,
    },
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. } | Error::Config(_) => EXIT_INGESTION,
        Error::Domain(_) => EXIT_COMPUTATION,
        Error::Io { .. } => EXIT_IO,
    }
}

fn fail(error: &Error) -> ExitCode {
    eprintln!("error: {error}");
    ExitCode::from(exit_code_for(error))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate {
            regions,
            production,
            emissions,
            profiles,
            reported,
            config,
        } => {
            let config = match config.load() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let outcomes = pipeline::validate_inputs(
                &regions,
                production.as_deref(),
                emissions.as_deref(),
                profiles.as_deref(),
                reported.as_deref(),
                &config,
            );
            let mut failed = false;
            let mut first_error = None;
            for (file, outcome) in outcomes {
                match outcome {
                    Ok(rows) => println!("{file}: OK ({rows} rows)"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        failed = true;
                        first_error.get_or_insert(exit_code_for(&e));
                    }
                }
            }
            if failed {
                ExitCode::from(first_error.unwrap_or(EXIT_INGESTION))
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Model {
            regions,
            production,
            emissions,
            profiles,
            out,
            threads,
            config,
        } => {
            let config = match config.load() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let paths = InputPaths {
                regions,
                production,
                emissions,
                profiles,
            };
            let run = match pipeline::run_model(&paths, &config, threads) {
                Ok(run) => run,
                Err(e) => return fail(&e),
            };
            if let Err(e) = pipeline::write_model_run(&run, &out) {
                return fail(&e);
            }
            println!(
                "model run complete: {} covered regions, {} companies -> {}",
                run.table.len(),
                run.companies.len(),
                out.display()
            );
            ExitCode::SUCCESS
        }
        Command::Benchmark {
            run,
            reported,
            out,
            config,
        } => {
            let config_args = config;
            let run_dir = run;
            let run = match pipeline::read_model_run(&run_dir) {
                Ok(run) => run,
                Err(e) => return fail(&e),
            };
            // The run's recorded config is the baseline; flags still win.
            let config = match merged_run_config(&run.config, &config_args) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let reported = match ingest::parse_reported(&reported) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let bench = match pipeline::run_benchmark(&run, &reported, &config) {
                Ok(b) => b,
                Err(e) => return fail(&e),
            };
            let out = out.unwrap_or_else(|| run_dir.clone());
            if let Err(e) = pipeline::write_benchmark(&bench, &out) {
                return fail(&e);
            }
            let with_ratio = bench.results.iter().filter(|r| r.ratio.is_some()).count();
            println!(
                "benchmark complete: {} companies, {} with ratios -> {}",
                bench.results.len(),
                with_ratio,
                out.display()
            );
            ExitCode::SUCCESS
        }
        Command::Report { run, out, format } => {
            let formats = match ReportFormat::parse(&format) {
                Some(f) => f,
                None => {
                    eprintln!(
                        "error: unknown report format '{format}' (expected text, csv, json, svg or all)"
                    );
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let run_dir = run;
            let run = match pipeline::read_model_run(&run_dir) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let bench = match pipeline::read_benchmark(&run_dir) {
                Ok(b) => b,
                Err(e) => return fail(&e),
            };
            let files = match methabench::report::render_report(&run, bench.as_ref(), &formats) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let out = out.unwrap_or_else(|| run_dir.join("report"));
            if let Err(e) = write_report_files(&out, &files) {
                return fail(&e);
            }
            println!(
                "report complete: {} files -> {}",
                files.len(),
                out.display()
            );
            ExitCode::SUCCESS
        }
    }
}

fn merged_run_config(base: &RunConfig, args: &ConfigArgs) -> Result<RunConfig, Error> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => base.clone(),
    };
    if let Some(factor) = args.gas_boe_factor {
        config.units.gas_boe_factor_scf = factor;
    }
    if let Some(window) = args.trend_window {
        config.estimator.trend_window = window;
    }
    if let Some(outliers) = &args.outliers {
        config.outliers.manual = outliers.iter().filter(|s| !s.is_empty()).cloned().collect();
        if config.outliers.policy == methabench::config::OutlierPolicyKind::None
            && !config.outliers.manual.is_empty()
        {
            config.outliers.policy = methabench::config::OutlierPolicyKind::Manual;
        }
    }
    config.validate()?;
    Ok(config)
}

fn write_report_files(dir: &Path, files: &[(String, String)]) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}
