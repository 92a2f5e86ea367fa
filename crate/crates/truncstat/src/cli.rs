//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use truncstat_core::estimator::lynden_bell;
use truncstat_core::inference::{confidence_interval_for, EstimatorKind};
use truncstat_core::model::{draw_observed_sample, make_model, ModelSpec};
use truncstat_core::represent::representation_terms;
use truncstat_core::ScoreFunction;

use crate::csv_input::{parse_csv, parse_phi};
use crate::error::{ConfigError, Error};
use crate::report::{
    to_json, EstimateReport, Holes, IntegralEntry, IntegrateReport, RepresentReport,
};
use crate::study::{coverage_study, mse_study, remainder_decay_study, Execution};

#[derive(Debug, Parser)]
#[command(
    name = "truncstat",
    version,
    about = "Estimation and inference for left-truncated data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Estimate,
    Integrate,
    Simulate,
    Coverage,
    Represent,
    Holes,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lynden-Bell weights, cdf, cumulative hazard and holes of a data file
    Estimate(Opts),
    /// ∫φ dF_n with plug-in variance and confidence interval
    Integrate(Opts),
    /// Monte Carlo MSE of both estimators (CSV)
    Simulate(Opts),
    /// Monte Carlo coverage of the plug-in interval (CSV)
    Coverage(Opts),
    /// Representation terms for a sample, or remainder decay over --n (CSV)
    Represent(Opts),
    /// Empty inner risk sets only
    Holes(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorSelect {
    LyndenBell,
    Modified,
    Both,
}

impl EstimatorSelect {
    fn kinds(self) -> &'static [EstimatorKind] {
        match self {
            EstimatorSelect::LyndenBell => &[EstimatorKind::LyndenBell],
            EstimatorSelect::Modified => &[EstimatorKind::Modified],
            EstimatorSelect::Both => &[EstimatorKind::LyndenBell, EstimatorKind::Modified],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// CSV file with header `x,y`
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report destination (stdout if absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// identity | indicator:<t> | power:<k> | constant:<c> | table:<path>
    #[arg(long, default_value = "identity")]
    pub phi: String,
    /// exp-exp[:λ,μ] | uniform-uniform[:a,b,c,d] | no-truncation[:exp:λ | :uniform:a,b]
    #[arg(long)]
    pub model: Option<String>,
    /// Sample sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub reps: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = EstimatorSelect::Both)]
    pub estimator: EstimatorSelect,
}

/// Fully validated run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub phi_spec: String,
    pub phi: ScoreFunction,
    pub model: Option<ModelSpec>,
    pub n: Vec<usize>,
    pub reps: u32,
    pub seed: u64,
    pub level: f64,
    pub estimator: EstimatorSelect,
    pub exec: Execution,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, Error> {
        let (command, o) = match cli.command {
            Command::Estimate(o) => (CommandKind::Estimate, o),
            Command::Integrate(o) => (CommandKind::Integrate, o),
            Command::Simulate(o) => (CommandKind::Simulate, o),
            Command::Coverage(o) => (CommandKind::Coverage, o),
            Command::Represent(o) => (CommandKind::Represent, o),
            Command::Holes(o) => (CommandKind::Holes, o),
        };
        let phi = parse_phi(&o.phi)?;
        let model = o
            .model
            .as_deref()
            .map(|m| m.parse::<ModelSpec>())
            .transpose()?;
        if let Some(spec) = model {
            make_model(spec)?;
        }
        if !(o.level > 0.0 && o.level < 1.0) {
            return Err(ConfigError::InvalidArgument(format!(
                "--level {} outside (0, 1)",
                o.level
            ))
            .into());
        }
        if o.n.contains(&0) {
            return Err(
                ConfigError::InvalidArgument("--n values must be at least 1".into()).into(),
            );
        }
        if o.reps == Some(0) {
            return Err(ConfigError::InvalidArgument("--reps must be at least 1".into()).into());
        }

        let needs_input = matches!(
            command,
            CommandKind::Estimate | CommandKind::Integrate | CommandKind::Holes
        );
        if needs_input && o.input.is_none() {
            return Err(ConfigError::MissingArgument("--input is required").into());
        }
        let needs_model = matches!(
            command,
            CommandKind::Simulate | CommandKind::Coverage | CommandKind::Represent
        );
        if needs_model && model.is_none() {
            return Err(ConfigError::MissingArgument("--model is required").into());
        }

        let (default_n, default_reps): (&[usize], u32) = match command {
            CommandKind::Simulate => (&[10, 20, 30, 40, 50, 60, 70, 80, 90, 100], 10_000),
            CommandKind::Coverage => (&[500], 2000),
            CommandKind::Represent => (&[100, 400, 1600], 500),
            _ => (&[], 1),
        };
        Ok(RunConfig {
            command,
            input: o.input,
            output: o.output,
            phi_spec: o.phi,
            phi,
            model,
            n: if o.n.is_empty() {
                default_n.to_vec()
            } else {
                o.n
            },
            reps: o.reps.unwrap_or(default_reps),
            seed: o.seed,
            level: o.level,
            estimator: o.estimator,
            exec: Execution::from_env(),
        })
    }
}

/// Runs the configured subcommand and returns the report text.
pub fn execute(cfg: &RunConfig) -> Result<String, Error> {
    let model = cfg.model.map(make_model).transpose()?;
    let sample = match &cfg.input {
        Some(path) => Some(parse_csv(path)?.sorted()),
        None => None,
    };
    match cfg.command {
        CommandKind::Estimate => {
            let sample = sample.expect("validated");
            let report = EstimateReport::new(&sample);
            for w in &report.warnings {
                log::warn!("{w}");
            }
            Ok(to_json(&report))
        }
        CommandKind::Holes => {
            let sample = sample.expect("validated");
            Ok(to_json(&Holes::from(lynden_bell(&sample).holes())))
        }
        CommandKind::Integrate => {
            let sample = sample.expect("validated");
            let results = cfg
                .estimator
                .kinds()
                .iter()
                .map(|&kind| {
                    let r = confidence_interval_for(&sample, &cfg.phi, cfg.level, kind)?;
                    Ok(IntegralEntry {
                        estimator: kind.name().to_string(),
                        estimate: r.estimate,
                        sigma2: r.sigma2,
                        ci_lower: r.ci.0,
                        ci_upper: r.ci.1,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(to_json(&IntegrateReport {
                phi: cfg.phi.to_string(),
                n: sample.n(),
                level: cfg.level,
                results,
            }))
        }
        CommandKind::Simulate => {
            let model = model.expect("validated");
            let report = mse_study(&model, &cfg.phi, &cfg.n, cfg.reps, cfg.seed, cfg.exec)?;
            let kinds = cfg.estimator.kinds();
            let cells = report
                .cells
                .into_iter()
                .filter(|c| kinds.iter().any(|k| k.name() == c.estimator))
                .collect();
            Ok(crate::study::StudyReport { cells }.to_csv())
        }
        CommandKind::Coverage => {
            let model = model.expect("validated");
            let kind = match cfg.estimator {
                EstimatorSelect::Modified => EstimatorKind::Modified,
                _ => EstimatorKind::LyndenBell,
            };
            let report = coverage_study(
                &model, &cfg.phi, &cfg.n, cfg.reps, cfg.level, kind, cfg.seed, cfg.exec,
            )?;
            Ok(report.to_csv())
        }
        CommandKind::Represent => {
            let model = model.expect("validated");
            match sample {
                Some(sample) => {
                    let terms = representation_terms(&sample, &model, &cfg.phi)?;
                    Ok(to_json(&RepresentReport::new(
                        model.spec().to_string(),
                        cfg.phi.to_string(),
                        &terms,
                    )))
                }
                None if cfg.n.len() == 1 && cfg.reps == 1 => {
                    let sample = draw_observed_sample(&model, cfg.n[0], cfg.seed)?.sorted();
                    let terms = representation_terms(&sample, &model, &cfg.phi)?;
                    Ok(to_json(&RepresentReport::new(
                        model.spec().to_string(),
                        cfg.phi.to_string(),
                        &terms,
                    )))
                }
                None => Ok(remainder_decay_study(
                    &model, &cfg.phi, &cfg.n, cfg.reps, cfg.seed, cfg.exec,
                )?
                .to_csv()),
            }
        }
    }
}

fn write_report(cfg: &RunConfig, text: &str) -> Result<(), Error> {
    let out = |e: std::io::Error| Error::Output(e.to_string());
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(out),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(out),
    }
}

/// Parses arguments, runs, and writes the report. Returns the process exit
/// code; failures print one `error[module.Code]: message` line to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("bad arguments")
                .trim_start_matches("error: ");
            let err = Error::from(ConfigError::Usage(first.to_string()));
            eprintln!("{}", err.line());
            return 2;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let text = execute(&cfg)?;
        write_report(&cfg, &text)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            1
        }
    }
}
