//! Command-line verbs: `simulate`, `optimize`, `scan` and `validate`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{self, ExperimentConfig};
use crate::error::{Error, Result};
use crate::optimizer::{best_point, grid_scan, refine};
use crate::output::{self, Artifacts, Manifest, Optimum, SchemeRecord, Summary};
use crate::parallel;
use crate::validate;

#[derive(Debug, Parser)]
#[command(name = "biexciton", version, about = "Two-pulse biexciton preparation in a quantum dot")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Propagate the configured scheme and summarize it.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write the Hamiltonian at this time (fs) to hamiltonian.json.
        #[arg(long, value_name = "T_FS")]
        dump_matrix_at: Option<f64>,
    },
    /// Grid scan of the search box followed by simplex refinement.
    Optimize {
        #[command(flatten)]
        common: Common,
    },
    /// Grid scan of the search box only.
    Scan {
        #[command(flatten)]
        common: Common,
    },
    /// Run the oracle checks and print a pass/fail table.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// JSON config file; omitted means all defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, replaces output.directory from the config.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Dotted config path assignments, applied in order.
    #[arg(long = "override", value_name = "KEY=VALUE", num_args = 1.., action = clap::ArgAction::Append)]
    pub overrides: Vec<String>,
    /// Worker threads for batch evaluations.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Simulate { .. } => "simulate",
            Verb::Optimize { .. } => "optimize",
            Verb::Scan { .. } => "scan",
            Verb::Validate { .. } => "validate",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Verb::Simulate { common, .. }
            | Verb::Optimize { common }
            | Verb::Scan { common }
            | Verb::Validate { common } => common,
        }
    }
}

/// Loads the config named by `common`, or the defaults.
pub fn load(common: &Common) -> Result<config::Loaded> {
    match &common.config {
        Some(path) => config::load_with_overrides(path, &common.overrides),
        None => config::resolve(json!({}), &common.overrides),
    }
}

/// Machine-readable error object for stderr.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({"code": e.code(), "message": e.to_string()});
    if let Some(f) = e.field() {
        v["field"] = json!(f);
    }
    v
}

/// Runs one verb and writes its files. Progress goes to stdout.
pub fn run(verb: &Verb) -> Result<Manifest> {
    let common = verb.common();
    if common.threads == Some(0) {
        return Err(Error::InvalidArgument("--threads must be at least 1".into()));
    }
    let loaded = load(common)?;
    let config = loaded.config;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.directory));
    parallel::with_threads(common.threads, || match verb {
        Verb::Simulate { dump_matrix_at, .. } => simulate(&config, &dir, *dump_matrix_at),
        Verb::Optimize { .. } => optimize(&config, &dir, true),
        Verb::Scan { .. } => optimize(&config, &dir, false),
        Verb::Validate { .. } => validate(&config, &dir),
    })
}

fn simulate(config: &ExperimentConfig, dir: &Path, dump_at: Option<f64>) -> Result<Manifest> {
    let setup = config.setup()?;
    let scheme = config.pulse_scheme();
    let (traj, report) = setup.run(scheme)?;
    println!(
        "{} scheme: P({}) = {:.6}, ground {:.6}, residual {:.6}, dwell {:.1} fs, bad photons {:.6}",
        config.scheme,
        setup.basis.label(setup.basis.target()),
        report.p_biexciton_target,
        report.p_ground,
        report.p_residual,
        report.dwell_fs,
        report.bad_photon_estimate
    );
    let matrix = match dump_at {
        Some(t) => Some(setup.model(scheme)?.dump(t)),
        None => None,
    };
    let artifacts = Artifacts {
        trajectory: Some((&traj, &setup.basis)),
        summary: Some(Summary { verb: "simulate".into(), scheme: SchemeRecord::new(&scheme, &config.dot), report }),
        matrix,
        ..Default::default()
    };
    finish(dir, "simulate", config, &artifacts)
}

fn optimize(config: &ExperimentConfig, dir: &Path, with_refine: bool) -> Result<Manifest> {
    let setup = config.setup()?;
    let space = config.search_space();
    let objective = config.objective();
    let verb = if with_refine { "optimize" } else { "scan" };
    let points = grid_scan(&space, &config.resolution(), &setup, &objective, config.optimize.grid_cap)?;
    let seed = best_point(&points).ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    println!(
        "{} scan: {} points, best objective {:.6} with P(target) = {:.6}",
        config.scheme,
        points.len(),
        seed.report.objective,
        seed.report.p_biexciton_target
    );
    if !with_refine {
        let artifacts = Artifacts {
            landscape: Some((&space, &points)),
            summary: Some(Summary {
                verb: verb.into(),
                scheme: SchemeRecord::new(&seed.scheme, &config.dot),
                report: seed.report.clone(),
            }),
            ..Default::default()
        };
        return finish(dir, verb, config, &artifacts);
    }

    let result = refine(&seed.scheme, &space, &setup, &objective, config.simplex_options())?;
    let r = &result.best_report;
    println!(
        "{} optimum after {} evaluations{}: P(target) = {:.6}, ground {:.6}, residual {:.6}, dwell {:.1} fs, bad photons {:.6}",
        config.scheme,
        result.evaluations,
        if result.converged { "" } else { " (budget exhausted)" },
        r.p_biexciton_target,
        r.p_ground,
        r.p_residual,
        r.dwell_fs,
        r.bad_photon_estimate
    );
    let (traj, _) = setup.run(result.best_params)?;
    let artifacts = Artifacts {
        trajectory: Some((&traj, &setup.basis)),
        landscape: Some((&space, &points)),
        summary: Some(Summary {
            verb: verb.into(),
            scheme: SchemeRecord::new(&result.best_params, &config.dot),
            report: r.clone(),
        }),
        optimum: Some(Optimum::new(&result, &space, points.len(), &config.dot)),
        ..Default::default()
    };
    finish(dir, verb, config, &artifacts)
}

fn validate(config: &ExperimentConfig, dir: &Path) -> Result<Manifest> {
    let checks = validate::run(config);
    print!("{}", validate::table(&checks));
    let failed = checks.iter().filter(|c| !c.passed).count();
    let total = checks.len();
    let manifest = finish(dir, "validate", config, &Artifacts { validation: Some(checks), ..Default::default() })?;
    if failed > 0 {
        return Err(Error::ValidationFailed { failed, total });
    }
    Ok(manifest)
}

fn finish(dir: &Path, verb: &str, config: &ExperimentConfig, artifacts: &Artifacts) -> Result<Manifest> {
    let manifest = output::write_outputs(dir, verb, config, artifacts)?;
    println!("wrote {} files to {}", manifest.files.len() + 1, dir.display());
    Ok(manifest)
}
