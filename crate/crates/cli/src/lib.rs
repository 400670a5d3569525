//! The `xpaudit` command line. Every command reads one model file and writes
//! one report, rendered by the same library functions a caller would use.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;
use xpaudit_core::adversarial::adversarial_report;
use xpaudit_core::explain::{relevancy_report, Engine};
use xpaudit_core::families::{certify, solve_family, FamilyId, Strategy};
use xpaudit_core::model::{order_from_one_based, read_model, render_model, Model};
use xpaudit_core::rational::{fraction, RationalJson};
use xpaudit_core::report::to_json_text;
use xpaudit_core::scan::{
    build_omdd_from_dataset, load_consistent_dataset, records_to_csv, scan_model, Completion,
    ScanOptions, Selection,
};
use xpaudit_core::shapley::{shapley_values, validate_efficiency};
use xpaudit_core::{Backend, Error, ExplanationProblem, FeatureSpace, Limits, Point};

#[derive(Debug, Parser)]
#[command(name = "xpaudit", version, about = "Exact Shapley values, formal explanations and adversarial sets for discrete classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Largest number of points any enumeration may visit.
    #[arg(long, global = true, default_value_t = Limits::default().max_points)]
    pub max_points: u64,

    /// Largest number of features for subset and coalition enumeration.
    #[arg(long, global = true, default_value_t = Limits::default().max_features)]
    pub max_features: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Abductive and contrastive explanations with feature relevancy.
    Explain(ExplainArgs),
    /// Exact Shapley values with the efficiency residual.
    Shapley(ShapleyArgs),
    /// Subset-minimal adversarial change-sets and the minimum l0 distance.
    Adversarial(InstanceArgs),
    /// Issue scan over all or a sample of the points of the feature space.
    Scan(ScanArgs),
    /// Instantiate a parameterized family with a certificate.
    Synth(SynthArgs),
    /// Check a model file, or the efficiency identity at an instance.
    Validate(ValidateArgs),
    /// Build a decision diagram from a CSV dataset.
    BuildOmdd(BuildArgs),
    /// Convert a model file to another representation.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Comma-separated feature values, e.g. 1,0,0.
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Brute,
    Duality,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    #[arg(long, value_enum, default_value = "duality")]
    pub engine: EngineArg,
    /// Print each AXp as an IF-THEN rule instead of the JSON report.
    #[arg(long)]
    pub rules: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    /// Enumerate the points of each cube.
    Brute,
    /// Count paths of the tree or decision diagram.
    Paths,
}

impl From<MethodArg> for Backend {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => Backend::Enumerate,
            MethodArg::Paths => Backend::Paths,
        }
    }
}

#[derive(Debug, Args)]
pub struct ShapleyArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    #[arg(long, value_enum, default_value = "brute")]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Analyse every point (the default).
    #[arg(long, conflicts_with = "sample")]
    pub all: bool,
    /// Analyse N distinct points drawn with --seed.
    #[arg(long, value_name = "N")]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0, requires = "sample")]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "brute")]
    pub method: MethodArg,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV of per-instance records.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON (default: the diagnostic stream).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: FamilyId,
    /// Use the published parameters (the default).
    #[arg(long, conflicts_with = "solve")]
    pub paper: bool,
    /// Search for parameters instead.
    #[arg(long)]
    pub solve: bool,
    /// Multiply the published parameters by this factor.
    #[arg(long, default_value_t = 1, conflicts_with = "solve")]
    pub scale: i64,
    /// Candidates examined before giving up.
    #[arg(long, default_value_t = 1_000_000, requires = "solve")]
    pub budget: u64,
    /// Largest σ value tried.
    #[arg(long, default_value_t = 12, requires = "solve")]
    pub max: i64,
    /// Draw candidates at random from this seed instead of in grid order.
    #[arg(long, requires = "solve")]
    pub seed: Option<u64>,
    /// Model file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Certificate JSON (default: the diagnostic stream).
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instance: Option<String>,
    #[arg(long, value_enum, default_value = "brute")]
    pub method: MethodArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// CSV with a header row and the integer class in the last column.
    #[arg(long)]
    pub data: PathBuf,
    /// Class for points without a row: `majority` or an integer.
    #[arg(long, default_value = "majority")]
    pub default: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Table,
    Omdd,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub to: TargetArg,
    /// Variable order for a diagram, 1-based (default: 1,2,...,m).
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<FamilyId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Why a command failed, mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Malformed invocation or instance: exit 2.
    Usage(String),
    /// Anything the library rejects: exit 1.
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// Parses `1,0,0` into a point of `space`.
pub fn parse_instance(text: &str, space: &FeatureSpace) -> Result<Point, Failure> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Failure::Usage(format!("instance value {t:?} is not a non-negative integer")))
        })
        .collect::<Result<Vec<u32>, _>>()?;
    space
        .point(values)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn load_model(path: &Path, limits: &Limits) -> Result<Model, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("cannot read model {}: {e}", path.display())))?;
    read_model(&text, limits).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_side(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(_) => emit(out, text),
        None => {
            std::io::stderr().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let limits = Limits {
        max_points: cli.max_points,
        max_features: cli.max_features,
    };
    match cli.command {
        Command::Explain(a) => {
            let model = load_model(&a.common.model, &limits)?;
            let v = parse_instance(&a.common.instance, model.space())?;
            let p = ExplanationProblem::new(&model, v)?.with_limits(limits);
            let engine = match a.engine {
                EngineArg::Brute => Engine::BruteForce,
                EngineArg::Duality => Engine::Duality,
            };
            let report = relevancy_report(&p, engine)?;
            let text = if a.rules {
                let mut lines = String::new();
                for x in &report.axps {
                    lines.push_str(&xpaudit_core::explain::axp_rule(&p, *x)?);
                    lines.push('\n');
                }
                lines
            } else {
                report.to_json()
            };
            emit(a.common.out.as_deref(), &text)
        }
        Command::Shapley(a) => {
            let model = load_model(&a.common.model, &limits)?;
            let v = parse_instance(&a.common.instance, model.space())?;
            let p = ExplanationProblem::new(&model, v)?.with_limits(limits);
            let report = shapley_values(&p, a.method.into())?;
            emit(a.common.out.as_deref(), &report.to_json())
        }
        Command::Adversarial(a) => {
            let model = load_model(&a.model, &limits)?;
            let v = parse_instance(&a.instance, model.space())?;
            let p = ExplanationProblem::new(&model, v)?.with_limits(limits);
            emit(a.out.as_deref(), &adversarial_report(&p)?)
        }
        Command::Scan(a) => {
            let model = load_model(&a.model, &limits)?;
            let selection = match a.sample {
                Some(n) => Selection::Sample { n, seed: a.seed },
                None => Selection::All,
            };
            let options = ScanOptions {
                backend: a.method.into(),
                engine: Engine::Duality,
            };
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(jobs) = a.jobs {
                if jobs == 0 {
                    return Err(Failure::Usage("--jobs must be at least 1".into()));
                }
                pool = pool.num_threads(jobs);
            }
            let pool = pool
                .build()
                .map_err(|e| Failure::Domain(format!("cannot start workers: {e}")))?;
            let (records, summary) =
                pool.install(|| scan_model(&model, selection, options, &limits))?;
            emit(a.out.as_deref(), &records_to_csv(&records, model.space().m())?)?;
            emit_side(a.summary.as_deref(), &summary.to_json())
        }
        Command::Synth(a) => {
            let strategy = if a.solve {
                match a.seed {
                    Some(seed) => Strategy::Random {
                        seed,
                        max: a.max,
                        budget: a.budget,
                    },
                    None => Strategy::Grid {
                        max: a.max,
                        budget: a.budget,
                    },
                }
            } else {
                Strategy::Published { scale: a.scale }
            };
            let spec = solve_family(a.family, strategy)?;
            let (model, _, cert) = certify(&spec, &limits)?;
            emit(a.out.as_deref(), &render_model(&model))?;
            emit_side(a.cert.as_deref(), &cert.to_json())
        }
        Command::Validate(a) => {
            let model = load_model(&a.model, &limits)?;
            let text = match &a.instance {
                None => to_json_text(&json!({
                    "type": model.kind(),
                    "features": model.space().m(),
                    "points": model.space().total_points(),
                    "classes": model.classes(),
                    "valid": true,
                })),
                Some(instance) => {
                    let v = parse_instance(instance, model.space())?;
                    let p = ExplanationProblem::new(&model, v)?.with_limits(limits);
                    let report = shapley_values(&p, a.method.into())?;
                    let residual = validate_efficiency(&p, &report)?;
                    let total: BigRational = report.sv.iter().sum();
                    let valid = residual == BigRational::from_integer(0.into());
                    let text = to_json_text(&json!({
                        "sum_sv": RationalJson::from(&total),
                        "phi_empty": RationalJson::from(&report.phi_empty),
                        "predicted": report.predicted,
                        "residual": fraction(&residual),
                        "valid": valid,
                    }));
                    if !valid {
                        emit(a.out.as_deref(), &text)?;
                        return Err(Failure::Domain(format!(
                            "efficiency identity violated: residual {}",
                            fraction(&residual)
                        )));
                    }
                    text
                }
            };
            emit(a.out.as_deref(), &text)
        }
        Command::BuildOmdd(a) => {
            let file = fs::File::open(&a.data)
                .map_err(|e| Failure::Domain(format!("cannot read {}: {e}", a.data.display())))?;
            let data = load_consistent_dataset(file)?;
            let completion = match a.default.as_str() {
                "majority" => Completion::Majority,
                other => Completion::Class(other.parse().map_err(|_| {
                    Failure::Usage(format!("--default expects `majority` or an integer, got {other:?}"))
                })?),
            };
            let dd = build_omdd_from_dataset(&data, completion)?;
            eprintln!(
                "kept {} rows, dropped {} contradicting rows",
                data.rows.len(),
                data.dropped
            );
            emit(a.out.as_deref(), &render_model(&Model::Omdd(dd)))
        }
        Command::Convert(a) => {
            let model = load_model(&a.model, &limits)?;
            let converted = match a.to {
                TargetArg::Table => Model::Table(model.to_tabular(&limits)?),
                TargetArg::Omdd => {
                    let order = match &a.order {
                        Some(o) => order_from_one_based(model.space(), o)
                            .map_err(|e| Failure::Usage(e.to_string()))?,
                        None => (0..model.space().m()).collect(),
                    };
                    Model::Omdd(model.to_omdd(order, &limits)?)
                }
            };
            emit(a.out.as_deref(), &render_model(&converted))
        }
    }
}
