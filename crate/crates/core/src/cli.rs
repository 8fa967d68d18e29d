//! Command-line front end: `fit`, `generate`, `eval`, `compare`, `plot-data`.
//!
//! Exit codes: 0 success, 1 usage, 2 input or parse failure, 3 internal error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::community::{louvain, LouvainConfig};
use crate::error::Error;
use crate::harness::{
    emit_plot_data, plot_data_csv, run_experiment, ExperimentSpec, FittedModel, ModelKind, SeedReference,
};
use crate::io::{read_graph_file, read_partition, to_json, write_edge_list, GraphFormat, LabelMap, LoadedGraph};
use crate::metrics::{ccpd, degree_distribution, modularity, rmse_ccpd, rmse_degree};
use crate::models::bter::{bter_build_groups, bter_fit, BterParams};
use crate::models::egbter::{egbter_build_plan, egbter_fit, EgbterParams, EgbterPlan, EgbterSampler};
use crate::models::gbter::{gbter_fit, FitMode, GbterParams};
use crate::partition::Partition;
use crate::sampling::{derive_seed, RngStream};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bterkit",
    version,
    about = "Fit, generate and score BTER-family random graph models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to a graph and write its parameters as JSON.
    Fit(FitArgs),
    /// Generate edge lists from a parameters file.
    Generate(GenerateArgs),
    /// Score sample graphs against a seed graph.
    Eval(EvalArgs),
    /// Fit several models, run replicate sweeps and write a comparison report.
    Compare(CompareArgs),
    /// Degree and CCPD series of a seed graph and a simulated graph as CSV.
    PlotData(PlotDataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Bter,
    Gbter,
    Egbter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Density,
    Cc,
}

impl From<ModeArg> for FitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Density => FitMode::Density,
            ModeArg::Cc => FitMode::Cc,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub model: FitModel,
    /// GBTER community probability: within-community density or cube-rooted CC.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: GraphFormat,
    /// Two-column `label community` file; Louvain is used when absent.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Louvain seed for community models.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output path; replicate `r` is written to `<stem>_<r>.<ext>`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, required = true, num_args = 1..)]
    pub sample: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: GraphFormat,
    /// Seed for the Louvain runs on the samples.
    #[arg(long)]
    pub seed: u64,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: GraphFormat,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "bter,gbter,gbter-cc,egbter"
    )]
    pub models: Vec<ModelKind>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix; writes `<out>.json` and `<out>.txt`.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for replicates.
    #[arg(long, env = "BTERKIT_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotDataArgs {
    #[arg(long = "seed-graph")]
    pub seed_graph: PathBuf,
    #[arg(long)]
    pub sim: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: GraphFormat,
    #[arg(long)]
    pub out: PathBuf,
}

/// Fitted parameters as written by `fit` and read by `generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub labels: LabelMap,
    /// Louvain seed used to find communities, when Louvain was run.
    pub louvain_seed: Option<u64>,
    #[serde(flatten)]
    pub model: ModelParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Bter {
        params: BterParams<f64>,
    },
    Gbter {
        params: GbterParams<f64>,
    },
    Egbter {
        params: EgbterParams<f64>,
        plan: EgbterPlan<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub sample: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub rmse_degree: f64,
    pub rmse_ccpd: f64,
    pub modularity: Option<f64>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::UnsupportedFormat(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Empty(_)
            | Error::InconsistentParams(_)
            | Error::InvalidParameter(_)
            | Error::MissingNode(_)
            | Error::NoEdges(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_input(path: &Path, format: GraphFormat) -> CliResult<LoadedGraph> {
    let loaded = read_graph_file(path, format).map_err(|e| CliError {
        message: format!("{}: {e}", path.display()),
        ..CliError::from(e)
    })?;
    if loaded.self_loops_dropped > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop(s)",
            path.display(),
            loaded.self_loops_dropped
        );
    }
    Ok(loaded)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn community_partition(args: &FitArgs, loaded: &LoadedGraph) -> CliResult<(Partition, Option<u64>)> {
    if let Some(path) = &args.partition {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        return Ok((read_partition(&text, &loaded.labels)?, None));
    }
    if loaded.graph.edge_count() == 0 {
        // Louvain is undefined without edges
        return Ok((Partition::singletons(loaded.graph.node_count()), None));
    }
    let partition = louvain(&loaded.graph, &LouvainConfig::with_seed(args.seed))?;
    Ok((partition, Some(args.seed)))
}

fn cmd_fit(args: &FitArgs) -> CliResult<()> {
    let mode = match (args.model, args.mode) {
        (FitModel::Gbter, None) => return Err(CliError::usage("--mode is required for --model gbter")),
        (FitModel::Gbter, Some(mode)) => Some(FitMode::from(mode)),
        (_, Some(_)) => return Err(CliError::usage("--mode only applies to --model gbter")),
        (_, None) => None,
    };
    let loaded = read_input(&args.input, args.format)?;
    let g = &loaded.graph;
    let (model, louvain_seed) = match args.model {
        FitModel::Bter => (ModelParams::Bter { params: bter_fit(g) }, None),
        FitModel::Gbter => {
            let (partition, seed) = community_partition(args, &loaded)?;
            let params = gbter_fit(g, &partition, mode.expect("checked above"))?;
            (ModelParams::Gbter { params }, seed)
        }
        FitModel::Egbter => {
            let (partition, seed) = community_partition(args, &loaded)?;
            let params = egbter_fit(g, &partition)?;
            let plan = egbter_build_plan(&params)?;
            (ModelParams::Egbter { params, plan }, seed)
        }
    };
    let file = ParamsFile {
        labels: loaded.labels,
        louvain_seed,
        model,
    };
    write_file(&args.out, &to_json(&file)?)
}

/// `<stem>_<r>.<ext>` next to `out`.
pub fn replicate_path(out: &Path, replicate: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{replicate}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{replicate}"),
    };
    out.with_file_name(name)
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.params).map_err(|e| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", args.params.display()),
    })?;
    let file: ParamsFile = serde_json::from_str(&text).map_err(|e| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", args.params.display()),
    })?;
    let (node_count, generator) = match &file.model {
        ModelParams::Bter { params } => {
            params.validate()?;
            (
                params.expected_degrees.len(),
                FittedModel::Bter(bter_build_groups(params)),
            )
        }
        ModelParams::Gbter { params } => (params.node_count(), FittedModel::Gbter(params.clone())),
        ModelParams::Egbter { params, .. } => {
            // the stored plan is for auditing; regenerate it from the inputs
            let plan = egbter_build_plan(params)?;
            (
                params.node_count(),
                FittedModel::Egbter(Box::new(EgbterSampler::new(&plan)?)),
            )
        }
    };
    let labels = if file.labels.len() == node_count {
        file.labels.clone()
    } else if file.labels.is_empty() {
        LabelMap::identity(node_count)
    } else {
        return Err(CliError {
            code: EXIT_INPUT,
            message: format!("{} labels for {node_count} nodes", file.labels.len()),
        });
    };
    for r in 0..args.count {
        let mut rng = RngStream::new(derive_seed(args.seed, &[r as u64]));
        let g = generator.generate(&mut rng)?;
        write_file(&replicate_path(&args.out, r), &write_edge_list(&g, &labels))?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> CliResult<()> {
    let seed = read_input(&args.input, args.format)?;
    let reference = SeedReference::of(&seed.graph);
    let mut records = Vec::new();
    for (i, path) in args.sample.iter().enumerate() {
        let sample = read_input(path, args.format)?;
        let g = &sample.graph;
        let modularity = if g.edge_count() > 0 {
            let cfg = LouvainConfig::with_seed(derive_seed(args.seed, &[i as u64]));
            Some(modularity(g, &louvain(g, &cfg)?)?)
        } else {
            None
        };
        records.push(EvalRecord {
            sample: path.display().to_string(),
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            rmse_degree: rmse_degree(&reference.degrees, &degree_distribution(g)),
            rmse_ccpd: rmse_ccpd(&reference.ccpd, &ccpd(g)),
            modularity,
        });
    }
    let json = to_json(&records)?;
    match &args.out {
        Some(path) => write_file(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let loaded = read_input(&args.input, args.format)?;
    let name = args
        .input
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let spec = ExperimentSpec::new(name, args.models.clone(), args.reps, args.seed);
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        })?;
    let report = pool.install(|| run_experiment(&loaded.graph, &spec))?;
    write_file(&with_extension(&args.out, "json"), &to_json(&report)?)?;
    write_file(&with_extension(&args.out, "txt"), &report.to_table())?;
    if report.has_failures {
        eprintln!("warning: some models failed; see the report");
    }
    Ok(())
}

fn cmd_plot_data(args: &PlotDataArgs) -> CliResult<()> {
    let seed = read_input(&args.seed_graph, args.format)?;
    let sim = read_input(&args.sim, args.format)?;
    write_file(&args.out, &plot_data_csv(&emit_plot_data(&seed.graph, &sim.graph)))
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::PlotData(a) => cmd_plot_data(a),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
