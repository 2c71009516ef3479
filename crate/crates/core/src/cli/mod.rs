//! Command implementations behind the `mtgat` binary.
//!
//! Every command returns `Result<()>`; [`run`] maps errors to exit codes
//! (1 usage, 2 data, 3 numerical failure).

mod ablate;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use ablate::{
    ablation_csv, ablation_settings, modality_subsets, run_ablation, AblationFamily, AblationRow,
    AblationSetting,
};
pub use config::{modality_code, parse_modalities, ModelOverrides, RunConfig, TrainOverrides};

use crate::error::{Error, Result};
use crate::graph::GraphDump;
use crate::model::{attention_to_dot, forward, model_graph, param_count, AttentionExport};
use crate::seqdata::{gen_synthetic, load_dataset, save_dataset, Split, SyntheticSpec};
use crate::training::{evaluate, train, Checkpoint};

#[derive(Debug, Parser)]
#[command(name = "mtgat", version, about = "Multimodal temporal graph attention networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic ordering dataset.
    Gen(GenArgs),
    /// Dump the typed graph of one sample.
    InspectGraph(InspectArgs),
    /// Train a model; writes params.json, history.csv, metrics.json.
    Train(TrainArgs),
    /// Score a trained model on one split.
    Eval(EvalArgs),
    /// Print the parameter count per block.
    Params(ParamsArgs),
    /// Export per-edge attention of one sample.
    ExportAttn(ExportArgs),
    /// Train and score ablated variants, one CSV row per setting and seed.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// JSON file with a synthetic spec; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Dataset file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Feature dims as `audio,video,text`.
    #[arg(long, value_parser = parse_triple::<usize>)]
    pub dims: Option<[usize; 3]>,
    #[arg(long)]
    pub len_min: Option<usize>,
    #[arg(long)]
    pub len_max: Option<usize>,
    /// Split fractions as `train,val,test`.
    #[arg(long, value_parser = parse_triple::<f64>)]
    pub fractions: Option<[f64; 3]>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub sample_id: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Run config JSON; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelOverrides,
    #[command(flatten)]
    pub train: TrainOverrides,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// params.json written by `train`.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: Split,
    /// Also write the metrics to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Take input dims from this dataset.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Also write the breakdown as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input dims as `audio,video,text`.
    #[arg(long, value_parser = parse_triple::<usize>)]
    pub input_dims: Option<[usize; 3]>,
    #[command(flatten)]
    pub model: ModelOverrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Dot,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub sample_id: String,
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    pub format: ExportFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Seeds, comma separated; every setting is trained once per seed.
    #[arg(long = "seed", value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    /// Output directory; receives ablation.csv and config.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Families to sweep: edge_types, pruning, modalities.
    #[arg(long, value_delimiter = ',', default_value = "edge_types,pruning,modalities")]
    pub families: Vec<AblationFamily>,
    /// Restrict to these settings, e.g. `full27,untyped1` or `AV,T`.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<String>>,
    #[command(flatten)]
    pub model: ModelOverrides,
    #[command(flatten)]
    pub train: TrainOverrides,
}

/// Parses `a,b,c` into three values.
fn parse_triple<T: std::str::FromStr + Copy>(s: &str) -> std::result::Result<[T; 3], String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("bad value `{p}` in `{s}`")))
        .collect::<std::result::Result<Vec<T>, String>>()?;
    match parts[..] {
        [a, b, c] => Ok([a, b, c]),
        _ => Err(format!("expected three comma-separated values, got `{s}`")),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(Error::file(dir))?;
            }
            std::fs::write(path, text).map_err(Error::file(path))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
    let checkpoint: Checkpoint = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidDataset(format!("params file {}: {e}", path.display()))
    })?;
    checkpoint.validate()?;
    Ok(checkpoint)
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::file(path))?)
            .map_err(|e| Error::InvalidConfig(format!("spec {}: {e}", path.display())))?,
        None => SyntheticSpec::default(),
    };
    if let Some(n) = args.samples {
        spec.samples = n;
    }
    if let Some(d) = args.dims {
        spec.dims = d;
    }
    if let Some(v) = args.len_min {
        spec.len_min = v;
    }
    if let Some(v) = args.len_max {
        spec.len_max = v;
    }
    if let Some(f) = args.fractions {
        spec.fractions = f;
    }
    let dataset = gen_synthetic(&spec, args.seed)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(Error::file(dir))?;
    }
    save_dataset(&dataset, &args.out)?;
    log::info!("wrote {} samples to {}", dataset.len(), args.out.display());
    Ok(())
}

pub fn cmd_inspect_graph(args: &InspectArgs) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let sample = dataset.sample(&args.sample_id)?;
    let graph = crate::graph::build_graph(sample)?;
    write_output(args.out.as_deref(), &pretty(&GraphDump::from(&graph))?)
}

fn resolve_run_config(
    config: Option<&Path>,
    dataset: Option<&Path>,
    out: Option<&Path>,
    model: &ModelOverrides,
    train: &TrainOverrides,
) -> Result<RunConfig> {
    let mut rc = RunConfig::load_or_default(config)?;
    if let Some(d) = dataset {
        rc.dataset = Some(d.to_path_buf());
    }
    if let Some(o) = out {
        rc.out = Some(o.to_path_buf());
    }
    model.apply(&mut rc.model);
    train.apply(&mut rc.train);
    Ok(rc)
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let mut rc = resolve_run_config(
        args.config.as_deref(),
        args.dataset.as_deref(),
        args.out.as_deref(),
        &args.model,
        &args.train,
    )?;
    if let Some(seed) = args.seed {
        rc.train.seed = seed;
    }
    let out = rc.out_dir()?.to_path_buf();
    let dataset = load_dataset(rc.dataset_path()?)?;
    rc.fit_to(&dataset);
    rc.model.validate()?;
    rc.train.validate()?;

    let outcome = train(&dataset, &rc.model, &rc.train)?;
    let metrics = evaluate(&outcome.checkpoint, &dataset, Split::Val)?;
    write_output(Some(&out.join("config.json")), &rc.to_json()?)?;
    write_output(Some(&out.join("params.json")), &serde_json::to_string(&outcome.checkpoint)?)?;
    write_output(Some(&out.join("history.csv")), &outcome.history.to_csv_string()?)?;
    write_output(Some(&out.join("metrics.json")), &pretty(&metrics)?)?;
    log::info!(
        "best epoch {} (val loss {:.6}); artifacts in {}",
        outcome.best_epoch,
        outcome.best_val_loss,
        out.display()
    );
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let checkpoint = load_checkpoint(&args.params)?;
    let dataset = load_dataset(&args.dataset)?;
    let metrics = evaluate(&checkpoint, &dataset, args.split)?;
    let text = pretty(&metrics)?;
    if let Some(path) = &args.out {
        write_output(Some(path), &text)?;
    }
    write_output(None, &text)
}

pub fn cmd_params(args: &ParamsArgs) -> Result<()> {
    let mut rc = RunConfig::load_or_default(args.config.as_deref())?;
    if let Some(path) = &args.dataset {
        rc.fit_to(&load_dataset(path)?);
    }
    if let Some(d) = args.input_dims {
        rc.model.input_dims = d;
    }
    args.model.apply(&mut rc.model);
    rc.model.validate()?;
    let b = param_count(&rc.model);
    let text = format!(
        "ffn        {:>10}\ntransforms {:>10}\nattention  {:>10}\nhead       {:>10}\ntotal      {:>10}\n",
        b.ffn, b.transforms, b.attention, b.head, b.total
    );
    write_output(None, &text)?;
    if let Some(path) = &args.out {
        write_output(Some(path), &pretty(&b)?)?;
    }
    Ok(())
}

pub fn cmd_export_attn(args: &ExportArgs) -> Result<()> {
    let checkpoint = load_checkpoint(&args.params)?;
    let dataset = load_dataset(&args.dataset)?;
    let sample = dataset.sample(&args.sample_id)?;
    let output = forward(&checkpoint.params, sample, &checkpoint.model, checkpoint.pruning_seed)?;
    let export = AttentionExport::new(&sample.id, &output);
    let text = match args.format {
        ExportFormat::Json => pretty(&export)?,
        ExportFormat::Dot => {
            let graph = model_graph(sample, &checkpoint.model)?;
            attention_to_dot(&export, &graph.nodes)
        }
    };
    write_output(args.out.as_deref(), &text)
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let rc = resolve_run_config(
        args.config.as_deref(),
        args.dataset.as_deref(),
        args.out.as_deref(),
        &args.model,
        &args.train,
    )?;
    let mut rc = rc;
    let out = rc.out_dir()?.to_path_buf();
    let dataset = load_dataset(rc.dataset_path()?)?;
    rc.fit_to(&dataset);
    rc.model.validate()?;
    rc.train.validate()?;
    if args.seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let settings = ablation_settings(&rc.model, &args.families, args.modes.as_deref())?;
    let rows = run_ablation(&dataset, &settings, &rc.train, &args.seeds)?;
    write_output(Some(&out.join("config.json")), &rc.to_json()?)?;
    write_output(Some(&out.join("ablation.csv")), &ablation_csv(&rows)?)?;
    log::info!("{} ablation rows in {}", rows.len(), out.display());
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::InspectGraph(a) => cmd_inspect_graph(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Params(a) => cmd_params(a),
        Command::ExportAttn(a) => cmd_export_attn(a),
        Command::Ablate(a) => cmd_ablate(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
