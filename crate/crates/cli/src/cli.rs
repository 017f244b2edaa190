use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::data::load_trajectories;
use crate::error::Result;
use crate::evaluate::{evaluate, MetricsMeta};
use crate::io::write_atomic;
use crate::predict::{predict, Meta, Scene};
use crate::svg;
use crate::synthetic::{generate_synthetic, truth_path, write_corpus, GroundTruth};

#[derive(Debug, Parser)]
#[command(name = "pedreach", version, about = "Modal data-driven reachable sets for pedestrians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a two-population corpus and its ground-truth sidecar.
    Generate(GenerateArgs),
    /// Compute per-mode reachable sets for the configured query.
    Predict(PredictArgs),
    /// Check reachable sets against simulated true continuations.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV to write; the sidecar goes to `<stem>.truth.json` next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write `<out stem>.<mode>.svg` per mode.
    #[arg(long)]
    pub svg: bool,
    /// Add per-step modal/pooled area ratios.
    #[arg(long)]
    pub compare_pooled: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth sidecar; defaults to `<data stem>.truth.json`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Runs a subcommand and returns the process exit code.
pub fn run(command: &Command) -> Result<i32> {
    match command {
        Command::Generate(args) => run_generate(args).map(|_| 0),
        Command::Predict(args) => run_predict(args),
        Command::Evaluate(args) => run_evaluate(args),
    }
}

pub fn run_generate(args: &GenerateArgs) -> Result<PathBuf> {
    let loaded = RunConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(loaded.config.seed);
    let corpus = generate_synthetic(&loaded.config, seed)?;
    write_corpus(&args.out, &corpus)
}

fn svg_path(out: &Path, mode: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{mode}.svg"))
}

pub fn run_predict(args: &PredictArgs) -> Result<i32> {
    let loaded = RunConfig::load(&args.config)?;
    let config = &loaded.config;
    let trajectories = load_trajectories(&args.data, config.sample_period)?;
    let scene = Scene::new(config, &trajectories)?;
    let prediction = predict(&scene, args.compare_pooled)?;
    let document = prediction.document(Meta {
        config_hash: loaded.hash.clone(),
        seed: args.seed.unwrap_or(config.seed),
    })?;
    write_atomic(&args.out, document.to_json()?.as_bytes())?;

    if args.svg {
        let start = scene.query.start_set().to_polygon().map_err(pedreach_core::modal::ModalError::from)?;
        for mode in &document.modes {
            let polygons: Vec<Vec<[f64; 2]>> = mode.steps.iter().map(|s| s.polygon.clone()).collect();
            let title = format!("{} (id {}): {} kept chunks, {}", mode.name, mode.id, mode.kept_chunks, status_text(mode));
            let image = svg::render(&title, start.vertices(), &polygons);
            write_atomic(&svg_path(&args.out, &mode.name), image.as_bytes())?;
        }
    }
    Ok(document.exit_code())
}

fn status_text(mode: &crate::predict::ModeDocument) -> String {
    serde_json::to_value(mode.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<i32> {
    let loaded = RunConfig::load(&args.config)?;
    let config = &loaded.config;
    let truth_file = args.truth.clone().unwrap_or_else(|| truth_path(&args.data));
    let truth = GroundTruth::read(&truth_file)?;
    let trajectories = load_trajectories(&args.data, config.sample_period)?;
    let scene = Scene::new(config, &trajectories)?;
    let metrics = evaluate(
        &scene,
        &truth,
        MetricsMeta {
            config_hash: loaded.hash.clone(),
            seed: args.seed.unwrap_or(config.seed),
            rollouts: config.evaluate.rollouts,
        },
    )?;
    let mut json = serde_json::to_string_pretty(&metrics)?;
    json.push('\n');
    write_atomic(&args.out, json.as_bytes())?;
    Ok(metrics.exit_code())
}
