use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use salbench::bench::{BenchContext, ExperimentConfig, RunSet};
use salbench::corpus::{synth_dataset, GtKind, SynthOptions};
use salbench::metrics::MetricId;
use salbench::preprocess::BorderCut;

#[derive(Parser)]
#[command(
    name = "salbench",
    version,
    about = "Benchmark visual saliency models against fixation and region ground truths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Model roster entry: SR, PFT, FT or ext:NAME=dir. Repeatable.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Metric to score: NSS or AUROC. Repeatable; default both.
    #[arg(long = "metric")]
    metrics: Vec<String>,
    /// Ground truth kind: fixations or regions. Repeatable; default both.
    #[arg(long = "gt")]
    gt_kinds: Vec<String>,
    /// Gaussian blur sigma as a fraction of image width.
    #[arg(long, default_value_t = 0.03)]
    blur_sigma: f64,
    /// Border cut in pixels; when omitted, 4% of the smaller dimension.
    #[arg(long)]
    border_cut: Option<usize>,
    /// Working size for the spectral models (larger image side).
    #[arg(long, default_value_t = 64)]
    working_size: usize,
    /// AUROC sampling repetitions.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Run seed; all per-cell RNG streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for scores.csv, experiment JSONs and report.json.
    #[arg(long)]
    out: PathBuf,
    /// Model excluded from the experiment-2 trend fit. Repeatable.
    #[arg(long = "exclude-from-trend")]
    exclude_from_trend: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted salient regions.
    Synth {
        /// Output directory for images, masks, fixations and manifest.json.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        n_images: usize,
        /// Large,Medium,Small proportions; must sum to 1.
        #[arg(long, default_value = "0.34,0.33,0.33")]
        mix: String,
        #[arg(long, default_value_t = 160)]
        width: u32,
        #[arg(long, default_value_t = 120)]
        height: u32,
    },
    /// Score every (image, model, ground truth, metric) cell.
    Score(RunArgs),
    /// Experiment 1: ground-truth concordance (Friedman + Kendall's W).
    Exp1(RunArgs),
    /// Experiment 2: region-size category analysis.
    Exp2(RunArgs),
    /// Experiment 3: PCA metric fusion with adjusted ANOVA and Tukey-HSD.
    Exp3(RunArgs),
    /// Score and run all three experiments.
    All(RunArgs),
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut config = ExperimentConfig::new(args.manifest.clone(), args.out.clone());
    if !args.models.is_empty() {
        config.model_specs = args.models.clone();
    }
    if !args.metrics.is_empty() {
        config.metrics = args
            .metrics
            .iter()
            .map(|m| MetricId::parse(m).ok_or_else(|| format!("unknown metric `{m}`")))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if !args.gt_kinds.is_empty() {
        config.gt_kinds = args
            .gt_kinds
            .iter()
            .map(|g| match g.as_str() {
                "fixations" => Ok(GtKind::Fixations),
                "regions" => Ok(GtKind::Regions),
                other => Err(format!("unknown ground truth `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()?;
    }
    config.preprocess.blur_sigma = args.blur_sigma;
    if let Some(pixels) = args.border_cut {
        config.preprocess.border_cut = BorderCut::Pixels(pixels);
    }
    config.model_options.working_size = args.working_size;
    config.reps = args.reps;
    config.seed = args.seed;
    if !args.exclude_from_trend.is_empty() {
        config.exclude_from_trend = args.exclude_from_trend.clone();
    }
    Ok(config)
}

fn run(args: &RunArgs, set: RunSet) -> Result<(), String> {
    let config = build_config(args)?;
    let context = BenchContext::load(config).map_err(|e| e.to_string())?;
    let report = context.run(set).map_err(|e| e.to_string())?;
    println!(
        "scored {} cells ({} failed); artifacts in {}:",
        report.cells_total,
        report.cells_failed,
        args.out.display()
    );
    for artifact in &report.artifacts {
        println!("  {artifact}");
    }
    Ok(())
}

fn parse_mix(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if parts.len() != 3 {
        return Err("mix needs exactly three proportions".into());
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth {
            out,
            seed,
            n_images,
            mix,
            width,
            height,
        } => parse_mix(mix).and_then(|mix| {
            let options = SynthOptions {
                width: *width,
                height: *height,
                ..SynthOptions::default()
            };
            synth_dataset(out, *seed, *n_images, mix, &options)
                .map(|manifest| {
                    println!(
                        "wrote {} images under {} (manifest.json included)",
                        manifest.len(),
                        out.display()
                    );
                })
                .map_err(|e| e.to_string())
        }),
        Command::Score(args) => run(args, RunSet::ScoreOnly),
        Command::Exp1(args) => run(args, RunSet::Exp1),
        Command::Exp2(args) => run(args, RunSet::Exp2),
        Command::Exp3(args) => run(args, RunSet::Exp3),
        Command::All(args) => run(args, RunSet::All),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
