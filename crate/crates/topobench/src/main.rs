//! Thin command-line front end over the library pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use topobench::pipeline::{
    cmd_baseline, cmd_filter, cmd_generate, cmd_tensor_demo, cmd_verify, BaselineName,
    PipelineError, RunConfig, TaskKind,
};

#[derive(Parser)]
#[command(name = "topobench", version, about = "Synthetic topological graph benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a balanced candidate pool and write a manifest.
    Generate(RunArgs),
    /// Filter candidates into train/test splits with the undermanned classifier.
    Filter(RunArgs),
    /// Recompute every label with the exact oracles and report inconsistencies.
    Verify {
        /// Dataset file (.jsonl) to audit.
        dataset: PathBuf,
    },
    /// Train a baseline on the filtered splits and report test metrics.
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        /// undermanned | wl | graphlet-exact | graphlet-sampled
        #[arg(long)]
        baseline: String,
    },
    /// Run the tensor pipeline over a dataset: tensors, embeddings, masks.
    TensorDemo {
        /// Dataset file (.jsonl) to embed.
        dataset: PathBuf,
        #[arg(long, default_value_t = 0)]
        main_mode: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value = "runs/tensor-demo")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// triangles | clique-distance
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    candidates: Option<usize>,
    #[arg(long)]
    train_size: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    train_folds: Option<usize>,
    /// Clique Distance label threshold (hops).
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long)]
    clique_size: Option<usize>,
    /// Config file (JSON); explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for datasets and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    PipelineError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    PipelineError::Usage(format!("bad config {}: {e}", path.display()))
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(task) = &self.task {
            cfg.task = match task.as_str() {
                "triangles" => TaskKind::Triangles,
                "clique-distance" => TaskKind::CliqueDistance,
                other => {
                    return Err(PipelineError::Usage(format!(
                        "unknown task {other:?}; expected triangles | clique-distance"
                    )))
                }
            };
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(candidates) = self.candidates {
            cfg.candidates = candidates;
        }
        if let Some(train_size) = self.train_size {
            cfg.train_size = train_size;
        }
        if let Some(test_size) = self.test_size {
            cfg.test_size = test_size;
        }
        if let Some(folds) = self.folds {
            cfg.folds = folds;
        }
        if let Some(train_folds) = self.train_folds {
            cfg.train_folds = train_folds;
        }
        if let Some(threshold) = self.threshold {
            cfg.clique.distance_threshold = threshold;
        }
        if let Some(clique_size) = self.clique_size {
            cfg.clique.clique_size = clique_size;
            cfg.clique.ba_m = clique_size.saturating_sub(2);
        }
        if let Some(out) = self.out {
            cfg.out_dir = out;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = args.into_config()?;
            let manifest = cmd_generate(&cfg)?;
            let summary = manifest.generation.expect("generate fills the summary");
            println!(
                "generated {} candidates ({} label-0, {} label-1, {} draws) -> {}",
                summary.candidates,
                summary.per_class[0],
                summary.per_class[1],
                summary.draws,
                cfg.candidates_path().display()
            );
            Ok(())
        }
        Command::Filter(args) => {
            let cfg = args.into_config()?;
            let manifest = cmd_filter(&cfg)?;
            let filter = manifest.filter.expect("filter fills the summary");
            println!(
                "filtered -> {} train / {} test; undermanned CV accuracy {:.4} pre, {:.4} post",
                filter.train_per_class[0] + filter.train_per_class[1],
                filter.test_per_class[0] + filter.test_per_class[1],
                filter.pre_filter_cv_accuracy,
                filter.post_filter_cv_accuracy
            );
            Ok(())
        }
        Command::Verify { dataset } => {
            let summary = cmd_verify(&dataset)?;
            for (bucket, count) in &summary.histogram {
                println!("{bucket}\t{count}");
            }
            println!(
                "verified {}/{} items label-consistent",
                summary.consistent, summary.items
            );
            if summary.offending_ids.is_empty() {
                Ok(())
            } else {
                Err(PipelineError::Validation(format!(
                    "inconsistent labels for ids {:?}",
                    summary.offending_ids
                )))
            }
        }
        Command::Baseline { run, baseline } => {
            let name = BaselineName::parse(&baseline)?;
            let cfg = run.into_config()?;
            let report = cmd_baseline(&cfg, name)?;
            println!(
                "{}: accuracy {:.4}, F1 {:.4} ({} train / {} test, {} features)",
                report.baseline,
                report.accuracy,
                report.f1,
                report.train_size,
                report.test_size,
                report.feature_count
            );
            Ok(())
        }
        Command::TensorDemo {
            dataset,
            main_mode,
            seed,
            width,
            out,
        } => {
            let count = cmd_tensor_demo(&dataset, main_mode, seed, &out, width)?;
            println!("embedded {count} items -> {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; keep help/version on success
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
