//! End-to-end orchestration: generate -> filter -> verify -> baseline ->
//! tensor-demo, with every output byte determined by (seed, config).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{undermanned_features, FeatureVector, FeatureVocabulary};
use crate::filter::{filter_dataset, overlapping_cv, FilterConfig, FilterError};
use crate::generate::{
    gen_clique_pool, gen_triangle_pool, item_seed, seeded_rng, CliqueGenParams, DatasetItem,
    GenError, Provenance, TriangleGenParams,
};
use crate::io::{
    export_tensor_tsv, read_dataset, write_dataset, DataIoError, FilterSummary,
    GenerationSummary, Manifest, VerifySummary,
};
use crate::kernels::{
    run_baseline, BaselineError, BaselineFeaturizer, BaselineReport, GraphletConfig,
    GraphletMode, WlConfig,
};
use crate::logreg::LogRegHyper;
use crate::tensor::{
    graph_to_tensor, initial_embeddings, initial_node_features, plan_embedding, ModeWeights,
    TensorError,
};

// Derived-seed salts so the pipeline stages draw from independent streams.
const SALT_FOLDS: u64 = 0xF01D;
const SALT_SELECT: u64 = 0x5E1E_C7;
const SALT_BASELINE: u64 = 0xBA5E;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
}

impl PipelineError {
    /// Exit-code contract: 0 success, 1 usage, 2 validation/oracle failure,
    /// 3 infeasible generation.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Validation(_) => 2,
            PipelineError::Infeasible(_) => 3,
        }
    }
}

impl From<GenError> for PipelineError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::RetriesExhausted { .. } => PipelineError::Infeasible(e.to_string()),
            GenError::InvalidParams(_) => PipelineError::Usage(e.to_string()),
            other => PipelineError::Validation(other.to_string()),
        }
    }
}

impl From<FilterError> for PipelineError {
    fn from(e: FilterError) -> Self {
        match e {
            FilterError::InfeasibleBalance { .. } => PipelineError::Infeasible(e.to_string()),
            FilterError::BadFoldCounts { .. }
            | FilterError::FoldTooSmall { .. }
            | FilterError::OddTarget { .. } => PipelineError::Usage(e.to_string()),
            other => PipelineError::Validation(other.to_string()),
        }
    }
}

impl From<DataIoError> for PipelineError {
    fn from(e: DataIoError) -> Self {
        PipelineError::Validation(e.to_string())
    }
}

impl From<BaselineError> for PipelineError {
    fn from(e: BaselineError) -> Self {
        PipelineError::Validation(e.to_string())
    }
}

impl From<TensorError> for PipelineError {
    fn from(e: TensorError) -> Self {
        PipelineError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Triangles,
    CliqueDistance,
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Triangles => "triangles",
            TaskKind::CliqueDistance => "clique-distance",
        }
    }
}

/// Full run configuration. Parsable from a config file; command-line flags
/// override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub task: TaskKind,
    pub seed: u64,
    pub candidates: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub folds: usize,
    pub train_folds: usize,
    pub degree_cap: usize,
    pub out_dir: PathBuf,
    pub triangles: TriangleGenParams,
    pub clique: CliqueGenParams,
    pub hyper: LogRegHyper,
    /// Rejection-sampling budget for class balance, as a multiple of the
    /// candidate count.
    pub max_draw_factor: usize,
    /// Samples per graph for the sampled-graphlet baseline.
    pub graphlet_samples: usize,
    pub wl_iterations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: TaskKind::Triangles,
            seed: 0,
            candidates: 2000,
            train_size: 200,
            test_size: 40,
            folds: 10,
            train_folds: 7,
            degree_cap: 32,
            out_dir: PathBuf::from("runs/out"),
            triangles: TriangleGenParams::default(),
            clique: CliqueGenParams::default(),
            hyper: LogRegHyper::default(),
            max_draw_factor: 200,
            graphlet_samples: 10_000,
            wl_iterations: 3,
        }
    }
}

impl RunConfig {
    pub fn candidates_path(&self) -> PathBuf {
        self.out_dir.join("candidates.jsonl")
    }

    pub fn train_path(&self) -> PathBuf {
        self.out_dir.join("train.jsonl")
    }

    pub fn test_path(&self) -> PathBuf {
        self.out_dir.join("test.jsonl")
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.out_dir.join("manifest.json")
    }

    fn load_or_new_manifest(&self) -> Manifest {
        Manifest::load(&self.manifest_path())
            .unwrap_or_else(|_| Manifest::new(self.task.name(), self.seed))
    }
}

/// Generates the balanced candidate pool and writes it with a fresh manifest.
pub fn cmd_generate(cfg: &RunConfig) -> Result<Manifest, PipelineError> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| PipelineError::Validation(format!("{}: {e}", cfg.out_dir.display())))?;
    let (items, draws, params) = match cfg.task {
        TaskKind::Triangles => {
            let items = gen_triangle_pool(cfg.seed, cfg.candidates, &cfg.triangles)?;
            let draws = items.len();
            let params = serde_json::to_value(&cfg.triangles).expect("params serialize");
            (items, draws, params)
        }
        TaskKind::CliqueDistance => {
            let (items, draws) = gen_clique_pool(
                cfg.seed,
                cfg.candidates,
                &cfg.clique,
                cfg.candidates.saturating_mul(cfg.max_draw_factor),
            )?;
            let params = serde_json::to_value(&cfg.clique).expect("params serialize");
            (items, draws, params)
        }
    };
    write_dataset(&cfg.candidates_path(), &items)?;

    let mut manifest = Manifest::new(cfg.task.name(), cfg.seed);
    let per_class = [
        items.iter().filter(|i| i.label == 0).count(),
        items.iter().filter(|i| i.label == 1).count(),
    ];
    manifest.generation = Some(GenerationSummary {
        candidates: items.len(),
        per_class,
        draws,
        params,
    });
    manifest.save(&cfg.manifest_path())?;
    Ok(manifest)
}

fn featurize_pool(
    items: &[DatasetItem],
    degree_cap: usize,
) -> (FeatureVocabulary, Vec<FeatureVector>, Vec<u8>) {
    let raw: Vec<_> = items
        .iter()
        .map(|i| undermanned_features(&i.graph, degree_cap))
        .collect();
    let vocab = FeatureVocabulary::build(raw.iter());
    let x = raw.iter().map(|r| vocab.vectorize(r)).collect();
    let y = items.iter().map(|i| i.label).collect();
    (vocab, x, y)
}

/// Runs the undermanned overlapping cross-validation over the candidate
/// pool, selects error-biased balanced splits, and logs pre/post accuracy.
pub fn cmd_filter(cfg: &RunConfig) -> Result<Manifest, PipelineError> {
    let items = read_dataset(&cfg.candidates_path())?;
    let (vocab, x, y) = featurize_pool(&items, cfg.degree_cap);

    let filter_cfg = FilterConfig {
        folds: cfg.folds,
        train_folds: cfg.train_folds,
        train_size: cfg.train_size,
        test_size: cfg.test_size,
        seed: item_seed(cfg.seed, SALT_FOLDS),
    };
    let cv = overlapping_cv(&x, &y, vocab.len(), &filter_cfg, &cfg.hyper)?;

    let mut select_rng = seeded_rng(item_seed(cfg.seed, SALT_SELECT));
    let outcome = filter_dataset(&mut select_rng, &y, &cv.error_counts, &filter_cfg)?;

    let train: Vec<DatasetItem> = outcome.train.iter().map(|&i| items[i].clone()).collect();
    let test: Vec<DatasetItem> = outcome.test.iter().map(|&i| items[i].clone()).collect();
    write_dataset(&cfg.train_path(), &train)?;
    write_dataset(&cfg.test_path(), &test)?;

    // post-filter look: the same undermanned classifier, same vocabulary,
    // cross-validated on the selected train split
    let post_x: Vec<FeatureVector> = outcome.train.iter().map(|&i| x[i].clone()).collect();
    let post_y: Vec<u8> = outcome.train.iter().map(|&i| y[i]).collect();
    let post_cv = overlapping_cv(&post_x, &post_y, vocab.len(), &filter_cfg, &cfg.hyper)?;

    let mut manifest = cfg.load_or_new_manifest();
    manifest.filter = Some(FilterSummary {
        folds: cfg.folds,
        train_folds: cfg.train_folds,
        looks_per_item: cv.looks_per_item,
        pre_filter_cv_accuracy: cv.mean_validation_accuracy,
        post_filter_cv_accuracy: post_cv.mean_validation_accuracy,
        items_with_errors: cv.error_counts.iter().filter(|&&e| e > 0).count(),
        train_per_class: [
            train.iter().filter(|i| i.label == 0).count(),
            train.iter().filter(|i| i.label == 1).count(),
        ],
        test_per_class: [
            test.iter().filter(|i| i.label == 0).count(),
            test.iter().filter(|i| i.label == 1).count(),
        ],
    });
    manifest.warnings.extend(outcome.warnings);
    manifest.save(&cfg.manifest_path())?;
    Ok(manifest)
}

/// Per-item oracle audit. Labels are recomputed from scratch: triangle counts
/// for Triangles items, clique enumeration plus BFS distance for Clique
/// Distance items.
pub fn verify_items(items: &[DatasetItem]) -> VerifySummary {
    let mut offending = Vec::new();
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for item in items {
        let consistent = match &item.provenance {
            Provenance::Er { .. } | Provenance::Knn { .. } => {
                let count = item.graph.triangles().len();
                *histogram.entry(format!("triangles={count}")).or_insert(0) += 1;
                item.label <= 1 && count == item.label as usize
            }
            Provenance::BaCliques {
                clique_size,
                threshold,
                ..
            } => {
                let cliques = item.graph.k_cliques(*clique_size);
                if cliques.len() != 2 {
                    *histogram
                        .entry(format!("cliques={}", cliques.len()))
                        .or_insert(0) += 1;
                    false
                } else {
                    match item
                        .graph
                        .set_distance(&cliques.cliques[0], &cliques.cliques[1])
                    {
                        Ok(d) => {
                            let dist = d.hops();
                            match dist {
                                Some(dist) => {
                                    *histogram
                                        .entry(format!("distance={dist}"))
                                        .or_insert(0) += 1;
                                    item.label == u8::from(dist >= *threshold)
                                }
                                None => {
                                    *histogram.entry("distance=unreachable".into()).or_insert(0) +=
                                        1;
                                    item.label == 1
                                }
                            }
                        }
                        Err(_) => false,
                    }
                }
            }
        };
        if !consistent {
            offending.push(item.id);
        }
    }
    VerifySummary {
        dataset: String::new(),
        items: items.len(),
        consistent: items.len() - offending.len(),
        offending_ids: offending,
        histogram,
    }
}

/// Reads a dataset file and audits every label against the oracles. The
/// summary is appended to the manifest when one exists next to the file.
pub fn cmd_verify(dataset: &Path) -> Result<VerifySummary, PipelineError> {
    let items = read_dataset(dataset)?;
    let mut summary = verify_items(&items);
    summary.dataset = dataset.display().to_string();

    let manifest_path = dataset.parent().map(|d| d.join("manifest.json"));
    if let Some(manifest_path) = manifest_path {
        if manifest_path.exists() {
            if let Ok(mut manifest) = Manifest::load(&manifest_path) {
                manifest.verify.push(summary.clone());
                manifest.save(&manifest_path)?;
            }
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineName {
    Undermanned,
    Wl,
    GraphletExact,
    GraphletSampled,
}

impl BaselineName {
    pub fn parse(name: &str) -> Result<Self, PipelineError> {
        match name {
            "undermanned" => Ok(BaselineName::Undermanned),
            "wl" => Ok(BaselineName::Wl),
            "graphlet-exact" => Ok(BaselineName::GraphletExact),
            "graphlet-sampled" => Ok(BaselineName::GraphletSampled),
            other => Err(PipelineError::Usage(format!(
                "unknown baseline {other:?}; expected undermanned | wl | graphlet-exact | graphlet-sampled"
            ))),
        }
    }
}

fn featurizer_for(cfg: &RunConfig, name: BaselineName) -> BaselineFeaturizer {
    match name {
        BaselineName::Undermanned => BaselineFeaturizer::Undermanned {
            degree_cap: cfg.degree_cap,
        },
        BaselineName::Wl => BaselineFeaturizer::Wl(WlConfig {
            iterations: cfg.wl_iterations,
            ..WlConfig::default()
        }),
        BaselineName::GraphletExact => BaselineFeaturizer::GraphletExact,
        BaselineName::GraphletSampled => BaselineFeaturizer::GraphletSampled(GraphletConfig {
            // size 3 captures triangles; Clique Distance experiments use 4
            size: match cfg.task {
                TaskKind::Triangles => 3,
                TaskKind::CliqueDistance => 4,
            },
            mode: GraphletMode::Sampled,
            samples: cfg.graphlet_samples,
        }),
    }
}

/// Trains the selected baseline on the filtered train split and reports test
/// accuracy and F1. The report is echoed into the manifest.
pub fn cmd_baseline(cfg: &RunConfig, name: BaselineName) -> Result<BaselineReport, PipelineError> {
    let train = read_dataset(&cfg.train_path())?;
    let test = read_dataset(&cfg.test_path())?;
    let featurizer = featurizer_for(cfg, name);
    let report = run_baseline(
        &train,
        &test,
        &featurizer,
        &cfg.hyper,
        item_seed(cfg.seed, SALT_BASELINE),
    )?;

    let mut manifest = cfg.load_or_new_manifest();
    manifest.baselines.push(report.clone());
    manifest.save(&cfg.manifest_path())?;
    Ok(report)
}

/// Per-item artifacts from the tensor pipeline: the sparse tensor table, the
/// node embedding table (with the doubled local+neighbor-sum features), and
/// the adjacency mask.
pub fn cmd_tensor_demo(
    dataset: &Path,
    main_mode: usize,
    seed: u64,
    out_dir: &Path,
    width: usize,
) -> Result<usize, PipelineError> {
    let items = read_dataset(dataset)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| PipelineError::Validation(format!("{}: {e}", out_dir.display())))?;
    for item in &items {
        let tensor = graph_to_tensor(&item.graph);
        let plan = plan_embedding(&tensor, main_mode)?;
        let mut rng = seeded_rng(item_seed(seed, item.id));
        let weights = ModeWeights::seeded_uniform(&tensor, &plan, width, &mut rng);
        let embeddings = initial_embeddings(&tensor, &weights, &plan)?;
        let table = embeddings.to_table(item.graph.num_nodes());
        let features = initial_node_features(&item.graph, &table);

        export_tensor_tsv(&out_dir.join(format!("item-{}.tensor.tsv", item.id)), &tensor)?;

        let mut emb_text = String::new();
        for (node, vec) in features.iter().enumerate() {
            emb_text.push_str(&node.to_string());
            for v in vec {
                emb_text.push('\t');
                emb_text.push_str(&v.to_string());
            }
            emb_text.push('\n');
        }
        let emb_path = out_dir.join(format!("item-{}.embeddings.tsv", item.id));
        std::fs::write(&emb_path, emb_text)
            .map_err(|e| PipelineError::Validation(format!("{}: {e}", emb_path.display())))?;

        let mask = item.graph.adjacency_mask(false);
        let mut mask_text = String::new();
        for row in &mask {
            let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            mask_text.push_str(&cells.join("\t"));
            mask_text.push('\n');
        }
        let mask_path = out_dir.join(format!("item-{}.mask.tsv", item.id));
        std::fs::write(&mask_path, mask_text)
            .map_err(|e| PipelineError::Validation(format!("{}: {e}", mask_path.display())))?;
    }
    Ok(items.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(dir: &Path, task: TaskKind) -> RunConfig {
        RunConfig {
            task,
            seed: 5,
            candidates: 200,
            train_size: 40,
            test_size: 10,
            out_dir: dir.to_path_buf(),
            ..RunConfig::default()
        }
    }

    #[test]
    fn generate_filter_verify_baseline_smoke() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config(dir.path(), TaskKind::Triangles);
        let manifest = cmd_generate(&cfg).unwrap();
        let summary = manifest.generation.as_ref().unwrap();
        assert_eq!(summary.per_class, [100, 100]);

        let manifest = cmd_filter(&cfg).unwrap();
        let filter = manifest.filter.as_ref().unwrap();
        assert!(filter.pre_filter_cv_accuracy > 0.0);
        assert_eq!(filter.train_per_class, [20, 20]);

        let verify = cmd_verify(&cfg.candidates_path()).unwrap();
        assert_eq!(verify.consistent, verify.items);

        let report = cmd_baseline(&cfg, BaselineName::GraphletExact).unwrap();
        assert_eq!(report.accuracy, 1.0);

        // manifest accumulated all sections
        let manifest = Manifest::load(&cfg.manifest_path()).unwrap();
        assert!(manifest.generation.is_some());
        assert!(manifest.filter.is_some());
        assert_eq!(manifest.baselines.len(), 1);
        assert_eq!(manifest.verify.len(), 1);
    }

    #[test]
    fn generate_is_byte_identical_across_runs() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let cfg_a = quick_config(dir_a.path(), TaskKind::CliqueDistance);
        let cfg_b = quick_config(dir_b.path(), TaskKind::CliqueDistance);
        cmd_generate(&cfg_a).unwrap();
        cmd_generate(&cfg_b).unwrap();
        assert_eq!(
            std::fs::read(cfg_a.candidates_path()).unwrap(),
            std::fs::read(cfg_b.candidates_path()).unwrap()
        );
    }

    #[test]
    fn verify_catches_corrupted_labels() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config(dir.path(), TaskKind::Triangles);
        cmd_generate(&cfg).unwrap();
        let mut items = read_dataset(&cfg.candidates_path()).unwrap();
        items[3].label = 1 - items[3].label;
        write_dataset(&cfg.candidates_path(), &items).unwrap();
        let summary = cmd_verify(&cfg.candidates_path()).unwrap();
        assert_eq!(summary.offending_ids, vec![items[3].id]);
    }

    #[test]
    fn filter_reruns_identically() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config(dir.path(), TaskKind::Triangles);
        cmd_generate(&cfg).unwrap();
        cmd_filter(&cfg).unwrap();
        let train_1 = std::fs::read(cfg.train_path()).unwrap();
        let test_1 = std::fs::read(cfg.test_path()).unwrap();
        cmd_filter(&cfg).unwrap();
        assert_eq!(std::fs::read(cfg.train_path()).unwrap(), train_1);
        assert_eq!(std::fs::read(cfg.test_path()).unwrap(), test_1);
    }

    #[test]
    fn tensor_demo_outputs_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            candidates: 10,
            ..quick_config(dir.path(), TaskKind::Triangles)
        };
        cmd_generate(&cfg).unwrap();
        let out_a = dir.path().join("demo-a");
        let out_b = dir.path().join("demo-b");
        let count = cmd_tensor_demo(&cfg.candidates_path(), 0, 3, &out_a, 4).unwrap();
        assert_eq!(count, 10);
        cmd_tensor_demo(&cfg.candidates_path(), 0, 3, &out_b, 4).unwrap();
        for name in ["item-0.tensor.tsv", "item-0.embeddings.tsv", "item-0.mask.tsv"] {
            assert_eq!(
                std::fs::read(out_a.join(name)).unwrap(),
                std::fs::read(out_b.join(name)).unwrap(),
                "{name}"
            );
        }
        // every node row has the same width: embedding + neighbor sum
        let text = std::fs::read_to_string(out_a.join("item-0.embeddings.tsv")).unwrap();
        let widths: Vec<usize> = text.lines().map(|l| l.split('\t').count()).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn unknown_baseline_is_a_usage_error() {
        let err = BaselineName::parse("svm").unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
