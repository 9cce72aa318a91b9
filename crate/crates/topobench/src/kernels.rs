//! Weisfeiler-Lehman subtree features and graphlet counts, classified with
//! the in-repo logistic regression on the explicit feature maps.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureVector, FeatureVocabulary, RawFeatures};
use crate::generate::{item_seed, seeded_rng, DatasetItem};
use crate::graph::Graph;
use crate::logreg::{accuracy, f1_score, train_logreg, LogRegHyper, TrainError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("{split} split is empty")]
    EmptySplit { split: &'static str },
    #[error("graphlet size {0} is not supported (only 3 and 4)")]
    BadGraphletSize(usize),
    #[error("exact graphlet counting only supports size 3, got {0}")]
    ExactSizeUnsupported(usize),
    #[error("sample count must be >= 1 in sampled mode")]
    NoSamples,
    #[error(transparent)]
    Train(#[from] TrainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WlInit {
    Uniform,
    Degree,
    NodeLabels,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WlConfig {
    pub iterations: usize,
    pub init: WlInit,
}

impl Default for WlConfig {
    fn default() -> Self {
        WlConfig {
            iterations: 3,
            init: WlInit::Uniform,
        }
    }
}

#[derive(Hash, PartialEq, Eq)]
enum WlKey {
    Init(u32),
    Refine(u32, Vec<u32>),
}

/// The compressed-label dictionary shared across a dataset. Ids are opaque;
/// they are assigned in first-encounter order, which is deterministic given
/// the graph iteration order.
#[derive(Default)]
pub struct WlRefinery {
    table: HashMap<WlKey, u32>,
    next: u32,
}

impl WlRefinery {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, key: WlKey) -> u32 {
        if let Some(&id) = self.table.get(&key) {
            return id;
        }
        let id = self.next;
        self.next += 1;
        self.table.insert(key, id);
        id
    }

    pub fn num_labels(&self) -> usize {
        self.table.len()
    }
}

/// Histogram of compressed labels across refinement iterations 0..=h.
/// Feature names are namespaced by iteration so rounds never collide.
pub fn wl_features(g: &Graph, cfg: &WlConfig, refinery: &mut WlRefinery) -> RawFeatures {
    let n = g.num_nodes();
    let initial: Vec<u32> = match cfg.init {
        WlInit::Uniform => vec![0; n],
        WlInit::Degree => g.degrees().iter().map(|&d| d as u32).collect(),
        WlInit::NodeLabels => g
            .node_labels()
            .map(|l| l.to_vec())
            .unwrap_or_else(|| vec![0; n]),
    };
    let mut labels: Vec<u32> = initial
        .into_iter()
        .map(|raw| refinery.intern(WlKey::Init(raw)))
        .collect();

    let mut out = RawFeatures::default();
    let tally = |iteration: usize, labels: &[u32], out: &mut RawFeatures| {
        let mut hist: BTreeMap<u32, f64> = BTreeMap::new();
        for &l in labels {
            *hist.entry(l).or_insert(0.0) += 1.0;
        }
        for (l, count) in hist {
            out.insert(format!("wl:{iteration}:{l}"), count);
        }
    };
    tally(0, &labels, &mut out);

    for iteration in 1..=cfg.iterations {
        let mut next = Vec::with_capacity(n);
        for u in 0..n {
            let mut neighborhood: Vec<u32> = g.neighbors(u).iter().map(|&v| labels[v]).collect();
            neighborhood.sort_unstable();
            next.push(refinery.intern(WlKey::Refine(labels[u], neighborhood)));
        }
        labels = next;
        tally(iteration, &labels, &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphletMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphletConfig {
    /// 3 or 4.
    pub size: usize,
    pub mode: GraphletMode,
    pub samples: usize,
}

impl Default for GraphletConfig {
    fn default() -> Self {
        GraphletConfig {
            size: 3,
            mode: GraphletMode::Sampled,
            samples: 10_000,
        }
    }
}

/// Exact counts of induced connected 3-node subgraphs: triangles and 2-edge
/// paths. Direct enumeration around each path center.
pub fn graphlet_counts_exact(g: &Graph) -> RawFeatures {
    let triangles = g.triangles().len() as f64;
    let mut cherries = 0.0;
    for u in 0..g.num_nodes() {
        let d = g.degree(u) as f64;
        cherries += d * (d - 1.0) / 2.0;
    }
    // each triangle shows up as a cherry at all three corners
    let paths = cherries - 3.0 * triangles;
    let mut out = RawFeatures::default();
    out.insert("g3:triangle", triangles);
    out.insert("g3:path", paths);
    out
}

/// Induced 3-node type from the three pairwise adjacency flags.
fn classify3(e01: bool, e02: bool, e12: bool) -> &'static str {
    match usize::from(e01) + usize::from(e02) + usize::from(e12) {
        0 => "empty",
        1 => "one_edge",
        2 => "path",
        _ => "triangle",
    }
}

/// Induced 4-node type, keyed by edge count and the sorted degree sequence of
/// the induced subgraph (unique per isomorphism class on four nodes).
fn classify4(g: &Graph, nodes: &[usize; 4]) -> &'static str {
    let mut deg = [0usize; 4];
    let mut edges = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if g.has_edge(nodes[i], nodes[j]) {
                edges += 1;
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    deg.sort_unstable();
    match (edges, deg) {
        (0, _) => "empty",
        (1, _) => "one_edge",
        (2, [1, 1, 1, 1]) => "matching",
        (2, _) => "path3_plus_node",
        (3, [0, 2, 2, 2]) => "triangle_plus_node",
        (3, [1, 1, 1, 3]) => "star",
        (3, _) => "path4",
        (4, [2, 2, 2, 2]) => "cycle4",
        (4, _) => "paw",
        (5, _) => "diamond",
        _ => "k4",
    }
}

/// Frequencies of induced subgraph types over uniformly sampled node subsets.
/// Connected and disconnected types are tallied under their own names; the
/// disconnected buckets are kept as features.
pub fn graphlet_counts_sampled(
    rng: &mut ChaCha8Rng,
    g: &Graph,
    cfg: &GraphletConfig,
) -> Result<RawFeatures, BaselineError> {
    if cfg.samples == 0 {
        return Err(BaselineError::NoSamples);
    }
    if cfg.size != 3 && cfg.size != 4 {
        return Err(BaselineError::BadGraphletSize(cfg.size));
    }
    let n = g.num_nodes();
    let mut out = RawFeatures::default();
    if n < cfg.size {
        return Ok(out);
    }
    let mut tallies: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut picked = Vec::with_capacity(cfg.size);
    for _ in 0..cfg.samples {
        picked.clear();
        while picked.len() < cfg.size {
            let v = rng.gen_range(0..n);
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        let name = if cfg.size == 3 {
            classify3(
                g.has_edge(picked[0], picked[1]),
                g.has_edge(picked[0], picked[2]),
                g.has_edge(picked[1], picked[2]),
            )
        } else {
            classify4(g, &[picked[0], picked[1], picked[2], picked[3]])
        };
        *tallies.entry(name).or_insert(0.0) += 1.0;
    }
    let prefix = if cfg.size == 3 { "g3s" } else { "g4s" };
    for (name, count) in tallies {
        out.insert(format!("{prefix}:{name}"), count / cfg.samples as f64);
    }
    Ok(out)
}

/// Which feature map a baseline run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaselineFeaturizer {
    Undermanned { degree_cap: usize },
    Wl(WlConfig),
    GraphletExact,
    GraphletSampled(GraphletConfig),
}

impl BaselineFeaturizer {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineFeaturizer::Undermanned { .. } => "undermanned",
            BaselineFeaturizer::Wl(_) => "wl",
            BaselineFeaturizer::GraphletExact => "graphlet-exact",
            BaselineFeaturizer::GraphletSampled(_) => "graphlet-sampled",
        }
    }

    /// Featurizes a whole dataset in order. The WL dictionary is shared
    /// across all graphs; sampled graphlets draw one derived seed per item.
    pub fn featurize_all(
        &self,
        graphs: &[&Graph],
        seed: u64,
    ) -> Result<Vec<RawFeatures>, BaselineError> {
        match self {
            BaselineFeaturizer::Undermanned { degree_cap } => Ok(graphs
                .iter()
                .map(|g| crate::features::undermanned_features(g, *degree_cap))
                .collect()),
            BaselineFeaturizer::Wl(cfg) => {
                let mut refinery = WlRefinery::new();
                Ok(graphs
                    .iter()
                    .map(|g| wl_features(g, cfg, &mut refinery))
                    .collect())
            }
            BaselineFeaturizer::GraphletExact => {
                Ok(graphs.iter().map(|g| graphlet_counts_exact(g)).collect())
            }
            BaselineFeaturizer::GraphletSampled(cfg) => graphs
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let mut rng = seeded_rng(item_seed(seed, i as u64));
                    graphlet_counts_sampled(&mut rng, g, cfg)
                })
                .collect(),
        }
    }
}

/// Test metrics plus enough configuration echo to rerun the exact experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub baseline: String,
    pub accuracy: f64,
    pub f1: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub feature_count: usize,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// Featurizes both splits, trains the linear model on the train split, and
/// reports test metrics. The vocabulary is built over both splits, which is
/// the explicit-feature analogue of evaluating a kernel on all graph pairs;
/// labels never cross over.
pub fn run_baseline(
    train: &[DatasetItem],
    test: &[DatasetItem],
    featurizer: &BaselineFeaturizer,
    hyper: &LogRegHyper,
    seed: u64,
) -> Result<BaselineReport, BaselineError> {
    if train.is_empty() {
        return Err(BaselineError::EmptySplit { split: "train" });
    }
    if test.is_empty() {
        return Err(BaselineError::EmptySplit { split: "test" });
    }
    let graphs: Vec<&Graph> = train.iter().chain(test.iter()).map(|i| &i.graph).collect();
    let raw = featurizer.featurize_all(&graphs, seed)?;
    run_baseline_on_features(
        &raw[..train.len()],
        &train.iter().map(|i| i.label).collect::<Vec<_>>(),
        &raw[train.len()..],
        &test.iter().map(|i| i.label).collect::<Vec<_>>(),
        featurizer.name(),
        hyper,
        seed,
        serde_json::to_value(featurizer).expect("featurizer serializes"),
    )
}

/// Inner path taking precomputed features; lets tests plug in hand-built
/// feature maps (for example an exact triangle indicator).
#[allow(clippy::too_many_arguments)]
pub fn run_baseline_on_features(
    train_raw: &[RawFeatures],
    train_y: &[u8],
    test_raw: &[RawFeatures],
    test_y: &[u8],
    name: &str,
    hyper: &LogRegHyper,
    seed: u64,
    config: serde_json::Value,
) -> Result<BaselineReport, BaselineError> {
    let vocab = FeatureVocabulary::build(train_raw.iter().chain(test_raw.iter()));
    let x_train: Vec<FeatureVector> = train_raw.iter().map(|r| vocab.vectorize(r)).collect();
    let x_test: Vec<FeatureVector> = test_raw.iter().map(|r| vocab.vectorize(r)).collect();
    let model = train_logreg(&x_train, train_y, vocab.len(), hyper)?;
    Ok(BaselineReport {
        baseline: name.to_string(),
        accuracy: accuracy(&model, &x_test, test_y),
        f1: f1_score(&model, &x_test, test_y),
        train_size: train_y.len(),
        test_size: test_y.len(),
        feature_count: vocab.len(),
        seed,
        config,
    })
}
