//! Synthetic topological graph-classification benchmarks.
//!
//! Two binary tasks built purely on topology: does a graph contain exactly
//! one triangle or none (**Triangles**), and is the hop distance between two
//! planted 4-cliques below a threshold (**Clique Distance**). The crate
//! generates candidate pools, filters them with a deliberately feature-starved
//! logistic regression so that spuriously easy items are kept out, verifies
//! every label against exact combinatorial oracles, and evaluates
//! kernel-feature baselines. A sparse-tensor pipeline turns graphs into
//! permutation-shuffled initial node embeddings for downstream models.
//!
//! The `examples/` directory is the guided tour — one runnable example per
//! capability:
//!
//! ```text
//! cargo run --release --example generate_triangles
//! cargo run --release --example generate_clique_distance
//! cargo run --release --example undermanned_filter
//! cargo run --release --example kernel_baselines
//! cargo run --release --example tensor_embeddings
//! ```
//!
//! The same functionality is scriptable through the thin `topobench` binary
//! (`generate | filter | verify | baseline | tensor-demo`).

pub mod features;
pub mod filter;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kernels;
pub mod logreg;
pub mod pipeline;
pub mod tensor;

pub use graph::{CliqueSet, Distance, Graph, GraphError, Triangle};
pub use generate::{
    attach_clique, attach_clique_shared, gen_ba_graph, gen_clique_item, gen_er_graph,
    gen_knn_graph, gen_triangle_item, item_seed, reduce_triangles, seeded_rng, AttachmentMode,
    CliqueGenParams, DatasetItem, GenError, Provenance, TriangleGenParams,
};
pub use features::{undermanned_features, FeatureVector, FeatureVocabulary, RawFeatures};
pub use filter::{filter_dataset, overlapping_cv, CvReport, FilterConfig, FilterError};
pub use kernels::{
    graphlet_counts_exact, graphlet_counts_sampled, run_baseline, wl_features, BaselineFeaturizer,
    BaselineReport, GraphletConfig, WlConfig, WlRefinery,
};
pub use logreg::{accuracy, f1_score, train_logreg, LinearModel, LogRegHyper};
pub use pipeline::{
    cmd_baseline, cmd_filter, cmd_generate, cmd_tensor_demo, cmd_verify, BaselineName,
    PipelineError, RunConfig, TaskKind,
};
pub use tensor::{
    graph_to_tensor, initial_embeddings, initial_node_features, plan_embedding, DenseTensor,
    EmbeddingPlan, Matrix, MixedTensor, ModeKind, ModeSpec, ModeWeights, NodeEmbeddings,
    SparseTensor, TensorError,
};
