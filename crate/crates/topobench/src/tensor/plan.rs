//! Planning and executing the initial-embedding pipeline: which mode is
//! contracted when, and with which weights.
//!
//! The executor only ever contracts the last remaining sparse mode, so a plan
//! is an explicit mode ordering. Construction rules: the main topology mode is
//! processed last through a lookup whose weights are shared with the other
//! topology mode's product; label modes are deferred as late as possible but
//! must be processed before any topology mode they depend on.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

use super::dense::Matrix;
use super::mixed::MixedTensor;
use super::{ModeKind, SparseTensor, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOp {
    ModeProduct,
    LabelEmbed,
    /// Final lookup for the main mode; uses the other topology mode's matrix.
    SharedEmbed,
}

impl StepOp {
    fn name(&self) -> &'static str {
        match self {
            StepOp::ModeProduct => "mode-product",
            StepOp::LabelEmbed => "label-embed",
            StepOp::SharedEmbed => "shared-embed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStep {
    /// Original mode id in the input tensor.
    pub mode: usize,
    pub op: StepOp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingPlan {
    pub main_mode: usize,
    /// The other topology mode; the main-mode lookup reuses its matrix.
    pub shared_with: usize,
    /// Execution order. The last step is always the main-mode shared embed.
    pub steps: Vec<PlanStep>,
}

impl EmbeddingPlan {
    /// The tensor-column order the executor needs: reverse of the step
    /// sequence, so contracting the last column walks the plan.
    pub fn mode_order(&self) -> Vec<usize> {
        self.steps.iter().rev().map(|s| s.mode).collect()
    }
}

/// Builds the processing order for a tensor with exactly two topology modes.
///
/// Labels that depend on the non-main topology mode must precede its product;
/// all other labels are deferred past it, with dependency-free labels last
/// among them. Ties keep descending mode order, matching the last-mode-first
/// convention.
pub fn plan_embedding(t: &SparseTensor, main_mode: usize) -> Result<EmbeddingPlan, TensorError> {
    let modes = t.modes();
    if main_mode >= modes.len() || modes[main_mode].kind != ModeKind::Topology {
        return Err(TensorError::NotATopologyMode(main_mode));
    }
    let topology: Vec<usize> = modes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.kind == ModeKind::Topology)
        .map(|(i, _)| i)
        .collect();
    if topology.len() != 2 {
        return Err(TensorError::UnsupportedTopologyCount(topology.len()));
    }
    let other = topology[0] + topology[1] - main_mode;

    let mut before_other: Vec<usize> = Vec::new();
    let mut after_other: Vec<usize> = Vec::new();
    let mut unconstrained: Vec<usize> = Vec::new();
    for (i, spec) in modes.iter().enumerate() {
        if spec.kind != ModeKind::Label {
            continue;
        }
        for &dep in &spec.deps {
            if modes.get(dep).map(|m| m.kind) != Some(ModeKind::Topology) {
                return Err(TensorError::BadDependency { mode: i, dep });
            }
        }
        if spec.deps.contains(&other) {
            before_other.push(i);
        } else if spec.deps.contains(&main_mode) {
            after_other.push(i);
        } else {
            unconstrained.push(i);
        }
    }
    // last-mode-first convention for equals
    before_other.sort_unstable_by(|a, b| b.cmp(a));
    after_other.sort_unstable_by(|a, b| b.cmp(a));
    unconstrained.sort_unstable_by(|a, b| b.cmp(a));

    let mut steps: Vec<PlanStep> = Vec::with_capacity(modes.len());
    for m in before_other {
        steps.push(PlanStep { mode: m, op: StepOp::LabelEmbed });
    }
    steps.push(PlanStep { mode: other, op: StepOp::ModeProduct });
    for m in after_other.into_iter().chain(unconstrained) {
        steps.push(PlanStep { mode: m, op: StepOp::LabelEmbed });
    }
    steps.push(PlanStep { mode: main_mode, op: StepOp::SharedEmbed });

    Ok(EmbeddingPlan {
        main_mode,
        shared_with: other,
        steps,
    })
}

/// One weight matrix per processed mode, keyed by original mode id. The main
/// mode is served by the `shared_with` matrix and needs no entry of its own.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeWeights(pub BTreeMap<usize, Matrix>);

impl ModeWeights {
    /// Deterministic uniform(-0.1, 0.1) weights for every non-main plan step,
    /// each mapping its mode's dimension to `width` columns.
    pub fn seeded_uniform(
        t: &SparseTensor,
        plan: &EmbeddingPlan,
        width: usize,
        rng: &mut ChaCha8Rng,
    ) -> ModeWeights {
        let mut map = BTreeMap::new();
        for step in &plan.steps {
            if step.op == StepOp::SharedEmbed {
                continue;
            }
            let dim = t.modes()[step.mode].dim;
            let mut w = Matrix::zeros(dim, width);
            for i in 0..dim {
                for j in 0..width {
                    w.set(i, j, rng.gen_range(-0.1..0.1));
                }
            }
            map.insert(step.mode, w);
        }
        ModeWeights(map)
    }

    pub fn get(&self, mode: usize) -> Option<&Matrix> {
        self.0.get(&mode)
    }
}

/// Per-main-index embedding table. Nodes that never appear in the index table
/// (isolated nodes) have no row.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbeddings {
    pub vectors: BTreeMap<usize, Vec<f64>>,
    pub width: usize,
}

impl NodeEmbeddings {
    /// Dense per-node table with zero vectors for missing nodes.
    pub fn to_table(&self, num_nodes: usize) -> Vec<Vec<f64>> {
        (0..num_nodes)
            .map(|u| {
                self.vectors
                    .get(&u)
                    .cloned()
                    .unwrap_or_else(|| vec![0.0; self.width])
            })
            .collect()
    }
}

/// Runs the plan: reorders the tensor so steps always contract the last
/// column, applies mode products and label embeds with the given weights,
/// then finalizes each remaining main-index row by appending the shared
/// lookup vector and flattening the value set in insertion order.
pub fn initial_embeddings(
    t: &SparseTensor,
    weights: &ModeWeights,
    plan: &EmbeddingPlan,
) -> Result<NodeEmbeddings, TensorError> {
    let mut mt = MixedTensor::from_sparse_reordered(t, &plan.mode_order())?;

    let step_matrix = |step: &PlanStep| -> Result<&Matrix, TensorError> {
        let mode = match step.op {
            StepOp::SharedEmbed => plan.shared_with,
            _ => step.mode,
        };
        weights.get(mode).ok_or(TensorError::MissingWeights(mode))
    };

    for (i, step) in plan.steps.iter().enumerate() {
        let w = step_matrix(step)?;
        let dim = t.modes()[step.mode].dim;
        if w.rows != dim {
            return Err(TensorError::StepShapeMismatch {
                step: i,
                op: step.op.name(),
                mode: step.mode,
                expected: dim,
                got: w.rows,
            });
        }
        match step.op {
            StepOp::ModeProduct => {
                mt = mt.mode_product(w)?;
            }
            StepOp::LabelEmbed => {
                mt = mt.label_embed(w)?;
            }
            StepOp::SharedEmbed => {
                // final step: only the main mode remains; each row keys one
                // output vector, so append the lookup row and flatten here
                if i + 1 != plan.steps.len() || mt.sparse_order() != 1 {
                    return Err(TensorError::IncompletePlan);
                }
                let mut vectors = BTreeMap::new();
                let mut width = 0;
                for (row, set) in mt.rows() {
                    let mut flat = set.flatten();
                    flat.extend_from_slice(w.row(row[0]));
                    width = flat.len();
                    vectors.insert(row[0], flat);
                }
                return Ok(NodeEmbeddings { vectors, width });
            }
        }
    }
    Err(TensorError::IncompletePlan)
}

/// Initial per-node features: own embedding concatenated with the sum of the
/// neighbors' embeddings. Isolated nodes contribute a zero neighbor sum.
pub fn initial_node_features(g: &Graph, node_table: &[Vec<f64>]) -> Vec<Vec<f64>> {
    assert_eq!(
        node_table.len(),
        g.num_nodes(),
        "node table must cover all nodes"
    );
    let width = node_table.first().map_or(0, Vec::len);
    (0..g.num_nodes())
        .map(|v| {
            let mut sum = vec![0.0; width];
            for &u in g.neighbors(v) {
                for (s, x) in sum.iter_mut().zip(&node_table[u]) {
                    *s += x;
                }
            }
            let mut out = node_table[v].clone();
            out.extend(sum);
            out
        })
        .collect()
}
