//! Coordinate-sparse tensors over topology and label modes, the mixed
//! sparse/dense representation produced as modes are contracted, and the
//! planned pipeline that turns a graph tensor into per-node embeddings.

mod dense;
mod mixed;
mod plan;

pub use dense::{DenseError, DenseTensor, Matrix};
pub use mixed::{MixedTensor, ValueSet};
pub use plan::{
    initial_embeddings, initial_node_features, plan_embedding, EmbeddingPlan, ModeWeights,
    NodeEmbeddings, PlanStep, StepOp,
};

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("index table and weights disagree: {rows} rows vs {weights} weights")]
    RowWeightMismatch { rows: usize, weights: usize },
    #[error("row {row} has {got} indices, expected {expected}")]
    RowArity { row: usize, got: usize, expected: usize },
    #[error("row {row} mode {mode}: index {index} exceeds dimension {dim}")]
    IndexOutOfRange { row: usize, mode: usize, index: usize, dim: usize },
    #[error("duplicate index row {0:?}")]
    DuplicateRow(Vec<usize>),
    #[error("label mode {mode} has two entries for the same remaining indices (rows {a} and {b})")]
    LabelModeConflict { mode: usize, a: usize, b: usize },
    #[error("label mode {mode} depends on mode {dep}, which is not a topology mode")]
    BadDependency { mode: usize, dep: usize },
    #[error("dense conversion needs {entries} entries (limit {limit})")]
    DenseTooLarge { entries: usize, limit: usize },
    #[error("no sparse modes remain to contract")]
    NoSparseModes,
    #[error("matrix has {rows} rows but the contracted mode has dimension {dim}")]
    WeightRowMismatch { rows: usize, dim: usize },
    #[error("mode is not label-like: index prefix {prefix:?} is shared by several rows")]
    NonSingletonLabelGroup { prefix: Vec<usize> },
    #[error("mode {0} is not a topology mode")]
    NotATopologyMode(usize),
    #[error("plans support exactly two topology modes, found {0}")]
    UnsupportedTopologyCount(usize),
    #[error("permutation for space {space} must be a bijection on 0..{dim}")]
    BadSpacePermutation { space: usize, dim: usize },
    #[error("step {step} ({op} on mode {mode}): expected a matrix with {expected} rows, got {got}")]
    StepShapeMismatch { step: usize, op: &'static str, mode: usize, expected: usize, got: usize },
    #[error("no weights provided for mode {0}")]
    MissingWeights(usize),
    #[error("plan does not cover every mode exactly once")]
    IncompletePlan,
    #[error(transparent)]
    Dense(#[from] DenseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Topology,
    Label,
}

/// Everything a mode carries besides its index column: its dimension, whether
/// it is topology or label, which index space it shares (topology modes in
/// the same space are permuted together), and — for label modes — the
/// topology modes whose values determine it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpec {
    pub dim: usize,
    pub kind: ModeKind,
    pub space: usize,
    pub deps: Vec<usize>,
}

impl ModeSpec {
    pub fn topology(dim: usize, space: usize) -> Self {
        ModeSpec {
            dim,
            kind: ModeKind::Topology,
            space,
            deps: Vec::new(),
        }
    }

    pub fn label(dim: usize, space: usize, deps: Vec<usize>) -> Self {
        ModeSpec {
            dim,
            kind: ModeKind::Label,
            space,
            deps,
        }
    }
}

/// Order-n tensor in coordinate form: unique index rows (kept sorted
/// lexicographically) with one scalar weight each.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor {
    modes: Vec<ModeSpec>,
    indices: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

pub const DENSE_GUARD: usize = 1_000_000;

impl SparseTensor {
    pub fn new(
        modes: Vec<ModeSpec>,
        mut indices: Vec<Vec<usize>>,
        mut weights: Vec<f64>,
    ) -> Result<Self, TensorError> {
        if indices.len() != weights.len() {
            return Err(TensorError::RowWeightMismatch {
                rows: indices.len(),
                weights: weights.len(),
            });
        }
        for (r, row) in indices.iter().enumerate() {
            if row.len() != modes.len() {
                return Err(TensorError::RowArity {
                    row: r,
                    got: row.len(),
                    expected: modes.len(),
                });
            }
            for (m, (&i, spec)) in row.iter().zip(&modes).enumerate() {
                if i >= spec.dim {
                    return Err(TensorError::IndexOutOfRange {
                        row: r,
                        mode: m,
                        index: i,
                        dim: spec.dim,
                    });
                }
            }
        }
        // canonical row order, checking uniqueness on the way
        let mut order: Vec<usize> = (0..indices.len()).collect();
        order.sort_by(|&a, &b| indices[a].cmp(&indices[b]));
        for pair in order.windows(2) {
            if indices[pair[0]] == indices[pair[1]] {
                return Err(TensorError::DuplicateRow(indices[pair[0]].clone()));
            }
        }
        let sorted_indices: Vec<Vec<usize>> =
            order.iter().map(|&i| indices[i].clone()).collect();
        let sorted_weights: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
        indices = sorted_indices;
        weights = sorted_weights;

        // label-mode invariant: fixing all other modes pins a single entry
        for (mode, spec) in modes.iter().enumerate() {
            if spec.kind != ModeKind::Label {
                continue;
            }
            for &dep in &spec.deps {
                if modes.get(dep).map(|s| s.kind) != Some(ModeKind::Topology) {
                    return Err(TensorError::BadDependency { mode, dep });
                }
            }
            let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for (r, row) in indices.iter().enumerate() {
                let mut rest = row.clone();
                rest.remove(mode);
                if let Some(&prev) = seen.get(&rest) {
                    return Err(TensorError::LabelModeConflict { mode, a: prev, b: r });
                }
                seen.insert(rest, r);
            }
        }

        Ok(SparseTensor {
            modes,
            indices,
            weights,
        })
    }

    pub fn order(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn num_entries(&self) -> usize {
        self.indices.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.indices
            .iter()
            .map(Vec::as_slice)
            .zip(self.weights.iter().copied())
    }

    /// Materializes the full dense tensor; guarded so tests cannot blow up on
    /// an oversized shape.
    pub fn to_dense(&self) -> Result<DenseTensor, TensorError> {
        let entries: usize = self.modes.iter().map(|m| m.dim).product::<usize>().max(1);
        if entries > DENSE_GUARD {
            return Err(TensorError::DenseTooLarge {
                entries,
                limit: DENSE_GUARD,
            });
        }
        let mut out = DenseTensor::zeros(self.modes.iter().map(|m| m.dim).collect());
        for (row, w) in self.rows() {
            out.set(row, w);
        }
        Ok(out)
    }

    /// Rebuilds a sparse tensor from a dense one, treating every mode as an
    /// independent topology mode. Test-support inverse of `to_dense`.
    pub fn from_dense(t: &DenseTensor) -> Self {
        let modes: Vec<ModeSpec> = t
            .shape()
            .iter()
            .enumerate()
            .map(|(i, &d)| ModeSpec::topology(d, i))
            .collect();
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        let shape = t.shape().to_vec();
        for (off, &v) in t.data().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut idx = vec![0usize; shape.len()];
            let mut rem = off;
            for i in (0..shape.len()).rev() {
                idx[i] = rem % shape[i];
                rem /= shape[i];
            }
            indices.push(idx);
            weights.push(v);
        }
        SparseTensor::new(modes, indices, weights).expect("dense source is always consistent")
    }

    /// Applies explicit per-space index bijections to all topology modes;
    /// label modes are untouched. Spaces without a permutation keep their
    /// indices.
    pub fn shuffle_with_permutations(
        &self,
        perms: &BTreeMap<usize, Vec<usize>>,
    ) -> Result<SparseTensor, TensorError> {
        for spec in &self.modes {
            if spec.kind != ModeKind::Topology {
                continue;
            }
            if let Some(p) = perms.get(&spec.space) {
                let mut seen = vec![false; spec.dim];
                let in_range = p.len() == spec.dim
                    && p.iter().all(|&t| {
                        if t >= spec.dim || seen[t] {
                            false
                        } else {
                            seen[t] = true;
                            true
                        }
                    });
                if !in_range {
                    return Err(TensorError::BadSpacePermutation {
                        space: spec.space,
                        dim: spec.dim,
                    });
                }
            }
        }
        let indices: Vec<Vec<usize>> = self
            .indices
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(m, &i)| match self.modes[m].kind {
                        ModeKind::Topology => perms
                            .get(&self.modes[m].space)
                            .map_or(i, |p| p[i]),
                        ModeKind::Label => i,
                    })
                    .collect()
            })
            .collect();
        SparseTensor::new(self.modes.clone(), indices, self.weights.clone())
    }

    /// Draws one random bijection per topology index space and applies it
    /// consistently to every topology mode in that space.
    pub fn shuffle_topology_indices(&self, rng: &mut ChaCha8Rng) -> SparseTensor {
        let mut perms: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for spec in &self.modes {
            if spec.kind == ModeKind::Topology {
                perms.entry(spec.space).or_insert_with(|| {
                    let mut p: Vec<usize> = (0..spec.dim).collect();
                    for i in (1..p.len()).rev() {
                        let j = rng.gen_range(0..=i);
                        p.swap(i, j);
                    }
                    p
                });
            }
        }
        self.shuffle_with_permutations(&perms)
            .expect("freshly drawn permutations are valid")
    }
}

/// Graph as a sparse tensor: one row per directed edge (both orientations),
/// weight 1. Modes are source, target, then one label mode per present label
/// kind — source node label, target node label, edge label — mirroring the
/// molecular table layout.
pub fn graph_to_tensor(g: &Graph) -> SparseTensor {
    let n = g.num_nodes();
    let mut modes = vec![ModeSpec::topology(n, 0), ModeSpec::topology(n, 0)];
    let node_label_dim = g
        .node_labels()
        .map(|l| l.iter().map(|&x| x as usize + 1).max().unwrap_or(1));
    let edge_label_dim = g
        .edge_labels()
        .map(|m| m.values().map(|&x| x as usize + 1).max().unwrap_or(1));
    let mut next_space = 1;
    if let Some(d) = node_label_dim {
        modes.push(ModeSpec::label(d, next_space, vec![0]));
        modes.push(ModeSpec::label(d, next_space, vec![1]));
        next_space += 1;
    }
    if let Some(d) = edge_label_dim {
        modes.push(ModeSpec::label(d, next_space, vec![0, 1]));
    }

    let mut indices = Vec::with_capacity(2 * g.num_edges());
    for &(u, v) in g.edges() {
        for (src, tgt) in [(u, v), (v, u)] {
            let mut row = vec![src, tgt];
            if let Some(labels) = g.node_labels() {
                row.push(labels[src] as usize);
                row.push(labels[tgt] as usize);
            }
            if g.edge_labels().is_some() {
                row.push(g.edge_label(src, tgt).expect("edge labels cover all edges") as usize);
            }
            indices.push(row);
        }
    }
    let weights = vec![1.0; indices.len()];
    SparseTensor::new(modes, indices, weights).expect("graph tensors are always consistent")
}

/// The labeled star used throughout the tests: carbon at node 0 bonded to two
/// hydrogens and one oxygen (double bond). Node labels: C=0, H=1, O=2; edge
/// labels: single=0, double=1.
pub fn formaldehyde() -> Graph {
    Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)])
        .unwrap()
        .with_node_labels(vec![0, 1, 1, 2])
        .unwrap()
        .with_edge_labels([((0, 1), 0), ((0, 2), 0), ((0, 3), 1)])
        .unwrap()
}
