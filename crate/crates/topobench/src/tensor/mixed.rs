//! Mixed sparse/dense tensor representation.
//!
//! An index table over the remaining sparse modes, with a *set* of dense
//! subtensors per row. Contracting the last sparse mode against a matrix
//! partitions rows by their index prefix and sums the outer products of each
//! row's values with the matching matrix row, so the contracted mode turns
//! from sparse into one new trailing dense mode on every subtensor. Label
//! modes skip the outer product: the matrix row is appended to the value set
//! instead, growing memory linearly.

use super::dense::{DenseTensor, Matrix};
use super::{ModeSpec, SparseTensor, TensorError};

/// The per-row set of dense subtensors. Within one tensor every row carries
/// the same signature (element count and shapes), so flattened outputs line
/// up downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSet(pub Vec<DenseTensor>);

impl ValueSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Row-major flatten of every element, in insertion order.
    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().flat_map(|t| t.flatten().iter().copied()).collect()
    }

    fn outer_vec(&self, v: &[f64]) -> ValueSet {
        ValueSet(self.0.iter().map(|t| t.outer_vec(v)).collect())
    }

    fn add_assign(&mut self, other: &ValueSet) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.add_assign(b);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedTensor {
    modes: Vec<ModeSpec>,
    indices: Vec<Vec<usize>>,
    values: Vec<ValueSet>,
}

impl MixedTensor {
    /// Starts from a sparse tensor: every row's value set is one scalar.
    pub fn from_sparse(t: &SparseTensor) -> MixedTensor {
        MixedTensor {
            modes: t.modes().to_vec(),
            indices: t.rows().map(|(r, _)| r.to_vec()).collect(),
            values: t
                .rows()
                .map(|(_, w)| ValueSet(vec![DenseTensor::scalar(w)]))
                .collect(),
        }
    }

    /// Starts from a sparse tensor with its modes reordered: column i of the
    /// result is column `mode_order[i]` of the input. Rows are re-sorted into
    /// the new lexicographic order.
    pub fn from_sparse_reordered(
        t: &SparseTensor,
        mode_order: &[usize],
    ) -> Result<MixedTensor, TensorError> {
        if mode_order.len() != t.order() {
            return Err(TensorError::IncompletePlan);
        }
        let mut seen = vec![false; t.order()];
        for &m in mode_order {
            if m >= t.order() || seen[m] {
                return Err(TensorError::IncompletePlan);
            }
            seen[m] = true;
        }
        let modes: Vec<ModeSpec> = mode_order.iter().map(|&m| t.modes()[m].clone()).collect();
        let mut rows: Vec<(Vec<usize>, f64)> = t
            .rows()
            .map(|(r, w)| (mode_order.iter().map(|&m| r[m]).collect(), w))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(MixedTensor {
            modes,
            indices: rows.iter().map(|(r, _)| r.clone()).collect(),
            values: rows
                .iter()
                .map(|(_, w)| ValueSet(vec![DenseTensor::scalar(*w)]))
                .collect(),
        })
    }

    pub fn sparse_order(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn num_rows(&self) -> usize {
        self.indices.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[usize], &ValueSet)> + '_ {
        self.indices.iter().map(Vec::as_slice).zip(self.values.iter())
    }

    fn last_mode(&self) -> Result<&ModeSpec, TensorError> {
        self.modes.last().ok_or(TensorError::NoSparseModes)
    }

    /// Mode product over the last remaining sparse mode: rows are partitioned
    /// by their index prefix, and each group's result is the sum of every
    /// member's value set outer-multiplied with the matrix row its last index
    /// selects. One sparse mode disappears; every subtensor gains one
    /// trailing dense mode of width `w.cols`.
    ///
    /// Rows are kept sorted, so groups are contiguous and the summation order
    /// (ascending last index) is deterministic.
    pub fn mode_product(&self, w: &Matrix) -> Result<MixedTensor, TensorError> {
        let last = self.last_mode()?;
        if w.rows != last.dim {
            return Err(TensorError::WeightRowMismatch {
                rows: w.rows,
                dim: last.dim,
            });
        }
        let prefix_len = self.modes.len() - 1;
        let mut indices: Vec<Vec<usize>> = Vec::new();
        let mut values: Vec<ValueSet> = Vec::new();
        for (row, set) in self.rows() {
            let prefix = &row[..prefix_len];
            let contribution = set.outer_vec(w.row(row[prefix_len]));
            match indices.last() {
                Some(last_prefix) if last_prefix.as_slice() == prefix => {
                    values
                        .last_mut()
                        .expect("values track indices")
                        .add_assign(&contribution);
                }
                _ => {
                    indices.push(prefix.to_vec());
                    values.push(contribution);
                }
            }
        }
        Ok(MixedTensor {
            modes: self.modes[..prefix_len].to_vec(),
            indices,
            values,
        })
    }

    /// Label embedding over the last remaining sparse mode: requires every
    /// prefix group to be a singleton (the label-mode property). The index
    /// table simply drops the mode; each value set gains one new element, the
    /// matrix row selected by the label index.
    pub fn label_embed(&self, w: &Matrix) -> Result<MixedTensor, TensorError> {
        let last = self.last_mode()?;
        if w.rows != last.dim {
            return Err(TensorError::WeightRowMismatch {
                rows: w.rows,
                dim: last.dim,
            });
        }
        let prefix_len = self.modes.len() - 1;
        for pair in self.indices.windows(2) {
            if pair[0][..prefix_len] == pair[1][..prefix_len] {
                return Err(TensorError::NonSingletonLabelGroup {
                    prefix: pair[0][..prefix_len].to_vec(),
                });
            }
        }
        let indices: Vec<Vec<usize>> = self
            .indices
            .iter()
            .map(|row| row[..prefix_len].to_vec())
            .collect();
        let values: Vec<ValueSet> = self
            .rows()
            .map(|(row, set)| {
                let mut new_set = set.clone();
                new_set
                    .0
                    .push(DenseTensor::from_vec(vec![w.cols], w.row(row[prefix_len]).to_vec()));
                new_set
            })
            .collect();
        Ok(MixedTensor {
            modes: self.modes[..prefix_len].to_vec(),
            indices,
            values,
        })
    }

    /// Densifies a single-element-per-set tensor: remaining sparse modes
    /// first, then the dense modes accumulated by contractions. Only valid
    /// while every value set holds exactly one subtensor (no label embeds),
    /// which is the regime the dense oracle covers.
    pub fn to_dense(&self) -> Result<DenseTensor, TensorError> {
        let dense_shape: Vec<usize> = match self.values.first() {
            Some(set) => {
                assert!(
                    set.len() == 1,
                    "to_dense requires single-subtensor value sets"
                );
                set.0[0].shape().to_vec()
            }
            None => Vec::new(),
        };
        let mut shape: Vec<usize> = self.modes.iter().map(|m| m.dim).collect();
        shape.extend(&dense_shape);
        let entries: usize = shape.iter().product::<usize>().max(1);
        if entries > super::DENSE_GUARD {
            return Err(TensorError::DenseTooLarge {
                entries,
                limit: super::DENSE_GUARD,
            });
        }
        let mut out = DenseTensor::zeros(shape);
        let mut idx = vec![0usize; self.modes.len() + dense_shape.len()];
        for (row, set) in self.rows() {
            idx[..row.len()].copy_from_slice(row);
            let sub = &set.0[0];
            for (off, &v) in sub.flatten().iter().enumerate() {
                let mut rem = off;
                for i in (0..dense_shape.len()).rev() {
                    idx[row.len() + i] = rem % dense_shape[i];
                    rem /= dense_shape[i];
                }
                out.set(&idx, v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::tensor::{graph_to_tensor, ModeKind};

    fn two_mode_tensor(rows: Vec<(Vec<usize>, f64)>, dims: (usize, usize)) -> SparseTensor {
        SparseTensor::new(
            vec![
                ModeSpec::topology(dims.0, 0),
                ModeSpec::topology(dims.1, 0),
            ],
            rows.iter().map(|(r, _)| r.clone()).collect(),
            rows.iter().map(|(_, w)| *w).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_product_with_unique_prefixes_keeps_values() {
        let t = two_mode_tensor(vec![(vec![0, 1], 2.0), (vec![1, 0], 3.0)], (2, 2));
        let mt = MixedTensor::from_sparse(&t);
        let out = mt.mode_product(&Matrix::identity(2)).unwrap();
        assert_eq!(out.sparse_order(), 1);
        let rows: Vec<(Vec<usize>, Vec<f64>)> = out
            .rows()
            .map(|(r, s)| (r.to_vec(), s.flatten()))
            .collect();
        // scalar 2 ⊗ e1 = [0, 2]; scalar 3 ⊗ e0 = [3, 0]
        assert_eq!(rows, vec![(vec![0], vec![0.0, 2.0]), (vec![1], vec![3.0, 0.0])]);
    }

    #[test]
    fn grouped_rows_sum_their_matrix_rows() {
        // rows (0,1) and (0,2) with scalar 1 values collapse to one row (0)
        // holding w1 + w2
        let t = two_mode_tensor(vec![(vec![0, 1], 1.0), (vec![0, 2], 1.0)], (1, 3));
        let w = Matrix::from_rows(vec![
            vec![9.0, 9.0],
            vec![1.0, 2.0],
            vec![10.0, 20.0],
        ]);
        let out = MixedTensor::from_sparse(&t).mode_product(&w).unwrap();
        assert_eq!(out.num_rows(), 1);
        let (row, set) = out.rows().next().unwrap();
        assert_eq!(row, &[0]);
        assert_eq!(set.flatten(), vec![11.0, 22.0]);
    }

    #[test]
    fn path_graph_product_matches_neighbor_sums() {
        // P3: node 1 sees w0 + w2, nodes 0 and 2 see w1
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let t = graph_to_tensor(&g);
        let w = Matrix::from_rows(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let out = MixedTensor::from_sparse(&t).mode_product(&w).unwrap();
        let rows: Vec<(Vec<usize>, Vec<f64>)> = out
            .rows()
            .map(|(r, s)| (r.to_vec(), s.flatten()))
            .collect();
        assert_eq!(
            rows,
            vec![
                (vec![0], vec![0.0, 1.0, 0.0]),
                (vec![1], vec![1.0, 0.0, 1.0]),
                (vec![2], vec![0.0, 1.0, 0.0]),
            ]
        );
    }

    #[test]
    fn product_matches_dense_oracle_on_random_tensors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let order = rng.gen_range(2..=4);
            let dims: Vec<usize> = (0..order).map(|_| rng.gen_range(1..=5)).collect();
            let modes: Vec<ModeSpec> =
                dims.iter().enumerate().map(|(i, &d)| ModeSpec::topology(d, i)).collect();
            let mut seen = std::collections::BTreeSet::new();
            let mut indices = Vec::new();
            let mut weights = Vec::new();
            for _ in 0..rng.gen_range(1..=20) {
                let row: Vec<usize> = dims.iter().map(|&d| rng.gen_range(0..d)).collect();
                if seen.insert(row.clone()) {
                    indices.push(row);
                    weights.push(rng.gen_range(-2.0..2.0));
                }
            }
            let t = SparseTensor::new(modes, indices, weights).unwrap();
            let cols = rng.gen_range(1..=4);
            let w_rows: Vec<Vec<f64>> = (0..dims[order - 1])
                .map(|_| (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let w = Matrix::from_rows(w_rows);

            let mixed = MixedTensor::from_sparse(&t).mode_product(&w).unwrap();
            let dense = t.to_dense().unwrap().mode_product(order - 1, &w).unwrap();
            assert!(mixed.to_dense().unwrap().approx_eq(&dense, 1e-9));
        }
    }

    #[test]
    fn label_embed_appends_exactly_one_vector() {
        let t = graph_to_tensor(&crate::tensor::formaldehyde());
        let mt = MixedTensor::from_sparse(&t);
        assert_eq!(t.modes()[4].kind, ModeKind::Label);
        let w = Matrix::from_rows(vec![vec![0.5, 0.5], vec![7.0, 8.0]]);
        let out = mt.label_embed(&w).unwrap();
        assert_eq!(out.sparse_order(), 4);
        assert_eq!(out.num_rows(), 6);
        for (row, set) in out.rows() {
            assert_eq!(set.len(), 2);
            // the double bond (label 1) sits on the carbon-oxygen rows
            let expected: &[f64] = if row == [0, 3, 0, 2] || row == [3, 0, 2, 0] {
                &[7.0, 8.0]
            } else {
                &[0.5, 0.5]
            };
            assert_eq!(set.0[1].flatten(), expected);
        }
    }

    #[test]
    fn label_embed_rejects_shared_prefixes() {
        // a genuine topology mode: node 0 has two neighbors, so the prefix
        // (0) is shared and embedding must refuse
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let mt = MixedTensor::from_sparse(&graph_to_tensor(&g));
        let err = mt.label_embed(&Matrix::identity(3)).unwrap_err();
        assert_eq!(
            err,
            TensorError::NonSingletonLabelGroup { prefix: vec![0] }
        );
    }

    #[test]
    fn reordered_construction_sorts_rows() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let t = graph_to_tensor(&g);
        let mt = MixedTensor::from_sparse_reordered(&t, &[1, 0]).unwrap();
        let rows: Vec<Vec<usize>> = mt.rows().map(|(r, _)| r.to_vec()).collect();
        assert_eq!(rows, vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]);
    }
}
