//! Dense order-n tensors and matrices, kept deliberately simple: they are the
//! reference route that the mixed-representation pipeline is checked against.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DenseError {
    #[error("mode {mode} out of range for order {order}")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("matrix has {rows} rows but mode {mode} has dimension {dim}")]
    RowMismatch { rows: usize, mode: usize, dim: usize },
    #[error("dense tensor would need {entries} entries (limit {limit})")]
    TooLarge { entries: usize, limit: usize },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Returns a copy with rows moved through `perm`: row u goes to perm[u].
    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for (u, &target) in perm.iter().enumerate() {
            out.data[target * self.cols..(target + 1) * self.cols]
                .copy_from_slice(self.row(u));
        }
        out
    }
}

/// Row-major dense tensor of arbitrary order. An order-0 tensor is a single
/// scalar (shape [], one entry).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product::<usize>().max(1);
        DenseTensor {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(v: f64) -> Self {
        DenseTensor {
            shape: Vec::new(),
            data: vec![v],
        }
    }

    pub fn from_vec(shape: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>().max(1), data.len());
        DenseTensor { shape, data }
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        for (i, &d) in idx.iter().enumerate() {
            debug_assert!(d < self.shape[i]);
            off = off * self.shape[i] + d;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    pub fn add_assign(&mut self, other: &DenseTensor) {
        assert_eq!(self.shape, other.shape, "shape mismatch in add");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Outer product with a vector: appends one trailing mode of the vector's
    /// length. For a scalar this is just the scaled vector.
    pub fn outer_vec(&self, v: &[f64]) -> DenseTensor {
        let mut shape = self.shape.clone();
        shape.push(v.len());
        let mut data = Vec::with_capacity(self.data.len() * v.len());
        for &a in &self.data {
            for &b in v {
                data.push(a * b);
            }
        }
        DenseTensor { shape, data }
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> &[f64] {
        &self.data
    }

    /// Mode product with W along `mode`: contracts that mode against W's
    /// rows, replacing its dimension with W's column count. Direct
    /// element-by-element application of the definition.
    pub fn mode_product(&self, mode: usize, w: &Matrix) -> Result<DenseTensor, DenseError> {
        if mode >= self.shape.len() {
            return Err(DenseError::ModeOutOfRange {
                mode,
                order: self.shape.len(),
            });
        }
        if w.rows != self.shape[mode] {
            return Err(DenseError::RowMismatch {
                rows: w.rows,
                mode,
                dim: self.shape[mode],
            });
        }
        let mut out_shape = self.shape.clone();
        out_shape[mode] = w.cols;
        let mut out = DenseTensor::zeros(out_shape);

        let mut idx = vec![0usize; self.shape.len()];
        for (off, &x) in self.data.iter().enumerate() {
            // decode the row-major offset into a multi-index
            let mut rem = off;
            for i in (0..self.shape.len()).rev() {
                idx[i] = rem % self.shape[i];
                rem /= self.shape[i];
            }
            let ik = idx[mode];
            for jk in 0..w.cols {
                idx[mode] = jk;
                let o = out.offset(&idx);
                out.data[o] += x * w.get(ik, jk);
            }
            idx[mode] = ik;
        }
        Ok(out)
    }

    /// Reorders modes: output mode i is input mode `perm[i]`.
    pub fn permute_modes(&self, perm: &[usize]) -> DenseTensor {
        assert_eq!(perm.len(), self.shape.len());
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut out = DenseTensor::zeros(shape);
        let mut idx = vec![0usize; self.shape.len()];
        let mut out_idx = vec![0usize; self.shape.len()];
        for (off, &x) in self.data.iter().enumerate() {
            let mut rem = off;
            for i in (0..self.shape.len()).rev() {
                idx[i] = rem % self.shape[i];
                rem /= self.shape[i];
            }
            for (i, &p) in perm.iter().enumerate() {
                out_idx[i] = idx[p];
            }
            let o = out.offset(&out_idx);
            out.data[o] = x;
        }
        out
    }

    /// Applies per-mode index permutations in place of the identity: entry at
    /// idx moves to perms[mode][idx]. A None permutation leaves a mode alone.
    pub fn permute_indices(&self, perms: &[Option<&[usize]>]) -> DenseTensor {
        assert_eq!(perms.len(), self.shape.len());
        let mut out = DenseTensor::zeros(self.shape.clone());
        let mut idx = vec![0usize; self.shape.len()];
        let mut out_idx = vec![0usize; self.shape.len()];
        for (off, &x) in self.data.iter().enumerate() {
            let mut rem = off;
            for i in (0..self.shape.len()).rev() {
                idx[i] = rem % self.shape[i];
                rem /= self.shape[i];
            }
            for i in 0..idx.len() {
                out_idx[i] = perms[i].map_or(idx[i], |p| p[idx[i]]);
            }
            let o = out.offset(&out_idx);
            out.data[o] = x;
        }
        out
    }

    pub fn approx_eq(&self, other: &DenseTensor, tol: f64) -> bool {
        self.shape == other.shape
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_roundtrip() {
        let t = DenseTensor::scalar(2.5);
        assert_eq!(t.order(), 0);
        assert_eq!(t.flatten(), &[2.5]);
        let v = t.outer_vec(&[1.0, 2.0]);
        assert_eq!(v.shape(), &[2]);
        assert_eq!(v.flatten(), &[2.5, 5.0]);
    }

    #[test]
    fn identity_mode_product_is_identity() {
        let t = DenseTensor::from_vec(vec![2, 3], (0..6).map(f64::from).collect());
        let out = t.mode_product(1, &Matrix::identity(3)).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn order2_mode2_product_is_matmul() {
        // T is 2x3, W is 3x2: T x_2 W == T * W
        let t = DenseTensor::from_vec(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let w = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        let out = t.mode_product(1, &w).unwrap();
        assert_eq!(out.shape(), &[2, 2]);
        // row 0: [1,2,3] -> [1+3, 2+3]; row 1: [4,5,6] -> [4+6, 5+6]
        assert_eq!(out.flatten(), &[4.0, 5.0, 10.0, 11.0]);
    }

    #[test]
    fn mode_product_shape_errors() {
        let t = DenseTensor::from_vec(vec![2, 2], vec![0.0; 4]);
        assert!(matches!(
            t.mode_product(5, &Matrix::identity(2)),
            Err(DenseError::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            t.mode_product(0, &Matrix::identity(3)),
            Err(DenseError::RowMismatch { .. })
        ));
    }

    #[test]
    fn permute_modes_transposes() {
        let t = DenseTensor::from_vec(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let p = t.permute_modes(&[1, 0]);
        assert_eq!(p.shape(), &[3, 2]);
        assert_eq!(p.get(&[2, 1]), t.get(&[1, 2]));
    }

    #[test]
    fn matrix_row_permutation() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let p = m.permute_rows(&[2, 0, 1]);
        assert_eq!(p.row(2), &[1.0, 2.0]);
        assert_eq!(p.row(0), &[3.0, 4.0]);
        assert_eq!(p.row(1), &[5.0, 6.0]);
    }
}
