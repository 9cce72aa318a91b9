//! Overlapping n-fold cross-validation and error-biased dataset filtering.
//!
//! The pool is split into n folds; round r trains on folds r..r+m (mod n) and
//! validates on the remaining n - m, so every item is validated exactly n - m
//! times. Items the classifier ever got wrong are selected first when the
//! final train/test splits are drawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;
use crate::logreg::{train_logreg, LogRegHyper, TrainError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("invalid fold config: need 1 <= train_folds < folds, got {train_folds} of {folds}")]
    BadFoldCounts { folds: usize, train_folds: usize },
    #[error("{items} items cannot fill {folds} folds with at least one item each")]
    FoldTooSmall { items: usize, folds: usize },
    #[error("class {class}: need {need} items, pool has {have}")]
    InfeasibleBalance { class: u8, need: usize, have: usize },
    #[error("target sizes must be even to balance classes 50/50 (train {train}, test {test})")]
    OddTarget { train: usize, test: usize },
    #[error(transparent)]
    Train(#[from] TrainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Number of folds (n).
    pub folds: usize,
    /// Folds trained on per round (m < n); each item is validated n - m times.
    pub train_folds: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Seed for the fold shuffle and the selection sampling.
    pub seed: u64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            folds: 10,
            train_folds: 7,
            train_size: 1000,
            test_size: 200,
            seed: 0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self, pool_size: usize) -> Result<(), FilterError> {
        if self.train_folds == 0 || self.train_folds >= self.folds {
            return Err(FilterError::BadFoldCounts {
                folds: self.folds,
                train_folds: self.train_folds,
            });
        }
        if pool_size < self.folds {
            return Err(FilterError::FoldTooSmall {
                items: pool_size,
                folds: self.folds,
            });
        }
        if self.train_size % 2 != 0 || self.test_size % 2 != 0 {
            return Err(FilterError::OddTarget {
                train: self.train_size,
                test: self.test_size,
            });
        }
        Ok(())
    }
}

/// Outcome of the n-round train/validate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Misclassification count per item, each in 0..=looks_per_item.
    pub error_counts: Vec<u32>,
    /// n - m: how often every item was validated.
    pub looks_per_item: usize,
    /// Correct validation predictions over all (item, round) looks.
    pub mean_validation_accuracy: f64,
    pub round_accuracy: Vec<f64>,
}

fn shuffled_indices(rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Runs the overlapping cross-validation and counts per-item errors.
///
/// Fold assignment is a seeded shuffle dealt round-robin, so folds differ in
/// size by at most one item.
pub fn overlapping_cv(
    x: &[FeatureVector],
    y: &[u8],
    dim: usize,
    cfg: &FilterConfig,
    hyper: &LogRegHyper,
) -> Result<CvReport, FilterError> {
    cfg.validate(x.len())?;
    assert_eq!(x.len(), y.len());
    let n = cfg.folds;
    let m = cfg.train_folds;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shuffled = shuffled_indices(&mut rng, x.len());
    let mut fold_of = vec![0usize; x.len()];
    for (pos, &item) in shuffled.iter().enumerate() {
        fold_of[item] = pos % n;
    }

    let mut error_counts = vec![0u32; x.len()];
    let mut round_accuracy = Vec::with_capacity(n);
    let mut total_correct = 0usize;
    let mut total_looks = 0usize;
    for r in 0..n {
        let train_folds: Vec<bool> = (0..n).map(|f| (f + n - r) % n < m).collect();
        let mut train_x = Vec::new();
        let mut train_y = Vec::new();
        let mut validate = Vec::new();
        for i in 0..x.len() {
            if train_folds[fold_of[i]] {
                train_x.push(x[i].clone());
                train_y.push(y[i]);
            } else {
                validate.push(i);
            }
        }
        let model = train_logreg(&train_x, &train_y, dim, hyper)?;
        let mut correct = 0usize;
        for &i in &validate {
            if model.predict(&x[i]) == y[i] {
                correct += 1;
            } else {
                error_counts[i] += 1;
            }
        }
        round_accuracy.push(correct as f64 / validate.len().max(1) as f64);
        total_correct += correct;
        total_looks += validate.len();
    }

    Ok(CvReport {
        error_counts,
        looks_per_item: n - m,
        mean_validation_accuracy: total_correct as f64 / total_looks.max(1) as f64,
        round_accuracy,
    })
}

/// Index sets selected into the final splits, plus any degenerate-case
/// warnings for the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub warnings: Vec<String>,
}

fn sample_without_replacement(rng: &mut ChaCha8Rng, pool: &[usize], take: usize) -> Vec<usize> {
    debug_assert!(take <= pool.len());
    let mut pool = pool.to_vec();
    for i in (1..pool.len()).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    pool.truncate(take);
    pool
}

/// Draws balanced, disjoint train/test splits biased toward items with at
/// least one validation error: per class, erroneous items are taken first
/// and any remainder is filled uniformly from the zero-error items.
pub fn filter_dataset(
    rng: &mut ChaCha8Rng,
    labels: &[u8],
    error_counts: &[u32],
    cfg: &FilterConfig,
) -> Result<FilterOutcome, FilterError> {
    assert_eq!(labels.len(), error_counts.len());
    if cfg.train_size % 2 != 0 || cfg.test_size % 2 != 0 {
        return Err(FilterError::OddTarget {
            train: cfg.train_size,
            test: cfg.test_size,
        });
    }
    let train_pc = cfg.train_size / 2;
    let test_pc = cfg.test_size / 2;
    let need = train_pc + test_pc;

    let mut warnings = Vec::new();
    let mut train = Vec::with_capacity(cfg.train_size);
    let mut test = Vec::with_capacity(cfg.test_size);
    for class in [0u8, 1u8] {
        let erroneous: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == class && error_counts[i] >= 1)
            .collect();
        let clean: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == class && error_counts[i] == 0)
            .collect();
        if erroneous.len() + clean.len() < need {
            return Err(FilterError::InfeasibleBalance {
                class,
                need,
                have: erroneous.len() + clean.len(),
            });
        }
        if erroneous.is_empty() {
            warnings.push(format!(
                "class {class}: no items with classification errors; selection fell back to uniform sampling"
            ));
        }

        let mut selected = if erroneous.len() >= need {
            sample_without_replacement(rng, &erroneous, need)
        } else {
            let mut s = erroneous.clone();
            s.extend(sample_without_replacement(rng, &clean, need - s.len()));
            s
        };
        // split assignment is uniform within the selection
        for i in (1..selected.len()).rev() {
            let j = rng.gen_range(0..=i);
            selected.swap(i, j);
        }
        train.extend(&selected[..train_pc]);
        test.extend(&selected[train_pc..]);
    }
    train.sort_unstable();
    test.sort_unstable();

    Ok(FilterOutcome {
        train,
        test,
        warnings,
    })
}
