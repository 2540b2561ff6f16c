//! Exponential similarity kernel over path loss.
//!
//! `S_ij = exp(-alpha * PL_ij)` for usable links, `0` otherwise, with
//! `alpha = ln(sim_lo / sim_hi) / (PL_max - PL_min)`. Only the ratio
//! `S(PL_min) / S(PL_max) = sim_lo / sim_hi` is pinned; `S(PL_min)` itself is
//! not forced to `sim_lo`.

use thiserror::Error;

use crate::ingest::{is_no_path, PathLossMatrix};
use crate::link_budget::{is_usable, LinkBudgetResult};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("degenerate path-loss range: PL_max {pl_max} dB <= PL_min {pl_min} dB")]
    DegenerateRange { pl_min: f64, pl_max: f64 },
    #[error("invalid kernel parameters: {0}")]
    InvalidParams(&'static str),
    #[error("no finite positive off-diagonal path loss to derive PL_min from")]
    NoFiniteLinks,
    #[error("invalid similarity matrix: {0}")]
    InvalidMatrix(String),
}

pub const DEFAULT_SIM_LO: f64 = 0.9;
pub const DEFAULT_SIM_HI: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams<T> {
    /// Target similarity at the lowest path loss.
    pub sim_lo: T,
    /// Target similarity at the worst usable path loss.
    pub sim_hi: T,
    pub pl_max_db: T,
    pub pl_min_db: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(pl_min_db: T, pl_max_db: T) -> Self {
        Self {
            sim_lo: T::lit(DEFAULT_SIM_LO),
            sim_hi: T::lit(DEFAULT_SIM_HI),
            pl_max_db,
            pl_min_db,
        }
    }

    pub fn validate(&self) -> Result<(), SimilarityError> {
        if !(self.sim_hi > T::zero() && self.sim_lo < T::one()) {
            return Err(SimilarityError::InvalidParams(
                "sim_lo and sim_hi must lie in (0, 1)",
            ));
        }
        if !(self.sim_hi < self.sim_lo) {
            return Err(SimilarityError::InvalidParams("sim_hi must be below sim_lo"));
        }
        if !(self.pl_min_db > T::zero()) || !self.pl_max_db.is_finite() {
            return Err(SimilarityError::InvalidParams(
                "PL_min must be > 0 dB and PL_max finite",
            ));
        }
        if !(self.pl_min_db < self.pl_max_db) {
            return Err(SimilarityError::DegenerateRange {
                pl_min: self.pl_min_db.as_f64(),
                pl_max: self.pl_max_db.as_f64(),
            });
        }
        Ok(())
    }
}

pub fn compute_alpha<T: Scalar>(k: &KernelParams<T>) -> Result<T, SimilarityError> {
    k.validate()?;
    Ok((k.sim_lo / k.sim_hi).ln() / (k.pl_max_db - k.pl_min_db))
}

/// Smallest finite off-diagonal loss that is strictly positive.
pub fn min_positive_path_loss<T: Scalar>(pl: &PathLossMatrix<T>) -> Option<T> {
    let n = pl.n();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| pl.get(i, j))
        .filter(|v| v.is_finite() && *v > T::zero())
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min(v))))
}

/// Number of unordered node pairs whose link does not close.
pub fn count_unusable_links<T: Scalar>(pl: &PathLossMatrix<T>, pl_max_db: T) -> usize {
    let r = LinkBudgetResult { pl_max_db };
    let n = pl.n();
    (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .filter(|&(i, j)| !is_usable(pl.get(i, j), &r))
        .count()
}

/// Weighted adjacency: symmetric, zero diagonal, entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix<T> {
    values: Matrix<T>,
    alpha: T,
}

impl<T: Scalar> SimilarityMatrix<T> {
    /// Wraps a precomputed matrix after checking the invariants. `alpha` is
    /// informational only.
    pub fn from_values(values: Matrix<T>, alpha: T) -> Result<Self, SimilarityError> {
        if !values.is_square() {
            return Err(SimilarityError::InvalidMatrix("not square".into()));
        }
        let n = values.rows();
        for i in 0..n {
            if values[(i, i)] != T::zero() {
                return Err(SimilarityError::InvalidMatrix(format!(
                    "diagonal entry {i} is not zero"
                )));
            }
            for j in 0..i {
                let v = values[(i, j)];
                if v != values[(j, i)] {
                    return Err(SimilarityError::InvalidMatrix(format!(
                        "asymmetric at ({i},{j})"
                    )));
                }
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(SimilarityError::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self { values, alpha })
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

pub fn build_similarity<T: Scalar>(
    pl: &PathLossMatrix<T>,
    k: &KernelParams<T>,
) -> Result<SimilarityMatrix<T>, SimilarityError> {
    let alpha = compute_alpha(k)?;
    let n = pl.n();
    let values = Matrix::from_fn(n, n, |i, j| {
        let loss = pl.get(i, j);
        if i == j || is_no_path(loss) || loss > k.pl_max_db {
            T::zero()
        } else {
            (-alpha * loss).exp()
        }
    });
    Ok(SimilarityMatrix { values, alpha })
}
