//! Balanced k-means over the spectral embedding.
//!
//! Centroids come from ordinary k-means (best of several k-means++ restarts).
//! The assignment step then places every point subject to per-cluster size
//! bounds, and assignment and centroid update alternate until the labels stop
//! changing.

pub mod kmeans;
pub mod transport;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::spectral::Embedding;

use kmeans::{best_of_restarts, cluster_means, distance_matrix, inertia};
use transport::solve_capacitated_assignment;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("need at least k = {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },
    #[error("invalid cluster config: {0}")]
    InvalidConfig(String),
    #[error("infeasible cluster sizes: {n} points into {k} clusters with bounds [{lower}, {upper}]")]
    Infeasible {
        n: usize,
        k: usize,
        lower: usize,
        upper: usize,
    },
    #[error("coordinate dimension mismatch: points have {points}, centroids {centroids}")]
    DimensionMismatch { points: usize, centroids: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AssignMode {
    /// Min-cost transportation solve.
    #[default]
    Exact,
    /// Global sort of point-centroid pairs, first fit under capacity.
    Greedy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    pub k: usize,
    /// Upper size bound; `None` means `ceil(n / k)`.
    pub capacity: Option<usize>,
    /// Enforce a lower size bound of `floor(n / k)` in exact mode.
    pub lower_bound: bool,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub mode: AssignMode,
}

impl ClusterConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            capacity: None,
            lower_bound: true,
            max_iters: 100,
            tol: 1e-6,
            seed: 0,
            restarts: 10,
            mode: AssignMode::Exact,
        }
    }

    /// Resolved `(lower, upper)` size bounds for `n` points.
    pub fn bounds(&self, n: usize) -> Result<(usize, usize), ClusterError> {
        if self.k == 0 {
            return Err(ClusterError::InvalidConfig("k must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(ClusterError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(ClusterError::InvalidConfig("restarts must be >= 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(ClusterError::InvalidConfig("tol must be >= 0".into()));
        }
        if n < self.k {
            return Err(ClusterError::TooFewPoints { n, k: self.k });
        }
        let upper = self.capacity.unwrap_or(n.div_ceil(self.k));
        let lower = if self.lower_bound { n / self.k } else { 0 };
        if upper * self.k < n || lower > upper {
            return Err(ClusterError::Infeasible {
                n,
                k: self.k,
                lower,
                upper,
            });
        }
        Ok((lower, upper))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment<T> {
    pub labels: Vec<usize>,
    pub centroids: Matrix<T>,
    pub inertia: T,
    /// Assign/update passes performed.
    pub iterations: usize,
    /// Objective after each assignment and each centroid update, in order.
    pub inertia_history: Vec<T>,
}

impl<T: Scalar> ClusterAssignment<T> {
    pub fn k(&self) -> usize {
        self.centroids.rows()
    }

    pub fn sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.labels, self.k())
    }
}

pub fn cluster_sizes(labels: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &c in labels {
        sizes[c] += 1;
    }
    sizes
}

/// k-means++ / Lloyd centroids, best of `cfg.restarts` by inertia.
pub fn kmeans_init<T: Scalar>(
    coords: &Matrix<T>,
    cfg: &ClusterConfig,
) -> Result<Matrix<T>, ClusterError> {
    cfg.bounds(coords.rows())?;
    let best = best_of_restarts(
        coords,
        cfg.k,
        cfg.restarts,
        cfg.max_iters,
        T::lit(cfg.tol),
        cfg.seed,
    );
    Ok(best.centroids)
}

fn greedy_assign<T: Scalar>(dist: &Matrix<T>, upper: usize) -> Vec<usize> {
    let (n, k) = (dist.rows(), dist.cols());
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..k).map(move |c| (i, c))).collect();
    pairs.sort_by(|&(i, c), &(j, d)| {
        dist[(i, c)]
            .partial_cmp(&dist[(j, d)])
            .expect("finite distances")
            .then(c.cmp(&d))
            .then(i.cmp(&j))
    });
    let mut labels = vec![usize::MAX; n];
    let mut sizes = vec![0; k];
    for (i, c) in pairs {
        if labels[i] == usize::MAX && sizes[c] < upper {
            labels[i] = c;
            sizes[c] += 1;
        }
    }
    labels
}

/// One size-bounded assignment at fixed centroids. Returns labels and the
/// summed squared distance.
pub fn constrained_assignment<T: Scalar>(
    coords: &Matrix<T>,
    centroids: &Matrix<T>,
    cfg: &ClusterConfig,
) -> Result<(Vec<usize>, T), ClusterError> {
    let n = coords.rows();
    if centroids.rows() != cfg.k {
        return Err(ClusterError::InvalidConfig(format!(
            "expected {} centroids, got {}",
            cfg.k,
            centroids.rows()
        )));
    }
    if coords.cols() != centroids.cols() {
        return Err(ClusterError::DimensionMismatch {
            points: coords.cols(),
            centroids: centroids.cols(),
        });
    }
    let (lower, upper) = cfg.bounds(n)?;
    let dist = distance_matrix(coords, centroids);
    match cfg.mode {
        AssignMode::Exact => {
            solve_capacitated_assignment(&dist, &vec![lower; cfg.k], &vec![upper; cfg.k]).ok_or(
                ClusterError::Infeasible {
                    n,
                    k: cfg.k,
                    lower,
                    upper,
                },
            )
        }
        AssignMode::Greedy => {
            let labels = greedy_assign(&dist, upper);
            let cost = labels.iter().enumerate().map(|(i, &c)| dist[(i, c)]).sum();
            Ok((labels, cost))
        }
    }
}

/// Alternates size-bounded assignment and centroid update, starting from
/// `centroids`, until labels repeat or `cfg.max_iters` passes.
pub fn balanced_assign<T: Scalar>(
    coords: &Matrix<T>,
    centroids: &Matrix<T>,
    cfg: &ClusterConfig,
) -> Result<ClusterAssignment<T>, ClusterError> {
    let (_, upper) = cfg.bounds(coords.rows())?;
    let mut centroids = centroids.clone();
    let mut labels: Option<Vec<usize>> = None;
    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..cfg.max_iters {
        iterations += 1;
        let (next, cost) = constrained_assignment(coords, &centroids, cfg)?;
        debug_assert!(cluster_sizes(&next, cfg.k).iter().all(|&m| m <= upper));
        history.push(cost);
        let stable = labels.as_ref() == Some(&next);
        centroids = cluster_means(coords, &next, &centroids);
        history.push(inertia(coords, &centroids, &next));
        labels = Some(next);
        if stable {
            break;
        }
    }
    let labels = labels.expect("max_iters >= 1");
    let inertia = inertia(coords, &centroids, &labels);
    Ok(ClusterAssignment {
        labels,
        centroids,
        inertia,
        iterations,
        inertia_history: history,
    })
}

pub fn cluster<T: Scalar>(
    embedding: &Embedding<T>,
    cfg: &ClusterConfig,
) -> Result<ClusterAssignment<T>, ClusterError> {
    let init = kmeans_init(&embedding.coords, cfg)?;
    balanced_assign(&embedding.coords, &init, cfg)
}
