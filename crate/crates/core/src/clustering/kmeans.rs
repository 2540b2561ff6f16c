//! Unconstrained k-means: k-means++ seeding and Lloyd iterations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum()
}

/// n x k matrix of squared point-to-centroid distances.
pub fn distance_matrix<T: Scalar>(points: &Matrix<T>, centroids: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(points.rows(), centroids.rows(), |i, c| {
        squared_distance(points.row(i), centroids.row(c))
    })
}

/// Nearest centroid per point; equal distances go to the lower cluster id.
pub fn nearest_labels<T: Scalar>(points: &Matrix<T>, centroids: &Matrix<T>) -> Vec<usize> {
    (0..points.rows())
        .map(|i| {
            let mut best = 0;
            let mut best_d = T::infinity();
            for c in 0..centroids.rows() {
                let d = squared_distance(points.row(i), centroids.row(c));
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

pub fn inertia<T: Scalar>(points: &Matrix<T>, centroids: &Matrix<T>, labels: &[usize]) -> T {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| squared_distance(points.row(i), centroids.row(c)))
        .sum()
}

/// Per-cluster means. A cluster with no members keeps `previous`'s row.
pub fn cluster_means<T: Scalar>(
    points: &Matrix<T>,
    labels: &[usize],
    previous: &Matrix<T>,
) -> Matrix<T> {
    let (k, d) = (previous.rows(), previous.cols());
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for (s, &x) in sums.row_mut(c).iter_mut().zip(points.row(i)) {
            *s = *s + x;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            sums.row_mut(c).copy_from_slice(previous.row(c));
        } else {
            let m = T::from_usize_lossy(counts[c]);
            for s in sums.row_mut(c) {
                *s = *s / m;
            }
        }
    }
    sums
}

pub fn kmeans_plus_plus<T: Scalar, R: Rng>(points: &Matrix<T>, k: usize, rng: &mut R) -> Matrix<T> {
    let n = points.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut closest: Vec<T> = (0..n)
        .map(|i| squared_distance(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: T = closest.iter().copied().sum();
        let pick = if total > T::zero() {
            let target = T::lit(rng.random::<f64>()) * total;
            let mut acc = T::zero();
            let mut pick = n - 1;
            for (i, &w) in closest.iter().enumerate() {
                acc = acc + w;
                if acc > target && w > T::zero() {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(pick);
        for (i, c) in closest.iter_mut().enumerate() {
            *c = c.min(squared_distance(points.row(i), points.row(pick)));
        }
    }
    Matrix::from_fn(k, points.cols(), |c, j| points[(chosen[c], j)])
}

#[derive(Clone, Debug)]
pub struct LloydResult<T> {
    pub centroids: Matrix<T>,
    pub labels: Vec<usize>,
    pub inertia: T,
    pub iterations: usize,
}

/// Moves each empty cluster onto the point farthest from its own centroid
/// (lowest index on ties). Returns true if anything changed.
fn repair_empty<T: Scalar>(points: &Matrix<T>, centroids: &mut Matrix<T>, labels: &mut [usize]) -> bool {
    let k = centroids.rows();
    let mut changed = false;
    loop {
        let mut counts = vec![0usize; k];
        for &c in labels.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&m| m == 0) else {
            return changed;
        };
        let mut far = None;
        let mut far_d = -T::one();
        for (i, &c) in labels.iter().enumerate() {
            if counts[c] < 2 {
                continue;
            }
            let d = squared_distance(points.row(i), centroids.row(c));
            if d > far_d {
                far = Some(i);
                far_d = d;
            }
        }
        let Some(i) = far else { return changed };
        centroids.row_mut(empty).copy_from_slice(points.row(i));
        labels[i] = empty;
        changed = true;
    }
}

pub fn lloyd<T: Scalar>(
    points: &Matrix<T>,
    initial: Matrix<T>,
    max_iters: usize,
    tol: T,
) -> LloydResult<T> {
    let mut centroids = initial;
    let mut labels = nearest_labels(points, &centroids);
    repair_empty(points, &mut centroids, &mut labels);
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let next = cluster_means(points, &labels, &centroids);
        let shift = (0..next.rows())
            .map(|c| squared_distance(next.row(c), centroids.row(c)).sqrt())
            .fold(T::zero(), T::max);
        centroids = next;
        labels = nearest_labels(points, &centroids);
        let repaired = repair_empty(points, &mut centroids, &mut labels);
        if shift <= tol && !repaired {
            break;
        }
    }
    let inertia = inertia(points, &centroids, &labels);
    LloydResult {
        centroids,
        labels,
        inertia,
        iterations,
    }
}

/// Best of `restarts` seeded Lloyd runs by (inertia, restart index). Restart
/// `r` draws from ChaCha stream `r` of `seed`, so runs are independent of
/// evaluation order.
pub fn best_of_restarts<T: Scalar>(
    points: &Matrix<T>,
    k: usize,
    restarts: usize,
    max_iters: usize,
    tol: T,
    seed: u64,
) -> LloydResult<T> {
    let mut best: Option<LloydResult<T>> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let init = kmeans_plus_plus(points, k, &mut rng);
        let run = lloyd(points, init, max_iters, tol);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("restarts >= 1")
}
