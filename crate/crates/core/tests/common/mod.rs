//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the code paths it checks.

#![allow(dead_code)]

use meshplan::matrix::Matrix;
use meshplan::similarity::SimilarityMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Number of connected components of the graph `w[i][j] > 0`.
pub fn union_find_components(w: &Matrix<f64>) -> usize {
    let n = w.rows();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)] > 0.0 {
                uf.union(i, j);
            }
        }
    }
    (0..n).filter(|&i| uf.find(i) == i).count()
}

/// Random symmetric similarity matrix with `components` disjoint connected
/// blocks, each of at least two nodes. Within a block a random spanning tree
/// guarantees connectivity and extra edges appear with probability `density`.
pub fn random_block_similarity(
    rng: &mut impl Rng,
    n: usize,
    components: usize,
    density: f64,
) -> SimilarityMatrix<f64> {
    assert!(n >= 2 * components);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // split points so each block has >= 2 nodes
    let mut sizes = vec![2; components];
    for _ in 0..(n - 2 * components) {
        let b = rng.random_range(0..components);
        sizes[b] += 1;
    }
    let mut w = Matrix::<f64>::zeros(n, n);
    let mut start = 0;
    for size in sizes {
        let block = &order[start..start + size];
        for t in 1..size {
            let parent = block[rng.random_range(0..t)];
            let x = rng.random_range(0.05..1.0);
            w[(block[t], parent)] = x;
            w[(parent, block[t])] = x;
        }
        for a in 0..size {
            for b in 0..a {
                if w[(block[a], block[b])] == 0.0 && rng.random_bool(density) {
                    let x = rng.random_range(0.05..1.0);
                    w[(block[a], block[b])] = x;
                    w[(block[b], block[a])] = x;
                }
            }
        }
        start += size;
    }
    SimilarityMatrix::from_values(w, 0.0).unwrap()
}

/// Dense random similarity matrix, entries zero with probability `sparsity`.
pub fn random_similarity(rng: &mut impl Rng, n: usize, sparsity: f64) -> SimilarityMatrix<f64> {
    let mut w = Matrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            if !rng.random_bool(sparsity) {
                let x = rng.random_range(0.0..1.0);
                w[(i, j)] = x;
                w[(j, i)] = x;
            }
        }
    }
    SimilarityMatrix::from_values(w, 0.0).unwrap()
}

/// Calls `f` with every labeling in `0..k` of `n` items.
pub fn for_each_labeling(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; n];
    loop {
        f(&labels);
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minimum of `sum_i |x_i - centroid[label_i]|^2` over labelings whose
/// cluster sizes lie in `[lower, upper]`.
pub fn brute_force_assignment(
    points: &Matrix<f64>,
    centroids: &Matrix<f64>,
    lower: usize,
    upper: usize,
) -> Option<f64> {
    let (n, k) = (points.rows(), centroids.rows());
    let mut best: Option<f64> = None;
    for_each_labeling(n, k, |labels| {
        let mut sizes = vec![0; k];
        for &c in labels {
            sizes[c] += 1;
        }
        if sizes.iter().all(|&s| s >= lower && s <= upper) {
            let cost: f64 = labels
                .iter()
                .enumerate()
                .map(|(i, &c)| sq_dist(points.row(i), centroids.row(c)))
                .sum();
            best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
    });
    best
}

/// Within-cluster sum of squares to cluster means for a labeling.
pub fn partition_inertia(points: &Matrix<f64>, labels: &[usize], k: usize) -> f64 {
    let d = points.cols();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        let mean: Vec<f64> = (0..d)
            .map(|j| members.iter().map(|&i| points[(i, j)]).sum::<f64>() / members.len() as f64)
            .collect();
        total += members
            .iter()
            .map(|&i| sq_dist(points.row(i), &mean))
            .sum::<f64>();
    }
    total
}

/// Best within-cluster sum of squares over all size-bounded partitions.
pub fn brute_force_partition(points: &Matrix<f64>, k: usize, lower: usize, upper: usize) -> f64 {
    let mut best = f64::INFINITY;
    for_each_labeling(points.rows(), k, |labels| {
        let mut sizes = vec![0; k];
        for &c in labels {
            sizes[c] += 1;
        }
        if sizes.iter().all(|&s| s >= lower && s <= upper) {
            best = best.min(partition_inertia(points, labels, k));
        }
    });
    best
}

/// Gateway score by explicit double loop.
pub fn brute_gateway_scores(s: &Matrix<f64>, labels: &[usize]) -> Vec<f64> {
    let n = s.rows();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            if labels[j] != labels[i] {
                acc += s[(i, j)];
            }
        }
        out[i] = acc;
    }
    out
}

/// `S_inter[G, G]` built by masking first, then gathering by explicit loops.
pub fn brute_inter_gateway(s: &Matrix<f64>, labels: &[usize], gateways: &[usize]) -> Vec<Vec<f64>> {
    let n = s.rows();
    let mut masked = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            masked[i][j] = if labels[i] == labels[j] { 0.0 } else { s[(i, j)] };
        }
    }
    gateways
        .iter()
        .map(|&a| gateways.iter().map(|&b| masked[a][b]).collect())
        .collect()
}

/// Random raw path-loss matrix; each off-diagonal cell is `NA` (`+inf`) with
/// probability `p_na`, the diagonal is arbitrary non-negative junk.
pub fn random_raw(rng: &mut impl Rng, n: usize, p_na: f64) -> Matrix<f64> {
    Matrix::from_fn(n, n, |i, j| {
        if i != j && rng.random_bool(p_na) {
            f64::INFINITY
        } else {
            rng.random_range(0.0..200.0)
        }
    })
}
