//! Symmetric normalized Laplacian and spectral embedding.
//!
//! `L = I - D^{-1/2} S D^{-1/2}` with `D_ii = sum_j S_ij`. A node with zero
//! degree gets an identity row and column, so it sits at the origin of the
//! embedding.

use std::collections::VecDeque;

use log::warn;
use thiserror::Error;

use crate::eigen::{symmetric_eigen, EigenError, SymmetricEigen};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("embedding dimension {d} out of range for {n} nodes (need 1 <= d < n)")]
    DimensionOutOfRange { d: usize, n: usize },
    #[error("eigensolver failed: {0}")]
    Eigen(#[from] EigenError),
}

pub fn degree_vector<T: Scalar>(s: &SimilarityMatrix<T>) -> Vec<T> {
    (0..s.n()).map(|i| s.values().row(i).iter().copied().sum()).collect()
}

pub fn normalized_laplacian<T: Scalar>(s: &SimilarityMatrix<T>) -> Matrix<T> {
    let n = s.n();
    let inv_sqrt: Vec<T> = degree_vector(s)
        .into_iter()
        .map(|d| {
            if d > T::zero() {
                T::one() / d.sqrt()
            } else {
                T::zero()
            }
        })
        .collect();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = T::one() - s.get(i, i) * inv_sqrt[i] * inv_sqrt[i];
        for j in 0..i {
            let v = -s.get(i, j) * inv_sqrt[i] * inv_sqrt[j];
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    l
}

/// Connected components of the graph with an edge wherever `S_ij > 0`.
/// Returns a component id per node, numbered in order of first appearance.
pub fn connected_components<T: Scalar>(s: &SimilarityMatrix<T>) -> Vec<usize> {
    let n = s.n();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if comp[v] == usize::MAX && s.get(u, v) > T::zero() {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn component_count<T: Scalar>(s: &SimilarityMatrix<T>) -> usize {
    connected_components(s).into_iter().max().map_or(0, |m| m + 1)
}

/// Full eigendecomposition of the normalized Laplacian, ascending.
pub fn laplacian_spectrum<T: Scalar>(
    s: &SimilarityMatrix<T>,
) -> Result<SymmetricEigen<T>, SpectralError> {
    Ok(symmetric_eigen(&normalized_laplacian(s))?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<T> {
    /// n x d; column `c` is the eigenvector of the `(c + 1)`-th smallest
    /// eigenvalue.
    pub coords: Matrix<T>,
    /// The `d + 1` smallest eigenvalues, including the dropped trivial one.
    pub eigenvalues: Vec<T>,
    pub d: usize,
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub fn fix_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < T::zero()) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

pub fn embed<T: Scalar>(s: &SimilarityMatrix<T>, d: usize) -> Result<Embedding<T>, SpectralError> {
    let n = s.n();
    if d == 0 || d >= n {
        return Err(SpectralError::DimensionOutOfRange { d, n });
    }
    let components = component_count(s);
    if components > 1 {
        warn!(
            "similarity graph has {components} connected components; \
             only the single smallest eigenvector is dropped"
        );
    }
    let eig = laplacian_spectrum(s)?;
    let mut coords = Matrix::zeros(n, d);
    for c in 0..d {
        let mut v = eig.vector(c + 1);
        fix_sign(&mut v);
        for (r, x) in v.into_iter().enumerate() {
            coords[(r, c)] = x;
        }
    }
    Ok(Embedding {
        coords,
        eigenvalues: eig.values[..=d].to_vec(),
        d,
    })
}
