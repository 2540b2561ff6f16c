//! Gateway scoring and selection.
//!
//! A node's gateway score is its total similarity to nodes in other clusters.
//! Each cluster's top scorer becomes its primary gateway and the runner-up its
//! secondary; ties go to the lower node index.

use std::collections::HashSet;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum GatewayError {
    #[error("label vector has {labels} entries for {n} nodes")]
    LabelLength { labels: usize, n: usize },
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("gateway index {index} out of range for {n} nodes")]
    OutOfRange { index: usize, n: usize },
    #[error("gateway index {0} listed twice")]
    Duplicate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Member,
    Primary,
    Secondary,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Member => "member",
            Role::Primary => "primary_gw",
            Role::Secondary => "secondary_gw",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterGateways<T> {
    pub cluster_id: usize,
    pub primary: usize,
    pub secondary: Option<usize>,
    /// `(node, score)` for every member, in node order.
    pub scores: Vec<(usize, T)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GatewayPlan<T> {
    pub clusters: Vec<ClusterGateways<T>>,
    /// Ascending cluster id, primary before secondary.
    pub gateway_set: Vec<usize>,
    pub s_g: Matrix<T>,
    pub s_inter_g: Matrix<T>,
}

impl<T: Scalar> GatewayPlan<T> {
    pub fn role_of(&self, node: usize) -> Role {
        for c in &self.clusters {
            if c.primary == node {
                return Role::Primary;
            }
            if c.secondary == Some(node) {
                return Role::Secondary;
            }
        }
        Role::Member
    }
}

fn check_labels<T: Scalar>(s: &SimilarityMatrix<T>, labels: &[usize]) -> Result<(), GatewayError> {
    if labels.len() != s.n() {
        return Err(GatewayError::LabelLength {
            labels: labels.len(),
            n: s.n(),
        });
    }
    Ok(())
}

pub fn gateway_scores<T: Scalar>(
    s: &SimilarityMatrix<T>,
    labels: &[usize],
) -> Result<Vec<T>, GatewayError> {
    check_labels(s, labels)?;
    Ok((0..s.n())
        .map(|i| {
            s.values()
                .row(i)
                .iter()
                .zip(labels)
                .filter(|(_, &c)| c != labels[i])
                .map(|(&v, _)| v)
                .sum()
        })
        .collect())
}

/// Primary and secondary per cluster. Clusters are numbered `0..k` where
/// `k = max(label) + 1`; every one must be non-empty.
pub fn select_gateways<T: Scalar>(
    scores: &[T],
    labels: &[usize],
) -> Result<Vec<ClusterGateways<T>>, GatewayError> {
    if scores.len() != labels.len() {
        return Err(GatewayError::LabelLength {
            labels: labels.len(),
            n: scores.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let members: Vec<(usize, T)> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == c)
            .map(|(i, _)| (i, scores[i]))
            .collect();
        let mut ranked = members.clone();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite scores")
                .then(a.0.cmp(&b.0))
        });
        let Some(&(primary, _)) = ranked.first() else {
            return Err(GatewayError::EmptyCluster(c));
        };
        out.push(ClusterGateways {
            cluster_id: c,
            primary,
            secondary: ranked.get(1).map(|r| r.0),
            scores: members,
        });
    }
    Ok(out)
}

/// `S[G, G]` for an index list `G` of distinct valid nodes.
pub fn restrict_to_gateways<T: Scalar>(
    s: &Matrix<T>,
    gateways: &[usize],
) -> Result<Matrix<T>, GatewayError> {
    let mut seen = HashSet::with_capacity(gateways.len());
    for &g in gateways {
        if g >= s.rows() {
            return Err(GatewayError::OutOfRange {
                index: g,
                n: s.rows(),
            });
        }
        if !seen.insert(g) {
            return Err(GatewayError::Duplicate(g));
        }
    }
    Ok(s.gather(gateways))
}

/// Copy of `S` with every same-cluster entry zeroed.
pub fn inter_cluster_filter<T: Scalar>(
    s: &SimilarityMatrix<T>,
    labels: &[usize],
) -> Result<Matrix<T>, GatewayError> {
    check_labels(s, labels)?;
    let n = s.n();
    Ok(Matrix::from_fn(n, n, |i, j| {
        if labels[i] != labels[j] {
            s.get(i, j)
        } else {
            T::zero()
        }
    }))
}

pub fn build_gateway_plan<T: Scalar>(
    s: &SimilarityMatrix<T>,
    labels: &[usize],
) -> Result<GatewayPlan<T>, GatewayError> {
    let scores = gateway_scores(s, labels)?;
    let clusters = select_gateways(&scores, labels)?;
    let gateway_set: Vec<usize> = clusters
        .iter()
        .flat_map(|c| std::iter::once(c.primary).chain(c.secondary))
        .collect();
    let s_g = restrict_to_gateways(s.values(), &gateway_set)?;
    let s_inter_g = restrict_to_gateways(&inter_cluster_filter(s, labels)?, &gateway_set)?;
    Ok(GatewayPlan {
        clusters,
        gateway_set,
        s_g,
        s_inter_g,
    })
}
