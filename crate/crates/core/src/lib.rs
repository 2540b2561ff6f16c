//! Cluster planning for fixed wireless mesh networks.
//!
//! Pipeline: pairwise path loss is symmetrized, thresholded by the link
//! budget, mapped to similarities with an exponential kernel, embedded with
//! the symmetric normalized Laplacian, split into near-equal clusters by
//! balanced k-means, and each cluster gets a primary and secondary gateway.
//!
//! Numeric types are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI uses.

// `!(x > 0)` style checks are deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clustering;
pub mod eigen;
pub mod gateway;
pub mod ingest;
pub mod link_budget;
pub mod matrix;
pub mod plan;
pub mod report;
pub mod scalar;
pub mod similarity;
pub mod spectral;
pub mod synth;

pub use scalar::Scalar;

pub type Matrix64 = matrix::Matrix<f64>;
pub type RawPathLoss64 = ingest::RawPathLoss<f64>;
pub type PathLossMatrix64 = ingest::PathLossMatrix<f64>;
pub type LinkBudgetParams64 = link_budget::LinkBudgetParams<f64>;
pub type LinkBudgetResult64 = link_budget::LinkBudgetResult<f64>;
pub type KernelParams64 = similarity::KernelParams<f64>;
pub type SimilarityMatrix64 = similarity::SimilarityMatrix<f64>;
pub type Embedding64 = spectral::Embedding<f64>;
pub type ClusterAssignment64 = clustering::ClusterAssignment<f64>;
pub type GatewayPlan64 = gateway::GatewayPlan<f64>;
pub type PlanReport64 = plan::PlanReport<f64>;

pub type Matrix32 = matrix::Matrix<f32>;
pub type PathLossMatrix32 = ingest::PathLossMatrix<f32>;
pub type SimilarityMatrix32 = similarity::SimilarityMatrix<f32>;
pub type Embedding32 = spectral::Embedding<f32>;
pub type PlanReport32 = plan::PlanReport<f32>;
