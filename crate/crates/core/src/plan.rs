//! End-to-end planning run: files in, cluster plan out.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::clustering::{cluster, AssignMode, ClusterAssignment, ClusterConfig, ClusterError};
use crate::gateway::{build_gateway_plan, GatewayError, GatewayPlan};
use crate::ingest::{self, IngestError, NodeRoster, PathLossMatrix};
use crate::link_budget::{compute_pl_max, BudgetError, LinkBudgetParams, LinkBudgetResult};
use crate::scalar::Scalar;
use crate::similarity::{
    build_similarity, count_unusable_links, min_positive_path_loss, KernelParams,
    SimilarityError, SimilarityMatrix, DEFAULT_SIM_HI, DEFAULT_SIM_LO,
};
use crate::spectral::{connected_components, degree_vector, embed, Embedding, SpectralError};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("link budget: {0}")]
    Budget(#[from] BudgetError),
    #[error("similarity: {0}")]
    Similarity(#[from] SimilarityError),
    #[error("spectral: {0}")]
    Spectral(#[from] SpectralError),
    #[error("clustering: {0}")]
    Cluster(#[from] ClusterError),
    #[error("gateway: {0}")]
    Gateway(#[from] GatewayError),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl PlanError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PlanError::Config(_) | PlanError::Budget(_) => 2,
            PlanError::Ingest(_) => 3,
            PlanError::Similarity(SimilarityError::InvalidParams(_)) => 2,
            PlanError::Similarity(_) | PlanError::Spectral(_) | PlanError::Gateway(_) => 4,
            PlanError::Cluster(ClusterError::InvalidConfig(_)) => 2,
            PlanError::Cluster(_) => 5,
            PlanError::Output(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSection {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub system_losses_db: f64,
    pub rx_sensitivity_dbm: f64,
    pub link_margin_db: f64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        let p = LinkBudgetParams::<f64>::reference();
        Self {
            tx_power_dbm: p.tx_power_dbm,
            tx_gain_dbi: p.tx_gain_dbi,
            rx_gain_dbi: p.rx_gain_dbi,
            system_losses_db: p.system_losses_db,
            rx_sensitivity_dbm: p.rx_sensitivity_dbm,
            link_margin_db: p.link_margin_db,
        }
    }
}

impl BudgetSection {
    pub fn params<T: Scalar>(&self) -> LinkBudgetParams<T> {
        LinkBudgetParams {
            tx_power_dbm: T::lit(self.tx_power_dbm),
            tx_gain_dbi: T::lit(self.tx_gain_dbi),
            rx_gain_dbi: T::lit(self.rx_gain_dbi),
            system_losses_db: T::lit(self.system_losses_db),
            rx_sensitivity_dbm: T::lit(self.rx_sensitivity_dbm),
            link_margin_db: T::lit(self.link_margin_db),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub sim_lo: f64,
    pub sim_hi: f64,
    /// Overrides the data-derived minimum path loss.
    pub pl_min_db: Option<f64>,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            sim_lo: DEFAULT_SIM_LO,
            sim_hi: DEFAULT_SIM_HI,
            pl_min_db: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Exact,
    Greedy,
}

impl From<ModeName> for AssignMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Exact => AssignMode::Exact,
            ModeName::Greedy => AssignMode::Greedy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringSection {
    pub k: usize,
    pub capacity: Option<usize>,
    pub lower_bound: bool,
    /// Embedding dimension; defaults to `k` (capped at `n - 1`).
    pub dim: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub mode: ModeName,
}

impl Default for ClusteringSection {
    fn default() -> Self {
        let c = ClusterConfig::new(10);
        Self {
            k: c.k,
            capacity: None,
            lower_bound: c.lower_bound,
            dim: None,
            seed: c.seed,
            restarts: c.restarts,
            max_iters: c.max_iters,
            tol: c.tol,
            mode: ModeName::Exact,
        }
    }
}

impl ClusteringSection {
    pub fn cluster_config(&self) -> ClusterConfig {
        ClusterConfig {
            k: self.k,
            capacity: self.capacity,
            lower_bound: self.lower_bound,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            restarts: self.restarts,
            mode: self.mode.into(),
        }
    }
}

/// Planning run configuration, normally read from a TOML file.
///
/// ```toml
/// roster = "roster.csv"
/// pathloss = "pathloss.csv"
/// output_dir = "plan-out"
///
/// [link_budget]
/// rx_sensitivity_dbm = -113.41
///
/// [kernel]
/// sim_lo = 0.9
/// sim_hi = 0.01
///
/// [clustering]
/// k = 10
/// seed = 1
/// ```
#[derive(Clone, Debug, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub roster: Option<PathBuf>,
    pub pathloss: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub dump_eigenvalues: bool,
    pub link_budget: BudgetSection,
    pub kernel: KernelSection,
    pub clustering: ClusteringSection,
}

impl PlanConfig {
    /// Parses TOML. Relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self, PlanError> {
        let mut cfg: PlanConfig =
            toml::from_str(text).map_err(|e| PlanError::Config(e.to_string()))?;
        if let Some(base) = base_dir {
            for p in [&mut cfg.roster, &mut cfg.pathloss, &mut cfg.output_dir]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PlanError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PlanError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent())
    }

    fn require<'a>(field: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, PlanError> {
        field
            .as_deref()
            .ok_or_else(|| PlanError::Config(format!("missing `{name}`")))
    }

    pub fn roster_path(&self) -> Result<&Path, PlanError> {
        Self::require(&self.roster, "roster")
    }

    pub fn pathloss_path(&self) -> Result<&Path, PlanError> {
        Self::require(&self.pathloss, "pathloss")
    }

    pub fn output_path(&self) -> Result<&Path, PlanError> {
        Self::require(&self.output_dir, "output_dir")
    }
}

/// Everything a planning run produces, before it is written to disk.
#[derive(Clone, Debug)]
pub struct PlanReport<T> {
    pub roster: NodeRoster,
    pub path_loss: PathLossMatrix<T>,
    pub budget: LinkBudgetResult<T>,
    pub pl_min_db: T,
    pub similarity: SimilarityMatrix<T>,
    pub unusable_links: usize,
    /// Component id per node of the usable-link graph.
    pub components: Vec<usize>,
    pub isolated: Vec<usize>,
    pub embedding: Embedding<T>,
    pub assignment: ClusterAssignment<T>,
    pub gateways: GatewayPlan<T>,
    pub gateway_scores: Vec<T>,
    pub mode: AssignMode,
}

impl<T: Scalar> PlanReport<T> {
    pub fn n(&self) -> usize {
        self.roster.len()
    }

    pub fn k(&self) -> usize {
        self.assignment.k()
    }

    pub fn component_count(&self) -> usize {
        self.components.iter().max().map_or(0, |m| m + 1)
    }
}

/// Runs every stage in memory on already-loaded inputs.
pub fn plan_from_inputs<T: Scalar>(
    roster: NodeRoster,
    raw: &ingest::RawPathLoss<T>,
    cfg: &PlanConfig,
) -> Result<PlanReport<T>, PlanError> {
    let path_loss = ingest::symmetrize(raw);
    let budget = compute_pl_max(&cfg.link_budget.params::<T>())?;

    let pl_min_db = match cfg.kernel.pl_min_db {
        Some(v) => T::lit(v),
        None => min_positive_path_loss(&path_loss).ok_or(SimilarityError::NoFiniteLinks)?,
    };
    let kernel = KernelParams {
        sim_lo: T::lit(cfg.kernel.sim_lo),
        sim_hi: T::lit(cfg.kernel.sim_hi),
        pl_max_db: budget.pl_max_db,
        pl_min_db,
    };
    let similarity = build_similarity(&path_loss, &kernel)?;
    let unusable_links = count_unusable_links(&path_loss, budget.pl_max_db);
    let components = connected_components(&similarity);
    let isolated = degree_vector(&similarity)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == T::zero())
        .map(|(i, _)| i)
        .collect();

    let n = roster.len();
    let ccfg = cfg.clustering.cluster_config();
    ccfg.bounds(n)?;
    let d = cfg
        .clustering
        .dim
        .unwrap_or_else(|| ccfg.k.min(n.saturating_sub(1)));
    let embedding = embed(&similarity, d)?;
    let assignment = cluster(&embedding, &ccfg)?;
    let gateways = build_gateway_plan(&similarity, &assignment.labels)?;
    let gateway_scores = crate::gateway::gateway_scores(&similarity, &assignment.labels)?;

    Ok(PlanReport {
        roster,
        path_loss,
        budget,
        pl_min_db,
        similarity,
        unusable_links,
        components,
        isolated,
        embedding,
        assignment,
        gateways,
        gateway_scores,
        mode: ccfg.mode,
    })
}

/// Loads the configured roster and path-loss files and runs the pipeline.
pub fn run_plan<T: Scalar>(cfg: &PlanConfig) -> Result<PlanReport<T>, PlanError> {
    let roster = ingest::load_roster(cfg.roster_path()?)?;
    let raw = ingest::load_raw_pathloss::<T>(cfg.pathloss_path()?, &roster)?;
    plan_from_inputs(roster, &raw, cfg)
}
