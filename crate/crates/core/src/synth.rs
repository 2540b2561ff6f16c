//! Synthetic scenarios: random node layouts with log-distance path loss plus
//! a linear foliage term and per-direction log-normal shadowing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::ingest::{NodeRecord, NodeRoster, RawPathLoss};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Specific foliage attenuation at 925 MHz, dB per meter.
pub const DEFAULT_FOLIAGE_DB_PER_M: f64 = 0.18;

const METERS_PER_DEG_LAT: f64 = 111_320.0;
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error("degenerate region {width} x {height} m (zero area)")]
    DegenerateRegion { width: f64, height: f64 },
    #[error("could not place node {0} at the minimum separation")]
    Crowded(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub region_width_m: f64,
    pub region_height_m: f64,
    pub frequency_hz: f64,
    pub path_loss_exponent: f64,
    pub foliage_db_per_m: f64,
    /// Fraction of each link length that passes through foliage.
    pub foliage_fraction: f64,
    pub shadowing_sigma_db: f64,
    /// Nodes closer than this are re-drawn.
    pub min_separation_m: f64,
    /// South-west corner of the region, used only for roster coordinates.
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_nodes: 155,
            region_width_m: 6_500.0,
            region_height_m: 6_500.0,
            frequency_hz: 925e6,
            path_loss_exponent: 3.0,
            foliage_db_per_m: DEFAULT_FOLIAGE_DB_PER_M,
            foliage_fraction: 0.1,
            shadowing_sigma_db: 4.0,
            min_separation_m: 1.0,
            origin_lat: 13.25,
            origin_lon: 144.62,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.into()));
        if self.n_nodes < 2 {
            return bad("n_nodes must be >= 2");
        }
        if !(self.frequency_hz > 0.0) {
            return bad("frequency_hz must be > 0");
        }
        if !(self.path_loss_exponent >= 2.0) {
            return bad("path_loss_exponent must be >= 2");
        }
        if !(self.foliage_db_per_m >= 0.0) {
            return bad("foliage_db_per_m must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.foliage_fraction) {
            return bad("foliage_fraction must be in [0, 1]");
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return bad("shadowing_sigma_db must be >= 0");
        }
        if !(self.min_separation_m >= 0.0) {
            return bad("min_separation_m must be >= 0");
        }
        if !(self.region_width_m > 0.0 && self.region_height_m > 0.0)
            || !(self.region_width_m * self.region_height_m).is_finite()
        {
            return Err(SynthError::DegenerateRegion {
                width: self.region_width_m,
                height: self.region_height_m,
            });
        }
        Ok(())
    }
}

/// Free-space loss at 1 m, `20 log10(4 pi f / c)`.
pub fn reference_loss_db<T: Scalar>(frequency_hz: T) -> T {
    let four_pi = T::lit(4.0 * std::f64::consts::PI);
    T::lit(20.0) * (four_pi * frequency_hz / T::lit(SPEED_OF_LIGHT_M_S)).log10()
}

/// Deterministic part of the loss for a link of `distance_m`.
pub fn mean_path_loss_db<T: Scalar>(cfg: &SynthConfig, distance_m: T) -> T {
    let pl0 = reference_loss_db(T::lit(cfg.frequency_hz));
    let spread = T::lit(10.0 * cfg.path_loss_exponent) * distance_m.log10();
    let foliage = T::lit(cfg.foliage_db_per_m * cfg.foliage_fraction) * distance_m;
    pl0 + spread + foliage
}

/// A generated node layout and its raw (non-reciprocal) loss matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    pub roster: NodeRoster,
    /// Node positions in meters within the region, in roster order.
    pub positions_m: Vec<(f64, f64)>,
    pub raw: RawPathLoss<T>,
}

pub fn synth_scenario<T: Scalar>(cfg: &SynthConfig) -> Result<Scenario<T>, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_nodes;

    let min_sep2 = cfg.min_separation_m * cfg.min_separation_m;
    let mut positions: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let mut placed = false;
        for _ in 0..MAX_REDRAWS {
            let p = (
                rng.random::<f64>() * cfg.region_width_m,
                rng.random::<f64>() * cfg.region_height_m,
            );
            let clear = positions.iter().all(|q| {
                let (dx, dy) = (p.0 - q.0, p.1 - q.1);
                dx * dx + dy * dy >= min_sep2 && (dx, dy) != (0.0, 0.0)
            });
            if clear {
                positions.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SynthError::Crowded(i));
        }
    }

    let width = n.to_string().len().max(3);
    let cos_lat = cfg.origin_lat.to_radians().cos();
    let nodes = positions
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| NodeRecord {
            id: format!("N{:0width$}", i + 1),
            latitude: Some(cfg.origin_lat + y / METERS_PER_DEG_LAT),
            longitude: Some(cfg.origin_lon + x / (METERS_PER_DEG_LAT * cos_lat)),
            elevation_m: None,
        })
        .collect();
    let roster = NodeRoster::new(nodes).expect("generated ids are unique");

    let shadow = Normal::new(0.0, cfg.shadowing_sigma_db)
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let mut values = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (dx, dy) = (positions[i].0 - positions[j].0, positions[i].1 - positions[j].1);
            let d = T::lit(dx.hypot(dy));
            let noise = if cfg.shadowing_sigma_db > 0.0 {
                T::lit(shadow.sample(&mut rng))
            } else {
                T::zero()
            };
            // shadowing can pull very short links below zero
            values[(i, j)] = (mean_path_loss_db(cfg, d) + noise).max(T::zero());
        }
    }

    Ok(Scenario {
        roster,
        positions_m: positions,
        raw: RawPathLoss { values },
    })
}
