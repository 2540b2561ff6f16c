//! Maximum tolerable path loss from transmitter, antenna and receiver figures.

use thiserror::Error;

use crate::ingest::is_no_path;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum BudgetError {
    #[error("invalid link budget: {0}")]
    Invalid(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudgetParams<T> {
    pub tx_power_dbm: T,
    pub tx_gain_dbi: T,
    pub rx_gain_dbi: T,
    /// Cable, connector and other losses, carried with a negative sign.
    pub system_losses_db: T,
    pub rx_sensitivity_dbm: T,
    pub link_margin_db: T,
}

impl<T: Scalar> LinkBudgetParams<T> {
    /// 30 dBm radio, 6 dBi antennas at both ends, -11.62 dB of system losses,
    /// -113.41 dBm sensitivity and no margin: 143.79 dB.
    pub fn reference() -> Self {
        Self {
            tx_power_dbm: T::lit(30.0),
            tx_gain_dbi: T::lit(6.0),
            rx_gain_dbi: T::lit(6.0),
            system_losses_db: T::lit(-11.62),
            rx_sensitivity_dbm: T::lit(-113.41),
            link_margin_db: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<(), BudgetError> {
        let all = [
            self.tx_power_dbm,
            self.tx_gain_dbi,
            self.rx_gain_dbi,
            self.system_losses_db,
            self.rx_sensitivity_dbm,
            self.link_margin_db,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(BudgetError::Invalid("all parameters must be finite"));
        }
        if self.link_margin_db < T::zero() {
            return Err(BudgetError::Invalid("link margin must be >= 0 dB"));
        }
        if self.system_losses_db > T::zero() {
            return Err(BudgetError::Invalid("system losses must be <= 0 dB"));
        }
        if self.rx_sensitivity_dbm >= self.tx_power_dbm {
            return Err(BudgetError::Invalid(
                "receiver sensitivity must be below transmit power",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudgetResult<T> {
    pub pl_max_db: T,
}

pub fn compute_pl_max<T: Scalar>(
    p: &LinkBudgetParams<T>,
) -> Result<LinkBudgetResult<T>, BudgetError> {
    p.validate()?;
    let pl_max_db = p.tx_power_dbm + p.tx_gain_dbi + p.rx_gain_dbi + p.system_losses_db
        - p.rx_sensitivity_dbm
        - p.link_margin_db;
    Ok(LinkBudgetResult { pl_max_db })
}

/// A link closes when its loss does not exceed `pl_max_db` (equality counts).
pub fn is_usable<T: Scalar>(pl_db: T, r: &LinkBudgetResult<T>) -> bool {
    !is_no_path(pl_db) && !pl_db.is_nan() && pl_db <= r.pl_max_db
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(v: [f64; 6]) -> LinkBudgetParams<f64> {
        LinkBudgetParams {
            tx_power_dbm: v[0],
            tx_gain_dbi: v[1],
            rx_gain_dbi: v[2],
            system_losses_db: v[3],
            rx_sensitivity_dbm: v[4],
            link_margin_db: v[5],
        }
    }

    #[test]
    fn reference_budget() {
        // 30 + 6 + 6 - 11.62 + 113.41 - 0 = 143.79
        let r = compute_pl_max(&LinkBudgetParams::<f64>::reference()).unwrap();
        assert!((r.pl_max_db - 143.79).abs() < 0.005);
        let r = compute_pl_max(&params([30.0, 6.0, 6.0, -11.62, -113.41, 0.0])).unwrap();
        assert!((r.pl_max_db - 143.79).abs() < 1e-9);
    }

    #[test]
    fn sensitivity_only() {
        let r = compute_pl_max(&params([0.0, 0.0, 0.0, 0.0, -100.0, 0.0])).unwrap();
        assert_eq!(r.pl_max_db, 100.0);
    }

    #[test]
    fn margin_subtracts() {
        let r = compute_pl_max(&params([30.0, 6.0, 6.0, -11.62, -113.41, 10.0])).unwrap();
        assert!((r.pl_max_db - 133.79).abs() < 1e-9);
    }

    #[test]
    fn f32_budget() {
        let r = compute_pl_max(&LinkBudgetParams::<f32>::reference()).unwrap();
        assert!((r.pl_max_db - 143.79).abs() < 0.005);
    }

    #[test]
    fn usable_boundary_inclusive() {
        let r = LinkBudgetResult { pl_max_db: 143.79 };
        assert!(is_usable(143.79, &r));
        assert!(!is_usable(143.80, &r));
        assert!(is_usable(0.0, &r));
        assert!(!is_usable(f64::INFINITY, &r));
        assert!(!is_usable(f64::INFINITY, &LinkBudgetResult { pl_max_db: f64::MAX }));
    }

    #[test]
    fn invalid_params() {
        assert!(compute_pl_max(&params([30.0, 6.0, 6.0, -11.62, -113.41, -1.0])).is_err());
        assert!(compute_pl_max(&params([30.0, 6.0, 6.0, 1.0, -113.41, 0.0])).is_err());
        assert!(compute_pl_max(&params([30.0, 6.0, 6.0, -1.0, 30.0, 0.0])).is_err());
        assert!(compute_pl_max(&params([f64::NAN, 6.0, 6.0, -1.0, -90.0, 0.0])).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn shifts_are_linear(delta in 0.0f64..20.0, which in 0usize..3) {
                let base = LinkBudgetParams::<f64>::reference();
                let b = compute_pl_max(&base).unwrap().pl_max_db;
                let mut up = base;
                match which {
                    0 => up.tx_power_dbm += delta,
                    1 => up.tx_gain_dbi += delta,
                    _ => up.rx_gain_dbi += delta,
                }
                let u = compute_pl_max(&up).unwrap().pl_max_db;
                prop_assert!((u - b - delta).abs() < 1e-9);

                let mut m = base;
                m.link_margin_db += delta;
                let mm = compute_pl_max(&m).unwrap().pl_max_db;
                prop_assert!((b - mm - delta).abs() < 1e-9);
            }
        }
    }
}
