use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Law on the nonnegative integers of the form
/// `P(0) = atom`, `P(m) = first * ratio^(m-1)` for `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarrierMarginal {
    pub atom: f64,
    pub first: f64,
    pub ratio: f64,
}

impl CarrierMarginal {
    pub fn pmf(&self, m: u64) -> f64 {
        if m == 0 {
            self.atom
        } else {
            self.first * self.ratio.powf((m - 1) as f64)
        }
    }

    /// `P(W >= m)`.
    pub fn tail(&self, m: u64) -> f64 {
        if m == 0 {
            1.0
        } else {
            self.first * self.ratio.powf((m - 1) as f64) / (1.0 - self.ratio)
        }
    }

    /// Total mass from the closed-form geometric series.
    pub fn total_mass(&self) -> f64 {
        self.atom + self.first / (1.0 - self.ratio)
    }

    pub fn mean(&self) -> f64 {
        self.first / ((1.0 - self.ratio) * (1.0 - self.ratio))
    }

    /// Probabilities `P(0), P(1), ...` until the cumulative mass reaches
    /// `1 - slack`.
    pub fn truncated(&self, slack: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        let mut m = 0u64;
        while acc < 1.0 - slack && out.len() < 1 << 20 {
            let q = self.pmf(m);
            out.push(q);
            acc += q;
            m += 1;
            if q == 0.0 && m > 1 {
                break;
            }
        }
        out
    }
}

/// Carrier law for iid Bernoulli(p), `p < 1/2`:
/// `pi_x = ((1-2p)/(1-p)) (p/(1-p))^x`.
pub fn carrier_marginal_iid(p: f64) -> Result<CarrierMarginal> {
    if !(0.0..0.5).contains(&p) {
        return Err(invalid(format!("carrier law needs p in [0, 1/2), got {p}")));
    }
    let r = p / (1.0 - p);
    let atom = (1.0 - 2.0 * p) / (1.0 - p);
    Ok(CarrierMarginal { atom, first: atom * r, ratio: r })
}

/// Carrier law for the stationary Markov configuration with
/// `P(1 | 0) = p0`, `P(1 | 1) = p1`, `p0 + p1 < 1`.
pub fn carrier_marginal_markov(p0: f64, p1: f64) -> Result<CarrierMarginal> {
    if !(p0 > 0.0 && p0 < 1.0 && (0.0..1.0).contains(&p1) && p0 + p1 < 1.0) {
        return Err(invalid(format!(
            "carrier law needs p0 in (0,1), p1 in [0,1), p0 + p1 < 1, got ({p0}, {p1})"
        )));
    }
    let q = 1.0 - p0;
    let atom = (1.0 - p0 - p1) / (q * (1.0 + p0 - p1));
    let first = p0 * (1.0 - p0 + p1) * (1.0 - p0 - p1) / (q * q * (1.0 + p0 - p1));
    Ok(CarrierMarginal { atom, first, ratio: p1 / q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_quarter() {
        let c = carrier_marginal_iid(0.25).unwrap();
        assert!((c.pmf(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.pmf(1) - 2.0 / 9.0).abs() < 1e-15);
        assert!((c.pmf(2) - 2.0 / 27.0).abs() < 1e-15);
        assert!((c.total_mass() - 1.0).abs() < 1e-14);
        let t = c.truncated(1e-14);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn iid_zero_is_point_mass() {
        let c = carrier_marginal_iid(0.0).unwrap();
        assert_eq!(c.pmf(0), 1.0);
        assert_eq!(c.pmf(3), 0.0);
        assert!(carrier_marginal_iid(0.5).is_err());
    }

    #[test]
    fn markov_closed_form() {
        let c = carrier_marginal_markov(0.2, 0.3).unwrap();
        assert!((c.pmf(0) - 25.0 / 36.0).abs() < 1e-15);
        assert!((c.pmf(1) - 0.190_972_222_222_222_2).abs() < 1e-15);
        assert!((c.ratio - 0.375).abs() < 1e-15);
        assert!((c.total_mass() - 1.0).abs() < 1e-14);
        assert!((c.truncated(1e-14).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // p0 = p1 recovers the iid law
        let m = carrier_marginal_markov(0.3, 0.3).unwrap();
        let i = carrier_marginal_iid(0.3).unwrap();
        for k in 0..10 {
            assert!((m.pmf(k) - i.pmf(k)).abs() < 1e-15);
        }
        assert!(carrier_marginal_markov(0.5, 0.5).is_err());
    }
}
