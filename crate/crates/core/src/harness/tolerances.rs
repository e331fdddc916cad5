//! Versioned pass/fail thresholds and sample sizes for every scenario.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

const DEFAULTS: &str = include_str!("tolerances.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub version: u32,
    pub exact_tv: f64,
    pub normalization: f64,
    pub eigen_residual: f64,
    pub detailed_balance: f64,
    pub limit_tv: f64,
    pub high_density_tv: f64,
    /// Smallest p-value counted as agreement.
    pub p_value: f64,
    /// Width of the moment bands, in standard errors.
    pub sigma: f64,
    /// Certified truncation error for left buffers.
    pub buffer_tolerance: f64,
    pub samples: BTreeMap<String, usize>,
    pub time_limits_s: BTreeMap<String, f64>,
}

impl Tolerances {
    /// The checked-in defaults.
    pub fn defaults() -> Self {
        serde_json::from_str(DEFAULTS).expect("bundled tolerances parse")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Sample size for `key`; unknown keys are a programming error.
    pub fn samples(&self, key: &str) -> usize {
        *self.samples.get(key).unwrap_or_else(|| panic!("no sample size for {key:?}"))
    }

    pub fn time_limit(&self, key: &str) -> f64 {
        *self.time_limits_s.get(key).unwrap_or_else(|| panic!("no time limit for {key:?}"))
    }

    /// Scale every sample size by `factor`, keeping at least 100. Used for
    /// quick smoke runs; acceptance runs use factor 1.
    pub fn scaled(mut self, factor: f64) -> Self {
        for v in self.samples.values_mut() {
            *v = ((*v as f64 * factor).round() as usize).max(100);
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_load() {
        let t = Tolerances::defaults();
        assert_eq!(t.exact_tv, 1e-12);
        assert_eq!(t.samples("conditioned_walk"), 100_000);
        assert_eq!(t.clone().scaled(0.0).samples("carrier"), 100);
    }
}
