//! Exact finite-dimensional laws: enumeration, pushforward under T,
//! transfer-matrix window marginals, closed-form carrier laws, and the
//! statistical tests used to compare samplers with them.

pub mod carrier;
pub mod palm;
pub mod stats;
pub mod table;
pub mod transfer;

use serde::{Deserialize, Serialize};

pub use carrier::{carrier_marginal_iid, carrier_marginal_markov, CarrierMarginal};
pub use palm::{palm_window_law, periodic_palm_table, pushforward_palm};
pub use stats::{chi_square_test, chi_square_two_sample, ks_test, ks_two_sample, TestResult};
pub use table::{enumerate_gibbs, pushforward_t, tv_distance, tv_vectors, DistributionTable, ENUMERATION_CUTOFF};
pub use transfer::{
    iid_binomial_marginal, limit_window_law, window_deviation, window_marginal_periodic, PeriodicFamily,
    WindowMarginal,
};

use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    pub tv: f64,
    pub violation_mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitReport {
    pub family: PeriodicFamily,
    pub m: usize,
    pub rows: Vec<LimitRow>,
    /// TV strictly decreases along the grid.
    pub decreasing: bool,
}

impl LimitReport {
    pub fn final_tv(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.tv)
    }
}

/// TV distance between the periodic window marginal and its
/// infinite-volume limit along a grid of cycle lengths.
pub fn limit_convergence_report(family: PeriodicFamily, m: usize, grid: &[usize]) -> Result<LimitReport> {
    let rows = grid
        .iter()
        .map(|&n| {
            let d = window_deviation(family, n, m)?;
            Ok(LimitRow { n, tv: d.tv, violation_mass: d.violation_mass })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing = rows.windows(2).all(|w| w[1].tv < w[0].tv);
    Ok(LimitReport { family, m, rows, decreasing })
}
