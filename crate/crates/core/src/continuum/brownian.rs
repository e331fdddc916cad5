//! Periodic Brownian motion with drift, reached through its random-walk
//! approximants. Nothing here samples a continuum Gaussian path directly:
//! a sample is a cyclic i.i.d. configuration at grid `eps`, conditioned by
//! rejection, together with its rescaled path.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::continuum::path::{rescale_path, PlPath};
use crate::continuum::zigzag::Acceptance;
use crate::error::{invalid, Result};
use crate::lattice::{cyclic_carrier, BinaryConfiguration, LatticePath};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianGrid {
    /// Drift of the limit.
    pub drift: f64,
    pub period: f64,
    pub eps: f64,
    /// Carrier bound in continuum units, for the bounded variant.
    pub bound: Option<f64>,
}

impl BrownianGrid {
    pub fn new(drift: f64, period: f64, eps: f64, bound: Option<f64>) -> Result<Self> {
        if !(drift > 0.0 && period > 0.0 && eps > 0.0) {
            return Err(invalid(format!("need c, L, eps > 0, got ({drift}, {period}, {eps})")));
        }
        if eps * drift >= 1.0 {
            return Err(invalid(format!("eps = {eps} too coarse for drift {drift}")));
        }
        if let Some(k) = bound {
            if !(k > 0.0) {
                return Err(invalid(format!("carrier bound must be positive, got {k}")));
            }
        }
        let g = Self { drift, period, eps, bound };
        if g.sites() == 0 {
            return Err(invalid(format!("grid eps = {eps} leaves no sites in period {period}")));
        }
        Ok(g)
    }

    /// `floor(L / eps^2)`.
    pub fn sites(&self) -> usize {
        floor_guarded(self.period / (self.eps * self.eps)) as usize
    }

    pub fn p(&self) -> f64 {
        (1.0 - self.eps * self.drift) / 2.0
    }

    /// Discrete carrier bound `floor(K / eps)`.
    pub fn lattice_bound(&self) -> Option<u64> {
        self.bound.map(|k| floor_guarded(k / self.eps) as u64)
    }
}

/// Floor that forgives rounding just below an integer, so `1 / 0.1^2` is 100.
fn floor_guarded(x: f64) -> f64 {
    (x + 1e-9 * x.abs().max(1.0)).floor()
}

/// Event that, on a path over `[0, N]`, every drop below a running maximum
/// stays within `k`, with the maximum taken cyclically. Under `S_N > 0` this
/// is the event that the periodic carrier never exceeds `k`.
pub fn bounded_drop_event(path: &[i64], k: i64) -> bool {
    let n = path.len() - 1;
    let s_n = path[n];
    let mut back = i64::MIN;
    for &s in path {
        back = back.max(s);
        if back - s > k {
            return false;
        }
    }
    // max over m >= n of S_m - S_N, compared with S_n
    let mut fwd = i64::MIN;
    for m in (0..=n).rev() {
        fwd = fwd.max(path[m] - s_n);
        if fwd - path[m] > k {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBrownianSample {
    pub config: BinaryConfiguration,
    /// `eps S_{t / eps^2}` over one period.
    pub path: PlPath<f64>,
}

pub struct PeriodicBrownian {
    pub grid: BrownianGrid,
    pub floor: f64,
    pub stats: Acceptance,
}

impl PeriodicBrownian {
    pub fn new(grid: BrownianGrid, floor: f64) -> Self {
        Self { grid, floor, stats: Acceptance::default() }
    }

    /// Cyclic i.i.d. configuration conditioned on fewer than `N/2` particles
    /// and, when bounded, on the carrier staying within `floor(K/eps)`.
    pub fn sample_config(&mut self, rng: &mut Rng) -> Result<BinaryConfiguration> {
        let n = self.grid.sites();
        let p = self.grid.p();
        let k = self.grid.lattice_bound();
        loop {
            self.stats.check(self.floor)?;
            self.stats.attempts += 1;
            let sites: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < p)).collect();
            let ones = sites.iter().filter(|&&b| b == 1).count();
            if 2 * ones >= n {
                continue;
            }
            let config = BinaryConfiguration::cyclic(sites)?;
            if let Some(k) = k {
                if cyclic_carrier(&config)?.into_iter().max().unwrap_or(0) > k {
                    continue;
                }
            }
            self.stats.accepted += 1;
            return Ok(config);
        }
    }

    pub fn sample(&mut self, rng: &mut Rng) -> Result<PeriodicBrownianSample> {
        let config = self.sample_config(rng)?;
        let path = rescale_path(&one_period_path(&config)?, self.grid.eps, self.grid.eps * self.grid.eps)?;
        Ok(PeriodicBrownianSample { config, path })
    }
}

/// `S_0, ..., S_N` for a cyclic configuration.
pub fn one_period_path(config: &BinaryConfiguration) -> Result<LatticePath> {
    let mut s = 0i64;
    let after: Vec<i64> = config
        .sites()
        .iter()
        .map(|&b| {
            s += 1 - 2 * b as i64;
            s
        })
        .collect();
    LatticePath::from_origin(&after)
}
