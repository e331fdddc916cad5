//! Samplers for the periodic Gibbs measures.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdist::table::{enumerate_gibbs, DistributionTable, ENUMERATION_CUTOFF};
use crate::lattice::BinaryConfiguration;
use crate::rng::Rng;
use crate::samplers::spec::GibbsBeta;
use crate::solitons::profile_of;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum GibbsMode {
    /// Enumerate and invert the CDF; `N <= cutoff`.
    Exact { cutoff: usize },
    Mcmc { burn_in: u64, thin: u64 },
    /// Exact when `N <= cutoff`, otherwise Metropolis.
    Auto { cutoff: usize, burn_in: u64, thin: u64 },
}

impl Default for GibbsMode {
    fn default() -> Self {
        GibbsMode::Auto { cutoff: ENUMERATION_CUTOFF, burn_in: 200_000, thin: 2_000 }
    }
}

/// Inverse-CDF sampler over an enumerated table.
#[derive(Clone, Debug)]
pub struct ExactGibbs {
    pub table: DistributionTable,
    cdf: Vec<f64>,
}

impl ExactGibbs {
    pub fn new(n: usize, beta: &GibbsBeta, cutoff: usize) -> Result<Self> {
        let table = enumerate_gibbs(n, beta, cutoff)?;
        let mut acc = 0.0;
        let cdf = table
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { table, cdf })
    }

    pub fn sample_code(&self, rng: &mut Rng) -> u64 {
        let u: f64 = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.table.support[i]
    }

    pub fn sample(&self, rng: &mut Rng) -> BinaryConfiguration {
        BinaryConfiguration::cyclic_from_code(self.sample_code(rng), self.table.n)
    }
}

/// Metropolis chain on admissible cyclic configurations. Proposals: flip one
/// site, or swap an adjacent pair of unequal sites (both symmetric).
#[derive(Clone, Debug)]
pub struct MetropolisGibbs {
    beta: GibbsBeta,
    state: Vec<u8>,
    log_w: f64,
    pub proposed: u64,
    pub accepted: u64,
}

impl MetropolisGibbs {
    /// Chain started from the empty configuration, which is always admissible.
    pub fn new(n: usize, beta: &GibbsBeta) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cycle length must be positive".into()));
        }
        let state = vec![0u8; n];
        Ok(Self { beta: beta.clone(), log_w: 0.0, state, proposed: 0, accepted: 0 })
    }

    fn weight(&self, x: &[u8]) -> Option<f64> {
        let f0 = x.iter().filter(|&&b| b == 1).count();
        if 2 * f0 >= x.len() {
            return None;
        }
        self.beta.log_weight(&profile_of(x))
    }

    pub fn step(&mut self, rng: &mut Rng) {
        let n = self.state.len();
        let mut cand = self.state.clone();
        let i = rng.random_range(0..n);
        if rng.random_bool(0.5) {
            cand[i] ^= 1;
        } else {
            let j = (i + 1) % n;
            if cand[i] == cand[j] {
                self.proposed += 1;
                return;
            }
            cand.swap(i, j);
        }
        self.proposed += 1;
        if let Some(w) = self.weight(&cand) {
            let a = w - self.log_w;
            if a >= 0.0 || rng.random::<f64>() < a.exp() {
                self.state = cand;
                self.log_w = w;
                self.accepted += 1;
            }
        }
    }

    pub fn run(&mut self, steps: u64, rng: &mut Rng) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn state(&self) -> &[u8] {
        &self.state
    }

    pub fn config(&self) -> BinaryConfiguration {
        BinaryConfiguration::cyclic(self.state.clone()).expect("nonempty state")
    }
}

/// One draw from the Gibbs measure on `Z/nZ`.
pub fn sample_gibbs_periodic(n: usize, beta: &GibbsBeta, mode: GibbsMode, rng: &mut Rng) -> Result<BinaryConfiguration> {
    let mut exact = |cutoff| ExactGibbs::new(n, beta, cutoff).map(|s| s.sample(rng));
    match mode {
        GibbsMode::Exact { cutoff } => exact(cutoff),
        GibbsMode::Mcmc { burn_in, thin } => {
            let mut chain = MetropolisGibbs::new(n, beta)?;
            chain.run(burn_in + thin, rng);
            Ok(chain.config())
        }
        GibbsMode::Auto { cutoff, burn_in, thin } => {
            if n <= cutoff {
                exact(cutoff)
            } else {
                sample_gibbs_periodic(n, beta, GibbsMode::Mcmc { burn_in, thin }, rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdist::stats::chi_square_test;
    use crate::rng::stream;
    use crate::samplers::spec::{gibbs_params_bounded, gibbs_params_from_iid};

    #[test]
    fn huge_beta0_gives_empty() {
        let mut rng = stream(9, 0);
        let beta = GibbsBeta::finite(&[200.0]);
        for _ in 0..20 {
            let x = sample_gibbs_periodic(10, &beta, GibbsMode::default(), &mut rng).unwrap();
            assert_eq!(x.particle_count(), 0);
        }
    }

    #[test]
    fn exact_sampler_frequencies() {
        let beta = gibbs_params_from_iid(0.35).unwrap();
        let s = ExactGibbs::new(8, &beta, 20).unwrap();
        let mut rng = stream(10, 0);
        let mut counts = vec![0u64; s.table.support.len()];
        for _ in 0..200_000 {
            let c = s.sample_code(&mut rng);
            counts[s.table.support.iter().position(|&x| x == c).unwrap()] += 1;
        }
        assert!(chi_square_test(&counts, &s.table.probs).unwrap().p_value > 1e-3);
    }

    #[test]
    fn chain_respects_hard_constraints() {
        let beta = gibbs_params_bounded(0.5, 2).unwrap();
        let mut chain = MetropolisGibbs::new(30, &beta).unwrap();
        let mut rng = stream(11, 0);
        for _ in 0..20_000 {
            chain.step(&mut rng);
            let x = chain.state();
            assert!(2 * x.iter().filter(|&&b| b == 1).count() < 30);
            assert!(profile_of(x).get(3) == 0);
        }
        assert!(chain.accepted > 0);
    }
}
