use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{periodic_transform, BinaryConfiguration};
use crate::samplers::spec::GibbsBeta;
use crate::solitons::profile_of;

/// Largest cycle length enumerated by default.
pub const ENUMERATION_CUTOFF: usize = 20;

/// Exact law on cyclic configurations of length `n`. Each configuration is
/// stored as its bit code (bit `i` is `x_{i+1}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub n: usize,
    pub support: Vec<u64>,
    pub probs: Vec<f64>,
    /// `log Z` when the table came from Gibbs weights.
    pub log_z: Option<f64>,
}

fn bits(code: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((code >> i) & 1) as u8).collect()
}

/// Bit string of a code, `x_1` first.
pub fn code_string(code: u64, n: usize) -> String {
    bits(code, n).iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

impl DistributionTable {
    /// Table from unnormalized log weights, `None` meaning excluded.
    pub fn from_log_weights(n: usize, weights: impl IntoIterator<Item = (u64, Option<f64>)>) -> Result<Self> {
        let kept: Vec<(u64, f64)> = weights.into_iter().filter_map(|(c, w)| w.map(|w| (c, w))).collect();
        if kept.is_empty() {
            return Err(Error::InvalidParameter("every configuration has weight zero".into()));
        }
        let top = kept.iter().map(|&(_, w)| w).fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = kept.iter().map(|&(_, w)| (w - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        let mut support = Vec::new();
        let mut probs = Vec::new();
        for ((c, _), r) in kept.iter().zip(&raw) {
            if *r > 0.0 {
                support.push(*c);
                probs.push(r / total);
            }
        }
        Ok(Self { n, support, probs, log_z: Some(top + total.ln()) })
    }

    pub fn point_mass(n: usize, code: u64) -> Self {
        Self { n, support: vec![code], probs: vec![1.0], log_z: None }
    }

    pub fn to_map(&self) -> BTreeMap<u64, f64> {
        self.support.iter().copied().zip(self.probs.iter().copied()).collect()
    }

    pub fn prob(&self, code: u64) -> f64 {
        self.support.iter().position(|&c| c == code).map_or(0.0, |i| self.probs[i])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Law of `(x_1, ..., x_m)`, indexed by the code of the window.
    pub fn window_marginal(&self, m: usize) -> Result<Vec<f64>> {
        if m > self.n {
            return Err(Error::InvalidParameter(format!("window {m} longer than cycle {}", self.n)));
        }
        let mut out = vec![0.0; 1 << m];
        let mask = (1u64 << m) - 1;
        for (&c, &p) in self.support.iter().zip(&self.probs) {
            out[(c & mask) as usize] += p;
        }
        Ok(out)
    }

    /// JSON-compatible record `{config string -> probability}`.
    pub fn to_record(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .support
            .iter()
            .zip(&self.probs)
            .map(|(&c, &p)| (code_string(c, self.n), serde_json::json!(p)))
            .collect();
        serde_json::json!({ "n": self.n, "log_z": self.log_z, "probs": map })
    }
}

/// Exact Gibbs law by enumeration of all `2^n` cyclic configurations.
pub fn enumerate_gibbs(n: usize, beta: &GibbsBeta, cutoff: usize) -> Result<DistributionTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("cycle length must be positive".into()));
    }
    if n > cutoff || n > 40 {
        return Err(Error::EnumerationCutoff { n, cutoff });
    }
    let weights: Vec<(u64, Option<f64>)> = (0..1u64 << n)
        .into_par_iter()
        .map(|code| {
            let x = bits(code, n);
            let f0 = x.iter().filter(|&&b| b == 1).count();
            let w = if 2 * f0 < n { beta.log_weight(&profile_of(&x)) } else { None };
            (code, w)
        })
        .collect();
    DistributionTable::from_log_weights(n, weights)
}

/// Law of `T x` when `x` has law `table`.
pub fn pushforward_t(table: &DistributionTable) -> Result<DistributionTable> {
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for (&c, &p) in table.support.iter().zip(&table.probs) {
        let x = BinaryConfiguration::cyclic_from_code(c, table.n);
        let y = periodic_transform(&x)?;
        *acc.entry(y.code()).or_default() += p;
    }
    let (support, probs) = acc.into_iter().unzip();
    Ok(DistributionTable { n: table.n, support, probs, log_z: table.log_z })
}

/// Half the L1 distance between two tables on the same cycle length.
pub fn tv_distance(a: &DistributionTable, b: &DistributionTable) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::MismatchedSupport);
    }
    let mut diff: BTreeMap<u64, f64> = a.to_map();
    for (&c, &p) in b.support.iter().zip(&b.probs) {
        *diff.entry(c).or_default() -= p;
    }
    Ok(0.5 * diff.values().map(|d| d.abs()).sum::<f64>())
}

/// Half the L1 distance between two probability vectors on one index set.
pub fn tv_vectors(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedSupport);
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::spec::{gibbs_params_bounded, gibbs_params_from_iid, gibbs_params_from_markov};

    #[test]
    fn small_hand_enumerations() {
        let zero = GibbsBeta::finite(&[]);
        let t2 = enumerate_gibbs(2, &zero, 20).unwrap();
        assert_eq!(t2.support, vec![0]);
        let t3 = enumerate_gibbs(3, &zero, 20).unwrap();
        assert_eq!(t3.support, vec![0, 1, 2, 4]);
        assert!(t3.probs.iter().all(|&p| (p - 0.25).abs() < 1e-15));
        assert!(matches!(enumerate_gibbs(21, &zero, 20), Err(Error::EnumerationCutoff { .. })));
    }

    #[test]
    fn large_beta0_concentrates_on_empty() {
        let t = enumerate_gibbs(8, &GibbsBeta::finite(&[60.0]), 20).unwrap();
        assert!(1.0 - t.prob(0) < 1e-20);
    }

    #[test]
    fn tv_examples() {
        let a = DistributionTable::point_mass(4, 1);
        let b = DistributionTable::point_mass(4, 2);
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        let u = DistributionTable { n: 2, support: vec![0, 1, 2, 3], probs: vec![0.25; 4], log_z: None };
        let pt = DistributionTable::point_mass(2, 0);
        assert!((tv_distance(&u, &pt).unwrap() - 0.75).abs() < 1e-15);
        assert!(tv_distance(&u, &a).is_err());
    }

    #[test]
    fn single_ball_translates() {
        let a = DistributionTable::point_mass(4, 0b0001);
        let b = pushforward_t(&a).unwrap();
        assert_eq!(b.support, vec![0b0010]);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn invariance_small() {
        for beta in [
            gibbs_params_from_iid(0.35).unwrap(),
            gibbs_params_from_markov(0.11, 0.8).unwrap(),
            gibbs_params_bounded(0.5, 2).unwrap(),
        ] {
            let t = enumerate_gibbs(10, &beta, 20).unwrap();
            assert!((t.total() - 1.0).abs() < 1e-12);
            let pf = pushforward_t(&t).unwrap();
            assert_eq!(pf.support.len(), t.support.len());
            assert!(tv_distance(&t, &pf).unwrap() < 1e-12);
        }
    }
}
