//! Exact laws of the Markov configuration conditioned to have a local
//! maximum of its path at 0, i.e. `eta_0 = 0` and `eta_1 = 1`.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::exactdist::table::{enumerate_gibbs, DistributionTable};
use crate::lattice::{palm_transform, BinaryConfiguration};
use crate::samplers::spec::gibbs_params_from_markov;

/// Law of `(eta_lo, ..., eta_hi)` under the stationary Palm measure,
/// indexed by window code (bit `k` is site `lo + k`). The chain runs left
/// from `eta_0 = 0` and right from `eta_1 = 1`; being reversible it uses the
/// same kernel both ways.
pub fn palm_window_law(p0: f64, p1: f64, lo: i64, hi: i64) -> Result<Vec<f64>> {
    if lo > 0 || hi < 1 {
        return Err(invalid(format!("Palm window [{lo}, {hi}] must contain 0 and 1")));
    }
    let m = (hi - lo + 1) as usize;
    if m > 24 {
        return Err(invalid(format!("Palm window of {m} sites is too wide to tabulate")));
    }
    let step = |from: u8, to: u8| {
        let p = if from == 1 { p1 } else { p0 };
        if to == 1 {
            p
        } else {
            1.0 - p
        }
    };
    let zero = (-lo) as usize;
    let law = (0..1u64 << m)
        .map(|code| {
            let x = |k: usize| ((code >> k) & 1) as u8;
            if x(zero) != 0 || x(zero + 1) != 1 {
                return 0.0;
            }
            let mut p = 1.0;
            for k in (0..zero).rev() {
                p *= step(x(k + 1), x(k));
            }
            for k in zero + 2..m {
                p *= step(x(k - 1), x(k));
            }
            p
        })
        .collect();
    Ok(law)
}

/// Periodic Palm law on `Z/nZ`: the periodic Markov configuration
/// conditioned on `eta_0 = eta_n = 0` and `eta_1 = 1`, by enumeration.
pub fn periodic_palm_table(p0: f64, p1: f64, n: usize, cutoff: usize) -> Result<DistributionTable> {
    if n < 3 {
        return Err(invalid(format!("periodic Palm law needs n >= 3, got {n}")));
    }
    let base = enumerate_gibbs(n, &gibbs_params_from_markov(p0, p1)?, cutoff)?;
    let last = 1u64 << (n - 1);
    let weights = base
        .support
        .iter()
        .zip(&base.probs)
        .map(|(&c, &p)| (c, (c & 1 == 1 && c & last == 0).then(|| p.ln())));
    DistributionTable::from_log_weights(n, weights)
}

/// Law of the re-rooted step `theta^tau T` applied to a periodic table.
pub fn pushforward_palm(table: &DistributionTable) -> Result<DistributionTable> {
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for (&c, &p) in table.support.iter().zip(&table.probs) {
        let (y, _) = palm_transform(&BinaryConfiguration::cyclic_from_code(c, table.n))?;
        *acc.entry(y.code()).or_default() += p;
    }
    let (support, probs) = acc.into_iter().unzip();
    Ok(DistributionTable { n: table.n, support, probs, log_z: table.log_z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdist::stats::chi_square_test;
    use crate::exactdist::table::tv_distance;
    use crate::rng::stream;
    use crate::samplers::sample_palm_markov;

    #[test]
    fn window_law_normalized_and_forced() {
        let law = palm_window_law(0.2, 0.4, -2, 3).unwrap();
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // sites 0 and 1 are bits 2 and 3
        for (code, &p) in law.iter().enumerate() {
            if (code >> 2) & 1 != 0 || (code >> 3) & 1 != 1 {
                assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn sampler_matches_window_law() {
        let (p0, p1) = (0.2, 0.4);
        let law = palm_window_law(p0, p1, -3, 3).unwrap();
        let mut counts = vec![0u64; law.len()];
        let mut rng = stream(60, 0);
        for _ in 0..50_000 {
            let c = sample_palm_markov(p0, p1, -3, 3, None, &mut rng).unwrap();
            let code = (-3..=3).enumerate().fold(0usize, |a, (k, n)| a | ((c.get(n).unwrap() as usize) << k));
            counts[code] += 1;
        }
        assert!(chi_square_test(&counts, &law).unwrap().p_value > 1e-3);
    }

    #[test]
    fn periodic_palm_law_is_invariant() {
        for n in [6, 9, 12] {
            let t = periodic_palm_table(0.2, 0.4, n, 20).unwrap();
            let img = pushforward_palm(&t).unwrap();
            assert!(tv_distance(&t, &img).unwrap() < 1e-12, "n = {n}");
        }
    }
}
