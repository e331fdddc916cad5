//! Goodness-of-fit tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};

/// Cells with expected count below this are pooled before testing.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
    pub samples: u64,
}

fn chi2_sf(stat: f64, dof: f64) -> f64 {
    if dof <= 0.0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat)
}

/// Pearson chi-square test of `observed` counts against `expected`
/// probabilities. Sparse cells are pooled in order until each pooled cell
/// expects at least [`MIN_EXPECTED`]; degrees of freedom are pooled cells
/// minus one.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> Result<TestResult> {
    if observed.len() != expected.len() {
        return Err(Error::MismatchedSupport);
    }
    let n: u64 = observed.iter().sum();
    let total_p: f64 = expected.iter().sum();
    if n == 0 || total_p <= 0.0 {
        return Err(invalid("chi-square test needs samples and positive mass"));
    }
    for (i, (&o, &e)) in observed.iter().zip(expected).enumerate() {
        if e <= 0.0 && o > 0 {
            return Err(Error::ZeroExpectedCell { cell: i });
        }
    }
    let nf = n as f64;
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        o_acc += o as f64;
        e_acc += e / total_p * nf;
        if e_acc >= MIN_EXPECTED {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (pooled.len() as f64 - 1.0).max(0.0);
    Ok(TestResult { statistic, dof, p_value: chi2_sf(statistic, dof), samples: n })
}

/// Chi-square test that two count vectors come from one distribution.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::MismatchedSupport);
    }
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    if na == 0.0 || nb == 0.0 {
        return Err(invalid("two-sample chi-square needs samples on both sides"));
    }
    // pool sparse cells on the combined counts
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        ca += x as f64;
        cb += y as f64;
        let tot = ca + cb;
        if tot * na.min(nb) / (na + nb) >= MIN_EXPECTED {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    let n = na + nb;
    let mut statistic = 0.0;
    for &(x, y) in &cells {
        let tot = x + y;
        let ea = tot * na / n;
        let eb = tot * nb / n;
        statistic += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = (cells.len() as f64 - 1.0).max(0.0);
    Ok(TestResult { statistic, dof, p_value: chi2_sf(statistic, dof), samples: n as u64 })
}

/// Kolmogorov distribution tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // the alternating series converges slowly here; the left-tail
        // form is accurate and the value is 1 to double precision
        let s: f64 = (1..=50)
            .map(|k| {
                let kk = (2 * k - 1) as f64;
                (-(kk * kk) * std::f64::consts::PI.powi(2) / (8.0 * x * x)).exp()
            })
            .sum();
        return 1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s;
    }
    let mut s = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_p(d: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult> {
    if samples.is_empty() {
        return Err(invalid("KS test needs samples"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(TestResult { statistic: d, dof: n, p_value: ks_p(d, n), samples: xs.len() as u64 })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS test needs samples on both sides"));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    Ok(TestResult { statistic: d, dof: n_eff, p_value: ks_p(d, n_eff), samples: (na + nb) as u64 })
}

/// Counts of window codes.
pub fn histogram(codes: impl IntoIterator<Item = usize>, cells: usize) -> Vec<u64> {
    let mut h = vec![0u64; cells];
    for c in codes {
        h[c] += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng as _;

    #[test]
    fn kolmogorov_reference_values() {
        // tabulated: P(K > 1.36) ~ 0.0494, P(K > 1.63) ~ 0.0098
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_sf(1.63) - 0.0098).abs() < 3e-4);
        assert!((kolmogorov_sf(0.29) - kolmogorov_sf(0.31)).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn dof_is_cells_minus_one() {
        let r = chi_square_test(&[100, 100, 100, 100], &[0.25; 4]).unwrap();
        assert_eq!(r.dof, 3.0);
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_mismatch_rejects() {
        let r = chi_square_test(&[1000, 0], &[0.5, 0.5]).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(matches!(chi_square_test(&[1, 1], &[1.0, 0.0]), Err(Error::ZeroExpectedCell { cell: 1 })));
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0 + 0.5).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
    }

    #[test]
    fn calibration_under_the_null() {
        // p-values of correct models are roughly uniform: count rejections at 5%
        let mut rng = stream(7, 0);
        let mut rejections = 0;
        let runs = 400;
        for _ in 0..runs {
            let xs: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
            if ks_test(&xs, |x| x).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        assert!((5..=40).contains(&rejections), "{rejections}");
        let mut rejections = 0;
        for _ in 0..runs {
            let mut h = [0u64; 6];
            for _ in 0..600 {
                h[rng.random_range(0..6)] += 1;
            }
            if chi_square_test(&h, &[1.0 / 6.0; 6]).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        assert!((5..=40).contains(&rejections), "{rejections}");
    }

    #[test]
    fn two_sample_tests() {
        let mut rng = stream(8, 0);
        let a: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..3000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
        let c: Vec<f64> = b.iter().map(|x| x * 0.8).collect();
        assert!(ks_two_sample(&a, &c).unwrap().p_value < 1e-6);
        let r = chi_square_two_sample(&[500, 500], &[1000, 1000]).unwrap();
        assert!(r.p_value > 0.99);
    }
}
