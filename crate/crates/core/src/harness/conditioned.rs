//! One-sided conditioned walks for iid Bernoulli(p), p < 1/2.
//!
//! Two processes on `t >= 0` with `S_0 = 0`:
//! * the walk conditioned never to go below 0;
//! * `2 Mbar_t - S_t`, with `Mbar_t = max_{0<=s<=t} S_s`, for the two-sided
//!   walk conditioned on `M_0 = 0`, i.e. on never exceeding 0 in the past.
//!
//! Both are sampled by rejection. Each conditioning event concerns an
//! infinite horizon; after a finite stretch the remaining event has the
//! gambler's-ruin probability `1 - r^(d+1)` with `r = p/(1-p)` and `d` the
//! current distance to the barrier, so a final coin flip with that
//! probability makes the rejection exact rather than truncated.

use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::rng::Rng;

fn ruin_ratio(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid(format!("conditioned walks need 0 < p < 1/2, got {p}")));
    }
    Ok(p / (1.0 - p))
}

/// A window code from `m` unit steps: bit `t-1` is set when step `t` goes down.
fn code_of(steps: &[i64]) -> usize {
    steps.iter().enumerate().fold(0, |acc, (k, &d)| acc | (usize::from(d < 0) << k))
}

/// Sampler for both sides with running acceptance counts.
#[derive(Clone, Debug)]
pub struct ConditionedWalks {
    pub p: f64,
    /// Window length.
    pub m: usize,
    /// Steps simulated before the ruin coin flip; at least `m`.
    pub horizon: usize,
    pub attempts: [u64; 2],
    pub accepted: [u64; 2],
}

impl ConditionedWalks {
    pub fn new(p: f64, m: usize, horizon: usize) -> Result<Self> {
        ruin_ratio(p)?;
        if m == 0 || m > 20 {
            return Err(invalid(format!("window length must be in 1..=20, got {m}")));
        }
        Ok(Self { p, m, horizon: horizon.max(m), attempts: [0; 2], accepted: [0; 2] })
    }

    fn step(&self, rng: &mut Rng) -> i64 {
        if rng.random_bool(self.p) {
            -1
        } else {
            1
        }
    }

    /// Window code of the walk conditioned on `inf_{t>=0} S_t = 0`.
    pub fn sample_floor(&mut self, rng: &mut Rng) -> usize {
        let r = self.p / (1.0 - self.p);
        loop {
            self.attempts[0] += 1;
            let mut s = 0i64;
            let mut steps = Vec::with_capacity(self.m);
            let mut ok = true;
            for t in 0..self.horizon {
                let d = self.step(rng);
                s += d;
                if t < self.m {
                    steps.push(d);
                }
                if s < 0 {
                    ok = false;
                    break;
                }
            }
            // stays >= 0 forever after, from distance s to the level -1
            if ok && rng.random::<f64>() < 1.0 - r.powi((s + 1) as i32) {
                self.accepted[0] += 1;
                return code_of(&steps);
            }
        }
    }

    /// Window code of `2 Mbar - S` for the walk conditioned on `M_0 = 0`.
    pub fn sample_reflected(&mut self, rng: &mut Rng) -> usize {
        let r = self.p / (1.0 - self.p);
        loop {
            self.attempts[1] += 1;
            // S_{-1}, S_{-2}, ... : going left, S_{-k} - S_{-k+1} = -(1 - 2 eta)
            let mut x = 0i64;
            let mut ok = true;
            for _ in 0..self.horizon {
                x -= self.step(rng);
                if x > 0 {
                    ok = false;
                    break;
                }
            }
            // never reaches +1 further left
            if !(ok && rng.random::<f64>() < 1.0 - r.powi((1 - x) as i32)) {
                continue;
            }
            self.accepted[1] += 1;
            let (mut s, mut top, mut prev) = (0i64, 0i64, 0i64);
            let mut steps = Vec::with_capacity(self.m);
            for _ in 0..self.m {
                s += self.step(rng);
                top = top.max(s);
                let y = 2 * top - s;
                steps.push(y - prev);
                prev = y;
            }
            return code_of(&steps);
        }
    }

    pub fn acceptance_rates(&self) -> [f64; 2] {
        [0, 1].map(|k| self.accepted[k] as f64 / self.attempts[k].max(1) as f64)
    }
}

/// Exact law of the window code of the walk conditioned to stay `>= 0`.
pub fn floor_window_law(p: f64, m: usize) -> Result<Vec<f64>> {
    let r = ruin_ratio(p)?;
    let mut law = vec![0.0; 1 << m];
    for (code, w) in law.iter_mut().enumerate() {
        let mut s = 0i64;
        let mut prob = 1.0;
        let mut ok = true;
        for k in 0..m {
            let down = (code >> k) & 1 == 1;
            s += if down { -1 } else { 1 };
            prob *= if down { p } else { 1.0 - p };
            ok &= s >= 0;
        }
        if ok {
            *w = prob * (1.0 - r.powi((s + 1) as i32));
        }
    }
    // P(inf >= 0) = 1 - r
    let z = 1.0 - r;
    law.iter_mut().for_each(|w| *w /= z);
    Ok(law)
}

/// Exact law of the window code of `2 Mbar - S`. The past is independent
/// of the future for iid sites, so the conditioning on `M_0 = 0` drops out.
pub fn reflected_window_law(p: f64, m: usize) -> Result<Vec<f64>> {
    ruin_ratio(p)?;
    let mut law = vec![0.0; 1 << m];
    for code in 0..1usize << m {
        let (mut s, mut top, mut prev) = (0i64, 0i64, 0i64);
        let mut prob = 1.0;
        let mut steps = Vec::with_capacity(m);
        for k in 0..m {
            let down = (code >> k) & 1 == 1;
            s += if down { -1 } else { 1 };
            prob *= if down { p } else { 1.0 - p };
            top = top.max(s);
            steps.push(2 * top - s - prev);
            prev = 2 * top - s;
        }
        law[code_of(&steps)] += prob;
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdist::stats::{chi_square_test, histogram};
    use crate::exactdist::table::tv_vectors;
    use crate::rng::stream;

    #[test]
    fn exact_laws_agree() {
        for p in [0.1, 0.3, 0.45] {
            for m in 1..=8 {
                let a = floor_window_law(p, m).unwrap();
                let b = reflected_window_law(p, m).unwrap();
                assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(tv_vectors(&a, &b).unwrap() < 1e-12, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn samplers_match_exact_laws() {
        let mut w = ConditionedWalks::new(0.3, 4, 4).unwrap();
        let mut rng = stream(91, 0);
        let law = floor_window_law(0.3, 4).unwrap();
        let a = histogram((0..20_000).map(|_| w.sample_floor(&mut rng)), 16);
        let b = histogram((0..20_000).map(|_| w.sample_reflected(&mut rng)), 16);
        assert!(chi_square_test(&a, &law).unwrap().p_value > 1e-3);
        assert!(chi_square_test(&b, &law).unwrap().p_value > 1e-3);
    }
}
