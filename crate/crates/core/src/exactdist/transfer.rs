//! Window marginals of the periodic laws without enumeration.
//!
//! Each periodic family is a cyclic chain on a small state space that emits
//! one bit per step. A configuration's weight is the total weight of chain
//! paths that return to their starting state after `N` steps, averaged over
//! a uniform starting state, restricted to fewer than `N/2` ones. Tracking
//! the running count next to the chain state turns that global constraint
//! into a transfer-matrix computation of cost `O(N^2)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::samplers::quasi::quasistationary_solve;
use crate::samplers::spec::MeasureSpec;
use crate::samplers::stationary::markov_density;

/// The three periodic families whose infinite-volume limits are known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PeriodicFamily {
    Iid { p: f64 },
    Markov { p0: f64, p1: f64 },
    Bounded { p: f64, k: usize },
}

impl PeriodicFamily {
    pub fn from_spec(spec: &MeasureSpec) -> Result<(Self, usize)> {
        match *spec {
            MeasureSpec::CyclicMarkov { n, p0, p1 } => Ok((PeriodicFamily::Markov { p0, p1 }, n)),
            MeasureSpec::PeriodicBounded { n, p, k } => Ok((PeriodicFamily::Bounded { p, k }, n)),
            ref other => Err(invalid(format!("{other:?} has no transfer-matrix form"))),
        }
    }

    /// Stationary spec whose law is the infinite-volume limit.
    pub fn limit_spec(&self) -> MeasureSpec {
        match *self {
            PeriodicFamily::Iid { p } => MeasureSpec::Bernoulli { p },
            PeriodicFamily::Markov { p0, p1 } => MeasureSpec::Markov { p0, p1 },
            PeriodicFamily::Bounded { p, k } => MeasureSpec::BoundedSoliton { p, k },
        }
    }
}

/// Cyclic chain emitting bits; weights are scaled so the Perron root is 1.
#[derive(Clone, Debug)]
pub struct CyclicChain {
    pub d: usize,
    /// `(from, to, bit, weight)`.
    pub moves: Vec<(usize, usize, u8, f64)>,
    /// Weights `pi` with `pi_s Q(s,t) = pi_t Q(t,s)`.
    pub sym: Vec<f64>,
}

impl CyclicChain {
    pub fn for_family(fam: PeriodicFamily) -> Result<Self> {
        match fam {
            PeriodicFamily::Iid { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("iid p = {p} must lie in (0,1)")));
                }
                Ok(Self { d: 1, moves: vec![(0, 0, 1, p), (0, 0, 0, 1.0 - p)], sym: vec![1.0] })
            }
            PeriodicFamily::Markov { p0, p1 } => {
                if !(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0) {
                    return Err(invalid(format!("Markov ({p0}, {p1}) must lie in (0,1)^2")));
                }
                let rho = markov_density(p0, p1);
                Ok(Self {
                    d: 2,
                    moves: vec![(0, 0, 0, 1.0 - p0), (0, 1, 1, p0), (1, 0, 0, 1.0 - p1), (1, 1, 1, p1)],
                    sym: vec![1.0 - rho, rho],
                })
            }
            PeriodicFamily::Bounded { p, k } => {
                let sol = quasistationary_solve(p, k)?;
                let l = sol.lambda;
                let mut moves = vec![(0, 0, 0, (1.0 - p) / l)];
                for w in 0..k {
                    moves.push((w, w + 1, 1, p / l));
                    moves.push((w + 1, w, 0, (1.0 - p) / l));
                }
                let r = p / (1.0 - p);
                Ok(Self { d: k + 1, moves, sym: (0..=k).map(|x| r.powi(x as i32)).collect() })
            }
        }
    }

    fn bit_matrix(&self, bit: u8) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(self.d, self.d);
        for &(s, t, b, w) in &self.moves {
            if b == bit {
                q[(s, t)] += w;
            }
        }
        q
    }

    /// Backward vectors over `(state, count)` for paths of `steps` steps
    /// ending at `s0`. Counts above `cap` are dropped, or clamped to `cap`
    /// when `saturate`; `accept(c)` selects admissible final counts.
    fn backward(&self, s0: usize, steps: usize, cap: usize, saturate: bool, accept: impl Fn(usize) -> bool) -> Vec<f64> {
        let w = cap + 1;
        let mut b = vec![0.0; self.d * w];
        for c in 0..=cap {
            if accept(c) {
                b[s0 * w + c] = 1.0;
            }
        }
        let mut next = vec![0.0; self.d * w];
        for _ in 0..steps {
            next.iter_mut().for_each(|v| *v = 0.0);
            for &(s, t, bit, wt) in &self.moves {
                for c in 0..=cap {
                    let c2 = c + bit as usize;
                    let c2 = if c2 > cap {
                        if saturate {
                            cap
                        } else {
                            continue;
                        }
                    } else {
                        c2
                    };
                    next[s * w + c] += wt * b[t * w + c2];
                }
            }
            std::mem::swap(&mut b, &mut next);
        }
        b
    }

    /// Weight vector over end states of the forced prefix `x` from `s0`.
    fn forward(&self, s0: usize, x: &[u8]) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        v[s0] = 1.0;
        for &bit in x {
            let mut nv = vec![0.0; self.d];
            for &(s, t, b, wt) in &self.moves {
                if b == bit {
                    nv[t] += v[s] * wt;
                }
            }
            v = nv;
        }
        v
    }
}

fn pattern(code: usize, m: usize) -> Vec<u8> {
    (0..m).map(|i| ((code >> i) & 1) as u8).collect()
}

/// Law of `(eta_1, ..., eta_M)` indexed by window code (bit `i` is `eta_{i+1}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMarginal {
    pub m: usize,
    pub probs: Vec<f64>,
}

impl WindowMarginal {
    /// Marginal of the first `m - 1` sites.
    pub fn drop_last(&self) -> WindowMarginal {
        let half = 1 << (self.m - 1);
        let probs = (0..half).map(|c| self.probs[c] + self.probs[c + half]).collect();
        WindowMarginal { m: self.m - 1, probs }
    }
}

/// Exact window marginal of the periodic family on a cycle of length `n`.
pub fn window_marginal_periodic(fam: PeriodicFamily, n: usize, m: usize) -> Result<WindowMarginal> {
    if m > n {
        return Err(invalid(format!("window {m} longer than cycle {n}")));
    }
    let chain = CyclicChain::for_family(fam)?;
    let cap = (n - 1) / 2; // largest count with 2c < n
    let mut probs = vec![0.0; 1 << m];
    for s0 in 0..chain.d {
        let b = chain.backward(s0, n - m, cap, false, |_| true);
        for (code, slot) in probs.iter_mut().enumerate() {
            let x = pattern(code, m);
            let c = x.iter().filter(|&&b| b == 1).count();
            if c > cap {
                continue;
            }
            let v = chain.forward(s0, &x);
            *slot += (0..chain.d).map(|s| v[s] * b[s * (cap + 1) + c]).sum::<f64>();
        }
    }
    let z: f64 = probs.iter().sum();
    if z <= 0.0 {
        return Err(Error::InvalidParameter("no admissible configuration".into()));
    }
    probs.iter_mut().for_each(|p| *p /= z);
    Ok(WindowMarginal { m, probs })
}

/// Infinite-volume window law, computed from the stationary chain directly.
pub fn limit_window_law(fam: PeriodicFamily, m: usize) -> Result<WindowMarginal> {
    let probs = match fam {
        PeriodicFamily::Iid { p } => (0..1usize << m)
            .map(|c| {
                pattern(c, m).iter().map(|&b| if b == 1 { p } else { 1.0 - p }).product()
            })
            .collect(),
        PeriodicFamily::Markov { p0, p1 } => {
            let rho = markov_density(p0, p1);
            let step = |a: u8, b: u8| {
                let q = if a == 1 { p1 } else { p0 };
                if b == 1 { q } else { 1.0 - q }
            };
            (0..1usize << m)
                .map(|c| {
                    let x = pattern(c, m);
                    let first = if x[0] == 1 { rho } else { 1.0 - rho };
                    first * x.windows(2).map(|w| step(w[0], w[1])).product::<f64>()
                })
                .collect()
        }
        PeriodicFamily::Bounded { p, k } => {
            let sol = quasistationary_solve(p, k)?;
            let q = sol.kernel();
            (0..1usize << m)
                .map(|c| {
                    let x = pattern(c, m);
                    let mut v = sol.pi_tilde.clone();
                    for &bit in &x {
                        let mut nv = vec![0.0; k + 1];
                        for w in 0..=k {
                            if bit == 1 && w < k {
                                nv[w + 1] += v[w] * q[(w, w + 1)];
                            }
                            if bit == 0 {
                                let to = w.saturating_sub(1);
                                nv[to] += v[w] * q[(w, to)];
                            }
                        }
                        v = nv;
                    }
                    v.iter().sum()
                })
                .collect()
        }
    };
    Ok(WindowMarginal { m, probs })
}

/// Finite-volume marginal minus its limit, assembled without subtracting
/// two nearly equal probabilities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitDeviation {
    pub n: usize,
    pub limit: Vec<f64>,
    /// `marginal(x) - limit(x)` per window code.
    pub deviation: Vec<f64>,
    pub tv: f64,
    /// Probability, under the unconstrained cyclic chain, of `2 f_0 >= N`.
    pub violation_mass: f64,
}

/// Deviation of the periodic window marginal from the infinite-volume law.
///
/// With `E(x)` the unconstrained cyclic weight of window `x` and `V(x)` the
/// part with at least `N/2` ones, the marginal is
/// `(E(x) - V(x)) / (E - V)`. The limit law `L` is the leading spectral
/// term of `E`, so `E(x) - L(x) E` is a sum over subleading eigenvalues and
/// `V` comes from a count-saturating backward pass; neither step cancels.
pub fn window_deviation(fam: PeriodicFamily, n: usize, m: usize) -> Result<LimitDeviation> {
    if m > n {
        return Err(invalid(format!("window {m} longer than cycle {n}")));
    }
    let chain = CyclicChain::for_family(fam)?;
    let d = chain.d;
    let q0 = chain.bit_matrix(0);
    let q1 = chain.bit_matrix(1);
    let q = &q0 + &q1;
    let sq: Vec<f64> = chain.sym.iter().map(|s| s.sqrt()).collect();
    let a = DMatrix::from_fn(d, d, |i, j| sq[i] * q[(i, j)] / sq[j]);
    debug_assert!((&a - a.transpose()).amax() < 1e-12);
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let comps: Vec<(f64, Vec<f64>, Vec<f64>)> = order
        .iter()
        .map(|&i| {
            let phi = eig.eigenvectors.column(i);
            let u = (0..d).map(|s| phi[s] / sq[s]).collect();
            let v = (0..d).map(|s| phi[s] * sq[s]).collect();
            (eig.eigenvalues[i], u, v)
        })
        .collect();
    let sandwich = |x: &[u8], u: &[f64], v: &[f64]| -> f64 {
        let mut row: Vec<f64> = v.to_vec();
        for &bit in x {
            let qb = if bit == 1 { &q1 } else { &q0 };
            row = (0..d).map(|t| (0..d).map(|s| row[s] * qb[(s, t)]).sum()).collect();
        }
        row.iter().zip(u).map(|(r, w)| r * w).sum()
    };
    let dn = d as f64;
    let cells = 1usize << m;
    let limit: Vec<f64> = (0..cells).map(|c| sandwich(&pattern(c, m), &comps[0].1, &comps[0].2)).collect();
    let e_total = (1.0 + comps[1..].iter().map(|(l, _, _)| l.powi(n as i32)).sum::<f64>()) / dn;
    let e_excess: Vec<f64> = (0..cells)
        .map(|c| {
            let x = pattern(c, m);
            comps[1..]
                .iter()
                .map(|(l, u, v)| l.powi((n - m) as i32) * sandwich(&x, u, v) - limit[c] * l.powi(n as i32))
                .sum::<f64>()
                / dn
        })
        .collect();
    // violating part: final count saturates at the first count with 2c >= n
    let cap = n.div_ceil(2);
    let mut viol = vec![0.0; cells];
    for s0 in 0..d {
        let b = chain.backward(s0, n - m, cap, true, |c| c == cap);
        for (code, slot) in viol.iter_mut().enumerate() {
            let x = pattern(code, m);
            let c = x.iter().filter(|&&b| b == 1).count().min(cap);
            let v = chain.forward(s0, &x);
            *slot += (0..d).map(|s| v[s] * b[s * (cap + 1) + c]).sum::<f64>() / dn;
        }
    }
    let v_total: f64 = viol.iter().sum();
    let denom = e_total - v_total;
    let deviation: Vec<f64> = (0..cells)
        .map(|c| (e_excess[c] - (viol[c] - limit[c] * v_total)) / denom)
        .collect();
    let tv = 0.5 * deviation.iter().map(|x| x.abs()).sum::<f64>();
    Ok(LimitDeviation { n, limit, deviation, tv, violation_mass: v_total / e_total })
}

/// iid window marginal at any `p`, from binomial tails in log space:
/// `P(x) ∝ p^k (1-p)^(m-k) P(Bin(n-m, p) < n/2 - k)`.
pub fn iid_binomial_marginal(p: f64, n: usize, m: usize) -> Result<WindowMarginal> {
    if !(p > 0.0 && p < 1.0) || m > n {
        return Err(invalid(format!("need p in (0,1) and m <= n, got p={p}, m={m}, n={n}")));
    }
    let cap = (n - 1) / 2;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let log_cdf = |trials: usize, upto: isize| -> f64 {
        if upto < 0 {
            return f64::NEG_INFINITY;
        }
        let terms: Vec<f64> = (0..=(upto as usize).min(trials))
            .map(|j| ln_binomial(trials as u64, j as u64) + j as f64 * lp + (trials - j) as f64 * lq)
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
    };
    let mut logs = vec![f64::NEG_INFINITY; 1 << m];
    for (code, slot) in logs.iter_mut().enumerate() {
        let k = (code as u32).count_ones() as usize;
        *slot = k as f64 * lp + (m - k) as f64 * lq + log_cdf(n - m, cap as isize - k as isize);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = raw.iter().sum();
    Ok(WindowMarginal { m, probs: raw.iter().map(|r| r / z).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdist::table::enumerate_gibbs;
    use crate::samplers::spec::{gibbs_params_bounded, gibbs_params_from_iid, gibbs_params_from_markov};

    fn families() -> Vec<(PeriodicFamily, crate::samplers::spec::GibbsBeta)> {
        vec![
            (PeriodicFamily::Iid { p: 0.35 }, gibbs_params_from_iid(0.35).unwrap()),
            (PeriodicFamily::Markov { p0: 0.11, p1: 0.8 }, gibbs_params_from_markov(0.11, 0.8).unwrap()),
            (PeriodicFamily::Bounded { p: 0.5, k: 2 }, gibbs_params_bounded(0.5, 2).unwrap()),
        ]
    }

    #[test]
    fn transfer_matches_enumeration() {
        for (fam, beta) in families() {
            for n in [5usize, 8, 11, 12] {
                let table = enumerate_gibbs(n, &beta, 20).unwrap();
                for m in 1..=4.min(n) {
                    let exact = table.window_marginal(m).unwrap();
                    let tm = window_marginal_periodic(fam, n, m).unwrap();
                    for (a, b) in exact.iter().zip(&tm.probs) {
                        assert!((a - b).abs() < 1e-12, "{fam:?} n={n} m={m}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn deviation_matches_direct_difference_when_large() {
        for (fam, _) in families() {
            for n in [9usize, 20, 50] {
                let direct = window_marginal_periodic(fam, n, 3).unwrap();
                let lim = limit_window_law(fam, 3).unwrap();
                let dev = window_deviation(fam, n, 3).unwrap();
                for c in 0..8 {
                    assert!((dev.limit[c] - lim.probs[c]).abs() < 1e-13, "{fam:?}");
                    let d = direct.probs[c] - lim.probs[c];
                    assert!((d - dev.deviation[c]).abs() < 1e-12, "{fam:?} n={n}: {d} vs {}", dev.deviation[c]);
                }
            }
        }
    }

    #[test]
    fn marginal_consistency() {
        let fam = PeriodicFamily::Markov { p0: 0.2, p1: 0.4 };
        let m4 = window_marginal_periodic(fam, 30, 4).unwrap();
        let m3 = window_marginal_periodic(fam, 30, 3).unwrap();
        for (a, b) in m4.drop_last().probs.iter().zip(&m3.probs) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn binomial_route_matches_transfer() {
        for &p in &[0.35, 0.6] {
            let a = iid_binomial_marginal(p, 401, 3).unwrap();
            let b = window_marginal_periodic(PeriodicFamily::Iid { p }, 401, 3).unwrap();
            for (x, y) in a.probs.iter().zip(&b.probs) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn iid_single_site_limits() {
        let lo = window_marginal_periodic(PeriodicFamily::Iid { p: 0.35 }, 800, 1).unwrap();
        assert!((lo.probs[1] - 0.35).abs() < 1e-12);
        let hi = iid_binomial_marginal(0.6, 10_000, 1).unwrap();
        assert!((hi.probs[1] - 0.5).abs() < 1e-3);
    }
}
