//! The zigzag process: slope +1 while a two-state chain sits in 0, slope -1
//! while it sits in 1. The chain leaves 0 at rate `lambda0` and 1 at rate
//! `lambda1`.

use nalgebra::Matrix2;
use rand::Rng as _;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::continuum::path::{pl_carrier, pl_pitman, shift_to_local_max, PlPath};
use crate::error::{invalid, Error, Result};
use crate::lattice::LeftPolicy;
use crate::rng::Rng;

/// Segments appended to a left buffer before certification gives up.
const MAX_BUFFER_SEGMENTS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagSpec {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl ZigzagSpec {
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda1 > 0.0 && lambda0.is_finite() && lambda1.is_finite()) {
            return Err(invalid(format!("zigzag rates must be positive, got ({lambda0}, {lambda1})")));
        }
        Ok(Self { lambda0, lambda1 })
    }

    /// Rates must satisfy `lambda0 < lambda1` for the transform to exist.
    pub fn require_drift(&self) -> Result<()> {
        if self.lambda0 < self.lambda1 {
            Ok(())
        } else {
            Err(invalid(format!(
                "Pitman's transform needs lambda0 < lambda1, got ({}, {})",
                self.lambda0, self.lambda1
            )))
        }
    }

    pub fn rate(&self, state: u8) -> f64 {
        if state == 1 {
            self.lambda1
        } else {
            self.lambda0
        }
    }

    /// Stationary `P(eta = 1)`.
    pub fn density(&self) -> f64 {
        self.lambda0 / (self.lambda0 + self.lambda1)
    }

    /// Almost sure limit of `S_t / t`.
    pub fn drift(&self) -> f64 {
        (self.lambda1 - self.lambda0) / (self.lambda1 + self.lambda0)
    }

    /// Stationary `P(W_0 = 0)`.
    pub fn carrier_atom(&self) -> f64 {
        self.drift()
    }

    /// Stationary `E W_0`.
    pub fn carrier_mean(&self) -> f64 {
        2.0 * self.lambda0 / (self.lambda1 * self.lambda1 - self.lambda0 * self.lambda0)
    }

    /// `P(W_0 > x)`: an exponential tail of rate `lambda1 - lambda0` carrying
    /// the mass not in the atom.
    pub fn carrier_tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        (1.0 - self.carrier_atom()) * (-(self.lambda1 - self.lambda0) * x).exp()
    }

    /// Bound on `P(sup_{u <= t} S_u - S_t > x)` given the state at `t`, or
    /// given that a sojourn starts at `t`: the stationary carrier tail over
    /// the smaller stationary weight.
    pub fn past_max_tail(&self, x: f64) -> f64 {
        let nu = self.density().min(1.0 - self.density());
        (self.carrier_tail(x) / nu).min(1.0)
    }

    /// Transition matrix of the chain over time `t`.
    pub fn transition(&self, t: f64) -> Matrix2<f64> {
        let q = Matrix2::new(-self.lambda0, self.lambda0, self.lambda1, -self.lambda1);
        (q * t).exp()
    }

    /// Discrete chain `P(1|0) = eps lambda0`, `P(1|1) = 1 - eps lambda1`
    /// whose path, rescaled by `eps` in both directions, approximates this one.
    pub fn markov_approximation(&self, eps: f64) -> Result<(f64, f64)> {
        let (p0, p1) = (eps * self.lambda0, 1.0 - eps * self.lambda1);
        if !(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0) {
            return Err(invalid(format!("eps = {eps} too large for rates ({}, {})", self.lambda0, self.lambda1)));
        }
        Ok((p0, p1))
    }

    fn sojourn(&self, state: u8, rng: &mut Rng) -> f64 {
        Exp::new(self.rate(state)).expect("positive rate").sample(rng)
    }
}

/// Certified left buffer for a continuous path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTailCertificate {
    /// First time of the region on which the past maximum is exact.
    pub interior_start: f64,
    pub tail_bound: f64,
    pub tolerance: f64,
}

/// Piece of the driving chain: state `state` on `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sojourn {
    pub start: f64,
    pub end: f64,
    pub state: u8,
}

/// Zigzag path on a window with the chain that drives it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagSample {
    pub sojourns: Vec<Sojourn>,
    pub path: PlPath<f64>,
    /// Requested window; the path may extend further left as buffer.
    pub first: f64,
    pub last: f64,
    pub certificate: Option<ExpTailCertificate>,
}

fn slope(state: u8) -> f64 {
    if state == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Two-sided sojourn lists grown outward from 0.
struct Builder {
    /// Going left from 0: (length, state).
    left: Vec<(f64, u8)>,
    /// Going right from 0.
    right: Vec<(f64, u8)>,
}

impl Builder {
    fn left_edge(&self) -> f64 {
        -self.left.iter().map(|p| p.0).sum::<f64>()
    }

    fn grow_right(&mut self, spec: &ZigzagSpec, mut state: u8, last: f64, rng: &mut Rng) {
        let mut t = self.right.iter().map(|p| p.0).sum::<f64>();
        if let Some(&(_, s)) = self.right.last() {
            state = 1 - s;
        }
        while t < last {
            let d = spec.sojourn(state, rng);
            self.right.push((d, state));
            t += d;
            state = 1 - state;
        }
    }

    fn push_left(&mut self, spec: &ZigzagSpec, state: u8, rng: &mut Rng) -> f64 {
        let d = spec.sojourn(state, rng);
        self.left.push((d, state));
        d
    }

    fn sojourns(&self) -> Vec<Sojourn> {
        let mut out = Vec::with_capacity(self.left.len() + self.right.len());
        let mut t = 0.0;
        for &(d, s) in &self.left {
            out.push(Sojourn { start: t - d, end: t, state: s });
            t -= d;
        }
        out.reverse();
        t = 0.0;
        for &(d, s) in &self.right {
            out.push(Sojourn { start: t, end: t + d, state: s });
            t += d;
        }
        out
    }

    fn path(&self) -> Result<PlPath<f64>> {
        let mut times = Vec::with_capacity(self.left.len() + self.right.len() + 1);
        let mut values = Vec::with_capacity(times.capacity());
        let (mut t, mut v) = (0.0, 0.0);
        for &(d, s) in &self.left {
            t -= d;
            v -= slope(s) * d;
            times.push(t);
            values.push(v);
        }
        times.reverse();
        values.reverse();
        times.push(0.0);
        values.push(0.0);
        (t, v) = (0.0, 0.0);
        for &(d, s) in &self.right {
            t += d;
            v += slope(s) * d;
            times.push(t);
            values.push(v);
        }
        PlPath::new(times, values)
    }

    /// Extend to the left until the past maximum is exact on
    /// `[min(first, 0), ...)` with probability at least `1 - tolerance`.
    fn certify(
        &mut self,
        spec: &ZigzagSpec,
        first: f64,
        tolerance: f64,
        rng: &mut Rng,
    ) -> Result<ExpTailCertificate> {
        spec.require_drift()?;
        let target = first.min(0.0);
        // value at the left edge and max over [edge, target]
        let path = self.path()?;
        let mut s_edge = path.values()[0];
        let mut top = path.at(target)?;
        for (&t, &v) in path.times().iter().zip(path.values()) {
            if t <= target {
                top = top.max(v);
            }
        }
        let mut state = self.left.last().map_or(0, |p| 1 - p.1);
        for _ in 0..MAX_BUFFER_SEGMENTS {
            let bound = spec.past_max_tail(top - s_edge);
            if bound < tolerance {
                return Ok(ExpTailCertificate { interior_start: first, tail_bound: bound, tolerance });
            }
            let d = self.push_left(spec, state, rng);
            s_edge -= slope(state) * d;
            top = top.max(s_edge);
            state = 1 - state;
        }
        let bound = spec.past_max_tail(top - s_edge);
        Err(Error::Uncertified { tolerance, bound })
    }

    fn finish(self, first: f64, last: f64, certificate: Option<ExpTailCertificate>) -> Result<ZigzagSample> {
        Ok(ZigzagSample { sojourns: self.sojourns(), path: self.path()?, first, last, certificate })
    }
}

fn check_window(first: f64, last: f64) -> Result<()> {
    if !(first <= 0.0 && last > 0.0) {
        return Err(invalid(format!("zigzag windows must contain 0 in their interior side, got [{first}, {last}]")));
    }
    Ok(())
}

/// Stationary zigzag on `[first, last]`. The sojourn straddling 0 is split
/// into independent exponential age and residual. With `tolerance` set, a
/// left buffer is grown until Pitman's transform is certified on the window.
pub fn sample_zigzag(
    spec: &ZigzagSpec,
    first: f64,
    last: f64,
    tolerance: Option<f64>,
    rng: &mut Rng,
) -> Result<ZigzagSample> {
    check_window(first, last)?;
    let s0 = u8::from(rng.random::<f64>() < spec.density());
    let mut b = Builder { left: Vec::new(), right: Vec::new() };
    b.grow_right(spec, s0, last, rng);
    let mut state = s0;
    while b.left_edge() > first || b.left.is_empty() {
        b.push_left(spec, state, rng);
        state = 1 - state;
    }
    let cert = match tolerance {
        Some(tol) => Some(b.certify(spec, first, tol, rng)?),
        None => None,
    };
    b.finish(first, last, cert)
}

/// Palm version: the chain starts fresh in state 1 just right of 0 and,
/// independently, in state 0 just left of 0, so 0 is a local maximum.
pub fn sample_zigzag_palm(
    spec: &ZigzagSpec,
    first: f64,
    last: f64,
    tolerance: Option<f64>,
    rng: &mut Rng,
) -> Result<ZigzagSample> {
    check_window(first, last)?;
    let mut b = Builder { left: Vec::new(), right: Vec::new() };
    b.grow_right(spec, 1, last, rng);
    let mut state = 0;
    while b.left_edge() > first || b.left.is_empty() {
        b.push_left(spec, state, rng);
        state = 1 - state;
    }
    let cert = match tolerance {
        Some(tol) => Some(b.certify(spec, first, tol, rng)?),
        None => None,
    };
    b.finish(first, last, cert)
}

impl ZigzagSample {
    fn certificate(&self) -> Result<ExpTailCertificate> {
        self.certificate.ok_or(Error::WrongBoundary { expected: "certified", found: "uncertified window" })
    }

    /// `TS` on the window `[first, last]`, where it is exact.
    pub fn transformed(&self) -> Result<PlPath<f64>> {
        let cert = self.certificate()?;
        pl_pitman(&self.path, LeftPolicy::Buffered)?.restrict(cert.interior_start, self.last)
    }

    /// `W_0 = M_0 - S_0`.
    pub fn carrier_at_origin(&self) -> Result<f64> {
        self.certificate()?;
        pl_carrier(&self.path, LeftPolicy::Buffered)?.at(0.0)
    }

    /// `theta^tau T S` with the shift `tau`.
    pub fn palm_step(&self) -> Result<(PlPath<f64>, f64)> {
        shift_to_local_max(&self.transformed()?)
    }
}

/// Running acceptance statistics for rejection samplers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub attempts: u64,
    pub accepted: u64,
}

impl Acceptance {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            return 1.0;
        }
        self.accepted as f64 / self.attempts as f64
    }

    /// Error out once enough attempts show the rate is below `floor`.
    pub fn check(&self, floor: f64) -> Result<()> {
        if self.attempts >= 1000 && self.rate() < floor {
            return Err(Error::AcceptanceFloor { rate: self.rate(), floor });
        }
        Ok(())
    }
}

/// Periodic zigzag on `[0, L]` by exact rejection. Weighting the stationary
/// start by `1/nu(eta_0)` makes the start uniform; a run is kept when it
/// returns to its starting state with `S_L > 0`.
pub struct PeriodicZigzag {
    pub spec: ZigzagSpec,
    pub period: f64,
    pub floor: f64,
    pub stats: Acceptance,
}

impl PeriodicZigzag {
    pub fn new(spec: ZigzagSpec, period: f64, floor: f64) -> Result<Self> {
        if !(period > 0.0) {
            return Err(invalid(format!("period must be positive, got {period}")));
        }
        Ok(Self { spec, period, floor, stats: Acceptance::default() })
    }

    /// One period of the path and the sojourns on `[0, L)`.
    pub fn sample(&mut self, rng: &mut Rng) -> Result<(PlPath<f64>, Vec<Sojourn>)> {
        loop {
            self.stats.check(self.floor)?;
            self.stats.attempts += 1;
            let s0 = u8::from(rng.random::<bool>());
            let mut state = s0;
            let (mut t, mut v) = (0.0, 0.0);
            let mut times = vec![0.0];
            let mut values = vec![0.0];
            let mut sojourns = Vec::new();
            while t < self.period {
                let d = self.spec.sojourn(state, rng).min(self.period - t);
                sojourns.push(Sojourn { start: t, end: t + d, state });
                t += d;
                v += slope(state) * d;
                times.push(t);
                values.push(v);
                state = 1 - state;
            }
            let end_state = 1 - state;
            if end_state == s0 && v > 0.0 {
                self.stats.accepted += 1;
                return Ok((PlPath::new(times, values)?, sojourns));
            }
        }
    }
}

/// Exact law of the periodic zigzag increment: `E[S_L]` under the uniform
/// start conditioned on `eta_L = eta_0` and `S_L > 0`, together with the
/// conditioning probability. Uses the occupation-time density of the chain,
/// a Bessel-type series, integrated by Simpson's rule.
pub fn periodic_zigzag_increment_law(spec: &ZigzagSpec, period: f64) -> (f64, f64) {
    let (l0, l1, big_l) = (spec.lambda0, spec.lambda1, period);
    let k = l0 * l1;
    // density of the time u spent in state 1, for 0 -> 0 and 1 -> 1 paths
    let series = |u: f64| -> (f64, f64) {
        let x = k * u * (big_l - u);
        let damp = (-l0 * (big_l - u) - l1 * u).exp();
        let (mut a, mut b) = (k * (big_l - u), k * u);
        let (mut f00, mut f11) = (0.0, 0.0);
        for j in 1..400 {
            f00 += a;
            f11 += b;
            let r = x / (j as f64 * (j + 1) as f64);
            a *= r;
            b *= r;
            if a.abs() + b.abs() < 1e-18 * (f00 + f11) {
                break;
            }
        }
        (f00 * damp, f11 * damp)
    };
    let n = 4000;
    let h = big_l / 2.0 / n as f64;
    let (mut z, mut m) = (0.0, 0.0);
    for i in 0..=n {
        let u = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let (a, b) = series(u);
        z += w * (a + b);
        m += w * (a + b) * (big_l - 2.0 * u);
    }
    z *= h / 3.0;
    m *= h / 3.0;
    // staying in 0 throughout: S_L = L
    let atom = (-l0 * big_l).exp();
    let norm = 0.5 * (z + atom);
    (0.5 * (m + big_l * atom) / norm, norm)
}

/// `P(eta_L = i | eta_0 = i)` from the occupation series over the whole
/// range, for checking the series against the matrix exponential.
pub fn return_probabilities_by_series(spec: &ZigzagSpec, period: f64) -> (f64, f64) {
    let (l0, l1, big_l) = (spec.lambda0, spec.lambda1, period);
    let k = l0 * l1;
    let n = 4000;
    let h = big_l / n as f64;
    let (mut p00, mut p11) = (0.0, 0.0);
    for i in 0..=n {
        let u = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = k * u * (big_l - u);
        let damp = (-l0 * (big_l - u) - l1 * u).exp();
        let (mut a, mut b) = (k * (big_l - u), k * u);
        let (mut f00, mut f11) = (0.0, 0.0);
        for j in 1..400 {
            f00 += a;
            f11 += b;
            let r = x / (j as f64 * (j + 1) as f64);
            a *= r;
            b *= r;
            if a.abs() + b.abs() < 1e-18 * (f00 + f11) {
                break;
            }
        }
        p00 += w * f00 * damp;
        p11 += w * f11 * damp;
    }
    (p00 * h / 3.0 + (-l0 * big_l).exp(), p11 * h / 3.0 + (-l1 * big_l).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdist::stats::ks_test;
    use crate::rng::stream;

    #[test]
    fn carrier_law_constants() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        assert!((z.carrier_atom() - 1.0 / 3.0).abs() < 1e-15);
        assert!((z.carrier_mean() - 2.0 / 3.0).abs() < 1e-15);
        assert!(ZigzagSpec::new(2.0, 1.0).unwrap().require_drift().is_err());
        assert!(ZigzagSpec::new(0.0, 1.0).is_err());
    }

    #[test]
    fn series_matches_matrix_exponential() {
        for &(l0, l1, big_l) in &[(1.0, 2.0, 3.0), (0.5, 0.7, 10.0), (3.0, 1.0, 0.4)] {
            let z = ZigzagSpec::new(l0, l1).unwrap();
            let p = z.transition(big_l);
            let (p00, p11) = return_probabilities_by_series(&z, big_l);
            assert!((p00 - p[(0, 0)]).abs() < 1e-9, "{p00} vs {}", p[(0, 0)]);
            assert!((p11 - p[(1, 1)]).abs() < 1e-9, "{p11} vs {}", p[(1, 1)]);
        }
    }

    #[test]
    fn stationary_window_shape() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut rng = stream(40, 0);
        let s = sample_zigzag(&z, -5.0, 5.0, Some(1e-9), &mut rng).unwrap();
        assert!(s.path.first() <= -5.0 && s.path.last() >= 5.0);
        assert_eq!(s.path.at(0.0).unwrap(), 0.0);
        assert!(s.certificate.unwrap().tail_bound < 1e-9);
        let ts = s.transformed().unwrap();
        assert_eq!(ts.first(), -5.0);
        assert!(ts.at(0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn palm_has_peak_at_origin() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut rng = stream(41, 0);
        for _ in 0..200 {
            let s = sample_zigzag_palm(&z, -3.0, 3.0, None, &mut rng).unwrap();
            assert!(s.path.local_maxima().contains(&0.0));
            let after = s.sojourns.iter().find(|x| x.start == 0.0).unwrap();
            assert_eq!(after.state, 1);
        }
    }

    #[test]
    fn drift_over_long_window() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut rng = stream(42, 0);
        let s = sample_zigzag(&z, 0.0, 20_000.0, None, &mut rng).unwrap();
        let v = s.path.at(20_000.0).unwrap() / 20_000.0;
        assert!((v - z.drift()).abs() < 0.02, "{v}");
    }

    #[test]
    fn sojourns_are_exponential() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut rng = stream(43, 0);
        let s = sample_zigzag(&z, 0.0, 6000.0, None, &mut rng).unwrap();
        let inner = &s.sojourns[1..s.sojourns.len() - 1];
        for (state, rate) in [(0u8, 1.0), (1u8, 2.0)] {
            let xs: Vec<f64> = inner.iter().filter(|x| x.state == state && x.start > 0.0).map(|x| x.end - x.start).collect();
            let r = ks_test(&xs, |x| 1.0 - (-rate * x).exp()).unwrap();
            assert!(r.p_value > 1e-3, "state {state}: {r:?}");
        }
    }

    #[test]
    fn periodic_zigzag_increments_positive() {
        let z = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut sampler = PeriodicZigzag::new(z, 4.0, 1e-3).unwrap();
        let mut rng = stream(44, 0);
        for _ in 0..200 {
            let (p, soj) = sampler.sample(&mut rng).unwrap();
            assert!(p.increment() > 0.0);
            assert_eq!(p.last(), 4.0);
            assert_eq!(soj.first().unwrap().state, soj.last().unwrap().state);
        }
        assert!(sampler.stats.rate() > 0.1);
    }
}
