//! Random Toda states: the bi-infinite exponential law seen from a block
//! start, the periodic Dirichlet and multinomial laws, and small rational
//! states for exact checks.

use rand::Rng as _;
use rand_distr::{Binomial, Distribution, Exp, Exp1};
use serde::{Deserialize, Serialize};

use crate::continuum::path::{pl_pitman, shift_to_local_max, PlPath, Rational};
use crate::continuum::zigzag::ZigzagSpec;
use crate::error::{invalid, Error, Result};
use crate::lattice::LeftPolicy;
use crate::rng::Rng;
use crate::toda::state::TodaState;

/// Extra pairs sampled beyond the requested window on each side, so that
/// edge effects of the step stay outside it.
const PAD: usize = 6;
const MAX_BUFFER_PAIRS: usize = 1 << 20;

/// Window `first..=last` of a bi-infinite state. Block `Q_1` starts at 0,
/// gap `E_0` ends at 0, and `E_j` follows `Q_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TodaPalmWindow {
    pub first: i64,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
}

impl TodaPalmWindow {
    pub fn last(&self) -> i64 {
        self.first + self.q.len() as i64 - 1
    }

    pub fn q_at(&self, j: i64) -> Option<f64> {
        usize::try_from(j - self.first).ok().and_then(|k| self.q.get(k).copied())
    }

    pub fn e_at(&self, j: i64) -> Option<f64> {
        usize::try_from(j - self.first).ok().and_then(|k| self.e.get(k).copied())
    }

    /// Time at which block `Q_first` starts.
    pub fn start_time(&self) -> f64 {
        let left = (1 - self.first) as usize;
        -(self.q[..left].iter().sum::<f64>() + self.e[..left].iter().sum::<f64>())
    }

    pub fn encode(&self) -> Result<PlPath<f64>> {
        let t0 = self.start_time();
        let mut segs = Vec::with_capacity(2 * self.q.len());
        for (&q, &e) in self.q.iter().zip(&self.e) {
            segs.push((q, -1.0));
            segs.push((e, 1.0));
        }
        // the path is anchored at 0, where E_0 ends
        let v0 = -self.e[..(1 - self.first) as usize].iter().sum::<f64>()
            + self.q[..(1 - self.first) as usize].iter().sum::<f64>();
        PlPath::from_segments(t0, v0, &segs)
    }

    fn push_left(&mut self, spec: &ZigzagSpec, rng: &mut Rng) {
        self.first -= 1;
        self.q.insert(0, Exp::new(spec.lambda1).expect("rate").sample(rng));
        self.e.insert(0, Exp::new(spec.lambda0).expect("rate").sample(rng));
    }

    fn push_right(&mut self, spec: &ZigzagSpec, rng: &mut Rng) {
        self.q.push(Exp::new(spec.lambda1).expect("rate").sample(rng));
        self.e.push(Exp::new(spec.lambda0).expect("rate").sample(rng));
    }

    /// Sub-window `lo..=hi`, if covered.
    pub fn restrict(&self, lo: i64, hi: i64) -> Option<Self> {
        if lo < self.first || hi > self.last() || lo > hi {
            return None;
        }
        let (a, b) = ((lo - self.first) as usize, (hi - self.first) as usize);
        Some(Self { first: lo, q: self.q[a..=b].to_vec(), e: self.e[a..=b].to_vec() })
    }
}

/// `Q_j ~ Exp(lambda1)` and `E_j ~ Exp(lambda0)`, all independent, for
/// `j = -half..=half`.
pub fn sample_toda_palm(spec: &ZigzagSpec, half: usize, rng: &mut Rng) -> Result<TodaPalmWindow> {
    spec.require_drift()?;
    let mut w = TodaPalmWindow { first: 1, q: Vec::new(), e: Vec::new() };
    for _ in 0..half {
        w.push_right(spec, rng);
    }
    for _ in 0..=half {
        w.push_left(spec, rng);
    }
    Ok(w)
}

/// Complete runs of a shifted path, indexed as a window around 0.
fn read_palm_window(path: &PlPath<f64>) -> Result<TodaPalmWindow> {
    let runs = path.runs();
    let n = runs.len();
    let i0 = runs
        .iter()
        .position(|r| r.start == 0.0 && !r.rising)
        .ok_or(Error::MalformedPath("no block starts at 0".into()))?;
    // runs 1..n-1 are complete; pair (Q_j, E_j) sits at runs i0 + 2(j-1), +1
    let complete = |i: i64| i >= 1 && i <= n as i64 - 2;
    let pos = |j: i64| i0 as i64 + 2 * (j - 1);
    let mut lo = 1;
    while complete(pos(lo - 1)) {
        lo -= 1;
    }
    let mut hi = 0;
    while complete(pos(hi + 1) + 1) {
        hi += 1;
    }
    if !(complete(pos(lo)) && complete(pos(lo) + 1)) {
        lo += 1;
    }
    let idx = |j: i64| pos(j) as usize;
    Ok(TodaPalmWindow {
        first: lo,
        q: (lo..=hi).map(|j| runs[idx(j)].len()).collect(),
        e: (lo..=hi).map(|j| runs[idx(j) + 1].len()).collect(),
    })
}

/// One step of the bi-infinite dynamics on a window. The window is padded
/// with further independent coordinates on both sides, a left buffer is
/// grown until the past maximum is certified to `tolerance`, and the
/// image is reported on the original index range. Returns the shift too.
pub fn toda_palm_step(
    window: &TodaPalmWindow,
    spec: &ZigzagSpec,
    tolerance: f64,
    rng: &mut Rng,
) -> Result<(TodaPalmWindow, f64)> {
    spec.require_drift()?;
    if window.first > 0 || window.last() < 1 {
        return Err(invalid("a Toda window must contain indices 0 and 1"));
    }
    let mut w = window.clone();
    for _ in 0..PAD {
        w.push_left(spec, rng);
        w.push_right(spec, rng);
    }
    let target = w.start_time();
    let mut top = f64::NEG_INFINITY;
    let mut edge = 0.0;
    {
        let p = w.encode()?;
        for (&t, &v) in p.times().iter().zip(p.values()) {
            if t <= target {
                top = top.max(v);
                edge = v;
            }
        }
    }
    let mut pairs = 0;
    while spec.past_max_tail(top - edge) >= tolerance {
        if pairs == MAX_BUFFER_PAIRS {
            return Err(Error::Uncertified { tolerance, bound: spec.past_max_tail(top - edge) });
        }
        w.push_left(spec, rng);
        // going left: the gap lowers the edge, the block before it raises it
        edge -= w.e[0];
        top = top.max(edge);
        edge += w.q[0];
        top = top.max(edge);
        pairs += 1;
    }
    let path = w.encode()?;
    let image = pl_pitman(&path, LeftPolicy::Buffered)?.restrict(target, path.last())?;
    let (shifted, tau) = shift_to_local_max(&image)?;
    let out = read_palm_window(&shifted)?;
    let out = out
        .restrict(window.first, window.last())
        .ok_or(Error::MalformedPath("step image does not cover the window".into()))?;
    Ok((out, tau))
}

/// Periodic state with `Q = A * Dirichlet(1,...,1)` and
/// `E = (L - A) * Dirichlet(1,...,1)`, the Dirichlet vectors drawn as
/// normalized standard exponentials. The last coordinate takes up the
/// remainder so the totals hold to rounding.
pub fn sample_toda_periodic_dirichlet(j: usize, a: f64, l: f64, rng: &mut Rng) -> Result<TodaState<f64>> {
    if j == 0 || !(a > 0.0 && 2.0 * a < l) {
        return Err(invalid(format!("need J >= 1 and 0 < A < L/2, got J={j}, A={a}, L={l}")));
    }
    let split = |total: f64, rng: &mut Rng| -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..j).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = x.iter().sum();
            let mut v: Vec<f64> = x[..j - 1].iter().map(|xi| total * xi / s).collect();
            let rest = total - v.iter().sum::<f64>();
            if rest > 0.0 {
                v.push(rest);
                return v;
            }
        }
    };
    let q = split(a, rng);
    let e = split(l - a, rng);
    TodaState::periodic(q, e, l)
}

/// Integer periodic state: `Q - 1` multinomial with `A - J` trials over `J`
/// equal cells, `E - 1` likewise with `L - A - J` trials.
pub fn sample_toda_periodic_integer(j: usize, a: i64, l: i64, rng: &mut Rng) -> Result<TodaState<i64>> {
    let ji = j as i64;
    if j == 0 || !(a > 0 && 2 * a < l) || ji > a.min(l - a) {
        return Err(invalid(format!("need 1 <= J <= min(A, L-A) and 0 < A < L/2, got J={j}, A={a}, L={l}")));
    }
    let multinomial = |trials: i64, rng: &mut Rng| -> Vec<i64> {
        let mut left = trials as u64;
        let mut out = Vec::with_capacity(j);
        for k in 0..j {
            let cells = (j - k) as f64;
            let x = if k + 1 == j { left } else { Binomial::new(left, 1.0 / cells).expect("valid").sample(rng) };
            left -= x;
            out.push(x as i64 + 1);
        }
        out
    };
    let q = multinomial(a - ji, rng);
    let e = multinomial(l - a - ji, rng);
    TodaState::periodic(q, e, l)
}

/// Integer periodic state with `Q` and `E` independent uniform compositions
/// of `A` and `L - A` into `J` positive parts. This law is invariant under
/// the periodic step; see [`crate::toda::exact`].
pub fn sample_toda_periodic_compositions(j: usize, a: i64, l: i64, rng: &mut Rng) -> Result<TodaState<i64>> {
    let ji = j as i64;
    if j == 0 || !(a > 0 && 2 * a < l) || ji > a.min(l - a) {
        return Err(invalid(format!("need 1 <= J <= min(A, L-A) and 0 < A < L/2, got J={j}, A={a}, L={l}")));
    }
    let composition = |total: i64, rng: &mut Rng| -> Vec<i64> {
        let mut cuts = rand::seq::index::sample(rng, total as usize - 1, j - 1).into_vec();
        cuts.sort_unstable();
        let mut prev = 0i64;
        let mut out: Vec<i64> = cuts
            .into_iter()
            .map(|c| {
                let c = c as i64 + 1;
                let part = c - prev;
                prev = c;
                part
            })
            .collect();
        out.push(total - prev);
        out
    };
    let q = composition(a, rng);
    let e = composition(l - a, rng);
    TodaState::periodic(q, e, l)
}

/// Small random rational state: entries are multiples of `1/den` with
/// `den` drawn from a few denominators. Periodic states get extra gap
/// length when needed so that `sum(Q) < L/2`.
pub fn sample_rational_state(j: usize, periodic: bool, rng: &mut Rng) -> Result<TodaState<Rational>> {
    if j == 0 {
        return Err(invalid("J must be positive"));
    }
    let den = [1i128, 2, 3, 4, 6][rng.random_range(0..5)];
    let draw = |rng: &mut Rng| Rational::new(rng.random_range(1..=12i128), den);
    let q: Vec<Rational> = (0..j).map(|_| draw(rng)).collect();
    let gaps = if periodic { j } else { j - 1 };
    let mut e: Vec<Rational> = (0..gaps).map(|_| draw(rng)).collect();
    if periodic {
        let (sq, se) = (q.iter().sum::<Rational>(), e.iter().sum::<Rational>());
        if se <= sq {
            let k = rng.random_range(0..j);
            e[k] += sq - se + draw(rng);
        }
        return TodaState::periodic_closed(q, e);
    }
    TodaState::finite(q, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::toda::bridge::toda_step_via_path;

    #[test]
    fn palm_window_encoding_anchors_at_zero() {
        let w = TodaPalmWindow { first: -1, q: vec![1.0, 2.0, 3.0], e: vec![0.5, 0.25, 1.0] };
        let p = w.encode().unwrap();
        assert_eq!(p.at(0.0).unwrap(), 0.0);
        // E_0 = 0.25 ends at 0, Q_1 = 3 starts there
        assert_eq!(p.at(-0.25).unwrap(), -0.25);
        assert_eq!(p.at(3.0).unwrap(), -3.0);
        assert!(p.local_maxima().contains(&0.0));
        assert_eq!(read_palm_window(&p).unwrap().restrict(0, 0).unwrap().q, vec![2.0]);
    }

    #[test]
    fn palm_step_keeps_window() {
        let spec = ZigzagSpec::new(1.0, 2.0).unwrap();
        let mut rng = stream(70, 0);
        for _ in 0..200 {
            let w = sample_toda_palm(&spec, 5, &mut rng).unwrap();
            let (img, tau) = toda_palm_step(&w, &spec, 1e-9, &mut rng).unwrap();
            assert_eq!((img.first, img.last()), (-5, 5));
            assert!(tau > 0.0);
            assert!(img.q.iter().chain(&img.e).all(|&x| x > 0.0));
        }
    }

    #[test]
    fn dirichlet_totals() {
        let mut rng = stream(71, 0);
        let s = sample_toda_periodic_dirichlet(1, 2.0, 7.0, &mut rng).unwrap();
        assert_eq!((s.q.clone(), s.e.clone()), (vec![2.0], vec![5.0]));
        for _ in 0..1000 {
            let s = sample_toda_periodic_dirichlet(5, 3.0, 10.0, &mut rng).unwrap();
            assert!((s.total_q() - 3.0).abs() < 1e-12);
            assert!((s.total_e() - 7.0).abs() < 1e-12);
        }
        assert!(sample_toda_periodic_dirichlet(2, 5.0, 10.0, &mut rng).is_err());
    }

    #[test]
    fn integer_totals_and_closure() {
        let mut rng = stream(72, 0);
        for _ in 0..500 {
            let s = sample_toda_periodic_integer(3, 7, 20, &mut rng).unwrap();
            assert_eq!(s.total_q(), 7);
            assert_eq!(s.total_e(), 13);
            let t = s.step().unwrap();
            assert_eq!(t.total_q(), 7);
            let via = toda_step_via_path(&s.to_rational()).unwrap().0;
            assert_eq!(via.to_integer().unwrap(), t);
        }
        assert!(sample_toda_periodic_integer(4, 3, 20, &mut rng).is_err());
    }

    #[test]
    fn compositions_are_uniform() {
        let mut rng = stream(74, 0);
        let mut seen = std::collections::BTreeMap::new();
        for _ in 0..60_000 {
            let s = sample_toda_periodic_compositions(3, 5, 12, &mut rng).unwrap();
            assert_eq!((s.total_q(), s.total_e()), (5, 7));
            *seen.entry(s.q).or_insert(0u32) += 1;
        }
        // six compositions of 5 into 3 parts, 10000 each on average
        assert_eq!(seen.len(), 6);
        assert!(seen.values().all(|&c| (9_500..10_500).contains(&c)), "{seen:?}");
        assert!(sample_toda_periodic_compositions(1, 1, 3, &mut rng).unwrap().q == [1]);
    }

    #[test]
    fn rational_bridge_agrees() {
        let mut rng = stream(73, 0);
        for k in 0..2000 {
            let j = 1 + k % 5;
            for periodic in [false, true] {
                let s = sample_rational_state(j, periodic, &mut rng).unwrap();
                assert_eq!(s.step().unwrap(), toda_step_via_path(&s).unwrap().0, "{s:?}");
            }
        }
    }
}
