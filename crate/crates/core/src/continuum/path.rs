//! Piecewise-linear paths and the continuous Pitman transform.
//!
//! A path is a list of breakpoints `(t_i, S(t_i))` with linear interpolation
//! in between. Everything here is exact in the scalar type: with
//! [`Rational`] the breakpoints of `TS` are computed without rounding.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticePath, LeftPolicy, RightPolicy};

pub type Rational = Ratio<i128>;

/// Ordered field used for path arithmetic.
pub trait Scalar: Copy + PartialOrd + Debug + Num + Signed + ToPrimitive {
    fn from_i64(v: i64) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// Maximal interval on which a path is monotone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Run<T> {
    pub start: T,
    pub end: T,
    pub rising: bool,
}

impl<T: Scalar> Run<T> {
    pub fn len(&self) -> T {
        self.end - self.start
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlPath<T = f64> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> PlPath<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::MalformedPath("times and values differ in length".into()));
        }
        if times.len() < 2 {
            return Err(Error::EmptyWindow);
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::MalformedPath("breakpoint times must increase strictly".into()));
        }
        Ok(Self { times, values })
    }

    /// Path starting at `(t0, v0)` built from `(length, slope)` pieces.
    pub fn from_segments(t0: T, v0: T, segments: &[(T, T)]) -> Result<Self> {
        let mut times = vec![t0];
        let mut values = vec![v0];
        let (mut t, mut v) = (t0, v0);
        for &(len, slope) in segments {
            t = t + len;
            v = v + slope * len;
            times.push(t);
            values.push(v);
        }
        Self::new(times, values)
    }

    /// Linear interpolation of a lattice path at integer times.
    pub fn from_lattice(path: &LatticePath) -> Self {
        let times = (path.start()..=path.end()).map(T::from_i64).collect();
        let values = path.values().iter().map(|&v| T::from_i64(v)).collect();
        Self { times, values }
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn first(&self) -> T {
        self.times[0]
    }

    pub fn last(&self) -> T {
        *self.times.last().unwrap()
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.first() && t <= self.last()
    }

    fn outside(&self, t: T) -> Error {
        Error::OutsideWindow { t: t.to_f64_lossy(), first: self.first().to_f64_lossy(), last: self.last().to_f64_lossy() }
    }

    pub fn at(&self, t: T) -> Result<T> {
        if !self.contains(t) {
            return Err(self.outside(t));
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return Ok(self.values[0]);
        }
        let i = i - 1;
        if self.times[i] == t || i + 1 == self.times.len() {
            return Ok(self.values[i]);
        }
        Ok(interpolate(self.times[i], self.values[i], self.times[i + 1], self.values[i + 1], t))
    }

    pub fn slope(&self, segment: usize) -> T {
        (self.values[segment + 1] - self.values[segment]) / (self.times[segment + 1] - self.times[segment])
    }

    /// Drop breakpoints between segments of equal slope.
    pub fn simplify(&self) -> Self {
        let n = self.times.len();
        let mut times = vec![self.times[0]];
        let mut values = vec![self.values[0]];
        for i in 1..n - 1 {
            if self.slope(i - 1) != self.slope(i) {
                times.push(self.times[i]);
                values.push(self.values[i]);
            }
        }
        times.push(self.times[n - 1]);
        values.push(self.values[n - 1]);
        Self { times, values }
    }

    /// Maximal monotone runs, left to right. Flat pieces join the run before
    /// them.
    pub fn runs(&self) -> Vec<Run<T>> {
        let mut out: Vec<Run<T>> = Vec::new();
        for i in 0..self.times.len() - 1 {
            let dv = self.values[i + 1] - self.values[i];
            let rising = match out.last() {
                _ if dv > T::zero() => true,
                _ if dv < T::zero() => false,
                Some(r) => r.rising,
                None => true,
            };
            match out.last_mut() {
                Some(r) if r.rising == rising => r.end = self.times[i + 1],
                _ => out.push(Run { start: self.times[i], end: self.times[i + 1], rising }),
            }
        }
        out
    }

    /// Interior local maxima: ends of rising runs followed by falling runs.
    pub fn local_maxima(&self) -> Vec<T> {
        self.runs().windows(2).filter(|w| w[0].rising && !w[1].rising).map(|w| w[0].end).collect()
    }

    /// Interior local minima.
    pub fn local_minima(&self) -> Vec<T> {
        self.runs().windows(2).filter(|w| !w[0].rising && w[1].rising).map(|w| w[0].end).collect()
    }

    /// The path on `[lo, hi]`, with interpolated end points.
    pub fn restrict(&self, lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::EmptyWindow);
        }
        let (vlo, vhi) = (self.at(lo)?, self.at(hi)?);
        let mut times = vec![lo];
        let mut values = vec![vlo];
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if t > lo && t < hi {
                times.push(t);
                values.push(v);
            }
        }
        times.push(hi);
        values.push(vhi);
        Ok(Self { times, values })
    }

    /// `theta^t`: `s -> S(t + s) - S(t)`.
    pub fn shift(&self, t: T) -> Result<Self> {
        let st = self.at(t)?;
        Ok(Self {
            times: self.times.iter().map(|&x| x - t).collect(),
            values: self.values.iter().map(|&v| v - st).collect(),
        })
    }

    /// `t -> -S(-t)`; turns future minima into past maxima.
    pub fn mirror(&self) -> Self {
        Self {
            times: self.times.iter().rev().map(|&t| -t).collect(),
            values: self.values.iter().rev().map(|&v| -v).collect(),
        }
    }

    /// Increment over the window, `S(last) - S(first)`.
    pub fn increment(&self) -> T {
        *self.values.last().unwrap() - self.values[0]
    }

    /// Treat the window as one period and repeat it `periods` times to the
    /// right, using `S(t + L) = S(t) + S(L) - S(0)`.
    pub fn periodic_extend(&self, periods: usize) -> Self {
        let (len, rise) = (self.last() - self.first(), self.increment());
        let mut times = self.times.clone();
        let mut values = self.values.clone();
        let mut dt = T::zero();
        let mut dv = T::zero();
        for _ in 1..periods {
            dt = dt + len;
            dv = dv + rise;
            for (&t, &v) in self.times.iter().zip(&self.values).skip(1) {
                times.push(t + dt);
                values.push(v + dv);
            }
        }
        Self { times, values }
    }

    /// Float copy, for statistics and rendering.
    pub fn to_f64(&self) -> PlPath<f64> {
        PlPath {
            times: self.times.iter().map(|t| t.to_f64_lossy()).collect(),
            values: self.values.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    fn with_points(mut self, t: T, v: T) -> Self {
        self.times.push(t);
        self.values.push(v);
        self
    }
}

fn interpolate<T: Scalar>(t0: T, v0: T, t1: T, v1: T, t: T) -> T {
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Common refinement of `S` and its running maximum started at `m_start`:
/// breakpoint times, `S` and `M` on them. `M` gains a breakpoint wherever
/// `S` climbs back to its previous maximum.
fn with_running_max<T: Scalar>(times: &[T], values: &[T], m_start: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut m = max_of(m_start, values[0]);
    let mut ts = vec![times[0]];
    let mut ss = vec![values[0]];
    let mut ms = vec![m];
    for i in 0..times.len() - 1 {
        let (t0, s0, t1, s1) = (times[i], values[i], times[i + 1], values[i + 1]);
        if s1 > m {
            if s0 < m {
                let tc = interpolate(s0, t0, s1, t1, m);
                if tc > t0 && tc < t1 {
                    ts.push(tc);
                    ss.push(m);
                    ms.push(m);
                }
            }
            m = s1;
        }
        ts.push(t1);
        ss.push(s1);
        ms.push(m);
    }
    (ts, ss, ms)
}

fn positive_drift<T: Scalar>(path: &PlPath<T>) -> Result<()> {
    let d = path.increment();
    if d > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveDrift { drift: d.to_f64_lossy() })
    }
}

/// Grid, `S` and `M` over the window of `path` under the given policy.
fn refined<T: Scalar>(path: &PlPath<T>, policy: LeftPolicy) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    match policy {
        LeftPolicy::FiniteSupport | LeftPolicy::Buffered => Ok(with_running_max(&path.times, &path.values, path.values[0])),
        LeftPolicy::Cyclic => {
            positive_drift(path)?;
            // one period of lookback: earlier periods sit lower by the drift
            let (len, rise) = (path.last() - path.first(), path.increment());
            let mut times: Vec<T> = path.times.iter().map(|&t| t - len).collect();
            let mut values: Vec<T> = path.values.iter().map(|&v| v - rise).collect();
            times.extend_from_slice(&path.times[1..]);
            values.extend_from_slice(&path.values[1..]);
            let (ts, ss, ms) = with_running_max(&times, &values, values[0]);
            let k = ts.iter().position(|&t| t == path.first()).expect("period seam on the grid");
            Ok((ts[k..].to_vec(), ss[k..].to_vec(), ms[k..].to_vec()))
        }
    }
}

/// Past maximum `M_t = sup_{u <= t} S_u` on the window. Under the
/// finite-support policy the path is taken to rise into the window from the
/// left; under the cyclic policy the window is one period.
pub fn pl_running_max<T: Scalar>(path: &PlPath<T>, policy: LeftPolicy) -> Result<PlPath<T>> {
    let (ts, _, ms) = refined(path, policy)?;
    Ok(PlPath { times: ts, values: ms }.simplify())
}

/// Carrier `W = M - S` on the window.
pub fn pl_carrier<T: Scalar>(path: &PlPath<T>, policy: LeftPolicy) -> Result<PlPath<T>> {
    let (ts, ss, ms) = refined(path, policy)?;
    let values = ss.iter().zip(&ms).map(|(&s, &m)| m - s).collect();
    Ok(PlPath { times: ts, values })
}

/// `(TS)_t = 2 M_t - S_t - 2 M_0`. The window must contain 0.
///
/// Under the finite-support policy the path continues with slope +1 after
/// the window, and the image is extended until the carrier empties plus one
/// unit of that ray.
pub fn pl_pitman<T: Scalar>(path: &PlPath<T>, policy: LeftPolicy) -> Result<PlPath<T>> {
    if !path.contains(T::zero()) {
        return Err(path.outside(T::zero()));
    }
    let mut ext = path.clone();
    if policy == LeftPolicy::FiniteSupport {
        let (_, ss, ms) = refined(path, policy)?;
        let k = ss.len() - 1;
        let (t, s, top) = (path.last(), ss[k], ms[k]);
        if s < top {
            ext = ext.with_points(t + (top - s), top).with_points(t + (top - s) + T::one(), top + T::one());
        } else if ss[k - 1] < ms[k - 1] {
            // the carrier empties exactly at the end: show the ray beyond it
            ext = ext.with_points(t + T::one(), top + T::one());
        }
    }
    let (ts, ss, ms) = refined(&ext, policy)?;
    let m_path = PlPath { times: ts.clone(), values: ms.clone() };
    let m0 = m_path.at(T::zero())?;
    let two = T::one() + T::one();
    let values = ss.iter().zip(&ms).map(|(&s, &m)| two * m - s - two * m0).collect();
    Ok(PlPath { times: ts, values }.simplify())
}

/// Reflection in the future minimum, `2 F_t - S_t - 2 F_0`, computed as the
/// mirror image of Pitman's transform of the mirrored path.
pub fn pl_inverse<T: Scalar>(path: &PlPath<T>, policy: RightPolicy) -> Result<PlPath<T>> {
    let left = match policy {
        RightPolicy::FiniteSupport => LeftPolicy::FiniteSupport,
        RightPolicy::Cyclic => LeftPolicy::Cyclic,
        RightPolicy::Buffered => LeftPolicy::Buffered,
    };
    Ok(pl_pitman(&path.mirror(), left)?.mirror())
}

/// `tau = inf {t >= 0 : t is a local maximum}` for a path on a window.
pub fn first_local_max<T: Scalar>(path: &PlPath<T>) -> Result<T> {
    path.local_maxima().into_iter().find(|&t| t >= T::zero()).ok_or(Error::NoLocalMaximum)
}

/// `theta^tau S`: shift the first local maximum at or after 0 to the origin.
pub fn shift_to_local_max<T: Scalar>(path: &PlPath<T>) -> Result<(PlPath<T>, T)> {
    let tau = first_local_max(path)?;
    Ok((path.shift(tau)?, tau))
}

/// Periodic version: `path` is one period on `[0, L]`; the result is the
/// period `[tau, tau + L]` moved back to `[0, L]`.
pub fn shift_to_local_max_periodic<T: Scalar>(path: &PlPath<T>) -> Result<(PlPath<T>, T)> {
    if path.first() != T::zero() {
        return Err(Error::MalformedPath("periodic paths are stored on [0, L]".into()));
    }
    let len = path.last();
    let two = path.periodic_extend(2);
    // a local maximum at 0 shows up at L on the doubled path
    let tau = two
        .local_maxima()
        .into_iter()
        .map(|t| if t == len { T::zero() } else { t })
        .filter(|&t| t < len)
        .fold(None, |acc: Option<T>, t| match acc {
            Some(a) if a <= t => Some(a),
            _ => Some(t),
        })
        .ok_or(Error::NoLocalMaximum)?;
    let period = two.restrict(tau, tau + len)?.shift(tau)?;
    Ok((period.simplify(), tau))
}

/// `t -> a S_{t/b}`: the lattice path with time scaled by `b` and space by
/// `a`, linearly interpolated.
pub fn rescale_path(path: &LatticePath, a: f64, b: f64) -> Result<PlPath<f64>> {
    if !(a > 0.0 && b > 0.0) {
        return Err(crate::error::invalid(format!("scale factors must be positive, got a={a}, b={b}")));
    }
    let times = (path.start()..=path.end()).map(|n| n as f64 * b).collect();
    let values = path.values().iter().map(|&v| a * v as f64).collect();
    PlPath::new(times, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{encode_path, pitman_transform, BinaryConfiguration};

    fn q(n: i128) -> Rational {
        Ratio::from_integer(n)
    }

    fn path_q(pts: &[(i128, i128)]) -> PlPath<Rational> {
        PlPath::new(pts.iter().map(|p| q(p.0)).collect(), pts.iter().map(|p| q(p.1)).collect()).unwrap()
    }

    #[test]
    fn nondecreasing_path_is_fixed() {
        let s = path_q(&[(-2, -2), (0, 0), (1, 1), (3, 1), (5, 3)]);
        assert_eq!(pl_pitman(&s, LeftPolicy::FiniteSupport).unwrap(), s.simplify());
    }

    #[test]
    fn v_shape_reflects_to_a_tent() {
        // rise to 0, fall for 2, rise: the carrier picks up 2 units
        let s = path_q(&[(-1, -1), (0, 0), (2, -2), (5, 1)]);
        let t = pl_pitman(&s, LeftPolicy::FiniteSupport).unwrap();
        assert_eq!(t, path_q(&[(-1, -1), (2, 2), (4, 0), (5, 1)]));
        assert_eq!(t.local_maxima(), vec![q(2)]);
    }

    #[test]
    fn lattice_paths_agree_with_discrete_transform() {
        // every finite configuration on 8 sites, embedded at integer times
        for code in 0u32..256 {
            let sites: Vec<u8> = (0..8).map(|i| ((code >> i) & 1) as u8).collect();
            let cfg = BinaryConfiguration::finite(-3, sites).unwrap();
            let s = encode_path(&cfg).unwrap();
            let discrete = pitman_transform(&s, LeftPolicy::FiniteSupport).unwrap();
            let cont = pl_pitman(&PlPath::<Rational>::from_lattice(&s), LeftPolicy::FiniteSupport).unwrap();
            for n in discrete.start()..=discrete.end() {
                assert_eq!(cont.at(q(n as i128)).unwrap(), q(discrete.at(n) as i128), "code {code} n {n}");
            }
        }
    }

    #[test]
    fn inverse_undoes_transform() {
        let s = path_q(&[(-1, -1), (0, 0), (3, -3), (4, -2), (6, -4), (10, 0)]);
        let t = pl_pitman(&s, LeftPolicy::FiniteSupport).unwrap();
        let back = pl_inverse(&t, RightPolicy::FiniteSupport).unwrap();
        for k in -1..=10 {
            assert_eq!(back.at(q(k)).unwrap(), s.at(q(k)).unwrap());
        }
    }

    #[test]
    fn cyclic_max_uses_one_period() {
        // period [0, 4]: down 1, up 3, drift 2
        let s = path_q(&[(0, 0), (1, -1), (4, 2)]);
        let m = pl_running_max(&s, LeftPolicy::Cyclic).unwrap();
        assert_eq!(m.at(q(0)).unwrap(), q(0));
        assert_eq!(m.at(q(1)).unwrap(), q(0));
        assert_eq!(m.at(q(2)).unwrap(), q(0));
        assert_eq!(m.at(q(4)).unwrap(), q(2));
        let flat = path_q(&[(0, 0), (1, 1), (2, 0)]);
        assert!(matches!(pl_running_max(&flat, LeftPolicy::Cyclic), Err(Error::NonPositiveDrift { .. })));
    }

    #[test]
    fn shift_examples() {
        let peak = path_q(&[(-1, -1), (0, 0), (1, -1)]);
        let (p, tau) = shift_to_local_max(&peak).unwrap();
        assert_eq!(tau, q(0));
        assert_eq!(p, peak);
        let later = path_q(&[(-1, 0), (0, 1), (2, 3), (3, 2)]);
        let (p, tau) = shift_to_local_max(&later).unwrap();
        assert_eq!(tau, q(2));
        assert_eq!(p.at(q(0)).unwrap(), q(0));
        assert_eq!(p.first(), q(-3));
        let rising = path_q(&[(0, 0), (1, 1)]);
        assert!(matches!(shift_to_local_max(&rising), Err(Error::NoLocalMaximum)));
    }

    #[test]
    fn periodic_shift_wraps() {
        // up 1, down 2, up 3 on [0, 6]; the maximum sits at t = 1
        let s = path_q(&[(0, 0), (1, 1), (3, -1), (6, 2)]);
        let (p, tau) = shift_to_local_max_periodic(&s).unwrap();
        assert_eq!(tau, q(1));
        assert_eq!(p, path_q(&[(0, 0), (2, -2), (6, 2)]));
        let (again, tau0) = shift_to_local_max_periodic(&p).unwrap();
        assert_eq!(tau0, q(0));
        assert_eq!(again, p);
    }

    #[test]
    fn rescale_identity_and_scaling() {
        let s = LatticePath::from_origin(&[1, 0, 1, 2]).unwrap();
        let r = rescale_path(&s, 1.0, 1.0).unwrap();
        assert_eq!(r, PlPath::<f64>::from_lattice(&s));
        let r = rescale_path(&s, 0.5, 0.25).unwrap();
        assert_eq!(r.at(1.0).unwrap(), 1.0);
        assert_eq!(r.at(0.125).unwrap(), 0.25);
    }

    #[test]
    fn runs_merge_collinear_pieces() {
        let s = path_q(&[(0, 0), (1, 1), (2, 2), (3, 1), (4, 1), (5, 0)]);
        let runs = s.runs();
        assert_eq!(runs.len(), 2);
        assert!(runs[0].rising && !runs[1].rising);
        assert_eq!(runs[1].len(), q(3));
    }
}
