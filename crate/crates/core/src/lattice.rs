//! Particle configurations, their path encodings, Pitman's transformation
//! and the carrier.
//!
//! A configuration lives on an integer window `[first, last]`. The path
//! encoding has `S_0 = 0` and `S_n - S_{n-1} = 1 - 2 eta_n`. Three kinds of
//! boundary are supported:
//!
//! * finite support: every site outside the window is empty;
//! * cyclic: the window is `[1, N]` and repeats with period `N`;
//! * buffered: the window is a finite piece of a stationary configuration
//!   whose left part serves as a buffer for the past maximum, with a
//!   certified bound on the probability that the truncation matters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail model behind a buffer certificate: an upper bound on the
/// probability that the path before the buffer climbs more than `t` above
/// its value at the buffer's left end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailModel {
    /// `scale * ratio^t`.
    Geometric { scale: f64, ratio: f64 },
    /// The carrier never exceeds `k`.
    Bounded { k: u64 },
}

impl TailModel {
    pub fn bound(&self, t: i64) -> f64 {
        match *self {
            TailModel::Geometric { scale, ratio } => (scale * ratio.powf(t as f64)).min(1.0),
            TailModel::Bounded { k } => {
                if t >= k as i64 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Certificate attached to a buffered window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferCertificate {
    /// First index of the reported region; sites before it are buffer.
    pub interior_start: i64,
    /// Upper bound on the probability that the path before the window
    /// exceeds the running maximum seen inside the buffer.
    pub tail_bound: f64,
    pub model: TailModel,
    pub tolerance: f64,
}

/// Earliest index `e <= 0` such that the past maximum of `path` is exact
/// from `e` onwards up to probability `tolerance`, with its bound.
pub fn certify_buffer(path: &LatticePath, model: TailModel, tolerance: f64) -> Option<(i64, f64)> {
    let s_star = path.values[0];
    let mut top = s_star;
    for e in path.start..=0 {
        top = top.max(path.at(e));
        let b = model.bound(top - s_star);
        if e > path.start && b < tolerance {
            return Some((e, b));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    FiniteSupport,
    Cyclic,
    Buffered(BufferCertificate),
    /// A plain stationary window without a certified buffer. Measurable but
    /// not evolvable.
    Window,
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::FiniteSupport => "finite-support",
            Boundary::Cyclic => "cyclic",
            Boundary::Buffered(_) => "buffered",
            Boundary::Window => "window",
        }
    }
}

/// A 0/1 configuration on the window `[first, first + sites.len() - 1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BinaryConfiguration {
    first: i64,
    sites: Vec<u8>,
    boundary: Boundary,
}

impl BinaryConfiguration {
    fn checked(first: i64, sites: Vec<u8>, boundary: Boundary) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if let Some((i, &v)) = sites.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::NonBinarySite { index: first + i as i64, value: v });
        }
        Ok(Self { first, sites, boundary })
    }

    /// Finite-support configuration whose first site has index `first`.
    pub fn finite(first: i64, sites: Vec<u8>) -> Result<Self> {
        Self::checked(first, sites, Boundary::FiniteSupport)
    }

    /// Cyclic configuration `(x_1, ..., x_N)`.
    pub fn cyclic(sites: Vec<u8>) -> Result<Self> {
        Self::checked(1, sites, Boundary::Cyclic)
    }

    pub fn buffered(first: i64, sites: Vec<u8>, cert: BufferCertificate) -> Result<Self> {
        Self::checked(first, sites, Boundary::Buffered(cert))
    }

    pub fn window(first: i64, sites: Vec<u8>) -> Result<Self> {
        Self::checked(first, sites, Boundary::Window)
    }

    /// Finite-support configuration with particles at the given indices.
    pub fn from_positions(positions: &[i64]) -> Result<Self> {
        let lo = positions.iter().copied().min().unwrap_or(1).min(1);
        let hi = positions.iter().copied().max().unwrap_or(1).max(lo);
        let mut sites = vec![0u8; (hi - lo + 1) as usize];
        for &p in positions {
            sites[(p - lo) as usize] = 1;
        }
        Self::finite(lo, sites)
    }

    /// Cyclic configuration from the low `n` bits of `code` (bit `i` is `x_{i+1}`).
    pub fn cyclic_from_code(code: u64, n: usize) -> Self {
        let sites = (0..n).map(|i| ((code >> i) & 1) as u8).collect();
        Self { first: 1, sites, boundary: Boundary::Cyclic }
    }

    /// Inverse of [`cyclic_from_code`](Self::cyclic_from_code).
    pub fn code(&self) -> u64 {
        self.sites.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    /// Parse the origin-marked format, e.g. `"0101|110010"` where `|`
    /// precedes index 1. Without a marker the string starts at index 1.
    pub fn parse_with(s: &str, boundary: Boundary) -> Result<Self> {
        let s = s.trim();
        let (left, right) = match s.split_once('|') {
            Some((l, r)) => (l, r),
            None => ("", s),
        };
        let mut sites = Vec::with_capacity(left.len() + right.len());
        for (k, ch) in left.chars().chain(right.chars()).enumerate() {
            match ch {
                '0' | '○' | '.' => sites.push(0),
                '1' | '●' | '#' => sites.push(1),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "configuration character {ch:?} at position {k}"
                    )))
                }
            }
        }
        let first = 1 - left.chars().count() as i64;
        if boundary == Boundary::Cyclic && first != 1 {
            return Err(Error::InvalidParameter(
                "cyclic configurations start at index 1".into(),
            ));
        }
        Self::checked(first, sites, boundary)
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.first + self.sites.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[u8] {
        &self.sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_cyclic(&self) -> bool {
        self.boundary == Boundary::Cyclic
    }

    /// Site value at `n`. Outside the window this is 0 for finite support,
    /// the periodic copy for cyclic windows, and `None` otherwise.
    pub fn get(&self, n: i64) -> Option<u8> {
        let len = self.sites.len() as i64;
        let off = n - self.first;
        if (0..len).contains(&off) {
            return Some(self.sites[off as usize]);
        }
        match self.boundary {
            Boundary::FiniteSupport => Some(0),
            Boundary::Cyclic => Some(self.sites[off.rem_euclid(len) as usize]),
            _ => None,
        }
    }

    /// Number of particles, `f_0` in the cyclic case.
    pub fn particle_count(&self) -> usize {
        self.sites.iter().filter(|&&b| b == 1).count()
    }

    pub fn particle_positions(&self) -> Vec<i64> {
        self.sites
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| self.first + i as i64)
            .collect()
    }

    /// Sub-window `[lo, hi]` as a plain site vector.
    pub fn slice(&self, lo: i64, hi: i64) -> Option<Vec<u8>> {
        (lo..=hi).map(|n| self.get(n)).collect()
    }

    /// Error unless this is a cyclic configuration of density below 1/2.
    pub fn check_cyclic_density(&self) -> Result<()> {
        if !self.is_cyclic() {
            return Err(Error::WrongBoundary { expected: "cyclic", found: self.boundary.name() });
        }
        check_density(self.particle_count(), self.len())
    }

    /// Sub-window `[lo, hi]` keeping the boundary kind.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi || lo < self.first || hi > self.last() {
            return Err(Error::InvalidParameter(format!(
                "[{lo}, {hi}] is not inside [{}, {}]",
                self.first,
                self.last()
            )));
        }
        let sites = self.sites[(lo - self.first) as usize..=(hi - self.first) as usize].to_vec();
        Ok(Self { first: lo, sites, boundary: self.boundary })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Text row with ● for particles and ○ for holes over `[lo, hi]`.
    pub fn render_row(&self, lo: i64, hi: i64) -> String {
        (lo..=hi)
            .map(|n| match self.get(n) {
                Some(1) => '●',
                Some(_) => '○',
                None => ' ',
            })
            .collect()
    }
}

pub(crate) fn check_density(particles: usize, n: usize) -> Result<()> {
    match (2 * particles).cmp(&n) {
        std::cmp::Ordering::Less => Ok(()),
        std::cmp::Ordering::Equal => Err(Error::DensityAtHalf { n, particles }),
        std::cmp::Ordering::Greater => Err(Error::DensityAboveHalf { n, particles }),
    }
}

/// Finite-support configurations compare by particle set; all others
/// compare window, sites and boundary.
impl PartialEq for BinaryConfiguration {
    fn eq(&self, other: &Self) -> bool {
        match (self.boundary, other.boundary) {
            (Boundary::FiniteSupport, Boundary::FiniteSupport) => {
                self.particle_positions() == other.particle_positions()
            }
            _ => {
                self.first == other.first
                    && self.sites == other.sites
                    && self.boundary == other.boundary
            }
        }
    }
}

impl fmt::Display for BinaryConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.first.min(1);
        let hi = self.last().max(0);
        let bit = |n: i64| match self.get(n) {
            Some(1) => '1',
            _ => '0',
        };
        let left: String = (lo..=0).map(bit).collect();
        let right: String = (1..=hi).map(bit).collect();
        write!(f, "{left}|{right}")
    }
}

impl FromStr for BinaryConfiguration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, Boundary::FiniteSupport)
    }
}

/// Integer path with unit increments on `[start, start + len - 1]`, `S_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    start: i64,
    values: Vec<i64>,
}

impl LatticePath {
    pub fn new(start: i64, values: Vec<i64>) -> Result<Self> {
        let end = start + values.len() as i64 - 1;
        if values.is_empty() || start > 0 || end < 0 || values[(-start) as usize] != 0 {
            return Err(Error::PathNotAnchored { start, end });
        }
        for (i, w) in values.windows(2).enumerate() {
            let step = w[1] - w[0];
            if step.abs() != 1 {
                return Err(Error::NonUnitIncrement { index: start + i as i64 + 1, step });
            }
        }
        Ok(Self { start, values })
    }

    /// Path on `[0, k]` with `S_1, ..., S_k` given.
    pub fn from_origin(after_zero: &[i64]) -> Result<Self> {
        let mut v = Vec::with_capacity(after_zero.len() + 1);
        v.push(0);
        v.extend_from_slice(after_zero);
        Self::new(0, v)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn at(&self, n: i64) -> i64 {
        self.values[(n - self.start) as usize]
    }

    /// Values at indices `1..=end`.
    pub fn after_origin(&self) -> &[i64] {
        &self.values[(1 - self.start) as usize..]
    }
}

/// Nonnegative carrier load over `[start, start + len - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierPath {
    pub start: i64,
    pub values: Vec<u64>,
}

impl CarrierPath {
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn at(&self, n: i64) -> u64 {
        self.values[(n - self.start) as usize]
    }

    /// Carrier values at indices `1..=end`.
    pub fn after_origin(&self) -> &[u64] {
        &self.values[(1 - self.start) as usize..]
    }
}

/// How the past of the path, before the window, is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeftPolicy {
    /// Empty sites to the left: the path decreases leftwards off the window.
    FiniteSupport,
    /// Path on `[0, N]` extended by `S_{n+N} = S_n + S_N`.
    Cyclic,
    /// Maximum taken over the window only; the caller holds the certificate.
    Buffered,
}

/// How the future of the path, after the window, is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RightPolicy {
    FiniteSupport,
    Cyclic,
    Buffered,
}

fn policy_for(config: &BinaryConfiguration) -> Result<LeftPolicy> {
    match config.boundary {
        Boundary::FiniteSupport => Ok(LeftPolicy::FiniteSupport),
        Boundary::Cyclic => Ok(LeftPolicy::Cyclic),
        Boundary::Buffered(_) => Ok(LeftPolicy::Buffered),
        Boundary::Window => Err(Error::WrongBoundary {
            expected: "finite-support, cyclic or buffered",
            found: "window",
        }),
    }
}

/// Path encoding. Finite and buffered windows are padded with empty sites
/// so that the path covers the origin. Cyclic configurations encode one
/// period on `[0, N]`.
pub fn encode_path(config: &BinaryConfiguration) -> Result<LatticePath> {
    if config.sites.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let (lo, hi) = match config.boundary {
        Boundary::Cyclic => (1, config.last()),
        Boundary::FiniteSupport => (config.first.min(1), config.last().max(0)),
        _ => {
            if config.first > 1 || config.last() < 0 {
                return Err(Error::PathNotAnchored { start: config.first - 1, end: config.last() });
            }
            (config.first, config.last())
        }
    };
    let start = lo - 1;
    let mut values = vec![0i64; (hi - start + 1) as usize];
    let origin = (-start) as usize;
    for n in 1..=hi {
        let i = (n - start) as usize;
        values[i] = values[i - 1] + 1 - 2 * config.get(n).unwrap_or(0) as i64;
    }
    for n in (lo..=0).rev() {
        let i = (n - start) as usize;
        // S_{n-1} = S_n - (1 - 2 eta_n)
        values[i - 1] = values[i] - 1 + 2 * config.get(n).unwrap_or(0) as i64;
    }
    debug_assert_eq!(values[origin], 0);
    Ok(LatticePath { start, values })
}

/// Finite-support configuration on `[start + 1, end]` read off the increments.
pub fn decode_path(path: &LatticePath) -> Result<BinaryConfiguration> {
    let mut sites = Vec::with_capacity(path.values.len().saturating_sub(1));
    for (i, w) in path.values.windows(2).enumerate() {
        match w[1] - w[0] {
            1 => sites.push(0),
            -1 => sites.push(1),
            step => {
                return Err(Error::NonUnitIncrement { index: path.start + i as i64 + 1, step })
            }
        }
    }
    BinaryConfiguration::finite(path.start + 1, sites)
}

/// Cyclic configuration from a one-period path on `[0, N]`.
pub fn decode_cyclic(path: &LatticePath) -> Result<BinaryConfiguration> {
    if path.start != 0 {
        return Err(Error::MalformedPath("cyclic paths live on [0, N]".into()));
    }
    let c = decode_path(path)?;
    Ok(c.with_boundary(Boundary::Cyclic))
}

fn cyclic_period(path: &LatticePath) -> Result<(usize, i64)> {
    if path.start != 0 || path.values.len() < 2 {
        return Err(Error::MalformedPath("cyclic paths live on [0, N] with N >= 1".into()));
    }
    let n = path.values.len() - 1;
    let drift = path.values[n];
    if drift <= 0 {
        // S_N = N - 2 f_0
        let particles = ((n as i64 - drift) / 2) as usize;
        check_density(particles, n)?;
    }
    Ok((n, drift))
}

/// Past maximum `M_n = sup_{m <= n} S_m` at every index of the window.
pub fn running_max(path: &LatticePath, policy: LeftPolicy) -> Result<Vec<i64>> {
    match policy {
        LeftPolicy::FiniteSupport | LeftPolicy::Buffered => {
            let mut out = Vec::with_capacity(path.values.len());
            let mut m = i64::MIN;
            for &s in &path.values {
                m = m.max(s);
                out.push(m);
            }
            Ok(out)
        }
        LeftPolicy::Cyclic => {
            let (n, drift) = cyclic_period(path)?;
            let s = |m: i64| -> i64 {
                let q = m.div_euclid(n as i64);
                path.values[m.rem_euclid(n as i64) as usize] + q * drift
            };
            Ok((0..=n as i64)
                .map(|k| ((k - n as i64 + 1)..=k).map(s).max().expect("nonempty lookback"))
                .collect())
        }
    }
}

/// Future minimum `F_n = inf_{m >= n} S_m` at every index of the window.
pub fn future_min(path: &LatticePath, policy: RightPolicy) -> Result<Vec<i64>> {
    match policy {
        RightPolicy::FiniteSupport | RightPolicy::Buffered => {
            let mut out = vec![0; path.values.len()];
            let mut m = i64::MAX;
            for (i, &s) in path.values.iter().enumerate().rev() {
                m = m.min(s);
                out[i] = m;
            }
            Ok(out)
        }
        RightPolicy::Cyclic => {
            let (n, drift) = cyclic_period(path)?;
            let s = |m: i64| -> i64 {
                let q = m.div_euclid(n as i64);
                path.values[m.rem_euclid(n as i64) as usize] + q * drift
            };
            Ok((0..=n as i64)
                .map(|k| (k..k + n as i64).map(s).min().expect("nonempty lookahead"))
                .collect())
        }
    }
}

/// Pitman's transformation `(TS)_n = 2 M_n - S_n - 2 M_0`.
///
/// Under the finite-support policy the window is first extended to the
/// right until the carrier is empty, so the output encodes the whole image.
pub fn pitman_transform(path: &LatticePath, policy: LeftPolicy) -> Result<LatticePath> {
    let mut ext = path.clone();
    if policy == LeftPolicy::FiniteSupport {
        let m = running_max(path, policy)?;
        let load = m.last().unwrap() - path.values.last().unwrap();
        let mut v = *ext.values.last().unwrap();
        for _ in 0..load {
            v += 1;
            ext.values.push(v);
        }
    }
    let m = running_max(&ext, policy)?;
    let m0 = m[(-ext.start) as usize];
    let values = ext.values.iter().zip(&m).map(|(&s, &mx)| 2 * mx - s - 2 * m0).collect();
    Ok(LatticePath { start: ext.start, values })
}

/// Reflection in the future minimum, `2 F_n - S_n - 2 F_0`.
///
/// Under the finite-support policy the window is first extended to the
/// left so that the image is fully encoded.
pub fn inverse_transform(path: &LatticePath, policy: RightPolicy) -> Result<LatticePath> {
    let mut ext = path.clone();
    if policy == RightPolicy::FiniteSupport {
        let f = future_min(path, policy)?;
        let dip = path.values[0] - f[0];
        let s0 = path.values[0];
        let mut prefix: Vec<i64> = (1..=dip).rev().map(|k| s0 - k).collect();
        prefix.extend_from_slice(&ext.values);
        ext.values = prefix;
        ext.start -= dip;
    }
    let f = future_min(&ext, policy)?;
    let f0 = f[(-ext.start) as usize];
    let values = ext.values.iter().zip(&f).map(|(&s, &fm)| 2 * fm - s - 2 * f0).collect();
    Ok(LatticePath { start: ext.start, values })
}

/// Carrier `W_n = M_n - S_n` over the window of `path`.
pub fn carrier(path: &LatticePath, policy: LeftPolicy) -> Result<CarrierPath> {
    let m = running_max(path, policy)?;
    let values = m.iter().zip(&path.values).map(|(&mx, &s)| (mx - s) as u64).collect();
    Ok(CarrierPath { start: path.start, values })
}

/// One step of the box-ball system by a direct left-to-right carrier sweep.
pub fn evolve_finite(config: &BinaryConfiguration) -> Result<BinaryConfiguration> {
    if config.boundary != Boundary::FiniteSupport {
        return Err(Error::WrongBoundary {
            expected: "finite-support",
            found: config.boundary.name(),
        });
    }
    let extra = config.particle_count();
    let mut out = Vec::with_capacity(config.len() + extra);
    let mut load = 0usize;
    for k in 0..config.len() + extra {
        let ball = config.sites.get(k).copied().unwrap_or(0);
        if ball == 1 {
            load += 1;
            out.push(0);
        } else if load > 0 {
            load -= 1;
            out.push(1);
        } else {
            out.push(0);
        }
    }
    BinaryConfiguration::finite(config.first, out)
}

/// Carrier sweep on the torus: run the carrier from empty over two periods
/// and keep the second. After one full period the load is the periodic
/// fixed point whenever the density is below 1/2.
pub fn cyclic_carrier(config: &BinaryConfiguration) -> Result<Vec<u64>> {
    config.check_cyclic_density()?;
    let n = config.len();
    let mut load = 0u64;
    let mut out = vec![0u64; n];
    for pass in 0..2 {
        for (k, &b) in config.sites.iter().enumerate() {
            if b == 1 {
                load += 1;
            } else {
                load = load.saturating_sub(1);
            }
            if pass == 1 {
                out[k] = load;
            }
        }
    }
    Ok(out)
}

/// One step on the torus via the periodic carrier: a put-down at `n` is
/// `W_n - W_{n-1} = -1`.
pub fn periodic_transform(config: &BinaryConfiguration) -> Result<BinaryConfiguration> {
    let w = cyclic_carrier(config)?;
    let n = w.len();
    let sites = (0..n)
        .map(|k| {
            let prev = w[(k + n - 1) % n];
            u8::from(prev > 0 && w[k] + 1 == prev && config.sites[k] == 0)
        })
        .collect();
    BinaryConfiguration::cyclic(sites)
}

/// One step of the dynamics appropriate to the boundary kind.
///
/// Buffered windows return the image where it is exact, re-certified
/// against the same tail model when the image still covers the origin, and
/// marked `Window` otherwise.
pub fn transform(config: &BinaryConfiguration) -> Result<BinaryConfiguration> {
    let policy = policy_for(config)?;
    match policy {
        LeftPolicy::Cyclic => periodic_transform(config),
        LeftPolicy::FiniteSupport => {
            let t = pitman_transform(&encode_path(config)?, policy)?;
            decode_path(&t)
        }
        LeftPolicy::Buffered => {
            let Boundary::Buffered(cert) = config.boundary else { unreachable!() };
            let t = pitman_transform(&encode_path(config)?, policy)?;
            // the image is exact where both W_n and W_{n-1} are
            let lo = cert.interior_start + 1;
            let image = decode_path(&t)?.restrict(lo, config.last())?;
            let path = encode_path(&image.clone().with_boundary(Boundary::Window))?;
            Ok(match certify_buffer(&path, cert.model, cert.tolerance) {
                Some((e, bound)) => image.with_boundary(Boundary::Buffered(BufferCertificate {
                    interior_start: e,
                    tail_bound: bound,
                    ..cert
                })),
                None => image.with_boundary(Boundary::Window),
            })
        }
    }
}

/// Inverse step for finite-support and cyclic configurations.
pub fn inverse(config: &BinaryConfiguration) -> Result<BinaryConfiguration> {
    match config.boundary {
        Boundary::FiniteSupport => {
            decode_path(&inverse_transform(&encode_path(config)?, RightPolicy::FiniteSupport)?)
        }
        Boundary::Cyclic => {
            config.check_cyclic_density()?;
            decode_cyclic(&inverse_transform(&encode_path(config)?, RightPolicy::Cyclic)?)
        }
        b => Err(Error::WrongBoundary { expected: "finite-support or cyclic", found: b.name() }),
    }
}

/// Reversal `eta_n -> eta_{1-n}`. Cyclic configurations become
/// `(x_N, ..., x_1)`.
pub fn reverse_configuration(config: &BinaryConfiguration) -> BinaryConfiguration {
    let mut sites = config.sites.clone();
    sites.reverse();
    let first = if config.is_cyclic() { 1 } else { 1 - config.last() };
    BinaryConfiguration { first, sites, boundary: config.boundary }
}

/// Reversal `W_n -> W_{-n}`.
pub fn reverse_carrier(w: &CarrierPath) -> CarrierPath {
    let mut values = w.values.clone();
    values.reverse();
    CarrierPath { start: -w.end(), values }
}

/// Reversal of a one-period carrier `(w_1, ..., w_N)`:
/// `(w_{N-1}, ..., w_1, w_N)`.
pub fn reverse_cyclic_carrier(w: &[u64]) -> Vec<u64> {
    let n = w.len();
    (1..=n).map(|k| w[(n + n - k - 1) % n]).collect()
}

/// Cyclic shift `(theta x)_n = x_{n+k}`.
pub fn shift_cyclic(config: &BinaryConfiguration, k: i64) -> BinaryConfiguration {
    let n = config.len() as i64;
    let sites = (0..n).map(|i| config.sites[(i + k).rem_euclid(n) as usize]).collect();
    BinaryConfiguration { first: 1, sites, boundary: config.boundary }
}

/// First `n >= 0` with `eta_n = 0` and `eta_{n+1} = 1`: a local maximum of
/// the path encoding.
pub fn first_local_max_index(config: &BinaryConfiguration) -> Result<i64> {
    first_pattern(config, 0, 1)
}

/// First `n >= 0` with `eta_n = 1` and `eta_{n+1} = 0`: a local minimum.
pub fn first_local_min_index(config: &BinaryConfiguration) -> Result<i64> {
    first_pattern(config, 1, 0)
}

fn first_pattern(config: &BinaryConfiguration, a: u8, b: u8) -> Result<i64> {
    let end = match config.boundary {
        Boundary::Cyclic => config.len() as i64 - 1,
        Boundary::FiniteSupport => config.last(),
        _ => config.last() - 1,
    };
    (0.max(config.first() - 1)..=end)
        .find(|&n| config.get(n) == Some(a) && config.get(n + 1) == Some(b))
        .ok_or(Error::NoLocalMaximum)
}

/// Relabel sites so that index `k` becomes index 0. Cyclic configurations
/// rotate; other windows move, certificate included.
pub fn shift_window(config: &BinaryConfiguration, k: i64) -> BinaryConfiguration {
    match config.boundary {
        Boundary::Cyclic => shift_cyclic(config, k),
        Boundary::Buffered(cert) => BinaryConfiguration {
            first: config.first - k,
            sites: config.sites.clone(),
            boundary: Boundary::Buffered(BufferCertificate { interior_start: cert.interior_start - k, ..cert }),
        },
        b => BinaryConfiguration { first: config.first - k, sites: config.sites.clone(), boundary: b },
    }
}

/// `T` followed by the shift that puts the first local maximum at or after
/// 0 back at 0. Returns the image and the shift.
pub fn palm_transform(config: &BinaryConfiguration) -> Result<(BinaryConfiguration, i64)> {
    let image = transform(config)?;
    let tau = first_local_max_index(&image)?;
    Ok((shift_window(&image, tau), tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_of(positions: &[i64]) -> BinaryConfiguration {
        let mut sites = vec![0u8; 15];
        for &p in positions {
            sites[(p - 1) as usize] = 1;
        }
        BinaryConfiguration::finite(1, sites).unwrap()
    }

    #[test]
    fn encode_examples() {
        let c = BinaryConfiguration::finite(1, vec![0, 1, 1, 0, 0, 1]).unwrap();
        assert_eq!(encode_path(&c).unwrap().after_origin(), &[1, 0, -1, 0, 1, 0]);
        let z = BinaryConfiguration::finite(1, vec![0; 4]).unwrap();
        assert_eq!(encode_path(&z).unwrap().after_origin(), &[1, 2, 3, 4]);
        let row1 = row_of(&[2, 4, 5, 6, 9]);
        assert_eq!(
            encode_path(&row1).unwrap().after_origin(),
            &[1, 0, 1, 0, -1, -2, -1, 0, -1, 0, 1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn decode_examples() {
        let p = LatticePath::from_origin(&[1, 2, 3]).unwrap();
        assert_eq!(decode_path(&p).unwrap().sites(), &[0, 0, 0]);
        let p = LatticePath::from_origin(&[-1, 0, 1]).unwrap();
        assert_eq!(decode_path(&p).unwrap().sites(), &[1, 0, 0]);
        assert!(matches!(
            LatticePath::from_origin(&[1, 3]),
            Err(Error::NonUnitIncrement { index: 2, step: 2 })
        ));
    }

    #[test]
    fn running_max_single_ball_at_origin() {
        let c = BinaryConfiguration::finite(0, vec![1, 0, 0, 0]).unwrap();
        let p = encode_path(&c).unwrap();
        assert_eq!(p.start(), -1);
        assert_eq!(p.values(), &[1, 0, 1, 2, 3]);
        assert_eq!(running_max(&p, LeftPolicy::FiniteSupport).unwrap(), vec![1, 1, 1, 2, 3]);
    }

    #[test]
    fn running_max_cyclic_seam() {
        let c = BinaryConfiguration::cyclic(vec![1, 0, 0, 0]).unwrap();
        let p = encode_path(&c).unwrap();
        assert_eq!(p.values(), &[0, -1, 0, 1, 2]);
        assert_eq!(running_max(&p, LeftPolicy::Cyclic).unwrap(), vec![0, 0, 0, 1, 2]);
    }

    #[test]
    fn fifteen_site_rows() {
        let row1 = row_of(&[2, 4, 5, 6, 9]);
        let row2 = transform(&row1).unwrap();
        assert_eq!(row2.particle_positions(), vec![3, 7, 8, 10, 11]);
        let row3 = transform(&row2).unwrap();
        assert_eq!(row3.particle_positions(), vec![4, 9, 12, 13, 14]);
        assert_eq!(evolve_finite(&row1).unwrap(), row2);
        assert_eq!(evolve_finite(&row2).unwrap(), row3);
    }

    #[test]
    fn fifteen_site_carrier() {
        let row1 = row_of(&[2, 4, 5, 6, 9]);
        let w = carrier(&encode_path(&row1).unwrap(), LeftPolicy::FiniteSupport).unwrap();
        assert_eq!(w.after_origin(), &[0, 1, 0, 1, 2, 3, 2, 1, 2, 1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn single_ball_moves_one_step() {
        let c = BinaryConfiguration::from_positions(&[0]).unwrap();
        assert_eq!(transform(&c).unwrap().particle_positions(), vec![1]);
        let d = BinaryConfiguration::from_positions(&[1]).unwrap();
        assert_eq!(inverse(&d).unwrap().particle_positions(), vec![0]);
        let z = BinaryConfiguration::finite(1, vec![0; 5]).unwrap();
        assert_eq!(transform(&z).unwrap(), z);
        assert_eq!(inverse(&z).unwrap(), z);
    }

    #[test]
    fn periodic_examples() {
        // (1,0,1,1,0,0) sits at density exactly 1/2; one more hole makes it admissible
        let x = BinaryConfiguration::cyclic(vec![1, 0, 1, 1, 0, 0]).unwrap();
        assert!(matches!(periodic_transform(&x), Err(Error::DensityAtHalf { n: 6, particles: 3 })));
        let x = BinaryConfiguration::cyclic(vec![1, 0, 1, 1, 0, 0, 0]).unwrap();
        assert_eq!(periodic_transform(&x).unwrap().sites(), &[0, 1, 0, 0, 1, 1, 0]);
        assert_eq!(cyclic_carrier(&x).unwrap(), vec![1, 0, 1, 2, 1, 0, 0]);
        let z = BinaryConfiguration::cyclic(vec![0; 4]).unwrap();
        assert_eq!(periodic_transform(&z).unwrap(), z);
        let half = BinaryConfiguration::cyclic(vec![1, 0, 1, 0]).unwrap();
        assert!(matches!(periodic_transform(&half), Err(Error::DensityAtHalf { .. })));
        let over = BinaryConfiguration::cyclic(vec![1, 1, 1, 0]).unwrap();
        assert!(matches!(periodic_transform(&over), Err(Error::DensityAboveHalf { .. })));
    }

    #[test]
    fn cyclic_path_route_matches_carrier_route() {
        for n in 1..=10usize {
            for code in 0..(1u64 << n) {
                let x = BinaryConfiguration::cyclic_from_code(code, n);
                if 2 * x.particle_count() >= n {
                    continue;
                }
                let p = encode_path(&x).unwrap();
                let via_path = decode_cyclic(&pitman_transform(&p, LeftPolicy::Cyclic).unwrap());
                assert_eq!(via_path.unwrap(), periodic_transform(&x).unwrap(), "{x}");
            }
        }
    }

    #[test]
    fn reversal_examples() {
        let x = BinaryConfiguration::cyclic(vec![1, 0, 0]).unwrap();
        assert_eq!(reverse_configuration(&x).sites(), &[0, 0, 1]);
        let pal = BinaryConfiguration::cyclic(vec![1, 0, 0, 1]).unwrap();
        assert_eq!(reverse_configuration(&pal), pal);
        let f = BinaryConfiguration::finite(-2, vec![1, 1, 0, 0, 1]).unwrap();
        assert_eq!(reverse_configuration(&reverse_configuration(&f)), f);
        assert_eq!(reverse_configuration(&f).particle_positions(), vec![-1, 2, 3]);
        assert_eq!(reverse_cyclic_carrier(&[1, 2, 3, 4]), vec![3, 2, 1, 4]);
        let w = CarrierPath { start: -1, values: vec![0, 1, 2, 1] };
        assert_eq!(reverse_carrier(&reverse_carrier(&w)), w);
    }

    #[test]
    fn string_format_round_trip() {
        let c: BinaryConfiguration = "0101|110010".parse().unwrap();
        assert_eq!(c.first(), -3);
        assert_eq!(c.particle_positions(), vec![-2, 0, 1, 2, 5]);
        assert_eq!(c.to_string(), "0101|110010");
        let y = BinaryConfiguration::parse_with("|1011", Boundary::Cyclic).unwrap();
        assert_eq!(y.sites(), &[1, 0, 1, 1]);
        assert!("01x".parse::<BinaryConfiguration>().is_err());
    }

    #[test]
    fn window_boundary_is_not_evolvable() {
        let c = BinaryConfiguration::window(0, vec![0, 1, 0]).unwrap();
        assert!(matches!(transform(&c), Err(Error::WrongBoundary { .. })));
        assert!(matches!(evolve_finite(&c), Err(Error::WrongBoundary { .. })));
    }

    #[test]
    fn palm_shift_matches_first_local_min() {
        // on 0 in LM(S), the first local max of TS at or after 0 is the
        // first local min of S at or after 0
        for len in 2..=12usize {
            for code in 0..(1u64 << len) {
                let mut sites: Vec<u8> = (0..len).map(|k| ((code >> k) & 1) as u8).collect();
                // window [-1, len-2] with sites 0 and 1 forced
                let first = -1i64;
                let i0 = (0 - first) as usize;
                if i0 + 1 >= len {
                    continue;
                }
                sites[i0] = 0;
                sites[i0 + 1] = 1;
                let c = BinaryConfiguration::finite(first, sites).unwrap();
                let (img, tau) = palm_transform(&c).unwrap();
                assert_eq!(tau, first_local_min_index(&c).unwrap(), "{code:b}");
                assert!(tau > 0);
                assert_eq!((img.get(0), img.get(1)), (Some(0), Some(1)));
            }
        }
    }

    #[test]
    fn palm_transform_cyclic_rotates() {
        let c = BinaryConfiguration::cyclic(vec![0, 1, 1, 0, 0, 0, 1, 0, 0, 0]).unwrap();
        let (img, tau) = palm_transform(&c).unwrap();
        let t = periodic_transform(&c).unwrap();
        assert_eq!(img, shift_cyclic(&t, tau));
        assert_eq!((img.get(0), img.get(1)), (Some(0), Some(1)));
    }
}
