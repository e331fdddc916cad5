//! Two-sided stationary configurations on finite windows.

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};

use crate::error::{invalid, Error, Result};
use crate::exactdist::carrier::{carrier_marginal_iid, carrier_marginal_markov};
use crate::lattice::{
    encode_path, BinaryConfiguration, BufferCertificate, CarrierPath, LatticePath, TailModel,
};
use crate::rng::Rng;

/// Default certified truncation error for left buffers.
pub const DEFAULT_BUFFER_TOLERANCE: f64 = 1e-9;

const INITIAL_BUFFER: usize = 64;
const MAX_BUFFER: usize = 1 << 24;

/// A configuration together with its exact carrier `W_{first-1}, ..., W_last`.
#[derive(Clone, Debug)]
pub struct StationarySample {
    pub config: BinaryConfiguration,
    pub carrier: CarrierPath,
}

impl StationarySample {
    /// `T eta` on the same window: a particle wherever the carrier drops.
    pub fn transformed(&self) -> BinaryConfiguration {
        let w = &self.carrier.values;
        let sites = w.windows(2).map(|p| u8::from(p[1] + 1 == p[0])).collect();
        BinaryConfiguration::window(self.config.first(), sites).expect("nonempty window")
    }

    pub fn path(&self) -> Result<LatticePath> {
        encode_path(&self.config)
    }
}

fn check_window(first: i64, last: i64) -> Result<()> {
    if first > last {
        return Err(Error::EmptyWindow);
    }
    Ok(())
}

fn carrier_from(w0: u64, first: i64, sites: &[u8]) -> CarrierPath {
    let mut values = Vec::with_capacity(sites.len() + 1);
    values.push(w0);
    let mut w = w0;
    for &b in sites {
        w = if b == 1 { w + 1 } else { w.saturating_sub(1) };
        values.push(w);
    }
    CarrierPath { start: first - 1, values }
}

/// Exact joint sample of an iid Bernoulli(p) window and its carrier: the
/// carrier at the left edge is drawn from its stationary law, which is
/// independent of the sites to its right.
pub fn sample_iid(p: f64, first: i64, last: i64, rng: &mut Rng) -> Result<StationarySample> {
    check_window(first, last)?;
    let law = carrier_marginal_iid(p)?;
    let w0 = if law.ratio == 0.0 {
        0
    } else {
        Geometric::new(1.0 - law.ratio).map_err(|e| invalid(e.to_string()))?.sample(rng)
    };
    let sites: Vec<u8> = (first..=last).map(|_| u8::from(rng.random_bool(p))).collect();
    let carrier = carrier_from(w0, first, &sites);
    let config = BinaryConfiguration::window(first, sites)?;
    Ok(StationarySample { config, carrier })
}

fn check_markov(p0: f64, p1: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 < 1.0 && (0.0..1.0).contains(&p1)) {
        return Err(invalid(format!("Markov parameters ({p0}, {p1}) outside (0,1) x [0,1)")));
    }
    Ok(())
}

/// Stationary density `P(eta_0 = 1) = p0 / (1 - p1 + p0)`.
pub fn markov_density(p0: f64, p1: f64) -> f64 {
    p0 / (1.0 - p1 + p0)
}

/// `len` further states of the chain started after `state`. The chain is
/// reversible, so the same kernel also runs it leftwards.
pub fn markov_run(p0: f64, p1: f64, mut state: u8, len: usize, rng: &mut Rng) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let p = if state == 1 { p1 } else { p0 };
            state = u8::from(rng.random_bool(p));
            state
        })
        .collect()
}

/// Stationary Markov window with `P(1 | 0) = p0`, `P(1 | 1) = p1`.
pub fn sample_markov(p0: f64, p1: f64, first: i64, last: i64, rng: &mut Rng) -> Result<BinaryConfiguration> {
    check_window(first, last)?;
    check_markov(p0, p1)?;
    let s0 = u8::from(rng.random_bool(markov_density(p0, p1)));
    let mut sites = vec![s0];
    sites.extend(markov_run(p0, p1, s0, (last - first) as usize, rng));
    BinaryConfiguration::window(first, sites)
}

/// Tail model for the Markov carrier: `P(W > t | eta at the buffer edge)`
/// is at most `P(W > t) / min(nu)`.
pub fn markov_tail_model(p0: f64, p1: f64) -> Result<TailModel> {
    let law = carrier_marginal_markov(p0, p1)?;
    let rho = markov_density(p0, p1);
    let min_nu = rho.min(1.0 - rho);
    Ok(TailModel::Geometric { scale: law.first / (1.0 - law.ratio) / min_nu, ratio: law.ratio })
}

/// Tail model for the iid carrier, `P(W > t) = r^(t+1)`.
pub fn iid_tail_model(p: f64) -> Result<TailModel> {
    let law = carrier_marginal_iid(p)?;
    Ok(TailModel::Geometric { scale: law.ratio, ratio: law.ratio })
}

/// Grow a left buffer by running the chain leftwards from `sites[0]` until
/// the past maximum is certified on `[min(first, 0), last]`.
fn grow_buffer(
    p0: f64,
    p1: f64,
    first: i64,
    sites: Vec<u8>,
    model: TailModel,
    tolerance: f64,
    rng: &mut Rng,
) -> Result<BinaryConfiguration> {
    if first > 1 || first + sites.len() as i64 - 1 < 0 {
        return Err(invalid("buffered windows must contain index 0 or start at 1"));
    }
    let target = first.min(0);
    let mut left: Vec<u8> = Vec::new(); // sites first-1, first-2, ...
    let mut want = INITIAL_BUFFER;
    loop {
        let edge = *left.last().unwrap_or(&sites[0]);
        let more = markov_run(p0, p1, edge, want - left.len(), rng);
        left.extend(more);
        let start = first - left.len() as i64;
        let mut all: Vec<u8> = left.iter().rev().copied().collect();
        all.extend_from_slice(&sites);
        let probe = BinaryConfiguration::window(start, all.clone())?;
        let path = encode_path(&probe)?;
        // certificate for the requested interior
        let s_star = path.values()[0];
        let top = (start - 1..=target).map(|n| path.at(n)).max().unwrap();
        let bound = model.bound(top - s_star);
        if bound < tolerance {
            let cert = BufferCertificate { interior_start: first, tail_bound: bound, model, tolerance };
            return BinaryConfiguration::buffered(start, all, cert);
        }
        if want >= MAX_BUFFER {
            return Err(Error::Uncertified { tolerance, bound });
        }
        want *= 2;
    }
}

/// Stationary Markov window `[first, last]` with a certified left buffer, so
/// that T can be applied on the window.
pub fn sample_markov_buffered(
    p0: f64,
    p1: f64,
    first: i64,
    last: i64,
    tolerance: f64,
    rng: &mut Rng,
) -> Result<BinaryConfiguration> {
    let model = markov_tail_model(p0, p1)?;
    let window = sample_markov(p0, p1, first, last, rng)?;
    grow_buffer(p0, p1, first, window.sites().to_vec(), model, tolerance, rng)
}

/// iid window with a certified left buffer.
pub fn sample_iid_buffered(p: f64, first: i64, last: i64, tolerance: f64, rng: &mut Rng) -> Result<BinaryConfiguration> {
    let model = iid_tail_model(p)?;
    let window = sample_markov(p, p, first, last, rng)?;
    grow_buffer(p, p, first, window.sites().to_vec(), model, tolerance, rng)
}

/// Palm version of the Markov configuration: `eta_0 = 0`, `eta_1 = 1`, the
/// chain runs leftwards from 0 and rightwards from 1. With `tolerance` set a
/// certified left buffer is attached.
pub fn sample_palm_markov(
    p0: f64,
    p1: f64,
    first: i64,
    last: i64,
    tolerance: Option<f64>,
    rng: &mut Rng,
) -> Result<BinaryConfiguration> {
    check_markov(p0, p1)?;
    if first > 0 || last < 1 {
        return Err(invalid("Palm windows must contain indices 0 and 1"));
    }
    let mut left = markov_run(p0, p1, 0, (-first) as usize, rng);
    left.reverse();
    let mut sites = left;
    sites.push(0);
    sites.push(1);
    sites.extend(markov_run(p0, p1, 1, (last - 1) as usize, rng));
    match tolerance {
        None => BinaryConfiguration::window(first, sites),
        Some(tol) => {
            let model = markov_tail_model(p0, p1)?;
            grow_buffer(p0, p1, first, sites, model, tol, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{transform, Boundary};
    use crate::rng::stream;

    #[test]
    fn iid_zero_is_empty() {
        let mut rng = stream(1, 0);
        let s = sample_iid(0.0, -5, 5, &mut rng).unwrap();
        assert_eq!(s.config.particle_count(), 0);
        assert!(s.carrier.values.iter().all(|&w| w == 0));
    }

    #[test]
    fn carrier_increments_track_particles() {
        let mut rng = stream(2, 0);
        for _ in 0..200 {
            let s = sample_iid(0.3, -20, 20, &mut rng).unwrap();
            for (k, &b) in s.config.sites().iter().enumerate() {
                let (a, c) = (s.carrier.values[k], s.carrier.values[k + 1]);
                assert_eq!(b == 1, c == a + 1);
                assert!(c + 1 >= a);
            }
        }
    }

    #[test]
    fn palm_forced_sites() {
        let mut rng = stream(3, 0);
        for _ in 0..100 {
            let c = sample_palm_markov(0.2, 0.4, -10, 10, None, &mut rng).unwrap();
            assert_eq!(c.get(0), Some(0));
            assert_eq!(c.get(1), Some(1));
        }
    }

    #[test]
    fn buffered_transform_matches_carrier_sweep() {
        let mut rng = stream(4, 0);
        for _ in 0..200 {
            let c = sample_iid_buffered(0.3, -30, 30, 1e-12, &mut rng).unwrap();
            let Boundary::Buffered(cert) = c.boundary() else { panic!() };
            assert!(cert.tail_bound < 1e-12);
            let img = transform(&c).unwrap();
            // carrier sweep started empty at the buffer edge
            let full = c.sites();
            let mut w = 0u64;
            let mut out = Vec::new();
            for &b in full {
                let prev = w;
                w = if b == 1 { w + 1 } else { w.saturating_sub(1) };
                out.push(u8::from(w + 1 == prev));
            }
            let off = (img.first() - c.first()) as usize;
            assert_eq!(&out[off..], img.sites());
        }
    }
}
