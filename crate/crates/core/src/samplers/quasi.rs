//! The iid configuration conditioned to carry no soliton longer than `K`,
//! realized through the quasi-stationary carrier chain.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{encode_path, BinaryConfiguration, BufferCertificate, CarrierPath, TailModel};
use crate::rng::Rng;
use crate::samplers::stationary::StationarySample;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiStationarySolution {
    pub p: f64,
    pub k: usize,
    /// Perron eigenvalue of the restricted carrier kernel.
    pub lambda: f64,
    /// Positive right eigenvector, normalized so that `sum h^2 pi = 1`.
    pub h: Vec<f64>,
    /// Stationary law of the h-transformed chain, `∝ h^2 pi`.
    pub pi_tilde: Vec<f64>,
}

/// Restriction of the iid carrier kernel to `{0, ..., K}`.
pub fn restricted_kernel(p: f64, k: usize) -> DMatrix<f64> {
    let d = k + 1;
    let mut m = DMatrix::zeros(d, d);
    for x in 0..d {
        if x < k {
            m[(x, x + 1)] = p;
        }
        if x > 0 {
            m[(x, x - 1)] = 1.0 - p;
        } else {
            m[(0, 0)] = 1.0 - p;
        }
    }
    m
}

/// Symmetric conjugate `D^{1/2} P D^{-1/2}` of the restricted kernel, with
/// `D = diag(r^x)`, `r = p/(1-p)`.
pub fn symmetrized_kernel(p: f64, k: usize) -> DMatrix<f64> {
    let d = k + 1;
    let off = (p * (1.0 - p)).sqrt();
    let mut a = DMatrix::zeros(d, d);
    a[(0, 0)] = 1.0 - p;
    for x in 0..k {
        a[(x, x + 1)] = off;
        a[(x + 1, x)] = off;
    }
    a
}

/// Perron eigenpair of the restricted kernel and the h-transformed chain.
pub fn quasistationary_solve(p: f64, k: usize) -> Result<QuasiStationarySolution> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("quasi-stationary solve needs p in (0,1), got {p}")));
    }
    let eig = SymmetricEigen::new(symmetrized_kernel(p, k));
    let (top, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut phi: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|v| *v = -*v);
    }
    let r = p / (1.0 - p);
    // h = phi / sqrt(pi) with pi_x = r^x; then h^2 pi = phi^2
    let h: Vec<f64> = phi.iter().enumerate().map(|(x, &v)| v / r.powf(x as f64 / 2.0)).collect();
    let norm: f64 = phi.iter().map(|v| v * v).sum();
    let pi_tilde = phi.iter().map(|v| v * v / norm).collect();
    Ok(QuasiStationarySolution { p, k, lambda, h, pi_tilde })
}

impl QuasiStationarySolution {
    /// `h`-transformed kernel `P(x,y) h(y) / (lambda h(x))`.
    pub fn kernel(&self) -> DMatrix<f64> {
        let pk = restricted_kernel(self.p, self.k);
        let d = self.k + 1;
        DMatrix::from_fn(d, d, |x, y| pk[(x, y)] * self.h[y] / (self.lambda * self.h[x]))
    }

    /// `max_x |(P h)(x) - lambda h(x)| / max_x h(x)`.
    pub fn residual(&self) -> f64 {
        let pk = restricted_kernel(self.p, self.k);
        let h = nalgebra::DVector::from_vec(self.h.clone());
        let r = &pk * &h - &h * self.lambda;
        r.amax() / h.amax()
    }

    /// Largest violation of detailed balance and of row sums for the
    /// transformed chain.
    pub fn detailed_balance_error(&self) -> f64 {
        let q = self.kernel();
        let d = self.k + 1;
        let mut err: f64 = 0.0;
        for x in 0..d {
            err = err.max((q.row(x).sum() - 1.0).abs());
            for y in 0..d {
                err = err.max((self.pi_tilde[x] * q[(x, y)] - self.pi_tilde[y] * q[(y, x)]).abs());
            }
        }
        err
    }

    /// `P(eta_0 = 1)`: stationary probability that the carrier steps up.
    pub fn density(&self) -> f64 {
        let q = self.kernel();
        (0..self.k).map(|x| self.pi_tilde[x] * q[(x, x + 1)]).sum()
    }

    fn draw(weights: &[f64], rng: &mut Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights.len() - 1
    }

    /// Carrier values after `w0` over `len` steps of the transformed chain.
    pub fn run_carrier(&self, w0: usize, len: usize, rng: &mut Rng) -> Vec<u64> {
        let q = self.kernel();
        let rows: Vec<Vec<f64>> = (0..=self.k).map(|x| q.row(x).iter().copied().collect()).collect();
        let mut w = w0;
        (0..len)
            .map(|_| {
                w = Self::draw(&rows[w], rng);
                w as u64
            })
            .collect()
    }

    /// Exact window of the bounded-soliton configuration with its carrier.
    pub fn sample(&self, first: i64, last: i64, rng: &mut Rng) -> Result<StationarySample> {
        if first > last {
            return Err(Error::EmptyWindow);
        }
        let w0 = Self::draw(&self.pi_tilde, rng);
        let mut values = vec![w0 as u64];
        values.extend(self.run_carrier(w0, (last - first + 1) as usize, rng));
        let sites = values.windows(2).map(|p| u8::from(p[1] == p[0] + 1)).collect();
        let config = BinaryConfiguration::window(first, sites)?;
        Ok(StationarySample { config, carrier: CarrierPath { start: first - 1, values } })
    }

    /// Window with a left buffer long enough that the path climbs `K` above
    /// the buffer edge before the origin, which makes the past maximum exact.
    /// The chain is reversible, so the buffer is the same chain run leftwards.
    pub fn sample_buffered(&self, first: i64, last: i64, rng: &mut Rng) -> Result<BinaryConfiguration> {
        let model = TailModel::Bounded { k: self.k as u64 };
        let base = self.sample(first, last, rng)?;
        let target = first.min(0);
        let mut back: Vec<u64> = Vec::new(); // carrier at first-2, first-3, ...
        let mut w_edge = base.carrier.values[0] as usize;
        let mut grow = 64usize;
        loop {
            let more = self.run_carrier(w_edge, grow, rng);
            w_edge = *more.last().unwrap() as usize;
            back.extend(more);
            // carrier path from the far left up to first-1
            let mut carrier: Vec<u64> = back.iter().rev().copied().collect();
            carrier.extend_from_slice(&base.carrier.values);
            let start = first - 1 - back.len() as i64;
            let sites: Vec<u8> = carrier.windows(2).map(|p| u8::from(p[1] == p[0] + 1)).collect();
            let cfg = BinaryConfiguration::window(start + 1, sites.clone())?;
            let path = encode_path(&cfg)?;
            let s_star = path.values()[0];
            let top = (start..=target).map(|n| path.at(n)).max().unwrap();
            let bound = model.bound(top - s_star);
            if bound == 0.0 {
                let cert = BufferCertificate { interior_start: first, tail_bound: 0.0, model, tolerance: 0.0 };
                return BinaryConfiguration::buffered(start + 1, sites, cert);
            }
            if back.len() > 1 << 24 {
                return Err(Error::Uncertified { tolerance: 0.0, bound });
            }
            grow *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn k_zero() {
        let s = quasistationary_solve(0.3, 0).unwrap();
        assert!((s.lambda - 0.7).abs() < 1e-15);
        assert_eq!(s.pi_tilde, vec![1.0]);
        let mut rng = stream(5, 0);
        let smp = s.sample(-5, 5, &mut rng).unwrap();
        assert_eq!(smp.config.particle_count(), 0);
    }

    #[test]
    fn k_one_half() {
        let s = quasistationary_solve(0.5, 1).unwrap();
        // 2x2 oracle: eigenvalues of [[.5,.5],[.5,0]] are (1 +- sqrt 5)/4
        assert!((s.lambda - (1.0 + 5f64.sqrt()) / 4.0).abs() < 1e-14);
        assert!(s.residual() < 1e-12);
    }

    #[test]
    fn detailed_balance_grid() {
        for &p in &[0.2, 0.5, 0.8] {
            for k in 0..=10 {
                let s = quasistationary_solve(p, k).unwrap();
                assert!(s.residual() < 1e-12, "p={p} k={k}");
                assert!(s.detailed_balance_error() < 1e-12, "p={p} k={k}");
                assert!(s.h.iter().all(|&v| v > 0.0));
                assert!(s.lambda > 0.0 && s.lambda < 1.0);
                assert!((s.pi_tilde.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                assert!(s.density() < 0.5);
            }
        }
    }

    #[test]
    fn buffered_sample_is_exact_on_interior() {
        let s = quasistationary_solve(0.8, 3).unwrap();
        let mut rng = stream(6, 0);
        for _ in 0..50 {
            let c = s.sample_buffered(-10, 10, &mut rng).unwrap();
            assert!(c.first() < -10);
            assert_eq!(c.last(), 10);
        }
    }
}
