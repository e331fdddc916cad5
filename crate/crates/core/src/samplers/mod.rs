//! Seeded samplers for every random configuration law handled here.

pub mod gibbs;
pub mod quasi;
pub mod spec;
pub mod stationary;

pub use gibbs::{sample_gibbs_periodic, ExactGibbs, GibbsMode, MetropolisGibbs};
pub use quasi::{quasistationary_solve, QuasiStationarySolution};
pub use spec::{
    gibbs_params_bounded, gibbs_params_from_iid, gibbs_params_from_markov, BetaValue, GibbsBeta, MeasureSpec,
};
pub use stationary::{
    markov_density, sample_iid, sample_iid_buffered, sample_markov, sample_markov_buffered, sample_palm_markov,
    StationarySample, DEFAULT_BUFFER_TOLERANCE,
};

use crate::error::Result;
use crate::lattice::BinaryConfiguration;
use crate::rng::Rng;

/// Draw a configuration for any spec. Stationary families return the window
/// `[first, last]` with a certified left buffer; periodic families ignore
/// the window and return one cycle.
pub fn sample_spec(spec: &MeasureSpec, first: i64, last: i64, tolerance: f64, rng: &mut Rng) -> Result<BinaryConfiguration> {
    spec.validate(false)?;
    match *spec {
        MeasureSpec::Bernoulli { p } => {
            if p < 0.5 {
                sample_iid_buffered(p, first, last, tolerance, rng)
            } else {
                sample_markov(p, p, first, last, rng)
            }
        }
        MeasureSpec::Markov { p0, p1 } => {
            if p0 + p1 < 1.0 {
                sample_markov_buffered(p0, p1, first, last, tolerance, rng)
            } else {
                sample_markov(p0, p1, first, last, rng)
            }
        }
        MeasureSpec::BoundedSoliton { p, k } => quasistationary_solve(p, k)?.sample_buffered(first, last, rng),
        MeasureSpec::GibbsPeriodic { .. } | MeasureSpec::CyclicMarkov { .. } | MeasureSpec::PeriodicBounded { .. } => {
            let (n, beta) = spec.gibbs()?;
            sample_gibbs_periodic(n, &beta, GibbsMode::default(), rng)
        }
    }
}
