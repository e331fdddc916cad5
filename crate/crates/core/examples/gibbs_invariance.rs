//! Periodic Gibbs laws are invariant under the periodic step.
//!
//! Enumerates each family on a small ring, pushes the table forward
//! through one step, and prints the total variation distance (zero up to
//! rounding). Also runs the Metropolis sampler and compares the empirical
//! ball count with the exact mean.
//!
//!     cargo run --release --example gibbs_invariance

use boxball::exactdist::{enumerate_gibbs, pushforward_t, tv_distance, ENUMERATION_CUTOFF};
use boxball::rng::stream;
use boxball::samplers::{gibbs_params_bounded, gibbs_params_from_iid, gibbs_params_from_markov, MetropolisGibbs};

fn main() -> boxball::Result<()> {
    let families = [
        ("iid p=0.35", gibbs_params_from_iid(0.35)?),
        ("markov (0.11,0.80)", gibbs_params_from_markov(0.11, 0.80)?),
        ("bounded p=0.5 K=2", gibbs_params_bounded(0.5, 2)?),
    ];
    let n = 12;
    for (name, beta) in &families {
        let table = enumerate_gibbs(n, beta, ENUMERATION_CUTOFF)?;
        let tv = tv_distance(&table, &pushforward_t(&table)?)?;
        let exact_mean: f64 = table
            .support
            .iter()
            .zip(&table.probs)
            .map(|(c, p)| c.count_ones() as f64 * p)
            .sum();
        let mut chain = MetropolisGibbs::new(n, beta)?;
        let mut rng = stream(7, 0);
        chain.run(20_000, &mut rng);
        let mut balls = 0usize;
        let sweeps = 20_000;
        for _ in 0..sweeps {
            chain.run(n as u64, &mut rng);
            balls += chain.config().particle_count();
        }
        println!(
            "{name:20} N={n} states={:5} TV(law, image)={tv:.1e} mean balls exact {exact_mean:.3} mcmc {:.3}",
            table.support.len(),
            balls as f64 / sweeps as f64
        );
    }
    Ok(())
}
