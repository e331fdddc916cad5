//! The carrier at a site under stationary iid and Markov laws.
//!
//! Samples buffered configurations, reads the carrier load at 0, and
//! compares the histogram with the exact atom-plus-geometric law.
//!
//!     cargo run --release --example carrier_marginals

use boxball::exactdist::{carrier_marginal_iid, carrier_marginal_markov, CarrierMarginal};
use boxball::lattice::{carrier, encode_path, BinaryConfiguration, LeftPolicy};
use boxball::rng::{stream, Rng};
use boxball::samplers::{sample_iid_buffered, sample_markov_buffered, DEFAULT_BUFFER_TOLERANCE};

fn show(
    name: &str,
    law: CarrierMarginal,
    draw: impl Fn(&mut Rng) -> boxball::Result<BinaryConfiguration>,
) -> boxball::Result<()> {
    let n = 20_000;
    let mut rng = stream(11, 0);
    let mut counts = [0u32; 8];
    for _ in 0..n {
        let w = carrier(&encode_path(&draw(&mut rng)?)?, LeftPolicy::Buffered)?.at(0);
        counts[(w as usize).min(7)] += 1;
    }
    println!("{name}: mean {:.4}", law.mean());
    for (m, c) in counts.iter().enumerate().take(7) {
        println!("  W_0={m}  empirical {:.4}  exact {:.4}", *c as f64 / n as f64, law.pmf(m as u64));
    }
    Ok(())
}

fn main() -> boxball::Result<()> {
    let tol = DEFAULT_BUFFER_TOLERANCE;
    show("iid p=0.35", carrier_marginal_iid(0.35)?, |rng| sample_iid_buffered(0.35, 0, 0, tol, rng))?;
    show("markov (0.11,0.80)", carrier_marginal_markov(0.11, 0.80)?, |rng| {
        sample_markov_buffered(0.11, 0.80, 0, 0, tol, rng)
    })
}
