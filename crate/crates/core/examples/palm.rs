//! Re-rooting at a local maximum preserves the Palm law.
//!
//! Samples the stationary Markov law seen from a local maximum at 0, steps
//! it and shifts back to the next local maximum, then compares the law of
//! sites -3..3 before and after with the exact Palm window law.
//!
//!     cargo run --release --example palm

use boxball::exactdist::{palm_window_law, tv_vectors};
use boxball::lattice::palm_transform;
use boxball::rng::stream;
use boxball::samplers::{sample_palm_markov, DEFAULT_BUFFER_TOLERANCE};

fn main() -> boxball::Result<()> {
    let (p0, p1, lo, hi) = (0.2, 0.4, -3i64, 3i64);
    let exact = palm_window_law(p0, p1, lo, hi)?;
    let cells = exact.len();
    let (mut before, mut after) = (vec![0.0; cells], vec![0.0; cells]);
    let n = 40_000;
    let mut rng = stream(4, 0);
    let code = |x: &boxball::lattice::BinaryConfiguration| {
        (lo..=hi).enumerate().fold(0usize, |a, (k, i)| a | ((x.get(i).unwrap() as usize) << k))
    };
    let mut shifts = 0i64;
    for _ in 0..n {
        let x = sample_palm_markov(p0, p1, -16, 96, Some(DEFAULT_BUFFER_TOLERANCE), &mut rng)?;
        let (y, tau) = palm_transform(&x)?;
        before[code(&x)] += 1.0 / n as f64;
        after[code(&y)] += 1.0 / n as f64;
        shifts += tau;
    }
    println!("mean shift {:.3}", shifts as f64 / n as f64);
    println!("TV(sampled, exact) before step {:.4}", tv_vectors(&before, &exact)?);
    println!("TV(sampled, exact) after step  {:.4}", tv_vectors(&after, &exact)?);
    Ok(())
}
