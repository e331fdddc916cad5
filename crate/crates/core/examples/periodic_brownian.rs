//! Rescaled walks: Brownian motion with drift, and zigzags from sticky
//! Markov sites.
//!
//! A walk with up-probability (1 + eps)/2 run for 1/eps^2 steps and scaled
//! by eps ends near Normal(1, 1). A periodic configuration on a ring of
//! L/eps^2 sites, rescaled, gives Brownian motion with drift on [0, L]
//! conditioned to end above its start.
//!
//!     cargo run --release --example periodic_brownian

use boxball::continuum::{rescale_path, BrownianGrid, PeriodicBrownian};
use boxball::lattice::LatticePath;
use boxball::rng::stream;
use rand::Rng as _;

fn main() -> boxball::Result<()> {
    let eps: f64 = 0.02;
    let steps = (1.0 / (eps * eps)).round() as usize;
    let mut rng = stream(9, 0);
    let n = 4000;
    let mut ends = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = 0i64;
        let after: Vec<i64> = (0..steps)
            .map(|_| {
                s += if rng.random_bool((1.0 - eps) / 2.0) { -1 } else { 1 };
                s
            })
            .collect();
        ends.push(rescale_path(&LatticePath::from_origin(&after)?, eps, eps * eps)?.at(1.0)?);
    }
    let mean = ends.iter().sum::<f64>() / n as f64;
    let var = ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    println!("S_1 over {n} walks: mean {mean:.3} (1), variance {var:.3} (1)");

    let grid = BrownianGrid::new(1.0, 2.0, 0.05, None)?;
    println!("ring of {} sites, p = {:.4}", grid.sites(), grid.p());
    let mut sampler = PeriodicBrownian::new(grid, 1e-3);
    for _ in 0..3 {
        let b = sampler.sample(&mut rng)?;
        println!("  increment over one period {:.3}", b.path.increment());
    }
    println!("acceptance rate {:.3}", sampler.stats.rate());
    Ok(())
}
