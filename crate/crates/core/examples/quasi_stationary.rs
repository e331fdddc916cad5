//! Solitons bounded in length through a quasi-stationary carrier.
//!
//! Solves the restricted carrier chain for a few parameters, prints the
//! eigen-residual and detailed-balance error, and samples a window whose
//! carrier never exceeds the bound.
//!
//!     cargo run --example quasi_stationary

use boxball::harness::render_rows;
use boxball::lattice::{carrier, encode_path, LeftPolicy};
use boxball::rng::stream;
use boxball::samplers::quasistationary_solve;

fn main() -> boxball::Result<()> {
    for (p, k) in [(0.35, 3), (0.5, 2), (0.7, 10)] {
        let q = quasistationary_solve(p, k)?;
        println!(
            "p={p} K={k}: lambda={:.6} density={:.4} residual={:.1e} balance={:.1e}",
            q.lambda,
            q.density(),
            q.residual(),
            q.detailed_balance_error()
        );
    }
    let q = quasistationary_solve(0.5, 2)?;
    let x = q.sample_buffered(1, 40, &mut stream(5, 0))?;
    let w = carrier(&encode_path(&x)?, LeftPolicy::Buffered)?;
    println!("{}", render_rows(std::slice::from_ref(&x), 1, 40));
    println!("max carrier on window: {}", (1..=40).map(|n| w.at(n)).max().unwrap_or(0));
    Ok(())
}
