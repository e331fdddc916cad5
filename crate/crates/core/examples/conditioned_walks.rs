//! A walk with downward drift conditioned to stay above 0 against a walk
//! reflected at its past maximum.
//!
//! Both are sampled by exact rejection and their first steps compared
//! with the exact window laws.
//!
//!     cargo run --release --example conditioned_walks

use boxball::exactdist::tv_vectors;
use boxball::harness::{floor_window_law, reflected_window_law, ConditionedWalks};
use boxball::rng::stream;

fn main() -> boxball::Result<()> {
    let (p, m) = (0.3, 6);
    let mut walks = ConditionedWalks::new(p, m, 2 * m)?;
    let mut rng = stream(2, 0);
    let n = 50_000;
    let (mut a, mut b) = (vec![0.0; 1 << m], vec![0.0; 1 << m]);
    for _ in 0..n {
        a[walks.sample_floor(&mut rng)] += 1.0 / n as f64;
        b[walks.sample_reflected(&mut rng)] += 1.0 / n as f64;
    }
    let (fa, fb) = (floor_window_law(p, m)?, reflected_window_law(p, m)?);
    println!("exact TV between the two window laws: {:.1e}", tv_vectors(&fa, &fb)?);
    println!("sampled TV, conditioned vs exact: {:.4}", tv_vectors(&a, &fa)?);
    println!("sampled TV, reflected vs exact:   {:.4}", tv_vectors(&b, &fb)?);
    println!("acceptance rates {:?}", walks.acceptance_rates());
    Ok(())
}
