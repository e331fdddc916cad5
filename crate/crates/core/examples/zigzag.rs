//! The continuum analogue: a stationary zigzag path and its transform.
//!
//! Samples the two-state zigzag with rates (1, 2), applies the continuous
//! transform, compares the carrier at 0 with its exact atom and mean, and
//! writes an SVG of the path with its running maximum to `zigzag.svg`.
//!
//!     cargo run --release --example zigzag

use boxball::continuum::{pl_pitman, pl_running_max, sample_zigzag, ZigzagSpec};
use boxball::harness::render_path_svg;
use boxball::lattice::LeftPolicy;
use boxball::rng::stream;
use boxball::samplers::DEFAULT_BUFFER_TOLERANCE;

fn main() -> boxball::Result<()> {
    let spec = ZigzagSpec::new(1.0, 2.0)?;
    let mut rng = stream(3, 0);
    let n = 20_000;
    let (mut empty, mut total) = (0usize, 0.0);
    for _ in 0..n {
        let z = sample_zigzag(&spec, 0.0, 0.5, Some(DEFAULT_BUFFER_TOLERANCE), &mut rng)?;
        let w = z.carrier_at_origin()?;
        empty += usize::from(w == 0.0);
        total += w;
    }
    println!("density {:.4}, drift {:.4}", spec.density(), spec.drift());
    println!("P(W_0 = 0): sampled {:.4}, exact {:.4}", empty as f64 / n as f64, spec.carrier_atom());
    println!("E W_0:      sampled {:.4}, exact {:.4}", total / n as f64, spec.carrier_mean());

    let z = sample_zigzag(&spec, 0.0, 20.0, Some(DEFAULT_BUFFER_TOLERANCE), &mut rng)?;
    let s = z.path.restrict(0.0, 20.0)?;
    let ts = pl_pitman(&z.path, LeftPolicy::Buffered)?.restrict(0.0, 20.0)?;
    let m = pl_running_max(&z.path, LeftPolicy::Buffered)?.restrict(0.0, 20.0)?;
    std::fs::write("zigzag.svg", render_path_svg(&[s, ts], &[m])?)?;
    println!("wrote zigzag.svg");
    Ok(())
}
