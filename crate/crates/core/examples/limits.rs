//! Window marginals of periodic laws approach the infinite-volume law.
//!
//! Prints the total variation distance between the law of four sites on a
//! ring of size N and the limiting window law, for growing N.
//!
//!     cargo run --release --example limits

use boxball::exactdist::{limit_convergence_report, PeriodicFamily};

fn main() -> boxball::Result<()> {
    let families = [
        PeriodicFamily::Iid { p: 0.35 },
        PeriodicFamily::Markov { p0: 0.11, p1: 0.80 },
        PeriodicFamily::Bounded { p: 0.5, k: 2 },
    ];
    for family in families {
        let report = limit_convergence_report(family, 4, &[50, 200, 800, 2000])?;
        println!("{family:?}");
        for row in &report.rows {
            println!("  N={:5} TV={:.3e} density-violation mass={:.3e}", row.n, row.tv, row.violation_mass);
        }
        println!("  strictly decreasing: {}", report.decreasing);
    }
    Ok(())
}
