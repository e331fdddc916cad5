//! Ball-box dynamics on a finite row and on a ring.
//!
//! Steps the 15-site example twice, undoes a step, and shows that the
//! soliton profile of a ring survives the periodic step.
//!
//!     cargo run --example evolve

use boxball::harness::render_rows;
use boxball::lattice::{inverse, periodic_transform, transform, BinaryConfiguration, Boundary};
use boxball::solitons::{soliton_counts, verify_conservation};

fn main() -> boxball::Result<()> {
    let row = BinaryConfiguration::parse_with("○●○●●●○○●○○○○○○", Boundary::FiniteSupport)?;
    let mut rows = vec![row.clone()];
    for _ in 0..2 {
        rows.push(transform(rows.last().unwrap())?);
    }
    println!("{}", render_rows(&rows, 1, 15));
    for (t, r) in rows.iter().enumerate() {
        println!("t={t} balls at {:?}", r.particle_positions());
    }
    assert_eq!(inverse(&rows[1])?, row);

    let ring = BinaryConfiguration::cyclic(vec![1, 0, 1, 1, 0, 0, 0])?;
    let next = periodic_transform(&ring)?;
    let report = verify_conservation(&ring)?;
    println!("ring {:?} -> {:?}", ring.sites(), next.sites());
    println!("solitons by length {:?}, preserved: {}", soliton_counts(&ring).as_slice(), report.preserved);
    Ok(())
}
