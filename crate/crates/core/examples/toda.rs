//! The ultra-discrete Toda lattice and its path encoding.
//!
//! Steps a rational state directly and through the path route and shows
//! the two agree exactly. Then checks by enumeration which law on small
//! integer periodic states the step preserves.
//!
//!     cargo run --release --example toda

use boxball::continuum::Rational;
use boxball::toda::exact::{integer_tv, multinomial_law, pushforward_integer, uniform_composition_law};
use boxball::toda::{toda_invariants, toda_step_via_path, TodaState};

fn main() -> boxball::Result<()> {
    let r = |n: i128, d: i128| Rational::new(n, d);
    let s = TodaState::finite(vec![r(3, 2), r(1, 1), r(5, 2)], vec![r(1, 2), r(2, 1)])?;
    let direct = s.step()?;
    let (via, shift) = toda_step_via_path(&s)?;
    let show = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    println!("Q {}  E {}", show(&direct.q), show(&direct.e));
    println!("path route agrees: {} (shift {shift})", direct == via);
    let inv = toda_invariants(&direct)?;
    println!("blocks {} sum Q {} sum E {} local maxima {}", inv.blocks, inv.total_q, inv.total_e, inv.local_maxima);

    let ring = TodaState::periodic(vec![2i64, 1, 3], vec![4, 2, 5], 17)?;
    let mut x = ring.clone();
    for t in 1..=4 {
        x = x.step()?;
        println!("t={t} Q {:?} E {:?}", x.q, x.e);
    }

    for (j, a, l) in [(2, 3, 8), (3, 5, 12), (4, 12, 40)] {
        let uni = uniform_composition_law(j, a, l)?;
        let multi = multinomial_law(j, a, l)?;
        println!(
            "(J,A,L)=({j},{a},{l}) TV to image: uniform compositions {:.1e}, multinomial {:.3}",
            integer_tv(&uni, &pushforward_integer(&uni, l)?),
            integer_tv(&multi, &pushforward_integer(&multi, l)?)
        );
    }
    Ok(())
}
