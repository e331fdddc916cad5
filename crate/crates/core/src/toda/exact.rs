//! Exact laws of small integer periodic Toda states, by enumeration.
//!
//! A state with `J` blocks, total block length `A` and period `L` is a pair
//! of compositions (`Q` of `A`, `E` of `L - A`, all parts at least 1). The
//! step maps this finite set into itself, so invariance of a law on it can
//! be checked exactly.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::toda::state::TodaState;

/// Largest number of states enumerated.
pub const STATE_CUTOFF: u64 = 5_000_000;

/// Law of an integer periodic state, keyed by `(Q, E)`.
pub type IntegerLaw = BTreeMap<(Vec<i64>, Vec<i64>), f64>;

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All compositions of `total` into `parts` positive parts.
pub fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    fn go(left: i64, parts: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 1..=left - (parts as i64 - 1) {
            cur.push(x);
            go(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total >= parts as i64 {
        go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Number of compositions of `total` into `parts` positive parts.
pub fn composition_count(total: i64, parts: usize) -> f64 {
    binom(total - 1, parts as i64 - 1)
}

/// Probability that one part of a uniform composition of `total` into
/// `parts` parts equals `k + 1`.
pub fn composition_part_pmf(total: i64, parts: usize, k: i64) -> f64 {
    if parts == 1 {
        return f64::from(k == total - 1);
    }
    let n = total - parts as i64;
    binom(n - k + parts as i64 - 2, parts as i64 - 2) / binom(n + parts as i64 - 1, parts as i64 - 1)
}

fn multinomial_weight(c: &[i64]) -> f64 {
    let trials: i64 = c.iter().map(|x| x - 1).sum();
    let j = c.len() as f64;
    let mut w = (-(trials as f64) * j.ln()).exp();
    let mut left = trials;
    for &x in c {
        w *= binom(left, x - 1);
        left -= x - 1;
    }
    w
}

fn check_shape(j: usize, a: i64, l: i64) -> Result<()> {
    let ji = j as i64;
    if j == 0 || !(a > 0 && 2 * a < l) || ji > a.min(l - a) {
        return Err(invalid(format!("need 1 <= J <= min(A, L-A) and 0 < A < L/2, got J={j}, A={a}, L={l}")));
    }
    let states = composition_count(a, j) * composition_count(l - a, j);
    if states > STATE_CUTOFF as f64 {
        return Err(invalid(format!("{states} states exceed the enumeration cutoff {STATE_CUTOFF}")));
    }
    Ok(())
}

fn product_law(j: usize, a: i64, l: i64, weight: impl Fn(&[i64]) -> f64) -> Result<IntegerLaw> {
    check_shape(j, a, l)?;
    let qs = compositions(a, j);
    let es = compositions(l - a, j);
    let mut law = IntegerLaw::new();
    for q in &qs {
        for e in &es {
            law.insert((q.clone(), e.clone()), weight(q) * weight(e));
        }
    }
    let z: f64 = law.values().sum();
    law.values_mut().for_each(|p| *p /= z);
    Ok(law)
}

/// Uniform law over pairs of compositions.
pub fn uniform_composition_law(j: usize, a: i64, l: i64) -> Result<IntegerLaw> {
    product_law(j, a, l, |_| 1.0)
}

/// Law where `Q - 1` and `E - 1` are independent equal-cell multinomials.
pub fn multinomial_law(j: usize, a: i64, l: i64) -> Result<IntegerLaw> {
    product_law(j, a, l, multinomial_weight)
}

/// Image of a law under one periodic step.
pub fn pushforward_integer(law: &IntegerLaw, l: i64) -> Result<IntegerLaw> {
    let mut out = IntegerLaw::new();
    for ((q, e), &p) in law {
        let s = TodaState::periodic(q.clone(), e.clone(), l)?.step()?;
        *out.entry((s.q, s.e)).or_default() += p;
    }
    Ok(out)
}

/// Total variation distance between two laws on the same finite set.
pub fn integer_tv(a: &IntegerLaw, b: &IntegerLaw) -> f64 {
    let mut keys: Vec<_> = a.keys().collect();
    keys.extend(b.keys());
    keys.sort();
    keys.dedup();
    0.5 * keys.iter().map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_marginal() {
        assert_eq!(compositions(5, 3).len(), 6);
        assert_eq!(composition_count(5, 3), 6.0);
        for (total, parts) in [(12i64, 4usize), (7, 1), (9, 2)] {
            let all = compositions(total, parts);
            for k in 0..=total - parts as i64 {
                let hits = all.iter().filter(|c| c[0] == k + 1).count() as f64;
                let want = composition_part_pmf(total, parts, k);
                assert!((hits / all.len() as f64 - want).abs() < 1e-14, "{total} {parts} {k}");
            }
        }
    }

    #[test]
    fn uniform_is_invariant() {
        for (j, a, l) in [(1, 2, 5), (2, 3, 8), (3, 5, 12), (3, 6, 15)] {
            let law = uniform_composition_law(j, a, l).unwrap();
            assert!(integer_tv(&law, &pushforward_integer(&law, l).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn multinomial_moves() {
        let law = multinomial_law(2, 3, 8).unwrap();
        let tv = integer_tv(&law, &pushforward_integer(&law, 8).unwrap());
        assert!((tv - 0.25).abs() < 1e-12, "{tv}");
        // one block: both laws are a point mass
        let one = multinomial_law(1, 3, 8).unwrap();
        assert!(integer_tv(&one, &pushforward_integer(&one, 8).unwrap()) < 1e-12);
    }
}
