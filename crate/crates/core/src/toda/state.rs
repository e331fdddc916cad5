//! States of the ultra-discrete Toda lattice and their one-step maps.
//!
//! A state is a list of block lengths `Q` and gap lengths `E`. Finite states
//! carry one gap fewer than blocks: the gap after the last block is infinite,
//! and that is expressed by its absence rather than by a numeric sentinel.

use std::fmt::Debug;

use num_traits::{Num, Signed};
use serde::{Deserialize, Serialize};

use crate::continuum::path::Rational;
use crate::error::{invalid, Result};

/// Number type a state can be written in.
pub trait TodaValue: Copy + PartialOrd + Debug + Num + Signed {
    /// Whether two totals count as equal: exact except for floats.
    fn totals_agree(a: Self, b: Self) -> bool {
        a == b
    }
}

impl TodaValue for f64 {
    fn totals_agree(a: Self, b: Self) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }
}

impl TodaValue for Rational {}

impl TodaValue for i64 {}

pub(crate) fn min_of<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn sum<T: TodaValue>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &b| a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct TodaState<T = f64> {
    #[serde(rename = "Q")]
    pub q: Vec<T>,
    #[serde(rename = "E")]
    pub e: Vec<T>,
    pub periodic: bool,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub length: Option<T>,
}

impl<T: TodaValue> TodaState<T> {
    /// `J` blocks and `J - 1` finite gaps.
    pub fn finite(q: Vec<T>, e: Vec<T>) -> Result<Self> {
        let s = Self { q, e, periodic: false, length: None };
        s.validate()?;
        Ok(s)
    }

    /// `J` blocks and `J` gaps on a circle of length `L`.
    pub fn periodic(q: Vec<T>, e: Vec<T>, length: T) -> Result<Self> {
        let s = Self { q, e, periodic: true, length: Some(length) };
        s.validate()?;
        Ok(s)
    }

    /// Periodic state whose length is the total of its entries.
    pub fn periodic_closed(q: Vec<T>, e: Vec<T>) -> Result<Self> {
        let l = sum(&q) + sum(&e);
        Self::periodic(q, e, l)
    }

    pub fn validate(&self) -> Result<()> {
        let j = self.q.len();
        if j == 0 {
            return Err(invalid("a Toda state needs at least one block"));
        }
        if self.q.iter().chain(&self.e).any(|&x| !(x > T::zero())) {
            return Err(invalid(format!("block and gap lengths must be positive: Q={:?}, E={:?}", self.q, self.e)));
        }
        if self.periodic {
            if self.e.len() != j {
                return Err(invalid(format!("periodic state needs {j} gaps, got {}", self.e.len())));
            }
            let l = self.length.ok_or_else(|| invalid("periodic state needs L"))?;
            let (a, b) = (sum(&self.q), sum(&self.e));
            if !T::totals_agree(a + b, l) {
                return Err(invalid(format!("sum(Q) + sum(E) = {:?} differs from L = {l:?}", a + b)));
            }
            if !(a + a < l) {
                return Err(invalid(format!("sum(Q) = {a:?} must be below L/2 for L = {l:?}")));
            }
        } else {
            if self.e.len() + 1 != j {
                return Err(invalid(format!("finite state with {j} blocks needs {} gaps, got {}", j - 1, self.e.len())));
            }
            if self.length.is_some() {
                return Err(invalid("finite states carry no L"));
            }
        }
        Ok(())
    }

    /// Number of blocks `J`.
    pub fn blocks(&self) -> usize {
        self.q.len()
    }

    pub fn total_q(&self) -> T {
        sum(&self.q)
    }

    pub fn total_e(&self) -> T {
        sum(&self.e)
    }

    /// One step of the dynamics for either variant.
    pub fn step(&self) -> Result<Self> {
        if self.periodic {
            toda_step_periodic(self)
        } else {
            toda_step(self)
        }
    }

    pub fn map<U: TodaValue>(&self, f: impl Fn(T) -> U) -> TodaState<U> {
        TodaState {
            q: self.q.iter().map(|&x| f(x)).collect(),
            e: self.e.iter().map(|&x| f(x)).collect(),
            periodic: self.periodic,
            length: self.length.map(f),
        }
    }
}

impl TodaState<i64> {
    pub fn to_rational(&self) -> TodaState<Rational> {
        self.map(|x| Rational::from_integer(x as i128))
    }
}

impl TodaState<Rational> {
    /// Integer copy when every entry is an integer.
    pub fn to_integer(&self) -> Option<TodaState<i64>> {
        let ok = |x: &Rational| x.is_integer();
        if !(self.q.iter().all(ok) && self.e.iter().all(ok) && self.length.iter().all(ok)) {
            return None;
        }
        Some(self.map(|x| x.to_integer() as i64))
    }
}

/// Finite dynamics:
/// `TQ_j = min(Q_1 + ... + Q_j - TQ_1 - ... - TQ_{j-1}, E_j)` with no gap
/// after the last block, and `TE_j = Q_{j+1} + E_j - TQ_j`.
pub fn toda_step<T: TodaValue>(state: &TodaState<T>) -> Result<TodaState<T>> {
    state.validate()?;
    if state.periodic {
        return Err(invalid("toda_step takes a finite state"));
    }
    let j = state.blocks();
    let mut tq = Vec::with_capacity(j);
    let (mut cum_q, mut cum_tq) = (T::zero(), T::zero());
    for k in 0..j {
        cum_q = cum_q + state.q[k];
        let carried = cum_q - cum_tq;
        let x = match state.e.get(k) {
            Some(&gap) => min_of(carried, gap),
            None => carried,
        };
        cum_tq = cum_tq + x;
        tq.push(x);
    }
    let te = (0..j - 1).map(|k| state.q[k + 1] + state.e[k] - tq[k]).collect();
    TodaState::finite(tq, te)
}

/// Periodic dynamics: `TQ_j = min(Q_j - D_j, E_j)` with
/// `D_j = min_{0 <= k < J} sum_{l=1}^k (E_{j-l} - Q_{j-l})`, indices mod `J`.
pub fn toda_step_periodic<T: TodaValue>(state: &TodaState<T>) -> Result<TodaState<T>> {
    state.validate()?;
    if !state.periodic {
        return Err(invalid("toda_step_periodic takes a periodic state"));
    }
    let j = state.blocks();
    let idx = |k: usize, l: usize| (k + j * l - l) % j;
    let d: Vec<T> = (0..j)
        .map(|k| {
            let mut acc = T::zero();
            let mut best = T::zero();
            for l in 1..j {
                let i = idx(k, l);
                acc = acc + state.e[i] - state.q[i];
                best = min_of(best, acc);
            }
            best
        })
        .collect();
    let tq: Vec<T> = (0..j).map(|k| min_of(state.q[k] - d[k], state.e[k])).collect();
    let te = (0..j).map(|k| state.q[(k + 1) % j] + state.e[k] - tq[k]).collect();
    TodaState::periodic(tq, te, state.length.expect("validated"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lone_block_is_fixed() {
        let s = TodaState::finite(vec![3i64], vec![]).unwrap();
        assert_eq!(toda_step(&s).unwrap(), s);
    }

    #[test]
    fn hand_examples() {
        let s = TodaState::finite(vec![2i64, 1], vec![3]).unwrap();
        assert_eq!(toda_step(&s).unwrap(), TodaState::finite(vec![2, 1], vec![2]).unwrap());
        let s = TodaState::finite(vec![1i64, 2], vec![5]).unwrap();
        assert_eq!(toda_step(&s).unwrap(), TodaState::finite(vec![1, 2], vec![6]).unwrap());
        let s = TodaState::periodic(vec![2i64, 1], vec![4, 3], 10).unwrap();
        assert_eq!(toda_step_periodic(&s).unwrap(), TodaState::periodic(vec![2, 1], vec![3, 4], 10).unwrap());
        let s = TodaState::periodic(vec![1i64, 1], vec![3, 3], 8).unwrap();
        assert_eq!(toda_step_periodic(&s).unwrap(), s);
    }

    #[test]
    fn validation() {
        assert!(TodaState::finite(vec![1i64, 2], vec![]).is_err());
        assert!(TodaState::finite(vec![1i64, 0], vec![2]).is_err());
        assert!(TodaState::periodic(vec![3i64], vec![3], 6).is_err());
        assert!(TodaState::periodic(vec![2i64], vec![3], 6).is_err());
        assert!(TodaState::<i64>::finite(vec![], vec![]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = TodaState::periodic(vec![2.0, 1.0], vec![4.0, 3.0], 10.0).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"Q": [2.0, 1.0], "E": [4.0, 3.0], "periodic": true, "L": 10.0}));
        let back: TodaState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
