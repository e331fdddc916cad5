//! Path encodings of Toda states, and the step computed through them:
//! encode, apply Pitman's transform, move the first local maximum at or
//! after 0 back to 0, decode.

use serde::{Deserialize, Serialize};

use crate::continuum::path::{pl_pitman, shift_to_local_max, shift_to_local_max_periodic, PlPath, Run, Scalar};
use crate::error::{Error, Result};
use crate::lattice::LeftPolicy;
use crate::toda::state::{TodaState, TodaValue};

/// Slope -1 over each block and +1 over each gap, starting at 0. Finite
/// states get a unit rising ray on each side standing in for `S_t = t`
/// before 0 and the infinite last gap; periodic states give one period on
/// `[0, L]`.
pub fn toda_encode_path<T: TodaValue + Scalar>(state: &TodaState<T>) -> Result<PlPath<T>> {
    state.validate()?;
    let one = T::one();
    let mut segs = Vec::with_capacity(2 * state.blocks() + 1);
    for (k, &q) in state.q.iter().enumerate() {
        segs.push((q, -one));
        if let Some(&e) = state.e.get(k) {
            segs.push((e, one));
        }
    }
    if state.periodic {
        PlPath::from_segments(T::zero(), T::zero(), &segs)
    } else {
        segs.insert(0, (one, one));
        segs.push((one, one));
        PlPath::from_segments(-one, -one, &segs)
    }
}

fn malformed(msg: &str) -> Error {
    Error::MalformedPath(msg.into())
}

/// Alternate falling/rising runs into `(Q, E)`.
fn read_runs<T: Scalar>(runs: &[Run<T>]) -> Result<(Vec<T>, Vec<T>)> {
    let (mut q, mut e) = (Vec::new(), Vec::new());
    for (i, r) in runs.iter().enumerate() {
        if r.rising != (i % 2 == 1) {
            return Err(malformed("Toda paths alternate slope -1 and +1 starting with -1 after 0"));
        }
        if r.rising {
            e.push(r.len());
        } else {
            q.push(r.len());
        }
    }
    Ok((q, e))
}

fn check_unit_slopes<T: Scalar>(path: &PlPath<T>) -> Result<()> {
    for i in 0..path.times().len() - 1 {
        let s = path.slope(i);
        if s != T::one() && s != -T::one() {
            return Err(malformed("Toda paths have slopes +1 and -1 only"));
        }
    }
    Ok(())
}

/// Inverse of [`toda_encode_path`] for finite states: the path must rise
/// into 0 and end on a rising piece, which plays the infinite last gap.
pub fn toda_decode_path<T: TodaValue + Scalar>(path: &PlPath<T>) -> Result<TodaState<T>> {
    check_unit_slopes(path)?;
    if path.first() < T::zero() {
        let left = path.restrict(path.first(), T::zero())?;
        if left.runs().len() != 1 || !left.runs()[0].rising {
            return Err(malformed("a finite Toda path rises before 0"));
        }
    }
    let runs = path.restrict(T::zero(), path.last())?.runs();
    if runs.last().is_none_or(|r| !r.rising) {
        return Err(malformed("a finite Toda path ends on its infinite gap"));
    }
    let (q, mut e) = read_runs(&runs)?;
    e.pop();
    TodaState::finite(q, e)
}

/// Inverse of [`toda_encode_path`] for periodic states, from one period on
/// `[0, L]`.
pub fn toda_decode_periodic<T: TodaValue + Scalar>(path: &PlPath<T>) -> Result<TodaState<T>> {
    check_unit_slopes(path)?;
    if path.first() != T::zero() {
        return Err(malformed("periodic Toda paths are stored on [0, L]"));
    }
    let runs = path.runs();
    if runs.len() % 2 == 1 {
        return Err(malformed("a period ends on a gap"));
    }
    let (q, e) = read_runs(&runs)?;
    TodaState::periodic(q, e, path.last())
}

/// Step through the path encoding; also returns the shift `tau`.
pub fn toda_step_via_path<T: TodaValue + Scalar>(state: &TodaState<T>) -> Result<(TodaState<T>, T)> {
    let s = toda_encode_path(state)?;
    if state.periodic {
        let ts = pl_pitman(&s, LeftPolicy::Cyclic)?;
        let (shifted, tau) = shift_to_local_max_periodic(&ts)?;
        Ok((toda_decode_periodic(&shifted)?, tau))
    } else {
        let ts = pl_pitman(&s, LeftPolicy::FiniteSupport)?;
        let (shifted, tau) = shift_to_local_max(&ts)?;
        Ok((toda_decode_path(&shifted)?, tau))
    }
}

/// Quantities preserved by the dynamics, plus the count of local maxima of
/// the encoding, which equals `J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TodaInvariants<T> {
    pub blocks: usize,
    pub total_q: T,
    pub total_e: T,
    pub length: Option<T>,
    pub local_maxima: usize,
}

pub fn toda_invariants<T: TodaValue + Scalar>(state: &TodaState<T>) -> Result<TodaInvariants<T>> {
    let s = toda_encode_path(state)?;
    let local_maxima = if state.periodic {
        let l = s.last();
        let mut lm: Vec<T> = s.periodic_extend(2).local_maxima().into_iter().map(|t| if t == l { T::zero() } else { t }).collect();
        lm.retain(|&t| t < l);
        lm.len()
    } else {
        s.local_maxima().len()
    };
    Ok(TodaInvariants {
        blocks: state.blocks(),
        total_q: state.total_q(),
        total_e: state.total_e(),
        length: state.length,
        local_maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::path::Rational;
    use crate::toda::state::{toda_step, toda_step_periodic};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n as i128)
    }

    fn rs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn encoding_breakpoints() {
        let s = TodaState::finite(rs(&[2, 1]), rs(&[3])).unwrap();
        let p = toda_encode_path(&s).unwrap();
        assert_eq!(p.times(), &rs(&[-1, 0, 2, 5, 6, 7])[..]);
        assert_eq!(p.values(), &rs(&[-1, 0, -2, 1, 0, 1])[..]);
        assert_eq!(toda_decode_path(&p).unwrap(), s);
        let lone = toda_encode_path(&TodaState::finite(rs(&[4]), vec![]).unwrap()).unwrap();
        assert_eq!(lone.local_maxima(), vec![r(0)]);
        assert_eq!(lone.local_minima(), vec![r(4)]);
    }

    #[test]
    fn hand_examples_via_path() {
        let cases = [
            (TodaState::finite(rs(&[2, 1]), rs(&[3])).unwrap(), TodaState::finite(rs(&[2, 1]), rs(&[2])).unwrap()),
            (TodaState::finite(rs(&[1, 2]), rs(&[5])).unwrap(), TodaState::finite(rs(&[1, 2]), rs(&[6])).unwrap()),
            (
                TodaState::periodic(rs(&[2, 1]), rs(&[4, 3]), r(10)).unwrap(),
                TodaState::periodic(rs(&[2, 1]), rs(&[3, 4]), r(10)).unwrap(),
            ),
            (
                TodaState::periodic(rs(&[1, 1]), rs(&[3, 3]), r(8)).unwrap(),
                TodaState::periodic(rs(&[1, 1]), rs(&[3, 3]), r(8)).unwrap(),
            ),
        ];
        for (s, want) in cases {
            assert_eq!(toda_step_via_path(&s).unwrap().0, want);
            assert_eq!(s.step().unwrap(), want);
        }
    }

    #[test]
    fn lone_block_via_path() {
        let s = TodaState::finite(rs(&[3]), vec![]).unwrap();
        let (t, tau) = toda_step_via_path(&s).unwrap();
        assert_eq!(t, s);
        assert_eq!(tau, r(3));
    }

    #[test]
    fn invariants_count_blocks() {
        let s = TodaState::finite(rs(&[2, 1, 4]), rs(&[3, 1])).unwrap();
        assert_eq!(toda_invariants(&s).unwrap().local_maxima, 3);
        let p = TodaState::periodic(rs(&[2, 1, 1]), rs(&[4, 3, 2]), r(13)).unwrap();
        assert_eq!(toda_invariants(&p).unwrap().local_maxima, 3);
        assert_eq!(toda_step(&s).unwrap().total_q(), s.total_q());
        assert_eq!(toda_step_periodic(&p).unwrap().total_q(), p.total_q());
    }

    #[test]
    fn malformed_paths_rejected() {
        let p = PlPath::from_segments(r(0), r(0), &[(r(1), r(1)), (r(1), r(-1))]).unwrap();
        assert!(toda_decode_path(&p).is_err());
        let q = PlPath::from_segments(r(0), r(0), &[(r(1), r(-1)), (r(1), r(2))]).unwrap();
        assert!(toda_decode_periodic(&q).is_err());
    }
}
