//! Conserved quantities of cyclic configurations.
//!
//! `f_0` counts particles and `f_1` counts cyclic `(1,0)` pairs. The
//! contraction `H` deletes every `(1,0)` pair at once, wrap pair included,
//! and `f_k = f_1(H^{k-1} x)` counts solitons of size at least `k`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{periodic_transform, BinaryConfiguration};

/// `(f_0, f_1, ...)` with trailing zeros dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolitonProfile(Vec<usize>);

impl SolitonProfile {
    pub fn new(mut f: Vec<usize>) -> Self {
        while f.last() == Some(&0) {
            f.pop();
        }
        Self(f)
    }

    /// `f_k`, zero beyond the stored prefix.
    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Largest `k` with `f_k > 0`, i.e. the size of the biggest soliton.
    pub fn depth(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

fn pair_starts(seq: &[u8], cyclic: bool) -> Vec<bool> {
    let m = seq.len();
    let mut start = vec![false; m];
    for i in 0..m {
        let j = i + 1;
        let next = if j < m {
            Some(seq[j])
        } else if cyclic && m >= 2 {
            Some(seq[0])
        } else {
            None
        };
        start[i] = seq[i] == 1 && next == Some(0);
    }
    start
}

/// Number of `(1,0)` pairs, counting the wrap pair when `cyclic`.
pub fn count_pairs(seq: &[u8], cyclic: bool) -> usize {
    pair_starts(seq, cyclic).iter().filter(|&&b| b).count()
}

/// The contraction `H`: remove all `(1,0)` pairs simultaneously.
pub fn contract(seq: &[u8], cyclic: bool) -> Vec<u8> {
    let m = seq.len();
    let start = pair_starts(seq, cyclic);
    let mut removed = vec![false; m];
    for i in 0..m {
        if start[i] {
            removed[i] = true;
            removed[(i + 1) % m] = true;
        }
    }
    seq.iter().zip(&removed).filter(|(_, &r)| !r).map(|(&b, _)| b).collect()
}

/// Profile of a cyclic bit string.
pub fn profile_of(seq: &[u8]) -> SolitonProfile {
    let mut f = vec![seq.iter().filter(|&&b| b == 1).count()];
    let mut cur = seq.to_vec();
    loop {
        let k = count_pairs(&cur, true);
        if k == 0 {
            break;
        }
        f.push(k);
        cur = contract(&cur, true);
    }
    SolitonProfile::new(f)
}

/// Profile of a cyclic configuration. Non-cyclic inputs are read as one
/// period of their window.
pub fn soliton_counts(config: &BinaryConfiguration) -> SolitonProfile {
    profile_of(config.sites())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub before: SolitonProfile,
    pub after: SolitonProfile,
    pub preserved: bool,
}

/// Compare the profile before and after one periodic step.
pub fn verify_conservation(config: &BinaryConfiguration) -> Result<ConservationReport> {
    let after_cfg = periodic_transform(config)?;
    let before = soliton_counts(config);
    let after = soliton_counts(&after_cfg);
    let preserved = before == after;
    Ok(ConservationReport { before, after, preserved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{reverse_configuration, shift_cyclic};

    #[test]
    fn contract_examples() {
        assert_eq!(contract(&[1, 0, 1, 1, 0, 0], true), vec![1, 0]);
        assert_eq!(contract(&[0, 0, 0], true), vec![0, 0, 0]);
        // the wrap pair is (x_3, x_1); what remains is x_2
        assert_eq!(contract(&[0, 0, 1], true), vec![0]);
        assert_eq!(contract(&[0, 0, 1], false), vec![0, 0, 1]);
    }

    #[test]
    fn profile_examples() {
        assert_eq!(profile_of(&[1, 0, 1, 1, 0, 0]).as_slice(), &[3, 2, 1]);
        assert_eq!(profile_of(&[0; 7]).as_slice(), &[] as &[usize]);
        assert_eq!(profile_of(&[0, 0, 1]).as_slice(), &[1, 1]);
        assert_eq!(profile_of(&[0, 0, 1]).get(2), 0);
    }

    #[test]
    fn conservation_example() {
        let x = BinaryConfiguration::cyclic(vec![1, 0, 1, 1, 0, 0]).unwrap();
        assert!(verify_conservation(&x).is_err());
        let x = BinaryConfiguration::cyclic(vec![1, 0, 1, 1, 0, 0, 0]).unwrap();
        let r = verify_conservation(&x).unwrap();
        assert!(r.preserved);
        assert_eq!(r.after.as_slice(), &[3, 2, 1]);
    }

    #[test]
    fn exhaustive_symmetries_n10() {
        let n = 10;
        for code in 0..(1u64 << n) {
            let x = BinaryConfiguration::cyclic_from_code(code, n);
            let f = soliton_counts(&x);
            assert_eq!(soliton_counts(&shift_cyclic(&x, 1)), f);
            assert_eq!(soliton_counts(&reverse_configuration(&x)), f);
            let s = f.as_slice();
            assert!(s.iter().skip(1).zip(s.iter().skip(2)).all(|(a, b)| a >= b));
            if 2 * x.particle_count() < n {
                assert!(verify_conservation(&x).unwrap().preserved, "{x}");
                assert_eq!(s.iter().skip(1).sum::<usize>(), x.particle_count());
            }
        }
    }
}
