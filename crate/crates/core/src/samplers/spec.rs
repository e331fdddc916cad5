use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::solitons::SolitonProfile;

/// One inverse temperature, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaValue {
    Finite(f64),
    /// Hard constraint: the matching `f_k` must vanish.
    Infinite,
}

impl BetaValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BetaValue::Infinite)
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaValue::Finite(b) => write!(f, "{b}"),
            BetaValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for BetaValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BetaValue::Finite(b) => s.serialize_f64(*b),
            BetaValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for BetaValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(b) if b.is_finite() => Ok(BetaValue::Finite(b)),
            Repr::Num(b) => Err(de::Error::custom(format!("beta {b} is not a finite number"))),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "+inf" | "infinity" | "Infinity") => {
                Ok(BetaValue::Infinite)
            }
            Repr::Text(t) => Err(de::Error::custom(format!("beta {t:?}: expected a number or \"inf\""))),
        }
    }
}

/// `(beta_0, beta_1, ...)`: an explicit head and one value repeated for
/// every later index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsBeta {
    pub head: Vec<BetaValue>,
    #[serde(default = "zero_beta")]
    pub tail: BetaValue,
}

fn zero_beta() -> BetaValue {
    BetaValue::Finite(0.0)
}

impl GibbsBeta {
    pub fn new(head: Vec<BetaValue>, tail: BetaValue) -> Self {
        Self { head, tail }
    }

    pub fn finite(head: &[f64]) -> Self {
        Self { head: head.iter().map(|&b| BetaValue::Finite(b)).collect(), tail: zero_beta() }
    }

    pub fn get(&self, k: usize) -> BetaValue {
        self.head.get(k).copied().unwrap_or(self.tail)
    }

    /// `-sum_k beta_k f_k`, or `None` when an infinite coefficient meets a
    /// positive count. An infinite coefficient times a zero count is zero.
    pub fn log_weight(&self, profile: &SolitonProfile) -> Option<f64> {
        let mut acc = 0.0;
        for (k, &f) in profile.as_slice().iter().enumerate() {
            if f == 0 {
                continue;
            }
            match self.get(k) {
                BetaValue::Finite(b) => acc -= b * f as f64,
                BetaValue::Infinite => return None,
            }
        }
        Some(acc)
    }
}

/// Coefficients for which the Gibbs measure is Bernoulli(p)^N given S_N > 0.
pub fn gibbs_params_from_iid(p: f64) -> Result<GibbsBeta> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("iid parameter p = {p} must lie in (0,1)")));
    }
    Ok(GibbsBeta::finite(&[((1.0 - p) / p).ln()]))
}

/// Coefficients for which the Gibbs measure is the cyclic Markov chain with
/// `P(1 | 0) = p0`, `P(1 | 1) = p1`.
pub fn gibbs_params_from_markov(p0: f64, p1: f64) -> Result<GibbsBeta> {
    if !(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0) {
        return Err(invalid(format!("Markov parameters ({p0}, {p1}) must lie in (0,1)^2")));
    }
    let b0 = ((1.0 - p0) / p1).ln();
    let b1 = (p1 * (1.0 - p0) / (p0 * (1.0 - p1))).ln();
    Ok(GibbsBeta::finite(&[b0, b1]))
}

/// iid coefficients plus a hard cap: no soliton longer than `k`.
pub fn gibbs_params_bounded(p: f64, k: usize) -> Result<GibbsBeta> {
    let iid = gibbs_params_from_iid(p)?;
    let mut head = iid.head;
    head.extend(std::iter::repeat_n(BetaValue::Finite(0.0), k));
    Ok(GibbsBeta::new(head, BetaValue::Infinite))
}

/// A random-configuration law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MeasureSpec {
    Bernoulli { p: f64 },
    Markov { p0: f64, p1: f64 },
    BoundedSoliton { p: f64, k: usize },
    GibbsPeriodic { n: usize, beta: GibbsBeta },
    CyclicMarkov { n: usize, p0: f64, p1: f64 },
    PeriodicBounded { n: usize, p: f64, k: usize },
}

impl MeasureSpec {
    /// Range checks. `for_dynamics` also demands the conditions under which
    /// the stationary law is invariant under T.
    pub fn validate(&self, for_dynamics: bool) -> Result<()> {
        let unit_open = |x: f64| x > 0.0 && x < 1.0;
        match *self {
            MeasureSpec::Bernoulli { p } => {
                if !(0.0..1.0).contains(&p) {
                    return Err(invalid(format!("Bernoulli p = {p} must lie in [0,1)")));
                }
                if for_dynamics && p >= 0.5 {
                    return Err(invalid(format!(
                        "Bernoulli p = {p}: the carrier is not positive recurrent for p >= 1/2"
                    )));
                }
            }
            MeasureSpec::Markov { p0, p1 } => {
                if !(unit_open(p0) && (0.0..1.0).contains(&p1)) {
                    return Err(invalid(format!("Markov ({p0}, {p1}) must lie in (0,1) x [0,1)")));
                }
                if for_dynamics && p0 + p1 >= 1.0 {
                    return Err(invalid(format!(
                        "Markov ({p0}, {p1}): need p0 + p1 < 1 for positive drift"
                    )));
                }
            }
            MeasureSpec::BoundedSoliton { p, .. } => {
                if !unit_open(p) {
                    return Err(invalid(format!("bounded-soliton p = {p} must lie in (0,1)")));
                }
            }
            MeasureSpec::GibbsPeriodic { n, .. } => {
                if n == 0 {
                    return Err(invalid("Gibbs cycle length N must be positive"));
                }
            }
            MeasureSpec::CyclicMarkov { n, p0, p1 } => {
                if n == 0 || !unit_open(p0) || !unit_open(p1) {
                    return Err(invalid(format!("cyclic Markov needs N > 0 and (p0,p1) in (0,1)^2, got N={n}, ({p0},{p1})")));
                }
            }
            MeasureSpec::PeriodicBounded { n, p, .. } => {
                if n == 0 || !unit_open(p) {
                    return Err(invalid(format!("periodic bounded needs N > 0 and p in (0,1), got N={n}, p={p}")));
                }
            }
        }
        Ok(())
    }

    /// The Gibbs description of a periodic family.
    pub fn gibbs(&self) -> Result<(usize, GibbsBeta)> {
        match self {
            MeasureSpec::GibbsPeriodic { n, beta } => Ok((*n, beta.clone())),
            MeasureSpec::CyclicMarkov { n, p0, p1 } => Ok((*n, gibbs_params_from_markov(*p0, *p1)?)),
            MeasureSpec::PeriodicBounded { n, p, k } => Ok((*n, gibbs_params_bounded(*p, *k)?)),
            other => Err(invalid(format!("{other:?} is not a periodic family"))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MeasureSpec = serde_json::from_str(text)?;
        spec.validate(false)?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_coefficients() {
        let b = gibbs_params_from_iid(0.35).unwrap();
        assert!(matches!(b.get(0), BetaValue::Finite(x) if (x - 0.619039).abs() < 1e-6));
        assert!(matches!(b.get(0), BetaValue::Finite(x) if (x - 0.62).abs() < 5e-3));
        assert_eq!(b.get(5), BetaValue::Finite(0.0));
        assert!(matches!(gibbs_params_from_iid(0.5).unwrap().get(0), BetaValue::Finite(x) if x == 0.0));
        assert!(gibbs_params_from_iid(0.0).is_err());
    }

    #[test]
    fn markov_coefficients_match_caption() {
        let b = gibbs_params_from_markov(0.11, 0.80).unwrap();
        let (BetaValue::Finite(b0), BetaValue::Finite(b1)) = (b.get(0), b.get(1)) else {
            panic!("finite expected")
        };
        assert!((b0 - 0.11).abs() < 5e-3, "{b0}");
        assert!((b1 - 3.48).abs() < 5e-3, "{b1}");
    }

    #[test]
    fn bounded_has_infinite_tail() {
        let b = gibbs_params_bounded(0.5, 2).unwrap();
        assert_eq!(b.get(1), BetaValue::Finite(0.0));
        assert_eq!(b.get(2), BetaValue::Finite(0.0));
        assert_eq!(b.get(3), BetaValue::Infinite);
        let prof = SolitonProfile::new(vec![3, 1, 1, 1]);
        assert_eq!(b.log_weight(&prof), None);
        let prof = SolitonProfile::new(vec![3, 2, 1]);
        assert!(b.log_weight(&prof).is_some());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = MeasureSpec::GibbsPeriodic { n: 12, beta: gibbs_params_bounded(0.5, 2).unwrap() };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(MeasureSpec::from_json(&text).unwrap(), spec);
        let m = MeasureSpec::from_json(r#"{"family":"markov","p0":0.11,"p1":0.8}"#).unwrap();
        assert_eq!(m, MeasureSpec::Markov { p0: 0.11, p1: 0.8 });
        assert!(MeasureSpec::from_json(r#"{"family":"bernoulli","p":1.5}"#).is_err());
        assert!(MeasureSpec::Markov { p0: 0.3, p1: 0.8 }.validate(true).is_err());
    }
}
