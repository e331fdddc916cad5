//! Checks, reports and the parallel Monte Carlo driver shared by suites.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::harness::tolerances::Tolerances;
use crate::rng::{stream, Rng};

/// Draws per RNG stream. Chunks map to streams by index, so results do not
/// depend on the number of workers.
pub const CHUNK: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `value < threshold`
    Below,
    /// `value > threshold`
    Above,
    /// `value <= threshold`
    AtMost,
}

/// One pass/fail predicate evaluated on a computed statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub rule: Rule,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, rule: Rule, threshold: f64) -> Self {
        let pass = match rule {
            Rule::Below => value < threshold,
            Rule::Above => value > threshold,
            Rule::AtMost => value <= threshold,
        };
        Self { name: name.into(), value, rule, threshold, pass, detail: Value::Null }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Rule::Below, threshold)
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Rule::Above, threshold)
    }

    /// A count of violations that must be zero.
    pub fn none(name: impl Into<String>, violations: u64) -> Self {
        Self::new(name, violations as f64, Rule::AtMost, 0.0)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::none(name, u64::from(!ok))
    }

    pub fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn line(&self) -> String {
        let op = match self.rule {
            Rule::Below => "<",
            Rule::Above => ">",
            Rule::AtMost => "<=",
        };
        format!("{} {}: {:.6e} {op} {:e}", if self.pass { "ok  " } else { "FAIL" }, self.name, self.value, self.threshold)
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: &str, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), pass, checks }
    }

    pub fn summary(&self) -> String {
        format!("{} {}", if self.pass { "PASS" } else { "FAIL" }, self.suite)
    }
}

/// Inputs every suite sees.
#[derive(Clone, Debug)]
pub struct Context {
    pub seed: u64,
    pub tol: Tolerances,
    /// Optional overrides, e.g. `{"p": 0.25}`.
    pub params: Value,
}

impl Context {
    pub fn new(seed: u64, tol: Tolerances) -> Self {
        Self { seed, tol, params: Value::Null }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).and_then(Value::as_f64).unwrap_or(default)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> usize {
        self.params.get(key).and_then(Value::as_u64).map_or(default, |v| v as usize)
    }

    pub fn samples(&self, key: &str) -> usize {
        self.usize_or("samples", self.tol.samples(key))
    }
}

/// `n` independent draws of `f`, in parallel, deterministic in
/// `(seed, tag)`. Each chunk gets its own state from `init`, returned
/// alongside the draws so callers can pool counters.
pub fn par_draw_with<S, T, I, F>(seed: u64, tag: u64, n: usize, init: I, f: F) -> Result<(Vec<T>, Vec<S>)>
where
    S: Send,
    T: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut Rng) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, (tag << 32) | c as u64);
            let mut state = init();
            let k = CHUNK.min(n - c * CHUNK);
            let draws = (0..k).map(|_| f(&mut state, &mut rng)).collect::<Result<Vec<T>>>()?;
            Ok((draws, state))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(chunks);
    for (d, s) in parts {
        out.extend(d);
        states.push(s);
    }
    Ok((out, states))
}

pub fn par_draw<T, F>(seed: u64, tag: u64, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Rng) -> Result<T> + Sync,
{
    Ok(par_draw_with(seed, tag, n, || (), |_, rng| f(rng))?.0)
}

/// Seconds spent in `f`.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn draws_ignore_worker_count() {
        let f = |rng: &mut Rng| Ok(rng.random::<u64>());
        let a = par_draw(5, 1, 2500, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| par_draw(5, 1, 2500, f).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, par_draw(5, 2, 2500, f).unwrap());
    }

    #[test]
    fn rules() {
        assert!(Check::below("x", 0.5, 1.0).pass);
        assert!(!Check::above("x", 0.001, 0.01).pass);
        assert!(Check::none("v", 0).pass);
        assert!(!Report::new("s", vec![]).pass);
    }
}
