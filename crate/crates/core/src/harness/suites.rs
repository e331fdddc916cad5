//! Named verification suites: the acceptance criteria plus the symmetry
//! checks and a negative control.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::exactdist::stats::{chi_square_two_sample, histogram};
use crate::exactdist::table::{enumerate_gibbs, tv_distance, DistributionTable, ENUMERATION_CUTOFF};
use crate::harness::criteria::{example_families, CriterionFn, CRITERIA};
use crate::harness::scenario::{par_draw, Check, Context, Report};
use crate::lattice::{carrier, encode_path, transform, BinaryConfiguration, LeftPolicy};
use crate::samplers::{sample_spec, MeasureSpec};

/// Every suite name with a one-line description.
pub fn suite_names() -> Vec<(&'static str, &'static str)> {
    let mut v: Vec<_> = CRITERIA.iter().map(|(n, d, _)| (*n, *d)).collect();
    v.push(("symmetry", "reversal, carrier reversal and T-invariance of stationary laws"));
    v.push(("broken-step", "negative control: a step that drops the wrap-around carrier must fail"));
    v.push(("acceptance", "all fourteen acceptance criteria"));
    v
}

fn lookup(name: &str) -> Option<CriterionFn> {
    match name {
        "symmetry" => Some(symmetry),
        "broken-step" => Some(broken_step),
        _ => CRITERIA.iter().find(|(n, _, _)| *n == name).map(|c| c.2),
    }
}

/// Run one suite; `acceptance` expands to one report per criterion.
pub fn run_suite(name: &str, ctx: &Context) -> Result<Vec<Report>> {
    if name == "acceptance" {
        return CRITERIA.iter().map(|(n, _, f)| Ok(Report::new(n, f(ctx)?))).collect();
    }
    let f = lookup(name).ok_or_else(|| Error::UnknownSuite(name.into()))?;
    Ok(vec![Report::new(name, f(ctx)?)])
}

const SYM_WIDTH: i64 = 4;
const SYM_CAP: u64 = 7;

/// Window statistics of one stationary sample: sites `1..=4` and their
/// mirror `0, -1, -2, -3`; carrier `W_0..W_3` and `W_0, W_-1, .., W_-3`
/// (capped); and sites `1..=4` of `T eta`.
fn symmetry_codes(x: &BinaryConfiguration) -> Result<[usize; 5]> {
    let site = |c: &BinaryConfiguration, n: i64| c.get(n).expect("inside window") as usize;
    let bits = |c: &BinaryConfiguration, ns: &mut dyn Iterator<Item = i64>| {
        ns.enumerate().fold(0usize, |a, (k, n)| a | (site(c, n) << k))
    };
    let w = carrier(&encode_path(x)?, LeftPolicy::Buffered)?;
    let wcode = |ns: &mut dyn Iterator<Item = i64>| {
        ns.fold(0usize, |a, n| a * (SYM_CAP as usize + 1) + w.at(n).min(SYM_CAP) as usize)
    };
    let tx = transform(x)?;
    Ok([
        bits(x, &mut (1..=SYM_WIDTH)),
        bits(x, &mut (1..=SYM_WIDTH).map(|n| 1 - n)),
        wcode(&mut (0..SYM_WIDTH)),
        wcode(&mut (0..SYM_WIDTH).map(|n| -n)),
        bits(&tx, &mut (1..=SYM_WIDTH)),
    ])
}

/// For each stationary family all three symmetries hold, so each pair of
/// window laws must agree. Forward statistics come from one half of the
/// samples and their partners from the other, so the two-sample tests see
/// independent data.
fn symmetry(ctx: &Context) -> Result<Vec<Check>> {
    let n = ctx.samples("symmetry");
    let tol = ctx.tol.buffer_tolerance;
    let floor = ctx.tol.p_value;
    let specs = [
        ("iid p=0.35", MeasureSpec::Bernoulli { p: 0.35 }),
        ("markov (0.11,0.80)", MeasureSpec::Markov { p0: 0.11, p1: 0.80 }),
        ("bounded p=0.5 K=2", MeasureSpec::BoundedSoliton { p: 0.5, k: 2 }),
    ];
    let bit_cells = 1usize << SYM_WIDTH;
    let w_cells = (SYM_CAP as usize + 1).pow(SYM_WIDTH as u32);
    let mut checks = Vec::new();
    for (tag, (name, spec)) in specs.iter().enumerate() {
        let codes = par_draw(ctx.seed, 40 + tag as u64, n, |rng| {
            symmetry_codes(&sample_spec(spec, -2 * SYM_WIDTH, 2 * SYM_WIDTH, tol, rng)?)
        })?;
        let (even, odd): (Vec<_>, Vec<_>) = codes.iter().enumerate().partition(|(i, _)| i % 2 == 0);
        let col = |half: &[(usize, &[usize; 5])], k: usize| half.iter().map(|(_, c)| c[k]).collect::<Vec<_>>();
        let pairs = [
            ("eta reversed", 0, 1, bit_cells),
            ("carrier reversed", 2, 3, w_cells),
            ("T eta", 0, 4, bit_cells),
        ];
        for (what, a, b, cells) in pairs {
            let t = chi_square_two_sample(&histogram(col(&even, a), cells), &histogram(col(&odd, b), cells))?;
            checks.push(Check::above(format!("two-sample chi-square p, {what} vs original, {name}"), t.p_value, floor).with(json!(t)));
        }
    }
    Ok(checks)
}

/// A plausible but wrong periodic step: the carrier starts empty at site 1
/// instead of at its periodic fixed point, and balls still held at the end
/// of the period are lost.
pub fn broken_periodic_step(x: &BinaryConfiguration) -> BinaryConfiguration {
    let mut load = 0u32;
    let sites = x
        .sites()
        .iter()
        .map(|&b| {
            if b == 1 {
                load += 1;
                0
            } else if load > 0 {
                load -= 1;
                1
            } else {
                0
            }
        })
        .collect();
    BinaryConfiguration::cyclic(sites).expect("nonempty")
}

fn pushforward_with(table: &DistributionTable, step: impl Fn(&BinaryConfiguration) -> BinaryConfiguration) -> DistributionTable {
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    for (&c, &p) in table.support.iter().zip(&table.probs) {
        *acc.entry(step(&BinaryConfiguration::cyclic_from_code(c, table.n)).code()).or_default() += p;
    }
    let (support, probs) = acc.into_iter().unzip();
    DistributionTable { n: table.n, support, probs, log_z: table.log_z }
}

/// The Gibbs-invariance predicate applied to [`broken_periodic_step`]. A
/// correct harness reports FAIL here.
fn broken_step(ctx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, beta) in example_families()? {
        for n in [6usize, 10] {
            let t = enumerate_gibbs(n, &beta, ENUMERATION_CUTOFF)?;
            let tv = tv_distance(&t, &pushforward_with(&t, broken_periodic_step))?;
            checks.push(Check::below(format!("TV {name}, N={n}, broken step"), tv, ctx.tol.exact_tv));
        }
    }
    Ok(checks)
}
