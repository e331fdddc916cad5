//! The acceptance criteria, one function each. Every function returns its
//! checks; a criterion passes when all of them do.

use rand::Rng as _;
use serde_json::json;
use statrs::distribution::{Beta, Binomial, ContinuousCDF, Discrete, Normal};

use crate::continuum::path::{rescale_path, PlPath};
use crate::continuum::zigzag::{sample_zigzag, sample_zigzag_palm, ZigzagSpec};
use crate::error::{invalid, Result};
use crate::exactdist::carrier::{carrier_marginal_iid, carrier_marginal_markov, CarrierMarginal};
use crate::exactdist::palm::palm_window_law;
use crate::exactdist::stats::{chi_square_test, chi_square_two_sample, histogram, ks_test, ks_two_sample};
use crate::exactdist::table::{enumerate_gibbs, pushforward_t, tv_distance, tv_vectors, ENUMERATION_CUTOFF};
use crate::exactdist::transfer::{iid_binomial_marginal, PeriodicFamily};
use crate::exactdist::limit_convergence_report;
use crate::harness::conditioned::{floor_window_law, reflected_window_law, ConditionedWalks};
use crate::harness::scenario::{par_draw, par_draw_with, timed, Check, Context};
use crate::lattice::{
    carrier, encode_path, inverse, palm_transform, transform, BinaryConfiguration, Boundary, LatticePath, LeftPolicy,
};
use crate::rng::stream;
use crate::samplers::stationary::markov_run;
use crate::samplers::{
    gibbs_params_bounded, gibbs_params_from_iid, gibbs_params_from_markov, quasistationary_solve,
    sample_iid_buffered, sample_markov_buffered, sample_palm_markov, GibbsBeta,
};
use crate::solitons::verify_conservation;
use crate::toda::{
    sample_rational_state, sample_toda_palm, sample_toda_periodic_compositions, sample_toda_periodic_dirichlet,
    sample_toda_periodic_integer, toda_palm_step, toda_step_via_path, TodaState,
};
use crate::toda::exact::{composition_part_pmf, integer_tv, multinomial_law, pushforward_integer, uniform_composition_law};

pub type CriterionFn = fn(&Context) -> Result<Vec<Check>>;

/// `(suite name, description, function)` for the fourteen criteria, in order.
pub const CRITERIA: [(&str, &str, CriterionFn); 14] = [
    ("fifteen-site", "two steps of the 15-site example reproduce the next two rows", fifteen_site),
    ("conservation", "soliton profile preserved by the periodic step", conservation),
    ("gibbs-invariance", "enumerated Gibbs laws are invariant under T", gibbs_invariance),
    ("reversibility", "inverse undoes the periodic step", reversibility),
    ("limits", "periodic window marginals converge to the stationary ones", limits),
    ("high-density", "density above 1/2 collapses to Bernoulli(1/2)", high_density),
    ("carrier-marginals", "stationary carrier law matches its closed form", carrier_marginals),
    ("quasi-stationary", "bounded-soliton kernel and sampler", quasi_stationary),
    ("toda-bridge", "Toda step equals Pitman plus shift on path encodings", toda_bridge),
    ("toda-measures", "Toda invariant laws survive one step", toda_measures),
    ("zigzag", "Pitman's transform preserves the zigzag law", zigzag),
    ("scaling", "rescaled lattice paths near their limits", scaling),
    ("conditioned-walk", "walk conditioned to stay above 0 vs reflected walk", conditioned_walk),
    ("palm", "re-rooted step preserves the Palm law", palm),
];

/// Gibbs parameters of the three example families used across criteria.
pub fn example_families() -> Result<Vec<(&'static str, GibbsBeta)>> {
    Ok(vec![
        ("iid p=0.35", gibbs_params_from_iid(0.35)?),
        ("markov (0.11,0.80)", gibbs_params_from_markov(0.11, 0.80)?),
        ("bounded p=0.5 K=2", gibbs_params_bounded(0.5, 2)?),
    ])
}

fn code_of(bits: impl IntoIterator<Item = u8>) -> usize {
    bits.into_iter().enumerate().fold(0, |acc, (k, b)| acc | ((b as usize) << k))
}

fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
    move |x| if x <= 0.0 { 0.0 } else { 1.0 - (-rate * x).exp() }
}

fn admissible_cyclic(max_n: usize) -> impl Iterator<Item = BinaryConfiguration> {
    (1..=max_n).flat_map(|n| {
        (0..1u64 << n)
            .filter(move |c| 2 * c.count_ones() < n as u32)
            .map(move |c| BinaryConfiguration::cyclic_from_code(c, n))
    })
}

pub fn fifteen_site(ctx: &Context) -> Result<Vec<Check>> {
    let (rows, secs) = timed(|| -> Result<_> {
        let row1 = BinaryConfiguration::parse_with("○●○●●●○○●○○○○○○", Boundary::FiniteSupport)?;
        let row2 = transform(&row1)?;
        let row3 = transform(&row2)?;
        Ok((row2.particle_positions(), row3.particle_positions()))
    });
    let (r2, r3) = rows?;
    Ok(vec![
        Check::holds("row 2 balls {3,7,8,10,11}", r2 == [3, 7, 8, 10, 11]).with(json!(r2)),
        Check::holds("row 3 balls {4,9,12,13,14}", r3 == [4, 9, 12, 13, 14]).with(json!(r3)),
        Check::below("seconds", secs, ctx.tol.time_limit("fifteen_site")),
    ])
}

pub fn conservation(ctx: &Context) -> Result<Vec<Check>> {
    let (res, secs) = timed(|| -> Result<_> {
        let mut checked = 0u64;
        let mut broken = 0u64;
        for x in admissible_cyclic(12) {
            checked += 1;
            broken += u64::from(!verify_conservation(&x)?.preserved);
        }
        let n = ctx.samples("conservation_random");
        let random = par_draw(ctx.seed, 2, n, |rng| {
            let len = rng.random_range(2..=64usize);
            let q = rng.random_range(0.0..0.5);
            loop {
                let sites: Vec<u8> = (0..len).map(|_| u8::from(rng.random_bool(q))).collect();
                let x = BinaryConfiguration::cyclic(sites)?;
                if 2 * x.particle_count() < len {
                    return Ok(verify_conservation(&x)?.preserved);
                }
            }
        })?;
        let random_broken = random.iter().filter(|&&ok| !ok).count() as u64;
        Ok((checked, broken, random.len(), random_broken))
    });
    let (checked, broken, n_random, random_broken) = res?;
    Ok(vec![
        Check::none("violations, all admissible N <= 12", broken).with(json!({"configurations": checked})),
        Check::none("violations, random N <= 64", random_broken).with(json!({"configurations": n_random})),
        Check::below("seconds", secs, ctx.tol.time_limit("conservation")),
    ])
}

pub fn gibbs_invariance(ctx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, beta) in example_families()? {
        for n in [6usize, 10, 14] {
            let (tv, secs) = timed(|| -> Result<f64> {
                let t = enumerate_gibbs(n, &beta, ENUMERATION_CUTOFF)?;
                tv_distance(&t, &pushforward_t(&t)?)
            });
            checks.push(Check::below(format!("TV {name}, N={n}"), tv?, ctx.tol.exact_tv));
            checks.push(Check::below(format!("seconds {name}, N={n}"), secs, ctx.tol.time_limit("gibbs_invariance_case")));
        }
    }
    Ok(checks)
}

pub fn reversibility(_ctx: &Context) -> Result<Vec<Check>> {
    let mut checked = 0u64;
    let mut broken = 0u64;
    for x in admissible_cyclic(12) {
        checked += 1;
        let back = inverse(&transform(&x)?)?;
        let forth = transform(&inverse(&x)?)?;
        broken += u64::from(back != x || forth != x);
    }
    Ok(vec![Check::none("T^-1 T != id or T T^-1 != id, N <= 12", broken).with(json!({"configurations": checked}))])
}

pub fn limits(ctx: &Context) -> Result<Vec<Check>> {
    let grid = [50usize, 200, 800, 2000];
    let families = [
        PeriodicFamily::Iid { p: 0.35 },
        PeriodicFamily::Markov { p0: 0.11, p1: 0.80 },
        PeriodicFamily::Bounded { p: 0.5, k: 2 },
    ];
    let mut checks = Vec::new();
    let (res, secs) = timed(|| -> Result<_> {
        families.iter().map(|&f| limit_convergence_report(f, 4, &grid)).collect::<Result<Vec<_>>>()
    });
    for r in res? {
        let name = serde_json::to_string(&r.family)?;
        let tvs: Vec<f64> = r.rows.iter().map(|row| row.tv).collect();
        checks.push(Check::holds(format!("TV decreasing {name}"), r.decreasing).with(json!(tvs)));
        checks.push(Check::below(format!("TV at N=2000 {name}"), r.final_tv(), ctx.tol.limit_tv));
    }
    checks.push(Check::below("seconds", secs, ctx.tol.time_limit("limits")));
    Ok(checks)
}

pub fn high_density(ctx: &Context) -> Result<Vec<Check>> {
    let (res, secs) = timed(|| iid_binomial_marginal(0.6, 10_000, 3));
    let fair = vec![1.0 / 8.0; 8];
    let tv = tv_vectors(&res?.probs, &fair)?;
    Ok(vec![
        Check::below("TV to Bernoulli(1/2)^3, p=0.6, N=10^4", tv, ctx.tol.high_density_tv),
        Check::below("seconds", secs, ctx.tol.time_limit("high_density")),
    ])
}

/// Cells `0..k` and a tail cell `>= k` with expected count at least 5.
fn carrier_cells(law: &CarrierMarginal, n: usize) -> (usize, Vec<f64>) {
    let mut k = 1;
    while law.tail(k as u64 + 1) * n as f64 >= 5.0 {
        k += 1;
    }
    let mut e: Vec<f64> = (0..k).map(|m| law.pmf(m as u64)).collect();
    e.push(law.tail(k as u64));
    (k, e)
}

fn carrier_fit(name: &str, law: &CarrierMarginal, w: &[u64], p_floor: f64) -> Result<Check> {
    let (k, expected) = carrier_cells(law, w.len());
    let observed = histogram(w.iter().map(|&x| (x as usize).min(k)), k + 1);
    let t = chi_square_test(&observed, &expected)?;
    Ok(Check::above(format!("chi-square p, W_0 {name}"), t.p_value, p_floor).with(json!(t)))
}

pub fn carrier_marginals(ctx: &Context) -> Result<Vec<Check>> {
    let n = ctx.samples("carrier");
    let tol = ctx.tol.buffer_tolerance;
    let (p, p0, p1) = (0.35, 0.11, 0.80);
    let iid = carrier_marginal_iid(p)?;
    let mk = carrier_marginal_markov(p0, p1)?;
    // W_0 = M_0 - S_0 = M_0, read off the certified past of the path
    let w0 = |cfg: BinaryConfiguration| -> Result<u64> {
        Ok(carrier(&encode_path(&cfg)?, LeftPolicy::Buffered)?.at(0))
    };
    let wi = par_draw(ctx.seed, 7, n, |rng| w0(sample_iid_buffered(p, 0, 0, tol, rng)?))?;
    let wm = par_draw(ctx.seed, 8, n, |rng| w0(sample_markov_buffered(p0, p1, 0, 0, tol, rng)?))?;
    Ok(vec![
        Check::below("|sum - 1| iid", (iid.total_mass() - 1.0).abs(), ctx.tol.normalization),
        Check::below("|sum - 1| markov", (mk.total_mass() - 1.0).abs(), ctx.tol.normalization),
        carrier_fit("iid p=0.35", &iid, &wi, ctx.tol.p_value)?,
        carrier_fit("markov (0.11,0.80)", &mk, &wm, ctx.tol.p_value)?,
    ])
}

pub fn quasi_stationary(ctx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for p in [0.35, 0.5, 0.7] {
        let mut worst_res: f64 = 0.0;
        let mut worst_db: f64 = 0.0;
        for k in 1..=10 {
            let s = quasistationary_solve(p, k)?;
            worst_res = worst_res.max(s.residual());
            worst_db = worst_db.max(s.detailed_balance_error());
        }
        checks.push(Check::below(format!("eigen-residual p={p}, K<=10"), worst_res, ctx.tol.eigen_residual));
        checks.push(Check::below(format!("detailed balance p={p}, K<=10"), worst_db, ctx.tol.detailed_balance));
    }
    let steps = ctx.samples("quasi_steps");
    let (p, k) = (0.5, 2);
    let s = quasistationary_solve(p, k)?;
    let mut rng = stream(ctx.seed, 9);
    let run = s.sample(1, steps as i64, &mut rng)?;
    let over = run.carrier.values.iter().filter(|&&w| w > k as u64).count() as u64;
    let density = run.config.particle_count() as f64 / steps as f64;
    checks.push(Check::none(format!("sup W > K over {steps} steps, p={p}, K={k}"), over));
    checks.push(Check::below("empirical density", density, 0.5));
    checks.push(Check::below("exact density", s.density(), 0.5));
    Ok(checks)
}

pub fn toda_bridge(ctx: &Context) -> Result<Vec<Check>> {
    let n = ctx.samples("toda_bridge");
    let mut checks = Vec::new();
    for periodic in [false, true] {
        let tag = 10 + u64::from(periodic);
        let bad = par_draw(ctx.seed, tag, n, |rng| {
            let j = rng.random_range(1..=6);
            let s = sample_rational_state(j, periodic, rng)?;
            Ok(u64::from(s.step()? != toda_step_via_path(&s)?.0))
        })?;
        let kind = if periodic { "periodic" } else { "finite" };
        checks.push(Check::none(format!("{kind} step vs path route, {n} rational states"), bad.iter().sum()));
    }
    let iters = ctx.samples("toda_iterations");
    for periodic in [false, true] {
        let tag = 12 + u64::from(periodic);
        let bad = par_draw(ctx.seed, tag, 100, |rng| {
            let j = rng.random_range(1..=6);
            let s0 = sample_rational_state(j, periodic, rng)?;
            let mut s = s0.clone();
            let mut bad = 0u64;
            for _ in 0..iters {
                s = s.step()?;
                bad += u64::from(s.total_q() != s0.total_q() || s.length != s0.length || s.blocks() != s0.blocks());
            }
            Ok(bad)
        })?;
        let kind = if periodic { "periodic" } else { "finite" };
        checks.push(Check::none(format!("{kind} sum(Q), L, J drift over {iters} steps"), bad.iter().sum()));
    }
    Ok(checks)
}

fn ks_check(name: String, xs: &[f64], cdf: impl Fn(f64) -> f64, floor: f64) -> Result<Check> {
    let t = ks_test(xs, cdf)?;
    Ok(Check::above(name, t.p_value, floor).with(json!(t)))
}

pub fn toda_measures(ctx: &Context) -> Result<Vec<Check>> {
    let n = ctx.samples("toda_measures");
    let floor = ctx.tol.p_value;
    let tol = ctx.tol.buffer_tolerance;
    let mut checks = Vec::new();
    let (_, secs) = timed(|| -> Result<()> {
        // bi-infinite exponential law seen from a block start
        let spec = ZigzagSpec::new(1.0, 2.0)?;
        let draws = par_draw(ctx.seed, 14, n, |rng| {
            let w = sample_toda_palm(&spec, 2, rng)?;
            let (img, _) = toda_palm_step(&w, &spec, tol, rng)?;
            let get = |x: Option<f64>| x.ok_or_else(|| invalid("step image misses a central coordinate"));
            Ok([get(img.q_at(0))?, get(img.q_at(1))?, get(img.e_at(0))?, get(img.e_at(1))?])
        })?;
        for (i, name, rate) in [(0, "Q_0", 2.0), (1, "Q_1", 2.0), (2, "E_0", 1.0), (3, "E_1", 1.0)] {
            let xs: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            checks.push(ks_check(format!("KS p, T{name} vs Exp({rate})"), &xs, exp_cdf(rate), floor)?);
        }
        // periodic Dirichlet
        let (j, a, l) = (4usize, 3.0, 10.0);
        let beta = Beta::new(1.0, (j - 1) as f64).map_err(|e| invalid(e.to_string()))?;
        let draws = par_draw(ctx.seed, 15, n, |rng| {
            let s = sample_toda_periodic_dirichlet(j, a, l, rng)?.step()?;
            Ok([s.q[0] / a, s.e[0] / (l - a)])
        })?;
        for (i, name) in [(0, "TQ_1/A"), (1, "TE_1/(L-A)")] {
            let xs: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            checks.push(ks_check(format!("KS p, {name} vs Beta(1,{})", j - 1), &xs, |x| beta.cdf(x), floor)?);
        }
        // periodic integer
        let (j, a, l) = (4usize, 12i64, 40i64);
        let draws = par_draw(ctx.seed, 16, n, |rng| {
            let s: TodaState<i64> = sample_toda_periodic_integer(j, a, l, rng)?.step()?;
            Ok([s.q[0] - 1, s.e[0] - 1])
        })?;
        for (i, name, trials) in [(0, "TQ_1 - 1", a - j as i64), (1, "TE_1 - 1", l - a - j as i64)] {
            let law = Binomial::new(1.0 / j as f64, trials as u64).map_err(|e| invalid(e.to_string()))?;
            let expected: Vec<f64> = (0..=trials as u64).map(|x| law.pmf(x)).collect();
            let observed = histogram(draws.iter().map(|d| d[i] as usize), trials as usize + 1);
            let t = chi_square_test(&observed, &expected)?;
            checks.push(
                Check::above(format!("chi-square p, {name} vs Binomial({trials}, 1/{j})"), t.p_value, floor).with(json!(t)),
            );
        }
        let multi = multinomial_law(j, a, l)?;
        let tv = integer_tv(&multi, &pushforward_integer(&multi, l)?);
        checks.push(Check::below(format!("exact TV, multinomial law vs its image, (J,A,L)=({j},{a},{l})"), tv, ctx.tol.exact_tv));
        // uniform compositions: the law the step actually preserves
        let uniform = uniform_composition_law(j, a, l)?;
        let tv = integer_tv(&uniform, &pushforward_integer(&uniform, l)?);
        checks.push(Check::below(format!("exact TV, uniform compositions vs image, (J,A,L)=({j},{a},{l})"), tv, ctx.tol.exact_tv));
        let draws = par_draw(ctx.seed, 17, n, |rng| {
            let s: TodaState<i64> = sample_toda_periodic_compositions(j, a, l, rng)?.step()?;
            Ok([s.q[0] - 1, s.e[0] - 1])
        })?;
        for (i, name, total) in [(0, "TQ_1 - 1", a), (1, "TE_1 - 1", l - a)] {
            let cells = (total - j as i64) as usize + 1;
            let expected: Vec<f64> = (0..cells as i64).map(|k| composition_part_pmf(total, j, k)).collect();
            let observed = histogram(draws.iter().map(|d| d[i] as usize), cells);
            let t = chi_square_test(&observed, &expected)?;
            checks.push(
                Check::above(format!("chi-square p, {name} vs uniform-composition part, total {total}"), t.p_value, floor)
                    .with(json!(t)),
            );
        }
        Ok(())
    });
    checks.push(Check::below("seconds", secs, ctx.tol.time_limit("toda_measures")));
    Ok(checks)
}

/// Lengths of the first `k` complete rising and falling runs that start
/// after 0. Runs after a switch time of a zigzag are independent with
/// their exponential laws, so this selection is unbiased.
fn runs_after_zero(path: &PlPath<f64>, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let runs = path.runs();
    let complete = &runs[..runs.len().saturating_sub(1)];
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for r in complete.iter().filter(|r| r.start > 0.0) {
        let v = if r.rising { &mut up } else { &mut down };
        if v.len() < k {
            v.push(r.len());
        }
    }
    if up.len() < k || down.len() < k {
        return Err(invalid("window too short for the requested runs"));
    }
    Ok((up, down))
}

pub fn zigzag(ctx: &Context) -> Result<Vec<Check>> {
    let (l0, l1) = (1.0, 2.0);
    let spec = ZigzagSpec::new(l0, l1)?;
    let tol = ctx.tol.buffer_tolerance;
    let floor = ctx.tol.p_value;
    let target = ctx.samples("zigzag_sojourns");
    let per = 4;
    let draws = par_draw(ctx.seed, 17, target.div_ceil(per), |rng| {
        let s = sample_zigzag(&spec, 0.0, 40.0, Some(tol), rng)?;
        runs_after_zero(&s.transformed()?, per)
    })?;
    let up: Vec<f64> = draws.iter().flat_map(|d| d.0.iter().copied()).collect();
    let down: Vec<f64> = draws.iter().flat_map(|d| d.1.iter().copied()).collect();
    let w = par_draw(ctx.seed, 18, target, |rng| sample_zigzag(&spec, 0.0, 0.5, Some(tol), rng)?.carrier_at_origin())?;
    let n = w.len() as f64;
    let atom_hat = w.iter().filter(|&&x| x == 0.0).count() as f64 / n;
    let atom = spec.carrier_atom();
    let atom_se = (atom * (1.0 - atom) / n).sqrt();
    let mean_hat = w.iter().sum::<f64>() / n;
    let var_hat = w.iter().map(|x| (x - mean_hat).powi(2)).sum::<f64>() / (n - 1.0);
    let mean = spec.carrier_mean();
    let mean_se = (var_hat / n).sqrt();
    let sigma = ctx.tol.sigma;
    Ok(vec![
        ks_check(format!("KS p, rising runs of TS vs Exp({l0}), n={}", up.len()), &up, exp_cdf(l0), floor)?,
        ks_check(format!("KS p, falling runs of TS vs Exp({l1}), n={}", down.len()), &down, exp_cdf(l1), floor)?,
        Check::below("|P(W_0=0) - atom| / se", (atom_hat - atom).abs() / atom_se, sigma)
            .with(json!({"estimate": atom_hat, "exact": atom})),
        Check::below("|E W_0 - mean| / se", (mean_hat - mean).abs() / mean_se, sigma)
            .with(json!({"estimate": mean_hat, "exact": mean})),
    ])
}

pub fn scaling(ctx: &Context) -> Result<Vec<Check>> {
    let floor = ctx.tol.p_value;
    let (eps, c): (f64, f64) = (0.01, 1.0);
    let p = (1.0 - eps * c) / 2.0;
    let steps = (1.0 / (eps * eps)).round() as usize;
    let n = ctx.samples("scaling");
    let s1 = par_draw(ctx.seed, 19, n, |rng| {
        let mut s = 0i64;
        let after: Vec<i64> = (0..steps)
            .map(|_| {
                s += if rng.random_bool(p) { -1 } else { 1 };
                s
            })
            .collect();
        let x = rescale_path(&LatticePath::from_origin(&after)?, eps, eps * eps)?.at(1.0)?;
        // S_N sits on a lattice of spacing 2 eps; spread each atom over its cell
        Ok((x, x + eps * (2.0 * rng.random::<f64>() - 1.0)))
    })?;
    let normal = Normal::new(c, 1.0).map_err(|e| invalid(e.to_string()))?;
    let (raw, smooth): (Vec<f64>, Vec<f64>) = s1.into_iter().unzip();
    let raw_ks = ks_test(&raw, |x| normal.cdf(x))?;
    let t = ks_test(&smooth, |x| normal.cdf(x))?;
    let mut checks = vec![Check::above(format!("KS p, S_1 vs Normal({c},1), eps={eps}"), t.p_value, floor)
        .with(json!({"dequantized": t, "lattice": raw_ks}))];
    // Markov sites with switch probabilities eps * rate; time scaled by eps
    let (l0, l1) = (1.0, 2.0);
    let (p0, p1) = ZigzagSpec::new(l0, l1)?.markov_approximation(eps)?;
    let want = ctx.samples("markov_sojourns");
    let mut rng = stream(ctx.seed, 20);
    let mut sites = Vec::new();
    let (mut up, mut down) = (Vec::new(), Vec::new());
    let mut state = 0u8;
    while up.len() < want || down.len() < want {
        sites = markov_run(p0, p1, state, 200_000, &mut rng);
        state = *sites.last().unwrap();
        let cfg = BinaryConfiguration::finite(1, sites.clone())?;
        let path = rescale_path(&encode_path(&cfg)?, eps, eps)?;
        let runs = path.runs();
        for r in &runs[1..runs.len() - 1] {
            let v = if r.rising { &mut up } else { &mut down };
            if v.len() < want {
                v.push(r.len());
            }
        }
    }
    drop(sites);
    checks.push(ks_check(format!("KS p, rescaled Markov rising runs vs Exp({l0}), n={want}"), &up, exp_cdf(l0), floor)?);
    checks.push(ks_check(format!("KS p, rescaled Markov falling runs vs Exp({l1}), n={want}"), &down, exp_cdf(l1), floor)?);
    Ok(checks)
}

pub fn conditioned_walk(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.f64_or("p", 0.3);
    let m = ctx.usize_or("m", 6);
    let horizon = ctx.usize_or("horizon", 2 * m);
    let n = ctx.samples("conditioned_walk");
    ConditionedWalks::new(p, m, horizon)?;
    let walker = || ConditionedWalks::new(p, m, horizon).expect("checked");
    let (a, wa) = par_draw_with(ctx.seed, 21, n, walker, |w, rng| Ok(w.sample_floor(rng)))?;
    let (b, wb) = par_draw_with(ctx.seed, 22, n, walker, |w, rng| Ok(w.sample_reflected(rng)))?;
    let rate = |ws: &[ConditionedWalks], k: usize| {
        let acc: u64 = ws.iter().map(|w| w.accepted[k]).sum();
        let att: u64 = ws.iter().map(|w| w.attempts[k]).sum();
        acc as f64 / att.max(1) as f64
    };
    let cells = 1 << m;
    let ha = histogram(a, cells);
    let hb = histogram(b, cells);
    let t = chi_square_two_sample(&ha, &hb)?;
    let exact_a = floor_window_law(p, m)?;
    let exact_b = reflected_window_law(p, m)?;
    let ta = chi_square_test(&ha, &exact_a)?;
    let tb = chi_square_test(&hb, &exact_b)?;
    let floor = ctx.tol.p_value;
    Ok(vec![
        Check::above(format!("two-sample chi-square p, first {m} steps, p={p}"), t.p_value, floor).with(json!({
            "test": t,
            "acceptance": [rate(&wa, 0), rate(&wb, 1)],
            "accepted": n,
        })),
        Check::above("chi-square p, conditioned walk vs exact law", ta.p_value, floor).with(json!(ta)),
        Check::above("chi-square p, reflected walk vs exact law", tb.p_value, floor).with(json!(tb)),
        Check::below("TV between exact window laws", tv_vectors(&exact_a, &exact_b)?, ctx.tol.exact_tv),
    ])
}

pub fn palm(ctx: &Context) -> Result<Vec<Check>> {
    let n = ctx.samples("palm");
    let floor = ctx.tol.p_value;
    let tol = ctx.tol.buffer_tolerance;
    // discrete: Markov sites conditioned on a local maximum at 0
    let (p0, p1) = (0.2, 0.4);
    let (lo, hi) = (-3i64, 3i64);
    let law = palm_window_law(p0, p1, lo, hi)?;
    let codes = par_draw(ctx.seed, 23, n, |rng| {
        let x = sample_palm_markov(p0, p1, -16, 96, Some(tol), rng)?;
        let (y, _) = palm_transform(&x)?;
        let bits = (lo..=hi).map(|k| y.get(k).ok_or_else(|| invalid("image window too short"))).collect::<Result<Vec<u8>>>()?;
        Ok(code_of(bits))
    })?;
    let t = chi_square_test(&histogram(codes, law.len()), &law)?;
    let mut checks =
        vec![Check::above(format!("chi-square p, sites {lo}..{hi} of the stepped Palm law"), t.p_value, floor).with(json!(t))];
    // continuous: zigzag with a local maximum at 0
    let (l0, l1) = (1.0, 2.0);
    let spec = ZigzagSpec::new(l0, l1)?;
    let around = |path: &PlPath<f64>| -> Result<[f64; 3]> {
        let runs = path.runs();
        let i = runs.iter().position(|r| r.start == 0.0).ok_or_else(|| invalid("no run starts at 0"))?;
        if i == 0 || i + 2 >= runs.len() || runs[i].rising || !runs[i - 1].rising {
            return Err(invalid("0 is not an interior local maximum"));
        }
        Ok([runs[i - 1].len(), runs[i].len(), runs[i + 1].len()])
    };
    let stepped = par_draw(ctx.seed, 24, n, |rng| {
        let s = sample_zigzag_palm(&spec, -40.0, 40.0, Some(tol), rng)?;
        around(&s.palm_step()?.0)
    })?;
    let fresh = par_draw(ctx.seed, 25, n, |rng| around(&sample_zigzag_palm(&spec, -40.0, 40.0, None, rng)?.path))?;
    for (i, name, rate) in [(0, "rising run ending at 0", l0), (1, "falling run from 0", l1), (2, "next rising run", l0)] {
        let xs: Vec<f64> = stepped.iter().map(|d| d[i]).collect();
        checks.push(ks_check(format!("KS p, {name} vs Exp({rate})"), &xs, exp_cdf(rate), floor)?);
        let ys: Vec<f64> = fresh.iter().map(|d| d[i]).collect();
        let t = ks_two_sample(&xs, &ys)?;
        checks.push(Check::above(format!("two-sample KS p, {name} vs unstepped Palm sample"), t.p_value, floor).with(json!(t)));
    }
    Ok(checks)
}
