//! Command-line front end. [`run`] parses arguments, dispatches, writes
//! records and returns the process exit code: 0 pass, 1 scenario failure,
//! 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::continuum::path::{pl_running_max, PlPath};
use crate::continuum::zigzag::{sample_zigzag, ZigzagSpec};
use crate::error::{Error, Result};
use crate::exactdist::limit_convergence_report;
use crate::exactdist::table::{code_string, enumerate_gibbs, pushforward_t, tv_distance, ENUMERATION_CUTOFF};
use crate::exactdist::transfer::PeriodicFamily;
use crate::harness::record::{RecordWriter, RunRecord};
use crate::harness::render::{common_window, render_path_svg, render_rows};
use crate::harness::scenario::Context;
use crate::harness::suites::{run_suite, suite_names};
use crate::harness::tolerances::Tolerances;
use crate::lattice::{encode_path, running_max, transform, BinaryConfiguration, Boundary, LatticePath, LeftPolicy};
use crate::rng::stream;
use crate::samplers::{sample_spec, MeasureSpec};
use crate::solitons::soliton_counts;
use crate::toda::{toda_invariants, toda_step_via_path, TodaState};

#[derive(Debug, Parser)]
#[command(name = "boxball", version, about = "Box-ball system, Pitman's transform and the ultra-discrete Toda lattice")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Run seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON parameters, inline or as a file path.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Render::Text)]
    pub render: Render,
    /// Append JSONL records here instead of printing them.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Certified truncation error for left buffers.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Render {
    Text,
    Svg,
    None,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a configuration (positional, "0101|110010" style) or a sample from --spec.
    Evolve {
        config: Option<String>,
        /// Treat the positional configuration as one period of a cycle.
        #[arg(long)]
        cyclic: bool,
    },
    /// Run a verification suite; `list` prints the names.
    Verify { suite: String },
    /// Draw configurations from the measure in --spec.
    Sample {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        first: i64,
        #[arg(long, default_value_t = 40, allow_negative_numbers = true)]
        last: i64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Enumerate a periodic Gibbs law and check it against its T-image.
    Exact,
    /// Window marginals of a periodic family against the infinite-volume limit.
    Limits {
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, value_delimiter = ',', default_value = "50,200,800,2000")]
        grid: Vec<usize>,
    },
    /// Iterate a Toda state given in --spec as {"Q": [...], "E": [...], "periodic": .., "L": ..}.
    Toda,
    /// Sample a zigzag path from --spec {"lambda0": .., "lambda1": .., "last": ..} and transform it.
    Continuum,
}

/// Usage problems map to exit code 2; everything the library rejects as
/// invalid input is a usage problem too.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Entry point used by the binary. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let go = || dispatch(&cli);
    let result = match cli.global.workers {
        Some(0) => Err(usage("--workers must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(usage(e.to_string())),
        },
        None => go(),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_spec(g: &Global) -> std::result::Result<Option<Value>, Failure> {
    let Some(s) = &g.spec else { return Ok(None) };
    let text = if std::path::Path::new(s).is_file() {
        std::fs::read_to_string(s).map_err(|e| usage(format!("cannot read spec file {s}: {e}")))?
    } else {
        s.clone()
    };
    serde_json::from_str(&text).map(Some).map_err(|e| usage(format!("malformed --spec: {e}")))
}

fn require_spec(g: &Global, what: &str) -> std::result::Result<Value, Failure> {
    read_spec(g)?.ok_or_else(|| usage(format!("{what} needs --spec")))
}

fn typed<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> std::result::Result<T, Failure> {
    serde_json::from_value(v.clone()).map_err(|e| usage(format!("--spec is not a valid {what}: {e}")))
}

fn buffer_tolerance(g: &Global) -> f64 {
    g.tolerance.unwrap_or_else(|| Tolerances::defaults().buffer_tolerance)
}

fn dispatch(cli: &Cli) -> std::result::Result<i32, Failure> {
    let g = &cli.global;
    let mut writer = RecordWriter::open(g.out.as_deref())?;
    match &cli.command {
        Command::Evolve { config, cyclic } => cmd_evolve(g, config.as_deref(), *cyclic, &mut writer),
        Command::Verify { suite } => cmd_verify(g, suite, &mut writer),
        Command::Sample { first, last, count } => cmd_sample(g, *first, *last, *count, &mut writer),
        Command::Exact => cmd_exact(g, &mut writer),
        Command::Limits { window, grid } => cmd_limits(g, *window, grid, &mut writer),
        Command::Toda => cmd_toda(g, &mut writer),
        Command::Continuum => cmd_continuum(g, &mut writer),
    }
}

/// Origin-marked string of a configuration's window.
pub fn config_string(c: &BinaryConfiguration) -> String {
    let digits: String = c.sites().iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
    if c.is_cyclic() || c.first() == 1 {
        return digits;
    }
    if c.first() > 1 {
        return format!("|{}{digits}", "0".repeat((c.first() - 1) as usize));
    }
    let split = (1 - c.first()) as usize;
    if split >= digits.len() {
        return format!("{digits}{}|", "0".repeat(split - digits.len()));
    }
    format!("{}|{}", &digits[..split], &digits[split..])
}

fn path_json(p: &LatticePath) -> Value {
    json!({"start": p.start(), "values": p.values()})
}

fn cmd_evolve(g: &Global, config: Option<&str>, cyclic: bool, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let steps = g.steps.unwrap_or(2);
    let spec = read_spec(g)?;
    let x0 = match (config, &spec) {
        (Some(s), None) => {
            let b = if cyclic { Boundary::Cyclic } else { Boundary::FiniteSupport };
            BinaryConfiguration::parse_with(s, b)?
        }
        (None, Some(v)) => {
            let m: MeasureSpec = typed(v, "measure spec")?;
            m.validate(true)?;
            let mut rng = stream(g.seed, 0);
            sample_spec(&m, 1, 60, buffer_tolerance(g), &mut rng)?
        }
        _ => return Err(usage("evolve takes either a configuration or --spec, not both or neither")),
    };
    if x0.is_cyclic() {
        x0.check_cyclic_density()?;
    }
    let mut rows = vec![x0];
    for _ in 0..steps {
        let next = transform(rows.last().unwrap())?;
        rows.push(next);
    }
    // the image of a finite configuration may reach past the input window
    let (lo, hi) = if rows[0].is_cyclic() {
        (1, rows[0].len() as i64)
    } else if matches!(rows[0].boundary(), Boundary::FiniteSupport) {
        let (a, b) = common_window(&rows);
        (a.min(rows[0].first()), b.max(rows[0].last()))
    } else {
        let last = rows.last().unwrap();
        (last.first().max(1), last.last())
    };
    match g.render {
        Render::Text => print!("{}", render_rows(&rows, lo, hi)),
        Render::Svg => {
            let paths = rows
                .iter()
                .map(|r| Ok(PlPath::<f64>::from_lattice(&encode_path(r)?)))
                .collect::<Result<Vec<_>>>()?;
            let first = encode_path(&rows[0])?;
            let policy = evolve_policy(&rows[0]);
            let m = running_max(&first, policy)?;
            let times = (first.start()..=first.end()).map(|t| t as f64).collect();
            let overlay = PlPath::new(times, m.iter().map(|&x| x as f64).collect())?;
            print!("{}", render_path_svg(&paths, &[overlay])?);
        }
        Render::None => {}
    }
    let outputs = json!({
        "rows": rows.iter().map(config_string).collect::<Vec<_>>(),
        "window": [lo, hi],
        "profiles": rows.iter().filter(|r| r.is_cyclic()).map(|r| soliton_counts(r).as_slice().to_vec()).collect::<Vec<_>>(),
        "paths": rows.iter().map(|r| encode_path(r).map(|p| path_json(&p))).collect::<Result<Vec<_>>>()?,
    });
    let spec_json = json!({"config": config, "cyclic": cyclic, "measure": spec, "steps": steps});
    w.write(&RunRecord::new("evolve", Some(g.seed), spec_json, outputs))?;
    Ok(0)
}

fn evolve_policy(x: &BinaryConfiguration) -> LeftPolicy {
    match x.boundary() {
        Boundary::Cyclic => LeftPolicy::Cyclic,
        Boundary::FiniteSupport => LeftPolicy::FiniteSupport,
        _ => LeftPolicy::Buffered,
    }
}

fn cmd_verify(g: &Global, suite: &str, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    if suite == "list" {
        for (name, about) in suite_names() {
            println!("{name:18} {about}");
        }
        return Ok(0);
    }
    let params = read_spec(g)?.unwrap_or(Value::Null);
    let mut tol = Tolerances::defaults();
    if let Some(t) = g.tolerance {
        tol.buffer_tolerance = t;
    }
    let ctx = Context { seed: g.seed, tol, params: params.clone() };
    let reports = run_suite(suite, &ctx)?;
    let mut all = true;
    for r in &reports {
        if g.render != Render::None {
            for c in &r.checks {
                eprintln!("  {}", c.line());
            }
            eprintln!("{}", r.summary());
        }
        all &= r.pass;
        w.write(&RunRecord::new("verify", Some(g.seed), json!({"suite": r.suite, "params": params}), serde_json::to_value(r)?))?;
    }
    Ok(if all { 0 } else { 1 })
}

fn cmd_sample(g: &Global, first: i64, last: i64, count: usize, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let v = require_spec(g, "sample")?;
    let m: MeasureSpec = typed(&v, "measure spec")?;
    m.validate(false)?;
    if first > last {
        return Err(usage(format!("--first {first} is after --last {last}")));
    }
    let tol = buffer_tolerance(g);
    let mut rng = stream(g.seed, 0);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let x = sample_spec(&m, first, last, tol, &mut rng)?;
        // report the requested window, or the whole cycle
        let shown = if x.is_cyclic() { x.clone() } else { x.restrict(first, last)? };
        if g.render == Render::Text {
            println!("{}", shown.render_row(shown.first(), shown.last()));
        }
        samples.push(config_string(&shown));
    }
    let spec_json = json!({"measure": v, "first": first, "last": last, "count": count, "tolerance": tol});
    w.write(&RunRecord::new("sample", Some(g.seed), spec_json, json!({"samples": samples})))?;
    Ok(0)
}

fn cmd_exact(g: &Global, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let v = require_spec(g, "exact")?;
    let m: MeasureSpec = typed(&v, "measure spec")?;
    m.validate(false)?;
    let (n, beta) = m.gibbs()?;
    let t = enumerate_gibbs(n, &beta, ENUMERATION_CUTOFF)?;
    let tv = tv_distance(&t, &pushforward_t(&t)?)?;
    if g.render == Render::Text {
        for (&c, &p) in t.support.iter().zip(&t.probs) {
            println!("{} {p:.6e}", code_string(c, n));
        }
        println!("TV(law, T-image) = {tv:.3e}");
    }
    w.write(&RunRecord::new("exact", None, v, json!({"table": t.to_record(), "tv_pushforward": tv})))?;
    Ok(0)
}

fn cmd_limits(g: &Global, window: usize, grid: &[usize], w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let v = require_spec(g, "limits")?;
    let family = match serde_json::from_value::<PeriodicFamily>(v.clone()) {
        Ok(f) => f,
        Err(_) => PeriodicFamily::from_spec(&typed::<MeasureSpec>(&v, "periodic family")?)?.0,
    };
    let report = limit_convergence_report(family, window, grid)?;
    if g.render == Render::Text {
        for r in &report.rows {
            println!("N={:6} TV={:.3e}", r.n, r.tv);
        }
    }
    w.write(&RunRecord::new("limits", None, json!({"family": v, "window": window, "grid": grid}), serde_json::to_value(&report)?))?;
    Ok(0)
}

fn cmd_toda(g: &Global, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let v = require_spec(g, "toda")?;
    let s0: TodaState<f64> = typed(&v, "Toda state")?;
    s0.validate()?;
    let steps = g.steps.unwrap_or(1);
    let mut states = vec![s0.clone()];
    let mut shifts = Vec::new();
    for _ in 0..steps {
        let cur = states.last().unwrap();
        let next = cur.step()?;
        let (_, tau) = toda_step_via_path(cur)?;
        shifts.push(tau);
        states.push(next);
    }
    if g.render == Render::Text {
        for s in &states {
            println!("Q={:?} E={:?}", s.q, s.e);
        }
    }
    let inv = toda_invariants(&s0)?;
    w.write(&RunRecord::new(
        "toda",
        None,
        json!({"state": v, "steps": steps}),
        json!({"states": states, "shifts": shifts, "invariants": inv}),
    ))?;
    Ok(0)
}

fn cmd_continuum(g: &Global, w: &mut RecordWriter) -> std::result::Result<i32, Failure> {
    let v = require_spec(g, "continuum")?;
    let get = |k: &str, d: Option<f64>| -> std::result::Result<f64, Failure> {
        v.get(k).and_then(Value::as_f64).or(d).ok_or_else(|| usage(format!("continuum --spec needs \"{k}\"")))
    };
    let spec = ZigzagSpec::new(get("lambda0", None)?, get("lambda1", None)?)?;
    let last = get("last", Some(10.0))?;
    let mut rng = stream(g.seed, 0);
    let s = sample_zigzag(&spec, 0.0, last, Some(buffer_tolerance(g)), &mut rng)?;
    let ts = s.transformed()?;
    let window = s.path.restrict(0.0, last)?;
    let image = ts.restrict(0.0, last)?;
    match g.render {
        Render::Svg => {
            let m = pl_running_max(&s.path, LeftPolicy::Buffered)?.restrict(0.0, last)?;
            print!("{}", render_path_svg(&[window.clone(), image.clone()], &[m])?);
        }
        Render::Text => println!("S: {} breakpoints, TS: {} breakpoints on [0, {last}]", window.times().len(), image.times().len()),
        Render::None => {}
    }
    w.write(&RunRecord::new(
        "continuum",
        Some(g.seed),
        v.clone(),
        json!({
            "S": {"times": window.times(), "values": window.values()},
            "TS": {"times": image.times(), "values": image.values()},
            "carrier_at_origin": s.carrier_at_origin()?,
            "certificate": s.certificate,
        }),
    ))?;
    Ok(0)
}

/// Convenience for tests and examples: run with the given arguments after
/// the program name.
pub fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("boxball").chain(args.iter().copied()))
}
