//! Run named verification suites from code instead of the CLI.
//!
//!     cargo run --release --example verify -- fifteen-site gibbs-invariance

use boxball::harness::{run_suite, suite_names, Context, Tolerances};

fn main() -> boxball::Result<()> {
    let names: Vec<String> = std::env::args().skip(1).collect();
    if names.is_empty() {
        for (name, what) in suite_names() {
            println!("{name:18} {what}");
        }
        return Ok(());
    }
    let ctx = Context::new(0, Tolerances::defaults());
    for name in names {
        for report in run_suite(&name, &ctx)? {
            for check in &report.checks {
                println!("  {}", check.line());
            }
            println!("{}", report.summary());
        }
    }
    Ok(())
}
