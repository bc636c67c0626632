//! Randomized property suite for the halting-space norm identities and
//! inequalities that underpin the bounded-error analysis. Identities are
//! exact up to floating-point residue; inequalities must hold with
//! non-negative slack. Entries suffixed `_stated` track looser textbook
//! variants for reference and are excluded from the aggregate.

use qfa_advice::analysis::norm_property_suite;

fn main() {
    let report = norm_property_suite(2..=8, 0..=6, 2000, 7);
    println!(
        "trials={} seed={} failures={}",
        report.trials, report.seed, report.failures
    );
    println!("max identity residual:  {:.3e}", report.max_identity_residual);
    println!("max inequality slack violation: {:.3e}", report.max_slack_violation);
    for (name, value) in &report.per_property {
        println!("  {name:<22} {value:+.3e}");
    }
    assert_eq!(report.failures, 0);
    assert!(report.max_identity_residual < 1e-9);
    assert!(report.max_slack_violation < 1e-9);
}
