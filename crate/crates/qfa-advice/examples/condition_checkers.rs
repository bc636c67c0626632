//! Structural checkers: the relation/condition report for an advised
//! measure-many machine, and the partial-order condition on deterministic
//! automata (a necessary condition for reversible simulation).

use qfa_advice::analysis::compute_relations;
use qfa_advice::machines::{partial_order_condition_check, PartialOrderResult};
use qfa_advice::zoo::{fixture_la, minimal_dfa_even_length, minimal_dfa_la};
use qfa_advice::Result;

fn main() -> Result<()> {
    let (machine, advice) = fixture_la(5);
    let report = compute_relations(&machine, &advice, 0.0, 0.14, 5)?;
    println!(
        "L_a relation report: c={}, measured d={}, {} levels",
        report.c,
        report.d,
        report.levels.len()
    );
    for cond in &report.conditions {
        println!(
            "  {:<14} {}",
            cond.name,
            if cond.passed { "pass" } else { "FAIL" }
        );
        assert!(cond.passed, "{:?}", cond.witness);
    }

    // The minimal DFA for L_a has a two-cycle between its states, so the
    // partial-order condition fails with an explicit witness.
    match partial_order_condition_check(&minimal_dfa_la())? {
        PartialOrderResult::Witness(w) => println!(
            "L_a minimal DFA violates the partial order: x={:?} y={:?} z={:?}",
            w.x, w.y, w.z
        ),
        PartialOrderResult::Satisfied => unreachable!("L_a DFA should fail"),
    }

    // The even-length parity DFA satisfies it.
    match partial_order_condition_check(&minimal_dfa_even_length())? {
        PartialOrderResult::Satisfied => println!("even-length DFA satisfies the partial order"),
        PartialOrderResult::Witness(w) => unreachable!("unexpected witness {w:?}"),
    }
    Ok(())
}
