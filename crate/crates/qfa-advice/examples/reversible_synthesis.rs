//! Constructive synthesis: from a bounded-horizon membership oracle, build
//! the per-length continuation classes, check the backward-determinism
//! condition, and emit a reversible automaton plus deterministic advice that
//! decides the language up to the horizon. When the condition fails the
//! checker returns a concrete counterexample instead.

use qfa_advice::advice::run_with_det_advice;
use qfa_advice::synthesis::{
    build_classes, check_condition_a, synthesize_rfa, ConditionA, LanguageOracle,
};
use qfa_advice::zoo::{enumerate_strings, NamedLanguage};
use qfa_advice::Result;

fn main() -> Result<()> {
    let horizon = 6;
    let oracle = LanguageOracle::builtin(NamedLanguage::La, horizon);
    let table = build_classes(&oracle, horizon)?;
    println!(
        "L_a: {} continuation classes over horizon {horizon}",
        table.d
    );
    assert!(matches!(check_condition_a(&table), ConditionA::Holds));

    let (machine, advice) = synthesize_rfa(&table)?;
    println!(
        "synthesized reversible automaton with {} states",
        machine.states.len()
    );
    let m = qfa_advice::advice::Machine::Dfa(machine);
    let sigma = vec!["a".to_string(), "b".to_string()];
    let mut checked = 0;
    for n in 1..=horizon {
        for x in enumerate_strings(&sigma, n) {
            let out = run_with_det_advice(&m, &advice, &x)?;
            let want = oracle.member(&x)?;
            assert_eq!(out.p_acc == 1.0, want, "disagreement on {x:?}");
            checked += 1;
        }
    }
    println!("machine agrees with the oracle on all {checked} strings");

    // {0^m 1^n} is not reversibly decidable: the class structure violates
    // backward determinism and the checker produces a witness.
    let bad = LanguageOracle::builtin(NamedLanguage::ZerosOnes, 8);
    let bad_table = build_classes(&bad, 8)?;
    match check_condition_a(&bad_table) {
        ConditionA::Holds => unreachable!("{{0^m 1^n}} should fail"),
        ConditionA::Counterexample(c) => {
            println!(
                "{{0^m 1^n}} fails at n={}: prefixes {} and {} merge on '{}'",
                c.n,
                c.x.join(""),
                c.y.join(""),
                c.sigma
            );
        }
    }
    Ok(())
}
