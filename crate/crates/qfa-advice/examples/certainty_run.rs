//! Runs the three-state machine for L_a (strings whose n-th symbol is 'a')
//! with its deterministic advice and prints the exact outcome for every
//! input up to length 6. With the right advice the machine answers with
//! certainty: every probability is exactly 0 or 1.

use qfa_advice::advice::{classify, run_with_det_advice};
use qfa_advice::zoo::{enumerate_strings, fixture_la};
use qfa_advice::Result;

fn main() -> Result<()> {
    let max_n = 6;
    let (machine, advice) = fixture_la(max_n);
    let m = qfa_advice::advice::Machine::Qfa(machine);
    let sigma = vec!["a".to_string(), "b".to_string()];

    let mut accepted = 0;
    let mut total = 0;
    for n in 1..=max_n {
        for x in enumerate_strings(&sigma, n) {
            let out = run_with_det_advice(&m, &advice, &x)?;
            let verdict = classify(&out, 0.0)?;
            assert!(
                out.p_acc == 1.0 || out.p_acc == 0.0,
                "expected certainty, got p_acc={} on {x:?}",
                out.p_acc
            );
            let in_lang = x.last().map(|s| s == "a").unwrap_or(false);
            assert_eq!(out.p_acc == 1.0, in_lang, "wrong answer on {x:?}");
            if out.p_acc == 1.0 {
                accepted += 1;
            }
            total += 1;
            if n <= 2 {
                println!("{:<8} p_acc={} verdict={verdict:?}", x.join(""), out.p_acc);
            }
        }
    }
    println!("checked {total} strings, {accepted} accepted, all with certainty");
    Ok(())
}
