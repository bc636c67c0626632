//! The "agreement" construction: a quantum machine over track pairs whose
//! acceptance probability on input x is 1/2 + D_n(x)/2, where D_n(x) is the
//! squared overlap between x and the advice distribution for length n.
//! Members of the encoded language get probability above 1/2, non-members
//! exactly 1/2.

use qfa_advice::advice::{run_with_randomized_advice, Machine};
use qfa_advice::zoo::{enumerate_strings, fixture_all_random_with_table};
use qfa_advice::Result;

fn main() -> Result<()> {
    let (machine, advice, table) = fixture_all_random_with_table(42, 4);
    let m = Machine::Qfa(machine);
    let sigma = vec!["0".to_string(), "1".to_string()];

    for n in 1..=4usize {
        let members = &table[&n];
        let k = members.len() as f64;
        for x in enumerate_strings(&sigma, n) {
            let out = run_with_randomized_advice(&m, &advice, &x)?;
            let d = if members.contains(&x) { 1.0 / k } else { 0.0 };
            let expect = 0.5 + d / 2.0;
            assert!(
                (out.p_acc - expect).abs() < 1e-12,
                "{x:?}: p_acc={} expected {expect}",
                out.p_acc
            );
        }
        println!(
            "n={n}: {} members, member p_acc = {:.6}, non-member p_acc = 0.5",
            members.len(),
            0.5 + 0.5 / k
        );
    }
    println!("all acceptance probabilities match 1/2 + D_n(x)/2 exactly");
    Ok(())
}
