//! One-coin probabilistic machines with randomized advice: the Pal# fixture
//! decides marked palindromes with one-sided error — members are accepted
//! with probability 1, non-members with probability at most 1/2.

use qfa_advice::advice::{run_with_randomized_advice, Machine};
use qfa_advice::zoo::{enumerate_strings, fixture_pal_hash, membership, NamedLanguage};
use qfa_advice::Result;

fn main() -> Result<()> {
    let (machine, advice) = fixture_pal_hash(9);
    let m = Machine::Pfa(machine);
    let sigma = NamedLanguage::PalHash.alphabet();

    let mut members = 0;
    let mut others = 0;
    let mut worst_other: f64 = 0.0;
    for n in 1..=5usize {
        for x in enumerate_strings(&sigma, n) {
            let out = run_with_randomized_advice(&m, &advice, &x)?;
            if membership(NamedLanguage::PalHash, &x)? {
                assert!((out.p_acc - 1.0).abs() < 1e-12, "member {x:?}: {}", out.p_acc);
                members += 1;
            } else {
                assert!(out.p_acc <= 0.5 + 1e-12, "non-member {x:?}: {}", out.p_acc);
                worst_other = worst_other.max(out.p_acc);
                others += 1;
            }
        }
    }
    println!("Pal#: {members} members at p_acc=1, {others} non-members at p_acc<=1/2");
    println!("largest non-member acceptance probability: {worst_other}");
    Ok(())
}
