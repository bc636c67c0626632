//! Endmarker elimination: rewrite a measure-many machine so it needs no
//! right endmarker (double-sweep trick on the last symbol), then fold the
//! left endmarker into the initial configuration. Both passes preserve the
//! accept/reject probabilities on every input.

use qfa_advice::advice::{run_with_randomized_advice, Machine};
use qfa_advice::machines::qfa_validate;
use qfa_advice::transforms::{drop_left_endmarker, drop_right_endmarker_rand};
use qfa_advice::zoo::{enumerate_strings, fixture_all_random_with_table};
use qfa_advice::Result;

fn main() -> Result<()> {
    let (machine, advice, _) = fixture_all_random_with_table(7, 4);
    println!(
        "source machine: {} states, endmarkers (left={}, right={})",
        machine.states.len(),
        machine.endmarkers.left,
        machine.endmarkers.right
    );

    let (no_dollar, advice2) = drop_right_endmarker_rand(&machine, &advice)?;
    assert!(qfa_validate(&no_dollar).is_empty());
    let bare = drop_left_endmarker(&no_dollar)?;
    assert!(qfa_validate(&bare).is_empty());
    println!(
        "after elimination: {} states, endmarkers (left={}, right={})",
        bare.states.len(),
        bare.endmarkers.left,
        bare.endmarkers.right
    );

    let m1 = Machine::Qfa(machine);
    let m2 = Machine::Qfa(bare);
    let sigma = vec!["0".to_string(), "1".to_string()];
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=4usize {
        for x in enumerate_strings(&sigma, n) {
            let a = run_with_randomized_advice(&m1, &advice, &x)?;
            let b = run_with_randomized_advice(&m2, &advice2, &x)?;
            worst = worst
                .max((a.p_acc - b.p_acc).abs())
                .max((a.p_rej - b.p_rej).abs());
            checked += 1;
        }
    }
    println!("compared {checked} inputs, worst probability gap {worst:.2e}");
    assert!(worst < 1e-9);
    Ok(())
}
