//! Error amplification by majority vote: run k independent copies of a
//! bounded-error machine in tensor product and accept with the majority.
//! The residual error is the binomial tail sum_{i > k/2} C(k,i) e^i (1-e)^{k-i}.

use qfa_advice::rewritable::rqfa_run;
use qfa_advice::transforms::{amplify, amplify_k, majority_failure_tail};
use qfa_advice::zoo::coin_machine;
use qfa_advice::Result;

fn main() -> Result<()> {
    let eps0 = 0.25;
    let (machine, advice) = coin_machine(eps0);
    let x = vec!["a".to_string()];
    let base = rqfa_run(&machine, &x, &advice)?;
    println!("source machine error on members: {}", base.p_rej);

    for target in [0.20, 0.15, 0.10] {
        let k = amplify_k(eps0, target)?;
        let tail = majority_failure_tail(k, eps0);
        let (amp, phi, k2) = amplify(&machine, &advice, eps0, target)?;
        assert_eq!(k, k2);
        let out = rqfa_run(&amp, &x, &phi)?;
        println!(
            "target {target:.2}: k={k} copies, predicted tail {tail:.12}, measured error {:.12}",
            out.p_rej
        );
        assert!((out.p_rej - tail).abs() < 1e-12);
        assert!(tail <= target);
    }
    Ok(())
}
