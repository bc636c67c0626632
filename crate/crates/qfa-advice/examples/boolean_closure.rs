//! Boolean closure of final-measurement rewritable machines: tensor product
//! for intersection, accept/reject swap for complement, and a De Morgan
//! composition for union. Acceptance probabilities compose as p1*p2,
//! 1-p, and p1 + p2 - p1*p2 respectively.

use qfa_advice::rewritable::{
    rqfa_complement, rqfa_product, rqfa_run, rqfa_union, tensor_advice,
};
use qfa_advice::zoo::coin_machine;
use qfa_advice::Result;

fn main() -> Result<()> {
    let (m1, phi1) = coin_machine(0.2);
    let (m2, phi2) = coin_machine(0.35);
    let x = vec!["a".to_string()];
    let p1 = rqfa_run(&m1, &x, &phi1)?.p_acc;
    let p2 = rqfa_run(&m2, &x, &phi2)?.p_acc;
    println!("component machines: p1={p1}, p2={p2}");

    let phi12 = tensor_advice(&[&phi1, &phi2])?;

    let and = rqfa_product(&m1, &m2)?;
    let p_and = rqfa_run(&and, &x, &phi12)?.p_acc;
    println!("product:    p={p_and} (expected {})", p1 * p2);
    assert!((p_and - p1 * p2).abs() < 1e-12);

    let not1 = rqfa_complement(&m1)?;
    let p_not = rqfa_run(&not1, &x, &phi1)?.p_acc;
    println!("complement: p={p_not} (expected {})", 1.0 - p1);
    assert!((p_not - (1.0 - p1)).abs() < 1e-12);

    let or = rqfa_union(&m1, &m2)?;
    let p_or = rqfa_run(&or, &x, &phi12)?.p_acc;
    let want = p1 + p2 - p1 * p2;
    println!("union:      p={p_or} (expected {want})");
    assert!((p_or - want).abs() < 1e-12);
    Ok(())
}
