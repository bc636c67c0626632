//! Measurement deferral: a per-step rewritable machine measures after every
//! symbol; the deferred version diverts halting amplitude into shadow states
//! and measures only once at the end. The two machines produce the same
//! accept/reject probabilities, and the diverted branches stay orthogonal.

use std::collections::BTreeMap;

use qfa_advice::advice::QuantAdvice;
use qfa_advice::linalg::{random_unitary, C};
use qfa_advice::rewritable::{rqfa_run, MeasureMode, RewritableQfa, DEFAULT_CAP};
use qfa_advice::transforms::defer_measurement;
use qfa_advice::zoo::enumerate_strings;
use qfa_advice::Result;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let machine = RewritableQfa {
        states: vec!["q0".into(), "q1".into(), "q2".into()],
        input_alphabet: vec!["a".into(), "b".into()],
        advice_alphabet: vec!["0".into(), "1".into()],
        local_unitaries: [
            ("a".to_string(), random_unitary(6, &mut rng)),
            ("b".to_string(), random_unitary(6, &mut rng)),
        ]
        .into_iter()
        .collect(),
        last_unitaries: BTreeMap::new(),
        position_overrides: BTreeMap::new(),
        initial: 0,
        accepting: [1].into_iter().collect(),
        rejecting: [2].into_iter().collect(),
        measure_mode: MeasureMode::PerStep,
        cap: DEFAULT_CAP,
    };

    // Random normalized advice vector per length.
    let alphabet = vec!["0".to_string(), "1".to_string()];
    let mut table = BTreeMap::new();
    for n in 0..=3usize {
        let support = enumerate_strings(&alphabet, n);
        let mut amps: Vec<C> = (0..support.len())
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        table.insert(n, support.into_iter().zip(amps).collect());
    }
    let phi = QuantAdvice { alphabet, table };

    let deferred = defer_measurement(&machine, &phi)?;
    deferred.machine.validate()?;
    println!(
        "deferred machine: {} states ({} shadows), measure mode {:?}",
        deferred.machine.states.len(),
        deferred.shadow_states.len(),
        deferred.machine.measure_mode
    );

    let sigma = vec!["a".to_string(), "b".to_string()];
    let mut worst: f64 = 0.0;
    for n in 0..=3usize {
        for x in enumerate_strings(&sigma, n) {
            let a = rqfa_run(&machine, &x, &phi)?;
            let b = rqfa_run(&deferred.machine, &x, &deferred.advice)?;
            worst = worst
                .max((a.p_acc - b.p_acc).abs())
                .max((a.p_rej - b.p_rej).abs());
        }
    }
    println!("worst probability gap between per-step and deferred runs: {worst:.2e}");
    assert!(worst < 1e-9);
    Ok(())
}
