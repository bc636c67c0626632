//! Advice-form conversions: randomized advice lifts to quantum advice with
//! square-root amplitudes and collapses back via |amplitude|^2. A read-only
//! machine cannot tell quantum advice from the induced distribution, so both
//! runs agree exactly.

use qfa_advice::advice::{
    run_with_quantum_advice_readonly, run_with_randomized_advice, Machine,
};
use qfa_advice::transforms::{quantum_to_randomized, randomized_to_quantum};
use qfa_advice::zoo::{enumerate_strings, random_track_qfa_with_advice};
use qfa_advice::Result;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sigma = vec!["a".to_string(), "b".to_string()];
    let mut worst_round_trip: f64 = 0.0;
    let mut worst_run_gap: f64 = 0.0;

    for _ in 0..20 {
        let (machine, dist) = random_track_qfa_with_advice(&mut rng, 3);
        let quantum = randomized_to_quantum(&dist)?;
        let back = quantum_to_randomized(&quantum)?;
        for (n, entries) in &dist.table {
            for ((y1, p1), (y2, p2)) in entries.iter().zip(&back.table[n]) {
                assert_eq!(y1, y2);
                worst_round_trip = worst_round_trip.max((p1 - p2).abs());
            }
        }
        let m = Machine::Qfa(machine);
        for n in 0..=3usize {
            for x in enumerate_strings(&sigma, n) {
                let a = run_with_randomized_advice(&m, &dist, &x)?;
                let b = run_with_quantum_advice_readonly(&m, &quantum, &x)?;
                worst_run_gap = worst_run_gap
                    .max((a.p_acc - b.p_acc).abs())
                    .max((a.p_rej - b.p_rej).abs());
            }
        }
    }
    println!("20 machines: round-trip probability drift {worst_round_trip:.2e}");
    println!("read-only quantum vs randomized run gap   {worst_run_gap:.2e}");
    assert!(worst_round_trip < 1e-12 && worst_run_gap < 1e-12);
    Ok(())
}
