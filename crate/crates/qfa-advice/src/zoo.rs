//! Built-in languages and explicit fixture machines used as golden tests
//! throughout the crate.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::advice::{track_symbol, DetAdvice, Machine, QuantAdvice, RandAdvice};
use crate::error::{QfaError, Result};
use crate::linalg::{ComplexMatrix, C};
use crate::machines::{Dfa, Endmarkers, Pfa, Qfa, Str, Symbol, LEFT_ENDMARKER, RIGHT_ENDMARKER};
use crate::rewritable::{MeasureMode, RewritableQfa, DEFAULT_CAP};

/// The paper's witness languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedLanguage {
    /// L_a = Σ*a over {a,b}.
    La,
    /// (aa+ab+ba)* over {a,b}.
    AaAbBaStar,
    /// {0^m 1^n} over {0,1}.
    ZerosOnes,
    /// Pal_# = {w#w^R : w ∈ {0,1}*} over {0,1,#}.
    PalHash,
    /// Dup = {ww : w ∈ {0,1}*} over {0,1}.
    Dup,
}

impl NamedLanguage {
    pub fn from_name(name: &str) -> Result<NamedLanguage> {
        match name {
            "L_a" => Ok(NamedLanguage::La),
            "(aa+ab+ba)*" => Ok(NamedLanguage::AaAbBaStar),
            "0m1n" => Ok(NamedLanguage::ZerosOnes),
            "Pal#" => Ok(NamedLanguage::PalHash),
            "Dup" => Ok(NamedLanguage::Dup),
            _ => Err(QfaError::ArgumentOutOfRange(format!(
                "unknown language {name:?}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedLanguage::La => "L_a",
            NamedLanguage::AaAbBaStar => "(aa+ab+ba)*",
            NamedLanguage::ZerosOnes => "0m1n",
            NamedLanguage::PalHash => "Pal#",
            NamedLanguage::Dup => "Dup",
        }
    }

    pub fn alphabet(&self) -> Vec<Symbol> {
        match self {
            NamedLanguage::La | NamedLanguage::AaAbBaStar => vec!["a".into(), "b".into()],
            NamedLanguage::ZerosOnes | NamedLanguage::Dup => vec!["0".into(), "1".into()],
            NamedLanguage::PalHash => vec!["0".into(), "1".into(), "#".into()],
        }
    }
}

/// Exact membership for a built-in language.
pub fn membership(lang: NamedLanguage, x: &[Symbol]) -> Result<bool> {
    let alphabet = lang.alphabet();
    for s in x {
        if !alphabet.contains(s) {
            return Err(QfaError::UnknownSymbol(s.clone()));
        }
    }
    Ok(match lang {
        NamedLanguage::La => x.last().map(|s| s == "a").unwrap_or(false),
        NamedLanguage::AaAbBaStar => {
            // DP over even prefixes: reachable(i) means x[..i] is in the language.
            let n = x.len();
            let mut reach = vec![false; n + 1];
            reach[0] = true;
            for i in 0..n.saturating_sub(1) {
                if reach[i] {
                    let pair = format!("{}{}", x[i], x[i + 1]);
                    if pair != "bb" {
                        reach[i + 2] = true;
                    }
                }
            }
            reach[n]
        }
        NamedLanguage::ZerosOnes => {
            let first_one = x.iter().position(|s| s == "1").unwrap_or(x.len());
            x[first_one..].iter().all(|s| s == "1")
        }
        NamedLanguage::PalHash => {
            let hashes: Vec<usize> = (0..x.len()).filter(|&i| x[i] == "#").collect();
            if hashes.len() != 1 {
                false
            } else {
                let m = hashes[0];
                let (w, rest) = (&x[..m], &x[m + 1..]);
                w.len() == rest.len() && w.iter().eq(rest.iter().rev())
            }
        }
        NamedLanguage::Dup => {
            x.len() % 2 == 0 && x[..x.len() / 2] == x[x.len() / 2..]
        }
    })
}

/// All strings of a given length over an alphabet, in lexicographic order.
pub fn enumerate_strings(alphabet: &[Symbol], n: usize) -> Vec<Str> {
    let mut out: Vec<Str> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for prefix in &out {
            for s in alphabet {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Members of the language at each length up to `max_n`.
pub fn language_table(lang: NamedLanguage, max_n: usize) -> Result<BTreeMap<usize, Vec<Str>>> {
    let mut table = BTreeMap::new();
    for n in 0..=max_n {
        let members: Vec<Str> = enumerate_strings(&lang.alphabet(), n)
            .into_iter()
            .filter(|x| membership(lang, x).unwrap())
            .collect();
        table.insert(n, members);
    }
    Ok(table)
}

/// Minimal DFA for L_a = Σ*a (two states; violates the partial order
/// condition).
pub fn minimal_dfa_la() -> Dfa {
    // State 0: last symbol was not 'a' (initial); state 1: last symbol was 'a'.
    let mut delta = BTreeMap::new();
    for q in 0..2usize {
        delta.insert((q, "a".to_string()), 1);
        delta.insert((q, "b".to_string()), 0);
    }
    Dfa {
        states: vec!["s_b".into(), "s_a".into()],
        input_alphabet: vec!["a".into(), "b".into()],
        endmarkers: Endmarkers::NONE,
        delta,
        initial: 0,
        accepting: [1].into_iter().collect(),
        rejecting: [0].into_iter().collect(),
    }
}

/// Minimal DFA for even-length strings over {a,b} (a permutation automaton;
/// satisfies the partial order condition).
pub fn minimal_dfa_even_length() -> Dfa {
    let mut delta = BTreeMap::new();
    for q in 0..2usize {
        delta.insert((q, "a".to_string()), 1 - q);
        delta.insert((q, "b".to_string()), 1 - q);
    }
    Dfa {
        states: vec!["even".into(), "odd".into()],
        input_alphabet: vec!["a".into(), "b".into()],
        endmarkers: Endmarkers::NONE,
        delta,
        initial: 0,
        accepting: [0].into_iter().collect(),
        rejecting: [1].into_iter().collect(),
    }
}

fn swap3(i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(3);
    m[(i, i)] = C::new(0.0, 0.0);
    m[(j, j)] = C::new(0.0, 0.0);
    m[(i, j)] = C::new(1.0, 0.0);
    m[(j, i)] = C::new(1.0, 0.0);
    m
}

/// The three-state machine that recognizes L_a with certainty given the cue
/// advice 0^{n-1}1 (endmarker-free).
pub fn la_machine() -> Qfa {
    let mut unitaries = BTreeMap::new();
    for e in ["a", "b"] {
        unitaries.insert(track_symbol(e, "0"), ComplexMatrix::identity(3));
    }
    unitaries.insert(track_symbol("a", "1"), swap3(0, 1));
    unitaries.insert(track_symbol("b", "1"), swap3(0, 2));
    let input_alphabet = unitaries.keys().cloned().collect();
    Qfa {
        states: vec!["q0".into(), "q1".into(), "q2".into()],
        input_alphabet,
        endmarkers: Endmarkers::NONE,
        unitaries,
        initial: 0,
        accepting: [1].into_iter().collect(),
        rejecting: [2].into_iter().collect(),
        initial_vector: None,
        halt_offset: (0.0, 0.0),
    }
}

/// The L_a fixture: machine plus the advice function h(n) = 0^{n-1}1.
pub fn fixture_la(max_n: usize) -> (Qfa, DetAdvice) {
    (la_machine(), DetAdvice::zeros_then_one(max_n))
}

/// The equal-split comparison matrix used on a first mismatch.
pub fn mismatch_matrix() -> ComplexMatrix {
    let s = 1.0 / 2.0f64.sqrt();
    ComplexMatrix::from_rows_real(&[&[0.0, 1.0, 0.0], &[s, 0.0, s], &[s, 0.0, -s]])
}

/// The three-state comparison machine behind the "every language with
/// error-1/2 randomized advice" construction: matches the input against the
/// advice string, accepting with certainty on a full match and splitting the
/// probability evenly on the first mismatch.
pub fn all_machine(input_alphabet: &[Symbol]) -> Qfa {
    let mut unitaries = BTreeMap::new();
    unitaries.insert(LEFT_ENDMARKER.to_string(), ComplexMatrix::identity(3));
    unitaries.insert(RIGHT_ENDMARKER.to_string(), swap3(0, 1));
    let mut track_alphabet = Vec::new();
    for sigma in input_alphabet {
        for tau in input_alphabet.iter().chain([&"#".to_string()]) {
            let key = track_symbol(sigma, tau);
            let u = if sigma == tau {
                ComplexMatrix::identity(3)
            } else if tau == "#" {
                swap3(0, 2)
            } else {
                mismatch_matrix()
            };
            unitaries.insert(key.clone(), u);
            track_alphabet.push(key);
        }
    }
    Qfa {
        states: vec!["q0".into(), "q1".into(), "q2".into()],
        input_alphabet: track_alphabet,
        endmarkers: Endmarkers::BOTH,
        unitaries,
        initial: 0,
        accepting: [1].into_iter().collect(),
        rejecting: [2].into_iter().collect(),
        initial_vector: None,
        halt_offset: (0.0, 0.0),
    }
}

/// Advice for the ALL construction: uniform over the members of L_n, or a
/// point mass on #ⁿ when L_n is empty.
pub fn all_advice(
    input_alphabet: &[Symbol],
    members: &BTreeMap<usize, Vec<Str>>,
) -> RandAdvice {
    let mut per_len = BTreeMap::new();
    for (&n, l_n) in members {
        if l_n.is_empty() {
            per_len.insert(n, vec![vec!["#".to_string(); n]]);
        } else {
            per_len.insert(n, l_n.clone());
        }
    }
    let mut alphabet = input_alphabet.to_vec();
    alphabet.push("#".to_string());
    RandAdvice::uniform_on(alphabet, per_len)
}

/// ALL-construction fixture for an explicit per-length language table over
/// {0,1}.
pub fn fixture_all(members: &BTreeMap<usize, Vec<Str>>) -> (Qfa, RandAdvice) {
    let sigma = vec!["0".to_string(), "1".to_string()];
    (all_machine(&sigma), all_advice(&sigma, members))
}

/// ALL fixture over a seeded random language with nonempty sections.
pub fn fixture_all_random(seed: u64, max_n: usize) -> (Qfa, RandAdvice) {
    let (m, d, _) = fixture_all_random_with_table(seed, max_n);
    (m, d)
}

pub fn fixture_all_random_with_table(
    seed: u64,
    max_n: usize,
) -> (Qfa, RandAdvice, BTreeMap<usize, Vec<Str>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = vec!["0".to_string(), "1".to_string()];
    let mut members = BTreeMap::new();
    for n in 0..=max_n {
        let all = enumerate_strings(&sigma, n);
        let mut l_n: Vec<Str> = all
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if l_n.is_empty() {
            l_n.push(all[rng.gen_range(0..all.len())].clone());
        }
        members.insert(n, l_n);
    }
    let (m, d) = fixture_all(&members);
    (m, d, members)
}

/// Builds the four-state parity 1pfa shared by the Pal_# and Dup recognizers.
///
/// On bit pairs the machine tracks the parity of Σ στ; the Pal_# variant adds
/// a parity flip on [#|#]. Every other pair moves to q2/q3 with probability
/// 1/2 each. `swap_labels` selects which parity class accepts: the Pal_#
/// fixture accepts on odd parity (members pick up one flip from the central
/// #), the Dup fixture on even.
fn parity_pfa(input_alphabet: &[Symbol], hash_step: bool, swap_labels: bool) -> Pfa {
    let n = 4usize;
    let mut matrices = BTreeMap::new();
    let advice_alphabet: Vec<Symbol> = {
        let mut a: Vec<Symbol> = vec!["0".into(), "1".into()];
        if !a.contains(&"#".to_string()) {
            a.push("#".into());
        }
        a
    };
    let mut track_alphabet = Vec::new();
    for sigma in input_alphabet {
        for tau in &advice_alphabet {
            let key = track_symbol(sigma, tau);
            let mut m = vec![vec![0.0f64; n]; n];
            let bits = |s: &str| s.parse::<usize>().ok();
            match (bits(sigma), bits(tau)) {
                (Some(s), Some(t)) => {
                    // δ(q_i, [σ/τ]) = q_{στ+i mod 2}; q2/q3 split evenly.
                    for i in 0..2 {
                        m[(s * t + i) % 2][i] = 1.0;
                    }
                    for i in 2..4 {
                        m[2][i] = 0.5;
                        m[3][i] = 0.5;
                    }
                }
                _ if hash_step && sigma == "#" && tau == "#" => {
                    for i in 0..2 {
                        m[(i + 1) % 2][i] = 1.0;
                    }
                    for i in 2..4 {
                        m[2][i] = 0.5;
                        m[3][i] = 0.5;
                    }
                }
                _ => {
                    for i in 0..4 {
                        m[2][i] = 0.5;
                        m[3][i] = 0.5;
                    }
                }
            }
            matrices.insert(key.clone(), m);
            track_alphabet.push(key);
        }
    }
    let (accepting, rejecting): (BTreeSet<usize>, BTreeSet<usize>) = if swap_labels {
        ([1, 3].into_iter().collect(), [0, 2].into_iter().collect())
    } else {
        ([0, 2].into_iter().collect(), [1, 3].into_iter().collect())
    };
    Pfa {
        states: vec!["q0".into(), "q1".into(), "q2".into(), "q3".into()],
        input_alphabet: track_alphabet,
        endmarkers: Endmarkers::NONE,
        matrices,
        initial: 0,
        accepting,
        rejecting,
    }
}

/// Pal_# fixture: parity 1pfa with the # flip and the accept/reject labels
/// swapped relative to the source description (members end on odd parity; see
/// [`parity_pfa`]).
pub fn fixture_pal_hash(max_n: usize) -> (Pfa, RandAdvice) {
    let sigma: Vec<Symbol> = vec!["0".into(), "1".into(), "#".into()];
    (
        parity_pfa(&sigma, true, true),
        RandAdvice::palindrome_pairs(max_n),
    )
}

/// Dup fixture: same parity automaton without the # step; members end on even
/// parity, so the labels are not swapped.
pub fn fixture_dup(max_n: usize) -> (Pfa, RandAdvice) {
    let sigma: Vec<Symbol> = vec!["0".into(), "1".into()];
    (parity_pfa(&sigma, false, false), RandAdvice::dup_pairs(max_n))
}

/// Two-state rewritable coin machine: the transition entangles the verdict
/// with the advice bit, so on input "a" the machine accepts exactly with the
/// advice mass on "0". Useful as a minimal error-amplification source, since
/// its k-fold tensor stays at local dimension 4^k.
pub fn coin_machine(err: f64) -> (RewritableQfa, QuantAdvice) {
    let mut v = ComplexMatrix::zeros(4, 4);
    // |A,0⟩ → |A,0⟩, |A,1⟩ → |R,1⟩, |R,0⟩ → |R,0⟩, |R,1⟩ → |A,1⟩.
    v[(0, 0)] = C::new(1.0, 0.0);
    v[(3, 1)] = C::new(1.0, 0.0);
    v[(2, 2)] = C::new(1.0, 0.0);
    v[(1, 3)] = C::new(1.0, 0.0);
    let m = RewritableQfa {
        states: vec!["A".into(), "R".into()],
        input_alphabet: vec!["a".into()],
        advice_alphabet: vec!["0".into(), "1".into()],
        local_unitaries: [("a".to_string(), v)].into_iter().collect(),
        last_unitaries: BTreeMap::new(),
        position_overrides: BTreeMap::new(),
        initial: 0,
        accepting: [0].into_iter().collect(),
        rejecting: [1].into_iter().collect(),
        measure_mode: MeasureMode::FinalOnly,
        cap: DEFAULT_CAP,
    };
    let phi = QuantAdvice {
        alphabet: vec!["0".into(), "1".into()],
        table: [(
            1usize,
            vec![
                (vec!["0".to_string()], C::new((1.0 - err).sqrt(), 0.0)),
                (vec!["1".to_string()], C::new(err.sqrt(), 0.0)),
            ],
        )]
        .into_iter()
        .collect(),
    };
    (m, phi)
}

/// Advice bundle attached to a fixture.
#[derive(Debug, Clone, PartialEq)]
pub enum AdviceKind {
    Det(DetAdvice),
    Rand(RandAdvice),
    Quant(QuantAdvice),
}

pub const FIXTURE_NAMES: &[&str] = &["L_a", "ALL", "Pal#", "Dup"];

/// Named fixture bundles, advice tabulated up to `max_n`. "ALL" demonstrates
/// the construction on the language {0^m 1^n}.
pub fn fixture(name: &str, max_n: usize) -> Result<(Machine, AdviceKind)> {
    match name {
        "L_a" => {
            let (m, h) = fixture_la(max_n);
            Ok((Machine::Qfa(m), AdviceKind::Det(h)))
        }
        "ALL" => {
            let members = language_table(NamedLanguage::ZerosOnes, max_n)?;
            let (m, d) = fixture_all(&members);
            Ok((Machine::Qfa(m), AdviceKind::Rand(d)))
        }
        "Pal#" => {
            let (m, d) = fixture_pal_hash(max_n);
            Ok((Machine::Pfa(m), AdviceKind::Rand(d)))
        }
        "Dup" => {
            let (m, d) = fixture_dup(max_n);
            Ok((Machine::Pfa(m), AdviceKind::Rand(d)))
        }
        _ => Err(QfaError::ArgumentOutOfRange(format!(
            "unknown fixture {name:?}"
        ))),
    }
}

/// Random three-state quantum machine over the {a,b}×{0,1} track alphabet with
/// a random finitely supported advice distribution; used by conversion tests.
pub fn random_track_qfa_with_advice<R: Rng>(rng: &mut R, max_n: usize) -> (Qfa, RandAdvice) {
    let mut unitaries = BTreeMap::new();
    let mut track_alphabet = Vec::new();
    for sigma in ["a", "b"] {
        for tau in ["0", "1"] {
            let key = track_symbol(sigma, tau);
            unitaries.insert(key.clone(), crate::linalg::random_unitary(3, rng));
            track_alphabet.push(key);
        }
    }
    unitaries.insert(
        LEFT_ENDMARKER.to_string(),
        crate::linalg::random_unitary(3, rng),
    );
    unitaries.insert(
        RIGHT_ENDMARKER.to_string(),
        crate::linalg::random_unitary(3, rng),
    );
    let m = Qfa {
        states: vec!["q0".into(), "q1".into(), "q2".into()],
        input_alphabet: track_alphabet,
        endmarkers: Endmarkers::BOTH,
        unitaries,
        initial: 0,
        accepting: [1].into_iter().collect(),
        rejecting: [2].into_iter().collect(),
        initial_vector: None,
        halt_offset: (0.0, 0.0),
    };
    let advice_alphabet: Vec<Symbol> = vec!["0".into(), "1".into()];
    let mut table = BTreeMap::new();
    for n in 0..=max_n {
        let support = enumerate_strings(&advice_alphabet, n);
        let mut probs: Vec<f64> = (0..support.len()).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        table.insert(n, support.into_iter().zip(probs).collect());
    }
    let d = RandAdvice {
        alphabet: advice_alphabet,
        table,
    };
    (m, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::{run_with_det_advice, run_with_randomized_advice};
    use crate::linalg::TOL;
    use crate::machines::{qfa_validate, str_of};

    #[test]
    fn membership_basics() {
        assert!(membership(NamedLanguage::AaAbBaStar, &str_of("abba")).unwrap());
        assert!(!membership(NamedLanguage::AaAbBaStar, &str_of("abb")).unwrap());
        assert!(membership(NamedLanguage::AaAbBaStar, &[]).unwrap());
        assert!(!membership(NamedLanguage::La, &[]).unwrap());
        assert!(membership(NamedLanguage::La, &str_of("ba")).unwrap());
        assert!(membership(NamedLanguage::Dup, &str_of("0101")).unwrap());
        assert!(!membership(NamedLanguage::Dup, &str_of("010")).unwrap());
        assert!(membership(NamedLanguage::ZerosOnes, &str_of("0011")).unwrap());
        assert!(!membership(NamedLanguage::ZerosOnes, &str_of("010")).unwrap());
        assert!(membership(NamedLanguage::PalHash, &str_of("01#10")).unwrap());
        assert!(!membership(NamedLanguage::PalHash, &str_of("01#01")).unwrap());
        assert!(membership(NamedLanguage::PalHash, &str_of("#")).unwrap());
    }

    #[test]
    fn la_fixture_certainty() {
        let (m, h) = fixture_la(6);
        assert!(qfa_validate(&m).is_empty());
        let machine = Machine::Qfa(m);
        for n in 1..=6usize {
            for x in enumerate_strings(&NamedLanguage::La.alphabet(), n) {
                let out = run_with_det_advice(&machine, &h, &x).unwrap();
                if membership(NamedLanguage::La, &x).unwrap() {
                    assert!((out.p_acc - 1.0).abs() < TOL, "{x:?}");
                } else {
                    assert!((out.p_rej - 1.0).abs() < TOL, "{x:?}");
                }
            }
        }
    }

    #[test]
    fn all_fixture_probabilities() {
        for seed in 0..5u64 {
            let (m, d, members) = fixture_all_random_with_table(seed, 4);
            assert!(qfa_validate(&m).is_empty());
            let machine = Machine::Qfa(m);
            for n in 1..=4usize {
                let l_n = &members[&n];
                let d_n = 1.0 / l_n.len() as f64;
                for x in enumerate_strings(&["0".into(), "1".into()], n) {
                    let out = run_with_randomized_advice(&machine, &d, &x).unwrap();
                    if l_n.contains(&x) {
                        assert!((out.p_acc - (0.5 + d_n / 2.0)).abs() < TOL, "{x:?}");
                    } else {
                        assert!((out.p_acc - 0.5).abs() < TOL, "{x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn pal_hash_fixture() {
        let (m, d) = fixture_pal_hash(9);
        m.validate().unwrap();
        let machine = Machine::Pfa(m);
        for n in 0..=7usize {
            for x in enumerate_strings(&NamedLanguage::PalHash.alphabet(), n) {
                let out = run_with_randomized_advice(&machine, &d, &x).unwrap();
                if membership(NamedLanguage::PalHash, &x).unwrap() {
                    assert!((out.p_acc - 1.0).abs() < TOL, "{x:?} got {out:?}");
                } else {
                    assert!(out.p_acc <= 0.5 + TOL, "{x:?} got {out:?}");
                }
            }
        }
    }

    #[test]
    fn pal_hash_mismatch_is_exactly_half() {
        // w#w' with w' ≠ w^R of the same length → acceptance exactly 1/2.
        let (m, d) = fixture_pal_hash(9);
        let machine = Machine::Pfa(m);
        for w_len in 1..=3usize {
            for w in enumerate_strings(&["0".into(), "1".into()], w_len) {
                for w2 in enumerate_strings(&["0".into(), "1".into()], w_len) {
                    let rev: Str = w.iter().rev().cloned().collect();
                    if w2 == rev {
                        continue;
                    }
                    let mut x = w.clone();
                    x.push("#".to_string());
                    x.extend(w2.iter().cloned());
                    let out = run_with_randomized_advice(&machine, &d, &x).unwrap();
                    assert!((out.p_acc - 0.5).abs() < TOL, "{x:?}");
                }
            }
        }
    }

    #[test]
    fn dup_fixture() {
        let (m, d) = fixture_dup(6);
        m.validate().unwrap();
        let machine = Machine::Pfa(m);
        for n in 0..=6usize {
            for x in enumerate_strings(&["0".into(), "1".into()], n) {
                let out = run_with_randomized_advice(&machine, &d, &x).unwrap();
                if membership(NamedLanguage::Dup, &x).unwrap() {
                    assert!((out.p_acc - 1.0).abs() < TOL, "{x:?}");
                } else {
                    assert!((out.p_acc - 0.5).abs() < TOL, "{x:?}");
                }
            }
        }
    }

    #[test]
    fn fixture_dispatch() {
        for name in FIXTURE_NAMES {
            assert!(fixture(name, 3).is_ok());
        }
        assert!(fixture("nope", 3).is_err());
    }
}
