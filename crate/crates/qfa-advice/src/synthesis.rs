//! Reversible-automaton synthesis from a bounded-horizon language oracle.
//!
//! The constructive half of the 1rfa-with-advice characterization: from
//! exhaustive continuation behavior we build equivalence classes over
//! Δ = {(x, n) : |x| ≤ n}, certify the reversibility condition (a) and the
//! separation condition (b), and either emit a reversible automaton plus a
//! deterministic advice function or a concrete counterexample certificate.
//! Everything is horizon-bounded: the artifact certifies agreement with the
//! oracle up to length N and makes no claim beyond it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::advice::{track_symbol, DetAdvice};
use crate::error::{QfaError, Result};
use crate::machines::{
    rfa_check, Dfa, Endmarkers, ReversibilityReport, Str, Symbol, LEFT_ENDMARKER, RIGHT_ENDMARKER,
};
use crate::zoo::{enumerate_strings, membership, NamedLanguage};

/// Enumeration cap: |Σ|^N may not exceed this.
pub const HORIZON_CAP: usize = 1 << 16;

/// A language S restricted to strings of length ≤ horizon, backed either by
/// a built-in named language or by an explicit member table.
#[derive(Debug, Clone)]
pub struct LanguageOracle {
    pub alphabet: Vec<Symbol>,
    pub horizon: usize,
    rule: OracleRule,
}

#[derive(Debug, Clone)]
enum OracleRule {
    Builtin(NamedLanguage),
    /// Member strings per length; absent strings of covered lengths are
    /// non-members.
    Table(BTreeMap<usize, BTreeSet<Str>>),
}

impl LanguageOracle {
    pub fn builtin(lang: NamedLanguage, horizon: usize) -> LanguageOracle {
        LanguageOracle {
            alphabet: lang.alphabet(),
            horizon,
            rule: OracleRule::Builtin(lang),
        }
    }

    /// Oracle from an explicit list of member strings (everything else up to
    /// the horizon is a non-member).
    pub fn from_members(
        alphabet: Vec<Symbol>,
        members: impl IntoIterator<Item = Str>,
        horizon: usize,
    ) -> Result<LanguageOracle> {
        let mut table: BTreeMap<usize, BTreeSet<Str>> = BTreeMap::new();
        for x in members {
            for s in &x {
                if !alphabet.contains(s) {
                    return Err(QfaError::UnknownSymbol(s.clone()));
                }
            }
            if x.len() > horizon {
                return Err(QfaError::ArgumentOutOfRange(format!(
                    "member string {x:?} exceeds the horizon {horizon}"
                )));
            }
            table.entry(x.len()).or_default().insert(x);
        }
        Ok(LanguageOracle {
            alphabet,
            horizon,
            rule: OracleRule::Table(table),
        })
    }

    /// S(x). Only defined for |x| ≤ horizon.
    pub fn member(&self, x: &[Symbol]) -> Result<bool> {
        if x.len() > self.horizon {
            return Err(QfaError::ArgumentOutOfRange(format!(
                "oracle queried beyond horizon: |x| = {}",
                x.len()
            )));
        }
        match &self.rule {
            OracleRule::Builtin(lang) => membership(*lang, x),
            OracleRule::Table(t) => Ok(t
                .get(&x.len())
                .map(|s| s.contains(x))
                .unwrap_or(false)),
        }
    }
}

/// The classes of one Δ_n: points ordered by (length, lexicographic), each
/// carrying its global class index and, at full length, its S-value.
#[derive(Debug, Clone, Serialize)]
pub struct ClassLevel {
    pub n: usize,
    pub points: Vec<Str>,
    /// Global class index per point.
    pub class: Vec<usize>,
    /// S(x) for full-length points, `None` for proper prefixes (and for
    /// extracted tables whose machine does not decide the point).
    pub accept: Vec<Option<bool>>,
    /// C^(n)_acc: classes containing an accepted length-n string.
    pub acc_classes: BTreeSet<usize>,
    /// C^(n)_rej: classes containing a rejected length-n string.
    pub rej_classes: BTreeSet<usize>,
}

/// Equivalence classes of Δ up to a horizon with a canonical global indexing.
///
/// Within one Δ_n and one length the classes come from exhaustive
/// continuation agreement (condition (b) holds by construction). The global
/// index identifies classes across levels: classes are visited in canonical
/// order (n, then length, then least member) and greedily share the smallest
/// index not already holding a class of the same (n, length) — the only
/// merges the construction must avoid. This is one fixed choice among the
/// many the characterization permits; it is deterministic and keeps d small
/// (a full-language oracle collapses to d = 1).
#[derive(Debug, Clone, Serialize)]
pub struct ClassTable {
    pub alphabet: Vec<Symbol>,
    pub horizon: usize,
    /// Number of global classes.
    pub d: usize,
    pub levels: Vec<ClassLevel>,
}

impl ClassTable {
    /// Index of the point `x` (given as rank within its length block) in the
    /// level's parallel vectors.
    fn point_index(&self, len: usize, rank: usize) -> usize {
        let k = self.alphabet.len();
        let mut offset = 0;
        for l in 0..len {
            offset += k.pow(l as u32);
        }
        offset + rank
    }

    fn rank_of(&self, x: &[Symbol]) -> Option<usize> {
        let k = self.alphabet.len();
        let mut r = 0;
        for s in x {
            r = r * k + self.alphabet.iter().position(|a| a == s)?;
        }
        Some(r)
    }

    /// Global class of (x, n), if tabulated.
    pub fn class_of(&self, x: &[Symbol], n: usize) -> Option<usize> {
        if n > self.horizon || x.len() > n {
            return None;
        }
        let idx = self.point_index(x.len(), self.rank_of(x)?);
        Some(self.levels[n].class[idx])
    }
}

fn check_cap(alphabet_len: usize, horizon: usize) -> Result<()> {
    if alphabet_len == 0 {
        return Err(QfaError::InvalidMachine("empty oracle alphabet".into()));
    }
    match alphabet_len.checked_pow(horizon as u32) {
        Some(v) if v <= HORIZON_CAP => Ok(()),
        _ => Err(QfaError::HorizonTooLarge(format!(
            "{alphabet_len}^{horizon} exceeds the enumeration cap {HORIZON_CAP}"
        ))),
    }
}

/// Builds the full class table for the oracle's language up to `horizon`.
///
/// (x,n) and (y,n) share a class iff |x| = |y| and S(xz) = S(yz) for every z
/// with |xz| = n; at |x| = n this degenerates to S(x) = S(y).
pub fn build_classes(oracle: &LanguageOracle, horizon: usize) -> Result<ClassTable> {
    if horizon > oracle.horizon {
        return Err(QfaError::ArgumentOutOfRange(format!(
            "horizon {horizon} exceeds the oracle's covered horizon {}",
            oracle.horizon
        )));
    }
    check_cap(oracle.alphabet.len(), horizon)?;
    let k = oracle.alphabet.len();

    // Membership of every string of length l ≤ horizon, lexicographic order.
    let mut mem: Vec<Vec<bool>> = Vec::with_capacity(horizon + 1);
    for l in 0..=horizon {
        let strings = enumerate_strings(&oracle.alphabet, l);
        let mut row = Vec::with_capacity(strings.len());
        for x in &strings {
            row.push(oracle.member(x)?);
        }
        mem.push(row);
    }

    // slot_uses[s] = the (n, length) pairs already represented in global
    // class s; a new class may join s only if its own (n, length) is absent.
    let mut slot_uses: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    let mut levels = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let mut points = Vec::new();
        let mut class = Vec::new();
        let mut accept = Vec::new();
        let mut acc_classes = BTreeSet::new();
        let mut rej_classes = BTreeSet::new();
        for len in 0..=n {
            let stride = k.pow((n - len) as u32);
            let strings = enumerate_strings(&oracle.alphabet, len);
            // Continuation signature of x = the membership slice of the
            // length-n block that starts with x. Iterating ranks in
            // lexicographic order makes the first member of each signature
            // group the least member, so group order is canonical.
            let mut sig_to_slot: BTreeMap<&[bool], usize> = BTreeMap::new();
            for (rank, x) in strings.iter().enumerate() {
                let sig = &mem[n][rank * stride..(rank + 1) * stride];
                let slot = *sig_to_slot.entry(sig).or_insert_with(|| {
                    let s = (0..slot_uses.len())
                        .find(|&s| !slot_uses[s].contains(&(n, len)))
                        .unwrap_or_else(|| {
                            slot_uses.push(BTreeSet::new());
                            slot_uses.len() - 1
                        });
                    slot_uses[s].insert((n, len));
                    s
                });
                points.push(x.clone());
                class.push(slot);
                if len == n {
                    accept.push(Some(mem[n][rank]));
                    if mem[n][rank] {
                        acc_classes.insert(slot);
                    } else {
                        rej_classes.insert(slot);
                    }
                } else {
                    accept.push(None);
                }
            }
        }
        levels.push(ClassLevel {
            n,
            points,
            class,
            accept,
            acc_classes,
            rej_classes,
        });
    }
    Ok(ClassTable {
        alphabet: oracle.alphabet.clone(),
        horizon,
        d: slot_uses.len(),
        levels,
    })
}

/// Witness pair for a failed condition (a) biconditional.
#[derive(Debug, Clone, Serialize)]
pub struct CondACounterexample {
    pub n: usize,
    pub x: Str,
    pub y: Str,
    pub sigma: Symbol,
    /// `true`: (x,n) ≡ (y,n) but (xσ,n) ≢ (yσ,n) (forward failure — cannot
    /// arise from `build_classes` output). `false`: (xσ,n) ≡ (yσ,n) but
    /// (x,n) ≢ (y,n) (the reversibility obstruction).
    pub forward: bool,
}

#[derive(Debug, Clone, Serialize)]
pub enum ConditionA {
    Holds,
    Counterexample(CondACounterexample),
}

/// Verifies condition (a) — (xσ,n) ≡ (yσ,n) iff (x,n) ≡ (y,n) for all
/// same-length pairs with |xσ| ≤ n — over the whole table.
pub fn check_condition_a(table: &ClassTable) -> ConditionA {
    let k = table.alphabet.len();
    for lvl in &table.levels {
        let n = lvl.n;
        for len in 0..n {
            let block = k.pow(len as u32);
            let base = table.point_index(len, 0);
            let succ_base = table.point_index(len + 1, 0);
            // Forward: the σ-successor class of a class must be unique.
            // Backward: distinct classes must have distinct σ-successors.
            let mut succ_of: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
            let mut pred_of: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
            for rank in 0..block {
                let q = lvl.class[base + rank];
                for (si, sigma) in table.alphabet.iter().enumerate() {
                    let q2 = lvl.class[succ_base + rank * k + si];
                    if let Some(&(q2_prev, rank_prev)) = succ_of.get(&(q, si)) {
                        if q2_prev != q2 {
                            return ConditionA::Counterexample(CondACounterexample {
                                n,
                                x: lvl.points[base + rank_prev].clone(),
                                y: lvl.points[base + rank].clone(),
                                sigma: sigma.clone(),
                                forward: true,
                            });
                        }
                    } else {
                        succ_of.insert((q, si), (q2, rank));
                    }
                    if let Some(&(q_prev, rank_prev)) = pred_of.get(&(q2, si)) {
                        if q_prev != q {
                            return ConditionA::Counterexample(CondACounterexample {
                                n,
                                x: lvl.points[base + rank_prev].clone(),
                                y: lvl.points[base + rank].clone(),
                                sigma: sigma.clone(),
                                forward: false,
                            });
                        }
                    } else {
                        pred_of.insert((q2, si), (q, rank));
                    }
                }
            }
        }
    }
    ConditionA::Holds
}

/// One advice symbol: a finite function from (class, input symbol) to a
/// successor class, together with its positional role. Two table positions
/// share a symbol only when the whole value is equal, so a symbol's meaning
/// is position-independent by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct AdviceFn {
    /// Entries h(q, σ) = q'; pairs absent here are the # padding.
    map: BTreeMap<(usize, usize), usize>,
    /// For a first-position symbol, the class of (λ, n): the entry the
    /// initial state consumes.
    initial_class: Option<usize>,
    /// For a last-position symbol, the (C^(n)_acc, C^(n)_rej) tag pair that
    /// its targets halt into.
    final_tag: Option<(BTreeSet<usize>, BTreeSet<usize>)>,
}

fn set_delta(
    delta: &mut BTreeMap<(usize, Symbol), usize>,
    q: usize,
    sigma: Symbol,
    target: usize,
) -> Result<()> {
    match delta.get(&(q, sigma.clone())) {
        Some(&t) if t == target => Ok(()),
        Some(_) => Err(QfaError::InvalidMachine(format!(
            "conflicting transition from state {q} on {sigma:?}"
        ))),
        None => {
            delta.insert((q, sigma), target);
            Ok(())
        }
    }
}

/// Completes every symbol's partial transition map to a permutation of the
/// state set: unassigned sources are matched to unassigned targets in
/// ascending order.
fn complete_to_permutations(
    delta: &mut BTreeMap<(usize, Symbol), usize>,
    states: usize,
    alphabet: &[Symbol],
) -> Result<()> {
    for sigma in alphabet {
        let mut used_targets = BTreeSet::new();
        let mut assigned_sources = BTreeSet::new();
        for ((q, s), t) in delta.iter() {
            if s == sigma {
                if !used_targets.insert(*t) {
                    return Err(QfaError::InvalidMachine(format!(
                        "transition map for {sigma:?} is not injective"
                    )));
                }
                assigned_sources.insert(*q);
            }
        }
        let free_targets: Vec<usize> =
            (0..states).filter(|t| !used_targets.contains(t)).collect();
        let free_sources: Vec<usize> = (0..states)
            .filter(|q| !assigned_sources.contains(q))
            .collect();
        for (q, t) in free_sources.into_iter().zip(free_targets) {
            delta.insert((q, sigma.clone()), t);
        }
    }
    Ok(())
}

/// Builds the reversible machine and advice function realizing the class
/// table, following the characterization proof's rules (i)–(v): advice
/// symbol h_{n,i} maps the class after i−1 symbols to the class after i,
/// with first-position symbols anchored at the class of (λ, n) and
/// last-position symbols tagged with (C^(n)_acc, C^(n)_rej). Identical
/// functions are deduplicated into the advice alphabet; illegitimate
/// transition pairs are completed to per-symbol permutations.
///
/// Fails with a descriptive error if condition (a) does not hold (run
/// [`check_condition_a`] first to obtain the counterexample certificate).
pub fn synthesize_rfa(table: &ClassTable) -> Result<(Dfa, DetAdvice)> {
    if let ConditionA::Counterexample(c) = check_condition_a(table) {
        return Err(QfaError::InvalidMachine(format!(
            "condition (a) fails at n={} on ({:?}, {:?}) with {:?}",
            c.n, c.x, c.y, c.sigma
        )));
    }
    let k = table.alphabet.len();
    let d = table.d;

    // Advice functions per (n, i), deduplicated in first-use order.
    let mut gamma: BTreeMap<AdviceFn, usize> = BTreeMap::new();
    let mut gamma_order: Vec<AdviceFn> = Vec::new();
    let mut advice_table: BTreeMap<usize, Str> = BTreeMap::new();
    advice_table.insert(0, Vec::new());
    for n in 1..=table.horizon {
        let lvl = &table.levels[n];
        let mut word = Vec::with_capacity(n);
        for i in 1..=n {
            let len = i - 1;
            let block = k.pow(len as u32);
            let base = table.point_index(len, 0);
            let succ_base = table.point_index(len + 1, 0);
            let mut map = BTreeMap::new();
            for rank in 0..block {
                let q = lvl.class[base + rank];
                for si in 0..k {
                    // Well-defined under condition (a): every member of q at
                    // this length has the same σ-successor class.
                    map.insert((q, si), lvl.class[succ_base + rank * k + si]);
                }
            }
            let f = AdviceFn {
                map,
                initial_class: (i == 1).then(|| lvl.class[table.point_index(0, 0)]),
                final_tag: (i == n)
                    .then(|| (lvl.acc_classes.clone(), lvl.rej_classes.clone())),
            };
            let id = *gamma.entry(f.clone()).or_insert_with(|| {
                gamma_order.push(f);
                gamma_order.len() - 1
            });
            word.push(format!("g{id}"));
        }
        advice_table.insert(n, word);
    }

    // States: q0, the d class states, then halting states (class, tag pair)
    // in first-use order.
    let mut state_names: Vec<String> = Vec::with_capacity(d + 1);
    state_names.push("q0".into());
    for q in 0..d {
        state_names.push(format!("s{q}"));
    }
    let mut tags: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    let mut halting: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut accepting = BTreeSet::new();
    let mut rejecting = BTreeSet::new();
    let mut halt_state = |q: usize,
                          tag: &(BTreeSet<usize>, BTreeSet<usize>),
                          names: &mut Vec<String>,
                          accepting: &mut BTreeSet<usize>,
                          rejecting: &mut BTreeSet<usize>|
     -> usize {
        let tag_id = match tags.iter().position(|t| t == tag) {
            Some(j) => j,
            None => {
                tags.push(tag.clone());
                tags.len() - 1
            }
        };
        *halting.entry((q, tag_id)).or_insert_with(|| {
            names.push(format!("f{q}t{tag_id}"));
            let idx = names.len() - 1;
            if tag.0.contains(&q) {
                accepting.insert(idx);
            }
            if tag.1.contains(&q) {
                rejecting.insert(idx);
            }
            idx
        })
    };

    let mut delta: BTreeMap<(usize, Symbol), usize> = BTreeMap::new();
    let mut input_alphabet = Vec::new();
    for (id, f) in gamma_order.iter().enumerate() {
        for (si, sigma) in table.alphabet.iter().enumerate() {
            let track = track_symbol(sigma, &format!("g{id}"));
            input_alphabet.push(track.clone());
            match (&f.initial_class, &f.final_tag) {
                (Some(q0_class), None) => {
                    let target = f.map[&(*q0_class, si)];
                    set_delta(&mut delta, 0, track, 1 + target)?;
                }
                (Some(q0_class), Some(tag)) => {
                    let target = f.map[&(*q0_class, si)];
                    let h = halt_state(
                        target,
                        tag,
                        &mut state_names,
                        &mut accepting,
                        &mut rejecting,
                    );
                    set_delta(&mut delta, 0, track, h)?;
                }
                (None, None) => {
                    for (&(q, s), &target) in &f.map {
                        if s == si {
                            set_delta(&mut delta, 1 + q, track.clone(), 1 + target)?;
                        }
                    }
                }
                (None, Some(tag)) => {
                    for (&(q, s), &target) in &f.map {
                        if s == si {
                            let h = halt_state(
                                target,
                                tag,
                                &mut state_names,
                                &mut accepting,
                                &mut rejecting,
                            );
                            set_delta(&mut delta, 1 + q, track.clone(), h)?;
                        }
                    }
                }
            }
        }
    }

    // Endmarkers: ¢ fixes q0, $ fixes the halting states; everything else is
    // permutation-completed.
    set_delta(&mut delta, 0, LEFT_ENDMARKER.into(), 0)?;
    for (&(_, _), &idx) in &halting {
        set_delta(&mut delta, idx, RIGHT_ENDMARKER.into(), idx)?;
    }

    let mut effective = vec![LEFT_ENDMARKER.to_string()];
    effective.extend(input_alphabet.iter().cloned());
    effective.push(RIGHT_ENDMARKER.to_string());
    complete_to_permutations(&mut delta, state_names.len(), &effective)?;

    let m = Dfa {
        states: state_names,
        input_alphabet,
        endmarkers: Endmarkers {
            left: true,
            right: true,
        },
        delta,
        initial: 0,
        accepting,
        rejecting,
    };
    m.validate()?;
    let h = DetAdvice {
        alphabet: (0..gamma_order.len()).map(|i| format!("g{i}")).collect(),
        table: advice_table,
    };
    Ok((m, h))
}

/// Reads the class table back off a reversible machine: (x,n) and (y,n)
/// share a class iff the machine reaches the same inner state after
/// ¢[x / Pref_|x|(h(n))] and ¢[y / Pref_|y|(h(n))]. The machine's halting
/// verdict at full length populates `accept` (undecided points stay `None`).
pub fn extract_relation(m: &Dfa, h: &DetAdvice, horizon: usize) -> Result<ClassTable> {
    if let ReversibilityReport::Violations(v) = rfa_check(m) {
        return Err(QfaError::InvalidMachine(format!(
            "machine is not reversible: {} violation(s)",
            v.len()
        )));
    }
    let mut alphabet: Vec<Symbol> = m
        .input_alphabet
        .iter()
        .map(|s| crate::advice::split_track_symbol(s).map(|(upper, _)| upper))
        .collect::<Result<Vec<_>>>()?;
    alphabet.sort();
    alphabet.dedup();
    check_cap(alphabet.len(), horizon)?;

    // Global class = machine state, compressed in first-appearance order.
    let mut state_to_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut levels = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let advice = h.at(n)?;
        let mut points = Vec::new();
        let mut class = Vec::new();
        let mut accept = Vec::new();
        let mut acc_classes = BTreeSet::new();
        let mut rej_classes = BTreeSet::new();
        // States after each prefix, level by level.
        let start = if m.endmarkers.left {
            m.delta_hat(m.initial, &[LEFT_ENDMARKER.to_string()])?
        } else {
            m.initial
        };
        let mut frontier = vec![start];
        for len in 0..=n {
            let strings = enumerate_strings(&alphabet, len);
            for (rank, x) in strings.iter().enumerate() {
                let q = frontier[rank];
                let next = state_to_class.len();
                let c = *state_to_class.entry(q).or_insert(next);
                points.push(x.clone());
                class.push(c);
                if len == n {
                    let fin = if m.endmarkers.right {
                        m.delta_hat(q, &[RIGHT_ENDMARKER.to_string()])?
                    } else {
                        q
                    };
                    match m.verdict_of(fin) {
                        crate::machines::Verdict::Accept => {
                            accept.push(Some(true));
                            acc_classes.insert(c);
                        }
                        crate::machines::Verdict::Reject => {
                            accept.push(Some(false));
                            rej_classes.insert(c);
                        }
                        crate::machines::Verdict::Neither => accept.push(None),
                    }
                } else {
                    accept.push(None);
                }
            }
            if len < n {
                let tau = &advice[len];
                let mut next_frontier = Vec::with_capacity(frontier.len() * alphabet.len());
                for &q in &frontier {
                    for sigma in &alphabet {
                        let track = track_symbol(sigma, tau);
                        next_frontier.push(m.delta_hat(q, &[track])?);
                    }
                }
                frontier = next_frontier;
            }
        }
        levels.push(ClassLevel {
            n,
            points,
            class,
            accept,
            acc_classes,
            rej_classes,
        });
    }
    Ok(ClassTable {
        alphabet,
        horizon,
        d: state_to_class.len(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::track_join;
    use crate::machines::{dfa_run, Verdict};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_agreement(m: &Dfa, h: &DetAdvice, oracle: &LanguageOracle, horizon: usize) {
        let mut checked = 0usize;
        for len in 1..=horizon {
            let advice = h.at(len).unwrap();
            for x in enumerate_strings(&oracle.alphabet, len) {
                let track = track_join(&x, advice).unwrap();
                let got = dfa_run(m, &track.symbols()).unwrap();
                let want = if oracle.member(&x).unwrap() {
                    Verdict::Accept
                } else {
                    Verdict::Reject
                };
                assert_eq!(got, want, "disagrees on {x:?}");
                checked += 1;
            }
        }
        assert_eq!(
            checked,
            (1..=horizon)
                .map(|l| oracle.alphabet.len().pow(l as u32))
                .sum::<usize>()
        );
    }

    #[test]
    fn full_language_collapses_to_one_class() {
        let alphabet: Vec<Symbol> = vec!["a".into(), "b".into()];
        let all: Vec<Str> = (0..=4)
            .flat_map(|l| enumerate_strings(&alphabet, l))
            .collect();
        let oracle = LanguageOracle::from_members(alphabet, all, 4).unwrap();
        let table = build_classes(&oracle, 4).unwrap();
        assert_eq!(table.d, 1);
        assert!(matches!(check_condition_a(&table), ConditionA::Holds));
        let (m, h) = synthesize_rfa(&table).unwrap();
        assert!(matches!(rfa_check(&m), ReversibilityReport::Reversible));
        oracle_agreement(&m, &h, &oracle, 4);
    }

    #[test]
    fn empty_language_collapses_to_one_class() {
        let alphabet: Vec<Symbol> = vec!["a".into(), "b".into()];
        let oracle = LanguageOracle::from_members(alphabet, Vec::<Str>::new(), 4).unwrap();
        let table = build_classes(&oracle, 4).unwrap();
        assert_eq!(table.d, 1);
        let (m, h) = synthesize_rfa(&table).unwrap();
        oracle_agreement(&m, &h, &oracle, 4);
    }

    #[test]
    fn la_class_shape() {
        let oracle = LanguageOracle::builtin(NamedLanguage::La, 6);
        let table = build_classes(&oracle, 6).unwrap();
        assert_eq!(table.d, 2);
        for lvl in &table.levels {
            let k = 2usize;
            for len in 0..=lvl.n {
                let base = table.point_index(len, 0);
                let classes: BTreeSet<usize> = (0..k.pow(len as u32))
                    .map(|r| lvl.class[base + r])
                    .collect();
                if len < lvl.n || len == 0 {
                    assert_eq!(classes.len(), 1, "n={} len={len}", lvl.n);
                } else {
                    assert_eq!(classes.len(), 2, "n={} len={len}", lvl.n);
                }
            }
        }
    }

    #[test]
    fn la_round_trip_horizon_6() {
        let oracle = LanguageOracle::builtin(NamedLanguage::La, 6);
        let table = build_classes(&oracle, 6).unwrap();
        assert!(matches!(check_condition_a(&table), ConditionA::Holds));
        let (m, h) = synthesize_rfa(&table).unwrap();
        assert!(matches!(rfa_check(&m), ReversibilityReport::Reversible));
        // 2 + 4 + ... + 64 = 126 strings.
        oracle_agreement(&m, &h, &oracle, 6);
    }

    #[test]
    fn claim6_successor_predecessor_unique() {
        // Successor classes are functions of (class, σ); predecessors are
        // unique when condition (a) holds.
        let oracle = LanguageOracle::builtin(NamedLanguage::La, 5);
        let table = build_classes(&oracle, 5).unwrap();
        let k = table.alphabet.len();
        for lvl in &table.levels {
            for len in 0..lvl.n {
                let base = table.point_index(len, 0);
                let succ_base = table.point_index(len + 1, 0);
                let mut succ: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                let mut pred: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for r in 0..k.pow(len as u32) {
                    let q = lvl.class[base + r];
                    for si in 0..k {
                        let q2 = lvl.class[succ_base + r * k + si];
                        assert_eq!(*succ.entry((q, si)).or_insert(q2), q2);
                        assert_eq!(*pred.entry((q2, si)).or_insert(q), q);
                    }
                }
            }
        }
    }

    #[test]
    fn aa_ab_ba_star_fails_condition_a() {
        let oracle = LanguageOracle::builtin(NamedLanguage::AaAbBaStar, 6);
        let table = build_classes(&oracle, 6).unwrap();
        let ConditionA::Counterexample(c) = check_condition_a(&table) else {
            panic!("expected a counterexample");
        };
        assert!(!c.forward);
        assert!(synthesize_rfa(&table).is_err());
    }

    #[test]
    fn zeros_ones_negative_certificate_sound() {
        // {0^m 1^n} at horizon 8: condition (a) fails, and the returned
        // certificate is verified against the oracle alone.
        let oracle = LanguageOracle::builtin(NamedLanguage::ZerosOnes, 8);
        let table = build_classes(&oracle, 8).unwrap();
        let ConditionA::Counterexample(c) = check_condition_a(&table) else {
            panic!("expected a counterexample");
        };
        assert!(!c.forward, "{c:?}");
        let xs: Str = c.x.iter().cloned().chain([c.sigma.clone()]).collect();
        let ys: Str = c.y.iter().cloned().chain([c.sigma.clone()]).collect();
        let agree = |u: &Str, v: &Str| -> bool {
            enumerate_strings(&oracle.alphabet, c.n - u.len()).iter().all(|z| {
                let uz: Str = u.iter().chain(z).cloned().collect();
                let vz: Str = v.iter().chain(z).cloned().collect();
                oracle.member(&uz).unwrap() == oracle.member(&vz).unwrap()
            })
        };
        assert!(agree(&xs, &ys), "xσ and yσ must be equivalent");
        assert!(!agree(&c.x, &c.y), "x and y must be separated");
    }

    #[test]
    fn extract_refines_built_classes() {
        let oracle = LanguageOracle::builtin(NamedLanguage::La, 5);
        let built = build_classes(&oracle, 5).unwrap();
        let (m, h) = synthesize_rfa(&built).unwrap();
        let extracted = extract_relation(&m, &h, 5).unwrap();
        assert!(matches!(check_condition_a(&extracted), ConditionA::Holds));
        // Same machine state implies same language class.
        for (lb, le) in built.levels.iter().zip(&extracted.levels) {
            let mut to_built: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, (&cb, &ce)) in lb.class.iter().zip(&le.class).enumerate() {
                // Refinement may only merge across lengths, never split a
                // same-length language class... but splitting is allowed;
                // the extracted class must map into a single built class
                // per (state, length) pair.
                let key = ce * (built.horizon + 2) + lb.points[i].len();
                assert_eq!(
                    *to_built.entry(key).or_insert(cb),
                    cb,
                    "state class {ce} straddles two language classes"
                );
            }
        }
    }

    #[test]
    fn random_reversible_machines_extract_cleanly() {
        // Condition (a) holds for every relation extracted from a reversible
        // machine, whatever the advice.
        let uppers: Vec<Symbol> = vec!["a".into(), "b".into()];
        let lowers: Vec<Symbol> = vec!["t0".into(), "t1".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for _ in 0..100 {
            let states = rng.gen_range(2..=5);
            let mut names = Vec::new();
            for q in 0..states {
                names.push(format!("p{q}"));
            }
            let mut input_alphabet = Vec::new();
            let mut delta = BTreeMap::new();
            let mut symbols: Vec<Symbol> =
                vec![LEFT_ENDMARKER.into(), RIGHT_ENDMARKER.into()];
            for u in &uppers {
                for l in &lowers {
                    let track = track_symbol(u, l);
                    input_alphabet.push(track.clone());
                    symbols.push(track);
                }
            }
            for sigma in &symbols {
                let mut perm: Vec<usize> = (0..states).collect();
                perm.shuffle(&mut rng);
                for (q, &t) in perm.iter().enumerate() {
                    delta.insert((q, sigma.clone()), t);
                }
            }
            let mut accepting = BTreeSet::new();
            let mut rejecting = BTreeSet::new();
            for q in 0..states {
                match rng.gen_range(0..3) {
                    0 => {
                        accepting.insert(q);
                    }
                    1 => {
                        rejecting.insert(q);
                    }
                    _ => {}
                }
            }
            let m = Dfa {
                states: names,
                input_alphabet,
                endmarkers: Endmarkers {
                    left: true,
                    right: true,
                },
                delta,
                initial: rng.gen_range(0..states),
                accepting,
                rejecting,
            };
            m.validate().unwrap();
            let horizon = 3;
            let mut table = BTreeMap::new();
            for n in 0..=horizon {
                let w: Str = (0..n)
                    .map(|_| lowers[rng.gen_range(0..lowers.len())].clone())
                    .collect();
                table.insert(n, w);
            }
            let h = DetAdvice {
                alphabet: lowers.clone(),
                table,
            };
            let extracted = extract_relation(&m, &h, horizon).unwrap();
            assert!(
                matches!(check_condition_a(&extracted), ConditionA::Holds),
                "extracted relation violated condition (a)"
            );
            for lvl in &extracted.levels {
                assert!(lvl.acc_classes.is_disjoint(&lvl.rej_classes));
            }
        }
    }

    #[test]
    fn horizon_cap_enforced() {
        let oracle = LanguageOracle::builtin(NamedLanguage::PalHash, 30);
        assert!(matches!(
            build_classes(&oracle, 30),
            Err(QfaError::HorizonTooLarge(_))
        ));
    }

    #[test]
    fn oracle_beyond_horizon_rejected() {
        let oracle = LanguageOracle::builtin(NamedLanguage::La, 3);
        assert!(oracle.member(&vec!["a".to_string(); 4]).is_err());
        assert!(build_classes(&oracle, 4).is_err());
    }
}
