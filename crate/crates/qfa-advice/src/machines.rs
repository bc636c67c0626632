//! Machine descriptions (1dfa, 1rfa, 1pfa, measure-many 1qfa) with structural
//! validation and bare (advice-free) run semantics.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{QfaError, Result};
use crate::linalg::{
    hat_t_apply_unchecked, ComplexMatrix, HaltingTriple, MeasurementPartition, StateVector, TOL,
};

/// A single input or track symbol. Track symbols render as `"σ|τ"`.
pub type Symbol = String;
/// A string as a sequence of symbols (advice symbols may be multi-character).
pub type Str = Vec<Symbol>;

pub const LEFT_ENDMARKER: &str = "¢";
pub const RIGHT_ENDMARKER: &str = "$";

pub fn str_of(s: &str) -> Str {
    s.chars().map(|c| c.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Endmarkers {
    pub left: bool,
    pub right: bool,
}

impl Endmarkers {
    pub const BOTH: Endmarkers = Endmarkers { left: true, right: true };
    pub const RIGHT_ONLY: Endmarkers = Endmarkers { left: false, right: true };
    pub const NONE: Endmarkers = Endmarkers { left: false, right: false };
}

/// Halting class of a deterministic run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
    Neither,
}

/// One-way deterministic finite automaton, possibly over a track alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dfa {
    pub states: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    pub endmarkers: Endmarkers,
    /// delta[(q, σ)] = successor state index; must be total on Q × Σ̌.
    pub delta: BTreeMap<(usize, Symbol), usize>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub rejecting: BTreeSet<usize>,
}

impl Dfa {
    /// The effective alphabet Σ̌ = Σ plus the endmarkers in use.
    pub fn effective_alphabet(&self) -> Vec<Symbol> {
        let mut a = Vec::new();
        if self.endmarkers.left {
            a.push(LEFT_ENDMARKER.to_string());
        }
        a.extend(self.input_alphabet.iter().cloned());
        if self.endmarkers.right {
            a.push(RIGHT_ENDMARKER.to_string());
        }
        a
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(QfaError::InvalidMachine("initial state out of range".into()));
        }
        if self.accepting.intersection(&self.rejecting).next().is_some() {
            return Err(QfaError::InvalidMachine(
                "accepting and rejecting sets overlap".into(),
            ));
        }
        for q in 0..n {
            for sigma in self.effective_alphabet() {
                match self.delta.get(&(q, sigma.clone())) {
                    Some(&t) if t < n => {}
                    Some(_) => {
                        return Err(QfaError::InvalidMachine(format!(
                            "delta({q}, {sigma:?}) targets an unknown state"
                        )))
                    }
                    None => {
                        return Err(QfaError::InvalidMachine(format!(
                            "delta not total: missing ({}, {sigma:?})",
                            self.states[q]
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// δ̂ extended over a symbol sequence, starting at `q`.
    pub fn delta_hat(&self, q: usize, word: &[Symbol]) -> Result<usize> {
        let mut cur = q;
        for sigma in word {
            cur = *self
                .delta
                .get(&(cur, sigma.clone()))
                .ok_or_else(|| QfaError::UnknownSymbol(sigma.clone()))?;
        }
        Ok(cur)
    }

    pub fn verdict_of(&self, q: usize) -> Verdict {
        if self.accepting.contains(&q) {
            Verdict::Accept
        } else if self.rejecting.contains(&q) {
            Verdict::Reject
        } else {
            Verdict::Neither
        }
    }
}

/// Runs the DFA on `x` (endmarkers appended per the machine's flags) and
/// returns the halting class of the final state.
pub fn dfa_run(m: &Dfa, x: &[Symbol]) -> Result<Verdict> {
    let mut word: Str = Vec::with_capacity(x.len() + 2);
    if m.endmarkers.left {
        word.push(LEFT_ENDMARKER.to_string());
    }
    for sigma in x {
        if !m.input_alphabet.contains(sigma) {
            return Err(QfaError::UnknownSymbol(sigma.clone()));
        }
        word.push(sigma.clone());
    }
    if m.endmarkers.right {
        word.push(RIGHT_ENDMARKER.to_string());
    }
    Ok(m.verdict_of(m.delta_hat(m.initial, &word)?))
}

/// One-way probabilistic finite automaton: per-symbol stochastic matrices
/// under the column-is-image convention (column q is the distribution over
/// successors of state q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pfa {
    pub states: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    pub endmarkers: Endmarkers,
    /// matrices[σ][i][j] = probability of moving to state i from state j.
    pub matrices: BTreeMap<Symbol, Vec<Vec<f64>>>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub rejecting: BTreeSet<usize>,
}

impl Pfa {
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.accepting.intersection(&self.rejecting).next().is_some() {
            return Err(QfaError::InvalidMachine(
                "accepting and rejecting sets overlap".into(),
            ));
        }
        for (sigma, m) in &self.matrices {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(QfaError::DimensionMismatch(format!(
                    "stochastic matrix for {sigma:?} is not {n}x{n}"
                )));
            }
            for j in 0..n {
                let col_sum: f64 = (0..n).map(|i| m[i][j]).sum();
                if (col_sum - 1.0).abs() > TOL {
                    return Err(QfaError::InvalidMachine(format!(
                        "column {j} of matrix {sigma:?} sums to {col_sum}"
                    )));
                }
                if (0..n).any(|i| m[i][j] < -TOL) {
                    return Err(QfaError::InvalidMachine(format!(
                        "negative entry in matrix {sigma:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a probabilistic or quantum run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub p_acc: f64,
    pub p_rej: f64,
    pub p_residual: f64,
    /// Optional per-step (p_acc(x,i), p_rej(x,i)) traces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<(f64, f64)>>,
}

impl RunOutcome {
    pub fn close_to(&self, other: &RunOutcome, tol: f64) -> bool {
        (self.p_acc - other.p_acc).abs() <= tol
            && (self.p_rej - other.p_rej).abs() <= tol
            && (self.p_residual - other.p_residual).abs() <= tol
    }
}

/// Runs the PFA by folding stochastic matrices over ¢x$ and reading the final
/// distribution's mass on accepting and rejecting states.
pub fn pfa_run(m: &Pfa, x: &[Symbol]) -> Result<RunOutcome> {
    m.validate()?;
    let n = m.states.len();
    let mut dist = vec![0.0f64; n];
    dist[m.initial] = 1.0;
    let mut word: Str = Vec::new();
    if m.endmarkers.left {
        word.push(LEFT_ENDMARKER.to_string());
    }
    word.extend(x.iter().cloned());
    if m.endmarkers.right {
        word.push(RIGHT_ENDMARKER.to_string());
    }
    for sigma in &word {
        let mat = m
            .matrices
            .get(sigma)
            .ok_or_else(|| QfaError::UnknownSymbol(sigma.clone()))?;
        let mut next = vec![0.0f64; n];
        for j in 0..n {
            if dist[j] == 0.0 {
                continue;
            }
            for i in 0..n {
                next[i] += mat[i][j] * dist[j];
            }
        }
        dist = next;
    }
    let p_acc: f64 = m.accepting.iter().map(|&q| dist[q]).sum();
    let p_rej: f64 = m.rejecting.iter().map(|&q| dist[q]).sum();
    let p_residual = (1.0 - p_acc - p_rej).max(0.0);
    Ok(RunOutcome {
        p_acc,
        p_rej,
        p_residual,
        traces: None,
    })
}

/// Measure-many one-way quantum finite automaton.
///
/// `initial_vector` and `halt_offset` generalize the standard sextuple so that
/// the left-endmarker elimination pass can fold T_¢|q₀⟩ into the start of the
/// run; ordinary machines leave them unset/zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qfa {
    pub states: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    pub endmarkers: Endmarkers,
    pub unitaries: BTreeMap<Symbol, ComplexMatrix>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub rejecting: BTreeSet<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub initial_vector: Option<StateVector>,
    #[serde(skip_serializing_if = "is_zero_pair", default)]
    pub halt_offset: (f64, f64),
}

fn is_zero_pair(p: &(f64, f64)) -> bool {
    p.0 == 0.0 && p.1 == 0.0
}

impl Qfa {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn partition(&self) -> MeasurementPartition {
        MeasurementPartition::new(
            self.dim(),
            self.accepting.iter().copied().collect(),
            self.rejecting.iter().copied().collect(),
        )
    }

    pub fn effective_alphabet(&self) -> Vec<Symbol> {
        let mut a = Vec::new();
        if self.endmarkers.left {
            a.push(LEFT_ENDMARKER.to_string());
        }
        a.extend(self.input_alphabet.iter().cloned());
        if self.endmarkers.right {
            a.push(RIGHT_ENDMARKER.to_string());
        }
        a
    }
}

/// One line of a structural-validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValidationDefect {
    Unitarity { symbol: Symbol, defect: f64 },
    Dimension { symbol: Symbol, rows: usize, cols: usize },
    PartitionOverlap { state: String },
    MissingSymbol { symbol: Symbol },
    BadInitial,
    BadInitialVector { norm_defect: f64 },
}

/// Lists unitarity defects, state-partition defects, and alphabet coverage
/// gaps; an empty report means the machine is valid.
pub fn qfa_validate(m: &Qfa) -> Vec<ValidationDefect> {
    let mut defects = Vec::new();
    let n = m.dim();
    if m.initial >= n {
        defects.push(ValidationDefect::BadInitial);
    }
    for q in m.accepting.intersection(&m.rejecting) {
        defects.push(ValidationDefect::PartitionOverlap {
            state: m.states.get(*q).cloned().unwrap_or_else(|| format!("#{q}")),
        });
    }
    for sigma in m.effective_alphabet() {
        match m.unitaries.get(&sigma) {
            None => defects.push(ValidationDefect::MissingSymbol { symbol: sigma }),
            Some(u) if u.rows != n || u.cols != n => defects.push(ValidationDefect::Dimension {
                symbol: sigma,
                rows: u.rows,
                cols: u.cols,
            }),
            Some(u) => {
                let d = u.unitarity_defect();
                if d > TOL {
                    defects.push(ValidationDefect::Unitarity { symbol: sigma, defect: d });
                }
            }
        }
    }
    if let Some(v) = &m.initial_vector {
        let total = v.norm_sq() + m.halt_offset.0 + m.halt_offset.1;
        if v.dim() != n || (total - 1.0).abs() > TOL {
            defects.push(ValidationDefect::BadInitialVector {
                norm_defect: (total - 1.0).abs(),
            });
        }
    }
    defects
}

/// Folds the extended transition over ¢x$ (endmarkers per flags) starting from
/// (|q₀⟩, 0, 0) and reports the accumulated probabilities.
pub fn qfa_run(m: &Qfa, x: &[Symbol]) -> Result<RunOutcome> {
    qfa_run_traced(m, x, false)
}

pub fn qfa_run_traced(m: &Qfa, x: &[Symbol], want_traces: bool) -> Result<RunOutcome> {
    let defects = qfa_validate(m);
    if !defects.is_empty() {
        return Err(QfaError::InvalidMachine(format!("{defects:?}")));
    }
    let parts = m.partition();
    let mut psi = match &m.initial_vector {
        Some(v) => HaltingTriple {
            phi: v.clone(),
            gamma_acc: m.halt_offset.0,
            gamma_rej: m.halt_offset.1,
        },
        None => HaltingTriple::initial(m.dim(), m.initial),
    };
    let mut word: Str = Vec::new();
    if m.endmarkers.left {
        word.push(LEFT_ENDMARKER.to_string());
    }
    word.extend(x.iter().cloned());
    if m.endmarkers.right {
        word.push(RIGHT_ENDMARKER.to_string());
    }
    let mut traces = Vec::new();
    for sigma in &word {
        let u = m
            .unitaries
            .get(sigma)
            .ok_or_else(|| QfaError::UnknownSymbol(sigma.clone()))?;
        let before = (psi.gamma_acc, psi.gamma_rej);
        psi = hat_t_apply_unchecked(u, &parts, &psi)?;
        if want_traces {
            traces.push((psi.gamma_acc - before.0, psi.gamma_rej - before.1));
        }
    }
    let outcome = RunOutcome {
        p_acc: psi.gamma_acc,
        p_rej: psi.gamma_rej,
        p_residual: psi.phi.norm_sq(),
        traces: if want_traces { Some(traces) } else { None },
    };
    debug_assert!(
        (outcome.p_acc + outcome.p_rej + outcome.p_residual - 1.0).abs() < TOL,
        "probability conservation violated"
    );
    Ok(outcome)
}

/// Reversibility report: `Ok` means every (target, symbol) has at most one
/// source state.
#[derive(Debug, Clone, PartialEq)]
pub enum ReversibilityReport {
    Reversible,
    Violations(Vec<(usize, Symbol, Vec<usize>)>),
}

pub fn rfa_check(m: &Dfa) -> ReversibilityReport {
    let mut violations = Vec::new();
    for sigma in m.effective_alphabet() {
        let mut sources: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for q in 0..m.states.len() {
            if let Some(&t) = m.delta.get(&(q, sigma.clone())) {
                sources.entry(t).or_default().push(q);
            }
        }
        for (target, srcs) in sources {
            if srcs.len() >= 2 {
                violations.push((target, sigma.clone(), srcs));
            }
        }
    }
    if violations.is_empty() {
        ReversibilityReport::Reversible
    } else {
        ReversibilityReport::Violations(violations)
    }
}

/// Embeds a reversible DFA into a measure-many machine by turning each
/// symbol's (injective, hence bijective) transition map into a permutation
/// matrix.
pub fn dfa_to_qfa(m: &Dfa) -> Result<Qfa> {
    m.validate()?;
    if !matches!(rfa_check(m), ReversibilityReport::Reversible) {
        return Err(QfaError::InvalidMachine(
            "dfa_to_qfa requires a reversible machine".into(),
        ));
    }
    let n = m.states.len();
    let mut unitaries = BTreeMap::new();
    for sigma in m.effective_alphabet() {
        let mut u = ComplexMatrix::zeros(n, n);
        for q in 0..n {
            let t = m.delta[&(q, sigma.clone())];
            u[(t, q)] = crate::linalg::C::new(1.0, 0.0);
        }
        unitaries.insert(sigma, u);
    }
    Ok(Qfa {
        states: m.states.clone(),
        input_alphabet: m.input_alphabet.clone(),
        endmarkers: m.endmarkers,
        unitaries,
        initial: m.initial,
        accepting: m.accepting.clone(),
        rejecting: m.rejecting.clone(),
        initial_vector: None,
        halt_offset: (0.0, 0.0),
    })
}

/// Witness for a violation of the partial order condition: two states with a
/// distinguishing string `z` and nonempty `x`, `y` such that
/// δ̂(q₁,x) = δ̂(q₂,x) = q₂ and δ̂(q₂,y) = q₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialOrderWitness {
    pub q1: usize,
    pub q2: usize,
    pub x: Str,
    pub y: Str,
    pub z: Str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartialOrderResult {
    Satisfied,
    Witness(PartialOrderWitness),
}

/// Searches for a violation of the partial order condition by bounded BFS over
/// state pairs (all search depths capped at |Q|²).
pub fn partial_order_condition_check(m: &Dfa) -> Result<PartialOrderResult> {
    m.validate()?;
    let n = m.states.len();
    let bound = n * n;
    // Halting class of a state, with the right endmarker applied if in use.
    let class = |q: usize| -> Result<Verdict> {
        let fin = if m.endmarkers.right {
            m.delta_hat(q, &[RIGHT_ENDMARKER.to_string()])?
        } else {
            q
        };
        Ok(m.verdict_of(fin))
    };
    // Distinguishing strings via BFS on ordered pairs; dist[(a,b)] = shortest z
    // with class(δ̂(a,z)) ≠ class(δ̂(b,z)), z possibly empty.
    let mut dist: HashMap<(usize, usize), Str> = HashMap::new();
    let mut queue = VecDeque::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && class(a)? != class(b)? {
                dist.insert((a, b), Vec::new());
                queue.push_back((a, b));
            }
        }
    }
    // Backward closure: if (δ(a,σ), δ(b,σ)) is distinguishable, so is (a,b).
    while let Some((a2, b2)) = queue.pop_front() {
        let z2 = dist[&(a2, b2)].clone();
        if z2.len() >= bound {
            continue;
        }
        for sigma in &m.input_alphabet {
            for a in 0..n {
                for b in 0..n {
                    if a == b || dist.contains_key(&(a, b)) {
                        continue;
                    }
                    if m.delta[&(a, sigma.clone())] == a2 && m.delta[&(b, sigma.clone())] == b2 {
                        let mut z = vec![sigma.clone()];
                        z.extend(z2.iter().cloned());
                        dist.insert((a, b), z);
                        queue.push_back((a, b));
                    }
                }
            }
        }
    }
    // Shortest nonempty word driving state a to state b over Σ.
    let reach = |from: usize, to: usize| -> Option<Str> {
        let mut seen: HashMap<usize, Str> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back((from, Vec::new()));
        while let Some((q, w)) = queue.pop_front() {
            if w.len() >= bound {
                continue;
            }
            for sigma in &m.input_alphabet {
                let t = m.delta[&(q, sigma.clone())];
                let mut w2 = w.clone();
                w2.push(sigma.clone());
                if t == to {
                    return Some(w2);
                }
                if !seen.contains_key(&t) {
                    seen.insert(t, w2.clone());
                    queue.push_back((t, w2));
                }
            }
        }
        None
    };
    // Shortest nonempty word x with δ̂(q1,x) = δ̂(q2,x) = q2: BFS on the pair.
    let joint_reach = |q1: usize, q2: usize| -> Option<Str> {
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(((q1, q2), Vec::<Symbol>::new()));
        while let Some(((a, b), w)) = queue.pop_front() {
            if w.len() >= bound {
                continue;
            }
            for sigma in &m.input_alphabet {
                let (ta, tb) = (m.delta[&(a, sigma.clone())], m.delta[&(b, sigma.clone())]);
                let mut w2 = w.clone();
                w2.push(sigma.clone());
                if ta == q2 && tb == q2 {
                    return Some(w2);
                }
                if !seen.contains_key(&(ta, tb)) {
                    seen.insert((ta, tb), ());
                    queue.push_back(((ta, tb), w2));
                }
            }
        }
        None
    };
    for q1 in 0..n {
        for q2 in 0..n {
            if q1 == q2 || !dist.contains_key(&(q1, q2)) {
                continue;
            }
            if let (Some(x), Some(y)) = (joint_reach(q1, q2), reach(q2, q1)) {
                return Ok(PartialOrderResult::Witness(PartialOrderWitness {
                    q1,
                    q2,
                    x,
                    y,
                    z: dist[&(q1, q2)].clone(),
                }));
            }
        }
    }
    Ok(PartialOrderResult::Satisfied)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn simple_dfa(accepting: &[usize]) -> Dfa {
        // Parity-of-ones over {0,1}: state 0 = even count.
        let mut delta = BTreeMap::new();
        for q in 0..2usize {
            delta.insert((q, "0".to_string()), q);
            delta.insert((q, "1".to_string()), 1 - q);
        }
        Dfa {
            states: vec!["even".into(), "odd".into()],
            input_alphabet: vec!["0".into(), "1".into()],
            endmarkers: Endmarkers::NONE,
            delta,
            initial: 0,
            accepting: accepting.iter().copied().collect(),
            rejecting: (0..2).filter(|q| !accepting.contains(q)).collect(),
        }
    }

    #[test]
    fn dfa_accept_all() {
        let mut delta = BTreeMap::new();
        delta.insert((0usize, "a".to_string()), 0usize);
        let m = Dfa {
            states: vec!["q0".into()],
            input_alphabet: vec!["a".into()],
            endmarkers: Endmarkers::NONE,
            delta,
            initial: 0,
            accepting: [0].into_iter().collect(),
            rejecting: BTreeSet::new(),
        };
        assert_eq!(dfa_run(&m, &str_of("aaa")).unwrap(), Verdict::Accept);
        assert_eq!(dfa_run(&m, &[]).unwrap(), Verdict::Accept);
    }

    #[test]
    fn dfa_parity() {
        let m = simple_dfa(&[0]);
        assert_eq!(dfa_run(&m, &str_of("11")).unwrap(), Verdict::Accept);
        assert_eq!(dfa_run(&m, &str_of("110")).unwrap(), Verdict::Accept);
        assert_eq!(dfa_run(&m, &str_of("1")).unwrap(), Verdict::Reject);
    }

    #[test]
    fn dfa_unknown_symbol() {
        let m = simple_dfa(&[0]);
        assert!(dfa_run(&m, &str_of("2")).is_err());
    }

    #[test]
    fn qfa_identity_machine_never_halts() {
        let mut unitaries = BTreeMap::new();
        for s in ["¢", "a", "$"] {
            unitaries.insert(s.to_string(), ComplexMatrix::identity(2));
        }
        let m = Qfa {
            states: vec!["q0".into(), "q1".into()],
            input_alphabet: vec!["a".into()],
            endmarkers: Endmarkers::BOTH,
            unitaries,
            initial: 0,
            accepting: [1].into_iter().collect(),
            rejecting: BTreeSet::new(),
            initial_vector: None,
            halt_offset: (0.0, 0.0),
        };
        let out = qfa_run(&m, &str_of("aaa")).unwrap();
        assert_eq!((out.p_acc, out.p_rej), (0.0, 0.0));
        assert!((out.p_residual - 1.0).abs() < TOL);
    }

    #[test]
    fn qfa_validate_defects() {
        let mut unitaries = BTreeMap::new();
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 0)] = crate::linalg::C::new(2.0, 0.0);
        unitaries.insert("a".to_string(), bad);
        let m = Qfa {
            states: vec!["q0".into(), "q1".into()],
            input_alphabet: vec!["a".into()],
            endmarkers: Endmarkers::NONE,
            unitaries,
            initial: 0,
            accepting: [1].into_iter().collect(),
            rejecting: [1].into_iter().collect(),
            initial_vector: None,
            halt_offset: (0.0, 0.0),
        };
        let report = qfa_validate(&m);
        assert!(report
            .iter()
            .any(|d| matches!(d, ValidationDefect::Unitarity { .. })));
        assert!(report
            .iter()
            .any(|d| matches!(d, ValidationDefect::PartitionOverlap { .. })));
    }

    #[test]
    fn rfa_check_permutation_automaton() {
        let m = simple_dfa(&[0]);
        assert_eq!(rfa_check(&m), ReversibilityReport::Reversible);
    }

    #[test]
    fn rfa_check_violation() {
        let mut m = simple_dfa(&[0]);
        // Both states map to 0 on '0'.
        m.delta.insert((1, "0".to_string()), 0);
        match rfa_check(&m) {
            ReversibilityReport::Violations(v) => {
                assert!(v.iter().any(|(t, s, _)| *t == 0 && s == "0"));
            }
            _ => panic!("expected violation"),
        }
    }

    #[test]
    fn dfa_embedding_agrees_with_qfa() {
        // Mod-3 counter over {a} that only enters halting states on $.
        let names = ["c0", "c1", "c2", "A", "R", "R2"];
        let mut delta = BTreeMap::new();
        for q in 0..6usize {
            delta.insert((q, LEFT_ENDMARKER.to_string()), q);
        }
        for (q, t) in [(0, 1), (1, 2), (2, 0), (3, 3), (4, 4), (5, 5)] {
            delta.insert((q, "a".to_string()), t);
        }
        for (q, t) in [(0, 3), (1, 4), (2, 5), (3, 0), (4, 1), (5, 2)] {
            delta.insert((q, RIGHT_ENDMARKER.to_string()), t);
        }
        let m = Dfa {
            states: names.iter().map(|s| s.to_string()).collect(),
            input_alphabet: vec!["a".into()],
            endmarkers: Endmarkers::BOTH,
            delta,
            initial: 0,
            accepting: [3].into_iter().collect(),
            rejecting: [4, 5].into_iter().collect(),
        };
        assert_eq!(rfa_check(&m), ReversibilityReport::Reversible);
        let q = dfa_to_qfa(&m).unwrap();
        for len in 0..=6 {
            let x: Str = vec!["a".to_string(); len];
            let dv = dfa_run(&m, &x).unwrap();
            let out = qfa_run(&q, &x).unwrap();
            match dv {
                Verdict::Accept => assert!((out.p_acc - 1.0).abs() < TOL),
                Verdict::Reject => assert!((out.p_rej - 1.0).abs() < TOL),
                Verdict::Neither => assert!((out.p_residual - 1.0).abs() < TOL),
            }
        }
    }

    #[test]
    fn partial_order_single_state_satisfied() {
        let mut delta = BTreeMap::new();
        delta.insert((0usize, "a".to_string()), 0usize);
        let m = Dfa {
            states: vec!["q0".into()],
            input_alphabet: vec!["a".into()],
            endmarkers: Endmarkers::NONE,
            delta,
            initial: 0,
            accepting: [0].into_iter().collect(),
            rejecting: BTreeSet::new(),
        };
        assert_eq!(
            partial_order_condition_check(&m).unwrap(),
            PartialOrderResult::Satisfied
        );
    }

    #[test]
    fn partial_order_la_violated() {
        let m = zoo::minimal_dfa_la();
        match partial_order_condition_check(&m).unwrap() {
            PartialOrderResult::Witness(w) => {
                // Validate the witness directly.
                let x2 = m.delta_hat(w.q1, &w.x).unwrap();
                assert_eq!(x2, m.delta_hat(w.q2, &w.x).unwrap());
                assert_eq!(x2, w.q2);
                assert_eq!(m.delta_hat(w.q2, &w.y).unwrap(), w.q1);
                assert!(!w.x.is_empty() && !w.y.is_empty());
                let c1 = m.verdict_of(m.delta_hat(w.q1, &w.z).unwrap());
                let c2 = m.verdict_of(m.delta_hat(w.q2, &w.z).unwrap());
                assert_ne!(c1, c2);
            }
            PartialOrderResult::Satisfied => panic!("expected a witness on L_a"),
        }
    }

    #[test]
    fn partial_order_even_length_satisfied() {
        let m = zoo::minimal_dfa_even_length();
        assert_eq!(
            partial_order_condition_check(&m).unwrap(),
            PartialOrderResult::Satisfied
        );
    }
}
