//! Advice specifications (deterministic, randomized, quantum), track
//! composition, and advised-run semantics for read-only advice tracks.
//!
//! Randomized and quantum advice always carry an explicit finite support per
//! length; Γⁿ is never enumerated implicitly. Advised runs over a distribution
//! are exact convex combinations over the support in lexicographic order —
//! never sampled.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{QfaError, Result};
use crate::linalg::{C, TOL};
use crate::machines::{dfa_run, pfa_run, qfa_run, Dfa, Pfa, Qfa, RunOutcome, Str, Symbol, Verdict};

/// Builds the track symbol `[σ|τ]`, rendered `"σ|τ"`. `'|'` is reserved.
pub fn track_symbol(upper: &str, lower: &str) -> Symbol {
    format!("{upper}|{lower}")
}

/// Splits a track symbol back into its upper and lower components.
pub fn split_track_symbol(s: &str) -> Result<(Symbol, Symbol)> {
    let (u, l) = s
        .split_once('|')
        .ok_or_else(|| QfaError::UnknownSymbol(s.to_string()))?;
    Ok((u.to_string(), l.to_string()))
}

/// A two-track string `[x/y]` with equal-length components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackString {
    pub upper: Str,
    pub lower: Str,
}

impl TrackString {
    /// The sequence of combined track symbols `[σ|τ]`.
    pub fn symbols(&self) -> Str {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| track_symbol(u, l))
            .collect()
    }
}

/// Element-wise pairing of an input string with an advice string.
pub fn track_join(x: &[Symbol], y: &[Symbol]) -> Result<TrackString> {
    if x.len() != y.len() {
        return Err(QfaError::TrackLengthMismatch {
            upper: x.len(),
            lower: y.len(),
        });
    }
    Ok(TrackString {
        upper: x.to_vec(),
        lower: y.to_vec(),
    })
}

/// Deterministic advice function h with |h(n)| = n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetAdvice {
    pub alphabet: Vec<Symbol>,
    pub table: BTreeMap<usize, Str>,
}

impl DetAdvice {
    pub fn at(&self, n: usize) -> Result<&Str> {
        let h = self
            .table
            .get(&n)
            .ok_or(QfaError::AdviceUndefined(n))?;
        if h.len() != n {
            return Err(QfaError::InvalidMachine(format!(
                "advice string at length {n} has {} symbols",
                h.len()
            )));
        }
        Ok(h)
    }

    /// Lemma 3's advice h(n) = 0^{n-1}1, tabulated for n ≤ max_n.
    pub fn zeros_then_one(max_n: usize) -> DetAdvice {
        let mut table = BTreeMap::new();
        table.insert(0, Vec::new());
        for n in 1..=max_n {
            let mut h = vec!["0".to_string(); n - 1];
            h.push("1".to_string());
            table.insert(n, h);
        }
        DetAdvice {
            alphabet: vec!["0".into(), "1".into()],
            table,
        }
    }
}

/// Randomized advice: a finitely supported distribution D_n over Γⁿ per length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandAdvice {
    pub alphabet: Vec<Symbol>,
    /// Support entries (y, D_n(y)) per length, kept in lexicographic order.
    pub table: BTreeMap<usize, Vec<(Str, f64)>>,
}

impl RandAdvice {
    pub fn at(&self, n: usize) -> Result<&[(Str, f64)]> {
        let support = self
            .table
            .get(&n)
            .ok_or(QfaError::AdviceUndefined(n))?;
        let mut total = 0.0;
        for (y, p) in support {
            if y.len() != n {
                return Err(QfaError::InvalidDistribution(format!(
                    "support string of length {} at advice length {n}",
                    y.len()
                )));
            }
            if *p < -TOL {
                return Err(QfaError::InvalidDistribution(format!(
                    "negative probability {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL {
            return Err(QfaError::InvalidDistribution(format!(
                "probabilities at length {n} sum to {total}"
            )));
        }
        Ok(support)
    }

    /// Point mass on a deterministic advice function.
    pub fn point_mass(h: &DetAdvice) -> RandAdvice {
        RandAdvice {
            alphabet: h.alphabet.clone(),
            table: h
                .table
                .iter()
                .map(|(&n, y)| (n, vec![(y.clone(), 1.0)]))
                .collect(),
        }
    }

    /// Uniform distribution over an explicit per-length list of strings.
    pub fn uniform_on(alphabet: Vec<Symbol>, per_len: BTreeMap<usize, Vec<Str>>) -> RandAdvice {
        let mut table = BTreeMap::new();
        for (n, mut strings) in per_len {
            strings.sort();
            strings.dedup();
            let p = 1.0 / strings.len() as f64;
            table.insert(n, strings.into_iter().map(|y| (y, p)).collect());
        }
        RandAdvice { alphabet, table }
    }

    /// Advice for Pal_#: at odd n = 2m+1, uniform over {y#y^R : y ∈ {0,1}^m};
    /// at even n, point mass on #ⁿ (no member has even length).
    pub fn palindrome_pairs(max_n: usize) -> RandAdvice {
        let mut per_len: BTreeMap<usize, Vec<Str>> = BTreeMap::new();
        for n in 0..=max_n {
            if n % 2 == 1 {
                let m = n / 2;
                let mut strings = Vec::new();
                for bits in 0..(1usize << m) {
                    let y: Str = (0..m)
                        .map(|i| ((bits >> i) & 1).to_string())
                        .collect();
                    let mut s = y.clone();
                    s.push("#".to_string());
                    s.extend(y.iter().rev().cloned());
                    strings.push(s);
                }
                per_len.insert(n, strings);
            } else {
                per_len.insert(n, vec![vec!["#".to_string(); n]]);
            }
        }
        Self::uniform_on(vec!["0".into(), "1".into(), "#".into()], per_len)
    }

    /// Advice for Dup: at even n = 2m, uniform over {yy : y ∈ {0,1}^m};
    /// at odd n, point mass on #ⁿ (no member has odd length; the # symbols
    /// force the recognizer into its coin-flip branch).
    pub fn dup_pairs(max_n: usize) -> RandAdvice {
        let mut per_len: BTreeMap<usize, Vec<Str>> = BTreeMap::new();
        for n in 0..=max_n {
            if n % 2 == 0 {
                let m = n / 2;
                let mut strings = Vec::new();
                for bits in 0..(1usize << m) {
                    let y: Str = (0..m)
                        .map(|i| ((bits >> i) & 1).to_string())
                        .collect();
                    let mut s = y.clone();
                    s.extend(y.iter().cloned());
                    strings.push(s);
                }
                per_len.insert(n, strings);
            } else {
                per_len.insert(n, vec![vec!["#".to_string(); n]]);
            }
        }
        Self::uniform_on(vec!["0".into(), "1".into(), "#".into()], per_len)
    }
}

/// Quantum advice: a normalized amplitude family over Γⁿ per length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantAdvice {
    pub alphabet: Vec<Symbol>,
    /// Support entries (y, α_y) per length, kept in lexicographic order.
    pub table: BTreeMap<usize, Vec<(Str, C)>>,
}

impl QuantAdvice {
    pub fn at(&self, n: usize) -> Result<&[(Str, C)]> {
        let support = self
            .table
            .get(&n)
            .ok_or(QfaError::AdviceUndefined(n))?;
        let mut total = 0.0;
        for (y, a) in support {
            if y.len() != n {
                return Err(QfaError::InvalidAmplitudes(format!(
                    "support string of length {} at advice length {n}",
                    y.len()
                )));
            }
            total += a.norm_sqr();
        }
        if (total - 1.0).abs() > TOL {
            return Err(QfaError::InvalidAmplitudes(format!(
                "amplitudes at length {n} have total mass {total}"
            )));
        }
        Ok(support)
    }
}

/// A machine that can consume a track string.
#[derive(Debug, Clone, PartialEq)]
pub enum Machine {
    Dfa(Dfa),
    Pfa(Pfa),
    Qfa(Qfa),
}

/// Runs any machine kind on a raw symbol sequence; deterministic verdicts are
/// reported as probability-1 outcomes.
pub fn machine_run(m: &Machine, x: &[Symbol]) -> Result<RunOutcome> {
    match m {
        Machine::Dfa(d) => {
            let v = dfa_run(d, x)?;
            let (p_acc, p_rej, p_residual) = match v {
                Verdict::Accept => (1.0, 0.0, 0.0),
                Verdict::Reject => (0.0, 1.0, 0.0),
                Verdict::Neither => (0.0, 0.0, 1.0),
            };
            Ok(RunOutcome {
                p_acc,
                p_rej,
                p_residual,
                traces: None,
            })
        }
        Machine::Pfa(p) => pfa_run(p, x),
        Machine::Qfa(q) => qfa_run(q, x),
    }
}

/// Runs `m` on the track string [x / h(|x|)].
pub fn run_with_det_advice(m: &Machine, h: &DetAdvice, x: &[Symbol]) -> Result<RunOutcome> {
    let hx = h.at(x.len())?;
    let track = track_join(x, hx)?;
    machine_run(m, &track.symbols())
}

/// Exact convex combination Σ_y D_n(y) · run(m, [x/y]) over the support in
/// lexicographic order.
pub fn run_with_randomized_advice(m: &Machine, d: &RandAdvice, x: &[Symbol]) -> Result<RunOutcome> {
    let support = d.at(x.len())?.to_vec();
    let mut branches: Vec<(Str, f64)> = support;
    branches.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = RunOutcome {
        p_acc: 0.0,
        p_rej: 0.0,
        p_residual: 0.0,
        traces: None,
    };
    for (y, p) in &branches {
        let track = track_join(x, y)?;
        let branch = machine_run(m, &track.symbols())?;
        out.p_acc += p * branch.p_acc;
        out.p_rej += p * branch.p_rej;
        out.p_residual += p * branch.p_residual;
    }
    Ok(out)
}

/// Read-only quantum advice collapses to randomized advice with
/// D_n(y) = |α_y|²; implemented as that convex combination.
pub fn run_with_quantum_advice_readonly(
    m: &Machine,
    phi: &QuantAdvice,
    x: &[Symbol],
) -> Result<RunOutcome> {
    let support = phi.at(x.len())?;
    let d = RandAdvice {
        alphabet: phi.alphabet.clone(),
        table: [(
            x.len(),
            support
                .iter()
                .map(|(y, a)| (y.clone(), a.norm_sqr()))
                .collect(),
        )]
        .into_iter()
        .collect(),
    };
    run_with_randomized_advice(m, &d, x)
}

/// Bounded-error classification: accept if p_acc ≥ 1−ε, reject if p_rej ≥ 1−ε.
pub fn classify(outcome: &RunOutcome, epsilon: f64) -> Result<Verdict> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(QfaError::EpsilonOutOfRange(epsilon));
    }
    if outcome.p_acc >= 1.0 - epsilon - TOL {
        Ok(Verdict::Accept)
    } else if outcome.p_rej >= 1.0 - epsilon - TOL {
        Ok(Verdict::Reject)
    } else {
        Ok(Verdict::Neither)
    }
}
