//! Rewritable-advice one-way quantum automata, simulated exactly on the joint
//! space span{|q⟩|y⟩}.
//!
//! Each input symbol σ has one local unitary `V_σ` acting on (inner state ⊗
//! one advice cell); the positioned operator applies `V_σ` to the state
//! register and cell `i`, identity elsewhere. The final position may carry an
//! override (needed by measurement deferral), as may arbitrary fixed
//! positions. Measurements act on the state register only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::advice::QuantAdvice;
use crate::error::{QfaError, Result};
use crate::linalg::{ComplexMatrix, C, TOL};
use crate::machines::{RunOutcome, Symbol};

/// Default cap on simulated input length (the joint space is |Q|·|Γ̃|ⁿ).
pub const DEFAULT_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMode {
    /// Projective measurement after every positioned operator.
    PerStep,
    /// One measurement after the final position.
    FinalOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewritableQfa {
    pub states: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    /// Working advice alphabet Γ̃ (may strictly contain the advice alphabet
    /// that initial advice states are written over).
    pub advice_alphabet: Vec<Symbol>,
    /// Local unitaries on the |Q|·|Γ̃|-dimensional (state ⊗ cell) space,
    /// basis index q·|Γ̃| + γ.
    pub local_unitaries: BTreeMap<Symbol, ComplexMatrix>,
    /// Override applied at the last input position (defer-measure output).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub last_unitaries: BTreeMap<Symbol, ComplexMatrix>,
    /// Overrides for fixed 1-based positions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub position_overrides: BTreeMap<(usize, Symbol), ComplexMatrix>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    pub rejecting: BTreeSet<usize>,
    pub measure_mode: MeasureMode,
    pub cap: usize,
}

impl RewritableQfa {
    pub fn local_dim(&self) -> usize {
        self.states.len() * self.advice_alphabet.len()
    }

    pub fn gamma_index(&self, tau: &str) -> Result<usize> {
        self.advice_alphabet
            .iter()
            .position(|t| t == tau)
            .ok_or_else(|| QfaError::UnknownSymbol(tau.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.local_dim();
        if self.accepting.intersection(&self.rejecting).next().is_some() {
            return Err(QfaError::InvalidMachine(
                "accepting and rejecting sets overlap".into(),
            ));
        }
        let all = self
            .local_unitaries
            .iter()
            .chain(self.last_unitaries.iter())
            .map(|(s, u)| (s.clone(), u))
            .chain(
                self.position_overrides
                    .iter()
                    .map(|((_, s), u)| (s.clone(), u)),
            );
        for (symbol, u) in all {
            if u.rows != d || u.cols != d {
                return Err(QfaError::DimensionMismatch(format!(
                    "local operator for {symbol:?} is {}x{}, expected {d}x{d}",
                    u.rows, u.cols
                )));
            }
            let defect = u.unitarity_defect();
            if defect > TOL {
                return Err(QfaError::NonUnitary { symbol, defect });
            }
        }
        for sigma in &self.input_alphabet {
            if !self.local_unitaries.contains_key(sigma) {
                return Err(QfaError::InvalidMachine(format!(
                    "no local operator for input symbol {sigma:?}"
                )));
            }
        }
        Ok(())
    }

    /// Operator to apply at 1-based position `i` of an input of length `n`.
    pub fn operator_at(&self, sigma: &str, i: usize, n: usize) -> Result<&ComplexMatrix> {
        if let Some(u) = self.position_overrides.get(&(i, sigma.to_string())) {
            return Ok(u);
        }
        if i == n {
            if let Some(u) = self.last_unitaries.get(sigma) {
                return Ok(u);
            }
        }
        self.local_unitaries
            .get(sigma)
            .ok_or_else(|| QfaError::UnknownSymbol(sigma.to_string()))
    }
}

/// Dense amplitude vector over Q × Γ̃ⁿ; basis index
/// q·Gⁿ + Σ_j γ_j·G^{n-1-j} with G = |Γ̃|.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub n_states: usize,
    pub gamma: usize,
    pub n: usize,
    pub amps: Vec<C>,
}

impl JointState {
    pub fn zeros(n_states: usize, gamma: usize, n: usize) -> JointState {
        let cells = gamma.pow(n as u32);
        JointState {
            n_states,
            gamma,
            n,
            amps: vec![C::new(0.0, 0.0); n_states * cells],
        }
    }

    pub fn cells_dim(&self) -> usize {
        self.gamma.pow(self.n as u32)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &JointState) -> C {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Mass on a set of inner states, summed over all cell contents.
    pub fn state_mass(&self, states: &BTreeSet<usize>) -> f64 {
        let cells = self.cells_dim();
        states
            .iter()
            .map(|&q| {
                self.amps[q * cells..(q + 1) * cells]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Zeroes every amplitude on the given inner states.
    pub fn project_out(&mut self, states: &BTreeSet<usize>) {
        let cells = self.cells_dim();
        for &q in states {
            for a in &mut self.amps[q * cells..(q + 1) * cells] {
                *a = C::new(0.0, 0.0);
            }
        }
    }

    /// Applies a local unitary (on state ⊗ one cell, basis q·G + γ) at
    /// 0-based cell `cell`, identity on all other cells.
    pub fn apply_local(&mut self, v: &ComplexMatrix, cell: usize) -> Result<()> {
        let g = self.gamma;
        let local = self.n_states * g;
        if v.rows != local || v.cols != local {
            return Err(QfaError::DimensionMismatch(format!(
                "local operator is {}x{}, expected {local}x{local}",
                v.rows, v.cols
            )));
        }
        let cells = self.cells_dim();
        let stride = g.pow((self.n - 1 - cell) as u32);
        // Enumerate base offsets: cell contents with the target cell at digit 0.
        let rest = cells / g;
        let mut local_in = vec![C::new(0.0, 0.0); local];
        let mut local_out = vec![C::new(0.0, 0.0); local];
        for r in 0..rest {
            // Decompose r into the digits of all cells except `cell`.
            let low = r % stride;
            let high = r / stride;
            let base = high * stride * g + low;
            for q in 0..self.n_states {
                for gi in 0..g {
                    local_in[q * g + gi] = self.amps[q * cells + base + gi * stride];
                }
            }
            for (i, out) in local_out.iter_mut().enumerate() {
                let mut acc = C::new(0.0, 0.0);
                for (j, inp) in local_in.iter().enumerate() {
                    if inp.re != 0.0 || inp.im != 0.0 {
                        acc += v[(i, j)] * *inp;
                    }
                }
                *out = acc;
            }
            for q in 0..self.n_states {
                for gi in 0..g {
                    self.amps[q * cells + base + gi * stride] = local_out[q * g + gi];
                }
            }
        }
        Ok(())
    }
}

/// Builds the initial joint state |q₀⟩|φ_n⟩ from the advice amplitudes.
pub fn initial_joint_state(m: &RewritableQfa, phi: &QuantAdvice, n: usize) -> Result<JointState> {
    let g = m.advice_alphabet.len();
    let mut psi = JointState::zeros(m.states.len(), g, n);
    let cells = psi.cells_dim();
    for (y, alpha) in phi.at(n)? {
        let mut off = 0usize;
        for tau in y {
            off = off * g + m.gamma_index(tau)?;
        }
        psi.amps[m.initial * cells + off] += *alpha;
    }
    Ok(psi)
}

/// Runs the machine on `x` with quantum advice, using the machine's measure
/// mode.
pub fn rqfa_run(m: &RewritableQfa, x: &[Symbol], phi: &QuantAdvice) -> Result<RunOutcome> {
    rqfa_run_mode(m, x, phi, m.measure_mode)
}

/// Runs with an explicit measure mode (used by transform equivalence tests).
pub fn rqfa_run_mode(
    m: &RewritableQfa,
    x: &[Symbol],
    phi: &QuantAdvice,
    mode: MeasureMode,
) -> Result<RunOutcome> {
    m.validate()?;
    let n = x.len();
    if n > m.cap {
        return Err(QfaError::CapExceeded { len: n, cap: m.cap });
    }
    let mut psi = initial_joint_state(m, phi, n)?;
    let mut p_acc = 0.0;
    let mut p_rej = 0.0;
    let mut traces = Vec::new();
    for (i, sigma) in x.iter().enumerate() {
        let v = m.operator_at(sigma, i + 1, n)?;
        psi.apply_local(v, i)?;
        if mode == MeasureMode::PerStep {
            let a = psi.state_mass(&m.accepting);
            let r = psi.state_mass(&m.rejecting);
            p_acc += a;
            p_rej += r;
            traces.push((a, r));
            psi.project_out(&m.accepting);
            psi.project_out(&m.rejecting);
        }
    }
    if mode == MeasureMode::FinalOnly {
        p_acc = psi.state_mass(&m.accepting);
        p_rej = psi.state_mass(&m.rejecting);
        psi.project_out(&m.accepting);
        psi.project_out(&m.rejecting);
    }
    let p_residual = psi.norm_sq();
    debug_assert!((p_acc + p_rej + p_residual - 1.0).abs() < TOL);
    Ok(RunOutcome {
        p_acc,
        p_rej,
        p_residual,
        traces: if mode == MeasureMode::PerStep {
            Some(traces)
        } else {
            None
        },
    })
}

pub fn pair_symbol(a: &str, b: &str) -> Symbol {
    format!("{a};{b}")
}

fn tuple_symbol(parts: &[&str]) -> Symbol {
    parts.join(";")
}

/// Verdict class of a tuple of component states under a tensor partition.
pub enum TupleClass {
    Acc,
    Rej,
    Other,
}

/// Tensor product of final-only machines over a shared input alphabet, with a
/// caller-chosen halting partition on state tuples.
pub fn tensor_machines(
    ms: &[&RewritableQfa],
    classify: impl Fn(&[usize]) -> TupleClass,
) -> Result<RewritableQfa> {
    let k = ms.len();
    if k == 0 {
        return Err(QfaError::ArgumentOutOfRange("empty tensor".into()));
    }
    for m in ms {
        m.validate()?;
        if m.measure_mode != MeasureMode::FinalOnly {
            return Err(QfaError::Unsupported(
                "tensor construction requires final-only machines (defer measurement first)"
                    .into(),
            ));
        }
        if !m.position_overrides.is_empty() {
            return Err(QfaError::Unsupported(
                "tensor construction does not support fixed position overrides".into(),
            ));
        }
        if m.input_alphabet != ms[0].input_alphabet {
            return Err(QfaError::InvalidMachine("input alphabet mismatch".into()));
        }
    }
    let q_sizes: Vec<usize> = ms.iter().map(|m| m.states.len()).collect();
    let g_sizes: Vec<usize> = ms.iter().map(|m| m.advice_alphabet.len()).collect();
    let nq: usize = q_sizes.iter().product();
    let ng: usize = g_sizes.iter().product();

    let decompose = |mut idx: usize, sizes: &[usize]| -> Vec<usize> {
        let mut parts = vec![0; sizes.len()];
        for j in (0..sizes.len()).rev() {
            parts[j] = idx % sizes[j];
            idx /= sizes[j];
        }
        parts
    };

    let mut states = Vec::with_capacity(nq);
    let mut accepting = BTreeSet::new();
    let mut rejecting = BTreeSet::new();
    for qi in 0..nq {
        let parts = decompose(qi, &q_sizes);
        let names: Vec<&str> = parts
            .iter()
            .enumerate()
            .map(|(j, &p)| ms[j].states[p].as_str())
            .collect();
        states.push(tuple_symbol(&names));
        match classify(&parts) {
            TupleClass::Acc => {
                accepting.insert(qi);
            }
            TupleClass::Rej => {
                rejecting.insert(qi);
            }
            TupleClass::Other => {}
        }
    }
    let mut advice_alphabet = Vec::with_capacity(ng);
    for gi in 0..ng {
        let parts = decompose(gi, &g_sizes);
        let names: Vec<&str> = parts
            .iter()
            .enumerate()
            .map(|(j, &p)| ms[j].advice_alphabet[p].as_str())
            .collect();
        advice_alphabet.push(tuple_symbol(&names));
    }

    // Kronecker product on the interleaved (state ⊗ cell) basis.
    let local = nq * ng;
    let build = |mats: &[&ComplexMatrix]| -> ComplexMatrix {
        let mut w = ComplexMatrix::zeros(local, local);
        for row in 0..local {
            let (qr, gr) = (row / ng, row % ng);
            let qr_parts = decompose(qr, &q_sizes);
            let gr_parts = decompose(gr, &g_sizes);
            for col in 0..local {
                let (qc, gc) = (col / ng, col % ng);
                let qc_parts = decompose(qc, &q_sizes);
                let gc_parts = decompose(gc, &g_sizes);
                let mut entry = C::new(1.0, 0.0);
                for j in 0..k {
                    let vj = mats[j];
                    let r = qr_parts[j] * g_sizes[j] + gr_parts[j];
                    let c = qc_parts[j] * g_sizes[j] + gc_parts[j];
                    entry *= vj[(r, c)];
                    if entry == C::new(0.0, 0.0) {
                        break;
                    }
                }
                if entry != C::new(0.0, 0.0) {
                    w[(row, col)] = entry;
                }
            }
        }
        w
    };

    let mut local_unitaries = BTreeMap::new();
    let mut last_unitaries = BTreeMap::new();
    for sigma in &ms[0].input_alphabet {
        let regulars: Vec<&ComplexMatrix> =
            ms.iter().map(|m| &m.local_unitaries[sigma]).collect();
        local_unitaries.insert(sigma.clone(), build(&regulars));
        if ms.iter().any(|m| m.last_unitaries.contains_key(sigma)) {
            let lasts: Vec<&ComplexMatrix> = ms
                .iter()
                .map(|m| m.last_unitaries.get(sigma).unwrap_or(&m.local_unitaries[sigma]))
                .collect();
            last_unitaries.insert(sigma.clone(), build(&lasts));
        }
    }

    let initial = ms.iter().fold(0usize, |acc, m| {
        acc * m.states.len() + m.initial
    });
    Ok(RewritableQfa {
        states,
        input_alphabet: ms[0].input_alphabet.clone(),
        advice_alphabet,
        local_unitaries,
        last_unitaries,
        position_overrides: BTreeMap::new(),
        initial,
        accepting,
        rejecting,
        measure_mode: MeasureMode::FinalOnly,
        cap: ms.iter().map(|m| m.cap).min().unwrap(),
    })
}

/// Tensor product of quantum advice families: pairs of support strings zipped
/// into tuple symbols, amplitudes multiplied.
pub fn tensor_advice(phis: &[&QuantAdvice]) -> Result<QuantAdvice> {
    if phis.is_empty() {
        return Err(QfaError::ArgumentOutOfRange("empty tensor".into()));
    }
    let mut alphabet = Vec::new();
    {
        // Cartesian product of component alphabets, in component-major order.
        let mut partial: Vec<Vec<&str>> = vec![Vec::new()];
        for phi in phis {
            let mut next = Vec::new();
            for p in &partial {
                for s in &phi.alphabet {
                    let mut p2 = p.clone();
                    p2.push(s.as_str());
                    next.push(p2);
                }
            }
            partial = next;
        }
        for p in partial {
            alphabet.push(tuple_symbol(&p));
        }
    }
    let lengths: Vec<usize> = phis[0].table.keys().copied().collect();
    let mut table = BTreeMap::new();
    for n in lengths {
        if phis.iter().any(|p| !p.table.contains_key(&n)) {
            continue;
        }
        let mut support: Vec<(Vec<Symbol>, C)> = vec![(Vec::new(), C::new(1.0, 0.0))];
        // Incrementally zip component strings into tuple-symbol strings.
        let mut acc: Vec<(Vec<&crate::machines::Str>, C)> = vec![(Vec::new(), C::new(1.0, 0.0))];
        for phi in phis {
            let entries = phi.at(n)?;
            let mut next = Vec::new();
            for (ys, amp) in &acc {
                for (y, a) in entries {
                    let mut ys2 = ys.clone();
                    ys2.push(y);
                    next.push((ys2, amp * a));
                }
            }
            acc = next;
        }
        support.clear();
        for (ys, amp) in acc {
            let zipped: Vec<Symbol> = (0..n)
                .map(|j| {
                    let parts: Vec<&str> = ys.iter().map(|y| y[j].as_str()).collect();
                    tuple_symbol(&parts)
                })
                .collect();
            support.push((zipped, amp));
        }
        support.sort_by(|a, b| a.0.cmp(&b.0));
        table.insert(n, support);
    }
    Ok(QuantAdvice { alphabet, table })
}

/// Tensor-product machine realizing intersection on product advice: accepts
/// iff both components accept, so acceptance probabilities multiply.
pub fn rqfa_product(m1: &RewritableQfa, m2: &RewritableQfa) -> Result<RewritableQfa> {
    let acc1 = m1.accepting.clone();
    let rej1 = m1.rejecting.clone();
    let acc2 = m2.accepting.clone();
    let rej2 = m2.rejecting.clone();
    tensor_machines(&[m1, m2], move |parts| {
        let (p1, p2) = (parts[0], parts[1]);
        if rej1.contains(&p1) || rej2.contains(&p2) {
            TupleClass::Rej
        } else if acc1.contains(&p1) && acc2.contains(&p2) {
            TupleClass::Acc
        } else {
            TupleClass::Other
        }
    })
}

/// Swaps the accepting and rejecting sets; valid only for final-only machines.
pub fn rqfa_complement(m: &RewritableQfa) -> Result<RewritableQfa> {
    if m.measure_mode != MeasureMode::FinalOnly {
        return Err(QfaError::Unsupported(
            "complement requires a final-only machine (defer measurement first)".into(),
        ));
    }
    let mut out = m.clone();
    std::mem::swap(&mut out.accepting, &mut out.rejecting);
    Ok(out)
}

/// Union machine via De Morgan: the complement of the product of the
/// component complements. On product advice the acceptance probability is
/// p₁ + p₂ − p₁p₂.
pub fn rqfa_union(m1: &RewritableQfa, m2: &RewritableQfa) -> Result<RewritableQfa> {
    rqfa_complement(&rqfa_product(&rqfa_complement(m1)?, &rqfa_complement(m2)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point_advice(alphabet: Vec<Symbol>, y: crate::machines::Str) -> QuantAdvice {
        let n = y.len();
        QuantAdvice {
            alphabet,
            table: [(n, vec![(y, C::new(1.0, 0.0))])].into_iter().collect(),
        }
    }

    #[test]
    fn identity_machine_never_halts() {
        let m = RewritableQfa {
            states: vec!["q0".into(), "q1".into()],
            input_alphabet: vec!["a".into()],
            advice_alphabet: vec!["0".into(), "1".into()],
            local_unitaries: [("a".to_string(), ComplexMatrix::identity(4))]
                .into_iter()
                .collect(),
            last_unitaries: BTreeMap::new(),
            position_overrides: BTreeMap::new(),
            initial: 0,
            accepting: [1].into_iter().collect(),
            rejecting: BTreeSet::new(),
            measure_mode: MeasureMode::PerStep,
            cap: DEFAULT_CAP,
        };
        let phi = point_advice(m.advice_alphabet.clone(), vec!["0".into(), "1".into()]);
        let out = rqfa_run(&m, &["a".to_string(), "a".to_string()], &phi).unwrap();
        assert_eq!((out.p_acc, out.p_rej), (0.0, 0.0));
        assert!((out.p_residual - 1.0).abs() < TOL);
    }

    #[test]
    fn locality_of_positioned_operator() {
        // The positioned operator must act as V ⊗ identity on the other cells:
        // reconstruct its full matrix and compare entrywise.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (nq, g, n) = (2usize, 2usize, 3usize);
        let v = random_unitary(nq * g, &mut rng);
        let cells = g.pow(n as u32);
        let dim = nq * cells;
        for cell in 0..n {
            let stride = g.pow((n - 1 - cell) as u32);
            for col in 0..dim {
                let mut psi = JointState::zeros(nq, g, n);
                psi.amps[col] = C::new(1.0, 0.0);
                psi.apply_local(&v, cell).unwrap();
                let (qc, yc) = (col / cells, col % cells);
                let gc = (yc / stride) % g;
                for row in 0..dim {
                    let (qr, yr) = (row / cells, row % cells);
                    let gr = (yr / stride) % g;
                    let others_equal = yr - gr * stride == yc - gc * stride;
                    let expected = if others_equal {
                        v[(qr * g + gr, qc * g + gc)]
                    } else {
                        C::new(0.0, 0.0)
                    };
                    assert!((psi.amps[row] - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_multiplies_acceptance() {
        // Two random final-only machines on product advice.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mk = |rng: &mut ChaCha8Rng| RewritableQfa {
                states: vec!["q0".into(), "q1".into(), "q2".into()],
                input_alphabet: vec!["a".into(), "b".into()],
                advice_alphabet: vec!["0".into(), "1".into()],
                local_unitaries: [
                    ("a".to_string(), random_unitary(6, rng)),
                    ("b".to_string(), random_unitary(6, rng)),
                ]
                .into_iter()
                .collect(),
                last_unitaries: BTreeMap::new(),
                position_overrides: BTreeMap::new(),
                initial: 0,
                accepting: [1].into_iter().collect(),
                rejecting: [2].into_iter().collect(),
                measure_mode: MeasureMode::FinalOnly,
                cap: DEFAULT_CAP,
            };
            let m1 = mk(&mut rng);
            let m2 = mk(&mut rng);
            let y1: crate::machines::Str = (0..2)
                .map(|_| if rng.gen_bool(0.5) { "0" } else { "1" }.to_string())
                .collect();
            let y2: crate::machines::Str = (0..2)
                .map(|_| if rng.gen_bool(0.5) { "0" } else { "1" }.to_string())
                .collect();
            let phi1 = point_advice(m1.advice_alphabet.clone(), y1);
            let phi2 = point_advice(m2.advice_alphabet.clone(), y2);
            let x = vec!["a".to_string(), "b".to_string()];
            let p1 = rqfa_run(&m1, &x, &phi1).unwrap().p_acc;
            let p2 = rqfa_run(&m2, &x, &phi2).unwrap().p_acc;
            let prod = rqfa_product(&m1, &m2).unwrap();
            let phi = tensor_advice(&[&phi1, &phi2]).unwrap();
            let p = rqfa_run(&prod, &x, &phi).unwrap().p_acc;
            assert!((p - p1 * p2).abs() < TOL, "{p} vs {}", p1 * p2);

            let union = rqfa_union(&m1, &m2).unwrap();
            let pu = rqfa_run(&union, &x, &phi).unwrap().p_acc;
            let want = p1 + p2 - p1 * p2;
            assert!((pu - want).abs() < TOL, "{pu} vs {want}");
        }
    }

    #[test]
    fn complement_swaps_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let m = RewritableQfa {
            states: vec!["q0".into(), "q1".into(), "q2".into()],
            input_alphabet: vec!["a".into()],
            advice_alphabet: vec!["0".into(), "1".into()],
            local_unitaries: [("a".to_string(), random_unitary(6, &mut rng))]
                .into_iter()
                .collect(),
            last_unitaries: BTreeMap::new(),
            position_overrides: BTreeMap::new(),
            initial: 0,
            accepting: [1].into_iter().collect(),
            rejecting: [2].into_iter().collect(),
            measure_mode: MeasureMode::FinalOnly,
            cap: DEFAULT_CAP,
        };
        let phi = point_advice(m.advice_alphabet.clone(), vec!["1".into()]);
        let x = vec!["a".to_string()];
        let base = rqfa_run(&m, &x, &phi).unwrap();
        let comp = rqfa_complement(&m).unwrap();
        let out = rqfa_run(&comp, &x, &phi).unwrap();
        assert!((out.p_acc - base.p_rej).abs() < 1e-15);
        assert!((out.p_rej - base.p_acc).abs() < 1e-15);
        let double = rqfa_complement(&comp).unwrap();
        let back = rqfa_run(&double, &x, &phi).unwrap();
        assert!(back.close_to(&base, 1e-15));
        // Per-step machines must be deferred first.
        let mut per_step = m.clone();
        per_step.measure_mode = MeasureMode::PerStep;
        assert!(rqfa_complement(&per_step).is_err());
    }

    #[test]
    fn cap_enforced() {
        let mut m = RewritableQfa {
            states: vec!["q0".into()],
            input_alphabet: vec!["a".into()],
            advice_alphabet: vec!["0".into()],
            local_unitaries: [("a".to_string(), ComplexMatrix::identity(1))]
                .into_iter()
                .collect(),
            last_unitaries: BTreeMap::new(),
            position_overrides: BTreeMap::new(),
            initial: 0,
            accepting: BTreeSet::new(),
            rejecting: BTreeSet::new(),
            measure_mode: MeasureMode::FinalOnly,
            cap: 2,
        };
        m.cap = 2;
        let phi = point_advice(vec!["0".into()], vec!["0".into(), "0".into(), "0".into()]);
        let x = vec!["a".to_string(); 3];
        assert!(matches!(
            rqfa_run(&m, &x, &phi),
            Err(QfaError::CapExceeded { .. })
        ));
    }
}
