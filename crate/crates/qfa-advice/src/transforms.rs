//! Machine-to-machine and advice-to-advice constructions as verified passes:
//! endmarker elimination, measurement deferral, error amplification, advice
//! conversions, and the DFA-to-rewritable lift.

use std::collections::{BTreeMap, BTreeSet};

use crate::advice::{split_track_symbol, track_symbol, DetAdvice, QuantAdvice, RandAdvice};
use crate::error::{QfaError, Result};
use crate::linalg::{ComplexMatrix, StateVector, C};
use crate::machines::{Dfa, Qfa, Str, Symbol, LEFT_ENDMARKER, RIGHT_ENDMARKER};
use crate::rewritable::{
    initial_joint_state, tensor_advice, tensor_machines, JointState, MeasureMode, RewritableQfa,
    TupleClass,
};

/// Advice symbol name carrying the deferred right-endmarker tag.
pub fn dollar_tag(tau: &str) -> Symbol {
    format!("{tau}/$")
}

fn div_tag(state: &str, tau: &str) -> Symbol {
    format!("{state}/{tau}")
}

fn shadow_name(state: &str) -> String {
    format!("~{state}")
}

/// Completes a partial column map (assigned columns must be orthonormal and
/// their combined support must be exactly spanned) to a full unitary by
/// matching unassigned domain indices to untouched basis rows in index order.
pub fn unitary_completion(
    dim: usize,
    assigned: &BTreeMap<usize, Vec<C>>,
) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(dim, dim);
    let mut touched = vec![false; dim];
    for (&col, v) in assigned {
        if v.len() != dim || col >= dim {
            return Err(QfaError::DimensionMismatch(
                "completion column out of range".into(),
            ));
        }
        for (row, c) in v.iter().enumerate() {
            if c.norm() > 1e-12 {
                touched[row] = true;
            }
            m[(row, col)] = *c;
        }
    }
    let mut free_rows = (0..dim).filter(|&r| !touched[r]);
    for col in 0..dim {
        if assigned.contains_key(&col) {
            continue;
        }
        let row = free_rows.next().ok_or_else(|| {
            QfaError::InvalidMachine("unitary completion ran out of free rows".into())
        })?;
        m[(row, col)] = C::new(1.0, 0.0);
    }
    let defect = m.unitarity_defect();
    if defect > 1e-12 {
        return Err(QfaError::NonUnitary {
            symbol: "<completion>".into(),
            defect,
        });
    }
    Ok(m)
}

/// Reorders a machine's states into the canonical (Q_non, Q_acc, Q_rej) block
/// order required by the sweeping construction.
pub fn canonical_reorder(m: &Qfa) -> Qfa {
    let n = m.dim();
    let non: Vec<usize> = (0..n)
        .filter(|q| !m.accepting.contains(q) && !m.rejecting.contains(q))
        .collect();
    let acc: Vec<usize> = m.accepting.iter().copied().collect();
    let rej: Vec<usize> = m.rejecting.iter().copied().collect();
    let order: Vec<usize> = non.iter().chain(&acc).chain(&rej).copied().collect();
    // perm[old] = new position.
    let mut perm = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    let mut out = m.clone();
    out.states = order.iter().map(|&q| m.states[q].clone()).collect();
    out.initial = perm[m.initial];
    out.accepting = m.accepting.iter().map(|&q| perm[q]).collect();
    out.rejecting = m.rejecting.iter().map(|&q| perm[q]).collect();
    out.unitaries = m
        .unitaries
        .iter()
        .map(|(s, u)| (s.clone(), u.permute_basis(&perm)))
        .collect();
    if let Some(v) = &m.initial_vector {
        let mut nv = StateVector::zeros(n);
        for q in 0..n {
            nv.amps[perm[q]] = v.amps[q];
        }
        out.initial_vector = Some(nv);
    }
    out
}

/// The block permutation swapping the old halting block with the fresh
/// halting copies: identity on the k0 non-halting states, swap of the two
/// (k1+k2)-sized halting blocks.
pub fn sweeping_matrix(k0: usize, k1: usize, k2: usize) -> ComplexMatrix {
    let h = k1 + k2;
    let dim = k0 + 2 * h;
    let mut s = ComplexMatrix::zeros(dim, dim);
    for i in 0..k0 {
        s[(i, i)] = C::new(1.0, 0.0);
    }
    for i in 0..h {
        s[(k0 + h + i, k0 + i)] = C::new(1.0, 0.0);
        s[(k0 + i, k0 + h + i)] = C::new(1.0, 0.0);
    }
    s
}

fn embed_with_identity(u: &ComplexMatrix, extra: usize) -> ComplexMatrix {
    u.block_diag(&ComplexMatrix::identity(extra))
}

/// Eliminates the right endmarker: sweeping construction plus an advice
/// retagging that folds the $ application into the final track symbol.
///
/// The final-symbol operator is the double-sweep composite
/// S·diag(U_$,I)·S·diag(U_{[σ/τ]},I), with the old halting states kept halting
/// alongside their fresh copies; the halting mass measured between [σ/τ] and $
/// lands in the old block, the post-$ mass in the new one, and a single
/// measurement captures both.
pub fn drop_right_endmarker(m: &Qfa, h: &DetAdvice) -> Result<(Qfa, DetAdvice)> {
    let machine = drop_right_endmarker_machine(m)?;
    let mut table = BTreeMap::new();
    for (&n, y) in &h.table {
        table.insert(n, retag_last(y));
    }
    let mut alphabet = h.alphabet.clone();
    alphabet.extend(h.alphabet.iter().map(|t| dollar_tag(t)));
    Ok((machine, DetAdvice { alphabet, table }))
}

/// Randomized-advice variant: every support string gets its last symbol
/// retagged.
pub fn drop_right_endmarker_rand(m: &Qfa, d: &RandAdvice) -> Result<(Qfa, RandAdvice)> {
    let machine = drop_right_endmarker_machine(m)?;
    let mut table = BTreeMap::new();
    for (&n, entries) in &d.table {
        table.insert(
            n,
            entries
                .iter()
                .map(|(y, p)| (retag_last(y), *p))
                .collect::<Vec<_>>(),
        );
    }
    let mut alphabet = d.alphabet.clone();
    alphabet.extend(d.alphabet.iter().map(|t| dollar_tag(t)));
    Ok((machine, RandAdvice { alphabet, table }))
}

fn retag_last(y: &[Symbol]) -> Str {
    let mut out = y.to_vec();
    if let Some(last) = out.last_mut() {
        *last = dollar_tag(last);
    }
    out
}

fn drop_right_endmarker_machine(m: &Qfa) -> Result<Qfa> {
    if !m.endmarkers.right {
        return Err(QfaError::Unsupported(
            "machine has no right endmarker to drop".into(),
        ));
    }
    if m.initial_vector.is_some() {
        return Err(QfaError::Unsupported(
            "drop the right endmarker before folding the left one".into(),
        ));
    }
    let m = canonical_reorder(m);
    let k1 = m.accepting.len();
    let k2 = m.rejecting.len();
    let k0 = m.dim() - k1 - k2;
    let h = k1 + k2;
    let s = sweeping_matrix(k0, k1, k2);
    let u_dollar = m
        .unitaries
        .get(RIGHT_ENDMARKER)
        .ok_or_else(|| QfaError::UnknownSymbol(RIGHT_ENDMARKER.into()))?;

    let mut states = m.states.clone();
    for q in m.accepting.iter().chain(m.rejecting.iter()) {
        states.push(format!("{}'", m.states[*q]));
    }
    let mut accepting: BTreeSet<usize> = m.accepting.clone();
    let mut rejecting: BTreeSet<usize> = m.rejecting.clone();
    // Fresh copies follow the same (acc block, rej block) order.
    for i in 0..k1 {
        accepting.insert(k0 + h + i);
    }
    for i in 0..k2 {
        rejecting.insert(k0 + h + k1 + i);
    }

    let mut unitaries = BTreeMap::new();
    let mut input_alphabet = Vec::new();
    for sigma in &m.input_alphabet {
        let u = &m.unitaries[sigma];
        let interior = s.matmul(&embed_with_identity(u, h));
        unitaries.insert(sigma.clone(), interior.clone());
        input_alphabet.push(sigma.clone());
        // Final-position variant: the advice's last symbol carries the $ tag.
        let (upper, lower) = split_track_symbol(sigma)?;
        let final_symbol = track_symbol(&upper, &dollar_tag(&lower));
        let composite = s
            .matmul(&embed_with_identity(u_dollar, h))
            .matmul(&s)
            .matmul(&embed_with_identity(u, h));
        unitaries.insert(final_symbol.clone(), composite);
        input_alphabet.push(final_symbol);
    }
    if m.endmarkers.left {
        let u = m
            .unitaries
            .get(LEFT_ENDMARKER)
            .ok_or_else(|| QfaError::UnknownSymbol(LEFT_ENDMARKER.into()))?;
        unitaries.insert(
            LEFT_ENDMARKER.to_string(),
            s.matmul(&embed_with_identity(u, h)),
        );
    }
    Ok(Qfa {
        states,
        input_alphabet,
        endmarkers: crate::machines::Endmarkers {
            left: m.endmarkers.left,
            right: false,
        },
        unitaries,
        initial: m.initial,
        accepting,
        rejecting,
        initial_vector: None,
        halt_offset: (0.0, 0.0),
    })
}

/// Eliminates the left endmarker by folding T_¢|q₀⟩ into an initial state
/// vector plus constant halting offsets.
pub fn drop_left_endmarker(m: &Qfa) -> Result<Qfa> {
    if !m.endmarkers.left {
        return Err(QfaError::Unsupported(
            "machine has no left endmarker to drop".into(),
        ));
    }
    let u = m
        .unitaries
        .get(LEFT_ENDMARKER)
        .ok_or_else(|| QfaError::UnknownSymbol(LEFT_ENDMARKER.into()))?;
    let start = match &m.initial_vector {
        Some(v) => v.clone(),
        None => StateVector::basis(m.dim(), m.initial),
    };
    let image = crate::linalg::mat_apply(u, &start)?;
    let parts = m.partition();
    let p_acc0 = parts.acc.apply(&image).norm_sq();
    let p_rej0 = parts.rej.apply(&image).norm_sq();
    let residual = parts.non.apply(&image);
    let mut out = m.clone();
    out.endmarkers.left = false;
    out.unitaries.remove(LEFT_ENDMARKER);
    out.initial_vector = Some(residual);
    out.halt_offset = (m.halt_offset.0 + p_acc0, m.halt_offset.1 + p_rej0);
    Ok(out)
}

/// Output of [`defer_measurement`], with the index maps the diagnostics need.
pub struct DeferredMachine {
    pub machine: RewritableQfa,
    pub advice: QuantAdvice,
    /// Indices of the shadow states inside the new machine.
    pub shadow_states: BTreeSet<usize>,
}

/// Postpones all measurements of a per-step machine to a single terminal one
/// by diverting halting amplitude into non-halting shadow states that tag the
/// advice cell where halting occurred.
pub fn defer_measurement(m: &RewritableQfa, phi: &QuantAdvice) -> Result<DeferredMachine> {
    m.validate()?;
    if m.measure_mode != MeasureMode::PerStep {
        return Err(QfaError::Unsupported(
            "defer_measurement expects a per-step machine".into(),
        ));
    }
    if !m.last_unitaries.is_empty() || !m.position_overrides.is_empty() {
        return Err(QfaError::Unsupported(
            "defer_measurement expects position-uniform operators".into(),
        ));
    }
    let nq = m.states.len();
    let gamma = m.advice_alphabet.clone();
    let g = gamma.len();
    let halting: Vec<usize> = (0..nq)
        .filter(|q| m.accepting.contains(q) || m.rejecting.contains(q))
        .collect();
    let shadow_of: BTreeMap<usize, usize> = halting
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, nq + i))
        .collect();

    let mut states = m.states.clone();
    for &q in &halting {
        states.push(shadow_name(&m.states[q]));
    }
    let nq2 = states.len();

    // Γ̃ = Γ ∪ {$-tags} ∪ {state tags for all q} ∪ {shadow tags}.
    let mut advice_alphabet = gamma.clone();
    for tau in &gamma {
        advice_alphabet.push(dollar_tag(tau));
    }
    for q in 0..nq {
        for tau in &gamma {
            advice_alphabet.push(div_tag(&m.states[q], tau));
        }
    }
    for &q in &halting {
        for tau in &gamma {
            advice_alphabet.push(div_tag(&shadow_name(&m.states[q]), tau));
        }
    }
    let g2 = advice_alphabet.len();
    let tag_index: BTreeMap<&str, usize> = advice_alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let local2 = nq2 * g2;
    let idx2 = |q: usize, tau: usize| q * g2 + tau;

    let mut local_unitaries = BTreeMap::new();
    let mut last_unitaries = BTreeMap::new();
    for sigma in &m.input_alphabet {
        let v = &m.local_unitaries[sigma];
        // Interior operator: live components evolve under V, halting
        // components divert into shadows that tag the cell; shadows passing
        // later cells tag them with their own name.
        let mut interior: BTreeMap<usize, Vec<C>> = BTreeMap::new();
        for q in 0..nq {
            for t in 0..g {
                let mut col = vec![C::new(0.0, 0.0); local2];
                for q2 in 0..nq {
                    for t2 in 0..g {
                        let c = v[(q2 * g + t2, q * g + t)];
                        if c.norm() <= 0.0 {
                            continue;
                        }
                        let dest = match shadow_of.get(&q2) {
                            Some(&sq) => idx2(sq, tag_index[div_tag(&m.states[q2], &gamma[t2]).as_str()]),
                            None => idx2(q2, t2),
                        };
                        col[dest] += c;
                    }
                }
                interior.insert(idx2(q, t), col);
            }
        }
        for &q in &halting {
            let sq = shadow_of[&q];
            for t in 0..g {
                let mut col = vec![C::new(0.0, 0.0); local2];
                let tag = div_tag(&shadow_name(&m.states[q]), &gamma[t]);
                col[idx2(sq, tag_index[tag.as_str()])] = C::new(1.0, 0.0);
                interior.insert(idx2(sq, t), col);
            }
        }
        local_unitaries.insert(sigma.clone(), unitary_completion(local2, &interior)?);

        // Final operator: apply V through the $-tagged cell, tagging the cell
        // with the reached state; shadows fold back to their halting original.
        let mut fin: BTreeMap<usize, Vec<C>> = BTreeMap::new();
        for q in 0..nq {
            for t in 0..g {
                let dom = idx2(q, tag_index[dollar_tag(&gamma[t]).as_str()]);
                let mut col = vec![C::new(0.0, 0.0); local2];
                for q2 in 0..nq {
                    for t2 in 0..g {
                        let c = v[(q2 * g + t2, q * g + t)];
                        if c.norm() <= 0.0 {
                            continue;
                        }
                        let dest = idx2(q2, tag_index[div_tag(&m.states[q2], &gamma[t2]).as_str()]);
                        col[dest] += c;
                    }
                }
                fin.insert(dom, col);
            }
        }
        for &q in &halting {
            let sq = shadow_of[&q];
            for t in 0..g {
                let dom = idx2(sq, tag_index[dollar_tag(&gamma[t]).as_str()]);
                let mut col = vec![C::new(0.0, 0.0); local2];
                let tag = div_tag(&shadow_name(&m.states[q]), &gamma[t]);
                col[idx2(q, tag_index[tag.as_str()])] = C::new(1.0, 0.0);
                fin.insert(dom, col);
            }
        }
        last_unitaries.insert(sigma.clone(), unitary_completion(local2, &fin)?);
    }

    // Advice: replace each support string's last symbol with its $-tag.
    let mut table = BTreeMap::new();
    for (&n, entries) in &phi.table {
        table.insert(
            n,
            entries
                .iter()
                .map(|(y, a)| {
                    let mut y2 = y.clone();
                    if let Some(last) = y2.last_mut() {
                        *last = dollar_tag(last);
                    }
                    (y2, *a)
                })
                .collect::<Vec<_>>(),
        );
    }
    let advice = QuantAdvice {
        alphabet: advice_alphabet.clone(),
        table,
    };
    let machine = RewritableQfa {
        states,
        input_alphabet: m.input_alphabet.clone(),
        advice_alphabet,
        local_unitaries,
        last_unitaries,
        position_overrides: BTreeMap::new(),
        initial: m.initial,
        accepting: m.accepting.clone(),
        rejecting: m.rejecting.clone(),
        measure_mode: MeasureMode::FinalOnly,
        cap: m.cap,
    };
    Ok(DeferredMachine {
        machine,
        advice,
        shadow_states: shadow_of.values().copied().collect(),
    })
}

/// Final-time diverted-branch vectors of a deferred machine on `x`: branch `i`
/// is the amplitude diverted into shadow states at step `i`, evolved through
/// the remaining operators. Distinct branches must be orthogonal.
pub fn defer_branches(
    d: &DeferredMachine,
    x: &[Symbol],
) -> Result<Vec<JointState>> {
    let m = &d.machine;
    let n = x.len();
    if n > m.cap {
        return Err(QfaError::CapExceeded { len: n, cap: m.cap });
    }
    let live_states: BTreeSet<usize> = (0..m.states.len())
        .filter(|q| !d.shadow_states.contains(q))
        .collect();
    let mut live = initial_joint_state(m, &d.advice, n)?;
    let mut branches: Vec<JointState> = Vec::new();
    for (i, sigma) in x.iter().enumerate() {
        let v = m.operator_at(sigma, i + 1, n)?.clone();
        for b in branches.iter_mut() {
            b.apply_local(&v, i)?;
        }
        live.apply_local(&v, i)?;
        if i + 1 < n {
            let mut diverted = live.clone();
            diverted.project_out(&live_states);
            live.project_out(&d.shadow_states);
            if diverted.norm_sq() > 1e-18 {
                branches.push(diverted);
            }
        }
    }
    Ok(branches)
}

/// Minimal odd number of parallel repetitions driving a per-input error of
/// `eps0` below `eps` under majority vote; 1 when no amplification is needed.
pub fn amplify_k(eps0: f64, eps: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&eps0) {
        return Err(QfaError::EpsilonOutOfRange(eps0));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(QfaError::EpsilonOutOfRange(eps));
    }
    if eps0 <= eps {
        return Ok(1);
    }
    let mut k = 3usize;
    loop {
        if majority_failure_tail(k, eps0) <= eps {
            return Ok(k);
        }
        k += 2;
        if k > 10_001 {
            return Err(QfaError::ArgumentOutOfRange(
                "amplification does not converge".into(),
            ));
        }
    }
}

/// P[Binomial(k, eps0) ≥ ⌈k/2⌉]: the probability that a majority of k
/// independent runs err.
pub fn majority_failure_tail(k: usize, eps0: f64) -> f64 {
    let half_up = k / 2 + 1;
    let mut total = 0.0f64;
    for i in half_up..=k {
        total += binomial(k, i) * eps0.powi(i as i32) * (1.0 - eps0).powi((k - i) as i32);
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Majority-vote amplification: k-fold tensor machine with the tuple
/// partition Q'_acc / Q'_rej by majority, Q'_other reported as residual.
pub fn amplify(
    m: &RewritableQfa,
    phi: &QuantAdvice,
    eps0: f64,
    eps: f64,
) -> Result<(RewritableQfa, QuantAdvice, usize)> {
    if m.measure_mode != MeasureMode::FinalOnly {
        return Err(QfaError::Unsupported(
            "amplify requires a final-only machine (defer measurement first)".into(),
        ));
    }
    let k = amplify_k(eps0, eps)?;
    if k == 1 {
        return Ok((m.clone(), phi.clone(), 1));
    }
    let acc = m.accepting.clone();
    let rej = m.rejecting.clone();
    let majority = k / 2 + 1;
    let machines: Vec<&RewritableQfa> = std::iter::repeat(m).take(k).collect();
    let tensor = tensor_machines(&machines, move |parts| {
        let acc_count = parts.iter().filter(|p| acc.contains(p)).count();
        let rej_count = parts.iter().filter(|p| rej.contains(p)).count();
        if acc_count >= majority {
            TupleClass::Acc
        } else if rej_count >= majority {
            TupleClass::Rej
        } else {
            TupleClass::Other
        }
    })?;
    let phis: Vec<&QuantAdvice> = std::iter::repeat(phi).take(k).collect();
    Ok((tensor, tensor_advice(&phis)?, k))
}

/// Embeds a distribution into amplitudes √D_n(y).
pub fn randomized_to_quantum(d: &RandAdvice) -> Result<QuantAdvice> {
    let mut table = BTreeMap::new();
    for &n in d.table.keys() {
        let entries = d.at(n)?;
        table.insert(
            n,
            entries
                .iter()
                .map(|(y, p)| (y.clone(), C::new(p.max(0.0).sqrt(), 0.0)))
                .collect::<Vec<_>>(),
        );
    }
    Ok(QuantAdvice {
        alphabet: d.alphabet.clone(),
        table,
    })
}

/// Collapses amplitudes to the distribution D_n(y) = |α_y|².
pub fn quantum_to_randomized(phi: &QuantAdvice) -> Result<RandAdvice> {
    let mut table = BTreeMap::new();
    for &n in phi.table.keys() {
        let entries = phi.at(n)?;
        table.insert(
            n,
            entries
                .iter()
                .map(|(y, a)| (y.clone(), a.norm_sqr()))
                .collect::<Vec<_>>(),
        );
    }
    Ok(RandAdvice {
        alphabet: phi.alphabet.clone(),
        table,
    })
}

/// Lifts a total DFA over a track alphabet into a rewritable machine that
/// dumps the current inner state onto the advice cell, making every move
/// injective; advice becomes the amplitude embedding of the distribution.
pub fn lift_dfa_to_rqfa(m: &Dfa, d: &RandAdvice) -> Result<(RewritableQfa, QuantAdvice)> {
    m.validate()?;
    if m.endmarkers.right {
        return Err(QfaError::Unsupported(
            "lift_dfa_to_rqfa expects a machine without a right endmarker".into(),
        ));
    }
    let initial = if m.endmarkers.left {
        m.delta_hat(m.initial, &[LEFT_ENDMARKER.to_string()])?
    } else {
        m.initial
    };
    // Split the DFA's track symbols into input letters and advice letters.
    let mut uppers: Vec<Symbol> = Vec::new();
    for s in &m.input_alphabet {
        let (u, _) = split_track_symbol(s)?;
        if !uppers.contains(&u) {
            uppers.push(u);
        }
    }
    let gamma = d.alphabet.clone();
    let mut advice_alphabet = gamma.clone();
    for q in &m.states {
        for tau in &gamma {
            advice_alphabet.push(div_tag(q, tau));
        }
    }
    let g2 = advice_alphabet.len();
    let tag_index: BTreeMap<&str, usize> = advice_alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let nq = m.states.len();
    let local = nq * g2;
    let mut local_unitaries = BTreeMap::new();
    for sigma in &uppers {
        let mut assigned: BTreeMap<usize, Vec<C>> = BTreeMap::new();
        for q in 0..nq {
            for (t, tau) in gamma.iter().enumerate() {
                let track = track_symbol(sigma, tau);
                let target = *m
                    .delta
                    .get(&(q, track.clone()))
                    .ok_or_else(|| QfaError::UnknownSymbol(track))?;
                let mut col = vec![C::new(0.0, 0.0); local];
                let cell = tag_index[div_tag(&m.states[q], tau).as_str()];
                col[target * g2 + cell] = C::new(1.0, 0.0);
                assigned.insert(q * g2 + t, col);
            }
        }
        local_unitaries.insert(sigma.clone(), unitary_completion(local, &assigned)?);
    }
    let machine = RewritableQfa {
        states: m.states.clone(),
        input_alphabet: uppers,
        advice_alphabet,
        local_unitaries,
        last_unitaries: BTreeMap::new(),
        position_overrides: BTreeMap::new(),
        initial,
        accepting: m.accepting.clone(),
        rejecting: m.rejecting.clone(),
        measure_mode: MeasureMode::FinalOnly,
        cap: crate::rewritable::DEFAULT_CAP,
    };
    machine.validate()?;
    Ok((machine, randomized_to_quantum(d)?))
}
