//! JSON file formats for machines and advice, plus the loading/saving glue
//! used by the CLI and the examples.
//!
//! Machines reference states by name; matrices are row-major arrays of
//! `[re, im]` pairs. All maps serialize with stable key order, and the
//! emission helpers round floats to 12 significant digits so reports diff
//! cleanly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::advice::{DetAdvice, QuantAdvice, RandAdvice};
use crate::error::{QfaError, Result};
use crate::linalg::{ComplexMatrix, StateVector, C};
use crate::machines::{Dfa, Endmarkers, Pfa, Qfa, Symbol};
use crate::rewritable::{MeasureMode, RewritableQfa, DEFAULT_CAP};
use crate::zoo;

pub type MatrixFile = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositionOverrideFile {
    pub position: usize,
    pub symbol: Symbol,
    pub matrix: MatrixFile,
}

/// On-disk machine description; `kind` selects which optional sections apply.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub kind: String,
    pub states: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advice_alphabet: Option<Vec<Symbol>>,
    pub endmarkers: Endmarkers,
    pub initial: String,
    pub accepting: Vec<String>,
    pub rejecting: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<BTreeMap<String, BTreeMap<Symbol, String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<Symbol, Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<BTreeMap<Symbol, MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_unitaries: Option<BTreeMap<Symbol, MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_unitaries: Option<BTreeMap<Symbol, MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_overrides: Option<Vec<PositionOverrideFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_vector: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halt_offset: Option<[f64; 2]>,
}

/// A machine deserialized into its concrete runtime type.
#[derive(Debug, Clone)]
pub enum LoadedMachine {
    Dfa(Dfa),
    Rfa(Dfa),
    Pfa(Pfa),
    Qfa(Qfa),
    Rqfa(RewritableQfa),
}

fn matrix_to_file(m: &ComplexMatrix) -> MatrixFile {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn matrix_from_file(f: &MatrixFile) -> Result<ComplexMatrix> {
    let rows = f.len();
    if rows == 0 || f.iter().any(|r| r.len() != f[0].len()) {
        return Err(QfaError::Schema("ragged or empty matrix".into()));
    }
    let cols = f[0].len();
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (r, row) in f.iter().enumerate() {
        for (c, [re, im]) in row.iter().enumerate() {
            m[(r, c)] = C::new(*re, *im);
        }
    }
    Ok(m)
}

impl MachineFile {
    fn state_index(&self) -> Result<BTreeMap<&str, usize>> {
        let mut idx = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if idx.insert(s.as_str(), i).is_some() {
                return Err(QfaError::Schema(format!("duplicate state name {s:?}")));
            }
        }
        Ok(idx)
    }

    fn resolve(&self, idx: &BTreeMap<&str, usize>, name: &str) -> Result<usize> {
        idx.get(name)
            .copied()
            .ok_or_else(|| QfaError::Schema(format!("undeclared state {name:?}")))
    }

    fn resolve_set(
        &self,
        idx: &BTreeMap<&str, usize>,
        names: &[String],
    ) -> Result<BTreeSet<usize>> {
        names.iter().map(|n| self.resolve(idx, n)).collect()
    }

    pub fn to_machine(&self) -> Result<LoadedMachine> {
        let idx = self.state_index()?;
        let initial = self.resolve(&idx, &self.initial)?;
        let accepting = self.resolve_set(&idx, &self.accepting)?;
        let rejecting = self.resolve_set(&idx, &self.rejecting)?;
        match self.kind.as_str() {
            "dfa" | "rfa" => {
                let delta_file = self
                    .delta
                    .as_ref()
                    .ok_or_else(|| QfaError::Schema("dfa/rfa needs \"delta\"".into()))?;
                let mut delta = BTreeMap::new();
                for (state, row) in delta_file {
                    let q = self.resolve(&idx, state)?;
                    for (sym, target) in row {
                        delta.insert((q, sym.clone()), self.resolve(&idx, target)?);
                    }
                }
                let m = Dfa {
                    states: self.states.clone(),
                    input_alphabet: self.input_alphabet.clone(),
                    endmarkers: self.endmarkers,
                    delta,
                    initial,
                    accepting,
                    rejecting,
                };
                m.validate()?;
                if self.kind == "rfa" {
                    if let crate::machines::ReversibilityReport::Violations(v) =
                        crate::machines::rfa_check(&m)
                    {
                        return Err(QfaError::InvalidMachine(format!(
                            "machine declared \"rfa\" is not reversible: {:?}",
                            v.first()
                        )));
                    }
                    Ok(LoadedMachine::Rfa(m))
                } else {
                    Ok(LoadedMachine::Dfa(m))
                }
            }
            "pfa" => {
                let matrices = self
                    .matrices
                    .as_ref()
                    .ok_or_else(|| QfaError::Schema("pfa needs \"matrices\"".into()))?;
                let m = Pfa {
                    states: self.states.clone(),
                    input_alphabet: self.input_alphabet.clone(),
                    endmarkers: self.endmarkers,
                    matrices: matrices.clone(),
                    initial,
                    accepting,
                    rejecting,
                };
                m.validate()?;
                Ok(LoadedMachine::Pfa(m))
            }
            "qfa" => {
                let unitaries_file = self
                    .unitaries
                    .as_ref()
                    .ok_or_else(|| QfaError::Schema("qfa needs \"unitaries\"".into()))?;
                let mut unitaries = BTreeMap::new();
                for (sym, mat) in unitaries_file {
                    unitaries.insert(sym.clone(), matrix_from_file(mat)?);
                }
                let initial_vector = match &self.initial_vector {
                    Some(amps) => Some(StateVector {
                        amps: amps.iter().map(|[re, im]| C::new(*re, *im)).collect(),
                    }),
                    None => None,
                };
                let m = Qfa {
                    states: self.states.clone(),
                    input_alphabet: self.input_alphabet.clone(),
                    endmarkers: self.endmarkers,
                    unitaries,
                    initial,
                    accepting,
                    rejecting,
                    initial_vector,
                    halt_offset: self
                        .halt_offset
                        .map(|[a, r]| (a, r))
                        .unwrap_or((0.0, 0.0)),
                };
                let defects = crate::machines::qfa_validate(&m);
                if let Some(d) = defects.first() {
                    return Err(QfaError::InvalidMachine(format!("{d:?}")));
                }
                Ok(LoadedMachine::Qfa(m))
            }
            "rqfa" => {
                let locals_file = self
                    .local_unitaries
                    .as_ref()
                    .ok_or_else(|| QfaError::Schema("rqfa needs \"local_unitaries\"".into()))?;
                let advice_alphabet = self
                    .advice_alphabet
                    .clone()
                    .ok_or_else(|| QfaError::Schema("rqfa needs \"advice_alphabet\"".into()))?;
                let mut local_unitaries = BTreeMap::new();
                for (sym, mat) in locals_file {
                    local_unitaries.insert(sym.clone(), matrix_from_file(mat)?);
                }
                let mut last_unitaries = BTreeMap::new();
                if let Some(lasts) = &self.last_unitaries {
                    for (sym, mat) in lasts {
                        last_unitaries.insert(sym.clone(), matrix_from_file(mat)?);
                    }
                }
                let mut position_overrides = BTreeMap::new();
                if let Some(ovs) = &self.position_overrides {
                    for ov in ovs {
                        position_overrides
                            .insert((ov.position, ov.symbol.clone()), matrix_from_file(&ov.matrix)?);
                    }
                }
                let measure_mode = match self.measure_mode.as_deref() {
                    Some("per_step") | None => MeasureMode::PerStep,
                    Some("final_only") => MeasureMode::FinalOnly,
                    Some(other) => {
                        return Err(QfaError::Schema(format!("unknown measure_mode {other:?}")))
                    }
                };
                let m = RewritableQfa {
                    states: self.states.clone(),
                    input_alphabet: self.input_alphabet.clone(),
                    advice_alphabet,
                    local_unitaries,
                    last_unitaries,
                    position_overrides,
                    initial,
                    accepting,
                    rejecting,
                    measure_mode,
                    cap: self.cap.unwrap_or(DEFAULT_CAP),
                };
                m.validate()?;
                Ok(LoadedMachine::Rqfa(m))
            }
            other => Err(QfaError::Schema(format!("unknown machine kind {other:?}"))),
        }
    }

    pub fn from_machine(m: &LoadedMachine) -> Self {
        match m {
            LoadedMachine::Dfa(d) => Self::from_dfa(d, "dfa"),
            LoadedMachine::Rfa(d) => Self::from_dfa(d, "rfa"),
            LoadedMachine::Pfa(p) => Self::from_pfa(p),
            LoadedMachine::Qfa(q) => Self::from_qfa(q),
            LoadedMachine::Rqfa(r) => Self::from_rqfa(r),
        }
    }

    fn skeleton(
        kind: &str,
        states: &[String],
        input_alphabet: &[Symbol],
        endmarkers: Endmarkers,
        initial: usize,
        accepting: &BTreeSet<usize>,
        rejecting: &BTreeSet<usize>,
    ) -> Self {
        MachineFile {
            kind: kind.to_string(),
            states: states.to_vec(),
            input_alphabet: input_alphabet.to_vec(),
            advice_alphabet: None,
            endmarkers,
            initial: states[initial].clone(),
            accepting: accepting.iter().map(|&q| states[q].clone()).collect(),
            rejecting: rejecting.iter().map(|&q| states[q].clone()).collect(),
            delta: None,
            matrices: None,
            unitaries: None,
            local_unitaries: None,
            last_unitaries: None,
            position_overrides: None,
            measure_mode: None,
            cap: None,
            initial_vector: None,
            halt_offset: None,
        }
    }

    pub fn from_dfa(m: &Dfa, kind: &str) -> Self {
        let mut f = Self::skeleton(
            kind,
            &m.states,
            &m.input_alphabet,
            m.endmarkers,
            m.initial,
            &m.accepting,
            &m.rejecting,
        );
        let mut delta: BTreeMap<String, BTreeMap<Symbol, String>> = BTreeMap::new();
        for ((q, sym), target) in &m.delta {
            delta
                .entry(m.states[*q].clone())
                .or_default()
                .insert(sym.clone(), m.states[*target].clone());
        }
        f.delta = Some(delta);
        f
    }

    pub fn from_pfa(m: &Pfa) -> Self {
        let mut f = Self::skeleton(
            "pfa",
            &m.states,
            &m.input_alphabet,
            m.endmarkers,
            m.initial,
            &m.accepting,
            &m.rejecting,
        );
        f.matrices = Some(m.matrices.clone());
        f
    }

    pub fn from_qfa(m: &Qfa) -> Self {
        let mut f = Self::skeleton(
            "qfa",
            &m.states,
            &m.input_alphabet,
            m.endmarkers,
            m.initial,
            &m.accepting,
            &m.rejecting,
        );
        f.unitaries = Some(
            m.unitaries
                .iter()
                .map(|(s, u)| (s.clone(), matrix_to_file(u)))
                .collect(),
        );
        if let Some(v) = &m.initial_vector {
            f.initial_vector = Some(v.amps.iter().map(|c| [c.re, c.im]).collect());
        }
        if m.halt_offset != (0.0, 0.0) {
            f.halt_offset = Some([m.halt_offset.0, m.halt_offset.1]);
        }
        f
    }

    pub fn from_rqfa(m: &RewritableQfa) -> Self {
        let mut f = Self::skeleton(
            "rqfa",
            &m.states,
            &m.input_alphabet,
            Endmarkers::NONE,
            m.initial,
            &m.accepting,
            &m.rejecting,
        );
        f.advice_alphabet = Some(m.advice_alphabet.clone());
        f.local_unitaries = Some(
            m.local_unitaries
                .iter()
                .map(|(s, u)| (s.clone(), matrix_to_file(u)))
                .collect(),
        );
        if !m.last_unitaries.is_empty() {
            f.last_unitaries = Some(
                m.last_unitaries
                    .iter()
                    .map(|(s, u)| (s.clone(), matrix_to_file(u)))
                    .collect(),
            );
        }
        if !m.position_overrides.is_empty() {
            f.position_overrides = Some(
                m.position_overrides
                    .iter()
                    .map(|((pos, sym), u)| PositionOverrideFile {
                        position: *pos,
                        symbol: sym.clone(),
                        matrix: matrix_to_file(u),
                    })
                    .collect(),
            );
        }
        f.measure_mode = Some(
            match m.measure_mode {
                MeasureMode::PerStep => "per_step",
                MeasureMode::FinalOnly => "final_only",
            }
            .to_string(),
        );
        f.cap = Some(m.cap);
        f
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandEntryFile {
    pub y: Vec<Symbol>,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantEntryFile {
    pub y: Vec<Symbol>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AdviceRuleFile {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_n: Option<usize>,
    },
    DetTable {
        table: BTreeMap<String, Vec<Symbol>>,
    },
    RandTable {
        table: BTreeMap<String, Vec<RandEntryFile>>,
    },
    QuantTable {
        table: BTreeMap<String, Vec<QuantEntryFile>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdviceFile {
    pub kind: String,
    pub alphabet: Vec<Symbol>,
    pub rule: AdviceRuleFile,
}

/// Advice deserialized into its concrete runtime type.
#[derive(Debug, Clone)]
pub enum LoadedAdvice {
    Det(DetAdvice),
    Rand(RandAdvice),
    Quant(QuantAdvice),
}

const BUILTIN_DEFAULT_MAX_N: usize = 8;

fn parse_len(key: &str) -> Result<usize> {
    key.parse::<usize>()
        .map_err(|_| QfaError::Schema(format!("table key {key:?} is not a length")))
}

impl AdviceFile {
    pub fn to_advice(&self) -> Result<LoadedAdvice> {
        match (self.kind.as_str(), &self.rule) {
            ("deterministic", AdviceRuleFile::Builtin { builtin, max_n }) => {
                let max_n = max_n.unwrap_or(BUILTIN_DEFAULT_MAX_N);
                match builtin.as_str() {
                    "L_a" => Ok(LoadedAdvice::Det(DetAdvice::zeros_then_one(max_n))),
                    other => Err(QfaError::Schema(format!(
                        "unknown deterministic builtin {other:?}"
                    ))),
                }
            }
            ("randomized", AdviceRuleFile::Builtin { builtin, max_n }) => {
                let max_n = max_n.unwrap_or(BUILTIN_DEFAULT_MAX_N);
                match builtin.as_str() {
                    "Pal#" => Ok(LoadedAdvice::Rand(RandAdvice::palindrome_pairs(max_n))),
                    "Dup" => Ok(LoadedAdvice::Rand(RandAdvice::dup_pairs(max_n))),
                    other => Err(QfaError::Schema(format!(
                        "unknown randomized builtin {other:?}"
                    ))),
                }
            }
            ("deterministic", AdviceRuleFile::DetTable { table }) => {
                let mut out = BTreeMap::new();
                for (k, y) in table {
                    out.insert(parse_len(k)?, y.clone());
                }
                let adv = DetAdvice {
                    alphabet: self.alphabet.clone(),
                    table: out,
                };
                for &n in adv.table.keys() {
                    adv.at(n)?;
                }
                Ok(LoadedAdvice::Det(adv))
            }
            ("randomized", AdviceRuleFile::RandTable { table }) => {
                let mut out = BTreeMap::new();
                for (k, entries) in table {
                    out.insert(
                        parse_len(k)?,
                        entries.iter().map(|e| (e.y.clone(), e.p)).collect::<Vec<_>>(),
                    );
                }
                let adv = RandAdvice {
                    alphabet: self.alphabet.clone(),
                    table: out,
                };
                for &n in adv.table.keys() {
                    adv.at(n)?;
                }
                Ok(LoadedAdvice::Rand(adv))
            }
            ("quantum", AdviceRuleFile::QuantTable { table }) => {
                let mut out = BTreeMap::new();
                for (k, entries) in table {
                    out.insert(
                        parse_len(k)?,
                        entries
                            .iter()
                            .map(|e| (e.y.clone(), C::new(e.re, e.im)))
                            .collect::<Vec<_>>(),
                    );
                }
                let adv = QuantAdvice {
                    alphabet: self.alphabet.clone(),
                    table: out,
                };
                for &n in adv.table.keys() {
                    adv.at(n)?;
                }
                Ok(LoadedAdvice::Quant(adv))
            }
            (kind, _) => Err(QfaError::Schema(format!(
                "advice kind {kind:?} does not match its rule shape"
            ))),
        }
    }

    pub fn from_advice(a: &LoadedAdvice) -> Self {
        match a {
            LoadedAdvice::Det(d) => AdviceFile {
                kind: "deterministic".into(),
                alphabet: d.alphabet.clone(),
                rule: AdviceRuleFile::DetTable {
                    table: d
                        .table
                        .iter()
                        .map(|(n, y)| (n.to_string(), y.clone()))
                        .collect(),
                },
            },
            LoadedAdvice::Rand(d) => AdviceFile {
                kind: "randomized".into(),
                alphabet: d.alphabet.clone(),
                rule: AdviceRuleFile::RandTable {
                    table: d
                        .table
                        .iter()
                        .map(|(n, entries)| {
                            (
                                n.to_string(),
                                entries
                                    .iter()
                                    .map(|(y, p)| RandEntryFile { y: y.clone(), p: *p })
                                    .collect(),
                            )
                        })
                        .collect(),
                },
            },
            LoadedAdvice::Quant(d) => AdviceFile {
                kind: "quantum".into(),
                alphabet: d.alphabet.clone(),
                rule: AdviceRuleFile::QuantTable {
                    table: d
                        .table
                        .iter()
                        .map(|(n, entries)| {
                            (
                                n.to_string(),
                                entries
                                    .iter()
                                    .map(|(y, a)| QuantEntryFile {
                                        y: y.clone(),
                                        re: a.re,
                                        im: a.im,
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                },
            },
        }
    }
}

/// Builds the named fixture as a (machine, advice) file pair.
pub fn fixture_files(name: &str, max_n: usize) -> Result<(MachineFile, AdviceFile)> {
    let (machine, advice) = zoo::fixture(name, max_n)?;
    let machine_file = match machine {
        crate::advice::Machine::Dfa(d) => MachineFile::from_dfa(&d, "dfa"),
        crate::advice::Machine::Pfa(p) => MachineFile::from_pfa(&p),
        crate::advice::Machine::Qfa(q) => MachineFile::from_qfa(&q),
    };
    let advice_file = AdviceFile::from_advice(&match advice {
        zoo::AdviceKind::Det(d) => LoadedAdvice::Det(d),
        zoo::AdviceKind::Rand(d) => LoadedAdvice::Rand(d),
        zoo::AdviceKind::Quant(d) => LoadedAdvice::Quant(d),
    });
    Ok((machine_file, advice_file))
}

fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    return serde_json::Number::from_f64(round_sig(f))
                        .map(Value::Number)
                        .unwrap_or(Value::Null);
                }
            }
            Value::Number(n)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Serializes with floats rounded to 12 significant digits and stable key
/// order.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&round_value(v))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::FIXTURE_NAMES;

    #[test]
    fn fixture_files_round_trip() {
        for name in FIXTURE_NAMES {
            let (mf, af) = fixture_files(name, 4).unwrap();
            let mf_json = to_report_json(&mf).unwrap();
            let af_json = to_report_json(&af).unwrap();
            let mf2: MachineFile = serde_json::from_str(&mf_json).unwrap();
            let af2: AdviceFile = serde_json::from_str(&af_json).unwrap();
            mf2.to_machine().unwrap();
            af2.to_advice().unwrap();
            // Structural equality through a second emission.
            assert_eq!(mf_json, to_report_json(&mf2).unwrap());
            assert_eq!(af_json, to_report_json(&af2).unwrap());
        }
    }

    #[test]
    fn qfa_round_trip_preserves_machine() {
        let (m, _) = crate::zoo::fixture_la(3);
        let f = MachineFile::from_qfa(&m);
        match f.to_machine().unwrap() {
            LoadedMachine::Qfa(m2) => assert_eq!(m, m2),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn bad_kind_is_schema_error() {
        let (mut f, _) = fixture_files("L_a", 3).unwrap();
        f.kind = "nfa".into();
        assert!(matches!(f.to_machine(), Err(QfaError::Schema(_))));
    }

    #[test]
    fn undeclared_state_rejected() {
        let (mut f, _) = fixture_files("L_a", 3).unwrap();
        f.initial = "ghost".into();
        assert!(matches!(f.to_machine(), Err(QfaError::Schema(_))));
    }

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round_sig(0.1 + 0.2), round_sig(0.3));
        assert_eq!(round_sig(1.0), 1.0);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn builtin_advice_expands() {
        let af = AdviceFile {
            kind: "randomized".into(),
            alphabet: vec!["0".into(), "1".into(), "#".into()],
            rule: AdviceRuleFile::Builtin {
                builtin: "Pal#".into(),
                max_n: Some(5),
            },
        };
        match af.to_advice().unwrap() {
            LoadedAdvice::Rand(d) => assert!(d.table.contains_key(&5)),
            _ => panic!("wrong kind"),
        }
    }
}
