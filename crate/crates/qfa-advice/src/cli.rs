//! Command-line front end: file loading, subcommand dispatch, and
//! machine-readable JSON reports.
//!
//! Exit codes: 0 on success, 1 on domain errors (invalid machines, failed
//! preconditions, counterexample certificates), 2 on schema errors (malformed
//! JSON, undeclared names, ragged matrices).
//!
//! The environment variable `QFA_REWRITABLE_CAP` overrides the simulated
//! input-length cap of every rewritable machine loaded from a file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::advice::{
    classify, run_with_det_advice, run_with_quantum_advice_readonly, run_with_randomized_advice,
    Machine, RandAdvice,
};
use crate::analysis::{compute_relations, norm_property_suite};
use crate::error::{QfaError, Result};
use crate::machines::{qfa_validate, Str, Verdict};
use crate::rewritable::{rqfa_complement, rqfa_product, rqfa_run, rqfa_union};
use crate::schema::{to_report_json, AdviceFile, LoadedAdvice, LoadedMachine, MachineFile};
use crate::synthesis::{
    build_classes, check_condition_a, synthesize_rfa, ConditionA, LanguageOracle,
};
use crate::transforms::{
    amplify, defer_measurement, drop_left_endmarker, drop_right_endmarker,
    drop_right_endmarker_rand, lift_dfa_to_rqfa, quantum_to_randomized, randomized_to_quantum,
};
use crate::zoo::NamedLanguage;

pub const REWRITABLE_CAP_ENV: &str = "QFA_REWRITABLE_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "qfa",
    version,
    about = "Simulate, transform, analyze, and synthesize advised finite automata"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a machine (and optionally an advice) file for structural validity.
    Validate {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: Option<PathBuf>,
    },
    /// Run a machine with advice on one input and report the outcome.
    Run {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        /// Input string; symbols are single characters, or comma-separated
        /// for multi-character alphabets.
        #[arg(long, default_value = "")]
        input: String,
        /// Bounded-error threshold; adds a verdict to the report.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Apply a verified machine-to-machine or advice-to-advice pass.
    Transform {
        #[command(subcommand)]
        pass: TransformPass,
    },
    /// Relation/condition checkers and the norm-property suite.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
    /// Constructive synthesis from a language oracle.
    Synthesize {
        #[command(subcommand)]
        what: SynthesizeCmd,
    },
    /// Emit a built-in fixture as machine + advice files.
    Fixtures {
        /// One of: L_a, ALL, Pal#, Dup.
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TransformPass {
    /// Eliminate the right endmarker of a measure-many machine (double sweep).
    DropRightEndmarker {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
    /// Fold the left endmarker into the initial configuration.
    DropLeftEndmarker {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Postpone all measurements of a per-step rewritable machine.
    DeferMeasure {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
    /// Majority-vote error amplification of a final-only machine.
    Amplify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        /// Per-input error of the source machine (< 1/2).
        #[arg(long)]
        eps0: f64,
        /// Target error bound.
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
    /// Intersection machine of two final-only rewritable machines.
    Product {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        machine2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Swap accepting and rejecting states of a final-only machine.
    Complement {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union machine via De Morgan composition.
    Union {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        machine2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn randomized advice into quantum advice with √p amplitudes.
    RandToQuantum {
        #[arg(long)]
        advice: PathBuf,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
    /// Collapse quantum advice to the |α|² distribution.
    QuantumToRand {
        #[arg(long)]
        advice: PathBuf,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
    /// Lift a deterministic track automaton to a rewritable quantum machine.
    LiftDfa {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    /// Relation and condition checker for an advised measure-many machine.
    Thm1 {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Randomized oracle suite for the halting-space norm properties.
    Norms {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_min: usize,
        #[arg(long, default_value_t = 8)]
        dim_max: usize,
        #[arg(long, default_value_t = 0)]
        len_min: usize,
        #[arg(long, default_value_t = 6)]
        len_max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SynthesizeCmd {
    /// Build a reversible automaton + advice from a bounded-horizon oracle,
    /// or emit a counterexample certificate.
    Rfa {
        /// Path to an oracle file, or "builtin:NAME" for a named language.
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        advice_out: Option<PathBuf>,
    },
}

/// Oracle file: either a builtin name or an explicit member list.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleFile {
    #[serde(default)]
    builtin: Option<String>,
    #[serde(default)]
    alphabet: Vec<String>,
    #[serde(default)]
    members: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RunReport {
    p_acc: f64,
    p_rej: f64,
    p_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
}

/// Prints a report line, exiting quietly if the consumer closed the pipe.
fn print_line(text: &str) {
    use std::io::Write;
    if writeln!(std::io::stdout(), "{text}").is_err() {
        std::process::exit(0);
    }
}

fn parse_symbols(s: &str) -> Str {
    if s.is_empty() {
        Vec::new()
    } else if s.contains(',') {
        s.split(',').map(|t| t.to_string()).collect()
    } else {
        s.chars().map(|c| c.to_string()).collect()
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_machine(path: &Path) -> Result<LoadedMachine> {
    let file: MachineFile = read_json(path)?;
    let mut m = file.to_machine()?;
    if let LoadedMachine::Rqfa(r) = &mut m {
        if let Ok(v) = std::env::var(REWRITABLE_CAP_ENV) {
            r.cap = v.parse().map_err(|_| {
                QfaError::ArgumentOutOfRange(format!("{REWRITABLE_CAP_ENV}={v:?} is not a length"))
            })?;
        }
    }
    Ok(m)
}

fn load_advice(path: &Path) -> Result<LoadedAdvice> {
    read_json::<AdviceFile>(path)?.to_advice()
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<Option<String>> {
    let text = to_report_json(value)?;
    match out {
        Some(p) => {
            fs::write(p, text + "\n")?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            print_line(&text);
            Ok(None)
        }
    }
}

/// Emits a machine/advice pair: files when paths are given, stdout otherwise.
fn emit_pair(
    machine: Option<&MachineFile>,
    advice: Option<&AdviceFile>,
    out: Option<&Path>,
    advice_out: Option<&Path>,
    extra: serde_json::Value,
) -> Result<()> {
    let mut written = Vec::new();
    let mut inline = serde_json::Map::new();
    if let Some(m) = machine {
        match out {
            Some(p) => {
                fs::write(p, to_report_json(m)? + "\n")?;
                written.push(p.display().to_string());
            }
            None => {
                inline.insert("machine".into(), serde_json::to_value(m)?);
            }
        }
    }
    if let Some(a) = advice {
        match advice_out {
            Some(p) => {
                fs::write(p, to_report_json(a)? + "\n")?;
                written.push(p.display().to_string());
            }
            None => {
                inline.insert("advice".into(), serde_json::to_value(a)?);
            }
        }
    }
    if let serde_json::Value::Object(map) = extra {
        for (k, v) in map {
            inline.insert(k, v);
        }
    }
    if !written.is_empty() {
        inline.insert("written".into(), json!(written));
    }
    print_line(&to_report_json(&serde_json::Value::Object(inline))?);
    Ok(())
}

fn as_readonly(m: LoadedMachine) -> Result<Machine> {
    match m {
        LoadedMachine::Dfa(d) | LoadedMachine::Rfa(d) => Ok(Machine::Dfa(d)),
        LoadedMachine::Pfa(p) => Ok(Machine::Pfa(p)),
        LoadedMachine::Qfa(q) => Ok(Machine::Qfa(q)),
        LoadedMachine::Rqfa(_) => Err(QfaError::Unsupported(
            "this subcommand needs a read-only machine kind".into(),
        )),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Accept => "accept",
        Verdict::Reject => "reject",
        Verdict::Neither => "neither",
    }
}

fn cmd_run(
    machine: &Path,
    advice: &Path,
    input: &str,
    epsilon: Option<f64>,
) -> Result<()> {
    let m = load_machine(machine)?;
    let a = load_advice(advice)?;
    let x = parse_symbols(input);
    let outcome = match (m, a) {
        (LoadedMachine::Rqfa(r), LoadedAdvice::Quant(phi)) => rqfa_run(&r, &x, &phi)?,
        (LoadedMachine::Rqfa(r), LoadedAdvice::Rand(d)) => {
            rqfa_run(&r, &x, &randomized_to_quantum(&d)?)?
        }
        (LoadedMachine::Rqfa(r), LoadedAdvice::Det(h)) => {
            rqfa_run(&r, &x, &randomized_to_quantum(&RandAdvice::point_mass(&h))?)?
        }
        (m, LoadedAdvice::Det(h)) => run_with_det_advice(&as_readonly(m)?, &h, &x)?,
        (m, LoadedAdvice::Rand(d)) => run_with_randomized_advice(&as_readonly(m)?, &d, &x)?,
        (m, LoadedAdvice::Quant(phi)) => {
            run_with_quantum_advice_readonly(&as_readonly(m)?, &phi, &x)?
        }
    };
    let verdict = match epsilon {
        Some(e) => Some(verdict_name(classify(&outcome, e)?).to_string()),
        None => None,
    };
    emit(
        &RunReport {
            p_acc: outcome.p_acc,
            p_rej: outcome.p_rej,
            p_residual: outcome.p_residual,
            verdict,
        },
        None,
    )?;
    Ok(())
}

fn cmd_transform(pass: TransformPass) -> Result<()> {
    match pass {
        TransformPass::DropRightEndmarker {
            machine,
            advice,
            out,
            advice_out,
        } => {
            let LoadedMachine::Qfa(q) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported(
                    "drop-right-endmarker expects a qfa".into(),
                ));
            };
            let (mf, af) = match load_advice(&advice)? {
                LoadedAdvice::Det(h) => {
                    let (m2, h2) = drop_right_endmarker(&q, &h)?;
                    (
                        MachineFile::from_qfa(&m2),
                        AdviceFile::from_advice(&LoadedAdvice::Det(h2)),
                    )
                }
                LoadedAdvice::Rand(d) => {
                    let (m2, d2) = drop_right_endmarker_rand(&q, &d)?;
                    (
                        MachineFile::from_qfa(&m2),
                        AdviceFile::from_advice(&LoadedAdvice::Rand(d2)),
                    )
                }
                LoadedAdvice::Quant(_) => {
                    return Err(QfaError::Unsupported(
                        "drop-right-endmarker takes deterministic or randomized advice".into(),
                    ))
                }
            };
            emit_pair(
                Some(&mf),
                Some(&af),
                out.as_deref(),
                advice_out.as_deref(),
                json!({}),
            )
        }
        TransformPass::DropLeftEndmarker { machine, out } => {
            let LoadedMachine::Qfa(q) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported(
                    "drop-left-endmarker expects a qfa".into(),
                ));
            };
            let m2 = drop_left_endmarker(&q)?;
            emit_pair(
                Some(&MachineFile::from_qfa(&m2)),
                None,
                out.as_deref(),
                None,
                json!({}),
            )
        }
        TransformPass::DeferMeasure {
            machine,
            advice,
            out,
            advice_out,
        } => {
            let LoadedMachine::Rqfa(r) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported("defer-measure expects an rqfa".into()));
            };
            let LoadedAdvice::Quant(phi) = load_advice(&advice)? else {
                return Err(QfaError::Unsupported(
                    "defer-measure takes quantum advice".into(),
                ));
            };
            let deferred = defer_measurement(&r, &phi)?;
            let shadows: Vec<&str> = deferred
                .shadow_states
                .iter()
                .map(|&i| deferred.machine.states[i].as_str())
                .collect();
            emit_pair(
                Some(&MachineFile::from_rqfa(&deferred.machine)),
                Some(&AdviceFile::from_advice(&LoadedAdvice::Quant(
                    deferred.advice.clone(),
                ))),
                out.as_deref(),
                advice_out.as_deref(),
                json!({ "shadow_states": shadows }),
            )
        }
        TransformPass::Amplify {
            machine,
            advice,
            eps0,
            eps,
            out,
            advice_out,
        } => {
            let LoadedMachine::Rqfa(r) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported("amplify expects an rqfa".into()));
            };
            let LoadedAdvice::Quant(phi) = load_advice(&advice)? else {
                return Err(QfaError::Unsupported("amplify takes quantum advice".into()));
            };
            let (m2, phi2, k) = amplify(&r, &phi, eps0, eps)?;
            emit_pair(
                Some(&MachineFile::from_rqfa(&m2)),
                Some(&AdviceFile::from_advice(&LoadedAdvice::Quant(phi2))),
                out.as_deref(),
                advice_out.as_deref(),
                json!({ "k": k }),
            )
        }
        TransformPass::Product { .. } | TransformPass::Union { .. } => {
            unreachable!("binary passes are dispatched separately")
        }
        TransformPass::Complement { machine, out } => {
            let LoadedMachine::Rqfa(r) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported("complement expects an rqfa".into()));
            };
            let m2 = rqfa_complement(&r)?;
            emit_pair(
                Some(&MachineFile::from_rqfa(&m2)),
                None,
                out.as_deref(),
                None,
                json!({}),
            )
        }
        TransformPass::RandToQuantum { advice, advice_out } => {
            let LoadedAdvice::Rand(d) = load_advice(&advice)? else {
                return Err(QfaError::Unsupported(
                    "rand-to-quantum takes randomized advice".into(),
                ));
            };
            let phi = randomized_to_quantum(&d)?;
            emit_pair(
                None,
                Some(&AdviceFile::from_advice(&LoadedAdvice::Quant(phi))),
                None,
                advice_out.as_deref(),
                json!({}),
            )
        }
        TransformPass::QuantumToRand { advice, advice_out } => {
            let LoadedAdvice::Quant(phi) = load_advice(&advice)? else {
                return Err(QfaError::Unsupported(
                    "quantum-to-rand takes quantum advice".into(),
                ));
            };
            let d = quantum_to_randomized(&phi)?;
            emit_pair(
                None,
                Some(&AdviceFile::from_advice(&LoadedAdvice::Rand(d))),
                None,
                advice_out.as_deref(),
                json!({}),
            )
        }
        TransformPass::LiftDfa {
            machine,
            advice,
            out,
            advice_out,
        } => {
            let (LoadedMachine::Dfa(d) | LoadedMachine::Rfa(d)) = load_machine(&machine)? else {
                return Err(QfaError::Unsupported("lift-dfa expects a dfa or rfa".into()));
            };
            let rand = match load_advice(&advice)? {
                LoadedAdvice::Rand(r) => r,
                LoadedAdvice::Det(h) => RandAdvice::point_mass(&h),
                LoadedAdvice::Quant(_) => {
                    return Err(QfaError::Unsupported(
                        "lift-dfa takes deterministic or randomized advice".into(),
                    ))
                }
            };
            let (m2, phi) = lift_dfa_to_rqfa(&d, &rand)?;
            emit_pair(
                Some(&MachineFile::from_rqfa(&m2)),
                Some(&AdviceFile::from_advice(&LoadedAdvice::Quant(phi))),
                out.as_deref(),
                advice_out.as_deref(),
                json!({}),
            )
        }
    }
}

fn cmd_binary_transform(
    machine: &Path,
    machine2: &Path,
    out: Option<&Path>,
    union: bool,
) -> Result<()> {
    let LoadedMachine::Rqfa(m1) = load_machine(machine)? else {
        return Err(QfaError::Unsupported("expects an rqfa".into()));
    };
    let LoadedMachine::Rqfa(m2) = load_machine(machine2)? else {
        return Err(QfaError::Unsupported("expects an rqfa".into()));
    };
    let combined = if union {
        rqfa_union(&m1, &m2)?
    } else {
        rqfa_product(&m1, &m2)?
    };
    emit_pair(
        Some(&MachineFile::from_rqfa(&combined)),
        None,
        out,
        None,
        json!({}),
    )
}

fn load_oracle(spec: &str, horizon: usize) -> Result<LanguageOracle> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(LanguageOracle::builtin(
            NamedLanguage::from_name(name)?,
            horizon,
        ));
    }
    let file: OracleFile = read_json(Path::new(spec))?;
    match file.builtin {
        Some(name) => Ok(LanguageOracle::builtin(
            NamedLanguage::from_name(&name)?,
            horizon,
        )),
        None => {
            if file.alphabet.is_empty() {
                return Err(QfaError::Schema(
                    "oracle file needs \"alphabet\" or \"builtin\"".into(),
                ));
            }
            LanguageOracle::from_members(
                file.alphabet,
                file.members.iter().map(|s| parse_symbols(s)),
                horizon,
            )
        }
    }
}

fn cmd_synthesize(
    oracle: &str,
    horizon: usize,
    out: Option<&Path>,
    advice_out: Option<&Path>,
) -> Result<i32> {
    let oracle = load_oracle(oracle, horizon)?;
    let table = build_classes(&oracle, horizon)?;
    match check_condition_a(&table) {
        ConditionA::Holds => {
            let (m, h) = synthesize_rfa(&table)?;
            emit_pair(
                Some(&MachineFile::from_dfa(&m, "rfa")),
                Some(&AdviceFile::from_advice(&LoadedAdvice::Det(h))),
                out,
                advice_out,
                json!({ "condition_a": "holds", "classes": table.d }),
            )?;
            Ok(0)
        }
        ConditionA::Counterexample(c) => {
            print_line(&to_report_json(&json!({
                "condition_a": "violated",
                "counterexample": c,
            }))?);
            Ok(1)
        }
    }
}

fn cmd_validate(machine: &Path, advice: Option<&Path>) -> Result<i32> {
    let m = load_machine(machine)?;
    let kind = match &m {
        LoadedMachine::Dfa(_) => "dfa",
        LoadedMachine::Rfa(_) => "rfa",
        LoadedMachine::Pfa(_) => "pfa",
        LoadedMachine::Qfa(_) => "qfa",
        LoadedMachine::Rqfa(_) => "rqfa",
    };
    let mut valid = true;
    let mut report = json!({ "kind": kind });
    if let LoadedMachine::Qfa(q) = &m {
        let defects = qfa_validate(q);
        valid = defects.is_empty();
        report["defects"] = json!(defects);
    }
    report["valid"] = json!(valid);
    if let Some(p) = advice {
        load_advice(p)?;
        report["advice_valid"] = json!(true);
    }
    print_line(&to_report_json(&report)?);
    Ok(if valid { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { machine, advice } => cmd_validate(&machine, advice.as_deref()),
        Command::Run {
            machine,
            advice,
            input,
            epsilon,
        } => {
            cmd_run(&machine, &advice, &input, epsilon)?;
            Ok(0)
        }
        Command::Transform { pass } => match pass {
            TransformPass::Product {
                machine,
                machine2,
                out,
            } => {
                cmd_binary_transform(&machine, &machine2, out.as_deref(), false)?;
                Ok(0)
            }
            TransformPass::Union {
                machine,
                machine2,
                out,
            } => {
                cmd_binary_transform(&machine, &machine2, out.as_deref(), true)?;
                Ok(0)
            }
            other => {
                cmd_transform(other)?;
                Ok(0)
            }
        },
        Command::Analyze { what } => {
            match what {
                AnalyzeCmd::Thm1 {
                    machine,
                    advice,
                    epsilon,
                    mu,
                    max_n,
                } => {
                    let LoadedMachine::Qfa(q) = load_machine(&machine)? else {
                        return Err(QfaError::Unsupported("analyze thm1 expects a qfa".into()));
                    };
                    let LoadedAdvice::Det(h) = load_advice(&advice)? else {
                        return Err(QfaError::Unsupported(
                            "analyze thm1 takes deterministic advice".into(),
                        ));
                    };
                    let report = compute_relations(&q, &h, epsilon, mu, max_n)?;
                    print_line(&to_report_json(&report)?);
                }
                AnalyzeCmd::Norms {
                    trials,
                    seed,
                    dim_min,
                    dim_max,
                    len_min,
                    len_max,
                } => {
                    let report =
                        norm_property_suite(dim_min..=dim_max, len_min..=len_max, trials, seed);
                    print_line(&to_report_json(&report)?);
                }
            }
            Ok(0)
        }
        Command::Synthesize { what } => match what {
            SynthesizeCmd::Rfa {
                oracle,
                horizon,
                out,
                advice_out,
            } => cmd_synthesize(&oracle, horizon, out.as_deref(), advice_out.as_deref()),
        },
        Command::Fixtures {
            name,
            max_n,
            out,
            advice_out,
        } => {
            let (mf, af) = crate::schema::fixture_files(&name, max_n)?;
            emit_pair(
                Some(&mf),
                Some(&af),
                out.as_deref(),
                advice_out.as_deref(),
                json!({}),
            )?;
            Ok(0)
        }
    }
}

fn exit_code(e: &QfaError) -> i32 {
    match e {
        QfaError::Schema(_) | QfaError::Json(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` and runs the requested subcommand, returning the process
/// exit code.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version printing; usage errors exit 2.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the `qfa` binary.
pub fn main() -> i32 {
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::fixture_files;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("qfa-cli-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn write_fixture(name: &str, max_n: usize, stem: &str) -> (PathBuf, PathBuf) {
        let (mf, af) = fixture_files(name, max_n).unwrap();
        let mp = tmp(&format!("{stem}-machine.json"));
        let ap = tmp(&format!("{stem}-advice.json"));
        fs::write(&mp, to_report_json(&mf).unwrap()).unwrap();
        fs::write(&ap, to_report_json(&af).unwrap()).unwrap();
        (mp, ap)
    }

    #[test]
    fn run_la_fixture_accepts_ba() {
        let (mp, ap) = write_fixture("L_a", 4, "run-la");
        let code = run_from([
            "qfa",
            "run",
            "--machine",
            mp.to_str().unwrap(),
            "--advice",
            ap.to_str().unwrap(),
            "--input",
            "ba",
            "--epsilon",
            "0.0",
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn validate_round_trips_fixture_files() {
        let (mp, ap) = write_fixture("Pal#", 4, "validate-pal");
        let code = run_from([
            "qfa",
            "validate",
            "--machine",
            mp.to_str().unwrap(),
            "--advice",
            ap.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        // Loaded files must round-trip to structurally equal objects.
        let mf: MachineFile = read_json(&mp).unwrap();
        let reloaded = MachineFile::from_machine(&mf.to_machine().unwrap());
        assert_eq!(
            serde_json::to_value(&mf).unwrap(),
            serde_json::to_value(&reloaded).unwrap()
        );
    }

    #[test]
    fn validate_rejects_malformed_json_with_schema_exit() {
        let p = tmp("garbage.json");
        fs::write(&p, "{ not json").unwrap();
        let code = run_from(["qfa", "validate", "--machine", p.to_str().unwrap()]);
        assert_eq!(code, 2);
    }

    #[test]
    fn validate_flags_non_unitary_matrix() {
        let (mp, _) = write_fixture("L_a", 3, "bad-unitary");
        let mut v: serde_json::Value = read_json(&mp).unwrap();
        // Corrupt one unitary entry.
        let unitaries = v["unitaries"].as_object_mut().unwrap();
        let first = unitaries.values_mut().next().unwrap();
        first[0][0] = json!([2.0, 0.0]);
        let bad = tmp("bad-unitary-machine.json");
        fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
        let code = run_from(["qfa", "validate", "--machine", bad.to_str().unwrap()]);
        assert_eq!(code, 1);
    }

    #[test]
    fn synthesize_la_emits_machine_and_advice() {
        let out = tmp("synth-la-machine.json");
        let advice_out = tmp("synth-la-advice.json");
        let code = run_from([
            "qfa",
            "synthesize",
            "rfa",
            "--oracle",
            "builtin:L_a",
            "--horizon",
            "4",
            "--out",
            out.to_str().unwrap(),
            "--advice-out",
            advice_out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let mf: MachineFile = read_json(&out).unwrap();
        assert!(matches!(
            mf.to_machine().unwrap(),
            LoadedMachine::Rfa(_)
        ));
        let af: AdviceFile = read_json(&advice_out).unwrap();
        assert!(matches!(af.to_advice().unwrap(), LoadedAdvice::Det(_)));
        // The emitted pair decides L_a through the run subcommand.
        let code = run_from([
            "qfa",
            "run",
            "--machine",
            out.to_str().unwrap(),
            "--advice",
            advice_out.to_str().unwrap(),
            "--input",
            "abba",
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn synthesize_zeros_ones_exits_one_with_certificate() {
        let code = run_from([
            "qfa",
            "synthesize",
            "rfa",
            "--oracle",
            "builtin:0m1n",
            "--horizon",
            "8",
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn transform_unknown_pass_is_usage_error() {
        let code = run_from(["qfa", "transform", "no-such-pass"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn analyze_norms_small() {
        let code = run_from([
            "qfa", "analyze", "norms", "--trials", "50", "--seed", "3",
        ]);
        assert_eq!(code, 0);
    }
}
