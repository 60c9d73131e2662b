//! Subcommand implementations.  Each writes its main output to `stdout`
//! (or a file) and returns the exit code.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use redgreen::canon::canonical_hash;
use redgreen::io::{diagram_from_json, diagram_to_json};
use redgreen::lattice::{build_lattice, LatticeSpec};
use redgreen::measurement::{compile_pattern, CompileError, CompileOptions, OutcomeSource, PatternFile};
use redgreen::rewrite::{matches_at, Match, NormalizeError, Policy, RuleId, Session};
use redgreen::semantics::{equiv_up_to_scalar, evaluate_with, EvalOptions, SemanticsError, TensorJson, TensorMap};
use redgreen::{Diagram, VertexId};
use serde::Serialize;

use crate::dot::to_dot;
use crate::error::{CliError, EXIT_MISMATCH, EXIT_OK};
use crate::library::GateLibrary;
use crate::recognize::{recognize, reorder_tensor, RecognizeOptions};
use crate::report::{digest, Counts, Report, SweepEntry, Verdict, UNRECOGNIZED};
use crate::{Cli, Command, Numerics, OutcomesArg};

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|e| CliError::parse(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            let path = PathBuf::from("<stdout>");
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Write { path, source })
        }
    }
}

fn read_diagram(path: &Path) -> Result<Diagram, CliError> {
    diagram_from_json(&read_text(path)?).map_err(|e| CliError::parse(path, e))
}

fn library(extra: Option<&Path>) -> Result<GateLibrary, CliError> {
    let mut lib = GateLibrary::builtin();
    if let Some(dir) = extra {
        lib.extend_from_dir(dir)?;
    }
    Ok(lib)
}

fn evaluate_capped(d: &Diagram, rank_cap: usize) -> Result<TensorMap, CliError> {
    Ok(evaluate_with(d, &EvalOptions { rank_cap, ..EvalOptions::default() })?)
}

/// Runs a parsed command line.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Build { spec, out, convention, site_cap } => {
            let text = read_text(&spec)?;
            let mut lattice: LatticeSpec = serde_json::from_str(&text).map_err(|e| CliError::parse(&spec, e))?;
            if let Some(c) = convention {
                lattice.convention = c.into();
            }
            let build = build_lattice(&lattice, site_cap)?;
            emit(stdout, out.as_deref(), &diagram_to_json(&build.diagram))?;
            Ok(EXIT_OK)
        }
        Command::Compile {
            pattern,
            outcomes,
            seed,
            convention,
            budget,
            site_cap,
            emit_trace,
            report,
            normal,
            logical,
            library: extra,
            sweep,
            numerics,
        } => {
            let started = Instant::now();
            let bytes = read_bytes(&pattern)?;
            let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::parse(&pattern, e))?;
            let mut file = PatternFile::from_json(&text).map_err(|e| CliError::parse(&pattern, e))?;
            if let Some(c) = convention {
                file.lattice.convention = c.into();
            }
            file.outcomes = match (outcomes, seed) {
                (None | Some(OutcomesArg::Pattern), None) => file.outcomes,
                (None | Some(OutcomesArg::Pattern), Some(s)) => OutcomeSource::Seed(s),
                (Some(OutcomesArg::AllPlus), _) => OutcomeSource::AllPlus,
                (Some(OutcomesArg::Seed), s) => OutcomeSource::Seed(s.unwrap_or(0)),
            };
            let lib = library(extra.as_deref())?;
            let job = CompileJob {
                options: CompileOptions { site_cap, policy: Policy::default().budget(budget) },
                numerics: &numerics,
                library: &lib,
            };
            let compiled = match job.compile(&file) {
                Ok(c) => c,
                Err(CompileError::Normalize(NormalizeError::BudgetExceeded { budget, trace, .. })) => {
                    if let Some(path) = &emit_trace {
                        write_text(path, &trace.to_json())?;
                    }
                    return Err(CliError::Budget { budget, steps: trace.len() });
                }
                Err(e) => return Err(e.into()),
            };
            let base = match file.outcomes {
                OutcomeSource::Seed(s) => s,
                _ => seed.unwrap_or(0),
            };
            let sweep = (base..base.saturating_add(sweep))
                .into_par_iter()
                .map(|s| {
                    let seeded = PatternFile { outcomes: OutcomeSource::Seed(s), ..file.clone() };
                    job.compile(&seeded).map(|r| SweepEntry {
                        seed: s,
                        recognized: r.recognized.clone(),
                        minus_outcomes: r.compilation.pattern.minus_count(),
                        parity_violations: r.compilation.parity_violations.len(),
                        logical_hash: r.logical_hash.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;

            let mut artifacts = BTreeMap::new();
            let c = &compiled.compilation;
            for (kind, path, text) in [
                ("normal", &normal, diagram_to_json(&c.normal)),
                ("logical", &logical, diagram_to_json(&c.logical)),
                ("trace", &emit_trace, c.trace.to_json()),
            ] {
                if let Some(path) = path {
                    write_text(path, &text)?;
                    artifacts.insert(kind.to_string(), path.display().to_string());
                }
            }
            if let Some(path) = &report {
                artifacts.insert("report".to_string(), path.display().to_string());
            }
            let result = Report {
                input: pattern.display().to_string(),
                input_digest: digest(&bytes),
                convention: file.lattice.convention.name().to_string(),
                outcomes: file.outcomes.clone(),
                sites: c.build.qubit_count(),
                minus_outcomes: c.pattern.minus_count(),
                counts_before: Counts::of(&c.build.diagram),
                counts_after: Counts::of(&c.normal),
                logical_counts: Counts::of(&c.logical),
                trace_length: c.trace.len(),
                normal_form_hash: canonical_hash(&c.normal).expect("normal forms are valid"),
                logical_hash: compiled.logical_hash.clone(),
                recognized: compiled.recognized.clone(),
                recognition: compiled.recognition.clone(),
                verdict: compiled.verdict,
                parity_violations: c.parity_violations.clone(),
                sweep,
                artifacts,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let json = result.to_json();
            if let Some(path) = &report {
                write_text(path, &json)?;
            }
            emit(stdout, None, &format!("{json}\n"))?;
            if !result.parity_violations.is_empty() {
                eprintln!("warning: {} cell parity check(s) failed", result.parity_violations.len());
            }
            eprintln!("recognized: {}", result.recognized);
            Ok(if compiled.recognition.is_some() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Verify { diagram, expect, library: extra, numerics } => {
            let d = read_diagram(&diagram)?;
            let lib = library(extra.as_deref())?;
            let expect_path = Path::new(&expect);
            let (name, reference) = if expect_path.is_file() {
                let text = read_text(expect_path)?;
                let json: TensorJson = serde_json::from_str(&text).map_err(|e| CliError::parse(expect_path, e))?;
                let t = TensorMap::from_json(&json).map_err(|e| CliError::parse(expect_path, e))?;
                (expect.clone(), t)
            } else {
                let entry = lib.get(&expect).ok_or_else(|| {
                    CliError::Input(format!("unknown gate {expect:?}; known: {}", lib.names().join(", ")))
                })?;
                (entry.name.clone(), entry.tensor.clone())
            };
            let tensor = evaluate_capped(&d, numerics.rank_cap)?;
            let out = match equiv_up_to_scalar(&tensor, &reference, numerics.tol) {
                Ok(r) => VerifyOutput { expected: name, verdict: Some(r.into()), message: None },
                Err(e @ SemanticsError::ShapeMismatch { .. }) => {
                    VerifyOutput { expected: name, verdict: None, message: Some(e.to_string()) }
                }
                Err(e) => return Err(e.into()),
            };
            let equivalent = out.verdict.is_some_and(|v| v.equivalent);
            emit(stdout, None, &format!("{}\n", serde_json::to_string_pretty(&out).expect("serialises")))?;
            Ok(if equivalent { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Rewrite { diagram, rule, anchor, normalize, budget, out, emit_trace } => {
            if rule.is_none() && !normalize {
                return Err(CliError::Input("give --rule, --normalize or both".into()));
            }
            let d = read_diagram(&diagram)?;
            let mut session = Session::new(d);
            if let Some(name) = &rule {
                let rule = RuleId::from_name(name).ok_or_else(|| {
                    let known: Vec<&str> = RuleId::ALL.iter().map(|r| r.name()).collect();
                    CliError::Input(format!("unknown rule {name:?}; known: {}", known.join(", ")))
                })?;
                let m = if anchor.is_empty() {
                    session.matches(rule).into_iter().next()
                } else {
                    let m = Match::new(rule, anchor.iter().map(|&v| VertexId(v)).collect());
                    matches_at(session.diagram(), &m).then_some(m)
                };
                let m = m.ok_or_else(|| {
                    let at = if anchor.is_empty() { "anywhere".to_string() } else { format!("at anchor {anchor:?}") };
                    CliError::Input(format!("no match for rule {rule} {at}"))
                })?;
                session.apply(&m).expect("checked match applies");
            }
            let result = if normalize { session.normalize(&Policy::default().budget(budget)) } else { Ok(()) };
            if let Some(path) = &emit_trace {
                let trace = match &result {
                    Err(NormalizeError::BudgetExceeded { trace, .. }) => trace,
                    Ok(()) => session.trace(),
                };
                write_text(path, &trace.to_json())?;
            }
            result?;
            emit(stdout, out.as_deref(), &diagram_to_json(session.diagram()))?;
            Ok(EXIT_OK)
        }
        Command::ExportDot { diagram, out } => {
            let d = read_diagram(&diagram)?;
            emit(stdout, out.as_deref(), &to_dot(&d))?;
            Ok(EXIT_OK)
        }
        Command::Tensor { diagram, out, rank_cap } => {
            let d = read_diagram(&diagram)?;
            let t = evaluate_capped(&d, rank_cap)?;
            let json = serde_json::to_string_pretty(&t.to_json()).expect("tensors serialise");
            emit(stdout, out.as_deref(), &format!("{json}\n"))?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    expected: String,
    verdict: Option<Verdict>,
    message: Option<String>,
}

/// Shared settings of the main compile and every sweep run.
struct CompileJob<'a> {
    options: CompileOptions,
    numerics: &'a Numerics,
    library: &'a GateLibrary,
}

struct Compiled {
    compilation: redgreen::measurement::Compilation,
    recognized: String,
    recognition: Option<crate::recognize::Recognition>,
    verdict: Option<Verdict>,
    logical_hash: String,
}

impl CompileJob<'_> {
    fn compile(&self, file: &PatternFile) -> Result<Compiled, CompileError> {
        let compilation = compile_pattern(file, &self.options)?;
        let options = RecognizeOptions { rank_cap: self.numerics.rank_cap, tol: self.numerics.tol };
        let recognition = recognize(&compilation.logical, self.library, &options);
        let verdict = recognition.as_ref().and_then(|r| {
            let entry = self.library.get(&r.gate)?;
            let t = evaluate_with(&compilation.logical, &EvalOptions { rank_cap: options.rank_cap, ..EvalOptions::default() })
                .ok()?;
            let view = if r.qubit_order.is_empty() { t } else { reorder_tensor(&t, &r.qubit_order) };
            equiv_up_to_scalar(&view, &entry.tensor, options.tol).ok().map(Verdict::from)
        });
        let logical_hash = canonical_hash(&compilation.logical).expect("logical diagrams are valid");
        Ok(Compiled {
            recognized: recognition.as_ref().map_or_else(|| UNRECOGNIZED.to_string(), |r| r.gate.clone()),
            recognition,
            verdict,
            logical_hash,
            compilation,
        })
    }
}
