//! Optional bridge to an external ASP solver. The emitted program is
//! handed to a user-supplied command as a file path; `o/2` and `holds/2`
//! atoms from the answer set are decoded and compared against the engine.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::process::Command;

use crate::action::{Time, Traces};

use super::parse::{parse_term, Term};
use super::{AspError, ProgramText};

/// Outcome of a bridge invocation that did not error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverVerdict {
    /// No solver command was configured; not an error.
    Unavailable,
    /// The decoded answer set agrees with the engine.
    Agreement {
        decoded_atoms: usize,
        final_acceptable: BTreeSet<String>,
    },
}

/// Runs `command` with the program written to a temp file appended as the
/// final argument, then compares the decoded answer set with the engine's
/// traces. Absence of a command yields `Unavailable`.
pub fn solver_bridge(
    prog: &ProgramText,
    tr: &Traces,
    command: Option<&str>,
) -> Result<SolverVerdict, AspError> {
    let Some(command) = command.map(str::trim).filter(|c| !c.is_empty()) else {
        return Ok(SolverVerdict::Unavailable);
    };
    let mut parts = command.split_whitespace();
    let program_name = parts
        .next()
        .ok_or_else(|| AspError::SolverUnavailable("empty solver command".into()))?;
    let args: Vec<&str> = parts.collect();

    let path = std::env::temp_dir().join(format!(
        "argtrace-{}-{}.lp",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    ));
    {
        let mut file = std::fs::File::create(&path)?;
        file.write_all(prog.text().as_bytes())?;
    }
    let output = Command::new(program_name)
        .args(&args)
        .arg(&path)
        .output()
        .map_err(|e| AspError::SolverUnavailable(format!("{program_name}: {e}")))?;
    let _ = std::fs::remove_file(&path);

    let stdout = String::from_utf8_lossy(&output.stdout);
    decode_and_compare(&stdout, tr)
}

fn decode_and_compare(stdout: &str, tr: &Traces) -> Result<SolverVerdict, AspError> {
    let mut occurrences: BTreeSet<(String, Time)> = BTreeSet::new();
    let mut holds: BTreeSet<(String, Time)> = BTreeSet::new();
    let mut decoded = 0usize;
    for token in stdout.split_whitespace() {
        let Ok(term) = parse_term(token) else { continue };
        let Term::Fun { name, args } = &term else {
            continue;
        };
        if args.len() != 2 {
            continue;
        }
        let Term::Int(t) = &args[1] else { continue };
        match name.as_str() {
            "o" => {
                occurrences.insert((args[0].to_string(), *t));
                decoded += 1;
            }
            "holds" => {
                holds.insert((args[0].to_string(), *t));
                decoded += 1;
            }
            _ => {}
        }
    }
    if decoded == 0 {
        return Err(AspError::SolverParseError(
            "no o/2 or holds/2 atoms found in solver output".into(),
        ));
    }

    let mut diffs = Vec::new();

    // Event occurrences, when the solver reported any.
    if !occurrences.is_empty() {
        let engine: BTreeSet<(String, Time)> = tr
            .events()
            .flat_map(|(t, set)| {
                set.iter()
                    .map(move |e| (super::event_term(e).to_string(), t))
            })
            .collect();
        for missing in engine.difference(&occurrences) {
            diffs.push(format!("engine fired {}@{} but solver did not", missing.0, missing.1));
        }
        for extra in occurrences.difference(&engine) {
            diffs.push(format!("solver fired {}@{} but engine did not", extra.0, extra.1));
        }
    }

    // Final acceptability per argument.
    let final_time = tr.final_time();
    let engine_acceptable: BTreeSet<String> =
        crate::translate::acceptable_in(tr.final_state(), tr.context())
            .into_iter()
            .map(|a| a.as_str().to_string())
            .collect();
    let solver_acceptable: BTreeSet<String> = holds
        .iter()
        .filter(|(term, t)| *t == final_time && term.starts_with("a(") && term.ends_with(')'))
        .map(|(term, _)| term["a(".len()..term.len() - 1].to_string())
        .collect();
    if !holds.is_empty() && solver_acceptable != engine_acceptable {
        diffs.push(format!(
            "final acceptability differs: engine {{{}}} vs solver {{{}}}",
            engine_acceptable
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(","),
            solver_acceptable
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(","),
        ));
    }

    if !diffs.is_empty() {
        return Err(AspError::SolverDisagreement(diffs.join("\n")));
    }
    Ok(SolverVerdict::Agreement {
        decoded_atoms: decoded,
        final_acceptable: engine_acceptable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aaf::{ArgGraph, ArgumentId};
    use crate::translate::{build_setting, Coverage, Dialogue};

    fn tiny_traces() -> Traces {
        let a = ArgumentId::new("a").unwrap();
        let g = ArgGraph::new(vec![a.clone()], vec![]);
        let d = Dialogue::new(vec![(a, 0)]).unwrap();
        let setting = build_setting(&d, &g, Coverage::Full).unwrap();
        crate::action::run(&setting).unwrap()
    }

    #[test]
    fn no_command_is_unavailable() {
        let tr = tiny_traces();
        let prog = super::super::emit_program(tr.setting()).unwrap();
        let verdict = solver_bridge(&prog, &tr, None).unwrap();
        assert_eq!(verdict, SolverVerdict::Unavailable);
    }

    #[test]
    fn missing_binary_is_unavailable_error() {
        let tr = tiny_traces();
        let prog = super::super::emit_program(tr.setting()).unwrap();
        let err = solver_bridge(&prog, &tr, Some("argtrace-no-such-solver")).unwrap_err();
        assert!(matches!(err, AspError::SolverUnavailable(_)));
    }

    #[test]
    fn malformed_output_is_parse_error() {
        let tr = tiny_traces();
        let err = decode_and_compare("SATISFIABLE banana", &tr).unwrap_err();
        assert!(matches!(err, AspError::SolverParseError(_)));
    }

    #[test]
    fn agreeing_output_is_decoded() {
        let tr = tiny_traces();
        // Engine trace: E(-1)=ini, E(0)=enunciate(a); final state S(1) has a acceptable.
        let out = "Answer: 1\no(ini(neg(p(a))),-1) o(ini(neg(a(a))),-1) o(enunciate(a),0) \
                   holds(a(a),1) holds(p(a),1)\nSATISFIABLE";
        let verdict = decode_and_compare(out, &tr).unwrap();
        match verdict {
            SolverVerdict::Agreement {
                final_acceptable, ..
            } => assert!(final_acceptable.contains("a")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disagreeing_output_is_reported() {
        let tr = tiny_traces();
        let out = "o(ini(neg(p(a))),-1) o(ini(neg(a(a))),-1) o(enunciate(a),0) holds(neg(a(a)),1) holds(p(a),1)";
        let err = decode_and_compare(out, &tr).unwrap_err();
        assert!(matches!(err, AspError::SolverDisagreement(_)));
    }
}
