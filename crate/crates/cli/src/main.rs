//! `argtrace` — run dialogues over acyclic attack graphs, inspect the
//! resulting traces, and query causes.
//!
//! Exit codes: 0 success; 1 file or query parse error; 2 validation error
//! (cycles, duplicate or unknown identifiers, bad windows or targets);
//! 3 internal invariant violation (self-audit failure); 4 solver
//! unavailable or disagreeing.

mod input;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use argtrace_core::aaf::AafError;
use argtrace_core::action::{
    run, run_scrambled, validate_execution, ActionError, EventId, Time, Traces,
};
use argtrace_core::asp::{emit_program, solver_bridge, AspError, SolverVerdict};
use argtrace_core::causality::{
    causal_graph, holding_span, CausalError, CauseKind, Effect, Occurrence,
};
use argtrace_core::query::{Query, QueryError};
use argtrace_core::render::{
    build_table, build_timeline, render_dot, render_table_text, trace_text, RenderError,
    TableFormat,
};
use argtrace_core::translate::{
    acceptable_in, associated_graph, build_setting, is_argumentative_state, Coverage, Dialogue,
    TranslateError,
};

use input::LoadedInput;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    File(String),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Causal(#[from] CausalError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error("self-audit failed:\n{0}")]
    Audit(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::File(_) | CliError::Query(_) | CliError::Io(_) => 1,
            CliError::Translate(e) => translate_code(e),
            CliError::Causal(_) | CliError::Render(_) => 2,
            CliError::Asp(e) => match e {
                AspError::SolverUnavailable(_)
                | AspError::SolverParseError(_)
                | AspError::SolverDisagreement(_) => 4,
                AspError::Kernel(k) => kernel_code(k),
                AspError::ParseError { .. } => 1,
                AspError::Io(_) => 1,
            },
            CliError::Audit(_) => 3,
        }
    }
}

fn translate_code(e: &TranslateError) -> u8 {
    match e {
        TranslateError::Graph(AafError::CycleFound(_))
        | TranslateError::Graph(AafError::DuplicateArgument(_))
        | TranslateError::Graph(AafError::UnknownArgument(_))
        | TranslateError::Graph(AafError::BadArgumentName(_))
        | TranslateError::Graph(AafError::TooLarge { .. })
        | TranslateError::DuplicateDialogueArgument(_)
        | TranslateError::UnknownDialogueArgument(_)
        | TranslateError::MissingArguments(_)
        | TranslateError::NotFinal(_) => 2,
        TranslateError::Kernel(k) => kernel_code(k),
    }
}

fn kernel_code(e: &ActionError) -> u8 {
    match e {
        ActionError::PreconditionViolated { .. }
        | ActionError::DuplicateSequenceAction { .. }
        | ActionError::UnknownEvent(_)
        | ActionError::NotAction(_) => 2,
        _ => 3,
    }
}

#[derive(Parser)]
#[command(
    name = "argtrace",
    about = "Dialogue traces, acceptability tables, timelines, and causes over acyclic attack graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dialogue and dump the event/state traces as text.
    Run { file: PathBuf },
    /// Render the acceptability table.
    Table {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TableStyle::Unicode)]
        format: TableStyle,
    },
    /// Render a timeline window as Graphviz DOT.
    Timeline {
        file: PathBuf,
        /// First state shown.
        #[arg(long)]
        from: Time,
        /// Last state shown.
        #[arg(long)]
        to: Time,
        /// Overlay the causal graph of this query, e.g. "acc(l)@final".
        #[arg(long)]
        causes: Option<String>,
        /// Write the DOT text here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the causes of a query, e.g. "not-acc(c)@final".
    Causes {
        file: PathBuf,
        query: String,
        /// Comma-separated subset of direct,ness,actual.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<KindArg>,
        /// Include causes from the bounded past (ini events).
        #[arg(long)]
        show_ini: bool,
    },
    /// Emit the four-part logic program; optionally hand it to a solver.
    EmitAsp {
        file: PathBuf,
        /// Write the program here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Solver command; the program file path is appended. Falls back
        /// to the ARGTRACE_SOLVER environment variable.
        #[arg(long)]
        solve: Option<String>,
    },
    /// Re-check every semantic condition and theorem on this input.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableStyle {
    Unicode,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Direct,
    Ness,
    Actual,
}

impl From<KindArg> for CauseKind {
    fn from(k: KindArg) -> CauseKind {
        match k {
            KindArg::Direct => CauseKind::DirectNess,
            KindArg::Ness => CauseKind::Ness,
            KindArg::Actual => CauseKind::Actual,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Prints a line, exiting quietly when the reader hung up.
fn say(text: impl std::fmt::Display) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout(), "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn say_raw(text: &str) {
    use std::io::Write;
    if let Err(e) = write!(std::io::stdout(), "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn load_and_run(file: &std::path::Path) -> Result<(LoadedInput, Traces), CliError> {
    let input = input::load(file)?;
    let setting = build_setting(&input.dialogue, &input.graph, Coverage::AllowPartial)?;
    let traces = run(&setting).map_err(TranslateError::from)?;
    Ok((input, traces))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            say_raw(text);
            Ok(())
        }
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { file } => {
            let (input, traces) = load_and_run(&file)?;
            if let Some(title) = &input.title {
                say(format!("# {title}"));
            }
            if let Some(notes) = &input.notes {
                say(format!("# {notes}"));
            }
            say_raw(&trace_text(&traces));
            Ok(())
        }
        Command::Table { file, format } => {
            let (input, traces) = load_and_run(&file)?;
            let table = build_table(&traces, &input.dialogue);
            let text = render_table_text(
                &table,
                match format {
                    TableStyle::Unicode => TableFormat::Unicode,
                    TableStyle::Csv => TableFormat::Csv,
                },
            );
            say_raw(&text);
            Ok(())
        }
        Command::Timeline {
            file,
            from,
            to,
            causes,
            output,
        } => {
            let (_, traces) = load_and_run(&file)?;
            let graph = match causes {
                Some(text) => {
                    let query = Query::parse(&text)?;
                    Some(causal_graph(&traces, &query.to_timed_formula(&traces))?)
                }
                None => None,
            };
            let timeline = build_timeline(&traces, from, to, graph.as_ref())?;
            write_out(output.as_ref(), &render_dot(&timeline))
        }
        Command::Causes {
            file,
            query,
            kinds,
            show_ini,
        } => {
            let (_, traces) = load_and_run(&file)?;
            let query = Query::parse(&query)?;
            let kinds: BTreeSet<CauseKind> = if kinds.is_empty() {
                [CauseKind::DirectNess, CauseKind::Ness, CauseKind::Actual]
                    .into_iter()
                    .collect()
            } else {
                kinds.into_iter().map(CauseKind::from).collect()
            };
            print_causes(&traces, &query, &kinds, show_ini)
        }
        Command::EmitAsp {
            file,
            output,
            solve,
        } => {
            let (_, traces) = load_and_run(&file)?;
            let prog = emit_program(traces.setting())?;
            write_out(output.as_ref(), &prog.text())?;
            let command = solve.or_else(|| std::env::var("ARGTRACE_SOLVER").ok());
            if let Some(command) = command {
                match solver_bridge(&prog, &traces, Some(&command))? {
                    SolverVerdict::Unavailable => {}
                    SolverVerdict::Agreement {
                        decoded_atoms,
                        final_acceptable,
                    } => {
                        eprintln!(
                            "solver agrees: {decoded_atoms} atoms decoded, final acceptable = {{{}}}",
                            final_acceptable.into_iter().collect::<Vec<_>>().join(",")
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Check { file } => {
            let (input, traces) = load_and_run(&file)?;
            check_report(&input, &traces)
        }
    }
}

fn query_style(lit: &argtrace_core::action::Literal) -> String {
    use argtrace_core::action::Fluent;
    match (&lit.fluent, lit.positive) {
        (Fluent::Acceptable(x), true) => format!("acc({x})"),
        (Fluent::Acceptable(x), false) => format!("not-acc({x})"),
        (Fluent::Present(x), true) => format!("present({x})"),
        _ => lit.to_string(),
    }
}

fn print_causes(
    traces: &Traces,
    query: &Query,
    kinds: &BTreeSet<CauseKind>,
    show_ini: bool,
) -> Result<(), CliError> {
    let target = query.to_timed_formula(traces);
    let graph = causal_graph(traces, &target)?;
    say(format!("query: {}@{}", query_style(&query.literal()), target.time));
    let visible = |o: &Occurrence| show_ini || !o.is_ini();
    for link in &graph.links {
        if !kinds.contains(&link.kind) || !visible(&link.cause) {
            continue;
        }
        let effect = match &link.effect {
            Effect::Event(o) => o.to_string(),
            Effect::Formula(tf) => {
                // Direct causes establish a literal; show its full span.
                if let argtrace_core::action::Formula::Lit(l) = &tf.formula {
                    let span = holding_span(traces, l, tf.time);
                    match span {
                        Some((start, end)) if link.kind == CauseKind::DirectNess && end > start => {
                            format!("{}@{}..{}", query_style(l), start.max(link.cause.time + 1), end)
                        }
                        _ => format!("{}@{}", query_style(l), tf.time),
                    }
                } else {
                    tf.to_string()
                }
            }
        };
        say(format!("{}: {} => {}", link.kind, link.cause, effect));
    }
    Ok(())
}

fn check_report(input: &LoadedInput, traces: &Traces) -> Result<(), CliError> {
    let mut failures = Vec::new();
    let mut report = |name: &str, outcome: Result<(), String>| match outcome {
        Ok(()) => say(format!("ok - {name}")),
        Err(detail) => {
            say(format!("FAIL - {name}: {detail}"));
            failures.push(format!("{name}: {detail}"));
        }
    };

    let setting = traces.setting();
    let ctx = traces.context();

    // Every condition of the execution semantics.
    let violations = validate_execution(traces, setting);
    report(
        "execution conditions",
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "))
        },
    );

    // Stillness equivalence on every trace state.
    let mut lemma = Ok(());
    for (t, s) in traces.states() {
        let quiescent = argtrace_core::action::is_quiescent(s, ctx)
            .map_err(|e| format!("S({t}): {e}"))
            .unwrap_or(false);
        let argumentative = is_argumentative_state(s, ctx).is_argumentative;
        if quiescent != argumentative {
            lemma = Err(format!("S({t}): quiescent={quiescent}, argumentative={argumentative}"));
            break;
        }
    }
    report("quiescence equals argumentative state", lemma);

    // Acceptability against the oracle in every argumentative state.
    let mut oracle_check = Ok(());
    'states: for (t, s) in traces.states() {
        if !is_argumentative_state(s, ctx).is_argumentative {
            continue;
        }
        let assoc = associated_graph(s, ctx);
        match assoc.grounded_labeling() {
            Ok(labels) => {
                let engine = acceptable_in(s, ctx);
                for x in assoc.arguments() {
                    if engine.contains(x) != labels.is_accepted(x) {
                        oracle_check = Err(format!("S({t}): disagreement on {x}"));
                        break 'states;
                    }
                }
            }
            Err(e) => {
                oracle_check = Err(format!("S({t}): {e}"));
                break 'states;
            }
        }
    }
    report("acceptability matches the grounded oracle", oracle_check);

    // Final graph equals the enunciated subgraph (whole graph when the
    // dialogue covers it).
    let spoken: BTreeSet<_> = input.dialogue.arguments().cloned().collect();
    let induced_args: Vec<_> = input
        .graph
        .arguments()
        .iter()
        .filter(|a| spoken.contains(*a))
        .cloned()
        .collect();
    let induced_attacks: Vec<_> = input
        .graph
        .attacks()
        .iter()
        .filter(|(y, x)| spoken.contains(y) && spoken.contains(x))
        .cloned()
        .collect();
    let assoc = associated_graph(traces.final_state(), ctx);
    let same_args = assoc.arguments().iter().collect::<BTreeSet<_>>()
        == induced_args.iter().collect::<BTreeSet<_>>();
    let same_attacks = assoc.attacks().iter().collect::<BTreeSet<_>>()
        == induced_attacks.iter().collect::<BTreeSet<_>>();
    report(
        "final graph equals the enunciated input",
        if same_args && same_attacks {
            Ok(())
        } else {
            Err("associated graph differs from the input".into())
        },
    );

    // Rank order must not affect the final state.
    let mut order_check = Ok(());
    for variant in [reversed(&input.dialogue), rotated(&input.dialogue)] {
        match build_setting(&variant, &input.graph, Coverage::AllowPartial)
            .map_err(CliError::from)
            .and_then(|s| run(&s).map_err(TranslateError::from).map_err(CliError::from))
        {
            Ok(other) => {
                if other.final_state() != traces.final_state() {
                    order_check = Err("a rank permutation changed the final state".into());
                    break;
                }
            }
            Err(e) => {
                order_check = Err(e.to_string());
                break;
            }
        }
    }
    report("final state is order-independent", order_check);

    // Reruns, including scrambled internal order, are byte-identical.
    let baseline = trace_text(traces);
    let again = run(setting)
        .map(|t| trace_text(&t))
        .unwrap_or_default();
    let mut scramble = |v: &mut Vec<EventId>| v.reverse();
    let scrambled = run_scrambled(setting, &mut scramble)
        .map(|t| trace_text(&t))
        .unwrap_or_default();
    report(
        "reruns are byte-identical",
        if baseline == again && baseline == scrambled {
            Ok(())
        } else {
            Err("trace text differs between runs".into())
        },
    );

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Audit(failures.join("\n")))
    }
}

/// Applies a bijection on the distinct rank values, preserving which
/// arguments share a rank.
fn permute_ranks(d: &Dialogue, f: impl Fn(usize, usize) -> usize) -> Dialogue {
    let mut distinct: Vec<u32> = d.entries().iter().map(|(_, o)| *o).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let k = distinct.len();
    Dialogue::new(
        d.entries()
            .iter()
            .map(|(a, o)| {
                let i = distinct.iter().position(|r| r == o).expect("own rank");
                (a.clone(), distinct[f(i, k)])
            })
            .collect(),
    )
    .expect("same arguments")
}

fn reversed(d: &Dialogue) -> Dialogue {
    permute_ranks(d, |i, k| k - 1 - i)
}

fn rotated(d: &Dialogue) -> Dialogue {
    permute_ranks(d, |i, k| (i + 1) % k)
}
