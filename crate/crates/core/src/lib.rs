//! Dialogue-driven argumentation traces.
//!
//! The crate turns a timestamped dialogue over an acyclic attack graph into
//! an event/state transition system, executes it to obtain the unique pair
//! of traces, and answers causal queries (NESS-style) over the result. It
//! also renders acceptability tables, Graphviz timelines, and a logic
//! program in a small documented ASP dialect.
//!
//! Modules map onto the processing stages:
//!
//! * [`aaf`] — attack graphs, validation, and the grounded-acceptability
//!   oracle used to cross-check the engine.
//! * [`action`] — the generic event/state kernel: fluents, formulas,
//!   contexts, and the execution semantics producing unique traces.
//! * [`translate`] — compiles a dialogue plus attack relation into an
//!   argumentative context and ranked action sequence.
//! * [`causality`] — direct NESS-causes, NESS-causes, and actual causes
//!   over a completed trace.
//! * [`render`] — acceptability tables, timeline graphs, DOT output.
//! * [`asp`] — logic-program emission and an optional external-solver
//!   bridge for differential checking.
//! * [`query`] — the `acc(x)@t` query syntax shared by the CLI and the
//!   causal API.

pub mod aaf;
pub mod action;
pub mod asp;
pub mod causality;
pub mod query;
pub mod render;
pub mod translate;
