//! Python bindings: build a dialogue session, read traces and tables,
//! query causes, and emit the logic program.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use argtrace_core::aaf::{ArgGraph, ArgumentId};
use argtrace_core::action::{run, validate_execution, Traces};
use argtrace_core::asp::emit_program;
use argtrace_core::causality::{causal_graph, CauseKind, Effect};
use argtrace_core::query::Query;
use argtrace_core::render::{
    build_table, build_timeline, render_dot, render_table_text, trace_text, TableFormat,
};
use argtrace_core::translate::{
    acceptable_in, build_setting, present_in, Coverage, Dialogue,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_argument(name: &str) -> PyResult<ArgumentId> {
    ArgumentId::new(name).map_err(value_error)
}

fn id_list(set: BTreeSet<ArgumentId>) -> Vec<String> {
    set.into_iter().map(|a| a.as_str().to_string()).collect()
}

/// One dialogue over one attack graph, already executed.
#[pyclass]
struct Session {
    dialogue: Dialogue,
    traces: Traces,
}

#[pymethods]
impl Session {
    /// Session(arguments, attacks, allow_partial=False)
    ///
    /// `arguments` is a list of (name, rank) pairs; `attacks` a list of
    /// (attacker, target) pairs.
    #[new]
    #[pyo3(signature = (arguments, attacks, allow_partial = false))]
    fn new(
        arguments: Vec<(String, u32)>,
        attacks: Vec<(String, String)>,
        allow_partial: bool,
    ) -> PyResult<Self> {
        let mut ids = Vec::new();
        let mut entries = Vec::new();
        for (name, rank) in &arguments {
            let id = to_argument(name)?;
            ids.push(id.clone());
            entries.push((id, *rank));
        }
        let mut edges = Vec::new();
        for (y, x) in &attacks {
            edges.push((to_argument(y)?, to_argument(x)?));
        }
        let graph = ArgGraph::new(ids, edges);
        graph.validate().map_err(value_error)?;
        let dialogue = Dialogue::new(entries).map_err(value_error)?;
        let coverage = if allow_partial {
            Coverage::AllowPartial
        } else {
            Coverage::Full
        };
        let setting = build_setting(&dialogue, &graph, coverage).map_err(value_error)?;
        let traces = run(&setting).map_err(value_error)?;
        Ok(Session { dialogue, traces })
    }

    /// Index of the last state.
    fn final_time(&self) -> i64 {
        self.traces.final_time()
    }

    /// Arguments acceptable in the final state.
    fn final_acceptable(&self) -> Vec<String> {
        id_list(acceptable_in(
            self.traces.final_state(),
            self.traces.context(),
        ))
    }

    /// Arguments acceptable at state t.
    fn acceptable_at(&self, t: i64) -> PyResult<Vec<String>> {
        let s = self
            .traces
            .state_at(t)
            .ok_or_else(|| value_error(format!("state {t} out of range")))?;
        Ok(id_list(acceptable_in(s, self.traces.context())))
    }

    /// Arguments present at state t.
    fn present_at(&self, t: i64) -> PyResult<Vec<String>> {
        let s = self
            .traces
            .state_at(t)
            .ok_or_else(|| value_error(format!("state {t} out of range")))?;
        Ok(id_list(present_in(s, self.traces.context())))
    }

    /// Events fired at t (t = -1 holds the ini events).
    fn events_at(&self, t: i64) -> PyResult<Vec<String>> {
        let set = self
            .traces
            .events_at(t)
            .ok_or_else(|| value_error(format!("event step {t} out of range")))?;
        Ok(set.iter().map(|e| e.to_string()).collect())
    }

    /// Plain-text dump of the whole run.
    fn trace(&self) -> String {
        trace_text(&self.traces)
    }

    /// Acceptability table, `format` is "unicode" or "csv".
    #[pyo3(signature = (format = "unicode"))]
    fn table(&self, format: &str) -> PyResult<String> {
        let fmt = match format {
            "unicode" => TableFormat::Unicode,
            "csv" => TableFormat::Csv,
            other => return Err(value_error(format!("unknown table format {other:?}"))),
        };
        let table = build_table(&self.traces, &self.dialogue);
        Ok(render_table_text(&table, fmt))
    }

    /// Causal links for a query such as "acc(l)@final".
    ///
    /// Returns (kind, cause, effect) triples; kinds are "direct", "ness",
    /// and "actual".
    #[pyo3(signature = (query, kinds = None, show_ini = false))]
    fn causes(
        &self,
        query: &str,
        kinds: Option<Vec<String>>,
        show_ini: bool,
    ) -> PyResult<Vec<(String, String, String)>> {
        let query = Query::parse(query).map_err(value_error)?;
        let target = query.to_timed_formula(&self.traces);
        let graph = causal_graph(&self.traces, &target).map_err(value_error)?;
        let wanted: Option<BTreeSet<String>> = kinds.map(|ks| ks.into_iter().collect());
        let mut out = Vec::new();
        for link in &graph.links {
            let kind = match link.kind {
                CauseKind::DirectNess => "direct",
                CauseKind::Ness => "ness",
                CauseKind::Actual => "actual",
            };
            if let Some(w) = &wanted {
                if !w.contains(kind) {
                    continue;
                }
            }
            if !show_ini && link.cause.is_ini() {
                continue;
            }
            let effect = match &link.effect {
                Effect::Event(o) => o.to_string(),
                Effect::Formula(tf) => tf.to_string(),
            };
            out.push((kind.to_string(), link.cause.to_string(), effect));
        }
        Ok(out)
    }

    /// Graphviz DOT for the window [start, end], optionally overlaying the
    /// causal graph of a query.
    #[pyo3(signature = (start, end, causes = None))]
    fn timeline_dot(&self, start: i64, end: i64, causes: Option<&str>) -> PyResult<String> {
        let graph = match causes {
            Some(text) => {
                let query = Query::parse(text).map_err(value_error)?;
                Some(
                    causal_graph(&self.traces, &query.to_timed_formula(&self.traces))
                        .map_err(value_error)?,
                )
            }
            None => None,
        };
        let timeline =
            build_timeline(&self.traces, start, end, graph.as_ref()).map_err(value_error)?;
        Ok(render_dot(&timeline))
    }

    /// The four-part logic program as text.
    fn asp_program(&self) -> PyResult<String> {
        let prog = emit_program(self.traces.setting()).map_err(value_error)?;
        Ok(prog.text())
    }

    /// Re-checks every execution condition; returns the violations (an
    /// empty list means the run is valid).
    fn check(&self) -> Vec<String> {
        validate_execution(&self.traces, self.traces.setting())
            .iter()
            .map(|v| v.to_string())
            .collect()
    }
}

/// Grounded acceptability of an acyclic attack graph, computed by the
/// topological oracle (no trace machinery involved).
#[pyfunction]
fn grounded(arguments: Vec<String>, attacks: Vec<(String, String)>) -> PyResult<Vec<String>> {
    let mut ids = Vec::new();
    for name in &arguments {
        ids.push(to_argument(name)?);
    }
    let mut edges = Vec::new();
    for (y, x) in &attacks {
        edges.push((to_argument(y)?, to_argument(x)?));
    }
    let graph = ArgGraph::new(ids, edges);
    let labeling = graph.grounded_labeling().map_err(value_error)?;
    Ok(id_list(labeling.accepted()))
}

#[pymodule]
fn argtrace(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(grounded, m)?)?;
    Ok(())
}
