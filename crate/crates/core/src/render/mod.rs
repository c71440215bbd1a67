//! Human-facing views of a run: the acceptability table, the timeline
//! graph with optional causal overlay, and a plain-text trace dump.

mod dot;
mod table;
mod timeline;

pub use dot::{check_dot, render_dot};
pub use table::{build_table, render_table_text, AcceptabilityTable, Cell, TableFormat};
pub use timeline::{build_timeline, FluentNode, NodeRef, TimelineGraph};

use thiserror::Error;

use crate::action::{Time, Traces};
use crate::translate::{acceptable_in, context_attacks, present_in};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("window {from}..{to} is outside the trace (states 0..{max})")]
    WindowOutOfRange { from: Time, to: Time, max: Time },
}

/// Deterministic plain-text dump of a full run: the attack capabilities
/// once, then alternating event sets and states.
pub fn trace_text(tr: &Traces) -> String {
    let ctx = tr.context();
    let mut out = String::new();
    let attacks = context_attacks(ctx);
    out.push_str("canAttack:");
    if attacks.is_empty() {
        out.push_str(" -");
    }
    for (y, x) in &attacks {
        out.push_str(&format!(" {y}->{x}"));
    }
    out.push('\n');
    for (t, s) in tr.states() {
        if let Some(events) = tr.events_at(t - 1) {
            let names: Vec<String> = events.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!(
                "E({}): {}\n",
                t - 1,
                if names.is_empty() {
                    "-".to_string()
                } else {
                    names.join(" ")
                }
            ));
        }
        let present = join_args(present_in(s, ctx));
        let acceptable = join_args(acceptable_in(s, ctx));
        out.push_str(&format!(
            "S({t}): present={{{present}}} acceptable={{{acceptable}}}\n"
        ));
    }
    out
}

fn join_args(set: std::collections::BTreeSet<crate::aaf::ArgumentId>) -> String {
    set.iter()
        .map(|a| a.as_str().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Times at which sequence actions fired, ascending; the k-th entry is the
/// step of the k-th rank.
pub(crate) fn action_step_times(tr: &Traces) -> Vec<Time> {
    let ctx = tr.context();
    tr.events()
        .filter(|(t, fired)| {
            *t >= 0
                && fired.iter().any(|e| {
                    ctx.event(e)
                        .is_some_and(|s| s.class == crate::action::EventClass::Action)
                })
        })
        .map(|(t, _)| t)
        .collect()
}
