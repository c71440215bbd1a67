//! The timeline view: per time point, the acceptability fluents that hold
//! (hexagons once rendered) and the events fired between states
//! (rectangles), with an optional causal-edge overlay.

use std::collections::BTreeSet;

use crate::aaf::ArgumentId;
use crate::action::{EventId, Fluent, Formula, Literal, Time, Traces};
use crate::causality::{CausalGraph, CauseKind, Effect};
use crate::translate::context_arguments;

use super::RenderError;

/// One acceptability fluent shown in a state column. `negated` marks the
/// light-shade rendering of a fluent that an in-window event turned false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentNode {
    pub argument: ArgumentId,
    pub negated: bool,
}

/// Endpoint of a causal overlay edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeRef {
    Event { time: Time, event: EventId },
    Fluent { time: Time, argument: ArgumentId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineGraph {
    pub from: Time,
    pub to: Time,
    /// One entry per state in the window: (time, shown fluents).
    pub states: Vec<(Time, Vec<FluentNode>)>,
    /// Events fired at in-window times.
    pub events: Vec<(Time, EventId)>,
    /// Causal overlay edges whose endpoints exist in the graph.
    pub causal: Vec<(CauseKind, NodeRef, NodeRef)>,
}

/// Builds the window view. Only `Acceptable` fluents are shown; a fluent
/// whose negation holds appears (shaded) only while that negation persists
/// from an in-window event that caused it.
pub fn build_timeline(
    tr: &Traces,
    from: Time,
    to: Time,
    causal: Option<&CausalGraph>,
) -> Result<TimelineGraph, RenderError> {
    let max = tr.final_time();
    if from < 0 || to > max || from > to {
        return Err(RenderError::WindowOutOfRange { from, to, max });
    }
    let ctx = tr.context();
    let arguments = context_arguments(ctx);

    let mut states = Vec::new();
    for t in from..=to {
        let s = tr.state_at(t).expect("window checked");
        let mut nodes = Vec::new();
        for x in &arguments {
            let acc = Fluent::Acceptable(x.clone());
            match s.truth(&acc) {
                Some(true) => nodes.push(FluentNode {
                    argument: x.clone(),
                    negated: false,
                }),
                Some(false) if negated_by_window_event(tr, &acc, t, from) => {
                    nodes.push(FluentNode {
                        argument: x.clone(),
                        negated: true,
                    });
                }
                _ => {}
            }
        }
        states.push((t, nodes));
    }

    let mut events = Vec::new();
    for t in from..=to {
        if let Some(fired) = tr.events_at(t) {
            for e in fired {
                events.push((t, e.clone()));
            }
        }
    }

    let mut graph = TimelineGraph {
        from,
        to,
        states,
        events,
        causal: Vec::new(),
    };
    if let Some(cg) = causal {
        overlay(&mut graph, cg);
    }
    Ok(graph)
}

/// True when an event fired at a window time negated the fluent and the
/// negation has held ever since: the shaded rendering tracks the negation
/// back to its establishing step and requires that step to be in view.
fn negated_by_window_event(tr: &Traces, fluent: &Fluent, t: Time, from: Time) -> bool {
    let neg = Literal::neg(fluent.clone());
    let holds = |u: Time| {
        tr.state_at(u)
            .and_then(|s| s.holds(&neg))
            .unwrap_or(false)
    };
    if !holds(t) {
        return false;
    }
    let mut established = t;
    while established > 0 && holds(established - 1) {
        established -= 1;
    }
    if established == 0 {
        // Initial condition from the bounded past, not an event in view.
        return false;
    }
    let fire = established - 1;
    fire >= from
        && tr.events_at(fire).is_some_and(|fired| {
            fired.iter().any(|e| {
                tr.context()
                    .event(e)
                    .is_some_and(|spec| spec.eff.asserts(&neg))
            })
        })
}

fn overlay(graph: &mut TimelineGraph, cg: &CausalGraph) {
    let event_nodes: BTreeSet<(Time, EventId)> = graph.events.iter().cloned().collect();
    let fluent_node = |time: Time, f: &Formula| -> Option<NodeRef> {
        let Formula::Lit(l) = f else { return None };
        let Fluent::Acceptable(x) = &l.fluent else {
            return None;
        };
        let shown = graph
            .states
            .iter()
            .find(|(t, _)| *t == time)
            .is_some_and(|(_, nodes)| {
                nodes
                    .iter()
                    .any(|n| &n.argument == x && n.negated != l.positive)
            });
        shown.then(|| NodeRef::Fluent {
            time,
            argument: x.clone(),
        })
    };
    for link in &cg.links {
        let cause = (link.cause.time, link.cause.event.clone());
        if !event_nodes.contains(&cause) {
            continue;
        }
        let cause_ref = NodeRef::Event {
            time: link.cause.time,
            event: link.cause.event.clone(),
        };
        let effect_ref = match &link.effect {
            Effect::Event(o) => {
                let key = (o.time, o.event.clone());
                if !event_nodes.contains(&key) {
                    continue;
                }
                NodeRef::Event {
                    time: o.time,
                    event: o.event.clone(),
                }
            }
            Effect::Formula(tf) => match fluent_node(tf.time, &tf.formula) {
                Some(r) => r,
                None => continue,
            },
        };
        graph.causal.push((link.kind, cause_ref, effect_ref));
    }
}
