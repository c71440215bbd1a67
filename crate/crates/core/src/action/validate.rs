//! Independent re-check of a finished execution against every condition of
//! the semantics. Used as the engine's self-audit: it shares no code with
//! the run loop beyond formula evaluation and effect application.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::run::{apply_effects, eval_formula};
use super::{EventClass, EventId, EventSpec, Fluent, Setting, Time, Traces};

/// One violated condition of the execution semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A state is not a total assignment over the context's fluents.
    IncompleteState { time: Time },
    /// 2.a — a fired event's precondition does not hold.
    PreconditionFailed { event: EventId, time: Time },
    /// 2.b — two co-fired events are priority-related.
    PriorityConflict {
        higher: EventId,
        lower: EventId,
        time: Time,
    },
    /// 2.c — a triggered exogenous event neither fired nor was preempted.
    MissedTrigger { event: EventId, time: Time },
    /// 2.d — an action fired while some exogenous event was triggered.
    ActionDuringTrigger {
        action: EventId,
        exogenous: EventId,
        time: Time,
    },
    /// 2.e — an event set at t >= 0 is empty.
    EmptyStep { time: Time },
    /// 3 — the successor state differs from the frame update.
    FrameViolation { fluent: Fluent, time: Time },
    /// The successor state could not even be computed (conflicting effects).
    EffectConflict { time: Time, detail: String },
    /// E(-1) is not exactly the set of ini events covering S(0).
    BadBoundedPast,
    /// An ini event occurs at t >= 0.
    IniAfterStart { event: EventId, time: Time },
    /// A fired action is not part of the sequence.
    ForeignAction { event: EventId, time: Time },
    /// A sequence action occurred more than once.
    RepeatedAction { event: EventId },
    /// A sequence action never occurred.
    MissingAction { event: EventId },
    /// Rank order broken: a lower rank fired no earlier than a higher one.
    RankOrder {
        earlier: EventId,
        later: EventId,
    },
    /// Equal ranks did not co-occur.
    RankSplit { left: EventId, right: EventId },
    /// Event and state traces have inconsistent lengths.
    LengthMismatch { events: usize, states: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IncompleteState { time } => {
                write!(f, "S({time}) is not total over the declared fluents")
            }
            Violation::PreconditionFailed { event, time } => {
                write!(f, "pre({event}) does not hold at t={time}")
            }
            Violation::PriorityConflict {
                higher,
                lower,
                time,
            } => write!(f, "{higher} and {lower} co-fire at t={time} despite priority"),
            Violation::MissedTrigger { event, time } => {
                write!(f, "{event} is triggered at t={time} but neither fires nor is preempted")
            }
            Violation::ActionDuringTrigger {
                action,
                exogenous,
                time,
            } => write!(f, "action {action} fires at t={time} while {exogenous} is triggered"),
            Violation::EmptyStep { time } => write!(f, "E({time}) is empty"),
            Violation::FrameViolation { fluent, time } => {
                write!(f, "S({}) disagrees with the frame update on {fluent}", time + 1)
            }
            Violation::EffectConflict { time, detail } => {
                write!(f, "effects at t={time} conflict: {detail}")
            }
            Violation::BadBoundedPast => {
                write!(f, "E(-1) is not the ini cover of S(0)")
            }
            Violation::IniAfterStart { event, time } => {
                write!(f, "{event} occurs at t={time}")
            }
            Violation::ForeignAction { event, time } => {
                write!(f, "action {event} at t={time} is not in the sequence")
            }
            Violation::RepeatedAction { event } => write!(f, "{event} occurs more than once"),
            Violation::MissingAction { event } => write!(f, "{event} never occurs"),
            Violation::RankOrder { earlier, later } => {
                write!(f, "{earlier} must fire strictly before {later}")
            }
            Violation::RankSplit { left, right } => {
                write!(f, "{left} and {right} share a rank but fire at different times")
            }
            Violation::LengthMismatch { events, states } => {
                write!(f, "{events} event sets vs {states} states")
            }
        }
    }
}

/// Re-checks every condition of the execution semantics over a finished
/// trace. An empty result means the execution is valid.
pub fn validate_execution(tr: &Traces, setting: &Setting) -> Vec<Violation> {
    let ctx = setting.context();
    let mut out = Vec::new();

    let n_events = tr.events().count();
    let n_states = tr.states().count();
    if n_events != n_states {
        out.push(Violation::LengthMismatch {
            events: n_events,
            states: n_states,
        });
    }

    // States are total assignments over the fluent universe.
    for (t, s) in tr.states() {
        if !s.covers(ctx.fluents()) {
            out.push(Violation::IncompleteState { time: t });
        }
    }

    // Bounded past: E(-1) must be exactly the ini cover of S(0).
    if let Some(first) = tr.events_at(-1) {
        if *first != ctx.ini_events() {
            out.push(Violation::BadBoundedPast);
        }
    }

    let sequence_actions: BTreeSet<EventId> =
        setting.sequence().iter().map(|(e, _)| e.clone()).collect();
    let mut occurrences: BTreeMap<EventId, Vec<Time>> = BTreeMap::new();

    for (t, fired) in tr.events() {
        if t < 0 {
            continue;
        }
        let Some(s) = tr.state_at(t) else { continue };

        if fired.is_empty() {
            out.push(Violation::EmptyStep { time: t });
        }

        for e in fired {
            let Some(spec) = ctx.event(e) else { continue };
            // 2.a
            if !eval_formula(s, &spec.pre).unwrap_or(false) {
                out.push(Violation::PreconditionFailed {
                    event: e.clone(),
                    time: t,
                });
            }
            match spec.class {
                EventClass::Ini => out.push(Violation::IniAfterStart {
                    event: e.clone(),
                    time: t,
                }),
                EventClass::Action => {
                    occurrences.entry(e.clone()).or_default().push(t);
                    if !sequence_actions.contains(e) {
                        out.push(Violation::ForeignAction {
                            event: e.clone(),
                            time: t,
                        });
                    }
                }
                EventClass::Exogenous => {}
            }
        }

        // 2.b
        for a in fired {
            for b in fired {
                if ctx.priority().dominates(a, b) {
                    out.push(Violation::PriorityConflict {
                        higher: a.clone(),
                        lower: b.clone(),
                        time: t,
                    });
                }
            }
        }

        // 2.c and 2.d
        let triggered: Vec<&EventSpec> = ctx
            .events()
            .filter(|spec| {
                spec.class == EventClass::Exogenous
                    && eval_formula(s, &spec.tri).unwrap_or(false)
            })
            .collect();
        for spec in &triggered {
            let fires = fired.contains(&spec.id);
            let preempted = fired.iter().any(|e| ctx.priority().dominates(e, &spec.id));
            if !fires && !preempted {
                out.push(Violation::MissedTrigger {
                    event: spec.id.clone(),
                    time: t,
                });
            }
        }
        if let Some(action) = fired
            .iter()
            .find(|e| ctx.event(e).is_some_and(|s| s.class == EventClass::Action))
        {
            if let Some(exo) = triggered.first() {
                out.push(Violation::ActionDuringTrigger {
                    action: action.clone(),
                    exogenous: exo.id.clone(),
                    time: t,
                });
            }
        }

        // 3 — frame axiom.
        let specs: Vec<&EventSpec> = fired.iter().filter_map(|e| ctx.event(e)).collect();
        match apply_effects(s, &specs) {
            Ok(expected) => {
                if let Some(actual) = tr.state_at(t + 1) {
                    for fl in ctx.fluents() {
                        if expected.truth(fl) != actual.truth(fl) {
                            out.push(Violation::FrameViolation {
                                fluent: fl.clone(),
                                time: t,
                            });
                        }
                    }
                }
            }
            Err(e) => out.push(Violation::EffectConflict {
                time: t,
                detail: e.to_string(),
            }),
        }
    }

    // Sequence placement: each ranked action exactly once, ranks in order,
    // equal ranks simultaneous.
    let mut first_time: BTreeMap<EventId, Time> = BTreeMap::new();
    for (e, _) in setting.sequence().iter() {
        match occurrences.get(e).map(Vec::as_slice) {
            None | Some([]) => out.push(Violation::MissingAction { event: e.clone() }),
            Some([t]) => {
                first_time.insert(e.clone(), *t);
            }
            Some(_) => out.push(Violation::RepeatedAction { event: e.clone() }),
        }
    }
    let seq: Vec<(EventId, u32)> = setting.sequence().iter().cloned().collect();
    for (e, o) in &seq {
        for (e2, o2) in &seq {
            let (Some(&t1), Some(&t2)) = (first_time.get(e), first_time.get(e2)) else {
                continue;
            };
            if o < o2 && t1 >= t2 {
                out.push(Violation::RankOrder {
                    earlier: e.clone(),
                    later: e2.clone(),
                });
            }
            if o == o2 && e < e2 && t1 != t2 {
                out.push(Violation::RankSplit {
                    left: e.clone(),
                    right: e2.clone(),
                });
            }
        }
    }

    out
}
