//! Execution semantics: formula evaluation, effect application, exogenous
//! triggering with priority resolution, and the run loop.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    ActionError, Context, EventClass, EventId, EventSpec, Formula, Horizon, Setting, StateAssign,
    Time, Traces,
};

/// Truth-functional evaluation of a condition formula against a state.
pub fn eval_formula(s: &StateAssign, f: &Formula) -> Result<bool, ActionError> {
    match f {
        Formula::Lit(l) => s
            .holds(l)
            .ok_or_else(|| ActionError::UnknownFluent(l.fluent.clone())),
        Formula::And(parts) => {
            for p in parts {
                if !eval_formula(s, p)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(parts) => {
            for p in parts {
                if eval_formula(s, p)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// The frame update: literals persist unless a fired effect asserts the
/// complement, and every fired effect literal holds in the result.
///
/// Two fired events asserting opposite polarities of one fluent indicate a
/// context-construction bug and are reported as `ConflictingEffects`.
pub fn apply_effects(s: &StateAssign, fired: &[&EventSpec]) -> Result<StateAssign, ActionError> {
    let mut asserted: BTreeMap<&super::Fluent, (bool, Vec<EventId>)> = BTreeMap::new();
    for spec in fired {
        for l in spec.eff.literals() {
            match asserted.get_mut(&l.fluent) {
                None => {
                    asserted.insert(&l.fluent, (l.positive, vec![spec.id.clone()]));
                }
                Some((polarity, events)) => {
                    if *polarity != l.positive {
                        events.push(spec.id.clone());
                        return Err(ActionError::ConflictingEffects {
                            fluent: l.fluent.clone(),
                            events: events.clone(),
                        });
                    }
                    events.push(spec.id.clone());
                }
            }
        }
    }
    let mut next = s.clone();
    for spec in fired {
        for l in spec.eff.literals() {
            next.assign(l);
        }
    }
    Ok(next)
}

/// Exogenous candidates at `s`: triggered events of class `Exogenous`.
fn triggered_candidates(s: &StateAssign, ctx: &Context) -> Result<Vec<EventId>, ActionError> {
    let mut out = Vec::new();
    for spec in ctx.events() {
        if spec.class == EventClass::Exogenous && eval_formula(s, &spec.tri)? {
            out.push(spec.id.clone());
        }
    }
    Ok(out)
}

/// The unique maximal firing set among triggered exogenous events: sweeping
/// the priority order downward, an event fires exactly when no firing event
/// dominates it. The result does not depend on the sweep order.
pub fn triggered_exogenous(
    s: &StateAssign,
    ctx: &Context,
) -> Result<BTreeSet<EventId>, ActionError> {
    let candidates = triggered_candidates(s, ctx)?;
    Ok(resolve_priorities(candidates, ctx, &mut |_| {}))
}

fn resolve_priorities(
    candidates: Vec<EventId>,
    ctx: &Context,
    scramble: &mut dyn FnMut(&mut Vec<EventId>),
) -> BTreeSet<EventId> {
    let prio = ctx.priority();
    let all: BTreeSet<EventId> = candidates.iter().cloned().collect();
    // Count undecided dominators within the candidate set.
    let mut pending: BTreeMap<EventId, usize> = all
        .iter()
        .map(|e| {
            let sup = all.iter().filter(|d| prio.dominates(d, e)).count();
            (e.clone(), sup)
        })
        .collect();
    let mut ready: Vec<EventId> = pending
        .iter()
        .filter(|(_, n)| **n == 0)
        .map(|(e, _)| e.clone())
        .collect();
    let mut fired: BTreeSet<EventId> = BTreeSet::new();
    let mut decided: BTreeSet<EventId> = BTreeSet::new();
    while !ready.is_empty() {
        scramble(&mut ready);
        let e = ready.pop().expect("nonempty");
        let preempted = fired.iter().any(|f| prio.dominates(f, &e));
        if !preempted {
            fired.insert(e.clone());
        }
        decided.insert(e.clone());
        for (other, n) in pending.iter_mut() {
            if decided.contains(other) {
                continue;
            }
            if prio.dominates(&e, other) {
                *n -= 1;
                if *n == 0 {
                    ready.push(other.clone());
                }
            }
        }
    }
    debug_assert_eq!(decided.len(), all.len(), "priority sweep decided all");
    fired
}

/// True when no exogenous trigger condition holds at `s`.
pub fn is_quiescent(s: &StateAssign, ctx: &Context) -> Result<bool, ActionError> {
    Ok(triggered_candidates(s, ctx)?.is_empty())
}

/// Produces the unique valid execution of the setting.
///
/// E(-1) is the set of ini events establishing S(0). At each later step, if
/// any exogenous event is triggered the step fires the maximal triggered
/// set; otherwise the actions of the next unconsumed rank fire together.
/// The run ends when the sequence is consumed and the state is quiescent.
pub fn run(setting: &Setting) -> Result<Traces, ActionError> {
    run_scrambled(setting, &mut |_| {})
}

/// Same as [`run`], with a caller-supplied reordering of the internal work
/// queue used during priority resolution. The traces are identical for any
/// reordering; this entry point exists so tests can demonstrate it.
pub fn run_scrambled(
    setting: &Setting,
    scramble: &mut dyn FnMut(&mut Vec<EventId>),
) -> Result<Traces, ActionError> {
    let ctx = setting.context();
    let groups = setting.sequence().rank_groups();
    let mut pending = groups.into_iter();
    let mut upcoming = pending.next();

    let mut event_trace: Vec<BTreeSet<EventId>> = vec![ctx.ini_events()];
    let mut state_trace: Vec<StateAssign> = vec![ctx.initial_state().clone()];
    let mut state = ctx.initial_state().clone();
    let mut t: Time = 0;

    loop {
        if let Horizon::Fixed { end } = ctx.horizon() {
            // Event steps stop after E(end).
            if t > end {
                if upcoming.is_some() {
                    let remaining = 1 + pending.count();
                    return Err(ActionError::SequenceUnconsumed { remaining });
                }
                break;
            }
        }
        let exo = resolve_priorities(triggered_candidates(&state, ctx)?, ctx, scramble);
        let fired: BTreeSet<EventId> = if !exo.is_empty() {
            exo
        } else if let Some((_, actions)) = upcoming.take() {
            for a in &actions {
                let spec = ctx.event(a).expect("validated sequence action");
                if !eval_formula(&state, &spec.pre)? {
                    return Err(ActionError::PreconditionViolated {
                        event: a.clone(),
                        time: t,
                    });
                }
            }
            upcoming = pending.next();
            actions
        } else {
            // Sequence consumed and quiescent: under a dynamic horizon the
            // run is complete; a fixed horizon leaves no legal step.
            match ctx.horizon() {
                Horizon::Dynamic { .. } => break,
                Horizon::Fixed { .. } => return Err(ActionError::EmptyStep { time: t }),
            }
        };
        let specs: Vec<&EventSpec> = fired
            .iter()
            .map(|e| ctx.event(e).expect("fired event declared"))
            .collect();
        let next = apply_effects(&state, &specs)?;
        event_trace.push(fired);
        state_trace.push(next.clone());
        state = next;
        t += 1;
        if let Horizon::Dynamic { cap } = ctx.horizon() {
            if t as usize > cap {
                return Err(ActionError::HorizonExceeded { cap });
            }
        }
    }
    Ok(Traces::new(setting.clone(), event_trace, state_trace))
}
