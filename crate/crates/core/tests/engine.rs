//! Trace-level conformance of the execution engine on the fixture
//! dialogue, plus kernel edge cases on hand-built contexts.

mod common;

use std::collections::BTreeSet;

use argtrace_core::aaf::ArgGraph;
use argtrace_core::action::{
    apply_effects, eval_formula, is_quiescent, run, triggered_exogenous, validate_execution,
    ActionError, Context, EffectFormula, EventClass, EventId, EventSpec, Fluent, Formula, Horizon,
    Literal, PriorityRelation, Sequence, Setting, StateAssign,
};
use argtrace_core::translate::{
    acceptable_in, associated_graph, build_setting, final_argumentative_state,
    is_argumentative_state, Coverage, Dialogue,
};

use common::*;

fn enunciate(s: &str) -> EventId {
    EventId::Enunciate(arg(s))
}

fn unacc(y: &str, x: &str) -> EventId {
    EventId::MakesUnacc(arg(y), arg(x))
}

fn acc(x: &str) -> EventId {
    EventId::MakesAcc(arg(x))
}

#[test]
fn fixture_run_matches_published_timing() {
    let tr = mri_traces();
    assert_eq!(tr.final_time(), 31);
    assert!(tr.occurred(&enunciate("d"), 4));
    assert!(tr.occurred(&enunciate("e"), 6));
    assert!(tr.occurred(&unacc("e", "d"), 7));
    assert!(tr.occurred(&acc("c"), 8));
    assert!(tr.occurred(&enunciate("f"), 9));
    assert!(tr.occurred(&enunciate("n"), 28));
    assert_eq!(
        tr.events_at(29).unwrap(),
        &[unacc("n", "c"), unacc("n", "m")].into_iter().collect::<BTreeSet<_>>()
    );
    assert!(tr.occurred(&acc("l"), 30));
}

#[test]
fn fixture_final_acceptability_matches_oracle() {
    let tr = mri_traces();
    let ctx = tr.context();
    let expected: BTreeSet<_> = mri_accepted().into_iter().map(arg).collect();
    assert_eq!(acceptable_in(tr.final_state(), ctx), expected);
    let oracle = mri_graph().grounded_labeling().unwrap();
    assert_eq!(oracle.accepted(), expected);
}

#[test]
fn fixture_shared_rank_fires_together() {
    let tr = mri_traces();
    assert_eq!(
        tr.events_at(18).unwrap(),
        &[enunciate("h"), enunciate("i")].into_iter().collect::<BTreeSet<_>>()
    );
    // Their cascade: both defeats of c fire concurrently (no priority).
    assert_eq!(
        tr.events_at(19).unwrap(),
        &[unacc("h", "c"), unacc("i", "c")].into_iter().collect::<BTreeSet<_>>()
    );
}

#[test]
fn fixture_argumentative_states_along_the_run() {
    let tr = mri_traces();
    let ctx = tr.context();
    let report = |t: i64| is_argumentative_state(tr.state_at(t).unwrap(), ctx);
    assert!(report(6).is_argumentative);
    assert!(!report(7).is_argumentative);
    let at8 = report(8);
    assert!(!at8.is_argumentative);
    // Clause (ii) witness at S(8) is c: all of c's attackers are out.
    assert!(at8.defects.iter().any(|d| matches!(
        d,
        argtrace_core::translate::StateDefect::Unrecovered { argument } if argument == &arg("c")
    )));
    assert!(report(9).is_argumentative);

    // Quiescence mirrors the argumentative-state checks (Lemma 1 surface).
    assert!(is_quiescent(tr.state_at(6).unwrap(), ctx).unwrap());
    assert!(!is_quiescent(tr.state_at(7).unwrap(), ctx).unwrap());
    assert!(is_quiescent(tr.state_at(9).unwrap(), ctx).unwrap());
    assert!(is_quiescent(tr.state_at(0).unwrap(), ctx).unwrap());
}

#[test]
fn fixture_self_audit_is_clean() {
    let tr = mri_traces();
    let violations = validate_execution(&tr, tr.setting());
    assert!(violations.is_empty(), "unexpected: {violations:?}");
}

#[test]
fn fixture_associated_graph_final_equals_input() {
    let tr = mri_traces();
    let ctx = tr.context();
    let g = associated_graph(tr.final_state(), ctx);
    let input = mri_graph();
    let args: BTreeSet<_> = g.arguments().iter().cloned().collect();
    let input_args: BTreeSet<_> = input.arguments().iter().cloned().collect();
    assert_eq!(args, input_args);
    let attacks: BTreeSet<_> = g.attacks().iter().cloned().collect();
    let input_attacks: BTreeSet<_> = input.attacks().iter().cloned().collect();
    assert_eq!(attacks, input_attacks);

    let (final_state, t) = final_argumentative_state(&tr, ctx, &mri_dialogue()).unwrap();
    assert_eq!(t, 31);
    assert_eq!(&final_state, tr.final_state());
}

#[test]
fn fixture_associated_graph_mid_run() {
    let tr = mri_traces();
    let g = associated_graph(tr.state_at(9).unwrap(), tr.context());
    let args: BTreeSet<_> = g.arguments().iter().cloned().collect();
    assert_eq!(args, ["a", "b", "c", "d", "e"].map(arg).into_iter().collect());
    let attacks: BTreeSet<_> = g.attacks().iter().cloned().collect();
    let expected: BTreeSet<_> = [("b", "a"), ("d", "c"), ("e", "d")]
        .map(|(y, x)| (arg(y), arg(x)))
        .into_iter()
        .collect();
    assert_eq!(attacks, expected);
}

#[test]
fn initial_associated_graph_is_empty() {
    let tr = mri_traces();
    let g = associated_graph(tr.state_at(0).unwrap(), tr.context());
    assert!(g.arguments().is_empty());
    assert!(g.attacks().is_empty());
}

#[test]
fn reordered_dialogue_reaches_same_final_state() {
    let a = mri_traces();
    let b = mri_traces_reordered();
    assert_eq!(a.final_state(), b.final_state());
}

#[test]
fn empty_setting_produces_trivial_traces() {
    let g = ArgGraph::new(vec![], vec![]);
    let d = Dialogue::new(vec![]).unwrap();
    let setting = build_setting(&d, &g, Coverage::Full).unwrap();
    let tr = run(&setting).unwrap();
    assert_eq!(tr.final_time(), 0);
    assert_eq!(tr.events().count(), 1); // E(-1) only
    assert!(tr.events_at(-1).unwrap().is_empty());
}

#[test]
fn singleton_dialogue_finishes_at_one() {
    let g = ArgGraph::new(vec![arg("solo")], vec![]);
    let d = Dialogue::new(vec![(arg("solo"), 0)]).unwrap();
    let tr = run(&build_setting(&d, &g, Coverage::Full).unwrap()).unwrap();
    let (_, t) = final_argumentative_state(&tr, tr.context(), &d).unwrap();
    assert_eq!(t, 1);
}

// --- kernel-level checks on hand-built contexts ---

fn fl(s: &str) -> Fluent {
    Fluent::Acceptable(arg(s))
}

/// A minimal hand-built context over two acceptability fluents with one
/// action per fluent and no exogenous events.
fn tiny_context(horizon: Horizon) -> Context {
    let fluents: BTreeSet<Fluent> = [fl("x"), fl("y")].into_iter().collect();
    let initial = StateAssign::from_true_set(&fluents, &BTreeSet::new());
    let mut events = vec![];
    for name in ["x", "y"] {
        events.push(EventSpec {
            id: EventId::MakesAcc(arg(name)),
            class: EventClass::Action,
            pre: Formula::lit(Literal::neg(fl(name))),
            tri: Formula::lit(Literal::neg(fl(name))),
            eff: EffectFormula::new(vec![Literal::pos(fl(name))]).unwrap(),
        });
    }
    for l in initial.literals() {
        events.push(EventSpec {
            id: EventId::Ini(l.clone()),
            class: EventClass::Ini,
            pre: Formula::lit(l.clone()),
            tri: Formula::lit(l.clone()),
            eff: EffectFormula::new(vec![l]).unwrap(),
        });
    }
    Context::new(fluents, events, initial, PriorityRelation::empty(), horizon).unwrap()
}

#[test]
fn precondition_violation_is_reported() {
    // Action y requires ¬a(y), but an effect of x's action set it first.
    let fluents: BTreeSet<Fluent> = [fl("x"), fl("y")].into_iter().collect();
    let initial = StateAssign::from_true_set(&fluents, &BTreeSet::new());
    let mut events = vec![
        EventSpec {
            id: EventId::MakesAcc(arg("x")),
            class: EventClass::Action,
            pre: Formula::lit(Literal::neg(fl("x"))),
            tri: Formula::lit(Literal::neg(fl("x"))),
            eff: EffectFormula::new(vec![Literal::pos(fl("x")), Literal::pos(fl("y"))]).unwrap(),
        },
        EventSpec {
            id: EventId::MakesAcc(arg("y")),
            class: EventClass::Action,
            pre: Formula::lit(Literal::neg(fl("y"))),
            tri: Formula::lit(Literal::neg(fl("y"))),
            eff: EffectFormula::new(vec![Literal::pos(fl("y"))]).unwrap(),
        },
    ];
    for l in initial.literals() {
        events.push(EventSpec {
            id: EventId::Ini(l.clone()),
            class: EventClass::Ini,
            pre: Formula::lit(l.clone()),
            tri: Formula::lit(l.clone()),
            eff: EffectFormula::new(vec![l]).unwrap(),
        });
    }
    let ctx = Context::new(
        fluents,
        events,
        initial,
        PriorityRelation::empty(),
        Horizon::Dynamic { cap: 10 },
    )
    .unwrap();
    let seq = Sequence::new(vec![
        (EventId::MakesAcc(arg("x")), 0),
        (EventId::MakesAcc(arg("y")), 1),
    ])
    .unwrap();
    let setting = Setting::new(seq, ctx).unwrap();
    match run(&setting) {
        Err(ActionError::PreconditionViolated { event, time }) => {
            assert_eq!(event, EventId::MakesAcc(arg("y")));
            assert_eq!(time, 1);
        }
        other => panic!("expected precondition violation, got {other:?}"),
    }
}

#[test]
fn conflicting_effects_are_reported() {
    let fluents: BTreeSet<Fluent> = [fl("x")].into_iter().collect();
    let initial = StateAssign::from_true_set(&fluents, &BTreeSet::new());
    let up = EventSpec {
        id: EventId::MakesAcc(arg("x")),
        class: EventClass::Exogenous,
        pre: Formula::lit(Literal::neg(fl("x"))),
        tri: Formula::lit(Literal::neg(fl("x"))),
        eff: EffectFormula::new(vec![Literal::pos(fl("x"))]).unwrap(),
    };
    let down = EventSpec {
        id: EventId::MakesUnacc(arg("x"), arg("x")),
        class: EventClass::Exogenous,
        pre: Formula::lit(Literal::neg(fl("x"))),
        tri: Formula::lit(Literal::neg(fl("x"))),
        eff: EffectFormula::new(vec![Literal::neg(fl("x"))]).unwrap(),
    };
    let err = apply_effects(&initial, &[&up, &down]).unwrap_err();
    assert!(matches!(err, ActionError::ConflictingEffects { .. }));
}

#[test]
fn apply_effects_without_events_is_identity() {
    let ctx = tiny_context(Horizon::Dynamic { cap: 4 });
    let s = ctx.initial_state().clone();
    assert_eq!(apply_effects(&s, &[]).unwrap(), s);
}

#[test]
fn fixed_horizon_empty_step_is_rejected() {
    // One action, horizon up to t=2: after the action at t=0 nothing can
    // fire at t=1, so no valid execution exists.
    let ctx = tiny_context(Horizon::Fixed { end: 2 });
    let seq = Sequence::new(vec![(EventId::MakesAcc(arg("x")), 0)]).unwrap();
    let setting = Setting::new(seq, ctx).unwrap();
    assert!(matches!(
        run(&setting),
        Err(ActionError::EmptyStep { time: 1 })
    ));
}

#[test]
fn fixed_horizon_exact_fit_runs() {
    let ctx = tiny_context(Horizon::Fixed { end: 1 });
    let seq = Sequence::new(vec![
        (EventId::MakesAcc(arg("x")), 0),
        (EventId::MakesAcc(arg("y")), 1),
    ])
    .unwrap();
    let setting = Setting::new(seq, ctx).unwrap();
    let tr = run(&setting).unwrap();
    assert_eq!(tr.final_time(), 2);
}

#[test]
fn priority_preempts_chained_defeat() {
    // b -> a, c -> b, all present and acceptable: only the top defeat
    // fires; the downstream one is preempted.
    let g = ArgGraph::new(
        vec![arg("a"), arg("b"), arg("c")],
        vec![(arg("b"), arg("a")), (arg("c"), arg("b"))],
    );
    let d = Dialogue::new(vec![(arg("a"), 0), (arg("b"), 0), (arg("c"), 0)]).unwrap();
    let setting = build_setting(&d, &g, Coverage::Full).unwrap();
    let tr = run(&setting).unwrap();
    // After the simultaneous enunciation at t=0, S(1) triggers both
    // defeats; priority lets only makesUnacc(c,b) through.
    let fired = triggered_exogenous(tr.state_at(1).unwrap(), tr.context()).unwrap();
    assert_eq!(
        fired,
        [unacc("c", "b")].into_iter().collect::<BTreeSet<_>>()
    );
    // Final labels: c and a accepted.
    let expected: BTreeSet<_> = [arg("a"), arg("c")].into_iter().collect();
    assert_eq!(acceptable_in(tr.final_state(), tr.context()), expected);
}

#[test]
fn eval_formula_examples() {
    let fluents: BTreeSet<Fluent> = [fl("x"), fl("y")].into_iter().collect();
    let s = StateAssign::from_true_set(&fluents, &[fl("x")].into_iter().collect());
    let both = Formula::and(vec![
        Formula::lit(Literal::pos(fl("x"))),
        Formula::lit(Literal::pos(fl("y"))),
    ]);
    assert!(!eval_formula(&s, &both).unwrap());
    let single = Formula::lit(Literal::pos(fl("x")));
    assert!(eval_formula(&s, &single).unwrap());
    let unknown = Formula::lit(Literal::pos(fl("zz")));
    assert!(matches!(
        eval_formula(&s, &unknown),
        Err(ActionError::UnknownFluent(_))
    ));
}

#[test]
fn fixture_trigger_example_at_s7() {
    let tr = mri_traces();
    let s7 = tr.state_at(7).unwrap();
    let spec = tr.context().event(&unacc("e", "d")).unwrap();
    assert!(eval_formula(s7, &spec.tri).unwrap());
}

#[test]
fn validator_flags_constructed_violations() {
    use argtrace_core::action::Violation;
    let tr = mri_traces();
    let setting = tr.setting().clone();

    // Empty step: drop the events of t=3.
    let mut broken = raw_parts(&tr);
    broken.0[4] = BTreeSet::new(); // index 4 is E(3)
    let forged = forge(&setting, broken);
    let violations = validate_execution(&forged, &setting);
    assert!(violations
        .iter()
        .any(|v| matches!(v, Violation::EmptyStep { time: 3 })));

    // Priority conflict: co-fire two related defeats at t=19.
    let mut broken = raw_parts(&tr);
    broken.0[20].insert(unacc("j", "h")); // E(19): j,h dominates h,c
    let forged = forge(&setting, broken);
    let violations = validate_execution(&forged, &setting);
    assert!(violations
        .iter()
        .any(|v| matches!(v, Violation::PriorityConflict { .. })));
}

fn raw_parts(tr: &argtrace_core::action::Traces) -> (Vec<BTreeSet<EventId>>, Vec<StateAssign>) {
    (
        tr.events().map(|(_, e)| e.clone()).collect(),
        tr.states().map(|(_, s)| s.clone()).collect(),
    )
}

fn forge(
    setting: &Setting,
    parts: (Vec<BTreeSet<EventId>>, Vec<StateAssign>),
) -> argtrace_core::action::Traces {
    argtrace_core::action::Traces::from_parts(setting.clone(), parts.0, parts.1)
}

#[test]
fn context_rejects_structural_mistakes() {
    // Unknown fluent in a formula.
    let fluents: BTreeSet<Fluent> = [fl("x")].into_iter().collect();
    let initial = StateAssign::from_true_set(&fluents, &BTreeSet::new());
    let mut events = vec![EventSpec {
        id: EventId::MakesAcc(arg("x")),
        class: EventClass::Exogenous,
        pre: Formula::lit(Literal::pos(fl("ghost"))),
        tri: Formula::lit(Literal::pos(fl("ghost"))),
        eff: EffectFormula::new(vec![Literal::pos(fl("x"))]).unwrap(),
    }];
    for l in initial.literals() {
        events.push(EventSpec {
            id: EventId::Ini(l.clone()),
            class: EventClass::Ini,
            pre: Formula::lit(l.clone()),
            tri: Formula::lit(l.clone()),
            eff: EffectFormula::new(vec![l]).unwrap(),
        });
    }
    let err = Context::new(
        fluents.clone(),
        events,
        initial.clone(),
        PriorityRelation::empty(),
        Horizon::Dynamic { cap: 4 },
    )
    .unwrap_err();
    assert!(matches!(err, ActionError::UnknownFluent(_)));

    // Missing ini cover.
    let err = Context::new(
        fluents,
        vec![],
        initial,
        PriorityRelation::empty(),
        Horizon::Dynamic { cap: 4 },
    )
    .unwrap_err();
    assert!(matches!(err, ActionError::BadInitialCover));
}

#[test]
fn priority_cycle_is_rejected() {
    let pairs: BTreeSet<(EventId, EventId)> = [
        (unacc("a", "b"), unacc("b", "a")),
        (unacc("b", "a"), unacc("a", "b")),
    ]
    .into_iter()
    .collect();
    assert!(matches!(
        PriorityRelation::new(pairs),
        Err(ActionError::PriorityCycle(_))
    ));
}

#[test]
fn duplicate_dialogue_argument_is_rejected() {
    let err = Dialogue::new(vec![(arg("a"), 0), (arg("a"), 1)]).unwrap_err();
    assert!(matches!(
        err,
        argtrace_core::translate::TranslateError::DuplicateDialogueArgument(_)
    ));
}

#[test]
fn partial_dialogue_needs_the_flag() {
    let g = mri_graph();
    let d = Dialogue::new(vec![(arg("a"), 0), (arg("b"), 1)]).unwrap();
    assert!(build_setting(&d, &g, Coverage::Full).is_err());
    let setting = build_setting(&d, &g, Coverage::AllowPartial).unwrap();
    let tr = run(&setting).unwrap();
    // Final state is argumentative but not final (c..n never enunciated).
    assert!(final_argumentative_state(&tr, tr.context(), &d).is_err());
    // Its associated graph matches the induced subgraph's labeling.
    let induced = associated_graph(tr.final_state(), tr.context());
    let oracle = induced.grounded_labeling().unwrap();
    assert_eq!(oracle.accepted(), acceptable_in(tr.final_state(), tr.context()));
}

#[test]
fn scrambled_runs_are_identical() {
    let setting = mri_setting();
    let base = run(&setting).unwrap();
    // Reverse work queues wherever the engine lets us.
    let mut scramble = |v: &mut Vec<EventId>| v.reverse();
    let alt = argtrace_core::action::run_scrambled(&setting, &mut scramble).unwrap();
    assert_eq!(base, alt);
}
