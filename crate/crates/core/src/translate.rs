//! Compiles a dialogue and attack relation into an argumentative context
//! plus ranked action sequence, and maps states back to attack graphs.
//!
//! The generated vocabulary per argument `x` is the presence fluent `p(x)`,
//! the acceptability fluent `a(x)`, and per attack `(y,x)` the constant
//! capability fluent `cA(y,x)`. Enunciation is the only action; the two
//! exogenous update events let an acceptable attacker defeat its target and
//! let an argument recover once every attacker is out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::aaf::{AafError, ArgGraph, ArgumentId};
use crate::action::{
    eval_formula, ActionError, Context, EffectFormula, EventClass, EventId, EventSpec, Fluent,
    Formula, Horizon, Literal, PriorityRelation, Sequence, Setting, StateAssign, Time, Traces,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error(transparent)]
    Graph(#[from] AafError),
    #[error(transparent)]
    Kernel(#[from] ActionError),
    #[error("argument {0} appears more than once in the dialogue")]
    DuplicateDialogueArgument(ArgumentId),
    #[error("dialogue mentions undeclared argument {0}")]
    UnknownDialogueArgument(ArgumentId),
    #[error("dialogue does not cover argument(s): {}", list(.0))]
    MissingArguments(Vec<ArgumentId>),
    #[error("trace does not end in a final argumentative state: {0}")]
    NotFinal(String),
}

fn list(args: &[ArgumentId]) -> String {
    args.iter()
        .map(ArgumentId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Whether a dialogue must enunciate every declared argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Full,
    AllowPartial,
}

/// A dialogue: each argument with its enunciation rank. Ranks need not be
/// contiguous, and several arguments may share one (they are then
/// enunciated simultaneously).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    entries: Vec<(ArgumentId, u32)>,
}

impl Dialogue {
    pub fn new(entries: Vec<(ArgumentId, u32)>) -> Result<Self, TranslateError> {
        let mut seen = BTreeSet::new();
        for (a, _) in &entries {
            if !seen.insert(a.clone()) {
                return Err(TranslateError::DuplicateDialogueArgument(a.clone()));
            }
        }
        Ok(Dialogue { entries })
    }

    pub fn entries(&self) -> &[(ArgumentId, u32)] {
        &self.entries
    }

    pub fn arguments(&self) -> impl Iterator<Item = &ArgumentId> {
        self.entries.iter().map(|(a, _)| a)
    }

    pub fn rank_of(&self, a: &ArgumentId) -> Option<u32> {
        self.entries.iter().find(|(x, _)| x == a).map(|(_, o)| *o)
    }

    /// Distinct ranks ascending, each with its arguments in entry order.
    pub fn rank_groups(&self) -> Vec<(u32, Vec<ArgumentId>)> {
        let mut groups: BTreeMap<u32, Vec<ArgumentId>> = BTreeMap::new();
        for (a, o) in &self.entries {
            groups.entry(*o).or_default().push(a.clone());
        }
        groups.into_iter().collect()
    }
}

fn check_dialogue_against_graph(
    d: &Dialogue,
    g: &ArgGraph,
    coverage: Coverage,
) -> Result<(), TranslateError> {
    for a in d.arguments() {
        if !g.contains(a) {
            return Err(TranslateError::UnknownDialogueArgument(a.clone()));
        }
    }
    if coverage == Coverage::Full {
        let spoken: BTreeSet<&ArgumentId> = d.arguments().collect();
        let missing: Vec<ArgumentId> = g
            .arguments()
            .iter()
            .filter(|a| !spoken.contains(a))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(TranslateError::MissingArguments(missing));
        }
    }
    Ok(())
}

/// Builds the argumentative context for a validated graph.
///
/// S(0) holds `cA(y,x)` for every attack and nothing else; one enunciation
/// action exists per argument, one `makesUnacc` event per attack, one
/// `makesAcc` event per argument (quantified over its actual attackers
/// only), and priorities run along consecutive attack edges.
pub fn build_context(d: &Dialogue, g: &ArgGraph) -> Result<Context, TranslateError> {
    build_context_with(d, g, Coverage::Full)
}

pub fn build_context_with(
    d: &Dialogue,
    g: &ArgGraph,
    coverage: Coverage,
) -> Result<Context, TranslateError> {
    g.validate()?;
    check_dialogue_against_graph(d, g, coverage)?;

    let mut fluents: BTreeSet<Fluent> = BTreeSet::new();
    for x in g.arguments() {
        fluents.insert(Fluent::Present(x.clone()));
        fluents.insert(Fluent::Acceptable(x.clone()));
    }
    for (y, x) in g.attacks() {
        fluents.insert(Fluent::CanAttack(y.clone(), x.clone()));
    }

    let initially_true: BTreeSet<Fluent> = g
        .attacks()
        .iter()
        .map(|(y, x)| Fluent::CanAttack(y.clone(), x.clone()))
        .collect();
    let initial_state = StateAssign::from_true_set(&fluents, &initially_true);

    let mut events: Vec<EventSpec> = Vec::new();
    for x in g.arguments() {
        let not_present = Formula::lit(Literal::neg(Fluent::Present(x.clone())));
        events.push(EventSpec {
            id: EventId::Enunciate(x.clone()),
            class: EventClass::Action,
            pre: not_present.clone(),
            tri: not_present,
            eff: EffectFormula::new(vec![
                Literal::pos(Fluent::Present(x.clone())),
                Literal::pos(Fluent::Acceptable(x.clone())),
            ])?,
        });
    }
    for (y, x) in g.attacks() {
        let tri = Formula::and(vec![
            Formula::lit(Literal::pos(Fluent::Acceptable(x.clone()))),
            Formula::lit(Literal::pos(Fluent::Acceptable(y.clone()))),
            Formula::lit(Literal::pos(Fluent::CanAttack(y.clone(), x.clone()))),
        ]);
        events.push(EventSpec {
            id: EventId::MakesUnacc(y.clone(), x.clone()),
            class: EventClass::Exogenous,
            pre: tri.clone(),
            tri,
            eff: EffectFormula::new(vec![Literal::neg(Fluent::Acceptable(x.clone()))])?,
        });
    }
    for x in g.arguments() {
        let mut parts = vec![
            Formula::lit(Literal::pos(Fluent::Present(x.clone()))),
            Formula::lit(Literal::neg(Fluent::Acceptable(x.clone()))),
        ];
        for y in g.attackers(x)? {
            parts.push(Formula::or(vec![
                Formula::lit(Literal::neg(Fluent::CanAttack(y.clone(), x.clone()))),
                Formula::lit(Literal::neg(Fluent::Acceptable(y.clone()))),
            ]));
        }
        let tri = Formula::and(parts);
        events.push(EventSpec {
            id: EventId::MakesAcc(x.clone()),
            class: EventClass::Exogenous,
            pre: tri.clone(),
            tri,
            eff: EffectFormula::new(vec![Literal::pos(Fluent::Acceptable(x.clone()))])?,
        });
    }
    for l in initial_state.literals() {
        events.push(EventSpec {
            id: EventId::Ini(l.clone()),
            class: EventClass::Ini,
            pre: Formula::lit(l.clone()),
            tri: Formula::lit(l.clone()),
            eff: EffectFormula::new(vec![l])?,
        });
    }

    // makesUnacc(y,x) preempts makesUnacc(x,z) along consecutive edges.
    let mut pairs = BTreeSet::new();
    for (y, x) in g.attacks() {
        for (x2, z) in g.attacks() {
            if x == x2 {
                pairs.insert((
                    EventId::MakesUnacc(y.clone(), x.clone()),
                    EventId::MakesUnacc(x2.clone(), z.clone()),
                ));
            }
        }
    }
    let priority = PriorityRelation::new(pairs)?;

    let n = g.arguments().len();
    let ranks = d.rank_groups().len();
    let cap = (ranks + 1) * (n * n + 1) + 1;

    Context::new(
        fluents,
        events,
        initial_state,
        priority,
        Horizon::Dynamic { cap },
    )
    .map_err(TranslateError::from)
}

/// One `(enunciate(x), rank)` pair per dialogue entry, ranks verbatim.
pub fn build_sequence(d: &Dialogue) -> Sequence {
    Sequence::new(
        d.entries()
            .iter()
            .map(|(a, o)| (EventId::Enunciate(a.clone()), *o))
            .collect(),
    )
    .expect("dialogue arguments are unique")
}

/// Context and sequence in one step.
pub fn build_setting(
    d: &Dialogue,
    g: &ArgGraph,
    coverage: Coverage,
) -> Result<Setting, TranslateError> {
    let ctx = build_context_with(d, g, coverage)?;
    Setting::new(build_sequence(d), ctx).map_err(TranslateError::from)
}

/// Arguments known to a context, read off its presence fluents.
pub fn context_arguments(ctx: &Context) -> Vec<ArgumentId> {
    ctx.fluents()
        .iter()
        .filter_map(|f| match f {
            Fluent::Present(x) => Some(x.clone()),
            _ => None,
        })
        .collect()
}

/// Attack pairs known to a context, read off its capability fluents.
pub fn context_attacks(ctx: &Context) -> Vec<(ArgumentId, ArgumentId)> {
    ctx.fluents()
        .iter()
        .filter_map(|f| match f {
            Fluent::CanAttack(y, x) => Some((y.clone(), x.clone())),
            _ => None,
        })
        .collect()
}

/// A witness for a violated clause of the argumentative-state definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateDefect {
    /// Clause (i): `x` still counts as acceptable while an acceptable,
    /// present attacker `y` can attack it.
    AcceptedUnderAttack {
        attacker: ArgumentId,
        target: ArgumentId,
    },
    /// Clause (ii): `x` is present with every potential attacker out, yet
    /// is not acceptable.
    Unrecovered { argument: ArgumentId },
}

impl fmt::Display for StateDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateDefect::AcceptedUnderAttack { attacker, target } => {
                write!(f, "clause (i): {attacker} attacks {target} while both are acceptable")
            }
            StateDefect::Unrecovered { argument } => {
                write!(f, "clause (ii): {argument} should be acceptable but is not")
            }
        }
    }
}

/// Result of checking both clauses of the argumentative-state definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentativeStateReport {
    pub is_argumentative: bool,
    pub defects: Vec<StateDefect>,
}

/// Evaluates the argumentative-state definition directly from its two
/// clauses, independently of the trigger machinery.
pub fn is_argumentative_state(s: &StateAssign, ctx: &Context) -> ArgumentativeStateReport {
    let mut defects = Vec::new();
    let arguments = context_arguments(ctx);
    let attacks = context_attacks(ctx);

    let holds = |l: &Literal| s.holds(l).unwrap_or(false);

    // (i) for all x, y: a_x ∧ p_y ∧ cA_{y,x} implies ¬a_y.
    for (y, x) in &attacks {
        let premise = holds(&Literal::pos(Fluent::Acceptable(x.clone())))
            && holds(&Literal::pos(Fluent::Present(y.clone())))
            && holds(&Literal::pos(Fluent::CanAttack(y.clone(), x.clone())));
        if premise && holds(&Literal::pos(Fluent::Acceptable(y.clone()))) {
            defects.push(StateDefect::AcceptedUnderAttack {
                attacker: y.clone(),
                target: x.clone(),
            });
        }
    }

    // (ii) for all x: p_x ∧ (∧_y ¬a_y ∨ ¬cA_{y,x}) implies a_x.
    for x in &arguments {
        let present = holds(&Literal::pos(Fluent::Present(x.clone())));
        if !present {
            continue;
        }
        let all_out = attacks.iter().filter(|(_, t)| t == x).all(|(y, _)| {
            !holds(&Literal::pos(Fluent::CanAttack(y.clone(), x.clone())))
                || !holds(&Literal::pos(Fluent::Acceptable(y.clone())))
        });
        if all_out && !holds(&Literal::pos(Fluent::Acceptable(x.clone()))) {
            defects.push(StateDefect::Unrecovered {
                argument: x.clone(),
            });
        }
    }

    ArgumentativeStateReport {
        is_argumentative: defects.is_empty(),
        defects,
    }
}

/// The attack graph read off a state: present arguments plus capability
/// pairs restricted to present endpoints, so that intermediate graphs are
/// well-formed.
pub fn associated_graph(s: &StateAssign, ctx: &Context) -> ArgGraph {
    let present: Vec<ArgumentId> = context_arguments(ctx)
        .into_iter()
        .filter(|x| s.truth(&Fluent::Present(x.clone())) == Some(true))
        .collect();
    let attacks: Vec<(ArgumentId, ArgumentId)> = context_attacks(ctx)
        .into_iter()
        .filter(|(y, x)| {
            s.truth(&Fluent::CanAttack(y.clone(), x.clone())) == Some(true)
                && present.contains(y)
                && present.contains(x)
        })
        .collect();
    ArgGraph::new(present, attacks)
}

/// The last state of a completed run, verified to be argumentative with
/// every context argument enunciated.
pub fn final_argumentative_state(
    tr: &Traces,
    ctx: &Context,
    d: &Dialogue,
) -> Result<(StateAssign, Time), TranslateError> {
    let t = tr.final_time();
    let s = tr.final_state().clone();
    let report = is_argumentative_state(&s, ctx);
    if !report.is_argumentative {
        let first = report
            .defects
            .first()
            .map(|d| d.to_string())
            .unwrap_or_default();
        return Err(TranslateError::NotFinal(first));
    }
    let unspoken: Vec<ArgumentId> = context_arguments(ctx)
        .into_iter()
        .filter(|x| s.truth(&Fluent::Present(x.clone())) != Some(true))
        .collect();
    if !unspoken.is_empty() {
        return Err(TranslateError::NotFinal(format!(
            "argument(s) never enunciated: {}",
            list(&unspoken)
        )));
    }
    debug_assert!(d.arguments().all(|a| {
        s.truth(&Fluent::Present(a.clone())) == Some(true)
    }));
    Ok((s, t))
}

/// Acceptable arguments in a state.
pub fn acceptable_in(s: &StateAssign, ctx: &Context) -> BTreeSet<ArgumentId> {
    context_arguments(ctx)
        .into_iter()
        .filter(|x| s.truth(&Fluent::Acceptable(x.clone())) == Some(true))
        .collect()
}

/// Present arguments in a state.
pub fn present_in(s: &StateAssign, ctx: &Context) -> BTreeSet<ArgumentId> {
    context_arguments(ctx)
        .into_iter()
        .filter(|x| s.truth(&Fluent::Present(x.clone())) == Some(true))
        .collect()
}

/// Sanity check used by tests and the self-audit: evaluating an event's
/// trigger with [`eval_formula`] agrees with the state's literal view.
pub fn trigger_holds(s: &StateAssign, ctx: &Context, id: &EventId) -> bool {
    ctx.event(id)
        .map(|spec| eval_formula(s, &spec.tri).unwrap_or(false))
        .unwrap_or(false)
}
