//! The event/state kernel: fluents, formulas, events, contexts, and the
//! execution semantics that turns a ranked action sequence into a unique
//! pair of traces.
//!
//! States are total truth assignments over a fixed fluent universe. Events
//! carry a precondition, a triggering condition, and a conjunctive effect;
//! exogenous events fire automatically whenever triggered, subject to a
//! strict partial priority order, while actions fire only when their rank
//! comes due in a quiescent state.

mod run;
mod validate;

pub use run::{
    apply_effects, eval_formula, is_quiescent, run, run_scrambled, triggered_exogenous,
};
pub use validate::{validate_execution, Violation};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::aaf::ArgumentId;

/// Discrete time point. `-1` is the bounded past where `ini` events live.
pub type Time = i64;

/// Ground fluent: a time-varying boolean property of the world.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fluent {
    /// `p_x` — argument `x` has been enunciated.
    Present(ArgumentId),
    /// `a_x` — argument `x` is currently acceptable.
    Acceptable(ArgumentId),
    /// `cA_{y,x}` — argument `y` can attack argument `x`.
    CanAttack(ArgumentId, ArgumentId),
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fluent::Present(x) => write!(f, "p({x})"),
            Fluent::Acceptable(x) => write!(f, "a({x})"),
            Fluent::CanAttack(y, x) => write!(f, "cA({y},{x})"),
        }
    }
}

/// A fluent or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub fluent: Fluent,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fluent: Fluent) -> Self {
        Literal {
            fluent,
            positive: true,
        }
    }

    pub fn neg(fluent: Fluent) -> Self {
        Literal {
            fluent,
            positive: false,
        }
    }

    /// The complement; an involution.
    pub fn complement(&self) -> Self {
        Literal {
            fluent: self.fluent.clone(),
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.fluent)
        } else {
            write!(f, "neg({})", self.fluent)
        }
    }
}

/// Condition formula: literals combined with AND/OR (no nested negation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn lit(l: Literal) -> Self {
        Formula::Lit(l)
    }

    /// Conjunction. Panics on an empty operand list: the formula language
    /// has no truth constants.
    pub fn and(mut parts: Vec<Formula>) -> Self {
        assert!(!parts.is_empty(), "empty conjunction");
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    /// Disjunction. Panics on an empty operand list.
    pub fn or(mut parts: Vec<Formula>) -> Self {
        assert!(!parts.is_empty(), "empty disjunction");
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        }
    }

    /// Every fluent mentioned anywhere in the formula.
    pub fn fluents(&self) -> BTreeSet<Fluent> {
        let mut out = BTreeSet::new();
        self.collect_fluents(&mut out);
        out
    }

    fn collect_fluents(&self, out: &mut BTreeSet<Fluent>) {
        match self {
            Formula::Lit(l) => {
                out.insert(l.fluent.clone());
            }
            Formula::And(parts) | Formula::Or(parts) => {
                for p in parts {
                    p.collect_fluents(out);
                }
            }
        }
    }

    /// Every literal occurring syntactically in the formula.
    pub fn literals(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals(&self, out: &mut BTreeSet<Literal>) {
        match self {
            Formula::Lit(l) => {
                out.insert(l.clone());
            }
            Formula::And(parts) | Formula::Or(parts) => {
                for p in parts {
                    p.collect_literals(out);
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::And(parts) => {
                write!(f, "and(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Formula::Or(parts) => {
                write!(f, "or(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Effect formula: a conjunction of literals with no internal contradiction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EffectFormula {
    literals: Vec<Literal>,
}

impl EffectFormula {
    pub fn new(literals: Vec<Literal>) -> Result<Self, ActionError> {
        if literals.is_empty() {
            return Err(ActionError::EmptyEffect);
        }
        let mut sorted: Vec<Literal> = literals;
        sorted.sort();
        sorted.dedup();
        for l in &sorted {
            if sorted.contains(&l.complement()) {
                return Err(ActionError::ContradictoryEffect(l.fluent.clone()));
            }
        }
        Ok(EffectFormula { literals: sorted })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn asserts(&self, l: &Literal) -> bool {
        self.literals.contains(l)
    }
}

/// Identity of a ground event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventId {
    /// Deliberate enunciation of an argument.
    Enunciate(ArgumentId),
    /// `makesUnacc_{y,x}` — acceptable attacker `y` defeats `x`.
    MakesUnacc(ArgumentId, ArgumentId),
    /// `makesAcc_x` — every attacker of `x` is out, so `x` recovers.
    MakesAcc(ArgumentId),
    /// Bounded-past pseudo-event establishing one initial literal at t = -1.
    Ini(Literal),
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventId::Enunciate(x) => write!(f, "enunciate({x})"),
            EventId::MakesUnacc(y, x) => write!(f, "makesUnacc({y},{x})"),
            EventId::MakesAcc(x) => write!(f, "makesAcc({x})"),
            EventId::Ini(l) => write!(f, "ini({l})"),
        }
    }
}

/// How an event participates in the semantics.
///
/// `Ini` events occur exactly once, at t = -1, and are never candidates for
/// triggering afterwards; the exogenous pool of the execution semantics
/// consists of the `Exogenous` events only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventClass {
    Action,
    Exogenous,
    Ini,
}

/// Full specification of one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpec {
    pub id: EventId,
    pub class: EventClass,
    pub pre: Formula,
    pub tri: Formula,
    pub eff: EffectFormula,
}

/// Strict partial order over events, given by generating pairs
/// `(higher, lower)`. Queries go through the transitive closure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriorityRelation {
    pairs: BTreeSet<(EventId, EventId)>,
    closure: BTreeSet<(EventId, EventId)>,
}

impl PriorityRelation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(pairs: BTreeSet<(EventId, EventId)>) -> Result<Self, ActionError> {
        let closure = transitive_closure(&pairs);
        for (a, b) in &closure {
            if a == b {
                return Err(ActionError::PriorityCycle(a.clone()));
            }
        }
        Ok(PriorityRelation { pairs, closure })
    }

    pub fn pairs(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.pairs
    }

    /// True when `higher` has triggering primacy over `lower`.
    pub fn dominates(&self, higher: &EventId, lower: &EventId) -> bool {
        self.closure.contains(&(higher.clone(), lower.clone()))
    }
}

fn transitive_closure(pairs: &BTreeSet<(EventId, EventId)>) -> BTreeSet<(EventId, EventId)> {
    let mut closure = pairs.clone();
    loop {
        let mut added = Vec::new();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c && !closure.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            return closure;
        }
        closure.extend(added);
    }
}

/// Total, coherent truth assignment over a fluent universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StateAssign {
    values: BTreeMap<Fluent, bool>,
}

impl StateAssign {
    pub fn new(values: BTreeMap<Fluent, bool>) -> Self {
        StateAssign { values }
    }

    /// All-false assignment except for the given positive fluents.
    pub fn from_true_set(universe: &BTreeSet<Fluent>, true_fluents: &BTreeSet<Fluent>) -> Self {
        StateAssign {
            values: universe
                .iter()
                .map(|f| (f.clone(), true_fluents.contains(f)))
                .collect(),
        }
    }

    pub fn truth(&self, f: &Fluent) -> Option<bool> {
        self.values.get(f).copied()
    }

    pub fn holds(&self, l: &Literal) -> Option<bool> {
        self.truth(&l.fluent).map(|v| v == l.positive)
    }

    pub fn fluents(&self) -> impl Iterator<Item = &Fluent> {
        self.values.keys()
    }

    /// The state as a set of literals, one per fluent.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.values.iter().map(|(f, v)| Literal {
            fluent: f.clone(),
            positive: *v,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn assign(&mut self, l: &Literal) {
        self.values.insert(l.fluent.clone(), l.positive);
    }

    pub(crate) fn covers(&self, fluents: &BTreeSet<Fluent>) -> bool {
        self.values.len() == fluents.len() && fluents.iter().all(|f| self.values.contains_key(f))
    }
}

/// Time-range descriptor for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// Run until the sequence is consumed and the state is quiescent; the
    /// cap only guards against a runaway implementation.
    Dynamic { cap: usize },
    /// Fixed end point `N`: exactly the event steps `0..=N` happen.
    Fixed { end: Time },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("formula mentions undeclared fluent {0}")]
    UnknownFluent(Fluent),
    #[error("duplicate event {0}")]
    DuplicateEvent(EventId),
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("event {0} is not an action")]
    NotAction(EventId),
    #[error("effect formula must contain at least one literal")]
    EmptyEffect,
    #[error("effect asserts both polarities of {0}")]
    ContradictoryEffect(Fluent),
    #[error("exogenous event {0} must have identical pre and tri")]
    ExogenousPreTriMismatch(EventId),
    #[error("action {0}: tri does not entail pre")]
    TriDoesNotEntailPre(EventId),
    #[error("priority relation is not a strict partial order: {0} dominates itself")]
    PriorityCycle(EventId),
    #[error("priority relation mentions undeclared event {0}")]
    PriorityUnknownEvent(EventId),
    #[error("initial state is not a total assignment over the declared fluents")]
    InitialStateNotTotal,
    #[error("ini events do not exactly cover the initial state")]
    BadInitialCover,
    #[error("ini event {0} must have class Ini and effect equal to its literal")]
    MalformedIni(EventId),
    #[error("duplicate action {0} in sequence")]
    DuplicateSequenceAction(EventId),
    #[error("conflicting effects on {fluent} from {}", events.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))]
    ConflictingEffects {
        fluent: Fluent,
        events: Vec<EventId>,
    },
    #[error("precondition of {event} fails at t={time}")]
    PreconditionViolated { event: EventId, time: Time },
    #[error("run exceeded the safety cap of {cap} steps")]
    HorizonExceeded { cap: usize },
    #[error("no event can occur at t={time}; the fixed horizon admits no valid execution")]
    EmptyStep { time: Time },
    #[error("sequence not consumed within the fixed horizon; {remaining} rank(s) left")]
    SequenceUnconsumed { remaining: usize },
}

/// The octuple bundling fluents, events, initial state, priority, and the
/// time range. Construction validates every structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    fluents: BTreeSet<Fluent>,
    events: BTreeMap<EventId, EventSpec>,
    initial_state: StateAssign,
    priority: PriorityRelation,
    horizon: Horizon,
}

impl Context {
    pub fn new(
        fluents: BTreeSet<Fluent>,
        events: Vec<EventSpec>,
        initial_state: StateAssign,
        priority: PriorityRelation,
        horizon: Horizon,
    ) -> Result<Self, ActionError> {
        if !initial_state.covers(&fluents) {
            return Err(ActionError::InitialStateNotTotal);
        }
        let mut map = BTreeMap::new();
        for spec in events {
            if map.contains_key(&spec.id) {
                return Err(ActionError::DuplicateEvent(spec.id));
            }
            map.insert(spec.id.clone(), spec);
        }
        for spec in map.values() {
            for f in spec
                .pre
                .fluents()
                .into_iter()
                .chain(spec.tri.fluents())
                .chain(spec.eff.literals().iter().map(|l| l.fluent.clone()))
            {
                if !fluents.contains(&f) {
                    return Err(ActionError::UnknownFluent(f));
                }
            }
            match spec.class {
                EventClass::Exogenous => {
                    if spec.pre != spec.tri {
                        return Err(ActionError::ExogenousPreTriMismatch(spec.id.clone()));
                    }
                }
                EventClass::Action => {
                    if spec.pre != spec.tri && !entails(&spec.tri, &spec.pre) {
                        return Err(ActionError::TriDoesNotEntailPre(spec.id.clone()));
                    }
                }
                EventClass::Ini => {
                    let ok = matches!(&spec.id, EventId::Ini(l)
                        if spec.eff.literals() == std::slice::from_ref(l));
                    if !ok {
                        return Err(ActionError::MalformedIni(spec.id.clone()));
                    }
                }
            }
            if matches!(spec.id, EventId::Ini(_)) && spec.class != EventClass::Ini {
                return Err(ActionError::MalformedIni(spec.id.clone()));
            }
        }
        for (a, b) in priority.pairs() {
            for e in [a, b] {
                if !map.contains_key(e) {
                    return Err(ActionError::PriorityUnknownEvent(e.clone()));
                }
            }
        }
        // Every literal of S(0) has exactly one ini event, and vice versa.
        let from_events: BTreeSet<Literal> = map
            .values()
            .filter(|s| s.class == EventClass::Ini)
            .filter_map(|s| match &s.id {
                EventId::Ini(l) => Some(l.clone()),
                _ => None,
            })
            .collect();
        let from_state: BTreeSet<Literal> = initial_state.literals().collect();
        if from_events != from_state {
            return Err(ActionError::BadInitialCover);
        }
        Ok(Context {
            fluents,
            events: map,
            initial_state,
            priority,
            horizon,
        })
    }

    pub fn fluents(&self) -> &BTreeSet<Fluent> {
        &self.fluents
    }

    pub fn events(&self) -> impl Iterator<Item = &EventSpec> {
        self.events.values()
    }

    pub fn event(&self, id: &EventId) -> Option<&EventSpec> {
        self.events.get(id)
    }

    pub fn initial_state(&self) -> &StateAssign {
        &self.initial_state
    }

    pub fn priority(&self) -> &PriorityRelation {
        &self.priority
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    /// The ini events forming E(-1), in canonical order.
    pub fn ini_events(&self) -> BTreeSet<EventId> {
        self.events
            .values()
            .filter(|s| s.class == EventClass::Ini)
            .map(|s| s.id.clone())
            .collect()
    }
}

/// Brute-force entailment over the union of mentioned fluents. Formulas in
/// this system are small; the check is skipped above 20 fluents.
fn entails(premise: &Formula, conclusion: &Formula) -> bool {
    let mut fluents: Vec<Fluent> = premise.fluents().into_iter().collect();
    for f in conclusion.fluents() {
        if !fluents.contains(&f) {
            fluents.push(f);
        }
    }
    if fluents.len() > 20 {
        return true;
    }
    let universe: BTreeSet<Fluent> = fluents.iter().cloned().collect();
    for mask in 0u32..(1u32 << fluents.len()) {
        let truths: BTreeSet<Fluent> = fluents
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| f.clone())
            .collect();
        let s = StateAssign::from_true_set(&universe, &truths);
        let p = eval_formula(&s, premise).unwrap_or(false);
        let c = eval_formula(&s, conclusion).unwrap_or(false);
        if p && !c {
            return false;
        }
    }
    true
}

/// Ranked set of actions. Ranks give relative order only; equal ranks
/// co-occur.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sequence {
    ranked: Vec<(EventId, u32)>,
}

impl Sequence {
    pub fn new(ranked: Vec<(EventId, u32)>) -> Result<Self, ActionError> {
        let mut seen = BTreeSet::new();
        for (e, _) in &ranked {
            if !seen.insert(e.clone()) {
                return Err(ActionError::DuplicateSequenceAction(e.clone()));
            }
        }
        Ok(Sequence { ranked })
    }

    pub fn empty() -> Self {
        Sequence::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(EventId, u32)> {
        self.ranked.iter()
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn rank_of(&self, e: &EventId) -> Option<u32> {
        self.ranked
            .iter()
            .find(|(id, _)| id == e)
            .map(|(_, o)| *o)
    }

    /// Actions grouped by rank, ascending.
    pub fn rank_groups(&self) -> BTreeMap<u32, BTreeSet<EventId>> {
        let mut groups: BTreeMap<u32, BTreeSet<EventId>> = BTreeMap::new();
        for (e, o) in &self.ranked {
            groups.entry(*o).or_default().insert(e.clone());
        }
        groups
    }
}

/// A sequence paired with the context it runs in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    sequence: Sequence,
    context: Context,
}

impl Setting {
    pub fn new(sequence: Sequence, context: Context) -> Result<Self, ActionError> {
        for (e, _) in sequence.iter() {
            match context.event(e) {
                None => return Err(ActionError::UnknownEvent(e.clone())),
                Some(spec) if spec.class != EventClass::Action => {
                    return Err(ActionError::NotAction(e.clone()))
                }
                Some(_) => {}
            }
        }
        Ok(Setting { sequence, context })
    }

    pub fn sequence(&self) -> &Sequence {
        &self.sequence
    }

    pub fn context(&self) -> &Context {
        &self.context
    }
}

/// The paired event trace E(-1), E(0), …, E(N) and state trace
/// S(0), …, S(N+1) produced by one run. Owns a copy of its setting so that
/// downstream queries (causality, rendering) are self-contained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Traces {
    setting: Setting,
    event_trace: Vec<BTreeSet<EventId>>,
    state_trace: Vec<StateAssign>,
}

impl Traces {
    pub(crate) fn new(
        setting: Setting,
        event_trace: Vec<BTreeSet<EventId>>,
        state_trace: Vec<StateAssign>,
    ) -> Self {
        debug_assert_eq!(event_trace.len(), state_trace.len());
        Traces {
            setting,
            event_trace,
            state_trace,
        }
    }

    /// Assembles traces from raw parts without running the engine, e.g. to
    /// audit an externally produced execution with
    /// [`validate_execution`]. `event_trace[0]` is E(-1).
    pub fn from_parts(
        setting: Setting,
        event_trace: Vec<BTreeSet<EventId>>,
        state_trace: Vec<StateAssign>,
    ) -> Self {
        Traces {
            setting,
            event_trace,
            state_trace,
        }
    }

    pub fn setting(&self) -> &Setting {
        &self.setting
    }

    pub fn context(&self) -> &Context {
        self.setting.context()
    }

    /// Index of the last state (N+1 for event steps 0..=N; 0 for an empty
    /// run).
    pub fn final_time(&self) -> Time {
        (self.state_trace.len() - 1) as Time
    }

    /// Events fired at `t`, for -1 <= t <= N.
    pub fn events_at(&self, t: Time) -> Option<&BTreeSet<EventId>> {
        let ix = usize::try_from(t + 1).ok()?;
        self.event_trace.get(ix)
    }

    /// State at `t`, for 0 <= t <= N+1.
    pub fn state_at(&self, t: Time) -> Option<&StateAssign> {
        let ix = usize::try_from(t).ok()?;
        self.state_trace.get(ix)
    }

    pub fn final_state(&self) -> &StateAssign {
        self.state_trace.last().expect("state trace nonempty")
    }

    /// All event steps with their time points, starting at t = -1.
    pub fn events(&self) -> impl Iterator<Item = (Time, &BTreeSet<EventId>)> {
        self.event_trace
            .iter()
            .enumerate()
            .map(|(i, e)| (i as Time - 1, e))
    }

    /// All states with their time points, starting at t = 0.
    pub fn states(&self) -> impl Iterator<Item = (Time, &StateAssign)> {
        self.state_trace
            .iter()
            .enumerate()
            .map(|(i, s)| (i as Time, s))
    }

    /// True when `event` occurred at `t`.
    pub fn occurred(&self, event: &EventId, t: Time) -> bool {
        self.events_at(t).is_some_and(|set| set.contains(event))
    }
}
