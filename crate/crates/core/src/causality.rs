//! Causal relations over a completed trace.
//!
//! Three relations are computed, all grounded in the NESS reading of
//! causation (a cause is a necessary element of a set of antecedent actual
//! conditions sufficient for the effect):
//!
//! * *direct NESS-causes* of a timed formula — the event occurrences whose
//!   actual effects established the formula's support and sustained it up
//!   to the query time;
//! * *actual causes* of an event occurrence — the NESS-causes of its
//!   triggering condition;
//! * *NESS-causes* of a timed formula — the closure of direct causes under
//!   actual-cause ancestry, chaining back through triggering conditions to
//!   the ini events of the bounded past.
//!
//! Over-determination is preserved throughout: when several co-fired
//! occurrences each suffice for an effect, all of them are causes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::action::{
    eval_formula, EventId, Fluent, Formula, Literal, StateAssign, Time, Traces,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CausalError {
    #[error("formula {formula} does not hold at t={time}")]
    TargetNotTrue { formula: String, time: Time },
    #[error("occurrence {event}@{time} is not in the trace")]
    TargetNotInTrace { event: EventId, time: Time },
    #[error("time {0} is outside the trace")]
    TimeOutOfRange(Time),
    #[error("query mentions a fluent unknown to the trace: {0}")]
    UnknownFluent(String),
}

/// An event occurrence `o(e,t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub event: EventId,
    pub time: Time,
}

impl Occurrence {
    pub fn new(event: EventId, time: Time) -> Self {
        Occurrence { event, time }
    }

    pub fn is_ini(&self) -> bool {
        matches!(self.event, EventId::Ini(_))
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.event, self.time)
    }
}

/// A formula holding at a time point, `h(ψ,t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimedFormula {
    pub formula: Formula,
    pub time: Time,
}

impl TimedFormula {
    pub fn new(formula: Formula, time: Time) -> Self {
        TimedFormula { formula, time }
    }

    pub fn literal(l: Literal, time: Time) -> Self {
        TimedFormula {
            formula: Formula::Lit(l),
            time,
        }
    }
}

impl fmt::Display for TimedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.formula, self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CauseKind {
    DirectNess,
    Ness,
    Actual,
}

impl fmt::Display for CauseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CauseKind::DirectNess => write!(f, "direct"),
            CauseKind::Ness => write!(f, "ness"),
            CauseKind::Actual => write!(f, "actual"),
        }
    }
}

/// Effect side of a causal link: a timed formula or another occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Effect {
    Formula(TimedFormula),
    Event(Occurrence),
}

impl Effect {
    pub fn time(&self) -> Time {
        match self {
            Effect::Formula(tf) => tf.time,
            Effect::Event(o) => o.time,
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Formula(tf) => write!(f, "{tf}"),
            Effect::Event(o) => write!(f, "{o}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CausalLink {
    pub kind: CauseKind,
    pub cause: Occurrence,
    pub effect: Effect,
}

/// All links discovered while resolving the NESS-causes of one root target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    pub root: TimedFormula,
    pub links: BTreeSet<CausalLink>,
}

impl CausalGraph {
    pub fn count(&self, kind: CauseKind) -> usize {
        self.links.iter().filter(|l| l.kind == kind).count()
    }

    pub fn occurrences(&self) -> BTreeSet<Occurrence> {
        let mut out = BTreeSet::new();
        for l in &self.links {
            out.insert(l.cause.clone());
            if let Effect::Event(o) = &l.effect {
                out.insert(o.clone());
            }
        }
        out
    }
}

/// Direct NESS-causes of a timed formula.
pub fn direct_ness_causes(
    tr: &Traces,
    target: &TimedFormula,
) -> Result<BTreeSet<Occurrence>, CausalError> {
    Engine::new(tr).direct(target)
}

/// NESS-causes of a timed formula: the least fixpoint closing direct
/// causes under actual-cause ancestry.
pub fn ness_causes(
    tr: &Traces,
    target: &TimedFormula,
) -> Result<BTreeSet<Occurrence>, CausalError> {
    Engine::new(tr).ness(target)
}

/// Actual causes of an event occurrence: the NESS-causes of its triggering
/// condition, the occurrence itself excluded.
pub fn actual_causes(tr: &Traces, target: &Occurrence) -> Result<BTreeSet<Occurrence>, CausalError> {
    if !tr.occurred(&target.event, target.time) {
        return Err(CausalError::TargetNotInTrace {
            event: target.event.clone(),
            time: target.time,
        });
    }
    Engine::new(tr).actual(target)
}

/// The full causal graph for a root target, with every link labeled.
pub fn causal_graph(tr: &Traces, target: &TimedFormula) -> Result<CausalGraph, CausalError> {
    let mut engine = Engine::new(tr);
    let direct = engine.direct(target)?;
    let all = engine.ness(target)?;
    let mut links: BTreeSet<CausalLink> = BTreeSet::new();
    for c in &direct {
        links.insert(CausalLink {
            kind: CauseKind::DirectNess,
            cause: c.clone(),
            effect: Effect::Formula(target.clone()),
        });
    }
    for c in all.difference(&direct) {
        links.insert(CausalLink {
            kind: CauseKind::Ness,
            cause: c.clone(),
            effect: Effect::Formula(target.clone()),
        });
    }
    links.extend(engine.actual_links);
    Ok(CausalGraph {
        root: target.clone(),
        links,
    })
}

/// The interval `[start, end]` over which `literal` holds continuously
/// around `time`: `start` is the establishment point, `end` the last
/// contiguous state in the trace. Used for interval display.
pub fn holding_span(tr: &Traces, literal: &Literal, time: Time) -> Option<(Time, Time)> {
    let holds = |t: Time| {
        tr.state_at(t)
            .and_then(|s| s.holds(literal))
            .unwrap_or(false)
    };
    if !holds(time) {
        return None;
    }
    let mut start = time;
    while start > 0 && holds(start - 1) {
        start -= 1;
    }
    let mut end = time;
    while end < tr.final_time() && holds(end + 1) {
        end += 1;
    }
    Some((start, end))
}

struct Engine<'a> {
    tr: &'a Traces,
    actual_memo: BTreeMap<Occurrence, BTreeSet<Occurrence>>,
    actual_links: BTreeSet<CausalLink>,
}

impl<'a> Engine<'a> {
    fn new(tr: &'a Traces) -> Self {
        Engine {
            tr,
            actual_memo: BTreeMap::new(),
            actual_links: BTreeSet::new(),
        }
    }

    fn state(&self, t: Time) -> Result<&'a StateAssign, CausalError> {
        self.tr.state_at(t).ok_or(CausalError::TimeOutOfRange(t))
    }

    /// Direct NESS-causes of one literal: the co-fired occurrences at the
    /// establishment point of the maximal interval of truth ending at the
    /// query time.
    fn direct_literal(
        &self,
        l: &Literal,
        time: Time,
    ) -> Result<BTreeSet<Occurrence>, CausalError> {
        let holds_at = |t: Time| {
            self.tr
                .state_at(t)
                .and_then(|s| s.holds(l))
                .unwrap_or(false)
        };
        if !holds_at(time) {
            return Err(CausalError::TargetNotTrue {
                formula: l.to_string(),
                time,
            });
        }
        let mut established = time;
        while established > 0 && holds_at(established - 1) {
            established -= 1;
        }
        let fire_time = established - 1; // -1 means the bounded past
        let fired = self
            .tr
            .events_at(fire_time)
            .ok_or(CausalError::TimeOutOfRange(fire_time))?;
        let ctx = self.tr.context();
        let causes: BTreeSet<Occurrence> = fired
            .iter()
            .filter(|e| ctx.event(e).is_some_and(|spec| spec.eff.asserts(l)))
            .map(|e| Occurrence::new(e.clone(), fire_time))
            .collect();
        debug_assert!(
            !causes.is_empty(),
            "an established literal has an establishing occurrence"
        );
        Ok(causes)
    }

    /// Direct NESS-causes of a timed formula. For compounds, the union over
    /// every minimal sufficient set of actually-true formula literals.
    fn direct(&self, target: &TimedFormula) -> Result<BTreeSet<Occurrence>, CausalError> {
        let s = self.state(target.time)?;
        let true_here = eval_formula(s, &target.formula)
            .map_err(|e| CausalError::UnknownFluent(e.to_string()))?;
        if !true_here {
            return Err(CausalError::TargetNotTrue {
                formula: target.formula.to_string(),
                time: target.time,
            });
        }
        if let Formula::Lit(l) = &target.formula {
            return self.direct_literal(l, target.time);
        }
        let mut out = BTreeSet::new();
        for set in minimal_sufficient_sets(&target.formula, s) {
            for l in set {
                out.extend(self.direct_literal(&l, target.time)?);
            }
        }
        Ok(out)
    }

    /// Least fixpoint: direct causes plus the actual-cause ancestors of
    /// each direct cause.
    fn ness(&mut self, target: &TimedFormula) -> Result<BTreeSet<Occurrence>, CausalError> {
        let direct = self.direct(target)?;
        let mut out = direct.clone();
        for c in direct {
            out.extend(self.actual(&c)?);
        }
        Ok(out)
    }

    /// Actual causes of an occurrence: NESS-causes of its trigger at the
    /// occurrence time. Ini occurrences have none: nothing precedes t = -1.
    fn actual(&mut self, occ: &Occurrence) -> Result<BTreeSet<Occurrence>, CausalError> {
        if let Some(done) = self.actual_memo.get(occ) {
            return Ok(done.clone());
        }
        if occ.time < 0 {
            self.actual_memo.insert(occ.clone(), BTreeSet::new());
            return Ok(BTreeSet::new());
        }
        let tri = self
            .tr
            .context()
            .event(&occ.event)
            .ok_or_else(|| CausalError::TargetNotInTrace {
                event: occ.event.clone(),
                time: occ.time,
            })?
            .tri
            .clone();
        let mut ancestors = self.ness(&TimedFormula::new(tri, occ.time))?;
        ancestors.remove(occ);
        for a in &ancestors {
            self.actual_links.insert(CausalLink {
                kind: CauseKind::Actual,
                cause: a.clone(),
                effect: Effect::Event(occ.clone()),
            });
        }
        self.actual_memo.insert(occ.clone(), ancestors.clone());
        Ok(ancestors)
    }
}

/// Minimal sets of formula literals, true in `s`, whose conjunction entails
/// the formula. Enumeration ranges over the formula's own literals only.
fn minimal_sufficient_sets(formula: &Formula, s: &StateAssign) -> Vec<Vec<Literal>> {
    let candidates: Vec<Literal> = formula
        .literals()
        .into_iter()
        .filter(|l| s.holds(l).unwrap_or(false))
        .collect();
    let fluents: Vec<Fluent> = formula.fluents().into_iter().collect();
    let k = candidates.len();
    if k == 0 || k > 20 || fluents.len() > 20 {
        return Vec::new();
    }
    let mut sufficient_masks: Vec<u32> = Vec::new();
    let mut minimal: Vec<Vec<Literal>> = Vec::new();
    // Increasing popcount keeps subset-minimality a pure membership check.
    let mut masks: Vec<u32> = (1u32..(1 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        if sufficient_masks.iter().any(|prev| prev & mask == *prev) {
            continue; // a subset is already sufficient
        }
        let chosen: Vec<&Literal> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &candidates[i])
            .collect();
        if entails_formula(&chosen, &fluents, formula) {
            sufficient_masks.push(mask);
            minimal.push(chosen.into_iter().cloned().collect());
        }
    }
    minimal
}

/// Does the conjunction of `premise` entail `formula`, over the formula's
/// fluents?
fn entails_formula(premise: &[&Literal], fluents: &[Fluent], formula: &Formula) -> bool {
    let universe: BTreeSet<Fluent> = fluents.iter().cloned().collect();
    let free: Vec<&Fluent> = fluents
        .iter()
        .filter(|f| !premise.iter().any(|l| &l.fluent == *f))
        .collect();
    for mask in 0u32..(1u32 << free.len()) {
        let mut truths: BTreeSet<Fluent> = premise
            .iter()
            .filter(|l| l.positive)
            .map(|l| l.fluent.clone())
            .collect();
        for (i, f) in free.iter().enumerate() {
            if mask & (1 << i) != 0 {
                truths.insert((*f).clone());
            }
        }
        let assign = StateAssign::from_true_set(&universe, &truths);
        if !eval_formula(&assign, formula).unwrap_or(false) {
            return false;
        }
    }
    true
}
