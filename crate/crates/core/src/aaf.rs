//! Abstract argumentation graphs: arguments, attacks, and acceptability.
//!
//! This module is deliberately independent of the transition-system
//! machinery; [`ArgGraph::grounded_labeling`] and
//! [`ArgGraph::admissible_sets_bruteforce`] serve as oracles against which
//! the engine's acceptability results are verified.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Subset-enumeration cutoff for [`ArgGraph::admissible_sets_bruteforce`].
pub const BRUTE_FORCE_BOUND: usize = 16;

/// Name of an argument. Nonempty, case-sensitive token made of letters,
/// digits, and underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(name: impl Into<String>) -> Result<Self, AafError> {
        let name = name.into();
        let ok = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(ArgumentId(name))
        } else {
            Err(AafError::BadArgumentName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AafError {
    #[error("argument name {0:?} must be a nonempty token of letters, digits, or underscores")]
    BadArgumentName(String),
    #[error("duplicate argument {0}")]
    DuplicateArgument(ArgumentId),
    #[error("unknown argument {0}")]
    UnknownArgument(ArgumentId),
    #[error("attack cycle: {}", cycle_text(.0))]
    CycleFound(Vec<ArgumentId>),
    #[error("{count} arguments exceed the brute-force bound of {bound}")]
    TooLarge { count: usize, bound: usize },
}

fn cycle_text(cycle: &[ArgumentId]) -> String {
    let mut names: Vec<&str> = cycle.iter().map(ArgumentId::as_str).collect();
    if let Some(first) = names.first().copied() {
        names.push(first);
    }
    names.join(" -> ")
}

/// An attack graph: a finite argument set and a binary attack relation.
///
/// Construction does not validate; call [`ArgGraph::validate`] to check for
/// duplicates, undeclared endpoints, and cycles before relying on the
/// acyclicity-dependent operations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArgGraph {
    arguments: Vec<ArgumentId>,
    attacks: Vec<(ArgumentId, ArgumentId)>,
}

impl ArgGraph {
    pub fn new(arguments: Vec<ArgumentId>, attacks: Vec<(ArgumentId, ArgumentId)>) -> Self {
        ArgGraph { arguments, attacks }
    }

    pub fn arguments(&self) -> &[ArgumentId] {
        &self.arguments
    }

    pub fn attacks(&self) -> &[(ArgumentId, ArgumentId)] {
        &self.attacks
    }

    pub fn contains(&self, x: &ArgumentId) -> bool {
        self.arguments.contains(x)
    }

    /// Checks all structural invariants: unique argument names, declared
    /// attack endpoints, and acyclicity of the attack relation.
    pub fn validate(&self) -> Result<(), AafError> {
        let mut seen = BTreeSet::new();
        for a in &self.arguments {
            if !seen.insert(a.clone()) {
                return Err(AafError::DuplicateArgument(a.clone()));
            }
        }
        for (y, x) in &self.attacks {
            for end in [y, x] {
                if !seen.contains(end) {
                    return Err(AafError::UnknownArgument(end.clone()));
                }
            }
        }
        if let Some(cycle) = self.find_cycle() {
            return Err(AafError::CycleFound(cycle));
        }
        Ok(())
    }

    /// Depth-first search over attack edges; returns one cycle if any.
    fn find_cycle(&self) -> Option<Vec<ArgumentId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let out: BTreeMap<&ArgumentId, Vec<&ArgumentId>> = {
            let mut m: BTreeMap<&ArgumentId, Vec<&ArgumentId>> = BTreeMap::new();
            for (y, x) in &self.attacks {
                m.entry(y).or_default().push(x);
            }
            m
        };
        let mut color: BTreeMap<&ArgumentId, Color> =
            self.arguments.iter().map(|a| (a, Color::White)).collect();
        let mut stack: Vec<ArgumentId> = Vec::new();

        fn visit<'a>(
            node: &'a ArgumentId,
            out: &BTreeMap<&'a ArgumentId, Vec<&'a ArgumentId>>,
            color: &mut BTreeMap<&'a ArgumentId, Color>,
            stack: &mut Vec<ArgumentId>,
        ) -> Option<Vec<ArgumentId>> {
            color.insert(node, Color::Gray);
            stack.push(node.clone());
            for next in out.get(node).into_iter().flatten() {
                match color.get(next).copied().unwrap_or(Color::White) {
                    Color::Gray => {
                        let start = stack.iter().position(|a| a == *next).unwrap_or(0);
                        return Some(stack[start..].to_vec());
                    }
                    Color::White => {
                        if let Some(c) = visit(next, out, color, stack) {
                            return Some(c);
                        }
                    }
                    Color::Black => {}
                }
            }
            stack.pop();
            color.insert(node, Color::Black);
            None
        }

        for a in &self.arguments {
            if color.get(a) == Some(&Color::White) {
                if let Some(c) = visit(a, &out, &mut color, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Direct attackers of `x`.
    pub fn attackers(&self, x: &ArgumentId) -> Result<BTreeSet<ArgumentId>, AafError> {
        if !self.contains(x) {
            return Err(AafError::UnknownArgument(x.clone()));
        }
        Ok(self
            .attacks
            .iter()
            .filter(|(_, t)| t == x)
            .map(|(y, _)| y.clone())
            .collect())
    }

    /// The unique acceptability labeling of an acyclic graph, evaluated in
    /// topological order: an argument is accepted exactly when every
    /// attacker is rejected (so unattacked arguments are accepted).
    pub fn grounded_labeling(&self) -> Result<Labeling, AafError> {
        self.validate()?;
        let mut indegree: BTreeMap<&ArgumentId, usize> =
            self.arguments.iter().map(|a| (a, 0)).collect();
        let mut out: BTreeMap<&ArgumentId, Vec<&ArgumentId>> = BTreeMap::new();
        for (y, x) in &self.attacks {
            *indegree.get_mut(x).expect("validated endpoint") += 1;
            out.entry(y).or_default().push(x);
        }
        let mut queue: VecDeque<&ArgumentId> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(a, _)| *a)
            .collect();
        let mut labels: BTreeMap<ArgumentId, Acceptance> = BTreeMap::new();
        while let Some(node) = queue.pop_front() {
            let accepted = self
                .attacks
                .iter()
                .filter(|(_, t)| t == node)
                .all(|(y, _)| labels.get(y) == Some(&Acceptance::Rejected));
            labels.insert(
                node.clone(),
                if accepted {
                    Acceptance::Accepted
                } else {
                    Acceptance::Rejected
                },
            );
            for next in out.get(node).into_iter().flatten() {
                let d = indegree.get_mut(next).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(next);
                }
            }
        }
        debug_assert_eq!(labels.len(), self.arguments.len());
        Ok(Labeling(labels))
    }

    /// Enumerates every admissible set by exhaustive subset search.
    ///
    /// A set is admissible when it is conflict-free and each member is
    /// acceptable by the set itself (every attacker of a member is attacked
    /// by some member).
    pub fn admissible_sets_bruteforce(
        &self,
    ) -> Result<BTreeSet<BTreeSet<ArgumentId>>, AafError> {
        self.admissible_sets_bounded(BRUTE_FORCE_BOUND)
    }

    pub fn admissible_sets_bounded(
        &self,
        bound: usize,
    ) -> Result<BTreeSet<BTreeSet<ArgumentId>>, AafError> {
        let n = self.arguments.len();
        if n > bound {
            return Err(AafError::TooLarge { count: n, bound });
        }
        let attacks_ix: Vec<(usize, usize)> = self
            .attacks
            .iter()
            .map(|(y, x)| (self.index_of(y), self.index_of(x)))
            .collect();
        let mut result = BTreeSet::new();
        for mask in 0u32..(1u32 << n) {
            let member = |i: usize| mask & (1 << i) != 0;
            let conflict = attacks_ix.iter().any(|&(y, x)| member(y) && member(x));
            if conflict {
                continue;
            }
            // Every attacker of a member must itself be attacked by a member.
            let defended = (0..n).filter(|&i| member(i)).all(|i| {
                attacks_ix
                    .iter()
                    .filter(|&&(_, x)| x == i)
                    .all(|&(y, _)| attacks_ix.iter().any(|&(z, t)| t == y && member(z)))
            });
            if defended {
                result.insert(
                    (0..n)
                        .filter(|&i| member(i))
                        .map(|i| self.arguments[i].clone())
                        .collect(),
                );
            }
        }
        Ok(result)
    }

    fn index_of(&self, a: &ArgumentId) -> usize {
        self.arguments
            .iter()
            .position(|b| b == a)
            .expect("argument declared")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Acceptance {
    Accepted,
    Rejected,
}

/// Total acceptability assignment over a graph's arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling(BTreeMap<ArgumentId, Acceptance>);

impl Labeling {
    pub fn get(&self, x: &ArgumentId) -> Option<Acceptance> {
        self.0.get(x).copied()
    }

    pub fn is_accepted(&self, x: &ArgumentId) -> bool {
        self.get(x) == Some(Acceptance::Accepted)
    }

    pub fn accepted(&self) -> BTreeSet<ArgumentId> {
        self.0
            .iter()
            .filter(|(_, acc)| **acc == Acceptance::Accepted)
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ArgumentId, Acceptance)> {
        self.0.iter().map(|(a, acc)| (a, *acc))
    }
}
