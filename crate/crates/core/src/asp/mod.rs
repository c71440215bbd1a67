//! Emission of the run as a four-part logic program in a small documented
//! ASP dialect (see `docs/asp-dialect.md`), plus an optional bridge to an
//! external solver for differential checking.
//!
//! The native engine is the reference semantics; the emitted program and
//! the bridge are diagnostic surfaces.

mod parse;
mod solver;

pub use parse::{parse_program, parse_term, BodyItem, CmpOp, Expr, Rule, Term};
pub use solver::{solver_bridge, SolverVerdict};

use std::fmt;

use thiserror::Error;

use crate::action::{
    run, ActionError, Context, EventClass, EventId, EventSpec, Fluent, Formula, Literal, Setting,
};
use crate::translate::context_arguments;

#[derive(Debug, Error)]
pub enum AspError {
    #[error(transparent)]
    Kernel(#[from] ActionError),
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("no solver command configured or the command could not be started: {0}")]
    SolverUnavailable(String),
    #[error("solver output could not be decoded: {0}")]
    SolverParseError(String),
    #[error("solver disagrees with the engine:\n{0}")]
    SolverDisagreement(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The emitted program: four named sections and the statements they were
/// rendered from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramText {
    pub sequence: Vec<Rule>,
    pub context: Vec<Rule>,
    pub semantics: Vec<Rule>,
    pub causality: Vec<Rule>,
}

impl ProgramText {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for (header, rules) in [
            ("sequence", &self.sequence),
            ("context", &self.context),
            ("semantics", &self.semantics),
            ("causality", &self.causality),
        ] {
            out.push_str(&format!("%% {header}\n"));
            for r in rules {
                out.push_str(&r.to_string());
                out.push('\n');
            }
        }
        out
    }

    pub fn all_rules(&self) -> impl Iterator<Item = &Rule> {
        self.sequence
            .iter()
            .chain(&self.context)
            .chain(&self.semantics)
            .chain(&self.causality)
    }

    /// Facts (bodyless statements) with the given functor name.
    pub fn facts_named(&self, name: &str) -> Vec<&Term> {
        self.all_rules()
            .filter(|r| r.body.is_empty())
            .filter_map(|r| r.head.as_ref())
            .filter(|t| matches!(t, Term::Fun { name: n, .. } if n == name))
            .collect()
    }
}

impl fmt::Display for ProgramText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

fn fun(name: &str, args: Vec<Term>) -> Term {
    Term::Fun {
        name: name.to_string(),
        args,
    }
}

fn atom(name: &str) -> Term {
    fun(name, vec![])
}

fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

fn fact(head: Term) -> Rule {
    Rule {
        head: Some(head),
        body: vec![],
    }
}

fn rule(head: Term, body: Vec<BodyItem>) -> Rule {
    Rule {
        head: Some(head),
        body,
    }
}

fn constraint(body: Vec<BodyItem>) -> Rule {
    Rule { head: None, body }
}

fn pos(t: Term) -> BodyItem {
    BodyItem::Pos(t)
}

fn neg(t: Term) -> BodyItem {
    BodyItem::Neg(t)
}

fn fluent_term(f: &Fluent) -> Term {
    match f {
        Fluent::Present(x) => fun("p", vec![atom(x.as_str())]),
        Fluent::Acceptable(x) => fun("a", vec![atom(x.as_str())]),
        Fluent::CanAttack(y, x) => fun("cA", vec![atom(y.as_str()), atom(x.as_str())]),
    }
}

fn literal_term(l: &Literal) -> Term {
    if l.positive {
        fluent_term(&l.fluent)
    } else {
        fun("neg", vec![fluent_term(&l.fluent)])
    }
}

fn event_term(e: &EventId) -> Term {
    match e {
        EventId::Enunciate(x) => fun("enunciate", vec![atom(x.as_str())]),
        EventId::MakesUnacc(y, x) => fun("makesUnacc", vec![atom(y.as_str()), atom(x.as_str())]),
        EventId::MakesAcc(x) => fun("makesAcc", vec![atom(x.as_str())]),
        EventId::Ini(l) => fun("ini", vec![literal_term(l)]),
    }
}

/// Conjunction of clauses, each a disjunction of literals. Formulas here
/// are small, so naive distribution is fine.
fn cnf_clauses(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::Lit(l) => vec![vec![l.clone()]],
        Formula::And(parts) => parts.iter().flat_map(cnf_clauses).collect(),
        Formula::Or(parts) => {
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for p in parts {
                let sub = cnf_clauses(p);
                let mut next = Vec::new();
                for clause in &acc {
                    for sub_clause in &sub {
                        let mut merged = clause.clone();
                        merged.extend(sub_clause.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

/// Emits the four-part program for a setting.
///
/// The horizon fact pins the time range to the engine's run length, so a
/// conformant solver reproduces the same traces within it.
pub fn emit_program(setting: &Setting) -> Result<ProgramText, AspError> {
    let traces = run(setting)?;
    let horizon = traces.final_time().max(1) - 1;
    let ctx = setting.context();

    let mut sequence = Vec::new();
    for (e, o) in setting.sequence().iter() {
        sequence.push(fact(fun(
            "seq",
            vec![event_term(e), Term::Int(i64::from(*o))],
        )));
    }

    let context = emit_context(ctx, horizon)?;
    let semantics = semantics_rules();
    let causality = causality_rules();

    Ok(ProgramText {
        sequence,
        context,
        semantics,
        causality,
    })
}

fn emit_context(ctx: &Context, horizon: i64) -> Result<Vec<Rule>, AspError> {
    let mut out = Vec::new();
    out.push(fact(fun("horizon", vec![Term::Int(horizon)])));
    for x in context_arguments(ctx) {
        out.push(fact(fun("argument", vec![atom(x.as_str())])));
    }
    for f in ctx.fluents() {
        if let Fluent::CanAttack(y, x) = f {
            out.push(fact(fun(
                "canAttack",
                vec![atom(y.as_str()), atom(x.as_str())],
            )));
        }
    }
    for f in ctx.fluents() {
        out.push(fact(fun("fluent", vec![fluent_term(f)])));
    }
    for l in ctx.initial_state().literals() {
        out.push(fact(fun("init", vec![literal_term(&l)])));
    }
    for spec in ctx.events() {
        let e = event_term(&spec.id);
        match spec.class {
            EventClass::Action => out.push(fact(fun("action", vec![e.clone()]))),
            EventClass::Exogenous => out.push(fact(fun("exo", vec![e.clone()]))),
            EventClass::Ini => continue, // covered by init/1
        }
        for l in spec.eff.literals() {
            out.push(fact(fun("eff", vec![e.clone(), literal_term(l)])));
        }
        out.extend(trigger_rules(spec));
    }
    for (hi, lo) in ctx.priority().pairs() {
        out.push(fact(fun("prio", vec![event_term(hi), event_term(lo)])));
    }
    Ok(out)
}

/// One `tri(E,T)` rule per event. Disjunctive clauses go through an
/// auxiliary `sat(E,C,T)` predicate, one alternative rule per literal;
/// `tricand(E,C,L)` facts record each clause's literals for the causality
/// section.
fn trigger_rules(spec: &EventSpec) -> Vec<Rule> {
    let e = event_term(&spec.id);
    let clauses = cnf_clauses(&spec.tri);
    let mut out = Vec::new();
    let mut body: Vec<BodyItem> = Vec::new();
    for (i, clause) in clauses.iter().enumerate() {
        let index = Term::Int(i as i64 + 1);
        for l in clause {
            out.push(fact(fun(
                "tricand",
                vec![e.clone(), index.clone(), literal_term(l)],
            )));
        }
        if let [single] = clause.as_slice() {
            body.push(pos(fun("holds", vec![literal_term(single), var("T")])));
        } else {
            body.push(pos(fun("sat", vec![e.clone(), index.clone(), var("T")])));
            for l in clause {
                out.push(rule(
                    fun("sat", vec![e.clone(), index.clone(), var("T")]),
                    vec![
                        pos(fun("holds", vec![literal_term(l), var("T")])),
                        pos(fun("time", vec![var("T")])),
                    ],
                ));
            }
        }
    }
    body.push(pos(fun("time", vec![var("T")])));
    out.push(rule(fun("tri", vec![e, var("T")]), body));
    out
}

/// Fixed encoding of the execution semantics: inertia, exogenous firing
/// under priority, and rank-ordered action release at quiet steps.
fn semantics_rules() -> Vec<Rule> {
    let holds = |l: Term, t: Term| fun("holds", vec![l, t]);
    let o = |e: Term, t: Term| fun("o", vec![e, t]);
    let time = |t: Term| fun("time", vec![t]);
    let plus_one = |v: &str, w: &str| BodyItem::Cmp {
        op: CmpOp::Eq,
        lhs: Expr::single(var(w)),
        rhs: Expr::sum(vec![var(v), Term::Int(1)]),
    };
    vec![
        rule(
            time(var("T")),
            vec![
                pos(fun("horizon", vec![var("H")])),
                BodyItem::Cmp {
                    op: CmpOp::Eq,
                    lhs: Expr::single(var("T")),
                    rhs: Expr::single(Term::Range(
                        Box::new(Term::Int(0)),
                        Box::new(var("H")),
                    )),
                },
            ],
        ),
        rule(
            fun("comp", vec![var("F"), fun("neg", vec![var("F")])]),
            vec![pos(fun("fluent", vec![var("F")]))],
        ),
        rule(
            fun("comp", vec![fun("neg", vec![var("F")]), var("F")]),
            vec![pos(fun("fluent", vec![var("F")]))],
        ),
        rule(
            holds(var("L"), Term::Int(0)),
            vec![pos(fun("init", vec![var("L")]))],
        ),
        rule(
            o(fun("ini", vec![var("L")]), Term::Int(-1)),
            vec![pos(fun("init", vec![var("L")]))],
        ),
        rule(
            fun("trig", vec![var("E"), var("T")]),
            vec![
                pos(fun("tri", vec![var("E"), var("T")])),
                pos(fun("exo", vec![var("E")])),
            ],
        ),
        rule(
            fun("above", vec![var("E1"), var("E2")]),
            vec![pos(fun("prio", vec![var("E1"), var("E2")]))],
        ),
        rule(
            fun("above", vec![var("E1"), var("E3")]),
            vec![
                pos(fun("above", vec![var("E1"), var("E2")])),
                pos(fun("prio", vec![var("E2"), var("E3")])),
            ],
        ),
        rule(
            fun("blocked", vec![var("E"), var("T")]),
            vec![
                pos(fun("trig", vec![var("E"), var("T")])),
                pos(fun("above", vec![var("E1"), var("E")])),
                pos(o(var("E1"), var("T"))),
            ],
        ),
        rule(
            o(var("E"), var("T")),
            vec![
                pos(fun("trig", vec![var("E"), var("T")])),
                neg(fun("blocked", vec![var("E"), var("T")])),
            ],
        ),
        rule(
            fun("busy", vec![var("T")]),
            vec![pos(fun("trig", vec![var("E"), var("T")]))],
        ),
        rule(
            fun("quiet", vec![var("T")]),
            vec![pos(time(var("T"))), neg(fun("busy", vec![var("T")]))],
        ),
        rule(
            fun("done_before", vec![var("A"), var("T")]),
            vec![
                pos(o(var("A"), var("T1"))),
                pos(fun("action", vec![var("A")])),
                pos(time(var("T"))),
                BodyItem::Cmp {
                    op: CmpOp::Lt,
                    lhs: Expr::single(var("T1")),
                    rhs: Expr::single(var("T")),
                },
            ],
        ),
        rule(
            fun("pending", vec![var("O"), var("T")]),
            vec![
                pos(fun("seq", vec![var("A"), var("O")])),
                pos(time(var("T"))),
                neg(fun("done_before", vec![var("A"), var("T")])),
            ],
        ),
        rule(
            fun("overdue", vec![var("O"), var("T")]),
            vec![
                pos(fun("pending", vec![var("O"), var("T")])),
                pos(fun("pending", vec![var("O2"), var("T")])),
                BodyItem::Cmp {
                    op: CmpOp::Lt,
                    lhs: Expr::single(var("O2")),
                    rhs: Expr::single(var("O")),
                },
            ],
        ),
        rule(
            fun("due", vec![var("O"), var("T")]),
            vec![
                pos(fun("pending", vec![var("O"), var("T")])),
                neg(fun("overdue", vec![var("O"), var("T")])),
            ],
        ),
        rule(
            o(var("A"), var("T")),
            vec![
                pos(fun("seq", vec![var("A"), var("O")])),
                pos(fun("due", vec![var("O"), var("T")])),
                pos(fun("quiet", vec![var("T")])),
            ],
        ),
        constraint(vec![
            pos(o(var("A"), var("T"))),
            pos(fun("action", vec![var("A")])),
            neg(fun("tri", vec![var("A"), var("T")])),
        ]),
        rule(
            fun("flip", vec![var("L"), var("T")]),
            vec![
                pos(o(var("E"), var("T"))),
                pos(fun("eff", vec![var("E"), var("L2")])),
                pos(fun("comp", vec![var("L"), var("L2")])),
                pos(time(var("T"))),
            ],
        ),
        rule(
            holds(var("L"), var("T1")),
            vec![
                pos(holds(var("L"), var("T"))),
                neg(fun("flip", vec![var("L"), var("T")])),
                pos(time(var("T"))),
                plus_one("T", "T1"),
            ],
        ),
        rule(
            holds(var("L"), var("T1")),
            vec![
                pos(o(var("E"), var("T"))),
                pos(fun("eff", vec![var("E"), var("L")])),
                pos(time(var("T"))),
                plus_one("T", "T1"),
            ],
        ),
    ]
}

/// Fixed causality rules: establishment-scan direct NESS-causes, chaining
/// through per-clause trigger antecedents.
fn causality_rules() -> Vec<Rule> {
    let o = |e: Term, t: Term| fun("o", vec![e, t]);
    vec![
        rule(
            fun("h", vec![var("L"), var("T")]),
            vec![pos(fun("holds", vec![var("L"), var("T")]))],
        ),
        rule(
            fun("contig", vec![var("L"), var("T"), var("T")]),
            vec![pos(fun("holds", vec![var("L"), var("T")]))],
        ),
        rule(
            fun("contig", vec![var("L"), var("T1"), var("T")]),
            vec![
                pos(fun("holds", vec![var("L"), var("T1")])),
                pos(fun("contig", vec![var("L"), var("T2"), var("T")])),
                BodyItem::Cmp {
                    op: CmpOp::Eq,
                    lhs: Expr::single(var("T2")),
                    rhs: Expr::sum(vec![var("T1"), Term::Int(1)]),
                },
            ],
        ),
        rule(
            fun(
                "dness",
                vec![
                    o(var("E"), var("T1")),
                    fun("h", vec![var("L"), var("T")]),
                ],
            ),
            vec![
                pos(o(var("E"), var("T1"))),
                pos(fun("eff", vec![var("E"), var("L")])),
                pos(fun("contig", vec![var("L"), var("T2"), var("T")])),
                BodyItem::Cmp {
                    op: CmpOp::Eq,
                    lhs: Expr::single(var("T2")),
                    rhs: Expr::sum(vec![var("T1"), Term::Int(1)]),
                },
                pos(fun("holds", vec![var("Lc"), var("T1")])),
                pos(fun("comp", vec![var("L"), var("Lc")])),
            ],
        ),
        rule(
            fun(
                "dness",
                vec![
                    o(fun("ini", vec![var("L")]), Term::Int(-1)),
                    fun("h", vec![var("L"), var("T")]),
                ],
            ),
            vec![
                pos(o(fun("ini", vec![var("L")]), Term::Int(-1))),
                pos(fun("contig", vec![var("L"), Term::Int(0), var("T")])),
            ],
        ),
        rule(
            fun("ness", vec![var("O"), var("H")]),
            vec![pos(fun("dness", vec![var("O"), var("H")]))],
        ),
        rule(
            fun("tl", vec![var("E"), var("L"), var("T")]),
            vec![
                pos(fun("tricand", vec![var("E"), var("C"), var("L")])),
                pos(fun("holds", vec![var("L"), var("T")])),
            ],
        ),
        rule(
            fun(
                "actual",
                vec![o(var("E1"), var("T1")), o(var("E2"), var("T2"))],
            ),
            vec![
                pos(fun(
                    "ness",
                    vec![
                        o(var("E1"), var("T1")),
                        fun("h", vec![var("L"), var("T2")]),
                    ],
                )),
                pos(fun("tl", vec![var("E2"), var("L"), var("T2")])),
                pos(o(var("E2"), var("T2"))),
                BodyItem::Cmp {
                    op: CmpOp::Lt,
                    lhs: Expr::single(var("T1")),
                    rhs: Expr::single(var("T2")),
                },
            ],
        ),
        rule(
            fun(
                "ness",
                vec![
                    o(var("E1"), var("T1")),
                    fun("h", vec![var("L"), var("T3")]),
                ],
            ),
            vec![
                pos(fun(
                    "actual",
                    vec![o(var("E1"), var("T1")), o(var("E2"), var("T2"))],
                )),
                pos(fun(
                    "dness",
                    vec![
                        o(var("E2"), var("T2")),
                        fun("h", vec![var("L"), var("T3")]),
                    ],
                )),
            ],
        ),
    ]
}
