//! Causal query syntax shared by the CLI and the library surface:
//!
//! ```text
//! acc(ID)@T | not-acc(ID)@T | present(ID)@T      T ::= integer | final
//! ```

use std::fmt;

use thiserror::Error;

use crate::aaf::ArgumentId;
use crate::action::{Fluent, Literal, Time, Traces};
use crate::causality::TimedFormula;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("cannot parse query {0:?}: expected acc(ID)@T, not-acc(ID)@T, or present(ID)@T")]
    Malformed(String),
    #[error("bad argument name in query: {0}")]
    BadArgument(String),
    #[error("bad time in query: {0:?}")]
    BadTime(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Acc,
    NotAcc,
    Present,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryTime {
    At(Time),
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub argument: ArgumentId,
    pub time: QueryTime,
}

impl Query {
    pub fn parse(text: &str) -> Result<Self, QueryError> {
        let text = text.trim();
        let (head, time_text) = text
            .rsplit_once('@')
            .ok_or_else(|| QueryError::Malformed(text.to_string()))?;
        let time = match time_text.trim() {
            "final" => QueryTime::Final,
            other => QueryTime::At(
                other
                    .parse::<Time>()
                    .map_err(|_| QueryError::BadTime(other.to_string()))?,
            ),
        };
        let head = head.trim();
        let (kind, rest) = if let Some(rest) = head.strip_prefix("not-acc") {
            (QueryKind::NotAcc, rest)
        } else if let Some(rest) = head.strip_prefix("acc") {
            (QueryKind::Acc, rest)
        } else if let Some(rest) = head.strip_prefix("present") {
            (QueryKind::Present, rest)
        } else {
            return Err(QueryError::Malformed(text.to_string()));
        };
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| QueryError::Malformed(text.to_string()))?;
        let argument = ArgumentId::new(inner.trim())
            .map_err(|_| QueryError::BadArgument(inner.trim().to_string()))?;
        Ok(Query {
            kind,
            argument,
            time,
        })
    }

    /// The literal this query asks about.
    pub fn literal(&self) -> Literal {
        match self.kind {
            QueryKind::Acc => Literal::pos(Fluent::Acceptable(self.argument.clone())),
            QueryKind::NotAcc => Literal::neg(Fluent::Acceptable(self.argument.clone())),
            QueryKind::Present => Literal::pos(Fluent::Present(self.argument.clone())),
        }
    }

    /// Resolves `@final` against a trace and produces the causal target.
    pub fn to_timed_formula(&self, tr: &Traces) -> TimedFormula {
        let time = match self.time {
            QueryTime::At(t) => t,
            QueryTime::Final => tr.final_time(),
        };
        TimedFormula::literal(self.literal(), time)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            QueryKind::Acc => "acc",
            QueryKind::NotAcc => "not-acc",
            QueryKind::Present => "present",
        };
        write!(f, "{kind}({})@", self.argument)?;
        match self.time {
            QueryTime::At(t) => write!(f, "{t}"),
            QueryTime::Final => write!(f, "final"),
        }
    }
}
