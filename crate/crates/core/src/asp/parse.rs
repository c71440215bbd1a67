//! Parser for the emitted ASP dialect. The grammar is documented in
//! `docs/asp-dialect.md`; emitted programs must round-trip through this
//! parser back to the statements they were rendered from.

use std::fmt;

use super::AspError;

/// A ground or non-ground term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    /// Constant or function symbol (lowercase head).
    Fun { name: String, args: Vec<Term> },
    Int(i64),
    /// Variable (uppercase head).
    Var(String),
    /// Interval `lo..hi`.
    Range(Box<Term>, Box<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Fun { name, args } => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::Int(n) => write!(f, "{n}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Range(lo, hi) => write!(f, "{lo}..{hi}"),
        }
    }
}

/// Sum of terms; a single summand is just that term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expr {
    pub summands: Vec<Term>,
}

impl Expr {
    pub fn single(t: Term) -> Self {
        Expr { summands: vec![t] }
    }

    pub fn sum(ts: Vec<Term>) -> Self {
        Expr { summands: ts }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn text(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BodyItem {
    Pos(Term),
    Neg(Term),
    Cmp { op: CmpOp, lhs: Expr, rhs: Expr },
}

impl fmt::Display for BodyItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyItem::Pos(t) => write!(f, "{t}"),
            BodyItem::Neg(t) => write!(f, "not {t}"),
            BodyItem::Cmp { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.text()),
        }
    }
}

/// A fact (empty body), rule, or constraint (no head).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub head: Option<Term>,
    pub body: Vec<BodyItem>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Some(h) if self.body.is_empty() => return write!(f, "{h}."),
            Some(h) => write!(f, "{h} :- ")?,
            None => write!(f, ":- ")?,
        }
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ".")
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Variable(String),
    Int(i64),
    Sym(&'static str),
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0, line: 1 }
    }

    fn error(&self, message: impl Into<String>) -> AspError {
        AspError::ParseError {
            line: self.line,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let mut chars = rest.char_indices();
            match chars.next() {
                Some((_, c)) if c.is_whitespace() => {
                    if c == '\n' {
                        self.line += 1;
                    }
                    self.pos += c.len_utf8();
                }
                Some((_, '%')) => {
                    let end = rest.find('\n').unwrap_or(rest.len());
                    self.pos += end;
                }
                _ => return,
            }
        }
    }

    fn next(&mut self) -> Result<Option<Tok>, AspError> {
        self.skip_trivia();
        let rest = self.rest();
        let Some(c) = rest.chars().next() else {
            return Ok(None);
        };
        for sym in [":-", "..", "!=", "<=", ">=", "(", ")", ",", ".", "=", "<", ">"] {
            if rest.starts_with(sym) {
                self.pos += sym.len();
                return Ok(Some(Tok::Sym(match sym {
                    ":-" => ":-",
                    ".." => "..",
                    "!=" => "!=",
                    "<=" => "<=",
                    ">=" => ">=",
                    "(" => "(",
                    ")" => ")",
                    "," => ",",
                    "." => ".",
                    "=" => "=",
                    "<" => "<",
                    ">" => ">",
                    _ => unreachable!(),
                })));
            }
        }
        if c == '+' {
            self.pos += 1;
            return Ok(Some(Tok::Sym("+")));
        }
        if c == '-' || c.is_ascii_digit() {
            let len = rest
                .char_indices()
                .skip(1)
                .find(|(_, d)| !d.is_ascii_digit())
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let text = &rest[..len];
            let n: i64 = text
                .parse()
                .map_err(|_| self.error(format!("bad integer {text:?}")))?;
            self.pos += len;
            return Ok(Some(Tok::Int(n)));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .char_indices()
                .find(|(_, d)| !(d.is_ascii_alphanumeric() || *d == '_'))
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let word = rest[..len].to_string();
            self.pos += len;
            if c.is_ascii_uppercase() || c == '_' {
                return Ok(Some(Tok::Variable(word)));
            }
            return Ok(Some(Tok::Ident(word)));
        }
        Err(self.error(format!("unexpected character {c:?}")))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Tok>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(text),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<Option<&Tok>, AspError> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn advance(&mut self) -> Result<Option<Tok>, AspError> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        self.lexer.next()
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), AspError> {
        match self.advance()? {
            Some(Tok::Sym(s)) if s == sym => Ok(()),
            other => Err(self.lexer.error(format!("expected {sym:?}, got {other:?}"))),
        }
    }

    fn term(&mut self) -> Result<Term, AspError> {
        let base = match self.advance()? {
            Some(Tok::Int(n)) => Term::Int(n),
            Some(Tok::Variable(v)) => Term::Var(v),
            Some(Tok::Ident(name)) => {
                let mut args = Vec::new();
                if matches!(self.peek()?, Some(Tok::Sym("("))) {
                    self.advance()?;
                    loop {
                        args.push(self.term()?);
                        match self.advance()? {
                            Some(Tok::Sym(",")) => continue,
                            Some(Tok::Sym(")")) => break,
                            other => {
                                return Err(self
                                    .lexer
                                    .error(format!("expected ',' or ')', got {other:?}")))
                            }
                        }
                    }
                }
                Term::Fun { name, args }
            }
            other => return Err(self.lexer.error(format!("expected term, got {other:?}"))),
        };
        if matches!(self.peek()?, Some(Tok::Sym(".."))) {
            self.advance()?;
            let hi = self.term()?;
            return Ok(Term::Range(Box::new(base), Box::new(hi)));
        }
        Ok(base)
    }

    fn expr(&mut self) -> Result<Expr, AspError> {
        let mut summands = vec![self.term()?];
        while matches!(self.peek()?, Some(Tok::Sym("+"))) {
            self.advance()?;
            summands.push(self.term()?);
        }
        Ok(Expr { summands })
    }

    fn cmp_op(&mut self) -> Result<Option<CmpOp>, AspError> {
        let op = match self.peek()? {
            Some(Tok::Sym("=")) => Some(CmpOp::Eq),
            Some(Tok::Sym("!=")) => Some(CmpOp::Ne),
            Some(Tok::Sym("<")) => Some(CmpOp::Lt),
            Some(Tok::Sym("<=")) => Some(CmpOp::Le),
            Some(Tok::Sym(">")) => Some(CmpOp::Gt),
            Some(Tok::Sym(">=")) => Some(CmpOp::Ge),
            _ => None,
        };
        if op.is_some() {
            self.advance()?;
        }
        Ok(op)
    }

    fn body_item(&mut self) -> Result<BodyItem, AspError> {
        if matches!(self.peek()?, Some(Tok::Ident(w)) if w == "not") {
            self.advance()?;
            return Ok(BodyItem::Neg(self.term()?));
        }
        let lhs = self.expr()?;
        if let Some(op) = self.cmp_op()? {
            let rhs = self.expr()?;
            return Ok(BodyItem::Cmp { op, lhs, rhs });
        }
        match lhs.summands.as_slice() {
            [t] if lhs.summands.len() == 1 => Ok(BodyItem::Pos(t.clone())),
            _ => Err(self.lexer.error("arithmetic expression outside comparison")),
        }
    }

    fn rule(&mut self) -> Result<Option<Rule>, AspError> {
        if self.peek()?.is_none() {
            return Ok(None);
        }
        let head = if matches!(self.peek()?, Some(Tok::Sym(":-"))) {
            None
        } else {
            Some(self.term()?)
        };
        let mut body = Vec::new();
        if matches!(self.peek()?, Some(Tok::Sym(":-"))) {
            self.advance()?;
            loop {
                body.push(self.body_item()?);
                if matches!(self.peek()?, Some(Tok::Sym(","))) {
                    self.advance()?;
                } else {
                    break;
                }
            }
        }
        self.expect_sym(".")?;
        Ok(Some(Rule { head, body }))
    }
}

/// Parses a full program (comments and `%%` section headers are skipped).
pub fn parse_program(text: &str) -> Result<Vec<Rule>, AspError> {
    let mut parser = Parser::new(text);
    let mut rules = Vec::new();
    while let Some(r) = parser.rule()? {
        rules.push(r);
    }
    Ok(rules)
}

/// Parses one ground term, e.g. an atom printed by a solver.
pub fn parse_term(text: &str) -> Result<Term, AspError> {
    let mut parser = Parser::new(text);
    let t = parser.term()?;
    if parser.peek()?.is_some() {
        return Err(AspError::ParseError {
            line: 1,
            message: format!("trailing input after term in {text:?}"),
        });
    }
    Ok(t)
}
