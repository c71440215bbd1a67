//! Graphviz DOT output for timeline graphs, plus a checker for the DOT
//! subset we emit so round-trips can be asserted in tests.

use std::fmt::Write as _;

use crate::action::{EventId, Time};
use crate::causality::CauseKind;

use super::timeline::{NodeRef, TimelineGraph};

fn event_node_id(t: Time, e: &EventId) -> String {
    // DOT identifiers must stay alphanumeric; indexes are resolved against
    // the sorted event list of the step.
    format!("ev_{}_{}", time_token(t), mangle(&e.to_string()))
}

fn fluent_node_id(t: Time, arg: &str) -> String {
    format!("fl_{}_{arg}", time_token(t))
}

fn time_token(t: Time) -> String {
    if t < 0 {
        format!("m{}", -t)
    } else {
        t.to_string()
    }
}

fn mangle(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn short_event_label(e: &EventId) -> String {
    match e {
        EventId::Enunciate(x) => format!("enu_{x}"),
        EventId::MakesUnacc(y, x) => format!("una_{y},{x}"),
        EventId::MakesAcc(x) => format!("acc_{x}"),
        EventId::Ini(l) => format!("ini_{l}"),
    }
}

fn edge_attrs(kind: CauseKind) -> &'static str {
    match kind {
        CauseKind::DirectNess => "style=bold",
        CauseKind::Ness => "style=dashed",
        CauseKind::Actual => "style=dotted",
    }
}

fn node_ref_id(r: &NodeRef) -> String {
    match r {
        NodeRef::Event { time, event } => event_node_id(*time, event),
        NodeRef::Fluent { time, argument } => fluent_node_id(*time, argument.as_str()),
    }
}

/// Valid DOT text: hexagons for fluents, boxes for events, one cluster per
/// time point, causal edges styled by kind, and a legend subgraph.
pub fn render_dot(g: &TimelineGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph timeline {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    for (t, nodes) in &g.states {
        let _ = writeln!(out, "  subgraph cluster_t{} {{", time_token(*t));
        let _ = writeln!(out, "    label={};", quote(&format!("t={t}")));
        let _ = writeln!(out, "    anchor_{} [style=invis, shape=point];", time_token(*t));
        for n in nodes {
            let style = if n.negated {
                ", color=gray60, fontcolor=gray60"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "    {} [label={}, shape=hexagon{}];",
                fluent_node_id(*t, n.argument.as_str()),
                quote(n.argument.as_str()),
                style
            );
        }
        out.push_str("  }\n");
    }
    for (t, e) in &g.events {
        let _ = writeln!(
            out,
            "  {} [label={}, shape=box];",
            event_node_id(*t, e),
            quote(&short_event_label(e))
        );
    }
    // Temporal edges: state anchor -> event -> next state anchor.
    for (t, e) in &g.events {
        if g.states.iter().any(|(u, _)| u == t) {
            let _ = writeln!(
                out,
                "  anchor_{} -> {} [style=invis];",
                time_token(*t),
                event_node_id(*t, e)
            );
        }
        if g.states.iter().any(|(u, _)| *u == t + 1) {
            let _ = writeln!(
                out,
                "  {} -> anchor_{} [style=invis];",
                event_node_id(*t, e),
                time_token(t + 1)
            );
        }
    }
    for (kind, from, to) in &g.causal {
        let _ = writeln!(
            out,
            "  {} -> {} [{}];",
            node_ref_id(from),
            node_ref_id(to),
            edge_attrs(*kind)
        );
    }
    out.push_str("  subgraph cluster_legend {\n");
    out.push_str("    label=\"causal edges\";\n");
    for (kind, name) in [
        (CauseKind::DirectNess, "direct"),
        (CauseKind::Ness, "ness"),
        (CauseKind::Actual, "actual"),
    ] {
        let _ = writeln!(
            out,
            "    legend_{name}_a [shape=point]; legend_{name}_b [shape=point];"
        );
        let _ = writeln!(
            out,
            "    legend_{name}_a -> legend_{name}_b [label={}, {}];",
            quote(name),
            edge_attrs(kind)
        );
    }
    out.push_str("  }\n");
    out.push_str("}\n");
    out
}

/// Checks text against the DOT subset this module emits: a `digraph`
/// with nested subgraphs, node statements with bracketed attributes, and
/// edge statements. Returns the first problem found.
pub fn check_dot(text: &str) -> Result<(), String> {
    let mut tokens = tokenize(text)?;
    tokens.reverse(); // pop from the back
    expect_word(&mut tokens, "digraph")?;
    let _name = expect_ident(&mut tokens)?;
    parse_block(&mut tokens)?;
    if let Some(t) = tokens.pop() {
        return Err(format!("trailing token {t:?}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Symbol(char),
    Arrow,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    None => return Err("unterminated string".into()),
                    Some('\\') => match chars.next() {
                        Some(e) => s.push(e),
                        None => return Err("dangling escape".into()),
                    },
                    Some('"') => break,
                    Some(other) => s.push(other),
                }
            }
            out.push(Tok::Quoted(s));
        } else if c == '-' {
            chars.next();
            match chars.next() {
                Some('>') => out.push(Tok::Arrow),
                other => return Err(format!("expected '->', got '-{other:?}'")),
            }
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Ident(s));
        } else if "{}[];,=".contains(c) {
            chars.next();
            out.push(Tok::Symbol(c));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

fn expect_word(tokens: &mut Vec<Tok>, word: &str) -> Result<(), String> {
    match tokens.pop() {
        Some(Tok::Ident(w)) if w == word => Ok(()),
        other => Err(format!("expected {word:?}, got {other:?}")),
    }
}

fn expect_ident(tokens: &mut Vec<Tok>) -> Result<String, String> {
    match tokens.pop() {
        Some(Tok::Ident(w)) => Ok(w),
        other => Err(format!("expected identifier, got {other:?}")),
    }
}

fn expect_symbol(tokens: &mut Vec<Tok>, sym: char) -> Result<(), String> {
    match tokens.pop() {
        Some(Tok::Symbol(c)) if c == sym => Ok(()),
        other => Err(format!("expected {sym:?}, got {other:?}")),
    }
}

fn parse_block(tokens: &mut Vec<Tok>) -> Result<(), String> {
    expect_symbol(tokens, '{')?;
    loop {
        match tokens.last() {
            None => return Err("unterminated block".into()),
            Some(Tok::Symbol('}')) => {
                tokens.pop();
                return Ok(());
            }
            Some(Tok::Ident(w)) if w == "subgraph" => {
                tokens.pop();
                let _name = expect_ident(tokens)?;
                parse_block(tokens)?;
            }
            _ => parse_statement(tokens)?,
        }
    }
}

/// node [attrs]; | a -> b [attrs]; | key=value;
fn parse_statement(tokens: &mut Vec<Tok>) -> Result<(), String> {
    let first = expect_ident(tokens)?;
    match tokens.last() {
        Some(Tok::Symbol('=')) => {
            tokens.pop();
            match tokens.pop() {
                Some(Tok::Ident(_)) | Some(Tok::Quoted(_)) => {}
                other => return Err(format!("bad attribute value after {first}: {other:?}")),
            }
        }
        _ => {
            if let Some(Tok::Arrow) = tokens.last() {
                tokens.pop();
                expect_ident(tokens)?;
            }
            if let Some(Tok::Symbol('[')) = tokens.last() {
                parse_attr_list(tokens)?;
            }
        }
    }
    expect_symbol(tokens, ';')
}

fn parse_attr_list(tokens: &mut Vec<Tok>) -> Result<(), String> {
    expect_symbol(tokens, '[')?;
    loop {
        match tokens.pop() {
            Some(Tok::Symbol(']')) => return Ok(()),
            Some(Tok::Ident(_key)) => {
                expect_symbol(tokens, '=')?;
                match tokens.pop() {
                    Some(Tok::Ident(_)) | Some(Tok::Quoted(_)) => {}
                    other => return Err(format!("bad attribute value: {other:?}")),
                }
                if let Some(Tok::Symbol(',')) = tokens.last() {
                    tokens.pop();
                }
            }
            other => return Err(format!("bad attribute list item: {other:?}")),
        }
    }
}
