//! The compact tabular view: one row per argument, one column per action
//! rank, each cell sampled at the argumentative state reached once that
//! rank's enunciations and their exogenous cascade have settled.

use crate::aaf::ArgumentId;
use crate::action::{Fluent, Time, Traces};
use crate::translate::Dialogue;

use super::action_step_times;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Accepted,
    NotAccepted,
    NotYetEnunciated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptabilityTable {
    /// Row arguments, in dialogue entry order.
    pub rows: Vec<ArgumentId>,
    /// Column labels: the arguments of each rank, joined with commas.
    pub columns: Vec<String>,
    /// Sample time of each column.
    pub sample_times: Vec<Time>,
    pub cells: Vec<Vec<Cell>>,
}

/// Samples the trace at each post-cascade argumentative state, in rank
/// order. The state sampled for a rank is the one the next rank's actions
/// fire from (quiescent by construction), or the final state for the last.
pub fn build_table(tr: &Traces, d: &Dialogue) -> AcceptabilityTable {
    let steps = action_step_times(tr);
    let groups = d.rank_groups();
    debug_assert_eq!(steps.len(), groups.len());
    let mut sample_times = Vec::with_capacity(groups.len());
    for k in 0..groups.len() {
        let sample = steps.get(k + 1).copied().unwrap_or_else(|| tr.final_time());
        sample_times.push(sample);
    }
    let rows: Vec<ArgumentId> = d.entries().iter().map(|(a, _)| a.clone()).collect();
    let columns: Vec<String> = groups
        .iter()
        .map(|(_, args)| {
            args.iter()
                .map(|a| a.as_str().to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let cells = rows
        .iter()
        .map(|x| {
            sample_times
                .iter()
                .map(|t| {
                    let s = tr.state_at(*t).expect("sample within trace");
                    if s.truth(&Fluent::Present(x.clone())) != Some(true) {
                        Cell::NotYetEnunciated
                    } else if s.truth(&Fluent::Acceptable(x.clone())) == Some(true) {
                        Cell::Accepted
                    } else {
                        Cell::NotAccepted
                    }
                })
                .collect()
        })
        .collect();
    AcceptabilityTable {
        rows,
        columns,
        sample_times,
        cells,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Unicode,
    Csv,
}

/// Renders the table. Unicode uses filled/open circles and a shaded blank;
/// CSV uses `1`/`0`/`-` with RFC-4180 quoting for labels.
pub fn render_table_text(t: &AcceptabilityTable, format: TableFormat) -> String {
    match format {
        TableFormat::Unicode => render_unicode(t),
        TableFormat::Csv => render_csv(t),
    }
}

fn render_unicode(t: &AcceptabilityTable) -> String {
    let row_head_width = t
        .rows
        .iter()
        .map(|a| a.as_str().chars().count())
        .max()
        .unwrap_or(0);
    let col_widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count().max(1)).collect();
    let mut out = String::new();
    out.push_str(&" ".repeat(row_head_width));
    for (label, w) in t.columns.iter().zip(&col_widths) {
        out.push_str(" | ");
        out.push_str(&pad(label, *w));
    }
    out.push('\n');
    for (x, row) in t.rows.iter().zip(&t.cells) {
        out.push_str(&pad(x.as_str(), row_head_width));
        for (cell, w) in row.iter().zip(&col_widths) {
            out.push_str(" | ");
            let glyph = match cell {
                Cell::Accepted => "●",
                Cell::NotAccepted => "○",
                Cell::NotYetEnunciated => "░",
            };
            out.push_str(&pad(glyph, *w));
        }
        out.push('\n');
    }
    out
}

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    let mut out = s.to_string();
    for _ in len..width {
        out.push(' ');
    }
    out
}

fn render_csv(t: &AcceptabilityTable) -> String {
    let mut out = String::new();
    out.push_str("argument");
    for label in &t.columns {
        out.push(',');
        out.push_str(&csv_field(label));
    }
    out.push('\n');
    for (x, row) in t.rows.iter().zip(&t.cells) {
        out.push_str(&csv_field(x.as_str()));
        for cell in row {
            out.push(',');
            out.push_str(match cell {
                Cell::Accepted => "1",
                Cell::NotAccepted => "0",
                Cell::NotYetEnunciated => "-",
            });
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
