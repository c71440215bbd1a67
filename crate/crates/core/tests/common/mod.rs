//! Shared fixture: the 14-argument medical-imaging dialogue and its attack
//! graph, in both enunciation orders exercised by the tests.

#![allow(dead_code)]

use argtrace_core::aaf::{ArgGraph, ArgumentId};
use argtrace_core::action::{run, Setting, Traces};
use argtrace_core::translate::{build_setting, Coverage, Dialogue};

pub fn arg(s: &str) -> ArgumentId {
    ArgumentId::new(s).unwrap()
}

pub const MRI_ATTACKS: [(&str, &str); 15] = [
    ("b", "a"),
    ("h", "c"),
    ("d", "c"),
    ("i", "c"),
    ("n", "c"),
    ("h", "l"),
    ("d", "l"),
    ("i", "l"),
    ("m", "l"),
    ("e", "d"),
    ("f", "e"),
    ("g", "f"),
    ("j", "h"),
    ("k", "i"),
    ("n", "m"),
];

pub fn mri_graph() -> ArgGraph {
    let names = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n"];
    ArgGraph::new(
        names.iter().map(|s| arg(s)).collect(),
        MRI_ATTACKS
            .iter()
            .map(|(y, x)| (arg(y), arg(x)))
            .collect(),
    )
}

/// Original order: a b c d e f g {h,i} j k l m n.
pub fn mri_dialogue() -> Dialogue {
    let entries = [
        ("a", 0),
        ("b", 1),
        ("c", 2),
        ("d", 3),
        ("e", 4),
        ("f", 5),
        ("g", 6),
        ("h", 7),
        ("i", 7),
        ("j", 8),
        ("k", 9),
        ("l", 10),
        ("m", 11),
        ("n", 12),
    ];
    Dialogue::new(entries.iter().map(|(s, o)| (arg(s), *o)).collect()).unwrap()
}

/// Reordered variant: a b c l m n d e f g {h,i} j k.
pub fn mri_dialogue_reordered() -> Dialogue {
    let entries = [
        ("a", 0),
        ("b", 1),
        ("c", 2),
        ("l", 3),
        ("m", 4),
        ("n", 5),
        ("d", 6),
        ("e", 7),
        ("f", 8),
        ("g", 9),
        ("h", 10),
        ("i", 10),
        ("j", 11),
        ("k", 12),
    ];
    Dialogue::new(entries.iter().map(|(s, o)| (arg(s), *o)).collect()).unwrap()
}

pub fn mri_setting() -> Setting {
    build_setting(&mri_dialogue(), &mri_graph(), Coverage::Full).unwrap()
}

pub fn mri_traces() -> Traces {
    run(&mri_setting()).unwrap()
}

pub fn mri_setting_reordered() -> Setting {
    build_setting(&mri_dialogue_reordered(), &mri_graph(), Coverage::Full).unwrap()
}

pub fn mri_traces_reordered() -> Traces {
    run(&mri_setting_reordered()).unwrap()
}

/// Grounded-accepted set of the fixture graph.
pub fn mri_accepted() -> Vec<&'static str> {
    vec!["b", "e", "g", "j", "k", "l", "n"]
}
