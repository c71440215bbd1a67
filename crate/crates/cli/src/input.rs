//! The dialogue file format: a JSON document declaring ranked arguments
//! and the attack relation.
//!
//! ```json
//! {
//!   "metadata": { "title": "..." },
//!   "arguments": [ { "id": "a", "rank": 0 }, ... ],
//!   "attacks": [ ["b", "a"], ... ]
//! }
//! ```

use serde::Deserialize;

use argtrace_core::aaf::{ArgGraph, ArgumentId};
use argtrace_core::translate::{Dialogue, TranslateError};

use crate::CliError;

#[derive(Debug, Deserialize)]
pub struct DialogueFile {
    #[serde(default)]
    pub metadata: Metadata,
    pub arguments: Vec<ArgumentEntry>,
    #[serde(default)]
    pub attacks: Vec<(String, String)>,
}

#[derive(Debug, Default, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub notes: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct ArgumentEntry {
    pub id: String,
    pub rank: u32,
}

pub struct LoadedInput {
    pub graph: ArgGraph,
    pub dialogue: Dialogue,
    pub title: Option<String>,
    pub notes: Option<String>,
}

pub fn load(path: &std::path::Path) -> Result<LoadedInput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::File(format!("{}: {e}", path.display())))?;
    let file: DialogueFile = serde_json::from_str(&text)
        .map_err(|e| CliError::File(format!("{}: {e}", path.display())))?;

    let mut ids = Vec::new();
    let mut entries = Vec::new();
    for a in &file.arguments {
        let id = ArgumentId::new(a.id.as_str()).map_err(TranslateError::from)?;
        ids.push(id.clone());
        entries.push((id, a.rank));
    }
    let mut attacks = Vec::new();
    for (y, x) in &file.attacks {
        attacks.push((
            ArgumentId::new(y.as_str()).map_err(TranslateError::from)?,
            ArgumentId::new(x.as_str()).map_err(TranslateError::from)?,
        ));
    }
    let graph = ArgGraph::new(ids, attacks);
    graph.validate().map_err(TranslateError::from)?;
    let dialogue = Dialogue::new(entries)?;
    Ok(LoadedInput {
        graph,
        dialogue,
        title: file.metadata.title,
        notes: file.metadata.notes,
    })
}
