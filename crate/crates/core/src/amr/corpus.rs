//! Penman corpus files: UTF-8 text, one graph per block, blocks separated
//! by one or more blank lines, optional `# ::key value` metadata lines.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use super::{parse_penman_with, AmrGraph, ParseError, PenmanOptions};

/// One corpus block: metadata plus its graph.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    /// From `# ::id`, or synthesized `doc-N` from the block index.
    pub id: String,
    /// From `# ::snt`, when present.
    pub snt: Option<String>,
    pub graph: AmrGraph,
    /// Metadata lines other than `::id`/`::snt`, kept verbatim.
    pub extra: Vec<String>,
}

/// What to do with a block that fails to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorPolicy {
    /// Stop at the first bad block.
    #[default]
    Fail,
    /// Log a warning and keep going.
    Skip,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub on_error: ErrorPolicy,
    pub penman: PenmanOptions,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("block {index} ({id}): {source}")]
    Block {
        index: usize,
        id: String,
        #[source]
        source: ParseError,
    },
    #[error("block {index}: duplicate id `{id}`")]
    DuplicateId { index: usize, id: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_corpus_str(&text, opts)
}

pub fn load_corpus_str(text: &str, opts: &LoadOptions) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();

    for (index, block) in blocks(text).into_iter().enumerate() {
        let mut id: Option<String> = None;
        let mut snt: Option<String> = None;
        let mut extra = Vec::new();
        let mut graph_lines: Vec<&str> = Vec::new();
        for line in &block {
            if let Some(meta) = line.strip_prefix("# ::") {
                let (key, value) = match meta.split_once(char::is_whitespace) {
                    Some((k, v)) => (k, v.trim()),
                    None => (meta.trim(), ""),
                };
                match key {
                    "id" => id = Some(value.to_owned()),
                    "snt" => snt = Some(value.to_owned()),
                    _ => extra.push((*line).to_owned()),
                }
            } else if line.trim_start().starts_with('#') {
                // Plain comment, not metadata.
            } else {
                graph_lines.push(line);
            }
        }
        let id = id.unwrap_or_else(|| format!("doc-{index}"));

        if !ids.insert(id.clone()) {
            match opts.on_error {
                ErrorPolicy::Fail => return Err(CorpusError::DuplicateId { index, id }),
                ErrorPolicy::Skip => {
                    log::warn!("skipping block {index}: duplicate id `{id}`");
                    continue;
                }
            }
        }
        match parse_penman_with(&graph_lines.join("\n"), &opts.penman) {
            Ok(graph) => entries.push(CorpusEntry { id, snt, graph, extra }),
            Err(source) => match opts.on_error {
                ErrorPolicy::Fail => return Err(CorpusError::Block { index, id, source }),
                ErrorPolicy::Skip => {
                    log::warn!("skipping block {index} ({id}): {source}");
                }
            },
        }
    }
    if entries.is_empty() {
        log::warn!("corpus contains no graphs");
    }
    Ok(entries)
}

fn blocks(text: &str) -> Vec<Vec<&str>> {
    let mut out: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Render entries back into corpus text, one block per entry, with the
/// graph on a single canonical line.
pub fn write_corpus(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# ::id {}\n", e.id));
        if let Some(snt) = &e.snt {
            out.push_str(&format!("# ::snt {snt}\n"));
        }
        for line in &e.extra {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&e.graph.to_penman());
        out.push('\n');
    }
    out
}

impl fmt::Display for CorpusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} nodes)", self.id, self.graph.instances().len())
    }
}
