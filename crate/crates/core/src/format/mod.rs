//! Reading and writing UMR document files.
//!
//! A file is a sequence of sentence blocks. Each block carries the surface
//! tokens, a sentence-level graph, a node-to-token alignment block and an
//! optional document-level annotation block:
//!
//! ```text
//! # :: snt1
//! Index: 1 2 3
//! Words: Dear readers ,
//!
//! # sentence level graph:
//! (s1p / person :refer-number plural)
//!
//! # alignment:
//! s1p: 1-2
//!
//! # document level annotation:
//! (s1s0 / sentence :coref ((s1p :same-entity s1p)))
//! ```

mod parse;
mod serialize;
pub mod sexpr;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::graph::NodeGraph;

pub use parse::{parse_document, parse_document_with_warnings, parse_sentence_graph};
pub use serialize::{serialize_document, serialize_graph};

/// Token constants that may appear in document-level triples without
/// being variables of any sentence.
pub const RESERVED_DOC_CONSTANTS: &[&str] = &["document-creation-time", "root", "author"];

/// Set of 1-based token positions a node is aligned to. Empty = unaligned.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AlignmentSpan(BTreeSet<usize>);

impl AlignmentSpan {
    pub fn new(positions: impl IntoIterator<Item = usize>) -> Self {
        AlignmentSpan(positions.into_iter().filter(|&p| p > 0).collect())
    }

    pub fn unaligned() -> Self {
        AlignmentSpan::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.0.contains(&position)
    }

    pub fn intersection(&self, other: &AlignmentSpan) -> AlignmentSpan {
        AlignmentSpan(self.0.intersection(&other.0).copied().collect())
    }

    /// Maximal runs of consecutive positions as inclusive `(start, end)` pairs.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for p in self.positions() {
            match out.last_mut() {
                Some((_, end)) if *end + 1 == p => *end = p,
                _ => out.push((p, p)),
            }
        }
        out
    }
}

impl fmt::Display for AlignmentSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0-0");
        }
        let parts: Vec<String> = self
            .ranges()
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Error text for a malformed span; the caller attaches the location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanSyntax(pub String);

impl FromStr for AlignmentSpan {
    type Err = SpanSyntax;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut positions = BTreeSet::new();
        for part in s.split(',') {
            let part = part.trim();
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| SpanSyntax(format!("expected `start-end`, found `{part}`")))?;
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| SpanSyntax(format!("bad token index `{a}`")))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| SpanSyntax(format!("bad token index `{b}`")))?;
            if (a == 0) != (b == 0) || a > b {
                return Err(SpanSyntax(format!("invalid range `{part}`")));
            }
            if a > 0 {
                positions.extend(a..=b);
            }
        }
        Ok(AlignmentSpan(positions))
    }
}

/// A document-level relation such as `(s1e :before s2e)` inside `:temporal`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DocTriple {
    pub source: String,
    pub label: String,
    pub target: String,
    /// The list it was found in: `temporal`, `coref`, `modal`, ...
    pub group: String,
}

impl DocTriple {
    pub fn new(
        group: impl Into<String>,
        source: impl Into<String>,
        label: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        DocTriple {
            source: source.into(),
            label: label.into(),
            target: target.into(),
            group: group.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UmrSentence {
    pub index: usize,
    pub tokens: Vec<String>,
    pub graph: NodeGraph,
    pub alignments: BTreeMap<String, AlignmentSpan>,
    /// Variable of the document-level pseudo-node (`s1s0 / sentence`), when present.
    pub doc_var: Option<String>,
    pub doc_triples: Vec<DocTriple>,
    /// Unrecognized header and comment lines, kept verbatim.
    pub metadata: Vec<String>,
}

impl UmrSentence {
    pub fn new(index: usize, tokens: Vec<String>, graph: NodeGraph) -> Self {
        UmrSentence {
            index,
            tokens,
            graph,
            alignments: BTreeMap::new(),
            doc_var: None,
            doc_triples: Vec::new(),
            metadata: Vec::new(),
        }
    }

    /// Alignment of `var`; unaligned and unknown variables yield an empty span.
    pub fn alignment_of(&self, var: &str) -> AlignmentSpan {
        self.alignments.get(var).cloned().unwrap_or_default()
    }

    /// Tokens at the given positions, space-joined.
    pub fn words(&self, span: &AlignmentSpan) -> String {
        span.positions()
            .filter_map(|p| self.tokens.get(p - 1).map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UmrDocument {
    pub doc_id: String,
    pub sentences: Vec<UmrSentence>,
    /// Where the document was read from; diagnostic only.
    pub source_path: String,
}

impl UmrDocument {
    pub fn node_count(&self) -> usize {
        self.sentences.iter().map(|s| s.graph.node_count()).sum()
    }

    /// Checks the document-wide invariants that parsing guarantees.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.sentences.iter().enumerate() {
            if s.index != i + 1 {
                return Err(Error::SentenceIndex {
                    expected: i + 1,
                    found: s.index,
                    line: 0,
                });
            }
            for (var, span) in &s.alignments {
                if !s.graph.contains(var) {
                    return Err(Error::MisalignedIndex {
                        var: var.clone(),
                        line: 0,
                    });
                }
                if let Some(p) = span.positions().find(|&p| p > s.tokens.len()) {
                    return Err(Error::TokenOutOfRange {
                        var: var.clone(),
                        position: p,
                        token_count: s.tokens.len(),
                        line: 0,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Reads and parses a file. The document id is the file stem.
pub fn read_document(path: &Path) -> Result<(UmrDocument, Vec<Warning>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })?;
    let (mut doc, warnings) = parse_document_with_warnings(&text)?;
    doc.doc_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    doc.source_path = path.display().to_string();
    Ok((doc, warnings))
}
