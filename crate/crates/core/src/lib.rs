//! Parsing and comparison of Uniform Meaning Representation (UMR) annotations.
//!
//! Two annotations of the same text are compared by first fixing a 1-1
//! correspondence between their nodes and then scoring the triples the two
//! graphs share under that correspondence. The default correspondence is
//! derived from node-to-word alignments ([`matcher`]); a triple-maximizing
//! hill-climbing search ([`smatch`]) is available for contrast.

pub mod error;
pub mod format;
pub mod graph;
pub mod matcher;
pub mod metrics;
pub mod smatch;

pub use error::{Error, Result, Warning};
pub use format::{
    parse_document, parse_document_with_warnings, parse_sentence_graph, read_document,
    serialize_document, AlignmentSpan, DocTriple, UmrDocument, UmrSentence,
};
pub use graph::{
    count_nodes_by_alignment, enhance_name_concept, Edge, Node, NodeGraph, Triple, TripleSet,
    TripleTarget,
};
pub use matcher::{match_graphs, NodeMapping};
pub use metrics::{
    compare_documents, score_documents, MatcherKind, ScoreOptions, ScoreReport, Scores,
};
pub use smatch::{hill_climb_match, SearchConfig};
