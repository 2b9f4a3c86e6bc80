//! Triple scores, partial metrics, mapping coverage and diffs.

mod diff;
mod report;
mod scores;

pub use diff::{render_diff, Category, DiffLine, DiffReport, Mismatch, NodeLabel, Side};
pub use report::{
    compare_documents, doc_level_scores, score_documents, Comparison, MatcherKind, ScoreOptions,
    ScoreReport, TSV_HEADER,
};
pub use scores::{
    alignment_f1, corpus_stats, mapping_scores, mapping_scores_from_counts, partial_scores,
    percent, score_triples, CategoryScores, CorpusStats, Scores,
};
