use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use serde::Serialize;

use super::scores::{
    alignment_f1, mapping_scores, partial_scores, percent, restrict_to_mapped, Scores,
};
use crate::error::{Error, Result, Warning};
use crate::format::{UmrDocument, UmrSentence};
use crate::matcher::{match_graphs, tokens_match, NodeMapping};
use crate::smatch::{hill_climb_match, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatcherKind {
    /// Word-alignment driven matching.
    Alignment,
    /// Triple-maximizing hill climbing.
    HillClimb(SearchConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScoreOptions {
    pub matcher: MatcherKind,
    pub include_doc: bool,
    /// Score only triples whose node endpoints are all mapped.
    pub mapped_only: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            matcher: MatcherKind::Alignment,
            include_doc: false,
            mapped_only: false,
        }
    }
}

impl ScoreOptions {
    pub fn map(&self, gold: &UmrSentence, pred: &UmrSentence) -> NodeMapping {
        match self.matcher {
            MatcherKind::Alignment => match_graphs(gold, pred),
            MatcherKind::HillClimb(cfg) => hill_climb_match(gold, pred, &cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScoreReport {
    pub overall: Scores,
    pub concepts: Scores,
    pub relations: Scores,
    pub attributes_by_name: BTreeMap<String, Scores>,
    pub alignment: Scores,
    pub mapping: Scores,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_level: Option<Scores>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_sentence: Vec<ScoreReport>,
}

impl ScoreReport {
    /// Scores one sentence pair under a given mapping.
    pub fn for_sentence(
        gold: &UmrSentence,
        pred: &UmrSentence,
        mapping: &NodeMapping,
        mapped_only: bool,
    ) -> ScoreReport {
        let mut gt = gold.graph.normalize_inverse_relations().extract_triples();
        let mut pt = pred.graph.normalize_inverse_relations().extract_triples();
        if mapped_only {
            let g: HashSet<&str> = mapping.pairs.iter().map(|(g, _)| g.as_str()).collect();
            let p: HashSet<&str> = mapping.pairs.iter().map(|(_, p)| p.as_str()).collect();
            gt = restrict_to_mapped(&gt, &g);
            pt = restrict_to_mapped(&pt, &p);
        }
        let cats = partial_scores(mapping, &gt, &pt);
        ScoreReport {
            overall: cats.overall,
            concepts: cats.concepts,
            relations: cats.relations,
            attributes_by_name: cats.attributes_by_name,
            alignment: alignment_f1(gold, pred),
            mapping: mapping_scores(mapping, gold.graph.node_count(), pred.graph.node_count()),
            doc_level: None,
            per_sentence: Vec::new(),
        }
    }

    /// Micro-averaged sum of several reports (their `per_sentence` lists are
    /// not carried over).
    pub fn aggregate<'a>(reports: impl IntoIterator<Item = &'a ScoreReport>) -> ScoreReport {
        let mut out = ScoreReport {
            overall: Scores::from_counts(0, 0, 0),
            concepts: Scores::from_counts(0, 0, 0),
            relations: Scores::from_counts(0, 0, 0),
            alignment: Scores::from_counts(0, 0, 0),
            mapping: Scores::from_counts(0, 0, 0),
            ..Default::default()
        };
        for r in reports {
            out.overall = out.overall.combine(&r.overall);
            out.concepts = out.concepts.combine(&r.concepts);
            out.relations = out.relations.combine(&r.relations);
            out.alignment = out.alignment.combine(&r.alignment);
            out.mapping = out.mapping.combine(&r.mapping);
            for (name, s) in &r.attributes_by_name {
                let e = out
                    .attributes_by_name
                    .entry(name.clone())
                    .or_insert_with(|| Scores::from_counts(0, 0, 0));
                *e = e.combine(s);
            }
            if let Some(d) = &r.doc_level {
                out.doc_level = Some(out.doc_level.map_or(*d, |x| x.combine(d)));
            }
        }
        out
    }

    /// Rows of `(category, scores)` in a fixed order.
    pub fn categories(&self) -> Vec<(String, Scores)> {
        let mut rows = vec![
            ("overall".to_string(), self.overall),
            ("concepts".to_string(), self.concepts),
            ("relations".to_string(), self.relations),
        ];
        for (name, s) in &self.attributes_by_name {
            rows.push((format!("attr:{name}"), *s));
        }
        rows.push(("alignment".to_string(), self.alignment));
        rows.push(("mapping".to_string(), self.mapping));
        if let Some(d) = self.doc_level {
            rows.push(("document".to_string(), d));
        }
        rows
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (name, s) in self.categories() {
            let _ = writeln!(out, "{name:<28} {s}");
        }
        out
    }

    /// Tab-separated rows, one per category, each prefixed by `prefix` columns.
    pub fn tsv_rows(&self, prefix: &[&str]) -> Vec<String> {
        self.categories()
            .into_iter()
            .map(|(name, s)| {
                let mut cols: Vec<String> = prefix.iter().map(|c| c.to_string()).collect();
                cols.extend([
                    name,
                    s.matched.to_string(),
                    s.gold_total.to_string(),
                    s.pred_total.to_string(),
                    percent(s.precision),
                    percent(s.recall),
                    percent(s.f1),
                ]);
                cols.join("\t")
            })
            .collect()
    }
}

pub const TSV_HEADER: &str = "category\tmatched\tgold\tpred\tP\tR\tF1";

/// Result of comparing two documents sentence by sentence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub report: ScoreReport,
    pub mappings: Vec<NodeMapping>,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

pub fn compare_documents(
    gold: &UmrDocument,
    pred: &UmrDocument,
    options: &ScoreOptions,
) -> Result<Comparison> {
    if gold.sentences.len() != pred.sentences.len() {
        return Err(Error::SentenceCountMismatch {
            gold: gold.sentences.len(),
            pred: pred.sentences.len(),
        });
    }
    let mut warnings = Vec::new();
    let mut mappings = Vec::with_capacity(gold.sentences.len());
    let mut per_sentence = Vec::with_capacity(gold.sentences.len());
    for (g, p) in gold.sentences.iter().zip(&pred.sentences) {
        if !tokens_match(g, p) {
            warnings.push(Warning::TokenMismatch { sentence: g.index });
        }
        let m = options.map(g, p);
        per_sentence.push(ScoreReport::for_sentence(g, p, &m, options.mapped_only));
        mappings.push(m);
    }
    let mut report = ScoreReport::aggregate(&per_sentence);
    report.per_sentence = per_sentence;
    if options.include_doc {
        report.doc_level = Some(doc_level_scores(gold, pred, &mappings));
    }
    Ok(Comparison {
        report,
        mappings,
        warnings,
    })
}

pub fn score_documents(
    gold: &UmrDocument,
    pred: &UmrDocument,
    options: &ScoreOptions,
) -> Result<ScoreReport> {
    compare_documents(gold, pred, options).map(|c| c.report)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Endpoint {
    Node(String),
    Const(String),
}

/// Document-level triples, with endpoints renamed through the union of the
/// sentence mappings. Anything that is not a variable of the document is a
/// constant and maps to itself.
pub fn doc_level_scores(
    gold: &UmrDocument,
    pred: &UmrDocument,
    mappings: &[NodeMapping],
) -> Scores {
    let gold_vars: HashSet<&str> = gold
        .sentences
        .iter()
        .flat_map(|s| s.graph.nodes().map(|n| n.var.as_str()))
        .collect();
    let pred_vars: HashSet<&str> = pred
        .sentences
        .iter()
        .flat_map(|s| s.graph.nodes().map(|n| n.var.as_str()))
        .collect();
    let mut p2g: HashMap<&str, &str> = HashMap::new();
    for m in mappings {
        for (g, p) in &m.pairs {
            p2g.entry(p.as_str()).or_insert(g.as_str());
        }
    }

    let gold_end = |x: &str| {
        if gold_vars.contains(x) {
            Endpoint::Node(x.to_string())
        } else {
            Endpoint::Const(x.to_string())
        }
    };
    let pred_end = |x: &str| -> Option<Endpoint> {
        if pred_vars.contains(x) {
            p2g.get(x).map(|g| Endpoint::Node(g.to_string()))
        } else {
            Some(Endpoint::Const(x.to_string()))
        }
    };

    let mut available: HashMap<(Endpoint, &str, Endpoint), usize> = HashMap::new();
    let mut gold_total = 0;
    for t in gold.sentences.iter().flat_map(|s| &s.doc_triples) {
        gold_total += 1;
        *available
            .entry((gold_end(&t.source), t.label.as_str(), gold_end(&t.target)))
            .or_default() += 1;
    }
    let mut matched = 0;
    let mut pred_total = 0;
    for t in pred.sentences.iter().flat_map(|s| &s.doc_triples) {
        pred_total += 1;
        let (Some(a), Some(b)) = (pred_end(&t.source), pred_end(&t.target)) else {
            continue;
        };
        if let Some(n) = available.get_mut(&(a, t.label.as_str(), b)) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    Scores::from_counts(matched, gold_total, pred_total)
}
