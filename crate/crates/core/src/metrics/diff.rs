//! Side-by-side listing of a node mapping and the triples it fails to match.

use std::collections::HashMap;
use std::fmt::Write;

use serde::Serialize;

use crate::format::UmrSentence;
use crate::graph::{rename_triple, Triple, TripleSet};
use crate::matcher::NodeMapping;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeLabel {
    pub var: String,
    pub concept: String,
    /// Aligned words, space-joined; `None` for unaligned nodes.
    pub words: Option<String>,
}

impl NodeLabel {
    fn of(s: &UmrSentence, var: &str) -> NodeLabel {
        let concept = s
            .graph
            .node(var)
            .map(|n| n.concept.clone())
            .unwrap_or_default();
        let span = s.alignment_of(var);
        NodeLabel {
            var: var.to_string(),
            concept,
            words: (!span.is_empty()).then(|| s.words(&span)),
        }
    }

    fn render(&self) -> String {
        match &self.words {
            Some(w) => format!("{} / {} (\"{}\")", self.var, self.concept, w),
            None => format!("{} / {}", self.var, self.concept),
        }
    }
}

/// One mapping line; a missing side is rendered as `UNMAPPED`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffLine {
    pub gold: Option<NodeLabel>,
    pub pred: Option<NodeLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Concept,
    Attribute,
    Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    GoldOnly,
    PredOnly,
}

/// A triple present on one side only, in that side's own variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub category: Category,
    pub side: Side,
    pub triple: Triple,
    /// Mapped partner of the triple's source node, if any.
    pub partner: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub sentence: usize,
    pub lines: Vec<DiffLine>,
    pub mismatches: Vec<Mismatch>,
}

fn categorized(set: &TripleSet) -> Vec<(Category, &Triple)> {
    set.concepts
        .iter()
        .map(|t| (Category::Concept, t))
        .chain(set.attributes.iter().map(|t| (Category::Attribute, t)))
        .chain(set.relations.iter().map(|t| (Category::Relation, t)))
        .collect()
}

pub fn render_diff(mapping: &NodeMapping, gold: &UmrSentence, pred: &UmrSentence) -> DiffReport {
    let mut lines = Vec::new();
    let g2p = mapping.gold_to_pred();
    let p2g = mapping.pred_to_gold();
    for n in gold.graph.nodes() {
        lines.push(DiffLine {
            gold: Some(NodeLabel::of(gold, &n.var)),
            pred: g2p.get(n.var.as_str()).map(|p| NodeLabel::of(pred, p)),
        });
    }
    for n in pred.graph.nodes() {
        if !p2g.contains_key(n.var.as_str()) {
            lines.push(DiffLine {
                gold: None,
                pred: Some(NodeLabel::of(pred, &n.var)),
            });
        }
    }

    let gt = gold.graph.normalize_inverse_relations().extract_triples();
    let pt = pred.graph.normalize_inverse_relations().extract_triples();
    let gold_items = categorized(&gt);
    let pred_items = categorized(&pt);

    let mut available: HashMap<&Triple, Vec<usize>> = HashMap::new();
    for (i, (_, t)) in gold_items.iter().enumerate().rev() {
        available.entry(t).or_default().push(i);
    }
    let mut gold_matched = vec![false; gold_items.len()];
    let mut mismatches = Vec::new();
    for (cat, t) in &pred_items {
        let hit = rename_triple(t, &p2g).and_then(|r| available.get_mut(&r).and_then(Vec::pop));
        match hit {
            Some(i) => gold_matched[i] = true,
            None => mismatches.push(Mismatch {
                category: *cat,
                side: Side::PredOnly,
                triple: (*t).clone(),
                partner: p2g.get(t.source.as_str()).map(|s| s.to_string()),
            }),
        }
    }
    for (i, (cat, t)) in gold_items.iter().enumerate() {
        if !gold_matched[i] {
            mismatches.push(Mismatch {
                category: *cat,
                side: Side::GoldOnly,
                triple: (*t).clone(),
                partner: g2p.get(t.source.as_str()).map(|s| s.to_string()),
            });
        }
    }
    mismatches.sort_by_key(|m| (m.category, m.side));

    DiffReport {
        sentence: gold.index,
        lines,
        mismatches,
    }
}

impl DiffReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentence {}", self.sentence);
        for l in &self.lines {
            let side = |x: &Option<NodeLabel>| {
                x.as_ref().map_or("UNMAPPED".to_string(), NodeLabel::render)
            };
            let _ = writeln!(out, "  {} ... {}", side(&l.gold), side(&l.pred));
        }
        let n = self.mismatches.len();
        let _ = writeln!(
            out,
            "  {n} {}",
            if n == 1 { "mismatch" } else { "mismatches" }
        );
        let mut current = None;
        for m in &self.mismatches {
            if current != Some(m.category) {
                current = Some(m.category);
                let name = match m.category {
                    Category::Concept => "concepts",
                    Category::Attribute => "attributes",
                    Category::Relation => "relations",
                };
                let _ = writeln!(out, "  {name}:");
            }
            let sign = match m.side {
                Side::GoldOnly => '-',
                Side::PredOnly => '+',
            };
            let partner = m
                .partner
                .as_ref()
                .map_or(" (source unmapped)".to_string(), |p| {
                    format!(" (source mapped to {p})")
                });
            let _ = writeln!(
                out,
                "    {sign} ({} :{} {}){partner}",
                m.triple.source,
                m.triple.label,
                m.triple.target.text()
            );
        }
        out
    }
}
