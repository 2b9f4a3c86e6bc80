use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::format::{AlignmentSpan, UmrDocument, UmrSentence};
use crate::graph::{count_matches, count_nodes_by_alignment, Triple, TripleSet, TripleTarget};
use crate::matcher::NodeMapping;

/// Precision, recall and F1 with the counts they come from.
///
/// An empty denominator gives 1 (nothing was expected, nothing was missed).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub gold_total: usize,
    pub pred_total: usize,
}

impl Scores {
    pub fn from_counts(matched: usize, gold_total: usize, pred_total: usize) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 1.0 } else { n as f64 / d as f64 };
        let precision = ratio(matched, pred_total);
        let recall = ratio(matched, gold_total);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Scores {
            precision,
            recall,
            f1,
            matched,
            gold_total,
            pred_total,
        }
    }

    /// Micro-average: counts are summed, then the ratios recomputed.
    pub fn combine(&self, other: &Scores) -> Scores {
        Scores::from_counts(
            self.matched + other.matched,
            self.gold_total + other.gold_total,
            self.pred_total + other.pred_total,
        )
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Scores>) -> Scores {
        items
            .into_iter()
            .fold(Scores::from_counts(0, 0, 0), |acc, s| acc.combine(s))
    }

    /// Roles swapped: precision and recall trade places.
    pub fn swapped(&self) -> Scores {
        Scores::from_counts(self.matched, self.pred_total, self.gold_total)
    }
}

/// Percentage with two decimals, e.g. `77.08`.
pub fn percent(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

impl fmt::Display for Scores {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P = {}  R = {}  F1 = {}  (matched {}, gold {}, pred {})",
            percent(self.precision),
            percent(self.recall),
            percent(self.f1),
            self.matched,
            self.gold_total,
            self.pred_total
        )
    }
}

/// Overall triple scores under `mapping`.
pub fn score_triples(mapping: &NodeMapping, gold: &TripleSet, pred: &TripleSet) -> Scores {
    let c = partial_scores(mapping, gold, pred);
    c.overall
}

/// Scores per category; `overall` is their sum.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CategoryScores {
    pub overall: Scores,
    pub concepts: Scores,
    pub relations: Scores,
    pub attributes_by_name: BTreeMap<String, Scores>,
}

fn scores_of(gold: &[Triple], pred: &[Triple], p2g: &HashMap<&str, &str>) -> Scores {
    Scores::from_counts(count_matches(gold, pred, p2g), gold.len(), pred.len())
}

pub fn partial_scores(mapping: &NodeMapping, gold: &TripleSet, pred: &TripleSet) -> CategoryScores {
    let p2g = mapping.pred_to_gold();
    let concepts = scores_of(&gold.concepts, &pred.concepts, &p2g);
    let relations = scores_of(&gold.relations, &pred.relations, &p2g);

    let mut by_name: BTreeMap<&str, (Vec<Triple>, Vec<Triple>)> = BTreeMap::new();
    for t in &gold.attributes {
        by_name.entry(&t.label).or_default().0.push(t.clone());
    }
    for t in &pred.attributes {
        by_name.entry(&t.label).or_default().1.push(t.clone());
    }
    let attributes_by_name: BTreeMap<String, Scores> = by_name
        .into_iter()
        .map(|(name, (g, p))| (name.to_string(), scores_of(&g, &p, &p2g)))
        .collect();

    let overall = Scores::sum(
        [concepts, relations]
            .iter()
            .chain(attributes_by_name.values()),
    );
    CategoryScores {
        overall,
        concepts,
        relations,
        attributes_by_name,
    }
}

/// Coverage of the mapping: matched = pairs, totals = node counts.
pub fn mapping_scores(mapping: &NodeMapping, n_gold: usize, n_pred: usize) -> Scores {
    mapping_scores_from_counts(mapping.len(), n_gold, n_pred)
}

pub fn mapping_scores_from_counts(pairs: usize, n_gold: usize, n_pred: usize) -> Scores {
    Scores::from_counts(pairs, n_gold, n_pred)
}

/// Compares the multisets of non-empty node alignments of two sentences.
pub fn alignment_f1(gold: &UmrSentence, pred: &UmrSentence) -> Scores {
    let spans = |s: &UmrSentence| -> Vec<AlignmentSpan> {
        s.graph
            .nodes()
            .map(|n| s.alignment_of(&n.var))
            .filter(|a| !a.is_empty())
            .collect()
    };
    let gold_spans = spans(gold);
    let pred_spans = spans(pred);
    let mut available: HashMap<&AlignmentSpan, usize> = HashMap::new();
    for s in &gold_spans {
        *available.entry(s).or_default() += 1;
    }
    let mut matched = 0;
    for s in &pred_spans {
        if let Some(n) = available.get_mut(s) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    Scores::from_counts(matched, gold_spans.len(), pred_spans.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CorpusStats {
    pub total_nodes: usize,
    pub aligned: usize,
    pub unaligned: usize,
    pub aligned_pct: f64,
    pub unaligned_pct: f64,
}

impl CorpusStats {
    pub fn from_counts(aligned: usize, unaligned: usize) -> Self {
        let total = aligned + unaligned;
        let pct = |n: usize| {
            if total == 0 {
                0.0
            } else {
                n as f64 / total as f64
            }
        };
        CorpusStats {
            total_nodes: total,
            aligned,
            unaligned,
            aligned_pct: pct(aligned),
            unaligned_pct: pct(unaligned),
        }
    }

    pub fn combine(&self, other: &CorpusStats) -> CorpusStats {
        CorpusStats::from_counts(
            self.aligned + other.aligned,
            self.unaligned + other.unaligned,
        )
    }
}

pub fn corpus_stats<'a>(docs: impl IntoIterator<Item = &'a UmrDocument>) -> CorpusStats {
    docs.into_iter()
        .map(|d| {
            let (a, u) = count_nodes_by_alignment(d);
            CorpusStats::from_counts(a, u)
        })
        .fold(CorpusStats::default(), |acc, s| acc.combine(&s))
}

/// Keeps only triples whose node endpoints are all in `mapped`.
pub(crate) fn restrict_to_mapped(
    set: &TripleSet,
    mapped: &std::collections::HashSet<&str>,
) -> TripleSet {
    let keep = |t: &&Triple| {
        mapped.contains(t.source.as_str())
            && match &t.target {
                TripleTarget::Node(v) => mapped.contains(v.as_str()),
                _ => true,
            }
    };
    TripleSet {
        concepts: set.concepts.iter().filter(keep).cloned().collect(),
        attributes: set.attributes.iter().filter(keep).cloned().collect(),
        relations: set.relations.iter().filter(keep).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Node, NodeGraph};

    #[test]
    fn formula_arithmetic() {
        let s = Scores::from_counts(3, 4, 5);
        assert_eq!(s.precision, 0.6);
        assert_eq!(s.recall, 0.75);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_denominators() {
        let s = Scores::from_counts(0, 0, 0);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = Scores::from_counts(0, 3, 0);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 0.0, 0.0));
        let s = Scores::from_counts(0, 3, 2);
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn mapping_coverage_renders_like_the_reported_figures() {
        let s = mapping_scores_from_counts(1157, 1675, 1501);
        assert_eq!(percent(s.precision), "77.08");
        assert_eq!(percent(s.recall), "69.07");
    }

    #[test]
    fn micro_average() {
        let a = Scores::from_counts(3, 4, 5);
        let b = Scores::from_counts(1, 2, 2);
        let s = a.combine(&b);
        assert_eq!(s.precision, 4.0 / 7.0);
        assert_eq!(s.recall, 4.0 / 6.0);
    }

    fn sentence(spans: &[&[usize]]) -> UmrSentence {
        let nodes = (0..spans.len())
            .map(|i| Node::new(format!("n{i}"), "x"))
            .collect();
        let mut s = UmrSentence::new(
            1,
            vec!["t".into(); 6],
            NodeGraph::from_parts(1, nodes, vec![]),
        );
        for (i, sp) in spans.iter().enumerate() {
            s.alignments
                .insert(format!("n{i}"), AlignmentSpan::new(sp.iter().copied()));
        }
        s
    }

    #[test]
    fn alignment_sets_must_be_identical() {
        let g = sentence(&[&[1, 2], &[3]]);
        let p = sentence(&[&[1, 2], &[4]]);
        let s = alignment_f1(&g, &p);
        assert_eq!((s.matched, s.precision, s.recall), (1, 0.5, 0.5));
        let s = alignment_f1(&g, &g);
        assert_eq!((s.precision, s.recall), (1.0, 1.0));
        // unaligned nodes do not contribute
        let s = alignment_f1(&sentence(&[&[1], &[]]), &sentence(&[&[1]]));
        assert_eq!((s.gold_total, s.pred_total, s.matched), (1, 1, 1));
    }

    #[test]
    fn attribute_names_are_scored_separately() {
        let g = NodeGraph::from_parts(
            1,
            vec![Node::new("a", "x")
                .with_attr("aspect", "state")
                .with_attr("refer-number", "plural")],
            vec![],
        );
        let p = NodeGraph::from_parts(
            1,
            vec![Node::new("b", "x")
                .with_attr("aspect", "activity")
                .with_attr("refer-number", "plural")],
            vec![],
        );
        let m = NodeMapping::from_pairs(vec![("a".into(), "b".into())], &g, &p);
        let c = partial_scores(&m, &g.extract_triples(), &p.extract_triples());
        assert_eq!(c.attributes_by_name["aspect"].matched, 0);
        assert_eq!(c.attributes_by_name["refer-number"].matched, 1);
        assert_eq!(c.concepts.matched, 1);
        assert_eq!(c.overall.matched, 2);
        assert_eq!(c.overall.gold_total, 3);
    }

    #[test]
    fn corpus_percentages() {
        let s = CorpusStats::from_counts(6, 4);
        assert_eq!(
            (s.total_nodes, s.aligned_pct, s.unaligned_pct),
            (10, 0.6, 0.4)
        );
        let s = CorpusStats::from_counts(5, 0);
        assert_eq!((s.aligned_pct, s.unaligned_pct), (1.0, 0.0));
    }
}
