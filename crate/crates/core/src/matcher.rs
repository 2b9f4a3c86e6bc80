//! Alignment-driven node matching.
//!
//! Nodes of two annotations become candidates for each other when their word
//! alignments overlap. Many-to-many candidates are reduced to a 1-1 mapping
//! by accepting candidate pairs in order of decreasing similarity, where
//! similarity is judged first by concept identity, then by shared attribute
//! and relation values, then by shared attribute and relation names, and
//! finally by the length of the shared words. Nodes without any alignment are
//! paired afterwards when their concepts are identical, using the same
//! ordering to resolve ambiguity.
//!
//! There is no search and no randomness: the cost is dominated by sorting the
//! candidate list.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::format::{AlignmentSpan, UmrSentence};
use crate::graph::{enhance_name_concept, Node, NodeGraph};

/// Non-negative rational number compared exactly.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        Fraction { num, den }
    }

    /// Dice coefficient `2|A∩B| / (|A|+|B|)`; zero when both sides are empty.
    pub fn dice(shared: usize, total: usize) -> Self {
        Fraction::new(2 * shared as u64, total as u64)
    }

    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    fn normalized(&self) -> (u128, u128) {
        if self.den == 0 {
            (0, 1)
        } else {
            (self.num as u128, self.den as u128)
        }
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.normalized();
        let (c, d) = other.normalized();
        (a * d).cmp(&(c * b))
    }
}

/// How similar two candidate nodes are. Compared lexicographically in field
/// order; greater means more similar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize)]
pub struct SimilarityKey {
    pub concept_equal: bool,
    /// Dice over (attribute, value) and (relation, child concept) pairs.
    pub strong: Fraction,
    /// Dice over attribute and relation names only.
    pub weak: Fraction,
    /// Characters in the shared words.
    pub word_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateEdge {
    pub gold_var: String,
    pub pred_var: String,
    pub overlap: AlignmentSpan,
    pub key: SimilarityKey,
}

impl CandidateEdge {
    fn unordered_pair(&self) -> (&str, &str) {
        if self.gold_var <= self.pred_var {
            (&self.gold_var, &self.pred_var)
        } else {
            (&self.pred_var, &self.gold_var)
        }
    }
}

/// Acceptance order: higher key first, then the variable pair rendered as
/// `(min, max)`, then `(gold, pred)`. The second criterion does not depend on
/// which side is gold, so swapping the inputs transposes the result.
pub fn acceptance_order(a: &CandidateEdge, b: &CandidateEdge) -> Ordering {
    b.key
        .cmp(&a.key)
        .then_with(|| a.unordered_pair().cmp(&b.unordered_pair()))
        .then_with(|| (&a.gold_var, &a.pred_var).cmp(&(&b.gold_var, &b.pred_var)))
}

/// A partial 1-1 correspondence between the nodes of two graphs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct NodeMapping {
    /// `(gold, pred)` pairs in gold definition order.
    pub pairs: Vec<(String, String)>,
    pub unmapped_gold: Vec<String>,
    pub unmapped_pred: Vec<String>,
}

impl NodeMapping {
    /// Completes a pair list with the nodes it leaves out. Pairs are put in
    /// gold definition order.
    pub fn from_pairs(
        mut pairs: Vec<(String, String)>,
        gold: &NodeGraph,
        pred: &NodeGraph,
    ) -> Self {
        pairs.sort_by_key(|(g, _)| gold.node_index(g).unwrap_or(usize::MAX));
        let used_gold: HashSet<&str> = pairs.iter().map(|(g, _)| g.as_str()).collect();
        let used_pred: HashSet<&str> = pairs.iter().map(|(_, p)| p.as_str()).collect();
        let unmapped_gold = gold
            .nodes()
            .filter(|n| !used_gold.contains(n.var.as_str()))
            .map(|n| n.var.clone())
            .collect();
        let unmapped_pred = pred
            .nodes()
            .filter(|n| !used_pred.contains(n.var.as_str()))
            .map(|n| n.var.clone())
            .collect();
        NodeMapping {
            pairs,
            unmapped_gold,
            unmapped_pred,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn gold_to_pred(&self) -> HashMap<&str, &str> {
        self.pairs
            .iter()
            .map(|(g, p)| (g.as_str(), p.as_str()))
            .collect()
    }

    pub fn pred_to_gold(&self) -> HashMap<&str, &str> {
        self.pairs
            .iter()
            .map(|(g, p)| (p.as_str(), g.as_str()))
            .collect()
    }

    pub fn contains_pair(&self, gold: &str, pred: &str) -> bool {
        self.pairs.iter().any(|(g, p)| g == gold && p == pred)
    }

    /// The same mapping seen from the other side.
    pub fn transpose(&self) -> NodeMapping {
        NodeMapping {
            pairs: self
                .pairs
                .iter()
                .map(|(g, p)| (p.clone(), g.clone()))
                .collect(),
            unmapped_gold: self.unmapped_pred.clone(),
            unmapped_pred: self.unmapped_gold.clone(),
        }
    }

    /// Pairs as a sorted list, convenient for order-insensitive comparison.
    pub fn sorted_pairs(&self) -> Vec<(String, String)> {
        let mut p = self.pairs.clone();
        p.sort();
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Feature<'a> {
    Attr(&'a str, &'a str),
    Rel(&'a str, String),
}

/// Multisets describing one node for the similarity cascade.
#[derive(Debug, Default)]
struct NodeFeatures<'a> {
    strong: HashMap<Feature<'a>, usize>,
    strong_len: usize,
    weak: HashMap<&'a str, usize>,
    weak_len: usize,
}

fn node_features<'a>(node: &'a Node, graph: &'a NodeGraph) -> NodeFeatures<'a> {
    let mut f = NodeFeatures::default();
    for a in &node.attributes {
        *f.strong
            .entry(Feature::Attr(&a.name, &a.value))
            .or_default() += 1;
        *f.weak.entry(&a.name).or_default() += 1;
        f.strong_len += 1;
        f.weak_len += 1;
    }
    for e in graph.edges().iter().filter(|e| e.parent == node.var) {
        let child = graph.enhanced_concept(&e.child).unwrap_or_default();
        *f.strong.entry(Feature::Rel(&e.label, child)).or_default() += 1;
        *f.weak.entry(&e.label).or_default() += 1;
        f.strong_len += 1;
        f.weak_len += 1;
    }
    f
}

fn multiset_overlap<K: Eq + std::hash::Hash>(
    a: &HashMap<K, usize>,
    b: &HashMap<K, usize>,
) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .map(|(k, n)| (*n).min(large.get(k).copied().unwrap_or(0)))
        .sum()
}

fn key_from_features(
    gold_concept: &str,
    pred_concept: &str,
    gold: &NodeFeatures,
    pred: &NodeFeatures,
    word_length: usize,
) -> SimilarityKey {
    SimilarityKey {
        concept_equal: gold_concept == pred_concept,
        strong: Fraction::dice(
            multiset_overlap(&gold.strong, &pred.strong),
            gold.strong_len + pred.strong_len,
        ),
        weak: Fraction::dice(
            multiset_overlap(&gold.weak, &pred.weak),
            gold.weak_len + pred.weak_len,
        ),
        word_length,
    }
}

/// Total character count (Unicode scalar values) of the tokens at `positions`.
pub fn word_length(positions: &AlignmentSpan, tokens: &[String]) -> usize {
    positions
        .positions()
        .filter_map(|p| tokens.get(p.wrapping_sub(1)))
        .map(|t| t.chars().count())
        .sum()
}

/// Similarity of one gold node and one pred node. `gold_ctx` and `pred_ctx`
/// should be inverse-normalized; relation features look at outgoing edges.
pub fn similarity_key(
    gold_node: &Node,
    pred_node: &Node,
    gold_ctx: &NodeGraph,
    pred_ctx: &NodeGraph,
    overlap: &AlignmentSpan,
    tokens: &[String],
) -> SimilarityKey {
    key_from_features(
        &enhance_name_concept(gold_node),
        &enhance_name_concept(pred_node),
        &node_features(gold_node, gold_ctx),
        &node_features(pred_node, pred_ctx),
        word_length(overlap, tokens),
    )
}

/// Token list used for word lengths: position-wise the longer of the two
/// sentences' tokens, so the result does not depend on which side is gold.
fn reference_tokens(gold: &[String], pred: &[String]) -> Vec<String> {
    (0..gold.len().max(pred.len()))
        .map(|i| match (gold.get(i), pred.get(i)) {
            (Some(g), Some(p)) if p.chars().count() > g.chars().count() => p.clone(),
            (Some(g), _) => g.clone(),
            (None, Some(p)) => p.clone(),
            (None, None) => String::new(),
        })
        .collect()
}

/// Whether two sentences can be compared position by position without a warning.
pub fn tokens_match(gold: &UmrSentence, pred: &UmrSentence) -> bool {
    gold.tokens == pred.tokens
}

struct Prepared<'a> {
    sentence: &'a UmrSentence,
    graph: NodeGraph,
}

impl<'a> Prepared<'a> {
    fn new(sentence: &'a UmrSentence) -> Self {
        Prepared {
            sentence,
            graph: sentence.graph.normalize_inverse_relations(),
        }
    }

    fn features(&self) -> HashMap<&str, (String, NodeFeatures<'_>)> {
        self.graph
            .nodes()
            .map(|n| {
                (
                    n.var.as_str(),
                    (enhance_name_concept(n), node_features(n, &self.graph)),
                )
            })
            .collect()
    }
}

fn phase1_candidates(gold: &Prepared, pred: &Prepared) -> Vec<CandidateEdge> {
    let tokens = reference_tokens(&gold.sentence.tokens, &pred.sentence.tokens);
    let gold_feats = gold.features();
    let pred_feats = pred.features();

    // token position -> pred nodes aligned there
    let mut by_position: HashMap<usize, Vec<&str>> = HashMap::new();
    for n in pred.graph.nodes() {
        for p in pred.sentence.alignment_of(&n.var).positions() {
            by_position.entry(p).or_default().push(&n.var);
        }
    }

    let mut edges = Vec::new();
    for g in gold.graph.nodes() {
        let span = gold.sentence.alignment_of(&g.var);
        if span.is_empty() {
            continue;
        }
        let mut seen = HashSet::new();
        let mut partners: Vec<&str> = Vec::new();
        for p in span.positions() {
            for &v in by_position.get(&p).into_iter().flatten() {
                if seen.insert(v) {
                    partners.push(v);
                }
            }
        }
        partners.sort_by_key(|v| pred.graph.node_index(v));
        let (gc, gf) = &gold_feats[g.var.as_str()];
        for p in partners {
            let overlap = span.intersection(&pred.sentence.alignment_of(p));
            let (pc, pf) = &pred_feats[p];
            let key = key_from_features(gc, pc, gf, pf, word_length(&overlap, &tokens));
            edges.push(CandidateEdge {
                gold_var: g.var.clone(),
                pred_var: p.to_string(),
                overlap,
                key,
            });
        }
    }
    edges
}

/// One candidate per gold/pred node pair whose alignments intersect.
/// Unaligned nodes produce no candidates.
pub fn candidate_edges(gold: &UmrSentence, pred: &UmrSentence) -> Vec<CandidateEdge> {
    phase1_candidates(&Prepared::new(gold), &Prepared::new(pred))
}

/// Reduces candidates to a 1-1 pair list: edges are visited in
/// [`acceptance_order`] and accepted when both endpoints are still free.
pub fn symmetrize(mut candidates: Vec<CandidateEdge>) -> Vec<(String, String)> {
    candidates.sort_by(acceptance_order);
    let mut used_gold = HashSet::new();
    let mut used_pred = HashSet::new();
    let mut pairs = Vec::new();
    for c in candidates {
        if used_gold.contains(&c.gold_var) || used_pred.contains(&c.pred_var) {
            continue;
        }
        used_gold.insert(c.gold_var.clone());
        used_pred.insert(c.pred_var.clone());
        pairs.push((c.gold_var, c.pred_var));
    }
    pairs
}

fn phase2_candidates(
    gold: &Prepared,
    pred: &Prepared,
    pairs: &[(String, String)],
) -> Vec<CandidateEdge> {
    let used_gold: HashSet<&str> = pairs.iter().map(|(g, _)| g.as_str()).collect();
    let used_pred: HashSet<&str> = pairs.iter().map(|(_, p)| p.as_str()).collect();
    let gold_feats = gold.features();
    let pred_feats = pred.features();

    let free = |side: &'_ Prepared, used: &HashSet<&str>| -> Vec<String> {
        side.graph
            .nodes()
            .filter(|n| !used.contains(n.var.as_str()))
            .filter(|n| side.sentence.alignment_of(&n.var).is_empty())
            .map(|n| n.var.clone())
            .collect()
    };
    let free_gold = free(gold, &used_gold);
    let free_pred = free(pred, &used_pred);

    let mut pred_by_concept: HashMap<&str, Vec<&str>> = HashMap::new();
    for p in &free_pred {
        pred_by_concept
            .entry(pred_feats[p.as_str()].0.as_str())
            .or_default()
            .push(p);
    }

    let mut edges = Vec::new();
    for g in &free_gold {
        let (gc, gf) = &gold_feats[g.as_str()];
        for &p in pred_by_concept.get(gc.as_str()).into_iter().flatten() {
            let (pc, pf) = &pred_feats[p];
            edges.push(CandidateEdge {
                gold_var: g.clone(),
                pred_var: p.to_string(),
                overlap: AlignmentSpan::unaligned(),
                key: key_from_features(gc, pc, gf, pf, 0),
            });
        }
    }
    edges
}

/// Pairs still-unmapped unaligned nodes with identical (enhanced) concepts.
/// Returns `pairs` extended with the new pairs.
pub fn pair_unaligned(
    gold: &UmrSentence,
    pred: &UmrSentence,
    pairs: Vec<(String, String)>,
) -> Vec<(String, String)> {
    let g = Prepared::new(gold);
    let p = Prepared::new(pred);
    let mut pairs = pairs;
    let extra = symmetrize(phase2_candidates(&g, &p, &pairs));
    pairs.extend(extra);
    pairs
}

/// Full matching: overlapping-alignment candidates, symmetrization, then
/// concept pairing of unaligned nodes.
pub fn match_graphs(gold: &UmrSentence, pred: &UmrSentence) -> NodeMapping {
    let g = Prepared::new(gold);
    let p = Prepared::new(pred);
    let mut pairs = symmetrize(phase1_candidates(&g, &p));
    let extra = symmetrize(phase2_candidates(&g, &p, &pairs));
    pairs.extend(extra);
    NodeMapping::from_pairs(pairs, &gold.graph, &pred.graph)
}
