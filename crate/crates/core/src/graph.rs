//! Sentence graph model and triple extraction.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::Serialize;

use crate::format::UmrDocument;

/// Label used for concept triples.
pub const INSTANCE: &str = "instance";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Attribute {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub var: String,
    pub concept: String,
    /// Annotator gloss such as `'read'`, kept without the quotes.
    pub gloss: Option<String>,
    pub attributes: Vec<Attribute>,
}

impl Node {
    pub fn new(var: impl Into<String>, concept: impl Into<String>) -> Self {
        Node {
            var: var.into(),
            concept: concept.into(),
            gloss: None,
            attributes: Vec::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push(Attribute {
            name: name.into(),
            value: value.into(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub parent: String,
    pub label: String,
    pub child: String,
}

impl Edge {
    pub fn new(
        parent: impl Into<String>,
        label: impl Into<String>,
        child: impl Into<String>,
    ) -> Self {
        Edge {
            parent: parent.into(),
            label: label.into(),
            child: child.into(),
        }
    }
}

/// One sentence's graph. Nodes keep their definition order.
///
/// Equality ignores node order and edge order: two graphs are equal when
/// they define the same nodes and the same multiset of edges.
#[derive(Debug, Clone, Default)]
pub struct NodeGraph {
    pub sentence_index: usize,
    pub root: String,
    nodes: IndexMap<String, Node>,
    edges: Vec<Edge>,
}

impl PartialEq for NodeGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.sentence_index != other.sentence_index
            || self.root != other.root
            || self.nodes != other.nodes
            || self.edges.len() != other.edges.len()
        {
            return false;
        }
        let mut a: Vec<&Edge> = self.edges.iter().collect();
        let mut b: Vec<&Edge> = other.edges.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl NodeGraph {
    /// An empty graph with no root. Useful as a stand-in for a missing parse.
    pub fn empty(sentence_index: usize) -> Self {
        NodeGraph {
            sentence_index,
            ..Default::default()
        }
    }

    /// Builds a graph from parts. The first node becomes the root.
    ///
    /// Panics if an edge endpoint is not among `nodes` or a variable repeats;
    /// intended for tests and programmatic construction.
    pub fn from_parts(sentence_index: usize, nodes: Vec<Node>, edges: Vec<Edge>) -> Self {
        let root = nodes.first().map(|n| n.var.clone()).unwrap_or_default();
        let mut map = IndexMap::with_capacity(nodes.len());
        for n in nodes {
            let var = n.var.clone();
            assert!(
                map.insert(var.clone(), n).is_none(),
                "duplicate variable {var}"
            );
        }
        for e in &edges {
            assert!(
                map.contains_key(&e.parent),
                "unknown edge parent {}",
                e.parent
            );
            assert!(map.contains_key(&e.child), "unknown edge child {}", e.child);
        }
        NodeGraph {
            sentence_index,
            root,
            nodes: map,
            edges,
        }
    }

    pub(crate) fn push_node(&mut self, node: Node) {
        if self.nodes.is_empty() {
            self.root = node.var.clone();
        }
        self.nodes.insert(node.var.clone(), node);
    }

    pub(crate) fn node_mut(&mut self, var: &str) -> Option<&mut Node> {
        self.nodes.get_mut(var)
    }

    pub(crate) fn push_edge(&mut self, edge: Edge) {
        self.edges.push(edge);
    }

    pub fn node(&self, var: &str) -> Option<&Node> {
        self.nodes.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.nodes.contains_key(var)
    }

    /// Nodes in definition order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of `var` in definition order.
    pub fn node_index(&self, var: &str) -> Option<usize> {
        self.nodes.get_index_of(var)
    }

    /// Outgoing edges grouped by parent variable.
    pub fn outgoing(&self) -> HashMap<&str, Vec<&Edge>> {
        let mut out: HashMap<&str, Vec<&Edge>> = HashMap::new();
        for e in &self.edges {
            out.entry(e.parent.as_str()).or_default().push(e);
        }
        out
    }

    /// Rewrites every `X-of` edge as `X` with its endpoints swapped.
    pub fn normalize_inverse_relations(&self) -> NodeGraph {
        self.normalize_inverse_relations_except(&[])
    }

    /// Like [`normalize_inverse_relations`](Self::normalize_inverse_relations),
    /// leaving labels listed in `keep` untouched.
    pub fn normalize_inverse_relations_except(&self, keep: &[&str]) -> NodeGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut e = e.clone();
                // repeated suffixes (`X-of-of`) flip once per suffix
                while let Some(base) = e.label.strip_suffix("-of") {
                    if base.is_empty() || keep.contains(&e.label.as_str()) {
                        break;
                    }
                    e = Edge::new(e.child, base, e.parent);
                }
                e
            })
            .collect();
        NodeGraph {
            sentence_index: self.sentence_index,
            root: self.root.clone(),
            nodes: self.nodes.clone(),
            edges,
        }
    }

    /// Concept string used for node comparison; see [`enhance_name_concept`].
    pub fn enhanced_concept(&self, var: &str) -> Option<String> {
        self.node(var).map(enhance_name_concept)
    }

    /// Flattens the graph into concept, attribute and relation triples.
    pub fn extract_triples(&self) -> TripleSet {
        let mut set = TripleSet::default();
        for n in self.nodes.values() {
            set.concepts.push(Triple::new(
                n.var.clone(),
                INSTANCE,
                TripleTarget::Concept(n.concept.clone()),
            ));
            for a in &n.attributes {
                set.attributes.push(Triple::new(
                    n.var.clone(),
                    a.name.clone(),
                    TripleTarget::Value(a.value.clone()),
                ));
            }
        }
        for e in &self.edges {
            set.relations.push(Triple::new(
                e.parent.clone(),
                e.label.clone(),
                TripleTarget::Node(e.child.clone()),
            ));
        }
        set
    }
}

/// Concept used for matching. `name` nodes get their `:opN` strings appended
/// in ascending N, e.g. `name["United" "States"]`; other concepts pass through.
pub fn enhance_name_concept(node: &Node) -> String {
    if node.concept != "name" {
        return node.concept.clone();
    }
    let mut ops: Vec<(u32, &str)> = node
        .attributes
        .iter()
        .filter_map(|a| {
            let n = a.name.strip_prefix("op")?.parse::<u32>().ok()?;
            Some((n, a.value.as_str()))
        })
        .collect();
    ops.sort_by_key(|&(n, _)| n);
    let parts: Vec<String> = ops
        .into_iter()
        .map(|(_, v)| {
            if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
                v.to_string()
            } else {
                format!("\"{v}\"")
            }
        })
        .collect();
    format!("name[{}]", parts.join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TripleTarget {
    Node(String),
    Value(String),
    Concept(String),
}

impl TripleTarget {
    pub fn text(&self) -> &str {
        match self {
            TripleTarget::Node(s) | TripleTarget::Value(s) | TripleTarget::Concept(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub source: String,
    pub label: String,
    pub target: TripleTarget,
}

impl Triple {
    pub fn new(source: impl Into<String>, label: impl Into<String>, target: TripleTarget) -> Self {
        Triple {
            source: source.into(),
            label: label.into(),
            target,
        }
    }
}

/// Triples of one graph, partitioned by category. Each list is a multiset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TripleSet {
    pub concepts: Vec<Triple>,
    pub attributes: Vec<Triple>,
    pub relations: Vec<Triple>,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.concepts.len() + self.attributes.len() + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.concepts
            .iter()
            .chain(&self.attributes)
            .chain(&self.relations)
    }
}

/// Renames a pred triple into gold variables. `None` when an endpoint has no
/// partner, in which case the triple cannot match anything.
pub fn rename_triple(t: &Triple, pred_to_gold: &HashMap<&str, &str>) -> Option<Triple> {
    let source = pred_to_gold.get(t.source.as_str())?;
    let target = match &t.target {
        TripleTarget::Node(v) => TripleTarget::Node(pred_to_gold.get(v.as_str())?.to_string()),
        other => other.clone(),
    };
    Some(Triple::new(*source, t.label.clone(), target))
}

/// Size of the multiset intersection of `gold` and the renamed `pred`.
pub fn count_matches(
    gold: &[Triple],
    pred: &[Triple],
    pred_to_gold: &HashMap<&str, &str>,
) -> usize {
    let mut available: HashMap<&Triple, usize> = HashMap::new();
    for t in gold {
        *available.entry(t).or_default() += 1;
    }
    let mut matched = 0;
    for t in pred {
        let Some(renamed) = rename_triple(t, pred_to_gold) else {
            continue;
        };
        if let Some(n) = available.get_mut(&renamed) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    matched
}

/// Aligned and unaligned node counts for a whole document.
pub fn count_nodes_by_alignment(doc: &UmrDocument) -> (usize, usize) {
    let mut aligned = 0;
    let mut unaligned = 0;
    for s in &doc.sentences {
        for n in s.graph.nodes() {
            if s.alignment_of(&n.var).is_empty() {
                unaligned += 1;
            } else {
                aligned += 1;
            }
        }
    }
    (aligned, unaligned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn name_node(ops: &[(&str, &str)]) -> Node {
        let mut n = Node::new("s1n", "name");
        for (k, v) in ops {
            n = n.with_attr(*k, *v);
        }
        n
    }

    #[test]
    fn inverse_edges_are_flipped() {
        let g = NodeGraph::from_parts(
            1,
            vec![
                Node::new("slp2", "person"),
                Node::new("slc1", "číst-002"),
                Node::new("slr1", "rok"),
                Node::new("slo1", "oznamovat-002"),
            ],
            vec![
                Edge::new("slp2", "ARG0-of", "slc1"),
                Edge::new("slr1", "temporal-of", "slo1"),
            ],
        );
        let n = g.normalize_inverse_relations();
        assert_eq!(
            n.edges(),
            &[
                Edge::new("slc1", "ARG0", "slp2"),
                Edge::new("slo1", "temporal", "slr1")
            ]
        );
        assert_eq!(n.node_count(), 4);
    }

    #[test]
    fn graph_without_inverse_edges_is_unchanged() {
        let g = NodeGraph::from_parts(
            1,
            vec![Node::new("a", "x"), Node::new("b", "y")],
            vec![Edge::new("a", "ARG0", "b")],
        );
        assert_eq!(g.normalize_inverse_relations(), g);
        assert_eq!(g.normalize_inverse_relations().edges(), g.edges());
    }

    #[test]
    fn exception_list_keeps_labels() {
        let g = NodeGraph::from_parts(
            1,
            vec![Node::new("a", "x"), Node::new("b", "y")],
            vec![Edge::new("a", "consist-of", "b")],
        );
        let n = g.normalize_inverse_relations_except(&["consist-of"]);
        assert_eq!(n.edges(), g.edges());
    }

    #[test]
    fn name_enhancement() {
        let n = name_node(&[("op2", "\"States\""), ("op1", "\"United\"")]);
        assert_eq!(enhance_name_concept(&n), "name[\"United\" \"States\"]");
        assert_eq!(enhance_name_concept(&name_node(&[])), "name[]");
        assert_eq!(enhance_name_concept(&Node::new("p", "person")), "person");
        // op10 sorts after op2
        let n = name_node(&[("op10", "c"), ("op2", "b"), ("op1", "a")]);
        assert_eq!(enhance_name_concept(&n), "name[\"a\" \"b\" \"c\"]");
    }

    #[test]
    fn triples_of_a_single_node() {
        let g = NodeGraph::from_parts(
            1,
            vec![Node::new("s1x", "thing").with_attr("refer-number", "plural")],
            vec![],
        );
        let t = g.extract_triples();
        assert_eq!(
            t.iter().cloned().collect::<Vec<_>>(),
            vec![
                Triple::new("s1x", INSTANCE, TripleTarget::Concept("thing".into())),
                Triple::new("s1x", "refer-number", TripleTarget::Value("plural".into())),
            ]
        );
    }

    #[test]
    fn duplicate_attributes_count_twice() {
        let g = NodeGraph::from_parts(
            1,
            vec![Node::new("a", "x")
                .with_attr("aspect", "state")
                .with_attr("aspect", "state")],
            vec![],
        );
        assert_eq!(g.extract_triples().attributes.len(), 2);
    }

    fn arb_graph() -> impl Strategy<Value = NodeGraph> {
        (1usize..8)
            .prop_flat_map(|n| {
                let attrs = proptest::collection::vec((0..n, 0usize..3, 0usize..3), 0..10);
                let edges = proptest::collection::vec((0..n, 0usize..4, 0..n), 0..12);
                (Just(n), attrs, edges)
            })
            .prop_map(|(n, attrs, edges)| {
                let labels = ["ARG0", "ARG1-of", "mod", "part-of"];
                let mut nodes: Vec<Node> = (0..n)
                    .map(|i| Node::new(format!("s1x{i}"), format!("c{}", i % 3)))
                    .collect();
                for (i, k, v) in attrs {
                    nodes[i].attributes.push(Attribute {
                        name: format!("a{k}"),
                        value: format!("v{v}"),
                    });
                }
                let edges = edges
                    .into_iter()
                    .map(|(p, l, c)| Edge::new(format!("s1x{p}"), labels[l], format!("s1x{c}")))
                    .collect();
                NodeGraph::from_parts(1, nodes, edges)
            })
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent_and_size_preserving(g in arb_graph()) {
            let once = g.normalize_inverse_relations();
            let twice = once.normalize_inverse_relations();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.node_count(), g.node_count());
            prop_assert_eq!(once.edges().len(), g.edges().len());
            prop_assert!(once.edges().iter().all(|e| !e.label.ends_with("-of")));
        }

        #[test]
        fn triple_count_is_nodes_plus_attributes_plus_edges(g in arb_graph()) {
            let attrs: usize = g.nodes().map(|n| n.attributes.len()).sum();
            let t = g.extract_triples();
            prop_assert_eq!(t.len(), g.node_count() + attrs + g.edges().len());
            prop_assert_eq!(t.concepts.len(), g.node_count());
            prop_assert_eq!(t, g.clone().extract_triples());
        }

        #[test]
        fn enhancement_only_touches_name(concept in "[a-z]{1,6}(-[0-9]{2})?") {
            let n = Node::new("v", concept.clone()).with_attr("op1", "\"X\"");
            if concept != "name" {
                prop_assert_eq!(enhance_name_concept(&n), concept);
            }
        }
    }
}
