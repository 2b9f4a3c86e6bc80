use std::collections::HashSet;
use std::fmt::Write;

use super::{UmrDocument, UmrSentence};
use crate::graph::NodeGraph;

const INDENT: &str = "    ";

pub fn serialize_document(doc: &UmrDocument) -> String {
    let mut out = String::new();
    for (i, s) in doc.sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_sentence(&mut out, s);
    }
    out
}

fn write_sentence(out: &mut String, s: &UmrSentence) {
    for m in &s.metadata {
        out.push_str(m);
        out.push('\n');
    }
    let _ = writeln!(out, "# :: snt{}", s.index);
    let index: Vec<String> = (1..=s.tokens.len()).map(|i| i.to_string()).collect();
    let _ = writeln!(out, "Index: {}", index.join(" "));
    let _ = writeln!(out, "Words: {}", s.tokens.join(" "));
    out.push('\n');

    out.push_str("# sentence level graph:\n");
    if !s.graph.is_empty() {
        out.push_str(&serialize_graph(&s.graph));
        out.push('\n');
    }
    out.push('\n');

    out.push_str("# alignment:\n");
    for n in s.graph.nodes() {
        if let Some(span) = s.alignments.get(&n.var) {
            let _ = writeln!(out, "{}: {}", n.var, span);
        }
    }
    out.push('\n');

    out.push_str("# document level annotation:\n");
    if let Some(var) = &s.doc_var {
        let _ = write!(out, "({var} / sentence");
        let mut groups: Vec<&str> = Vec::new();
        for t in &s.doc_triples {
            if !groups.contains(&t.group.as_str()) {
                groups.push(&t.group);
            }
        }
        for g in groups {
            let entries: Vec<String> = s
                .doc_triples
                .iter()
                .filter(|t| t.group == g)
                .map(|t| format!("({} :{} {})", t.source, t.label, t.target))
                .collect();
            let _ = write!(out, "\n{INDENT}:{g} ({})", entries.join(" "));
        }
        out.push_str(")\n");
    }
}

/// Renders a graph in indented bracket notation. Each node is defined at its
/// first occurrence in a depth-first walk from the root; later mentions are
/// bare variables.
pub fn serialize_graph(graph: &NodeGraph) -> String {
    let outgoing = graph.outgoing();
    let mut emitted = HashSet::new();
    let mut out = String::new();
    write_node(graph, &outgoing, &graph.root, 1, &mut emitted, &mut out);
    out
}

fn write_node<'g>(
    graph: &'g NodeGraph,
    outgoing: &std::collections::HashMap<&str, Vec<&'g crate::graph::Edge>>,
    var: &'g str,
    depth: usize,
    emitted: &mut HashSet<&'g str>,
    out: &mut String,
) {
    let Some(node) = graph.node(var) else {
        return;
    };
    emitted.insert(var);
    let _ = write!(out, "({} / {}", node.var, node.concept);
    if let Some(g) = &node.gloss {
        let _ = write!(out, " '{g}'");
    }
    let pad = INDENT.repeat(depth);
    for a in &node.attributes {
        let _ = write!(out, "\n{pad}:{} {}", a.name, a.value);
    }
    for e in outgoing.get(var).into_iter().flatten() {
        let _ = write!(out, "\n{pad}:{} ", e.label);
        if emitted.contains(e.child.as_str()) {
            out.push_str(&e.child);
        } else {
            write_node(graph, outgoing, &e.child, depth + 1, emitted, out);
        }
    }
    out.push(')');
}
