use std::collections::{BTreeMap, HashSet};

use super::sexpr::{self, Pos, Sexp};
use super::{AlignmentSpan, DocTriple, UmrDocument, UmrSentence};
use crate::error::{Error, Result, Warning};
use crate::graph::{Attribute, Edge, Node, NodeGraph};

const GRAPH_HEADER: &str = "# sentence level graph:";
const ALIGNMENT_HEADER: &str = "# alignment:";
const DOC_HEADER: &str = "# document level annotation:";
const SNT_MARKER: &str = "# :: snt";

pub fn parse_document(text: &str) -> Result<UmrDocument> {
    parse_document_with_warnings(text).map(|(doc, _)| doc)
}

pub fn parse_document_with_warnings(text: &str) -> Result<(UmrDocument, Vec<Warning>)> {
    let mut builder = DocBuilder::default();
    for (i, line) in text.lines().enumerate() {
        builder.line(i + 1, line)?;
    }
    builder.finish_block()?;
    let doc = UmrDocument {
        sentences: builder.sentences,
        ..Default::default()
    };
    Ok((doc, builder.warnings))
}

/// Parses a single parenthesized graph. Line numbers in errors start at 1.
pub fn parse_sentence_graph(src: &str, sentence_index: usize) -> Result<NodeGraph> {
    let expr = sexpr::read_one(src, 1)?;
    build_graph(&expr, sentence_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Graph,
    Alignment,
    DocLevel,
}

#[derive(Default)]
struct Block {
    metadata: Vec<String>,
    snt: Option<(usize, usize)>,
    tokens: Option<Vec<String>>,
    index_count: Option<usize>,
    graph: Vec<(usize, String)>,
    alignment: Vec<(usize, String)>,
    doc: Vec<(usize, String)>,
}

impl Block {
    fn has_content(&self) -> bool {
        self.snt.is_some() || self.tokens.is_some() || !self.graph.is_empty()
    }
}

struct DocBuilder {
    section: Section,
    block: Block,
    sentences: Vec<UmrSentence>,
    warnings: Vec<Warning>,
}

impl Default for DocBuilder {
    fn default() -> Self {
        DocBuilder {
            section: Section::Header,
            block: Block::default(),
            sentences: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

impl DocBuilder {
    fn line(&mut self, n: usize, raw: &str) -> Result<()> {
        let line = raw.trim_end();
        let trimmed = line.trim_start();

        if let Some(rest) = trimmed.strip_prefix(SNT_MARKER) {
            if self.block.has_content() {
                self.finish_block()?;
            }
            let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
            let k = digits
                .parse()
                .map_err(|_| Error::syntax(n, 1, "sentence marker without a number"))?;
            self.block.snt = Some((k, n));
            self.section = Section::Header;
            return Ok(());
        }
        match trimmed {
            GRAPH_HEADER => {
                if !self.block.graph.is_empty() {
                    self.finish_block()?;
                }
                self.section = Section::Graph;
                return Ok(());
            }
            ALIGNMENT_HEADER => {
                self.section = Section::Alignment;
                return Ok(());
            }
            DOC_HEADER => {
                self.section = Section::DocLevel;
                return Ok(());
            }
            _ => {}
        }
        if trimmed.is_empty() {
            return Ok(());
        }
        if trimmed.starts_with('#') {
            // comments after a finished graph open the next sentence
            if self.section != Section::Header && !self.block.graph.is_empty() {
                self.finish_block()?;
            }
            self.block.metadata.push(line.to_string());
            return Ok(());
        }

        match self.section {
            Section::Header => {
                if trimmed.starts_with('(') {
                    self.section = Section::Graph;
                    self.block.graph.push((n, line.to_string()));
                } else if let Some(rest) = trimmed
                    .strip_prefix("Words:")
                    .or_else(|| trimmed.strip_prefix("Sentence:"))
                {
                    self.block.tokens = Some(rest.split_whitespace().map(String::from).collect());
                } else if let Some(rest) = trimmed.strip_prefix("Index:") {
                    self.block.index_count = Some(rest.split_whitespace().count());
                } else {
                    self.block.metadata.push(line.to_string());
                }
            }
            Section::Graph => {
                if looks_like_alignment(trimmed) && balanced(&self.block.graph) {
                    self.section = Section::Alignment;
                    self.block.alignment.push((n, trimmed.to_string()));
                } else {
                    self.block.graph.push((n, line.to_string()));
                }
            }
            Section::Alignment => {
                if trimmed.starts_with('(') {
                    // headerless file: a new graph starts the next sentence
                    self.finish_block()?;
                    self.section = Section::Graph;
                    self.block.graph.push((n, line.to_string()));
                } else {
                    self.block.alignment.push((n, trimmed.to_string()));
                }
            }
            Section::DocLevel => self.block.doc.push((n, line.to_string())),
        }
        Ok(())
    }

    fn finish_block(&mut self) -> Result<()> {
        let block = std::mem::take(&mut self.block);
        self.section = Section::Header;
        if !block.has_content() {
            if !block.metadata.is_empty() || !block.alignment.is_empty() || !block.doc.is_empty() {
                // metadata with no sentence after it; keep it for the next block
                self.block.metadata = block.metadata;
            }
            return Ok(());
        }

        let expected = self.sentences.len() + 1;
        if let Some((k, line)) = block.snt {
            if k != expected {
                return Err(Error::SentenceIndex {
                    expected,
                    found: k,
                    line,
                });
            }
        }
        let tokens = block.tokens.unwrap_or_default();
        if let Some(count) = block.index_count {
            if count != tokens.len() {
                self.warnings.push(Warning::IndexMismatch {
                    sentence: expected,
                    indices: count,
                    tokens: tokens.len(),
                });
            }
        }

        let graph = match block.graph.first() {
            Some(&(first_line, _)) => {
                let src = join_lines(&block.graph);
                let expr = sexpr::read_one(&src, first_line)?;
                build_graph(&expr, expected)?
            }
            None => NodeGraph::empty(expected),
        };

        let mut sentence = UmrSentence::new(expected, tokens, graph);
        sentence.metadata = block.metadata;
        sentence.alignments = parse_alignments(&block.alignment, &sentence)?;
        if let Some(&(first_line, _)) = block.doc.first() {
            let src = join_lines(&block.doc);
            match parse_doc_block(&src, first_line) {
                Ok((var, triples)) => {
                    sentence.doc_var = Some(var);
                    sentence.doc_triples = triples;
                }
                Err(message) => self.warnings.push(Warning::DocLevelUnparsed {
                    sentence: expected,
                    message,
                }),
            }
        }
        self.sentences.push(sentence);
        Ok(())
    }
}

fn join_lines(lines: &[(usize, String)]) -> String {
    lines
        .iter()
        .map(|(_, l)| l.as_str())
        .collect::<Vec<_>>()
        .join("\n")
}

fn looks_like_alignment(line: &str) -> bool {
    match line.split_once(':') {
        Some((var, spans)) => {
            !var.is_empty()
                && !var.contains(char::is_whitespace)
                && !var.starts_with('(')
                && spans.parse::<AlignmentSpan>().is_ok()
        }
        None => false,
    }
}

/// Whether the parentheses seen so far are closed (quotes respected).
fn balanced(lines: &[(usize, String)]) -> bool {
    let mut depth = 0i64;
    let mut in_str = false;
    for (_, l) in lines {
        let mut escaped = false;
        for c in l.chars() {
            match c {
                _ if escaped => escaped = false,
                '\\' if in_str => escaped = true,
                '"' => in_str = !in_str,
                '(' if !in_str => depth += 1,
                ')' if !in_str => depth -= 1,
                _ => {}
            }
        }
    }
    depth <= 0 && !lines.is_empty()
}

fn parse_alignments(
    lines: &[(usize, String)],
    sentence: &UmrSentence,
) -> Result<BTreeMap<String, AlignmentSpan>> {
    let mut out = BTreeMap::new();
    for (n, line) in lines {
        let (var, spans) = line
            .split_once(':')
            .ok_or_else(|| Error::syntax(*n, 1, "expected `variable: start-end`"))?;
        let var = var.trim();
        let span: AlignmentSpan = spans
            .parse()
            .map_err(|e: super::SpanSyntax| Error::syntax(*n, var.chars().count() + 2, e.0))?;
        if !sentence.graph.contains(var) {
            return Err(Error::MisalignedIndex {
                var: var.to_string(),
                line: *n,
            });
        }
        if let Some(p) = span.positions().find(|&p| p > sentence.tokens.len()) {
            return Err(Error::TokenOutOfRange {
                var: var.to_string(),
                position: p,
                token_count: sentence.tokens.len(),
                line: *n,
            });
        }
        if out.insert(var.to_string(), span).is_some() {
            return Err(Error::DuplicateAlignment {
                var: var.to_string(),
                line: *n,
            });
        }
    }
    Ok(out)
}

/// `s<digits><letters><digits>`, e.g. `s23w`, `s1p0`.
pub(crate) fn is_variable_like(token: &str) -> bool {
    let Some(rest) = token.strip_prefix('s') else {
        return false;
    };
    let digits = rest.chars().take_while(char::is_ascii_digit).count();
    let rest = &rest[digits..];
    let letters = rest.chars().take_while(char::is_ascii_alphabetic).count();
    digits > 0 && letters > 0 && rest[letters..].chars().all(|c| c.is_ascii_digit())
}

fn collect_definitions(expr: &Sexp, seen: &mut HashSet<String>) -> Result<()> {
    if let Sexp::List(items, _) = expr {
        if let (Some(Sexp::Atom(var, pos)), Some(Sexp::Atom(slash, _))) =
            (items.first(), items.get(1))
        {
            if slash == "/" && !seen.insert(var.clone()) {
                return Err(Error::DuplicateVariable {
                    var: var.clone(),
                    line: pos.line,
                    column: pos.column,
                });
            }
        }
        for item in items {
            collect_definitions(item, seen)?;
        }
    }
    Ok(())
}

fn build_graph(expr: &Sexp, sentence_index: usize) -> Result<NodeGraph> {
    let mut defined = HashSet::new();
    collect_definitions(expr, &mut defined)?;
    let mut graph = NodeGraph::empty(sentence_index);
    build_node(expr, &defined, &mut graph)?;
    Ok(graph)
}

fn expect_atom<'a>(item: Option<&'a Sexp>, at: Pos, what: &str) -> Result<(&'a str, Pos)> {
    match item {
        Some(Sexp::Atom(a, p)) => Ok((a, *p)),
        Some(Sexp::List(_, p)) => Err(Error::syntax(p.line, p.column, format!("expected {what}"))),
        None => Err(Error::syntax(at.line, at.column, format!("missing {what}"))),
    }
}

fn build_node(expr: &Sexp, defined: &HashSet<String>, graph: &mut NodeGraph) -> Result<String> {
    let (items, at) = match expr {
        Sexp::List(items, p) => (items, *p),
        Sexp::Atom(_, p) => {
            return Err(Error::syntax(
                p.line,
                p.column,
                "expected `(` to start a node",
            ))
        }
    };
    let (var, var_pos) = expect_atom(items.first(), at, "node variable")?;
    if var.starts_with(':') || var.starts_with('"') || var == "/" {
        return Err(Error::syntax(
            var_pos.line,
            var_pos.column,
            "expected node variable",
        ));
    }
    let (slash, slash_pos) = expect_atom(items.get(1), at, "`/` after variable")?;
    if slash != "/" {
        return Err(Error::syntax(
            slash_pos.line,
            slash_pos.column,
            "expected `/` after variable",
        ));
    }
    let (concept, concept_pos) = expect_atom(items.get(2), at, "concept")?;
    if concept.starts_with(':') || concept == "/" {
        return Err(Error::syntax(
            concept_pos.line,
            concept_pos.column,
            "expected concept",
        ));
    }

    let mut node = Node::new(var, concept);
    let mut i = 3;
    if let Some(Sexp::Atom(g, _)) = items.get(3) {
        if g.len() >= 2 && g.starts_with('\'') && g.ends_with('\'') {
            node.gloss = Some(g[1..g.len() - 1].to_string());
            i = 4;
        }
    }
    graph.push_node(node);

    while i < items.len() {
        let (label, label_pos) = expect_atom(items.get(i), at, "relation label")?;
        let name = match label.strip_prefix(':') {
            Some(name) if !name.is_empty() => name,
            _ => {
                return Err(Error::syntax(
                    label_pos.line,
                    label_pos.column,
                    format!("expected `:label`, found `{label}`"),
                ))
            }
        };
        let value = items.get(i + 1).ok_or_else(|| {
            Error::syntax(
                label_pos.line,
                label_pos.column,
                format!("missing value for `{label}`"),
            )
        })?;
        match value {
            Sexp::List(child_items, _) => {
                let child = match child_items.first() {
                    Some(Sexp::Atom(c, _)) => c.clone(),
                    _ => {
                        return Err(Error::syntax(
                            value.pos().line,
                            value.pos().column,
                            "expected node variable",
                        ))
                    }
                };
                graph.push_edge(Edge::new(var, name, child));
                build_node(value, defined, graph)?;
            }
            Sexp::Atom(v, p) => {
                if v == "/" || v.starts_with(':') {
                    return Err(Error::syntax(
                        p.line,
                        p.column,
                        format!("missing value for `{label}`"),
                    ));
                }
                if defined.contains(v) {
                    graph.push_edge(Edge::new(var, name, v.clone()));
                } else if is_variable_like(v) {
                    return Err(Error::DanglingVariable {
                        var: v.clone(),
                        line: p.line,
                        column: p.column,
                    });
                } else if let Some(node) = graph.node_mut(var) {
                    node.attributes.push(Attribute {
                        name: name.to_string(),
                        value: v.clone(),
                    });
                }
            }
        }
        i += 2;
    }
    Ok(var.to_string())
}

/// Interprets `(s1s0 / sentence :temporal ((a :before b)) ...)`. Errors are
/// returned as plain messages; the caller downgrades them to warnings.
fn parse_doc_block(
    src: &str,
    first_line: usize,
) -> std::result::Result<(String, Vec<DocTriple>), String> {
    let expr = sexpr::read_one(src, first_line).map_err(|e| e.to_string())?;
    let Sexp::List(items, _) = &expr else {
        return Err("expected a parenthesized block".into());
    };
    let var = match (items.first(), items.get(1), items.get(2)) {
        (Some(Sexp::Atom(v, _)), Some(Sexp::Atom(s, _)), Some(Sexp::Atom(_, _))) if s == "/" => {
            v.clone()
        }
        _ => return Err("expected `(var / sentence ...)`".into()),
    };
    let mut groups: Vec<(String, Vec<DocTriple>)> = Vec::new();
    let mut i = 3;
    while i < items.len() {
        let group = items[i]
            .as_atom()
            .and_then(|a| a.strip_prefix(':'))
            .filter(|g| !g.is_empty())
            .ok_or_else(|| format!("line {}: expected a `:group` label", items[i].pos().line))?;
        let Some(Sexp::List(entries, p)) = items.get(i + 1) else {
            return Err(format!("`:{group}` is not followed by a list"));
        };
        let slot = match groups.iter().position(|(g, _)| g == group) {
            Some(k) => k,
            None => {
                groups.push((group.to_string(), Vec::new()));
                groups.len() - 1
            }
        };
        for entry in entries {
            let triple = match entry {
                Sexp::List(parts, _) if parts.len() == 3 => {
                    match (parts[0].as_atom(), parts[1].as_atom(), parts[2].as_atom()) {
                        (Some(a), Some(l), Some(b)) if l.len() > 1 && l.starts_with(':') => {
                            DocTriple::new(group, a, &l[1..], b)
                        }
                        _ => {
                            return Err(format!(
                                "line {}: malformed `(source :label target)`",
                                p.line
                            ))
                        }
                    }
                }
                _ => {
                    return Err(format!(
                        "line {}: malformed `(source :label target)`",
                        entry.pos().line
                    ))
                }
            };
            groups[slot].1.push(triple);
        }
        i += 2;
    }
    Ok((var, groups.into_iter().flat_map(|(_, t)| t).collect()))
}
