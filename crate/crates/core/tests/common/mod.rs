//! Random sentence generation and brute-force references shared by the
//! property tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use umr_compare::graph::count_matches;
use umr_compare::{AlignmentSpan, Edge, Node, NodeGraph, Triple, UmrSentence};

pub const TOKENS: [&str; 8] = ["a", "bb", "ccc", "dddd", "e", "ff", "ggg", "hh"];
const CONCEPTS: [&str; 4] = ["go-01", "person", "thing", "big"];
const LABELS: [&str; 4] = ["ARG0", "ARG1", "mod", "ARG0-of"];

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, prefix: &str) -> NodeGraph {
    let var = |i: usize| format!("{prefix}{i}");
    let mut nodes = Vec::new();
    for i in 0..n {
        let mut node = Node::new(var(i), *CONCEPTS.choose(rng).unwrap());
        if rng.gen_bool(0.4) {
            node = node.with_attr("aspect", *["state", "activity"].choose(rng).unwrap());
        }
        if rng.gen_bool(0.2) {
            node = node.with_attr("refer-number", "plural");
        }
        nodes.push(node);
    }
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        edges.push(Edge::new(var(parent), *LABELS.choose(rng).unwrap(), var(i)));
    }
    if n > 1 {
        for _ in 0..rng.gen_range(0..=2) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            edges.push(Edge::new(var(a), *LABELS.choose(rng).unwrap(), var(b)));
        }
    }
    NodeGraph::from_parts(1, nodes, edges)
}

pub fn random_sentence(rng: &mut ChaCha8Rng, n: usize, prefix: &str) -> UmrSentence {
    let graph = random_graph(rng, n, prefix);
    let vars: Vec<String> = graph.nodes().map(|n| n.var.clone()).collect();
    let mut s = UmrSentence::new(1, TOKENS.iter().map(|t| t.to_string()).collect(), graph);
    for v in vars {
        if rng.gen_bool(0.7) {
            let start = rng.gen_range(1..=TOKENS.len());
            let end = (start + rng.gen_range(0..2)).min(TOKENS.len());
            s.alignments.insert(v, AlignmentSpan::new(start..=end));
        }
    }
    s
}

fn all_triples(g: &NodeGraph) -> Vec<Triple> {
    g.normalize_inverse_relations()
        .extract_triples()
        .iter()
        .cloned()
        .collect()
}

/// Largest matched-triple count over every partial injection pred -> gold.
pub fn brute_force_optimum(gold: &NodeGraph, pred: &NodeGraph) -> usize {
    let gt = all_triples(gold);
    let pt = all_triples(pred);
    let gvars: Vec<&str> = gold.nodes().map(|n| n.var.as_str()).collect();
    let pvars: Vec<&str> = pred.nodes().map(|n| n.var.as_str()).collect();
    let mut used = vec![false; gvars.len()];
    let mut map = HashMap::new();
    let mut best = 0;
    #[allow(clippy::too_many_arguments)]
    fn go<'a>(
        i: usize,
        pvars: &[&'a str],
        gvars: &[&'a str],
        used: &mut Vec<bool>,
        map: &mut HashMap<&'a str, &'a str>,
        gt: &[Triple],
        pt: &[Triple],
        best: &mut usize,
    ) {
        if i == pvars.len() {
            *best = (*best).max(count_matches(gt, pt, map));
            return;
        }
        go(i + 1, pvars, gvars, used, map, gt, pt, best);
        for j in 0..gvars.len() {
            if !used[j] {
                used[j] = true;
                map.insert(pvars[i], gvars[j]);
                go(i + 1, pvars, gvars, used, map, gt, pt, best);
                map.remove(pvars[i]);
                used[j] = false;
            }
        }
    }
    go(0, &pvars, &gvars, &mut used, &mut map, &gt, &pt, &mut best);
    best
}
