//! Triple-maximizing baseline matcher.
//!
//! Searches for the 1-1 node mapping with the most matched triples using
//! steepest-ascent hill climbing with restarts, in the manner of the smatch
//! metric. Word alignments are ignored. The first restart starts from a
//! greedy concept match, the others from seeded random injections, so a given
//! seed always yields the same mapping.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::format::UmrSentence;
use crate::graph::{count_matches, NodeGraph, TripleSet};
use crate::matcher::NodeMapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations_per_restart: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 4,
            seed: 0,
            max_iterations_per_restart: 1000,
        }
    }
}

/// Matched triples once pred variables are renamed to their gold partners.
pub fn triple_match_count(mapping: &NodeMapping, gold: &TripleSet, pred: &TripleSet) -> usize {
    let p2g = mapping.pred_to_gold();
    count_matches(&gold.concepts, &pred.concepts, &p2g)
        + count_matches(&gold.attributes, &pred.attributes, &p2g)
        + count_matches(&gold.relations, &pred.relations, &p2g)
}

/// Objective values seen during one restart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestartTrace {
    pub initial: usize,
    /// Objective after each accepted move.
    pub accepted: Vec<usize>,
    pub final_objective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub mapping: NodeMapping,
    pub objective: usize,
    pub best_restart: usize,
    pub traces: Vec<RestartTrace>,
}

/// Precomputed pair weights. `node[p][g]` counts matching concept and
/// attribute triples; relation matches are looked up per pred node pair.
struct Weights {
    n_gold: usize,
    n_pred: usize,
    node: Vec<Vec<usize>>,
    /// Distinct `(p1, p2)` pred pairs joined by at least one relation, with
    /// label multiplicities.
    pred_pairs: Vec<(usize, usize, HashMap<String, usize>)>,
    /// Indices into `pred_pairs` touching each pred node.
    incident: Vec<Vec<usize>>,
    gold_rel: HashMap<(usize, usize), HashMap<String, usize>>,
}

fn label_counts<'a>(items: impl Iterator<Item = &'a str>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for s in items {
        *m.entry(s.to_string()).or_default() += 1;
    }
    m
}

impl Weights {
    fn new(gold: &NodeGraph, pred: &NodeGraph) -> Self {
        let gold_nodes: Vec<_> = gold.nodes().collect();
        let pred_nodes: Vec<_> = pred.nodes().collect();
        let gidx = |v: &str| gold.node_index(v).expect("edge endpoint");
        let pidx = |v: &str| pred.node_index(v).expect("edge endpoint");

        let node = pred_nodes
            .iter()
            .map(|p| {
                gold_nodes
                    .iter()
                    .map(|g| {
                        let mut score = usize::from(p.concept == g.concept);
                        let mut avail: HashMap<(&str, &str), usize> = HashMap::new();
                        for a in &g.attributes {
                            *avail.entry((&a.name, &a.value)).or_default() += 1;
                        }
                        for a in &p.attributes {
                            if let Some(n) = avail.get_mut(&(a.name.as_str(), a.value.as_str())) {
                                if *n > 0 {
                                    *n -= 1;
                                    score += 1;
                                }
                            }
                        }
                        score
                    })
                    .collect()
            })
            .collect();

        let mut grouped: HashMap<(usize, usize), Vec<&str>> = HashMap::new();
        for e in pred.edges() {
            grouped
                .entry((pidx(&e.parent), pidx(&e.child)))
                .or_default()
                .push(&e.label);
        }
        let mut keys: Vec<(usize, usize)> = grouped.keys().copied().collect();
        keys.sort_unstable();
        let mut incident = vec![Vec::new(); pred_nodes.len()];
        let pred_pairs: Vec<_> = keys
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| {
                incident[a].push(i);
                if b != a {
                    incident[b].push(i);
                }
                (a, b, label_counts(grouped[&(a, b)].iter().copied()))
            })
            .collect();

        let mut gold_grouped: HashMap<(usize, usize), Vec<&str>> = HashMap::new();
        for e in gold.edges() {
            gold_grouped
                .entry((gidx(&e.parent), gidx(&e.child)))
                .or_default()
                .push(&e.label);
        }
        let gold_rel = gold_grouped
            .into_iter()
            .map(|(k, v)| (k, label_counts(v.into_iter())))
            .collect();

        Weights {
            n_gold: gold_nodes.len(),
            n_pred: pred_nodes.len(),
            node,
            pred_pairs,
            incident,
            gold_rel,
        }
    }

    fn pair_weight(&self, pair: usize, m: &[Option<usize>]) -> usize {
        let (a, b, labels) = &self.pred_pairs[pair];
        let (Some(ga), Some(gb)) = (m[*a], m[*b]) else {
            return 0;
        };
        let Some(gold_labels) = self.gold_rel.get(&(ga, gb)) else {
            return 0;
        };
        labels
            .iter()
            .map(|(l, n)| (*n).min(gold_labels.get(l).copied().unwrap_or(0)))
            .sum()
    }

    fn objective(&self, m: &[Option<usize>]) -> usize {
        let nodes: usize = m
            .iter()
            .enumerate()
            .filter_map(|(p, g)| g.map(|g| self.node[p][g]))
            .sum();
        let rels: usize = (0..self.pred_pairs.len())
            .map(|i| self.pair_weight(i, m))
            .sum();
        nodes + rels
    }

    /// Objective terms that involve any of `preds`.
    fn local(&self, preds: &[usize], m: &[Option<usize>]) -> usize {
        let mut total = 0;
        let mut seen: Vec<usize> = Vec::new();
        for &p in preds {
            if let Some(g) = m[p] {
                total += self.node[p][g];
            }
            for &i in &self.incident[p] {
                if !seen.contains(&i) {
                    seen.push(i);
                    total += self.pair_weight(i, m);
                }
            }
        }
        total
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Assign { pred: usize, gold: usize },
    Swap { a: usize, b: usize },
}

struct State {
    pred_to_gold: Vec<Option<usize>>,
    gold_to_pred: Vec<Option<usize>>,
}

impl State {
    fn new(pred_to_gold: Vec<Option<usize>>, n_gold: usize) -> Self {
        let mut gold_to_pred = vec![None; n_gold];
        for (p, g) in pred_to_gold.iter().enumerate() {
            if let Some(g) = g {
                gold_to_pred[*g] = Some(p);
            }
        }
        State {
            pred_to_gold,
            gold_to_pred,
        }
    }

    fn apply(&mut self, mv: Move) {
        match mv {
            Move::Assign { pred, gold } => {
                if let Some(old) = self.pred_to_gold[pred] {
                    self.gold_to_pred[old] = None;
                }
                self.pred_to_gold[pred] = Some(gold);
                self.gold_to_pred[gold] = Some(pred);
            }
            Move::Swap { a, b } => {
                let (ga, gb) = (self.pred_to_gold[a], self.pred_to_gold[b]);
                self.pred_to_gold[a] = gb;
                self.pred_to_gold[b] = ga;
                if let Some(g) = gb {
                    self.gold_to_pred[g] = Some(a);
                }
                if let Some(g) = ga {
                    self.gold_to_pred[g] = Some(b);
                }
            }
        }
    }

    fn gain(&mut self, w: &Weights, mv: Move) -> isize {
        let touched: Vec<usize> = match mv {
            Move::Assign { pred, .. } => vec![pred],
            Move::Swap { a, b } => vec![a, b],
        };
        let before = w.local(&touched, &self.pred_to_gold) as isize;
        let saved = self.pred_to_gold.clone();
        let saved_rev = self.gold_to_pred.clone();
        self.apply(mv);
        let after = w.local(&touched, &self.pred_to_gold) as isize;
        self.pred_to_gold = saved;
        self.gold_to_pred = saved_rev;
        after - before
    }
}

fn climb(
    w: &Weights,
    start: Vec<Option<usize>>,
    max_iterations: usize,
) -> (Vec<Option<usize>>, RestartTrace) {
    let mut state = State::new(start, w.n_gold);
    let initial = w.objective(&state.pred_to_gold);
    let mut current = initial;
    let mut accepted = Vec::new();

    for _ in 0..max_iterations {
        let mut best: Option<(isize, Move)> = None;
        let mut consider = |gain: isize, mv: Move| {
            if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, mv));
            }
        };
        for p in 0..w.n_pred {
            for g in 0..w.n_gold {
                if state.gold_to_pred[g].is_none() {
                    let mv = Move::Assign { pred: p, gold: g };
                    consider(state.gain(w, mv), mv);
                }
            }
        }
        for a in 0..w.n_pred {
            for b in a + 1..w.n_pred {
                if state.pred_to_gold[a].is_some() || state.pred_to_gold[b].is_some() {
                    let mv = Move::Swap { a, b };
                    consider(state.gain(w, mv), mv);
                }
            }
        }
        let Some((gain, mv)) = best else {
            break;
        };
        state.apply(mv);
        current = (current as isize + gain) as usize;
        accepted.push(current);
    }
    debug_assert_eq!(current, w.objective(&state.pred_to_gold));

    // saturation: leftover nodes are paired in order; weights are
    // non-negative so this never lowers the objective
    let mut free_gold = (0..w.n_gold).filter(|&g| state.gold_to_pred[g].is_none());
    for p in 0..w.n_pred {
        if state.pred_to_gold[p].is_none() {
            match free_gold.next() {
                Some(g) => state.pred_to_gold[p] = Some(g),
                None => break,
            }
        }
    }
    let final_objective = w.objective(&state.pred_to_gold);
    (
        state.pred_to_gold,
        RestartTrace {
            initial,
            accepted,
            final_objective,
        },
    )
}

fn concept_init(gold: &NodeGraph, pred: &NodeGraph) -> Vec<Option<usize>> {
    let golds: Vec<_> = gold.nodes().collect();
    let mut used = vec![false; golds.len()];
    pred.nodes()
        .map(|p| {
            let g = golds
                .iter()
                .enumerate()
                .position(|(i, g)| !used[i] && g.concept == p.concept)?;
            used[g] = true;
            Some(g)
        })
        .collect()
}

fn random_init(n_gold: usize, n_pred: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut m = vec![None; n_pred];
    if n_pred <= n_gold {
        let mut golds: Vec<usize> = (0..n_gold).collect();
        golds.shuffle(rng);
        for (p, slot) in m.iter_mut().enumerate() {
            *slot = Some(golds[p]);
        }
    } else {
        let mut preds: Vec<usize> = (0..n_pred).collect();
        preds.shuffle(rng);
        for (g, &p) in preds.iter().take(n_gold).enumerate() {
            m[p] = Some(g);
        }
    }
    m
}

/// Hill-climbing search over two already inverse-normalized graphs.
pub fn hill_climb_graphs(gold: &NodeGraph, pred: &NodeGraph, cfg: &SearchConfig) -> SearchOutcome {
    let w = Weights::new(gold, pred);
    let restarts = cfg.restarts.max(1);
    let mut best: Option<(usize, usize, Vec<Option<usize>>)> = None;
    let mut traces = Vec::with_capacity(restarts);

    for r in 0..restarts {
        let start = if r == 0 {
            concept_init(gold, pred)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            random_init(w.n_gold, w.n_pred, &mut rng)
        };
        let (m, trace) = climb(&w, start, cfg.max_iterations_per_restart);
        let obj = trace.final_objective;
        traces.push(trace);
        if best.as_ref().is_none_or(|(b, _, _)| obj > *b) {
            best = Some((obj, r, m));
        }
    }

    let (objective, best_restart, m) = best.expect("at least one restart");
    let golds: Vec<&str> = gold.nodes().map(|n| n.var.as_str()).collect();
    let pairs = pred
        .nodes()
        .zip(&m)
        .filter_map(|(p, g)| g.map(|g| (golds[g].to_string(), p.var.clone())))
        .collect();
    SearchOutcome {
        mapping: NodeMapping::from_pairs(pairs, gold, pred),
        objective,
        best_restart,
        traces,
    }
}

/// Baseline mapping for a sentence pair. Alignments are not consulted.
pub fn hill_climb_match(gold: &UmrSentence, pred: &UmrSentence, cfg: &SearchConfig) -> NodeMapping {
    hill_climb_graphs(
        &gold.graph.normalize_inverse_relations(),
        &pred.graph.normalize_inverse_relations(),
        cfg,
    )
    .mapping
}
