mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use umr_compare::matcher::{acceptance_order, symmetrize, CandidateEdge, Fraction, SimilarityKey};
use umr_compare::metrics::ScoreReport;
use umr_compare::smatch::{hill_climb_graphs, triple_match_count};
use umr_compare::{
    match_graphs, parse_document, serialize_document, AlignmentSpan, SearchConfig, UmrDocument,
};

use common::{brute_force_optimum, random_graph, random_sentence};

fn pair(
    seed: u64,
    n_gold: usize,
    n_pred: usize,
    same_prefix: bool,
) -> (umr_compare::UmrSentence, umr_compare::UmrSentence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_sentence(&mut rng, n_gold, "g");
    let p = random_sentence(&mut rng, n_pred, if same_prefix { "g" } else { "p" });
    (g, p)
}

proptest! {
    #[test]
    fn matching_is_symmetric(seed in any::<u64>(), ng in 1usize..9, np in 1usize..9, same in any::<bool>()) {
        let (g, p) = pair(seed, ng, np, same);
        let ab = match_graphs(&g, &p);
        let ba = match_graphs(&p, &g);
        prop_assert_eq!(ab.transpose().sorted_pairs(), ba.sorted_pairs());

        let r_ab = ScoreReport::for_sentence(&g, &p, &ab, false);
        let r_ba = ScoreReport::for_sentence(&p, &g, &ba, false);
        for ((name, x), (_, y)) in r_ab.categories().into_iter().zip(r_ba.categories()) {
            prop_assert_eq!(x.precision, y.recall, "{}", name);
            prop_assert_eq!(x.recall, y.precision, "{}", name);
            prop_assert!((x.f1 - y.f1).abs() < 1e-9, "{}", name);
        }
    }

    #[test]
    fn mapping_is_a_partial_bijection(seed in any::<u64>(), ng in 0usize..9, np in 0usize..9) {
        let (g, p) = pair(seed, ng, np, false);
        let m = match_graphs(&g, &p);
        let golds: HashSet<&str> = m.pairs.iter().map(|(a, _)| a.as_str()).collect();
        let preds: HashSet<&str> = m.pairs.iter().map(|(_, b)| b.as_str()).collect();
        prop_assert_eq!(golds.len(), m.len());
        prop_assert_eq!(preds.len(), m.len());
        prop_assert_eq!(m.len() + m.unmapped_gold.len(), g.graph.node_count());
        prop_assert_eq!(m.len() + m.unmapped_pred.len(), p.graph.node_count());
        // a pair either shares a token or joins two unaligned nodes
        for (a, b) in &m.pairs {
            let (sa, sb) = (g.alignment_of(a), p.alignment_of(b));
            prop_assert!(!sa.intersection(&sb).is_empty() || (sa.is_empty() && sb.is_empty()));
        }
    }

    #[test]
    fn self_match_is_identity(seed in any::<u64>(), n in 1usize..10) {
        let (g, _) = pair(seed, n, 1, false);
        let m = match_graphs(&g, &g);
        let aligned = g.graph.nodes().filter(|x| !g.alignment_of(&x.var).is_empty()).count();
        prop_assert!(m.pairs.iter().all(|(a, b)| a == b));
        prop_assert!(m.len() >= aligned);
        let r = ScoreReport::for_sentence(&g, &g, &m, false);
        prop_assert_eq!(r.overall.f1, 1.0);
    }

    #[test]
    fn score_invariants(seed in any::<u64>(), ng in 0usize..8, np in 0usize..8) {
        let (g, p) = pair(seed, ng, np, false);
        let r = ScoreReport::for_sentence(&g, &p, &match_graphs(&g, &p), false);
        for (_, s) in r.categories() {
            for x in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            if s.gold_total > 0 && s.pred_total > 0 {
                prop_assert_eq!(s.f1 == 0.0, s.matched == 0);
            }
        }
        let parts = r.concepts.matched + r.relations.matched
            + r.attributes_by_name.values().map(|s| s.matched).sum::<usize>();
        prop_assert_eq!(r.overall.matched, parts);
        let gold = r.concepts.gold_total + r.relations.gold_total
            + r.attributes_by_name.values().map(|s| s.gold_total).sum::<usize>();
        prop_assert_eq!(r.overall.gold_total, gold);
    }

    #[test]
    fn micro_average_sums_counts(seeds in proptest::collection::vec(any::<u64>(), 1..5)) {
        let reports: Vec<ScoreReport> = seeds.iter().map(|&s| {
            let (g, p) = pair(s, 4, 5, false);
            ScoreReport::for_sentence(&g, &p, &match_graphs(&g, &p), false)
        }).collect();
        let total = ScoreReport::aggregate(&reports);
        prop_assert_eq!(total.overall.matched, reports.iter().map(|r| r.overall.matched).sum::<usize>());
        prop_assert_eq!(total.overall.gold_total, reports.iter().map(|r| r.overall.gold_total).sum::<usize>());
        prop_assert_eq!(total.overall.pred_total, reports.iter().map(|r| r.overall.pred_total).sum::<usize>());
    }

    #[test]
    fn hill_climb_never_beats_exhaustive_search(seed in any::<u64>(), ng in 0usize..6, np in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, ng, "g").normalize_inverse_relations();
        let p = random_graph(&mut rng, np, "p").normalize_inverse_relations();
        let out = hill_climb_graphs(&g, &p, &SearchConfig::default());
        let recount = triple_match_count(&out.mapping, &g.extract_triples(), &p.extract_triples());
        prop_assert_eq!(out.objective, recount);
        prop_assert!(out.objective <= brute_force_optimum(&g, &p));
        for t in &out.traces {
            prop_assert!(t.accepted.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(t.accepted.first().is_none_or(|&a| a > t.initial));
        }
    }

    #[test]
    fn hill_climb_is_reproducible(seed in any::<u64>(), search_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 7, "g");
        let p = random_graph(&mut rng, 7, "p");
        let cfg = SearchConfig { seed: search_seed, ..SearchConfig::default() };
        prop_assert_eq!(hill_climb_graphs(&g, &p, &cfg), hill_climb_graphs(&g, &p, &cfg));
    }

    #[test]
    fn symmetrize_matches_max_scan(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_edges(&mut rng);
        prop_assert_eq!(symmetrize(edges.clone()), max_scan(&edges));
    }

    #[test]
    fn random_documents_round_trip(seeds in proptest::collection::vec(any::<u64>(), 1..4)) {
        let mut doc = UmrDocument::default();
        for (i, s) in seeds.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(*s);
            let n = rng.gen_range(1..8);
            let mut sent = random_sentence(&mut rng, n, &format!("s{}x", i + 1));
            sent.index = i + 1;
            sent.graph.sentence_index = i + 1;
            doc.sentences.push(sent);
        }
        let text = serialize_document(&doc);
        let back = parse_document(&text).unwrap();
        // node order follows the text after one cycle, so bytes settle then
        let settled = serialize_document(&back);
        prop_assert_eq!(serialize_document(&parse_document(&settled).unwrap()), settled);
        for (a, b) in doc.sentences.iter().zip(&back.sentences) {
            prop_assert_eq!(&a.graph, &b.graph);
            prop_assert_eq!(&a.alignments, &b.alignments);
            prop_assert_eq!(&a.tokens, &b.tokens);
        }
    }
}

fn random_edges(rng: &mut ChaCha8Rng) -> Vec<CandidateEdge> {
    let ng = rng.gen_range(1..=8);
    let np = rng.gen_range(1..=8);
    let mut edges = Vec::new();
    for g in 0..ng {
        for p in 0..np {
            if rng.gen_bool(0.5) {
                // few distinct keys, so ties are common
                let key = SimilarityKey {
                    concept_equal: rng.gen_bool(0.5),
                    strong: Fraction::new(rng.gen_range(0..3), 2),
                    weak: Fraction::new(rng.gen_range(0..2), 1),
                    word_length: rng.gen_range(0..3),
                };
                edges.push(CandidateEdge {
                    gold_var: format!("v{g}"),
                    pred_var: format!("v{p}"),
                    overlap: AlignmentSpan::new([1]),
                    key,
                });
            }
        }
    }
    edges
}

/// Repeatedly takes the best remaining edge whose endpoints are both free.
fn max_scan(edges: &[CandidateEdge]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut taken = vec![false; edges.len()];
    loop {
        let free = |e: &CandidateEdge| {
            out.iter()
                .all(|(g, p)| *g != e.gold_var && *p != e.pred_var)
        };
        let mut best: Option<usize> = None;
        for (i, e) in edges.iter().enumerate() {
            if taken[i] || !free(e) {
                continue;
            }
            if best.is_none_or(|b| acceptance_order(e, &edges[b]).is_lt()) {
                best = Some(i);
            }
        }
        let Some(b) = best else { break };
        taken[b] = true;
        out.push((edges[b].gold_var.clone(), edges[b].pred_var.clone()));
    }
    out
}
