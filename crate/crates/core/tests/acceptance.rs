//! Release gate: one test per acceptance criterion, each printing a
//! single PASS/FAIL line. Numeric thresholds and time budgets are part
//! of the contract.

mod common;

use std::collections::BTreeSet;
use std::panic::AssertUnwindSafe;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use veclogic::align::{analogy_rank, evaluate_alignment, vec_scores, EvalConfig, Quadruple};
use veclogic::embed::{
    build_vocab, load_table, save_table, sentences_from_text, train, EmbeddingTable, SgnsModel,
    TrainConfig,
};
use veclogic::graph::{Direction, GraphBuilder, KnowledgeGraph, PredicateRegistry};
use veclogic::guide::{guide, GuideRequest};
use veclogic::intensional::{DegreeModel, PatConfig, PatEvaluator};
use veclogic::parse::{lower_to_statements, parse_graph_tsv, parse_sexpr, pretty_print, LowerErrorKind, ParsedStatement};
use veclogic::planted::{generate_planted_graph, sample_random_quads, PlantedGraphSpec};
use veclogic::walk::{export_corpus, generate_walks, load_token_table, validate_corpus, WalkConfig};

fn criterion(name: &str, budget: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let result = std::panic::catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let ok = result.is_ok() && elapsed <= budget;
    println!(
        "acceptance: {name} ... {} ({elapsed:.2?}, budget {budget:.2?})",
        if ok { "PASS" } else { "FAIL" }
    );
    if let Err(e) = result {
        std::panic::resume_unwind(e);
    }
    assert!(
        elapsed <= budget,
        "{name} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

fn graph_from_tsv(text: &str, registry: PredicateRegistry) -> KnowledgeGraph {
    let mut b = GraphBuilder::new(registry);
    b.add_statements(&parse_graph_tsv(text).unwrap());
    b.freeze().unwrap()
}

fn corpus_text(g: &KnowledgeGraph, cfg: &WalkConfig) -> String {
    let walks = generate_walks(g, cfg).unwrap();
    let mut buf = Vec::new();
    export_corpus(&walks, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn bundled_excerpts_parse_faithfully() {
    criterion("parser fidelity on bundled fixtures", Duration::from_secs(1), || {
        let trail = include_str!("fixtures/inference_trail.scm");
        let exprs = parse_sexpr(trail).unwrap();
        assert_eq!(exprs.len(), 2);
        let outcome = lower_to_statements(&exprs);
        assert_eq!(outcome.statements.len(), 1);
        match &outcome.statements[0] {
            ParsedStatement::LinkDecl { link_type, src, dst, tv } => {
                assert_eq!(link_type, "MemberLink");
                assert_eq!(src.name, "ITPR3");
                assert_eq!(dst.name, "HAGR increased expression-with-aging GeneSet");
                let tv = tv.expect("explicit tv");
                assert_eq!(tv.strength, 0.12426852);
                assert_eq!(tv.confidence, 0.061859411);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(outcome.diagnostics.len(), 1);
        assert!(matches!(
            outcome.diagnostics[0].kind,
            LowerErrorKind::ArityError { found: 3, .. }
        ));

        // pretty-print, reparse: structurally identical
        let printed = pretty_print(&exprs);
        assert_eq!(parse_sexpr(&printed).unwrap(), exprs);

        // exported walk corpus form of the two path excerpts
        let paths = include_str!("fixtures/bio_paths.txt");
        let sentences = sentences_from_text(paths);
        assert_eq!(sentences.len(), 2);
        assert_eq!(sentences[0].len(), 21);
        assert_eq!(sentences[1].len(), 27);
        let vocab = build_vocab(&sentences, 1).unwrap();
        for token in ["GO:0044423", "inherits-geneontologyterm", "plasma_membrane", "BAP1"] {
            assert!(vocab.index.contains_key(token), "{token}");
        }
        let table = load_token_table(include_str!("fixtures/bio_tokens.tsv")).unwrap();
        assert_eq!(table["plasma_membrane"], "plasma membrane");
        assert_eq!(
            table["cytoplasmic_vesicle_membrane"],
            "cytoplasmic vesicle membrane"
        );
    });
}

#[test]
fn intensional_measures_match_bruteforce_reference() {
    criterion(
        "intensional measures vs brute force on 25 random graphs",
        Duration::from_secs(30),
        || {
            const TOL: f64 = 1e-9;
            for seed in 0..25u64 {
                let g = common::random_graph(seed);
                let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xaccede);
                let ids: Vec<_> = g.node_ids().collect();
                for model in [DegreeModel::InfoContent, DegreeModel::SurpriseRatio] {
                    let ev = PatEvaluator::new(&g, PatConfig { degree_model: model });
                    let oracle_pat = |id| common::pat(&g, &common::node_name(&g, id), model);
                    for &node in &ids {
                        let got = common::rekey(&g, &ev.pat(node));
                        let want = oracle_pat(node);
                        assert_eq!(
                            got.keys().collect::<Vec<_>>(),
                            want.keys().collect::<Vec<_>>()
                        );
                        for (k, d) in &got {
                            assert!((d - want[k]).abs() < TOL, "{seed} {model:?} {k:?}");
                        }
                    }
                    for _ in 0..8 {
                        let pick = |rng: &mut ChaCha12Rng| ids[rng.random_range(0..ids.len())];
                        let (a, b) = (pick(&mut rng), pick(&mut rng));
                        let (oa, ob) = (oracle_pat(a), oracle_pat(b));
                        let diff = common::rekey(
                            &g,
                            &veclogic::intensional::int_difference(&ev.pat(a), &ev.pat(b))
                                .unwrap(),
                        );
                        let odiff = common::difference(&oa, &ob);
                        assert_eq!(diff.len(), odiff.len());
                        for (k, d) in &diff {
                            assert!((d - odiff[k]).abs() < TOL);
                        }
                        assert!(
                            (ev.intensional_similarity(a, b) - common::similarity(&oa, &ob))
                                .abs()
                                < TOL
                        );
                        assert!(
                            (veclogic::intensional::fuzzy_inheritance(&ev.pat(a), &ev.pat(b))
                                .unwrap()
                                - common::inheritance(&oa, &ob))
                            .abs()
                                < TOL
                        );
                        let (x, y) = (pick(&mut rng), pick(&mut rng));
                        let quad_got = ev.diff_similarity(a, b, x, y);
                        let quad_want = common::similarity(
                            &common::difference(&oa, &ob),
                            &common::difference(&oracle_pat(x), &oracle_pat(y)),
                        );
                        assert!((quad_got - quad_want).abs() < TOL);
                    }
                }
            }
        },
    );
}

#[test]
fn sgns_gradients_match_finite_differences() {
    criterion(
        "analytic SGNS gradients vs central differences, 100 instances",
        Duration::from_secs(5),
        || {
            const DIM: usize = 10;
            const H: f64 = 1e-4;
            let mut worst: f64 = 0.0;
            for instance in 0..100u64 {
                let mut rng = ChaCha12Rng::seed_from_u64(instance);
                let vocab = rng.random_range(6..30usize);
                let mut model = SgnsModel::new(vocab, DIM, instance ^ 0x9e37);
                for slot in &mut model.output {
                    *slot = rng.random_range(-0.8..0.8);
                }
                // distinct rows so no parameter is shared between slots
                let mut picks: Vec<usize> = (0..vocab).collect();
                picks.shuffle(&mut rng);
                let center = picks[0];
                let context = picks[1];
                let negatives: Vec<usize> = picks[2..5].to_vec();
                let grads = model.gradients(center, context, &negatives);

                let mut check = |table_is_input: bool, row: usize, analytic: &[f64]| {
                    for d in 0..DIM {
                        let idx = row * DIM + d;
                        let slot = if table_is_input {
                            &mut model.input[idx]
                        } else {
                            &mut model.output[idx]
                        };
                        let saved = *slot;
                        *slot = saved + H;
                        let up = model.loss(center, context, &negatives);
                        {
                            let slot = if table_is_input {
                                &mut model.input[idx]
                            } else {
                                &mut model.output[idx]
                            };
                            *slot = saved - H;
                        }
                        let down = model.loss(center, context, &negatives);
                        {
                            let slot = if table_is_input {
                                &mut model.input[idx]
                            } else {
                                &mut model.output[idx]
                            };
                            *slot = saved;
                        }
                        let fd = (up - down) / (2.0 * H);
                        let scale = analytic[d].abs().max(fd.abs()).max(1e-8);
                        worst = worst.max((analytic[d] - fd).abs() / scale);
                    }
                };
                check(true, center, &grads.center);
                check(false, context, &grads.context);
                for (i, &neg) in negatives.iter().enumerate() {
                    check(false, neg, &grads.negatives[i]);
                }
            }
            assert!(worst < 1e-4, "max relative error {worst:e}");
        },
    );
}

#[test]
fn star_first_steps_are_uniform_and_walks_use_real_edges() {
    criterion(
        "uniform first steps on a 5-leaf star, validated corpus",
        Duration::from_secs(10),
        || {
            let tsv = "hub\tspoke\tleaf0\nhub\tspoke\tleaf1\nhub\tspoke\tleaf2\nhub\tspoke\tleaf3\nhub\tspoke\tleaf4\n";
            let g = graph_from_tsv(tsv, PredicateRegistry::default());
            let cfg = WalkConfig {
                walks_per_node: 50_000,
                walk_length_nodes: 2,
                direction: Direction::Both,
                rng_seed: 4,
                restart_on_deadend: false,
            };
            let walks = generate_walks(&g, &cfg).unwrap();
            let hub_starts: Vec<_> = walks
                .iter()
                .filter(|w| w.tokens[0] == "hub")
                .collect();
            assert_eq!(hub_starts.len(), 50_000);
            let mut counts = std::collections::BTreeMap::new();
            for w in &hub_starts {
                assert_eq!(w.tokens.len(), 3);
                *counts.entry(w.tokens[2].clone()).or_insert(0u64) += 1;
            }
            assert_eq!(counts.len(), 5);
            let expected = 50_000.0 / 5.0;
            let chi2: f64 = counts
                .values()
                .map(|&o| {
                    let d = o as f64 - expected;
                    d * d / expected
                })
                .sum();
            // df = 4, alpha = 0.01
            assert!(chi2 < 13.2767, "chi-square {chi2}");
            let violations = validate_corpus(&g, &walks, cfg.direction);
            assert!(violations.is_empty(), "{violations:?}");
        },
    );
}

struct Bench {
    graph: KnowledgeGraph,
    table: EmbeddingTable,
    planted: Vec<Quadruple>,
    random: Vec<Quadruple>,
}

fn bench() -> &'static Bench {
    static BENCH: OnceLock<Bench> = OnceLock::new();
    BENCH.get_or_init(|| {
        let spec = PlantedGraphSpec {
            category_pairs: 5,
            contexts: 2,
            members_per_concept: 6,
            props_per_block: 5,
            noise: 0.05,
            rng_seed: 1,
        };
        let (graph, planted) = generate_planted_graph(&spec).unwrap();
        let random = sample_random_quads(&graph, 75, 2);
        let text = corpus_text(
            &graph,
            &WalkConfig {
                walks_per_node: 20,
                walk_length_nodes: 10,
                direction: Direction::Both,
                rng_seed: 3,
                restart_on_deadend: false,
            },
        );
        let sentences = sentences_from_text(&text);
        let table = train(
            &sentences,
            &TrainConfig {
                dim: 32,
                epochs: 8,
                rng_seed: 4,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        Bench {
            graph,
            table,
            planted,
            random,
        }
    })
}

#[test]
fn planted_analogies_are_recovered_by_vectors() {
    criterion(
        "planted analogy ranks and residuals",
        Duration::from_secs(120),
        || {
            let b = bench();
            let mut ranked_high = 0;
            for quad in &b.planted {
                if analogy_rank(&b.table, quad).unwrap() <= 5 {
                    ranked_high += 1;
                }
            }
            assert!(
                ranked_high * 5 >= b.planted.len() * 4,
                "rank <= 5 for only {ranked_high}/{} planted quads",
                b.planted.len()
            );
            let mean = |quads: &[Quadruple]| -> f64 {
                quads
                    .iter()
                    .map(|q| vec_scores(&b.table, q).unwrap().0)
                    .sum::<f64>()
                    / quads.len() as f64
            };
            let planted_residual = mean(&b.planted);
            let random_residual = mean(&b.random);
            assert!(
                planted_residual < random_residual,
                "planted {planted_residual} vs random {random_residual}"
            );
        },
    );
}

#[test]
fn vector_and_logic_differences_correlate() {
    // benchmark preparation is shared with the analogy criterion and
    // accounted under its budget
    let b = bench();
    criterion(
        "spearman alignment with permutation null over 80 quads",
        Duration::from_secs(60),
        || {
            let mut quads = b.planted.clone();
            quads.extend(b.random.iter().cloned());
            assert!(quads.len() >= 40);
            let (_, summary) = evaluate_alignment(
                &b.graph,
                &b.table,
                &quads,
                &EvalConfig {
                    rng_seed: 5,
                    permutations: 100,
                    ..EvalConfig::default()
                },
            )
            .unwrap();
            let rho = summary.spearman.expect("non-degenerate");
            assert!(rho >= 0.5, "spearman {rho}");
            let within = summary
                .null_spearman
                .iter()
                .filter(|r| r.abs() < 0.3)
                .count();
            assert_eq!(summary.null_spearman.len(), 100);
            assert!(within >= 95, "null within threshold only {within}/100");
        },
    );
}

#[test]
fn guide_surfaces_chain_midpoint() {
    criterion(
        "chain midpoint among middle-step candidates, 10 seeds",
        Duration::from_secs(60),
        || {
            let tsv = "a\tnext\tb\nb\tnext\tc\nc\tnext\td\nd\tnext\te\n";
            let g = graph_from_tsv(tsv, PredicateRegistry::default());
            let mut hits = 0;
            for seed in 0..10u64 {
                let text = corpus_text(
                    &g,
                    &WalkConfig {
                        walks_per_node: 20,
                        walk_length_nodes: 10,
                        direction: Direction::Both,
                        rng_seed: seed,
                        restart_on_deadend: false,
                    },
                );
                let sentences = sentences_from_text(&text);
                let table = train(
                    &sentences,
                    &TrainConfig {
                        dim: 16,
                        epochs: 10,
                        rng_seed: seed,
                        ..TrainConfig::default()
                    },
                )
                .unwrap();
                let req = GuideRequest {
                    steps: 3,
                    k: 3,
                    ..GuideRequest::new(&["a"], "e")
                };
                let path = guide(&table, &req).unwrap();
                if path.steps[1].candidates.iter().any(|(t, _)| t == "c") {
                    hits += 1;
                }
            }
            assert!(hits >= 8, "midpoint found in {hits}/10 seeds");
        },
    );
}

#[test]
fn embedding_artifacts_round_trip_and_rank_exactly() {
    criterion(
        "embedding file round trip and exhaustive-scan parity",
        Duration::from_secs(10),
        || {
            // 50-token table with seeded random vectors
            let mut rng = ChaCha12Rng::seed_from_u64(90);
            let dim = 12;
            let tokens: Vec<String> = (0..50).map(|i| format!("t{i:02}")).collect();
            let table = EmbeddingTable {
                dim,
                index: tokens
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.clone(), i))
                    .collect(),
                counts: vec![1; tokens.len()],
                is_label: vec![false; tokens.len()],
                input: (0..tokens.len() * dim)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect(),
                output: Vec::new(),
                corpus_fingerprint: 0,
                config: None,
                tokens,
            };

            let mut first = Vec::new();
            save_table(&table, &mut first).unwrap();
            let loaded = load_table(std::str::from_utf8(&first).unwrap()).unwrap();
            let mut second = Vec::new();
            save_table(&loaded, &mut second).unwrap();
            assert_eq!(first, second, "file changed across save/load/save");

            let query: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cosines = table.cosines(&query);
            for k in [1usize, 5, 50] {
                let got = table.nearest(&query, k, &BTreeSet::new(), false);
                let mut order: Vec<usize> = (0..table.len()).collect();
                order.sort_by(|&i, &j| {
                    cosines[j].partial_cmp(&cosines[i]).unwrap().then(i.cmp(&j))
                });
                let want: Vec<(String, f64)> = order
                    .into_iter()
                    .take(k)
                    .map(|i| (table.tokens[i].clone(), cosines[i]))
                    .collect();
                assert_eq!(got, want, "k={k}");
            }
        },
    );
}
