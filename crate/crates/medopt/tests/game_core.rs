//! Core game representation: loading, treeplexes, evaluation and best
//! responses, each checked against independent oracles.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use medopt::game::{
    game_from_json, game_to_json, Evaluator, ExtensiveFormGame, GameError, NodeKind,
    SequenceFormStrategy, Treeplex, EMPTY_SEQ,
};
use medopt::gen::{kuhn3, matching_pennies, sheriff, SheriffParams};

const PENNIES_DOC: &str = r#"{
  "num_players": 2,
  "root": "r",
  "nodes": [
    {"id": "r", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["a", "b"]},
    {"id": "a", "kind": "agent", "owner": 2, "infoset": "p2", "children": ["aa", "ab"]},
    {"id": "b", "kind": "agent", "owner": 2, "infoset": "p2", "children": ["ba", "bb"]},
    {"id": "aa", "kind": "terminal", "utilities": [0.0, 1.0, -1.0]},
    {"id": "ab", "kind": "terminal", "utilities": [0.0, -1.0, 1.0]},
    {"id": "ba", "kind": "terminal", "utilities": [0.0, -1.0, 1.0]},
    {"id": "bb", "kind": "terminal", "utilities": [0.0, 1.0, -1.0]}
  ],
  "infosets": [
    {"id": "p1", "owner": 1, "actions": ["heads", "tails"]},
    {"id": "p2", "owner": 2, "actions": ["heads", "tails"]}
  ]
}"#;

/// Straight-line oracle for expected utilities: enumerate terminals, walk
/// each root-to-leaf path, and multiply chance and per-agent behavioral
/// probabilities along it. Independent of the evaluator's terminal maps.
fn path_enumeration_utilities(
    game: &ExtensiveFormGame,
    tps: &[Arc<Treeplex>],
    profile: &[SequenceFormStrategy],
) -> Vec<f64> {
    let mut out = vec![0.0; game.num_agents()];
    for (z, &node) in game.terminals().iter().enumerate() {
        let path = game.path_to(node);
        let mut reach = 1.0;
        let mut held: Vec<usize> = vec![EMPTY_SEQ; game.num_agents()];
        for (n, slot) in path {
            match game.node(n).kind() {
                NodeKind::Chance => reach *= game.chance_probs(n)[slot],
                NodeKind::Agent => {
                    let agent = game.node(n).agent();
                    let iid = game.node(n).infoset();
                    let idx = tps[agent].infoset_index(iid).unwrap();
                    let inf = &tps[agent].infosets()[idx];
                    let parent_mass = profile[agent].values[held[agent]];
                    let seq_mass = profile[agent].values[inf.seq_start + slot];
                    let behavioral = if parent_mass > 0.0 {
                        seq_mass / parent_mass
                    } else {
                        0.0
                    };
                    reach *= behavioral;
                    held[agent] = inf.seq_start + slot;
                }
                NodeKind::Terminal => unreachable!(),
            }
        }
        for (agent, acc) in out.iter_mut().enumerate() {
            *acc += reach * game.utility(z)[agent];
        }
    }
    out
}

fn uniform_profile(ev: &Evaluator, num_agents: usize) -> Vec<SequenceFormStrategy> {
    (0..num_agents)
        .map(|a| SequenceFormStrategy::uniform(ev.treeplex(a)))
        .collect()
}

#[test]
fn load_matching_pennies_document() {
    let game = game_from_json(PENNIES_DOC).unwrap();
    assert_eq!(game.num_players(), 2);
    assert_eq!(game.num_terminals(), 4);
}

#[test]
fn bad_chance_mass_is_rejected_with_node_name() {
    let doc = r#"{
      "num_players": 1,
      "root": "c0",
      "nodes": [
        {"id": "c0", "kind": "chance", "children": ["t0", "t1"], "chance_probs": [0.6, 0.5]},
        {"id": "t0", "kind": "terminal", "utilities": [0.0, 1.0]},
        {"id": "t1", "kind": "terminal", "utilities": [0.0, 0.0]}
      ],
      "infosets": []
    }"#;
    let err = game_from_json(doc).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("c0"), "{msg}");
    assert!(msg.contains("mass 1.1"), "{msg}");
}

#[test]
fn imperfect_recall_player_is_rejected_at_load() {
    // One player who forgets its own first move: both second-level nodes
    // share an infoset despite different own histories.
    let doc = r#"{
      "num_players": 1,
      "root": "r",
      "nodes": [
        {"id": "r", "kind": "agent", "owner": 1, "infoset": "first", "children": ["x", "y"]},
        {"id": "x", "kind": "agent", "owner": 1, "infoset": "second", "children": ["t0", "t1"]},
        {"id": "y", "kind": "agent", "owner": 1, "infoset": "second", "children": ["t2", "t3"]},
        {"id": "t0", "kind": "terminal", "utilities": [0.0, 0.0]},
        {"id": "t1", "kind": "terminal", "utilities": [0.0, 1.0]},
        {"id": "t2", "kind": "terminal", "utilities": [0.0, 2.0]},
        {"id": "t3", "kind": "terminal", "utilities": [0.0, 3.0]}
      ],
      "infosets": [
        {"id": "first", "owner": 1, "actions": ["l", "r"]},
        {"id": "second", "owner": 1, "actions": ["l", "r"]}
      ]
    }"#;
    let err = game_from_json(doc).unwrap_err();
    assert!(err.to_string().contains("lacks perfect recall"), "{err}");
}

#[test]
fn mediator_imperfect_recall_allowed_at_load_rejected_at_treeplex() {
    // Same shape, but the forgetful agent is the mediator (owner 0).
    let doc = r#"{
      "num_players": 1,
      "root": "r",
      "nodes": [
        {"id": "r", "kind": "agent", "owner": 0, "infoset": "first", "children": ["x", "y"]},
        {"id": "x", "kind": "agent", "owner": 0, "infoset": "second", "children": ["t0", "t1"]},
        {"id": "y", "kind": "agent", "owner": 0, "infoset": "second", "children": ["t2", "t3"]},
        {"id": "t0", "kind": "terminal", "utilities": [0.0, 0.0]},
        {"id": "t1", "kind": "terminal", "utilities": [0.0, 1.0]},
        {"id": "t2", "kind": "terminal", "utilities": [0.0, 2.0]},
        {"id": "t3", "kind": "terminal", "utilities": [0.0, 3.0]}
      ],
      "infosets": [
        {"id": "first", "owner": 0, "actions": ["l", "r"]},
        {"id": "second", "owner": 0, "actions": ["l", "r"]}
      ]
    }"#;
    let game = game_from_json(doc).unwrap();
    let err = Treeplex::for_agent(&game, 0).unwrap_err();
    assert!(matches!(err, GameError::ImperfectRecall { agent: 0 }));
}

#[test]
fn kuhn_rank5_round_trips_through_the_document_format() {
    let game = kuhn3(5).unwrap();
    let doc = game_to_json(&game);
    let reloaded = game_from_json(&doc).unwrap();
    // Structural equality: same shape, same infosets, same utilities in the
    // same depth-first order.
    assert_eq!(game.num_nodes(), reloaded.num_nodes());
    assert_eq!(game.num_terminals(), reloaded.num_terminals());
    assert_eq!(game.infosets().len(), reloaded.infosets().len());
    for id in 0..game.num_nodes() {
        let (a, b) = (game.node(id), reloaded.node(id));
        assert_eq!(a.kind(), b.kind());
        assert_eq!(game.children(id), reloaded.children(id));
        match a.kind() {
            NodeKind::Agent => {
                assert_eq!(a.agent(), b.agent());
                assert_eq!(a.infoset(), b.infoset());
            }
            NodeKind::Terminal => {
                assert_eq!(game.utility(a.terminal_index()), reloaded.utility(b.terminal_index()));
            }
            NodeKind::Chance => {
                assert_eq!(game.chance_probs(id), reloaded.chance_probs(id));
            }
        }
    }
}

#[test]
fn pennies_treeplex_has_three_sequences() {
    let game = matching_pennies();
    let tp = Treeplex::for_agent(&game, 1).unwrap();
    assert_eq!(tp.num_sequences(), 3);
    assert_eq!(tp.num_infosets(), 1);
}

#[test]
fn non_acting_agent_has_trivial_treeplex() {
    // Agent 0 never acts in matching pennies.
    let game = matching_pennies();
    let tp = Treeplex::for_agent(&game, 0).unwrap();
    assert_eq!(tp.num_sequences(), 1);
}

#[test]
fn sheriff_sequence_counts_match_exhaustive_path_walk() {
    let game = Arc::new(
        sheriff(SheriffParams {
            max_items: 1,
            max_bribe: 2,
            rounds: 1,
        })
        .unwrap(),
    );
    // Oracle: walk every root-to-terminal path collecting distinct
    // (infoset, action) pairs per agent, plus the empty sequence.
    let mut distinct: Vec<std::collections::HashSet<(usize, usize)>> = vec![Default::default(); 3];
    for &t in game.terminals() {
        for (node, slot) in game.path_to(t) {
            if game.node(node).kind() == NodeKind::Agent {
                distinct[game.node(node).agent()].insert((game.node(node).infoset(), slot));
            }
        }
    }
    for agent in 1..=2 {
        let tp = Treeplex::for_agent(&game, agent).unwrap();
        assert_eq!(
            tp.num_sequences(),
            distinct[agent].len() + 1,
            "agent {agent}"
        );
    }
    // Smuggler: load (2) + 2 proposal infosets x 3 bribes = 8 sequences + empty.
    assert_eq!(Treeplex::for_agent(&game, 1).unwrap().num_sequences(), 9);
    // Sheriff: 3 response infosets x 2 + 3 inspect infosets x 2 + empty.
    assert_eq!(Treeplex::for_agent(&game, 2).unwrap().num_sequences(), 13);
}

#[test]
fn uniform_pennies_is_worth_zero() {
    let game = Arc::new(matching_pennies());
    let ev = Evaluator::new(game).unwrap();
    let profile = uniform_profile(&ev, 3);
    let u = ev.expected_utilities(&profile).unwrap();
    assert!(u[1].abs() < 1e-12 && u[2].abs() < 1e-12);
}

#[test]
fn pure_profile_reaches_unique_terminal() {
    let game = Arc::new(matching_pennies());
    let ev = Evaluator::new(game.clone()).unwrap();
    for first in 0..2usize {
        for second in 0..2usize {
            let p1 = SequenceFormStrategy::pure(ev.treeplex(1), &[first]);
            let p2 = SequenceFormStrategy::pure(ev.treeplex(2), &[second]);
            let profile = vec![
                SequenceFormStrategy::uniform(ev.treeplex(0)),
                p1,
                p2,
            ];
            let u = ev.expected_utilities(&profile).unwrap();
            let expect = if first == second { 1.0 } else { -1.0 };
            assert_eq!(u[1], expect);
            assert_eq!(u[2], -expect);
        }
    }
}

#[test]
fn kuhn_rank5_uniform_matches_expectimax_enumeration() {
    let game = Arc::new(kuhn3(5).unwrap());
    let ev = Evaluator::new(game.clone()).unwrap();
    let profile = uniform_profile(&ev, 4);
    let fast = ev.expected_utilities(&profile).unwrap();

    // Expectimax oracle: recursive averaging, uniform at decision nodes.
    fn expectimax(game: &ExtensiveFormGame, node: usize, out: &mut [f64], reach: f64) {
        let n = game.node(node);
        match n.kind() {
            NodeKind::Terminal => {
                for (acc, u) in out.iter_mut().zip(game.utility(n.terminal_index())) {
                    *acc += reach * u;
                }
            }
            NodeKind::Chance => {
                let probs = game.chance_probs(node);
                for (slot, &c) in game.children(node).iter().enumerate() {
                    expectimax(game, c, out, reach * probs[slot]);
                }
            }
            NodeKind::Agent => {
                let k = n.num_children() as f64;
                for &c in game.children(node) {
                    expectimax(game, c, out, reach / k);
                }
            }
        }
    }
    let mut slow = vec![0.0; 4];
    expectimax(&game, game.root(), &mut slow, 1.0);
    for agent in 0..4 {
        assert!(
            (fast[agent] - slow[agent]).abs() < 1e-12,
            "agent {agent}: {} vs {}",
            fast[agent],
            slow[agent]
        );
    }
}

#[test]
fn expected_utilities_match_path_enumeration_on_random_profiles() {
    let games: Vec<Arc<ExtensiveFormGame>> = vec![
        Arc::new(matching_pennies()),
        Arc::new(kuhn3(3).unwrap()),
        Arc::new(
            sheriff(SheriffParams {
                max_items: 1,
                max_bribe: 2,
                rounds: 1,
            })
            .unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for game in games {
        let ev = Evaluator::new(game.clone()).unwrap();
        let tps: Vec<Arc<Treeplex>> = (0..game.num_agents())
            .map(|a| ev.treeplex(a).clone())
            .collect();
        for _ in 0..20 {
            let profile: Vec<SequenceFormStrategy> = (0..game.num_agents())
                .map(|a| SequenceFormStrategy::random(&tps[a], &mut rng))
                .collect();
            let fast = ev.expected_utilities(&profile).unwrap();
            let slow = path_enumeration_utilities(&game, &tps, &profile);
            for agent in 0..game.num_agents() {
                assert!((fast[agent] - slow[agent]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn best_response_values_for_pennies() {
    let game = Arc::new(matching_pennies());
    let ev = Evaluator::new(game).unwrap();
    // Against a uniform opponent every reply is worth zero.
    let profile = uniform_profile(&ev, 3);
    let (_, v) = ev.best_response(1, &profile).unwrap();
    assert!(v.abs() < 1e-12);

    // Against heads with probability 0.9, matching exploits for 0.8.
    let mut opp = vec![1.0, 0.9, 0.1];
    let profile = vec![
        SequenceFormStrategy::uniform(ev.treeplex(0)),
        SequenceFormStrategy::uniform(ev.treeplex(1)),
        SequenceFormStrategy::new(2, std::mem::take(&mut opp)),
    ];
    let (br, v) = ev.best_response(1, &profile).unwrap();
    assert!((v - 0.8).abs() < 1e-12);
    // Enumerating both pure replies confirms the value.
    for (choice, expect) in [(0usize, 0.8), (1usize, -0.8)] {
        let mut prof = profile.clone();
        prof[1] = SequenceFormStrategy::pure(ev.treeplex(1), &[choice]);
        let u = ev.expected_utilities(&prof).unwrap();
        assert!((u[1] - expect).abs() < 1e-12);
    }
    assert_eq!(br.values, vec![1.0, 1.0, 0.0]);
}

#[test]
fn best_response_beats_brute_force_enumeration_on_kuhn() {
    // Player 1's best response against uniform others equals the max over
    // all of player 1's pure strategies.
    let game = Arc::new(kuhn3(3).unwrap());
    let ev = Evaluator::new(game.clone()).unwrap();
    let profile = uniform_profile(&ev, 4);
    let (_, fast) = ev.best_response(1, &profile).unwrap();

    let pures = medopt::oracle::enumerate_pure_strategies(ev.treeplex(1), 1_000_000).unwrap();
    let mut best = f64::NEG_INFINITY;
    for x in &pures {
        let mut prof = profile.clone();
        prof[1] = x.clone();
        best = best.max(ev.expected_utilities(&prof).unwrap()[1]);
    }
    assert!((fast - best).abs() < 1e-9, "{fast} vs {best}");
}

#[test]
fn best_response_dominates_random_mixed_strategies() {
    let game = Arc::new(kuhn3(3).unwrap());
    let ev = Evaluator::new(game.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let profile = uniform_profile(&ev, 4);
    for agent in 1..=3usize {
        let (_, br) = ev.best_response(agent, &profile).unwrap();
        for _ in 0..100 {
            let mut prof = profile.clone();
            prof[agent] = SequenceFormStrategy::random(ev.treeplex(agent), &mut rng);
            let u = ev.expected_utilities(&prof).unwrap();
            assert!(u[agent] <= br + 1e-9);
        }
    }
}

#[test]
fn best_response_is_bit_for_bit_deterministic() {
    let game = Arc::new(kuhn3(4).unwrap());
    let ev = Evaluator::new(game.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let profile: Vec<SequenceFormStrategy> = (0..4)
        .map(|a| SequenceFormStrategy::random(ev.treeplex(a), &mut rng))
        .collect();
    let (s1, v1) = ev.best_response(2, &profile).unwrap();
    let (s2, v2) = ev.best_response(2, &profile).unwrap();
    assert_eq!(s1.values, s2.values);
    assert_eq!(v1.to_bits(), v2.to_bits());
}

#[test]
fn behavioral_conversion_conserves_flow() {
    let game = Arc::new(kuhn3(4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for agent in 1..=3usize {
        let tp = Treeplex::for_agent(&game, agent).unwrap();
        for _ in 0..20 {
            SequenceFormStrategy::random(&tp, &mut rng)
                .validate(&tp, 1e-9)
                .unwrap();
        }
    }
}

#[test]
fn direct_strategy_tables_round_trip_from_documents() {
    // A document with direct_strategy lifts into an augmented game.
    let mut doc: serde_json::Value = serde_json::from_str(PENNIES_DOC).unwrap();
    doc["direct_strategy"] = serde_json::json!({"1": {"p1": 0}, "2": {"p2": 1}});
    let text = doc.to_string();
    let (_game, parsed) = medopt::game::load_document(&text).unwrap();
    let ds = parsed.direct_strategy.unwrap();
    assert_eq!(ds["1"]["p1"], 0);
    assert_eq!(ds["2"]["p2"], 1);
    let _ = HashMap::<String, usize>::new();
}
