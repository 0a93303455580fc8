//! The exact LP oracle: enumeration counts against independent oracles,
//! self-consistency of optimal solutions, and the imperfect-recall path.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use medopt::encode::{
    encode_nf_correlated, CorrelationConcept, MediatorAugmentedGame, NormalFormSpec, ObjectiveSpec,
};
use medopt::game::{game_from_json, SequenceFormStrategy, Treeplex};
use medopt::gen::{kuhn3, random_normal_form};
use medopt::oracle;

fn nf_instance(seed: u64, actions: usize, concept: CorrelationConcept) -> Arc<MediatorAugmentedGame> {
    Arc::new(
        encode_nf_correlated(NormalFormSpec {
            actions: vec![actions; 2],
            utilities: random_normal_form(seed, 2, actions),
            concept,
            objective: ObjectiveSpec::Welfare,
        })
        .unwrap(),
    )
}

#[test]
fn single_infoset_enumeration() {
    // One infoset with three actions has exactly three pure strategies.
    let m = nf_instance(1, 3, CorrelationConcept::Ce);
    // Player 1 under CE has three infosets (one per recommendation), each
    // with three actions: 27 sequence-form-distinct strategies.
    let pures = oracle::enumerate_pure_deviations(&m, 1, 10_000).unwrap();
    assert_eq!(pures.len(), 27);
    // The mediator has one infoset with nine actions: nine pure strategies.
    let med = oracle::enumerate_pure_strategies(m.mediator_treeplex(), 10_000).unwrap();
    assert_eq!(med.len(), 9);
    for s in &med {
        assert!(s.is_pure());
    }
}

#[test]
fn sequential_infosets_multiply_only_when_reachable() {
    // Player with two sequential decisions, the second reachable only
    // after the first's action 0: strategies = 2 (action 1 cuts the tree)
    // + 2 (action 0 then either) = 4... with both infosets always
    // reachable through action 0 only: 1 * 2 + 1 = 3? Enumerate and check
    // against brute-force dedup.
    let doc = r#"{
      "num_players": 1,
      "root": "r",
      "nodes": [
        {"id": "r", "kind": "agent", "owner": 1, "infoset": "a", "children": ["x", "t0"]},
        {"id": "x", "kind": "agent", "owner": 1, "infoset": "b", "children": ["t1", "t2"]},
        {"id": "t0", "kind": "terminal", "utilities": [0.0, 0.0]},
        {"id": "t1", "kind": "terminal", "utilities": [0.0, 1.0]},
        {"id": "t2", "kind": "terminal", "utilities": [0.0, 2.0]}
      ],
      "infosets": [
        {"id": "a", "owner": 1, "actions": ["go", "stop"]},
        {"id": "b", "owner": 1, "actions": ["l", "r"]}
      ]
    }"#;
    let game = Arc::new(game_from_json(doc).unwrap());
    let tp = Treeplex::for_agent(&game, 1).unwrap();
    let pures = oracle::enumerate_pure_strategies(&tp, 100).unwrap();
    // go-l, go-r, stop: 3 sequence-form-distinct plans.
    assert_eq!(pures.len(), 3);
    assert_eq!(oracle::count_pure_strategies(&tp), 3);
}

#[test]
fn kuhn_counts_match_assignment_dedup_oracle() {
    // Independent oracle: enumerate full per-infoset assignments, map each
    // to its sequence form, dedup.
    let game = Arc::new(kuhn3(3).unwrap());
    for player in 1..=3usize {
        let tp = Treeplex::for_agent(&game, player).unwrap();
        let fast = oracle::count_pure_strategies(&tp);

        let infosets = tp.num_infosets();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let combos = 1usize << infosets; // all action sets are binary
        for mask in 0..combos {
            let choices: Vec<usize> = (0..infosets).map(|i| (mask >> i) & 1).collect();
            let s = SequenceFormStrategy::pure(&tp, &choices);
            seen.insert(s.values.iter().map(|&v| v as u8).collect());
        }
        assert_eq!(fast, seen.len() as u128, "player {player}");
        let enumerated = oracle::enumerate_pure_strategies(&tp, 1_000_000).unwrap();
        assert_eq!(enumerated.len() as u128, fast);
        // Duplicate-free.
        let distinct: HashSet<Vec<u8>> = enumerated
            .iter()
            .map(|s| s.values.iter().map(|&v| v as u8).collect())
            .collect();
        assert_eq!(distinct.len(), enumerated.len());
    }
}

#[test]
fn enumeration_cap_is_enforced() {
    let game = Arc::new(kuhn3(5).unwrap());
    let tp = Treeplex::for_agent(&game, 1).unwrap();
    let total = oracle::count_pure_strategies(&tp);
    assert!(total > 4);
    let err = oracle::enumerate_pure_strategies(&tp, 4).unwrap_err();
    assert!(matches!(err, oracle::OracleError::CapExceeded(_)));
}

#[test]
fn oracle_solution_is_self_consistent() {
    for seed in [5u64, 6, 7] {
        let m = nf_instance(seed, 3, CorrelationConcept::Ce);
        let sol = oracle::solve_lp(&m, &oracle::OracleConfig::default()).unwrap();
        let mu = sol.strategy.sequence().unwrap();
        mu.validate(m.mediator_treeplex(), 1e-8).unwrap();
        // Achieves its own value.
        let objective = m.objective(mu).unwrap();
        assert!((objective - sol.value).abs() < 1e-8);
        // Satisfies every enumerated constraint.
        for i in 1..=2 {
            let devs = oracle::enumerate_pure_deviations(&m, i, 10_000).unwrap();
            let base = m.utilities_direct(mu).unwrap();
            for x in &devs {
                let u = m.wired_deviator(i).utilities(mu, Some(x)).unwrap();
                assert!(
                    u[i] - base[i] <= 1e-8,
                    "seed {seed}: constraint violated by {}",
                    u[i] - base[i]
                );
            }
        }
    }
}

#[test]
fn exact_mode_agrees_with_float_mode() {
    let m = nf_instance(11, 2, CorrelationConcept::Cce);
    let float = oracle::solve_lp(&m, &oracle::OracleConfig::default()).unwrap();
    let exact = oracle::solve_lp(
        &m,
        &oracle::OracleConfig {
            exact: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((float.value - exact.value).abs() < 1e-9);
}

#[test]
fn lagrangian_value_is_flat_above_the_dual_bound() {
    // For multipliers above the certified dual bound, the saddle value of
    // the direct Lagrangian equals the constrained optimum: check by
    // evaluating the Lagrangian of the oracle's own optimal strategy.
    let m = nf_instance(13, 2, CorrelationConcept::Ce);
    let sol = oracle::solve_lp(&m, &oracle::OracleConfig::default()).unwrap();
    let mu = sol.strategy.sequence().unwrap();
    for factor in [1.5, 3.0, 6.0] {
        let lambda = sol.dual_bound.max(0.1) * factor;
        // At the optimum all gains are zero, so the Lagrangian value at the
        // oracle strategy equals the optimum for any multiplier.
        let mut value = m.objective(mu).unwrap();
        for i in 1..=2 {
            value -= lambda * m.deviation_gain(mu, i).unwrap().max(0.0);
        }
        assert!((value - sol.value).abs() < 1e-7);
    }
}

#[test]
fn imperfect_recall_mediator_takes_the_enumeration_path() {
    // A mediator that forgets its first move: recommend one of two
    // profiles, then pick a bonus action without remembering the profile.
    // Player 1 just ratifies. The enumerated-mixture oracle must solve it.
    let doc = r#"{
      "num_players": 1,
      "root": "r",
      "nodes": [
        {"id": "r", "kind": "agent", "owner": 0, "infoset": "pick", "children": ["x", "y"]},
        {"id": "x", "kind": "agent", "owner": 0, "infoset": "bonus", "children": ["xp", "xq"]},
        {"id": "y", "kind": "agent", "owner": 0, "infoset": "bonus", "children": ["yp", "yq"]},
        {"id": "xp", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["t0", "t1"]},
        {"id": "xq", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["t2", "t3"]},
        {"id": "yp", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["t4", "t5"]},
        {"id": "yq", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["t6", "t7"]},
        {"id": "t0", "kind": "terminal", "utilities": [1.0, 1.0]},
        {"id": "t1", "kind": "terminal", "utilities": [0.0, 0.5]},
        {"id": "t2", "kind": "terminal", "utilities": [0.5, 0.2]},
        {"id": "t3", "kind": "terminal", "utilities": [0.0, 0.1]},
        {"id": "t4", "kind": "terminal", "utilities": [0.8, 0.3]},
        {"id": "t5", "kind": "terminal", "utilities": [0.0, 0.9]},
        {"id": "t6", "kind": "terminal", "utilities": [0.2, 0.4]},
        {"id": "t7", "kind": "terminal", "utilities": [0.0, 0.0]}
      ],
      "infosets": [
        {"id": "pick", "owner": 0, "actions": ["x", "y"]},
        {"id": "bonus", "owner": 0, "actions": ["p", "q"]},
        {"id": "p1", "owner": 1, "actions": ["stay", "go"]}
      ]
    }"#;
    let game = Arc::new(game_from_json(doc).unwrap());
    // The structured path refuses imperfect recall.
    assert!(MediatorAugmentedGame::from_game(game.clone(), vec![HashMap::from([(2, 0)])]).is_err());
    let sol = oracle::solve_lp_enumerated(
        &game,
        &[HashMap::from([(2, 0)])],
        &oracle::OracleConfig::default(),
    )
    .unwrap();
    assert!(sol.value.is_finite());
    if let oracle::MediatorSolution::Mixture(mix) = &sol.strategy {
        let total: f64 = mix.iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-8);
    } else {
        panic!("expected a mixture");
    }
}
