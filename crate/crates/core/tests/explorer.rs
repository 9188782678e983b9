mod common;

use common::{fig_tree, catalog_kb};
use spmiti_core::explorer::{
    explore, explore_traced, optimize_monolithic, optimize_per_ccs, AttackBudget, Engine, Game,
    IndexGame, Margins, ScriptedGame, SearchConfig, SourceSpec, Toggles, DOT_NODE_LIMIT,
};
use spmiti_core::index::sp_index;
use spmiti_core::prep::compute_ccs;
use spmiti_core::solspace::SpaceConfig;
use spmiti_core::synth::{candidates, clustered, random_small, ClusterShape, Instance};
use spmiti_core::{ApplicationModel, ConcreteAttackPath, Error, Solution, State};

/// Full-tree evaluation straight from the index: every sequence of
/// `depth - 1` attack paths aimed at an asset.
fn brute_force(inst: &Instance, sols: &[Solution], depth: u32) -> f64 {
    let m = &inst.model;
    let paths: Vec<usize> = (0..m.attack_paths().len())
        .filter(|&p| m.assets().contains(&m.attack_paths()[p].target))
        .collect();
    fn min_over(
        m: &ApplicationModel,
        inst: &Instance,
        s: &Solution,
        seq: &mut Vec<usize>,
        left: u32,
        paths: &[usize],
    ) -> f64 {
        if left == 0 || paths.is_empty() {
            let state = State::new(
                s.clone(),
                seq.iter()
                    .map(|&p| ConcreteAttackPath::unit(&m.attack_paths()[p]))
                    .collect(),
            );
            return sp_index(&state, m, &inst.kb).unwrap().value;
        }
        let mut best = f64::INFINITY;
        for &p in paths {
            seq.push(p);
            best = best.min(min_over(m, inst, s, seq, left - 1, paths));
            seq.pop();
        }
        best
    }
    sols.iter()
        .map(|s| min_over(m, inst, s, &mut Vec::new(), depth - 1, &paths))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn figure_tree_is_reproduced() {
    let kb = catalog_kb();
    let model = fig_tree(&kb);
    let game = ScriptedGame::new(&model).unwrap();
    let sols = game.solutions();
    for cfg in [
        SearchConfig::plain(4),
        SearchConfig::optimized(4, Toggles::EXACT),
        SearchConfig::optimized(4, Toggles::NONE),
    ] {
        let r = explore(&game, &sols, &cfg).unwrap();
        assert_eq!(r.best.residual, 8.0);
        assert_eq!(r.best.label.as_deref(), Some("S3"));
        assert_eq!(r.best.base, 15.0);
        let ids: Vec<&str> = r
            .attack_paths
            .iter()
            .map(|&p| model.attack_paths()[p].id.as_str())
            .collect();
        assert_eq!(ids, ["K1", "K1", "K2"]);
        let by_label: Vec<(String, f64)> = r
            .ranked
            .iter()
            .map(|x| (x.label.clone().unwrap(), x.residual))
            .collect();
        assert_eq!(
            by_label,
            [
                ("S3".to_string(), 8.0),
                ("S1".to_string(), 7.0),
                ("S2".to_string(), 5.0)
            ]
        );
    }
}

#[test]
fn figure_trace_has_every_node() {
    let kb = catalog_kb();
    let model = fig_tree(&kb);
    let game = ScriptedGame::new(&model).unwrap();
    let r = explore_traced(&game, &game.solutions(), &SearchConfig::plain(4)).unwrap();
    let t = r.trace.unwrap();
    assert_eq!(t.len(), 22);
    assert_eq!(r.nodes_visited, 22);
    let leaf = t.winning_leaf().unwrap();
    assert_eq!(t.node_label(leaf), "K2(a2,confidentiality):8");
    let dot = t.to_dot(DOT_NODE_LIMIT).unwrap();
    assert!(dot.contains("root:8"));
    assert!(dot.contains("S3:8(15)"));
    assert!(dot.contains("S1:7(18)"));
}

#[test]
fn plain_and_optimized_mark_the_same_leaf() {
    let kb = catalog_kb();
    let model = fig_tree(&kb);
    let game = ScriptedGame::new(&model).unwrap();
    let sols = game.solutions();
    let a = explore_traced(&game, &sols, &SearchConfig::plain(4)).unwrap();
    let b = explore_traced(&game, &sols, &SearchConfig::optimized(4, Toggles::EXACT)).unwrap();
    let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
    let path = |t: &spmiti_core::explorer::Trace| {
        let mut labels = Vec::new();
        let mut at = t.winning_leaf();
        while let Some(n) = at {
            labels.push(t.nodes[n].label.clone());
            at = t.nodes[n].parent;
        }
        labels
    };
    assert_eq!(path(&ta), path(&tb));
}

#[test]
fn depth_one_picks_the_best_base() {
    for seed in 0..30 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        let r = explore(&game, &sols, &SearchConfig::plain(1)).unwrap();
        let best_base = sols
            .iter()
            .map(|s| {
                sp_index(&State::new(s.clone(), vec![]), &inst.model, &inst.kb)
                    .unwrap()
                    .value
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.best.residual, best_base);
        assert!(r.best.attack.is_empty());
        let d = explore_traced(&game, &sols, &SearchConfig::plain(1)).unwrap();
        let t = d.trace.unwrap();
        // a star: the root and one leaf per solution
        assert_eq!(t.nodes[0].children.len(), sols.len());
        assert!(t.nodes[1..].iter().all(|n| n.children.is_empty()));
    }
}

#[test]
fn plain_engine_matches_brute_force() {
    for seed in 0..60 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        for depth in 1..=4 {
            let r = explore(&game, &sols, &SearchConfig::plain(depth)).unwrap();
            assert_eq!(
                r.best.residual,
                brute_force(&inst, &sols, depth),
                "seed {seed} depth {depth}"
            );
            for x in &r.ranked {
                assert!(x.residual <= x.base);
            }
        }
    }
}

#[test]
fn exact_optimizations_keep_the_value() {
    let sets = [
        Toggles::EXACT,
        Toggles {
            alpha_beta: true,
            ..Toggles::NONE
        },
        Toggles {
            tt: true,
            ..Toggles::NONE
        },
        Toggles::ALL,
    ];
    for seed in 0..80 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        for depth in 1..=4 {
            let plain = explore(&game, &sols, &SearchConfig::plain(depth)).unwrap();
            for t in sets {
                for top_n in [1, 10] {
                    let mut cfg = SearchConfig::optimized(depth, t);
                    cfg.top_n = top_n;
                    cfg.aspiration_half_width = 0.25;
                    let r = explore(&game, &sols, &cfg).unwrap();
                    assert_eq!(
                        r.best.residual, plain.best.residual,
                        "seed {seed} depth {depth} {t:?}"
                    );
                    assert!(!r.approximate);
                    if t.alpha_beta && !t.aspiration {
                        assert!(r.nodes_visited <= plain.nodes_visited);
                    }
                    // the reported attack achieves the reported value
                    let state = r.optimal_state(&inst.model);
                    let v = sp_index(&state, &inst.model, &inst.kb).unwrap().value;
                    assert_eq!(v, r.best.residual);
                }
            }
        }
    }
}

#[test]
fn top_list_matches_the_plain_ranking() {
    for seed in 0..40 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        let plain = explore(&game, &sols, &SearchConfig::plain(3)).unwrap();
        let mut cfg = SearchConfig::optimized(3, Toggles::EXACT);
        cfg.aspiration_half_width = 0.1;
        let r = explore(&game, &sols, &cfg).unwrap();
        let a: Vec<(&Solution, f64)> = plain
            .ranked
            .iter()
            .map(|x| (&x.solution, x.residual))
            .collect();
        let b: Vec<(&Solution, f64)> = r.ranked.iter().map(|x| (&x.solution, x.residual)).collect();
        assert_eq!(a, b, "seed {seed}");
    }
}

#[test]
fn warm_start_center_does_not_change_the_value() {
    for seed in 0..30 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        let plain = explore(&game, &sols, &SearchConfig::plain(3)).unwrap();
        for center in [-5000.0, -1000.0, 0.0, 3.0, 1e6] {
            let mut cfg = SearchConfig::optimized(3, Toggles::EXACT);
            cfg.aspiration_center = Some(center);
            let r = explore(&game, &sols, &cfg).unwrap();
            assert_eq!(r.best.residual, plain.best.residual);
        }
    }
}

#[test]
fn zero_margins_are_speculative_on_scripted_trees() {
    // A tree where the static value of an interior node hides a deeper
    // recovery: S2's static value is low but its attack line ends high.
    let kb = catalog_kb();
    let base = std::fs::read_to_string(common::fixture("fig_tree.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&base).unwrap();
    doc["scripted_evaluation"] = serde_json::json!({
        "solutions": [
            {"solution": "S1", "value": 10, "children": [
                {"path": "K1", "value": 6, "children": [{"path": "K1", "value": 6}]}
            ]},
            {"solution": "S2", "value": 4, "children": [
                {"path": "K1", "value": 2, "children": [{"path": "K2", "value": 9}]},
                {"path": "K2", "value": 3, "children": [{"path": "K1", "value": 8}]}
            ]}
        ]
    });
    let model = ApplicationModel::from_json_str(&doc.to_string(), &kb).unwrap();
    let game = ScriptedGame::new(&model).unwrap();
    let sols = game.solutions();
    let exact = explore(&game, &sols, &SearchConfig::plain(3)).unwrap();
    assert_eq!(exact.best.label.as_deref(), Some("S2"));
    assert_eq!(exact.best.residual, 8.0);

    let mut cfg = SearchConfig::optimized(3, Toggles::ALL);
    cfg.top_n = 1;
    cfg.margins = Margins {
        futility: 0.0,
        ext_futility: 0.0,
        razor: 0.0,
    };
    let r = explore(&game, &sols, &cfg).unwrap();
    assert!(r.approximate);
    assert_eq!(r.best.label.as_deref(), Some("S1"));
    assert!(r.best.residual < exact.best.residual);

    cfg.margins = Margins::default();
    let r = explore(&game, &sols, &cfg).unwrap();
    assert!(!r.approximate);
    assert_eq!(r.best.residual, 8.0);
}

#[test]
fn forward_pruning_is_sound_on_the_index() {
    for seed in 0..40 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        assert!(game.monotone());
        let plain = explore(&game, &sols, &SearchConfig::plain(4)).unwrap();
        let mut cfg = SearchConfig::optimized(4, Toggles::ALL);
        cfg.top_n = 1;
        cfg.margins = Margins::parse("f=0,ef=0,rz=0").unwrap();
        let r = explore(&game, &sols, &cfg).unwrap();
        assert_eq!(r.best.residual, plain.best.residual);
        assert!(!r.approximate);
    }
}

#[test]
fn worker_count_does_not_change_the_result() {
    for seed in 0..20 {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        let one = explore(&game, &sols, &SearchConfig::optimized(3, Toggles::EXACT)).unwrap();
        for workers in [2, 3] {
            let mut cfg = SearchConfig::optimized(3, Toggles::EXACT);
            cfg.workers = workers;
            let many = explore(&game, &sols, &cfg).unwrap();
            assert_eq!(many.best.residual, one.best.residual);
            assert_eq!(many.best.solution, one.best.solution);
            let a: Vec<f64> = one.ranked.iter().map(|x| x.residual).collect();
            let b: Vec<f64> = many.ranked.iter().map(|x| x.residual).collect();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn fixed_seed_runs_are_identical() {
    let inst = clustered(
        &ClusterShape {
            clusters: 2,
            max_assets: 2,
            extra_paths: 1,
        },
        11,
    );
    let p = compute_ccs(&inst.model, &inst.kb).unwrap();
    let spec = SourceSpec::generated(SpaceConfig::default(), 99);
    let mut cfg = SearchConfig::optimized(3, Toggles::EXACT);
    cfg.max_solutions = Some(40);
    let a = optimize_per_ccs(&inst.model, &inst.kb, &p, &spec, &cfg).unwrap();
    let b = optimize_per_ccs(&inst.model, &inst.kb, &p, &spec, &cfg).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    assert_eq!(a.nodes_visited, b.nodes_visited);
    assert_eq!(a.ranked, b.ranked);
}

#[test]
fn empty_sources_are_an_error() {
    let inst = random_small(1);
    let game = IndexGame::whole(&inst.model, &inst.kb);
    let none: Vec<Solution> = Vec::new();
    assert!(matches!(
        explore(&game, &none, &SearchConfig::plain(2)),
        Err(Error::EmptySolutionSpace)
    ));
}

#[test]
fn per_ccs_values_add_up_to_the_monolithic_value() {
    let shape = ClusterShape {
        clusters: 2,
        max_assets: 2,
        extra_paths: 0,
    };
    let space = SpaceConfig {
        sigma: 1,
        ..SpaceConfig::default()
    };
    for seed in 0..6 {
        let inst = clustered(&shape, seed);
        let p = compute_ccs(&inst.model, &inst.kb).unwrap();
        let spec = SourceSpec::exhaustive(space.clone());
        let cfg = SearchConfig::optimized(2, Toggles::EXACT);
        let per = optimize_per_ccs(&inst.model, &inst.kb, &p, &spec, &cfg).unwrap();
        let mono =
            optimize_monolithic(&inst.model, &inst.kb, &p, &spec, AttackBudget::PerCcs, &cfg)
                .unwrap();
        assert_eq!(per.residual, mono.best.residual, "seed {seed}");
        let sum: f64 = per
            .per_ccs
            .iter()
            .fold(0.0, |acc, o| acc + o.result.best.residual);
        assert_eq!(per.residual, sum);
        assert!(per.nodes_visited < mono.nodes_visited);
        assert_eq!(per.ranked[0].residual, per.residual);
    }
}

#[test]
fn single_ccs_matches_the_monolithic_tree() {
    let shape = ClusterShape {
        clusters: 1,
        max_assets: 2,
        extra_paths: 1,
    };
    for seed in 0..5 {
        let inst = clustered(&shape, seed);
        let p = compute_ccs(&inst.model, &inst.kb).unwrap();
        let spec = SourceSpec::exhaustive(SpaceConfig {
            sigma: 1,
            ..SpaceConfig::default()
        });
        let cfg = SearchConfig::optimized(3, Toggles::EXACT);
        let per = optimize_per_ccs(&inst.model, &inst.kb, &p, &spec, &cfg).unwrap();
        for budget in [AttackBudget::Shared, AttackBudget::PerCcs] {
            let mono = optimize_monolithic(&inst.model, &inst.kb, &p, &spec, budget, &cfg).unwrap();
            assert_eq!(per.residual, mono.best.residual);
        }
    }
}

#[test]
fn engines_parse() {
    assert_eq!("plain".parse::<Engine>().unwrap(), Engine::Plain);
    assert!("fast".parse::<Engine>().is_err());
}
