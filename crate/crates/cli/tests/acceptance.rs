//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Built without the test harness so the lines always show.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use spmiti_cli::bench::{self, BenchSpec};
use spmiti_cli::report::Report;
use spmiti_cli::{run, Cli};
use spmiti_core::explorer::{
    explore, optimize_monolithic, optimize_per_ccs, AttackBudget, Engine, IndexGame, Margins,
    SearchConfig, SourceSpec, Toggles,
};
use spmiti_core::index::{likelihood, sp_index};
use spmiti_core::metrics::potency;
use spmiti_core::overhead::within_thresholds;
use spmiti_core::prep::{compatible_dsps_counted, compute_ccs};
use spmiti_core::solspace::{enumerate_all, is_valid_sequence, DspSpace, SpaceConfig};
use spmiti_core::synth::{
    bench_instance, candidates, clustered, enumeration_instance, knowledge_base, random_small,
    ClusterShape, KbShape,
};
use spmiti_core::{CodeCorrelationSet, ConcreteAttackPath, Metric, Solution, State};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn figure_tree() -> Outcome {
    let (kb, model) = (fixture("kb_catalog.json"), fixture("fig_tree.json"));
    // depth 4: the defender's turn plus three attacker turns
    let args = [
        "spmiti", "optimize", "--kb", &kb, "--model", &model, "--depth", "4",
    ];
    let start = Instant::now();
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    run(&cli, &mut out).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r: Report = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let names: Vec<&str> = r
        .attack
        .iter()
        .map(|l| l.split('(').next().unwrap_or(""))
        .collect();
    check(
        r.label.as_deref() == Some("S3"),
        format!("picked {:?}", r.label),
    )?;
    check(r.residual == 8.0, format!("residual {}", r.residual))?;
    check(
        names == ["K1", "K1", "K2"],
        format!("attack {:?}", r.attack),
    )?;
    check(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "S3, residual 8, attack {}, {elapsed:.0?}",
        r.attack.join(" ")
    ))
}

const CORPUS: u64 = 500;

struct Corpus {
    value_mismatches: Vec<String>,
    runs: usize,
    ab_worse: Vec<String>,
    ab_instances: usize,
    ab_strict: usize,
    elapsed: Duration,
}

/// Every seed at every depth 1 to 4; the plain engine is the oracle.
fn corpus() -> Corpus {
    let start = Instant::now();
    let mut c = Corpus {
        value_mismatches: Vec::new(),
        runs: 0,
        ab_worse: Vec::new(),
        ab_instances: 0,
        ab_strict: 0,
        elapsed: Duration::ZERO,
    };
    let exact = Toggles {
        alpha_beta: true,
        tt: true,
        aspiration: true,
        ..Toggles::NONE
    };
    let infinite = Margins {
        futility: f64::INFINITY,
        ext_futility: f64::INFINITY,
        razor: f64::INFINITY,
    };
    let alpha_beta = Toggles {
        alpha_beta: true,
        ..Toggles::NONE
    };
    for seed in 0..CORPUS {
        let inst = random_small(seed);
        let sols = candidates(&inst);
        let game = IndexGame::whole(&inst.model, &inst.kb);
        for depth in 1..=4 {
            let plain = explore(&game, &sols, &SearchConfig::plain(depth)).expect("plain search");
            let mut forward = SearchConfig::optimized(depth, Toggles::ALL);
            forward.margins = infinite;
            for cfg in [SearchConfig::optimized(depth, exact), forward] {
                let r = explore(&game, &sols, &cfg).expect("optimized search");
                c.runs += 1;
                if r.best.residual != plain.best.residual || r.approximate {
                    c.value_mismatches.push(format!(
                        "seed {seed} d={depth}: {} vs {}",
                        r.best.residual, plain.best.residual
                    ));
                }
            }
            let mut cfg = SearchConfig::optimized(depth, alpha_beta);
            cfg.top_n = 1;
            let ab = explore(&game, &sols, &cfg).expect("alpha-beta search");
            if ab.nodes_visited > plain.nodes_visited {
                c.ab_worse.push(format!("seed {seed} d={depth}"));
            }
            if sols.len() >= 2 {
                c.ab_instances += 1;
                c.ab_strict += usize::from(ab.nodes_visited < plain.nodes_visited);
            }
        }
    }
    c.elapsed = start.elapsed();
    c
}

fn oracle_equivalence(c: &Corpus) -> Outcome {
    check(
        c.value_mismatches.is_empty(),
        format!(
            "{} mismatches, first {:?}",
            c.value_mismatches.len(),
            c.value_mismatches.first()
        ),
    )?;
    check(
        c.elapsed < Duration::from_secs(120),
        format!("took {:.1?}", c.elapsed),
    )?;
    Ok(format!(
        "{} instances x 4 depths, {} optimized runs equal plain, {:.1?}",
        CORPUS, c.runs, c.elapsed
    ))
}

fn pruning_effectiveness(c: &Corpus) -> Outcome {
    check(
        c.ab_worse.is_empty(),
        format!("more nodes than plain on {:?}", c.ab_worse),
    )?;
    let share = c.ab_strict as f64 / c.ab_instances as f64;
    check(
        share >= 0.5,
        format!(
            "strictly fewer nodes on {}/{} ({:.1}%)",
            c.ab_strict,
            c.ab_instances,
            100.0 * share
        ),
    )?;
    Ok(format!(
        "never more nodes; strictly fewer on {}/{} multi-solution runs ({:.1}%)",
        c.ab_strict,
        c.ab_instances,
        100.0 * share
    ))
}

fn unit(inst: &spmiti_core::synth::Instance, p: usize, extra: &[u32]) -> ConcreteAttackPath {
    let path = &inst.model.attack_paths()[p];
    ConcreteAttackPath {
        path: path.id.clone(),
        efforts: (0..path.steps.len())
            .map(|i| (i, 1 + extra.get(i).copied().unwrap_or(0)))
            .collect(),
    }
}

fn index_properties() -> Outcome {
    const CASES: u32 = 1000;
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        any::<u64>(),
        0usize..4,
        prop::collection::vec((0usize..4, 0u32..4), 0..5),
        0usize..4,
        0usize..5,
    );
    runner
        .run(&strategy, |(seed, pick, seq, next, rot)| {
            let inst = random_small(seed);
            let sols = candidates(&inst);
            let s = sols[pick % sols.len()].clone();
            let n = inst.model.attack_paths().len();
            let paths: Vec<ConcreteAttackPath> =
                seq.iter().map(|&(p, e)| unit(&inst, p % n, &[e])).collect();

            for p in &paths {
                let l = likelihood(&s, p, &inst.model, &inst.kb).unwrap();
                prop_assert!((0.0..=1.0).contains(&l), "likelihood {}", l);
            }

            let vanilla = sp_index(&State::vanilla(), &inst.model, &inst.kb)
                .unwrap()
                .value;
            prop_assert_eq!(vanilla, 0.0);

            let before = sp_index(&State::new(s.clone(), paths.clone()), &inst.model, &inst.kb)
                .unwrap()
                .value;
            let mut longer = paths.clone();
            longer.push(unit(&inst, next % n, &[]));
            let after = sp_index(&State::new(s.clone(), longer), &inst.model, &inst.kb)
                .unwrap()
                .value;
            prop_assert!(after <= before, "{} > {}", after, before);

            if !paths.is_empty() {
                let mut permuted = paths.clone();
                permuted.rotate_left(rot % paths.len());
                permuted.reverse();
                let b = sp_index(&State::new(s.clone(), permuted), &inst.model, &inst.kb)
                    .unwrap()
                    .value;
                prop_assert_eq!(before.to_bits(), b.to_bits());
            }

            for a in inst.model.artifacts() {
                for m in Metric::ALL {
                    if a.vanilla_metrics.get(m) > 0.0 {
                        prop_assert_eq!(
                            potency(m, a, &Solution::vanilla(), &inst.kb).unwrap(),
                            0.0
                        );
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{CASES} cases: likelihood in [0,1], vanilla 0, monotone, order-free, zero vanilla potency"
    ))
}

fn ccs_correctness() -> Outcome {
    let start = Instant::now();
    let space = SpaceConfig {
        sigma: 1,
        ..SpaceConfig::default()
    };
    let mut multi = 0;
    let mut fewer = 0;
    let mut runs = 0;
    for seed in 0..60u64 {
        let k = 1 + (seed % 3) as usize;
        let shape = ClusterShape {
            clusters: k,
            max_assets: 2,
            extra_paths: (seed / 3 % 2) as usize,
        };
        let inst = clustered(&shape, seed);
        let p = compute_ccs(&inst.model, &inst.kb).map_err(|e| e.to_string())?;
        check(
            p.sets.len() == k,
            format!("seed {seed}: {} sets for {k} clusters", p.sets.len()),
        )?;
        let mut seen = HashSet::new();
        for c in &p.sets {
            for a in &c.assets {
                check(
                    seen.insert(a.clone()),
                    format!("seed {seed}: {a} in two sets"),
                )?;
            }
        }
        check(
            seen.len() == inst.model.assets().len(),
            format!("seed {seed}: assets not covered"),
        )?;

        let depth = 2 + (seed % 2) as u32;
        let spec = SourceSpec::exhaustive(space.clone());
        let cfg = SearchConfig::optimized(depth, Toggles::EXACT);
        let per =
            optimize_per_ccs(&inst.model, &inst.kb, &p, &spec, &cfg).map_err(|e| e.to_string())?;
        let mono =
            optimize_monolithic(&inst.model, &inst.kb, &p, &spec, AttackBudget::PerCcs, &cfg)
                .map_err(|e| e.to_string())?;
        check(
            per.residual == mono.best.residual,
            format!(
                "seed {seed}: per-CCS {} vs monolithic {}",
                per.residual, mono.best.residual
            ),
        )?;
        runs += 1;
        if k > 1 {
            multi += 1;
            fewer += usize::from(per.nodes_visited < mono.nodes_visited);
        }
    }
    let share = fewer as f64 / multi as f64;
    check(
        share >= 0.9,
        format!("fewer nodes on {fewer}/{multi} multi-CCS instances"),
    )?;
    Ok(format!(
        "{runs} instances with 1-3 clusters recovered; per-CCS value equals monolithic; fewer nodes on {fewer}/{multi} multi-CCS ({:.0?})",
        start.elapsed()
    ))
}

fn enumerator_correctness() -> Outcome {
    let cfg = SpaceConfig {
        sigma: 2,
        ..SpaceConfig::default()
    };
    let mut checked = 0;
    let mut largest = 0;
    let mut solutions = 0;
    for seed in 0..300u64 {
        let inst = enumeration_instance(seed);
        let whole = CodeCorrelationSet::whole(&inst.model);
        let pos: Vec<usize> = (0..inst.model.pos().len()).collect();
        let space = DspSpace::new(
            &pos,
            std::slice::from_ref(&whole),
            &inst.model,
            &inst.kb,
            &cfg,
        )
        .map_err(|e| e.to_string())?;
        let Ok(all) = enumerate_all(&space, &inst.model, &inst.kb) else {
            continue;
        };
        if all.len() > 200 {
            continue;
        }
        for rng_seed in [0u64, seed ^ 0x9e37_79b9] {
            let walked: Vec<Solution> = space
                .iter(&inst.model, &inst.kb, None, rng_seed)
                .map_err(|e| e.to_string())?
                .collect();
            let unique: HashSet<&Solution> = walked.iter().collect();
            check(
                unique.len() == walked.len(),
                format!("seed {seed}: duplicates in the walk"),
            )?;
            let expected: HashSet<&Solution> = all.iter().collect();
            check(
                unique == expected,
                format!(
                    "seed {seed}: walk {} vs enumeration {}",
                    unique.len(),
                    expected.len()
                ),
            )?;
            for s in &walked {
                check(
                    is_valid_sequence(s, &inst.kb),
                    format!("seed {seed}: invalid order {s}"),
                )?;
                check(
                    within_thresholds(s, &whole, &inst.model, &inst.kb),
                    format!("seed {seed}: {s} over threshold"),
                )?;
            }
        }
        checked += 1;
        solutions += all.len();
        largest = largest.max(all.len());
    }
    check(
        checked >= 100,
        format!("only {checked} instances had at most 200 solutions"),
    )?;
    Ok(format!(
        "{checked} instances, {solutions} solutions (largest space {largest}): walk equals enumeration"
    ))
}

fn scaling_trend() -> Outcome {
    let spec = BenchSpec {
        engines: vec![Engine::Plain],
        ..BenchSpec::default()
    };
    let start = Instant::now();
    let rows = bench::run(&spec).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let nodes = |po: usize, d: u32| {
        rows.iter()
            .find(|r| r.po_count == po && r.depth == d)
            .map(|r| r.nodes)
            .expect("grid cell")
    };
    for &d in &spec.depths {
        for w in spec.po_counts.windows(2) {
            check(
                nodes(w[0], d) < nodes(w[1], d),
                format!(
                    "d={d}: {} nodes at {} POs, {} at {}",
                    nodes(w[0], d),
                    w[0],
                    nodes(w[1], d),
                    w[1]
                ),
            )?;
        }
    }
    for &po in &spec.po_counts {
        check(
            nodes(po, 3) < nodes(po, 4),
            format!(
                "{po} POs: {} nodes at d=3, {} at d=4",
                nodes(po, 3),
                nodes(po, 4)
            ),
        )?;
    }
    check(
        elapsed < Duration::from_secs(600),
        format!("took {elapsed:.1?}"),
    )?;
    let grid: Vec<String> = spec
        .po_counts
        .iter()
        .map(|&po| format!("{po}:{}/{}", nodes(po, 3), nodes(po, 4)))
        .collect();
    Ok(format!(
        "nodes d3/d4 by PO count {} ({elapsed:.1?})",
        grid.join(" ")
    ))
}

fn preparatory_complexity() -> Outcome {
    let asset = bench_instance(1, 1, 0);
    let po = &asset.model.pos()[0];
    let mut points = Vec::new();
    for cps_per_asp in 1..=4 {
        for asps in [2, 5, 10, 20] {
            let kb = knowledge_base(
                &KbShape {
                    asps,
                    cps_per_asp,
                    ..KbShape::default()
                },
                asps as u64,
            );
            let (_, checks) = compatible_dsps_counted(po, &asset.model, &kb);
            points.push((kb.cps().len() as f64, checks as f64));
        }
    }
    // least squares fit of checks against |CPs|
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    check(
        residual < 1e-9 && slope > 0.0,
        format!("checks not linear: slope {slope}, residual {residual}"),
    )?;

    let mut sizes = Vec::new();
    for k in 1..=6 {
        for seed in 0..4u64 {
            let inst = clustered(
                &ClusterShape {
                    clusters: k,
                    max_assets: 3,
                    extra_paths: 1,
                },
                seed,
            );
            let n = inst.model.assets().len();
            let p = compute_ccs(&inst.model, &inst.kb).map_err(|e| e.to_string())?;
            check(
                p.pair_tests == n * (n - 1) / 2,
                format!("{n} assets: {} pair tests", p.pair_tests),
            )?;
            sizes.push(n);
        }
    }
    sizes.sort_unstable();
    sizes.dedup();
    Ok(format!(
        "DSP checks = {slope:.3}|CPs| + {intercept:.3} over {} KBs; pair tests n(n-1)/2 for n in {sizes:?}",
        points.len()
    ))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("figure tree reproduction", Box::new(figure_tree)),
        (
            "oracle equivalence",
            Box::new(|| oracle_equivalence(&corpus)),
        ),
        (
            "pruning effectiveness",
            Box::new(|| pruning_effectiveness(&corpus)),
        ),
        ("index properties", Box::new(index_properties)),
        ("code correlation sets", Box::new(ccs_correctness)),
        (
            "solution walk vs enumeration",
            Box::new(enumerator_correctness),
        ),
        ("scaling trend", Box::new(scaling_trend)),
        ("preparatory complexity", Box::new(preparatory_complexity)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
