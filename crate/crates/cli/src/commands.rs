use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use spmiti_core::explorer::{
    explore, explore_traced, optimize_monolithic, optimize_per_ccs_warm, AttackBudget, Engine,
    Game, IndexGame, Margins, ScriptedGame, SearchConfig, SearchResult, SolutionSource, SourceSpec,
    SpaceSource, Toggles, Walk,
};
use spmiti_core::kb::load_kb;
use spmiti_core::model::load_model;
use spmiti_core::overhead::overheads;
use spmiti_core::prep::compute_ccs;
use spmiti_core::solspace::{DspSpace, SpaceConfig};
use spmiti_core::{ApplicationModel, CodeCorrelationSet, KnowledgeBase, Solution};

use crate::args::{
    BenchArgs, Defender, ExplainArgs, Inputs, OptimizeArgs, PrepareArgs, PrepareFormat,
    ReportFormat, SearchArgs,
};
use crate::bench::{self, BenchSpec};
use crate::error::{CliError, CliResult};
use crate::report::{partition_json, partition_table, Report, PARTITION_HEADER};

pub fn load(inputs: &Inputs) -> CliResult<(KnowledgeBase, ApplicationModel)> {
    let kb = load_kb(&inputs.kb)?;
    let model = load_model(&inputs.model, &kb)?;
    Ok((kb, model))
}

pub fn validate(inputs: &Inputs, out: &mut dyn Write) -> CliResult<()> {
    let (kb, model) = load(inputs)?;
    writeln!(
        out,
        "ok: {} ASPs, {} CPs, {} attack steps; {} artifacts, {} objectives, {} attack paths, {} candidates",
        kb.asps().len(),
        kb.cps().len(),
        kb.attack_steps().len(),
        model.artifacts().len(),
        model.pos().len(),
        model.attack_paths().len(),
        model.candidate_solutions().len(),
    )?;
    Ok(())
}

pub fn prepare(args: &PrepareArgs, out: &mut dyn Write) -> CliResult<()> {
    let (kb, model) = load(&args.inputs)?;
    let partition = compute_ccs(&model, &kb)?;
    match args.format {
        PrepareFormat::Json => {
            let text = serde_json::to_string_pretty(&partition_json(&partition))
                .map_err(|e| CliError::Config(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        PrepareFormat::Table => {
            out.write_all(PARTITION_HEADER.as_bytes())?;
            out.write_all(partition_table(&args.name, model.pos().len(), &partition).as_bytes())?;
        }
    }
    Ok(())
}

pub fn search_config(args: &SearchArgs) -> CliResult<SearchConfig> {
    let engine: Engine = args.engine.parse()?;
    let mut cfg = match engine {
        Engine::Plain => SearchConfig::plain(args.depth),
        Engine::Optimized => {
            SearchConfig::optimized(args.depth, Toggles::parse_list(&args.enable)?)
        }
    };
    cfg.margins = Margins::parse(&args.margins)?;
    cfg.top_n = args.top_n;
    cfg.workers = args.workers;
    cfg.aspiration_half_width = args.aspiration_width;
    cfg.max_solutions = (args.max_solutions > 0).then_some(args.max_solutions);
    cfg.validate()?;
    Ok(cfg)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn source_spec(
    args: &SearchArgs,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> CliResult<SourceSpec> {
    let space = SpaceConfig {
        sigma: args.sigma,
        skip_discouraged: args.skip_discouraged,
        ..SpaceConfig::default()
    };
    if args.exhaustive {
        if args.seed_solution.is_some() {
            return Err(CliError::Config(
                "--seed-solution has no effect with --exhaustive".into(),
            ));
        }
        return Ok(SourceSpec::exhaustive(space));
    }
    let seed = match &args.seed_solution {
        Some(p) => {
            let s: Solution = read_json(p)?;
            model.check_solution(&s, kb)?;
            Some(s)
        }
        None => None,
    };
    Ok(SourceSpec {
        space,
        walk: Walk::Generated {
            seed,
            rng_seed: args.seed,
        },
    })
}

fn default_defender(args: &SearchArgs, model: &ApplicationModel) -> Defender {
    args.defender
        .unwrap_or(if model.scripted_evaluation().is_some() {
            Defender::Scripted
        } else {
            Defender::PerCcs
        })
}

fn candidates(model: &ApplicationModel) -> CliResult<Vec<Solution>> {
    if model.candidate_solutions().is_empty() {
        return Err(CliError::Config("model has no candidate solutions".into()));
    }
    Ok(model
        .candidate_solutions()
        .iter()
        .map(|c| c.dsps.clone())
        .collect())
}

fn single_tree(
    game: &dyn Game,
    source: &dyn SolutionSource,
    cfg: &SearchConfig,
    traced: bool,
) -> CliResult<SearchResult> {
    Ok(if traced {
        explore_traced(game, source, cfg)?
    } else {
        explore(game, source, cfg)?
    })
}

pub fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> CliResult<()> {
    let (kb, model) = load(&args.inputs)?;
    let mut cfg = search_config(&args.search)?;
    let warm: Option<Report> = args.warm_start.as_deref().map(read_json).transpose()?;
    let defender = default_defender(&args.search, &model);
    let whole = CodeCorrelationSet::whole(&model);
    let report = match defender {
        Defender::PerCcs => {
            let partition = compute_ccs(&model, &kb)?;
            let spec = source_spec(&args.search, &model, &kb)?;
            let mut centers = BTreeMap::new();
            if let Some(w) = &warm {
                for c in &w.per_ccs {
                    centers.insert(c.ccs.clone(), c.residual);
                }
            }
            let r = optimize_per_ccs_warm(&model, &kb, &partition, &spec, &cfg, &centers)?;
            Report::from_combined(&r)
        }
        other => {
            if let Some(w) = &warm {
                cfg.aspiration_center = Some(w.residual);
            }
            let (name, r) = match other {
                Defender::Monolithic => {
                    let partition = compute_ccs(&model, &kb)?;
                    let spec = source_spec(&args.search, &model, &kb)?;
                    let r = optimize_monolithic(
                        &model,
                        &kb,
                        &partition,
                        &spec,
                        AttackBudget::Shared,
                        &cfg,
                    )?;
                    ("monolithic", r)
                }
                Defender::Candidates => {
                    let game = IndexGame::whole(&model, &kb);
                    ("candidates", explore(&game, &candidates(&model)?, &cfg)?)
                }
                _ => {
                    let game = ScriptedGame::new(&model)?;
                    ("scripted", explore(&game, &game.solutions(), &cfg)?)
                }
            };
            let oh = overheads(&r.best.solution, &whole, &model, &kb);
            Report::from_search(name, &r).with_overheads(&whole.id, &oh)
        }
    };
    log::info!(
        "best residual {} after {} nodes",
        report.residual,
        report.stats.nodes_visited
    );
    let text = match args.report {
        ReportFormat::Json => {
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?
                + "\n"
        }
        ReportFormat::Text => report.to_text(),
    };
    emit(args.out.as_deref(), text.as_bytes(), out)
}

fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => Ok(out.write_all(bytes)?),
    }
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let engines = args
        .engines
        .iter()
        .map(|e| e.parse::<Engine>())
        .collect::<Result<Vec<_>, _>>()?;
    let spec = BenchSpec {
        po_counts: args.po_counts.clone(),
        path_counts: args.path_counts.clone(),
        depths: args.depths.clone(),
        engines,
        seed: args.seed,
        repeats: args.repeats,
        workers: args.workers,
        force: args.force,
    };
    let rows = bench::run(&spec)?;
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf)?;
    emit(args.out.as_deref(), &buf, out)
}

/// Renders the traced search tree. Uses the scripted evaluation when the
/// model has one, then the candidate solutions, then the generated space.
pub fn explain(args: &ExplainArgs, out: &mut dyn Write) -> CliResult<()> {
    let (kb, model) = load(&args.inputs)?;
    let mut cfg = search_config(&args.search)?;
    // Tracing records one tree; a single worker keeps it whole.
    cfg.workers = 1;
    let defender = args
        .search
        .defender
        .unwrap_or(if model.scripted_evaluation().is_some() {
            Defender::Scripted
        } else if !model.candidate_solutions().is_empty() {
            Defender::Candidates
        } else {
            Defender::Monolithic
        });
    let r = match defender {
        Defender::Scripted => {
            let game = ScriptedGame::new(&model)?;
            single_tree(&game, &game.solutions(), &cfg, true)?
        }
        Defender::Candidates => {
            let game = IndexGame::whole(&model, &kb);
            single_tree(&game, &candidates(&model)?, &cfg, true)?
        }
        Defender::Monolithic | Defender::PerCcs => {
            let spec = source_spec(&args.search, &model, &kb)?;
            let pos: Vec<usize> = (0..model.pos().len()).collect();
            let whole = CodeCorrelationSet::whole(&model);
            let space =
                DspSpace::new(&pos, std::slice::from_ref(&whole), &model, &kb, &spec.space)?;
            let source = SpaceSource::new(space, spec.walk, &model, &kb);
            let game = IndexGame::whole(&model, &kb);
            single_tree(&game, &source, &cfg, true)?
        }
    };
    let trace = r
        .trace
        .as_ref()
        .ok_or_else(|| CliError::Config("search produced no trace".into()))?;
    let dot = trace.to_dot(args.max_nodes)?;
    emit(args.out.as_deref(), dot.as_bytes(), out)
}
