//! The scaling benchmark: synthetic instances over a grid of objective
//! counts, attack path counts and depths.

use std::time::Instant;

use serde::Serialize;
use spmiti_core::explorer::{explore, Engine, IndexGame, SearchConfig, SpaceSource, Toggles, Walk};
use spmiti_core::solspace::{DspSpace, SpaceConfig};
use spmiti_core::synth::bench_instance;
use spmiti_core::CodeCorrelationSet;

use crate::error::{CliError, CliResult};

pub const MAX_PO_COUNT: usize = 128;
pub const MAX_DEPTH: u32 = 5;

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub po_counts: Vec<usize>,
    pub path_counts: Vec<usize>,
    pub depths: Vec<u32>,
    pub engines: Vec<Engine>,
    pub seed: u64,
    pub repeats: usize,
    pub workers: usize,
    pub force: bool,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            po_counts: vec![4, 8, 16, 32, 64],
            path_counts: vec![8],
            depths: vec![3, 4],
            engines: vec![Engine::Plain, Engine::Optimized],
            seed: 1,
            repeats: 1,
            workers: 1,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub po_count: usize,
    pub path_count: usize,
    pub depth: u32,
    pub engine: String,
    pub nodes: u64,
    pub wall_ms: f64,
    pub value: f64,
}

impl BenchSpec {
    pub fn check(&self) -> CliResult<()> {
        if self.force {
            return Ok(());
        }
        if let Some(&n) = self.po_counts.iter().find(|&&n| n > MAX_PO_COUNT) {
            return Err(CliError::GuardrailExceeded(format!(
                "{n} objectives exceed the limit of {MAX_PO_COUNT}"
            )));
        }
        if let Some(&d) = self.depths.iter().find(|&&d| d > MAX_DEPTH) {
            return Err(CliError::GuardrailExceeded(format!(
                "depth {d} exceeds the limit of {MAX_DEPTH}"
            )));
        }
        Ok(())
    }
}

/// Solutions searched per instance: four per objective.
pub fn solutions_per_instance(po_count: usize) -> usize {
    4 * po_count
}

/// One row per (engine, objective count, path count, depth, repeat).
pub fn run(spec: &BenchSpec) -> CliResult<Vec<BenchRow>> {
    spec.check()?;
    if spec.po_counts.contains(&0) || spec.path_counts.contains(&0) {
        return Err(CliError::Config("counts must be positive".into()));
    }
    let mut rows = Vec::new();
    let space_cfg = SpaceConfig {
        sigma: 1,
        ..SpaceConfig::default()
    };
    for &engine in &spec.engines {
        for &po in &spec.po_counts {
            for &paths in &spec.path_counts {
                let inst = bench_instance(po, paths, spec.seed);
                let pos: Vec<usize> = (0..po).collect();
                let whole = CodeCorrelationSet::whole(&inst.model);
                let space = DspSpace::new(
                    &pos,
                    std::slice::from_ref(&whole),
                    &inst.model,
                    &inst.kb,
                    &space_cfg,
                )?;
                let source = SpaceSource::new(
                    space,
                    Walk::Generated {
                        seed: None,
                        rng_seed: spec.seed,
                    },
                    &inst.model,
                    &inst.kb,
                );
                let game = IndexGame::whole(&inst.model, &inst.kb);
                for &depth in &spec.depths {
                    let mut cfg = match engine {
                        Engine::Plain => SearchConfig::plain(depth),
                        Engine::Optimized => SearchConfig::optimized(depth, Toggles::EXACT),
                    };
                    cfg.top_n = 1;
                    cfg.workers = spec.workers;
                    cfg.max_solutions = Some(solutions_per_instance(po));
                    for _ in 0..spec.repeats.max(1) {
                        let start = Instant::now();
                        let r = explore(&game, &source, &cfg)?;
                        let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
                        log::info!(
                            "bench {engine} po={po} paths={paths} d={depth}: {} nodes",
                            r.nodes_visited
                        );
                        rows.push(BenchRow {
                            po_count: po,
                            path_count: paths,
                            depth,
                            engine: engine.to_string(),
                            nodes: r.nodes_visited,
                            wall_ms,
                            value: r.best.residual,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
