//! Searching code correlation sets separately or in one tree.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::SearchConfig;
use super::game::{AttackBudget, IndexGame};
use super::search::{explore, SearchResult};
use super::source::{SpaceSource, Walk};
use crate::error::Result;
use crate::kb::KnowledgeBase;
use crate::model::ApplicationModel;
use crate::overhead::{overheads, OverheadType};
use crate::prep::{split_solution, CcsPartition, CodeCorrelationSet};
use crate::solspace::{DspSpace, SpaceConfig};
use crate::solution::Solution;

/// How the defender's moves are produced for each tree.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    pub space: SpaceConfig,
    pub walk: Walk,
}

impl SourceSpec {
    pub fn generated(space: SpaceConfig, rng_seed: u64) -> Self {
        SourceSpec {
            space,
            walk: Walk::Generated {
                seed: None,
                rng_seed,
            },
        }
    }

    pub fn exhaustive(space: SpaceConfig) -> Self {
        SourceSpec {
            space,
            walk: Walk::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CcsOutcome {
    pub ccs: String,
    pub result: SearchResult,
    /// Overheads of the winning partial solution on the CCS closure.
    pub overheads: BTreeMap<OverheadType, f64>,
}

/// A combination of one ranked partial solution per CCS.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedSolution {
    pub solution: Solution,
    pub residual: f64,
    pub base: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinedResult {
    /// Partial optimal solutions concatenated in CCS order.
    pub solution: Solution,
    pub residual: f64,
    pub base: f64,
    pub ranked: Vec<CombinedSolution>,
    pub per_ccs: Vec<CcsOutcome>,
    pub nodes_visited: u64,
    pub tt_hits: u64,
    pub solutions_explored: u64,
    #[serde(serialize_with = "ser_duration_ms")]
    pub wall_time: Duration,
    pub approximate: bool,
}

fn ser_duration_ms<S: serde::Serializer>(
    d: &Duration,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

fn po_indices(model: &ApplicationModel, ccs: &CodeCorrelationSet) -> Vec<usize> {
    (0..model.pos().len())
        .filter(|&i| ccs.contains_asset(model.pos()[i].artifact.as_str()))
        .collect()
}

/// Searches every CCS on its own objectives, paths, DSP pool and thresholds
/// and combines the partial optima. The combined residual is the sum of the
/// per-CCS residuals in CCS order.
pub fn optimize_per_ccs(
    model: &ApplicationModel,
    kb: &KnowledgeBase,
    partition: &CcsPartition,
    spec: &SourceSpec,
    cfg: &SearchConfig,
) -> Result<CombinedResult> {
    optimize_per_ccs_warm(model, kb, partition, spec, cfg, &BTreeMap::new())
}

/// [`optimize_per_ccs`] with an aspiration center per CCS id, typically the
/// residuals of an earlier run. CCSs missing from `centers` use `cfg`.
pub fn optimize_per_ccs_warm(
    model: &ApplicationModel,
    kb: &KnowledgeBase,
    partition: &CcsPartition,
    spec: &SourceSpec,
    cfg: &SearchConfig,
    centers: &BTreeMap<String, f64>,
) -> Result<CombinedResult> {
    let start = Instant::now();
    let seeds = match &spec.walk {
        Walk::Generated { seed: Some(s), .. } => Some(split_solution(s, &partition.sets)?),
        _ => None,
    };
    let mut per_ccs = Vec::with_capacity(partition.sets.len());
    for ccs in &partition.sets {
        let outcome = (|| {
            let space = DspSpace::new(
                &po_indices(model, ccs),
                std::slice::from_ref(ccs),
                model,
                kb,
                &spec.space,
            )?;
            let walk = match &spec.walk {
                Walk::Generated { rng_seed, .. } => Walk::Generated {
                    seed: seeds.as_ref().and_then(|m| m.get(&ccs.id)).cloned(),
                    rng_seed: *rng_seed,
                },
                Walk::Exhaustive => Walk::Exhaustive,
            };
            let source = SpaceSource::new(space, walk, model, kb);
            let game = IndexGame::for_assets(model, kb, &ccs.assets);
            let mut cfg = cfg.clone();
            if let Some(&c) = centers.get(&ccs.id) {
                cfg.aspiration_center = Some(c);
            }
            let result = explore(&game, &source, &cfg)?;
            let overheads = overheads(&result.best.solution, ccs, model, kb);
            Ok(CcsOutcome {
                ccs: ccs.id.clone(),
                result,
                overheads,
            })
        })()
        .map_err(|e: crate::error::Error| e.in_ccs(&ccs.id))?;
        log::debug!(
            "ccs {}: residual {} after {} nodes",
            outcome.ccs,
            outcome.result.best.residual,
            outcome.result.nodes_visited
        );
        per_ccs.push(outcome);
    }

    let ranked = combine(&per_ccs, cfg.top_n);
    let mut solution = Vec::new();
    let mut residual = 0.0;
    let mut base = 0.0;
    for o in &per_ccs {
        solution.extend(o.result.best.solution.dsps().iter().cloned());
        residual += o.result.best.residual;
        base += o.result.best.base;
    }
    Ok(CombinedResult {
        solution: Solution::new(solution),
        residual,
        base,
        ranked,
        nodes_visited: per_ccs.iter().map(|o| o.result.nodes_visited).sum(),
        tt_hits: per_ccs.iter().map(|o| o.result.tt_hits).sum(),
        solutions_explored: per_ccs.iter().map(|o| o.result.solutions_explored).sum(),
        approximate: per_ccs.iter().any(|o| o.result.approximate),
        per_ccs,
        wall_time: start.elapsed(),
    })
}

/// Top `n` combinations of the per-CCS rankings, merged one CCS at a time.
fn combine(per_ccs: &[CcsOutcome], n: usize) -> Vec<CombinedSolution> {
    let mut acc = vec![CombinedSolution {
        solution: Solution::vanilla(),
        residual: 0.0,
        base: 0.0,
    }];
    for o in per_ccs {
        let mut next = Vec::with_capacity(acc.len() * o.result.ranked.len());
        for a in &acc {
            for r in &o.result.ranked {
                let mut dsps = a.solution.dsps().to_vec();
                dsps.extend(r.solution.dsps().iter().cloned());
                next.push(CombinedSolution {
                    solution: Solution::new(dsps),
                    residual: a.residual + r.residual,
                    base: a.base + r.base,
                });
            }
        }
        next.sort_by(|x, y| {
            y.residual
                .partial_cmp(&x.residual)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(x.solution.len().cmp(&y.solution.len()))
                .then(
                    x.solution
                        .canonical_hash()
                        .cmp(&y.solution.canonical_hash()),
                )
        });
        next.truncate(n);
        acc = next;
    }
    acc
}

/// One tree over every CCS: the solution space spans all objectives and
/// must respect every CCS's thresholds.
pub fn optimize_monolithic(
    model: &ApplicationModel,
    kb: &KnowledgeBase,
    partition: &CcsPartition,
    spec: &SourceSpec,
    budget: AttackBudget,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    let pos: Vec<usize> = (0..model.pos().len()).collect();
    let space = DspSpace::new(&pos, &partition.sets, model, kb, &spec.space)?;
    let source = SpaceSource::new(space, spec.walk.clone(), model, kb);
    let game = IndexGame::monolithic(model, kb, partition, budget);
    explore(&game, &source, cfg)
}
