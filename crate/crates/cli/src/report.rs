//! JSON and text renderings of search results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use spmiti_core::explorer::{CombinedResult, SearchResult};
use spmiti_core::prep::CcsPartition;
use spmiti_core::{OverheadType, Solution};

pub const SCHEMA_VERSION: u32 = 1;

/// Infinite thresholds print as `"inf"`.
pub fn threshold_map(t: &BTreeMap<OverheadType, f64>) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in t {
        let v = if v.is_infinite() {
            json!("inf")
        } else {
            json!(v)
        };
        m.insert(k.name().to_string(), v);
    }
    Value::Object(m)
}

pub fn partition_json(p: &CcsPartition) -> Value {
    let stats = p.stats();
    json!({
        "schema_version": SCHEMA_VERSION,
        "ccs": p.sets.iter().map(|c| json!({
            "id": c.id,
            "assets": c.assets,
            "closure": c.closure,
            "thresholds": threshold_map(&c.thresholds),
        })).collect::<Vec<_>>(),
        "stats": {
            "count": stats.count,
            "min_size": stats.min_size,
            "max_size": stats.max_size,
            "mean_size": stats.mean_size,
            "pair_tests": p.pair_tests,
        },
    })
}

/// One row in the layout `name  POs  CCSs  sizes  mean`.
pub fn partition_table(name: &str, po_count: usize, p: &CcsPartition) -> String {
    let s = p.stats();
    format!(
        "{:<20} {:>5} {:>5} {:>7} {:>6.2}\n",
        name,
        po_count,
        s.count,
        format!("{}-{}", s.min_size, s.max_size),
        s.mean_size
    )
}

pub const PARTITION_HEADER: &str = "use case               POs  CCSs   sizes   mean\n";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub solution: Solution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub residual: f64,
    pub base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcsEntry {
    pub ccs: String,
    pub solution: Solution,
    pub residual: f64,
    pub base: f64,
    pub attack: Vec<String>,
    pub overheads: Value,
    pub nodes_visited: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub nodes_visited: u64,
    pub tt_hits: u64,
    pub solutions_explored: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub defender: String,
    pub solution: Solution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub residual: f64,
    pub base: f64,
    /// Speculative pruning fired; the result may not be optimal.
    pub approximate: bool,
    /// The most dangerous attack sequence against the solution.
    pub attack: Vec<String>,
    pub ranked: Vec<RankedEntry>,
    #[serde(default)]
    pub per_ccs: Vec<CcsEntry>,
    pub stats: Stats,
}

impl Report {
    pub fn from_search(defender: &str, r: &SearchResult) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            defender: defender.to_string(),
            solution: r.best.solution.clone(),
            label: r.best.label.clone(),
            residual: r.best.residual,
            base: r.best.base,
            approximate: r.approximate,
            attack: r.attack_labels.clone(),
            ranked: r
                .ranked
                .iter()
                .map(|x| RankedEntry {
                    solution: x.solution.clone(),
                    label: x.label.clone(),
                    residual: x.residual,
                    base: x.base,
                })
                .collect(),
            per_ccs: Vec::new(),
            stats: Stats {
                nodes_visited: r.nodes_visited,
                tt_hits: r.tt_hits,
                solutions_explored: r.solutions_explored,
                wall_ms: r.wall_time.as_secs_f64() * 1000.0,
            },
        }
    }

    pub fn from_combined(r: &CombinedResult) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            defender: "per-ccs".to_string(),
            solution: r.solution.clone(),
            label: None,
            residual: r.residual,
            base: r.base,
            approximate: r.approximate,
            attack: r
                .per_ccs
                .iter()
                .flat_map(|o| o.result.attack_labels.iter().cloned())
                .collect(),
            ranked: r
                .ranked
                .iter()
                .map(|x| RankedEntry {
                    solution: x.solution.clone(),
                    label: None,
                    residual: x.residual,
                    base: x.base,
                })
                .collect(),
            per_ccs: r
                .per_ccs
                .iter()
                .map(|o| CcsEntry {
                    ccs: o.ccs.clone(),
                    solution: o.result.best.solution.clone(),
                    residual: o.result.best.residual,
                    base: o.result.best.base,
                    attack: o.result.attack_labels.clone(),
                    overheads: threshold_map(&o.overheads),
                    nodes_visited: o.result.nodes_visited,
                })
                .collect(),
            stats: Stats {
                nodes_visited: r.nodes_visited,
                tt_hits: r.tt_hits,
                solutions_explored: r.solutions_explored,
                wall_ms: r.wall_time.as_secs_f64() * 1000.0,
            },
        }
    }

    /// Adds the overheads of the winning solution to a single-tree report.
    pub fn with_overheads(mut self, ccs: &str, overheads: &BTreeMap<OverheadType, f64>) -> Self {
        self.per_ccs.push(CcsEntry {
            ccs: ccs.to_string(),
            solution: self.solution.clone(),
            residual: self.residual,
            base: self.base,
            attack: self.attack.clone(),
            overheads: threshold_map(overheads),
            nodes_visited: self.stats.nodes_visited,
        });
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let name = self
            .label
            .as_ref()
            .map(|l| format!("{l} "))
            .unwrap_or_default();
        let _ = writeln!(s, "best solution: {name}{}", self.solution);
        let _ = writeln!(s, "residual index: {}", self.residual);
        let _ = writeln!(s, "base index: {}", self.base);
        if self.approximate {
            let _ = writeln!(
                s,
                "approximate: forward pruning may have hidden a better solution"
            );
        }
        let _ = writeln!(
            s,
            "attack: {}",
            if self.attack.is_empty() {
                "-".to_string()
            } else {
                self.attack.join(", ")
            }
        );
        let _ = writeln!(s, "ranked:");
        for (i, r) in self.ranked.iter().enumerate() {
            let name = r
                .label
                .as_ref()
                .map(|l| format!("{l} "))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "  {:>2}. {:>12.4} ({:.4})  {name}{}",
                i + 1,
                r.residual,
                r.base,
                r.solution
            );
        }
        for c in &self.per_ccs {
            let _ = writeln!(
                s,
                "ccs {}: residual {} with {} ({} nodes), overheads {}",
                c.ccs, c.residual, c.solution, c.nodes_visited, c.overheads
            );
        }
        let _ = writeln!(
            s,
            "nodes: {}, tt hits: {}, solutions: {}, time: {:.1} ms",
            self.stats.nodes_visited,
            self.stats.tt_hits,
            self.stats.solutions_explored,
            self.stats.wall_ms
        );
        s
    }
}
