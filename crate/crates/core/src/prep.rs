//! Preparatory stage: compatible protections per objective and the partition
//! of assets into code correlation sets (CCSs).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ids::ArtifactId;
use crate::kb::KnowledgeBase;
use crate::model::{ApplicationModel, AttackPath, ProtectionObjective, GLOBAL_SCOPE};
use crate::overhead::OverheadType;
use crate::solution::{DeployedProtection, Solution};
use crate::union_find::UnionFind;

/// All DSPs of `po`: CPs whose ASP is compatible with the asset and enforces
/// the requirement, deployed on the asset. Ordered as in the knowledge base.
pub fn compatible_dsps(
    po: &ProtectionObjective,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Vec<DeployedProtection> {
    compatible_dsps_counted(po, model, kb).0
}

/// [`compatible_dsps`] plus the number of CPs examined.
pub fn compatible_dsps_counted(
    po: &ProtectionObjective,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> (Vec<DeployedProtection>, usize) {
    let Some(asset) = model.artifact(po.artifact.as_str()) else {
        return (Vec::new(), 0);
    };
    let mut checks = 0;
    let mut out = Vec::new();
    for cp in kb.cps() {
        checks += 1;
        let asp = kb.asp_of(cp);
        if asp.compatible(asset) && asp.enforces(&po.requirement) {
            out.push(DeployedProtection::new(cp.id.clone(), asset.id.clone()));
        }
    }
    if out.is_empty() {
        log::warn!(
            "unprotectable objective: no protection enforces {} on `{}`",
            po.requirement,
            po.artifact
        );
    }
    (out, checks)
}

/// Artifacts touched by any step of any attack path targeting `asset`.
pub fn art(asset: &str, paths: &[AttackPath]) -> BTreeSet<ArtifactId> {
    paths
        .iter()
        .filter(|p| p.target.as_str() == asset)
        .flat_map(|p| p.steps.iter().map(|s| s.artifact.clone()))
        .collect()
}

/// `art(asset)` plus the asset itself, which is where protections go.
fn footprint(asset: &ArtifactId, paths: &[AttackPath]) -> BTreeSet<ArtifactId> {
    let mut f = art(asset.as_str(), paths);
    f.insert(asset.clone());
    f
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeCorrelationSet {
    /// Smallest asset id of the set.
    pub id: String,
    pub assets: Vec<ArtifactId>,
    /// Every artifact reachable through the attack footprints of the assets.
    pub closure: Vec<ArtifactId>,
    pub thresholds: BTreeMap<OverheadType, f64>,
}

impl CodeCorrelationSet {
    pub fn contains_asset(&self, a: &str) -> bool {
        self.assets.iter().any(|x| x.as_str() == a)
    }

    pub fn contains_artifact(&self, a: &str) -> bool {
        self.closure.iter().any(|x| x.as_str() == a)
    }

    /// A set covering every asset of the model with the global thresholds.
    pub fn whole(model: &ApplicationModel) -> Self {
        let mut closure: BTreeSet<ArtifactId> = BTreeSet::new();
        for a in model.assets() {
            closure.extend(footprint(a, model.attack_paths()));
        }
        let thresholds = model
            .overhead_thresholds()
            .get(GLOBAL_SCOPE)
            .cloned()
            .unwrap_or_default();
        CodeCorrelationSet {
            id: model
                .assets()
                .first()
                .map(|a| a.to_string())
                .unwrap_or_default(),
            assets: model.assets().to_vec(),
            closure: closure.into_iter().collect(),
            thresholds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionStats {
    pub count: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub mean_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcsPartition {
    pub sets: Vec<CodeCorrelationSet>,
    /// Pairwise footprint jointness tests performed.
    pub pair_tests: usize,
}

impl CcsPartition {
    pub fn stats(&self) -> PartitionStats {
        let sizes: Vec<usize> = self.sets.iter().map(|c| c.assets.len()).collect();
        let count = sizes.len();
        PartitionStats {
            count,
            min_size: sizes.iter().copied().min().unwrap_or(0),
            max_size: sizes.iter().copied().max().unwrap_or(0),
            mean_size: if count == 0 {
                0.0
            } else {
                sizes.iter().sum::<usize>() as f64 / count as f64
            },
        }
    }

    pub fn ccs_of_asset(&self, asset: &str) -> Option<&CodeCorrelationSet> {
        self.sets.iter().find(|c| c.contains_asset(asset))
    }
}

/// Partitions the assets by the transitive closure of footprint jointness.
/// Sets are ordered by their smallest asset id.
pub fn compute_ccs(model: &ApplicationModel, _kb: &KnowledgeBase) -> Result<CcsPartition> {
    let assets = model.assets();
    let footprints: Vec<Vec<&crate::model::Artifact>> = assets
        .iter()
        .map(|a| {
            footprint(a, model.attack_paths())
                .iter()
                .filter_map(|id| model.artifact(id.as_str()))
                .collect()
        })
        .collect();

    let n = assets.len();
    let mut uf = UnionFind::new(n);
    let mut pair_tests = 0;
    for i in 0..n {
        for j in i + 1..n {
            pair_tests += 1;
            let joint = footprints[i]
                .iter()
                .any(|x| footprints[j].iter().any(|y| model.joint(x, y)));
            if joint {
                uf.union(i, j);
            }
        }
    }

    let mut sets = Vec::new();
    for class in uf.classes() {
        let members: Vec<ArtifactId> = class.iter().map(|&i| assets[i].clone()).collect();
        let mut closure = BTreeSet::new();
        for &i in &class {
            closure.extend(footprints[i].iter().map(|a| a.id.clone()));
        }
        sets.push(CodeCorrelationSet {
            id: members[0].to_string(),
            assets: members,
            closure: closure.into_iter().collect(),
            thresholds: BTreeMap::new(),
        });
    }

    let global = model.overhead_thresholds().get(GLOBAL_SCOPE);
    for scope in model.overhead_thresholds().keys() {
        if scope != GLOBAL_SCOPE && !sets.iter().any(|c| &c.id == scope) {
            return Err(Error::config(format!(
                "overhead threshold references unknown code correlation set `{scope}`"
            )));
        }
    }
    for c in &mut sets {
        let mut t = global.cloned().unwrap_or_default();
        if let Some(own) = model.overhead_thresholds().get(&c.id) {
            t.extend(own.iter().map(|(k, v)| (*k, *v)));
        }
        c.thresholds = t;
    }

    Ok(CcsPartition { sets, pair_tests })
}

/// Splits a solution into order-preserving partial solutions, one per set.
pub fn split_solution(
    s: &Solution,
    sets: &[CodeCorrelationSet],
) -> Result<BTreeMap<String, Solution>> {
    let mut out: BTreeMap<String, Solution> = sets
        .iter()
        .map(|c| (c.id.clone(), Solution::vanilla()))
        .collect();
    for d in s.dsps() {
        let Some(c) = sets
            .iter()
            .find(|c| c.contains_artifact(d.artifact.as_str()))
        else {
            return Err(Error::Split(format!(
                "artifact `{}` of {d} belongs to no code correlation set",
                d.artifact
            )));
        };
        out.get_mut(&c.id).expect("present").push(d.clone());
    }
    Ok(out)
}
