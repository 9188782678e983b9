//! The application under protection.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorer::ScriptedTree;
use crate::ids::{ArtifactId, PathId, StepId};
use crate::kb::{ArtifactKind, KnowledgeBase, SecurityRequirement};
use crate::metrics::Metric;
use crate::overhead::OverheadType;
use crate::solution::{DeployedProtection, Solution};

pub const MODEL_VERSION: u32 = 1;

/// Scope key for thresholds that apply to every code correlation set without
/// an explicit entry.
pub const GLOBAL_SCOPE: &str = "global";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricVector {
    pub halstead: f64,
    pub cyclomatic: f64,
    pub instructions: f64,
    pub remote_instructions: f64,
    pub local_instructions: f64,
    pub guarded_instructions: f64,
}

impl MetricVector {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Halstead => self.halstead,
            Metric::Cyclomatic => self.cyclomatic,
            Metric::Instructions => self.instructions,
            Metric::RemoteInstructions => self.remote_instructions,
            Metric::LocalInstructions => self.local_instructions,
            Metric::GuardedInstructions => self.guarded_instructions,
        }
    }

    pub fn set(&mut self, m: Metric, v: f64) {
        let slot = match m {
            Metric::Halstead => &mut self.halstead,
            Metric::Cyclomatic => &mut self.cyclomatic,
            Metric::Instructions => &mut self.instructions,
            Metric::RemoteInstructions => &mut self.remote_instructions,
            Metric::LocalInstructions => &mut self.local_instructions,
            Metric::GuardedInstructions => &mut self.guarded_instructions,
        };
        *slot = v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub id: ArtifactId,
    pub kind: ArtifactKind,
    pub file: String,
    /// Inclusive source line range.
    pub lines: (u32, u32),
    pub depends_on: Vec<ArtifactId>,
    pub vanilla_metrics: MetricVector,
}

impl Artifact {
    fn ranges_intersect(&self, other: &Artifact) -> bool {
        self.file == other.file && self.lines.0 <= other.lines.1 && other.lines.0 <= self.lines.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtectionObjective {
    pub requirement: SecurityRequirement,
    pub artifact: ArtifactId,
    #[serde(default = "one")]
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackStepRef {
    pub step: StepId,
    pub artifact: ArtifactId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackPath {
    pub id: PathId,
    pub target: ArtifactId,
    pub requirement: SecurityRequirement,
    pub steps: Vec<AttackStepRef>,
}

/// An attack path with the units of effort invested in each of its steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConcreteAttackPath {
    pub path: PathId,
    /// `(step index, units)`; indices nondecreasing and covering every step.
    pub efforts: Vec<(usize, u32)>,
}

impl ConcreteAttackPath {
    /// One unit of effort on every step.
    pub fn unit(path: &AttackPath) -> Self {
        ConcreteAttackPath {
            path: path.id.clone(),
            efforts: (0..path.steps.len()).map(|i| (i, 1)).collect(),
        }
    }

    pub fn check(&self, path: &AttackPath) -> Result<()> {
        let mut next = 0usize;
        for &(idx, n) in &self.efforts {
            if n == 0 {
                return Err(Error::validation(format!(
                    "concrete path `{}`: effort units must be >= 1",
                    self.path
                )));
            }
            if idx + 1 == next {
                continue;
            }
            if idx != next {
                return Err(Error::validation(format!(
                    "concrete path `{}`: step indices must cover steps 0..{} in order",
                    self.path,
                    path.steps.len()
                )));
            }
            next += 1;
        }
        if next != path.steps.len() {
            return Err(Error::validation(format!(
                "concrete path `{}`: step indices must cover steps 0..{} in order",
                self.path,
                path.steps.len()
            )));
        }
        Ok(())
    }
}

/// Overhead threshold; `inf` means unconstrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold(pub f64);

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Threshold(v)),
            Raw::Text(t) if t == "inf" || t == "infinity" => Ok(Threshold(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "threshold must be a number or \"inf\", got `{t}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSolution {
    pub name: String,
    pub dsps: Solution,
}

#[derive(Debug, Clone)]
pub struct ApplicationModel {
    artifacts: Vec<Artifact>,
    artifact_index: HashMap<ArtifactId, usize>,
    pos: Vec<ProtectionObjective>,
    paths: Vec<AttackPath>,
    path_index: HashMap<PathId, usize>,
    thresholds: BTreeMap<String, BTreeMap<OverheadType, f64>>,
    candidates: Vec<CandidateSolution>,
    scripted: Option<ScriptedTree>,
    assets: Vec<ArtifactId>,
}

impl ApplicationModel {
    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    pub fn artifact(&self, id: &str) -> Option<&Artifact> {
        self.artifact_index.get(id).map(|&i| &self.artifacts[i])
    }

    pub fn artifact_position(&self, id: &str) -> Option<usize> {
        self.artifact_index.get(id).copied()
    }

    pub fn pos(&self) -> &[ProtectionObjective] {
        &self.pos
    }

    pub fn attack_paths(&self) -> &[AttackPath] {
        &self.paths
    }

    pub fn attack_path(&self, id: &str) -> Option<&AttackPath> {
        self.path_index.get(id).map(|&i| &self.paths[i])
    }

    pub fn path_position(&self, id: &str) -> Option<usize> {
        self.path_index.get(id).copied()
    }

    /// Artifacts appearing in at least one protection objective, sorted by id.
    pub fn assets(&self) -> &[ArtifactId] {
        &self.assets
    }

    /// Thresholds by scope (`"global"` or a code correlation set id).
    pub fn overhead_thresholds(&self) -> &BTreeMap<String, BTreeMap<OverheadType, f64>> {
        &self.thresholds
    }

    pub fn candidate_solutions(&self) -> &[CandidateSolution] {
        &self.candidates
    }

    pub fn scripted_evaluation(&self) -> Option<&ScriptedTree> {
        self.scripted.as_ref()
    }

    /// Two artifacts are joint when they share at least one source element:
    /// intersecting line ranges in the same file, or a declared dependence of
    /// one on (a region joint with) the other.
    pub fn joint(&self, a: &Artifact, b: &Artifact) -> bool {
        if a.id == b.id || a.ranges_intersect(b) {
            return true;
        }
        self.depends_into(a, b) || self.depends_into(b, a)
    }

    fn depends_into(&self, from: &Artifact, to: &Artifact) -> bool {
        from.depends_on.iter().any(|d| {
            d == &to.id
                || self
                    .artifact(d.as_str())
                    .is_some_and(|dep| dep.ranges_intersect(to))
        })
    }

    pub fn joint_ids(&self, a: &str, b: &str) -> bool {
        match (self.artifact(a), self.artifact(b)) {
            (Some(x), Some(y)) => self.joint(x, y),
            _ => false,
        }
    }

    /// Builds a model from parts and validates it against the knowledge base.
    pub fn new(
        artifacts: Vec<Artifact>,
        pos: Vec<ProtectionObjective>,
        paths: Vec<AttackPath>,
        thresholds: BTreeMap<String, BTreeMap<OverheadType, f64>>,
        kb: &KnowledgeBase,
    ) -> Result<Self> {
        Self::build(artifacts, pos, paths, thresholds, Vec::new(), None, kb)
    }

    pub fn with_candidates(
        mut self,
        candidates: Vec<CandidateSolution>,
        kb: &KnowledgeBase,
    ) -> Result<Self> {
        for c in &candidates {
            self.check_solution(&c.dsps, kb)
                .map_err(|e| Error::validation(format!("candidate `{}`: {e}", c.name)))?;
        }
        self.candidates = candidates;
        Ok(self)
    }

    /// Checks that every DSP names a known CP on a known, compatible artifact.
    pub fn check_solution(&self, s: &Solution, kb: &KnowledgeBase) -> Result<()> {
        for d in s.dsps() {
            self.check_dsp(d, kb)?;
        }
        Ok(())
    }

    fn check_dsp(&self, d: &DeployedProtection, kb: &KnowledgeBase) -> Result<()> {
        let cp = kb
            .cp(d.cp.as_str())
            .ok_or_else(|| Error::validation(format!("unknown cp `{}`", d.cp)))?;
        let art = self
            .artifact(d.artifact.as_str())
            .ok_or_else(|| Error::validation(format!("unknown artifact `{}`", d.artifact)))?;
        if !kb.asp_of(cp).compatible(art) {
            return Err(Error::validation(format!(
                "cp `{}` is not compatible with {} artifact `{}`",
                d.cp, art.kind, art.id
            )));
        }
        Ok(())
    }

    fn build(
        artifacts: Vec<Artifact>,
        pos: Vec<ProtectionObjective>,
        paths: Vec<AttackPath>,
        thresholds: BTreeMap<String, BTreeMap<OverheadType, f64>>,
        candidates: Vec<CandidateSolution>,
        scripted: Option<ScriptedTree>,
        kb: &KnowledgeBase,
    ) -> Result<Self> {
        let mut artifact_index = HashMap::new();
        for (i, a) in artifacts.iter().enumerate() {
            if artifact_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::validation(format!(
                    "duplicate artifact id `{}`",
                    a.id
                )));
            }
            if a.lines.0 > a.lines.1 {
                return Err(Error::validation(format!(
                    "artifact `{}`: line range start {} after end {}",
                    a.id, a.lines.0, a.lines.1
                )));
            }
            check_vanilla(a)?;
        }
        for a in &artifacts {
            for d in &a.depends_on {
                if !artifact_index.contains_key(d) {
                    return Err(Error::validation(format!(
                        "artifact `{}`: depends_on references unknown artifact `{d}`",
                        a.id
                    )));
                }
            }
        }
        check_nesting(&artifacts)?;

        for po in &pos {
            if !artifact_index.contains_key(&po.artifact) {
                return Err(Error::validation(format!(
                    "protection objective references unknown artifact `{}`",
                    po.artifact
                )));
            }
            if !(po.weight.is_finite() && po.weight >= 0.0) {
                return Err(Error::validation(format!(
                    "protection objective on `{}`: weight must be finite and >= 0",
                    po.artifact
                )));
            }
        }

        let mut path_index = HashMap::new();
        for (i, p) in paths.iter().enumerate() {
            if path_index.insert(p.id.clone(), i).is_some() {
                return Err(Error::validation(format!(
                    "duplicate attack path id `{}`",
                    p.id
                )));
            }
            if p.steps.is_empty() {
                return Err(Error::validation(format!(
                    "attack path `{}` has no steps",
                    p.id
                )));
            }
            if !artifact_index.contains_key(&p.target) {
                return Err(Error::validation(format!(
                    "attack path `{}` targets unknown artifact `{}`",
                    p.id, p.target
                )));
            }
            for s in &p.steps {
                let Some(&ai) = artifact_index.get(&s.artifact) else {
                    return Err(Error::validation(format!(
                        "attack path `{}`: step on unknown artifact `{}`",
                        p.id, s.artifact
                    )));
                };
                let Some(step) = kb.step(s.step.as_str()) else {
                    return Err(Error::validation(format!(
                        "attack path `{}`: unknown attack step `{}`",
                        p.id, s.step
                    )));
                };
                let kind = artifacts[ai].kind;
                if !step.base_probability.contains_key(&kind) {
                    return Err(Error::validation(format!(
                        "attack path `{}`: step `{}` has no base probability for {kind} artifacts",
                        p.id, s.step
                    )));
                }
            }
        }

        for (scope, per_type) in &thresholds {
            for (ty, theta) in per_type {
                if theta.is_nan() || *theta < 1.0 {
                    return Err(Error::validation(format!(
                        "overhead threshold {ty} for `{scope}` is {theta}; thresholds must be >= 1"
                    )));
                }
            }
        }

        let mut assets: Vec<ArtifactId> = pos.iter().map(|p| p.artifact.clone()).collect();
        assets.sort();
        assets.dedup();
        for a in &assets {
            if !paths.iter().any(|p| &p.target == a) {
                log::warn!("asset `{a}` is not targeted by any attack path");
            }
        }

        let mut model = ApplicationModel {
            artifacts,
            artifact_index,
            pos,
            paths,
            path_index,
            thresholds,
            candidates: Vec::new(),
            scripted: None,
            assets,
        };
        model = model.with_candidates(candidates, kb)?;
        if let Some(tree) = &scripted {
            tree.check(&model)?;
        }
        model.scripted = scripted;
        Ok(model)
    }

    pub fn from_json_str(text: &str, kb: &KnowledgeBase) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("model: {e}")))?;
        if file.model_version != MODEL_VERSION {
            return Err(Error::validation(format!(
                "unsupported model_version {} (expected {MODEL_VERSION})",
                file.model_version
            )));
        }
        let artifacts = file
            .artifacts
            .into_iter()
            .map(|a| Artifact {
                id: a.id,
                kind: a.kind,
                file: a.file,
                lines: (a.lines[0], a.lines[1]),
                depends_on: a.depends_on,
                vanilla_metrics: a.vanilla_metrics,
            })
            .collect();
        let mut thresholds = BTreeMap::new();
        for (scope, per_type) in file.overhead_thresholds {
            let mut parsed = BTreeMap::new();
            for (name, theta) in per_type {
                let ty: OverheadType = name
                    .parse()
                    .map_err(|e| Error::validation(format!("overhead_thresholds.{scope}: {e}")))?;
                parsed.insert(ty, theta.0);
            }
            thresholds.insert(scope, parsed);
        }
        Self::build(
            artifacts,
            file.protection_objectives,
            file.attack_paths,
            thresholds,
            file.candidate_solutions,
            file.scripted_evaluation,
            kb,
        )
    }
}

/// Loads and validates a model file against a knowledge base.
pub fn load_model(path: impl AsRef<Path>, kb: &KnowledgeBase) -> Result<ApplicationModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ApplicationModel::from_json_str(&text, kb)
}

fn check_vanilla(a: &Artifact) -> Result<()> {
    let m = &a.vanilla_metrics;
    for metric in Metric::ALL {
        let v = m.get(metric);
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::validation(format!(
                "artifact `{}`: vanilla {metric} must be finite and >= 0",
                a.id
            )));
        }
    }
    if m.remote_instructions != 0.0 || m.local_instructions != 0.0 || m.guarded_instructions != 0.0
    {
        return Err(Error::validation(format!(
            "artifact `{}`: vanilla remote/local/guarded instruction counts must be 0",
            a.id
        )));
    }
    match a.kind {
        ArtifactKind::Code if m.cyclomatic < 1.0 => Err(Error::validation(format!(
            "artifact `{}`: cyclomatic complexity of code must be >= 1",
            a.id
        ))),
        ArtifactKind::Datum if m.cyclomatic != 0.0 => Err(Error::validation(format!(
            "artifact `{}`: cyclomatic complexity of a datum must be 0",
            a.id
        ))),
        _ => Ok(()),
    }
}

fn check_nesting(artifacts: &[Artifact]) -> Result<()> {
    let code: Vec<&Artifact> = artifacts
        .iter()
        .filter(|a| a.kind == ArtifactKind::Code)
        .collect();
    for (i, a) in code.iter().enumerate() {
        for b in &code[i + 1..] {
            if a.file != b.file || !a.ranges_intersect(b) {
                continue;
            }
            let (x, y) = (a.lines, b.lines);
            let a_in_b = y.0 <= x.0 && x.1 <= y.1;
            let b_in_a = x.0 <= y.0 && y.1 <= x.1;
            if x == y || !(a_in_b || b_in_a) {
                return Err(Error::validation(format!(
                    "code artifacts `{}` ({}-{}) and `{}` ({}-{}) in `{}`: ranges must nest or be disjoint",
                    a.id, x.0, x.1, b.id, y.0, y.1, a.file
                )));
            }
        }
    }
    Ok(())
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    model_version: u32,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    artifacts: Vec<ArtifactFile>,
    #[serde(default)]
    protection_objectives: Vec<ProtectionObjective>,
    #[serde(default)]
    attack_paths: Vec<AttackPath>,
    #[serde(default)]
    overhead_thresholds: BTreeMap<String, BTreeMap<String, Threshold>>,
    #[serde(default)]
    candidate_solutions: Vec<CandidateSolution>,
    #[serde(default)]
    scripted_evaluation: Option<ScriptedTree>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactFile {
    id: ArtifactId,
    kind: ArtifactKind,
    #[serde(default)]
    file: String,
    lines: [u32; 2],
    #[serde(default)]
    depends_on: Vec<ArtifactId>,
    #[serde(default)]
    vanilla_metrics: MetricVector,
}

#[cfg(test)]
mod tests {
    use super::*;

    const KB: &str = r#"{
        "kb_version": 1,
        "asps": [{"id": "obf", "applicable_kinds": ["code"], "enforces": ["confidentiality"]}],
        "cps": [{"id": "obf_1", "asp": "obf"}],
        "attack_steps": [
            {"id": "locate", "base_probability": {"code": 0.6, "datum": 0.6}},
            {"id": "extract", "base_probability": {"code": 0.5}}
        ]
    }"#;

    fn kb() -> KnowledgeBase {
        KnowledgeBase::from_json_str(KB).unwrap()
    }

    fn model_json(second_lines: &str) -> String {
        format!(
            r#"{{
            "model_version": 1,
            "artifacts": [
                {{"id": "f", "kind": "code", "file": "m.c", "lines": [10, 50],
                  "vanilla_metrics": {{"halstead": 100, "cyclomatic": 4, "instructions": 200}}}},
                {{"id": "g", "kind": "code", "file": "m.c", "lines": {second_lines},
                  "vanilla_metrics": {{"halstead": 10, "cyclomatic": 1, "instructions": 20}}}}
            ],
            "protection_objectives": [{{"requirement": "confidentiality", "artifact": "f", "weight": 1}}],
            "attack_paths": [{{"id": "K1", "target": "f", "requirement": "confidentiality",
                "steps": [{{"step": "locate", "artifact": "f"}}, {{"step": "extract", "artifact": "g"}}]}}]
        }}"#
        )
    }

    #[test]
    fn small_model_loads() {
        let m = ApplicationModel::from_json_str(&model_json("[20, 30]"), &kb()).unwrap();
        assert_eq!(m.assets().len(), 1);
        assert_eq!(m.attack_paths().len(), 1);
        assert!(m.overhead_thresholds().is_empty());
    }

    #[test]
    fn partial_overlap_is_rejected() {
        let err = ApplicationModel::from_json_str(&model_json("[40, 60]"), &kb()).unwrap_err();
        assert!(
            err.to_string().contains("ranges must nest or be disjoint"),
            "{err}"
        );
        let err = ApplicationModel::from_json_str(&model_json("[10, 50]"), &kb()).unwrap_err();
        assert!(
            err.to_string().contains("ranges must nest or be disjoint"),
            "{err}"
        );
    }

    #[test]
    fn nested_ranges_are_joint() {
        let m = ApplicationModel::from_json_str(&model_json("[20, 30]"), &kb()).unwrap();
        let f = m.artifact("f").unwrap();
        let g = m.artifact("g").unwrap();
        assert!(m.joint(f, g));
        assert!(m.joint(g, f));
        assert!(m.joint(f, f));
        let m = ApplicationModel::from_json_str(&model_json("[60, 70]"), &kb()).unwrap();
        assert!(!m.joint_ids("f", "g"));
    }

    #[test]
    fn dangling_ids_are_rejected() {
        let text = model_json("[20, 30]").replace(r#""artifact": "g"}"#, r#""artifact": "h"}"#);
        let err = ApplicationModel::from_json_str(&text, &kb()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let text = model_json("[20, 30]").replace(r#""step": "extract""#, r#""step": "nope""#);
        assert!(ApplicationModel::from_json_str(&text, &kb()).is_err());
    }

    #[test]
    fn thresholds_below_one_are_rejected() {
        let text = model_json("[20, 30]").replace(
            r#""model_version": 1,"#,
            r#""model_version": 1, "overhead_thresholds": {"global": {"client_time": 0.9}},"#,
        );
        let err = ApplicationModel::from_json_str(&text, &kb()).unwrap_err();
        assert!(err.to_string().contains("must be >= 1"), "{err}");
        let text = model_json("[20, 30]").replace(
            r#""model_version": 1,"#,
            r#""model_version": 1, "overhead_thresholds": {"global": {"client_time": "inf", "network": 1.5}},"#,
        );
        let m = ApplicationModel::from_json_str(&text, &kb()).unwrap();
        assert_eq!(
            m.overhead_thresholds()["global"][&OverheadType::ClientTime],
            f64::INFINITY
        );
    }

    #[test]
    fn datum_dependence_makes_artifacts_joint() {
        let text = r#"{
            "model_version": 1,
            "artifacts": [
                {"id": "key", "kind": "datum", "file": "a.c", "lines": [3, 3], "depends_on": ["use"]},
                {"id": "use", "kind": "code", "file": "b.c", "lines": [5, 9],
                 "vanilla_metrics": {"cyclomatic": 1}},
                {"id": "inner", "kind": "code", "file": "b.c", "lines": [6, 7],
                 "vanilla_metrics": {"cyclomatic": 1}},
                {"id": "other", "kind": "code", "file": "c.c", "lines": [1, 2],
                 "vanilla_metrics": {"cyclomatic": 1}}
            ]
        }"#;
        let m = ApplicationModel::from_json_str(text, &kb()).unwrap();
        assert!(m.joint_ids("key", "use"));
        assert!(m.joint_ids("inner", "key"));
        assert!(!m.joint_ids("key", "other"));
    }

    #[test]
    fn concrete_path_shape() {
        let m = ApplicationModel::from_json_str(&model_json("[20, 30]"), &kb()).unwrap();
        let p = &m.attack_paths()[0];
        let unit = ConcreteAttackPath::unit(p);
        assert!(unit.check(p).is_ok());
        let repeated = ConcreteAttackPath {
            path: p.id.clone(),
            efforts: vec![(0, 1), (0, 2), (1, 1)],
        };
        assert!(repeated.check(p).is_ok());
        let skipping = ConcreteAttackPath {
            path: p.id.clone(),
            efforts: vec![(1, 1)],
        };
        assert!(skipping.check(p).is_err());
        let zero = ConcreteAttackPath {
            path: p.id.clone(),
            efforts: vec![(0, 0), (1, 1)],
        };
        assert!(zero.check(p).is_err());
    }
}
