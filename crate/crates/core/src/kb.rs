//! Protection knowledge base.
//!
//! Holds abstract protections (ASPs) and their concrete configurations (CPs),
//! the precedence matrix between ASPs, per-step mitigation and synergy
//! factors, the attack-step catalog with base success probabilities, and the
//! coefficient tables used to predict metrics and overheads.
//!
//! A knowledge base is immutable once loaded.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ids::{AspId, CpId, StepId};
use crate::index::{IndexConfig, Measure, MeasureParams};
use crate::metrics::Metric;
use crate::model::Artifact;
use crate::overhead::OverheadType;

pub const KB_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Code,
    Datum,
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArtifactKind::Code => f.write_str("code"),
            ArtifactKind::Datum => f.write_str("datum"),
        }
    }
}

/// A security requirement of an asset. Unknown tags are kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SecurityRequirement {
    Confidentiality,
    Integrity,
    Other(String),
}

impl SecurityRequirement {
    pub fn as_str(&self) -> &str {
        match self {
            SecurityRequirement::Confidentiality => "confidentiality",
            SecurityRequirement::Integrity => "integrity",
            SecurityRequirement::Other(tag) => tag,
        }
    }
}

impl FromStr for SecurityRequirement {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "confidentiality" => SecurityRequirement::Confidentiality,
            "integrity" => SecurityRequirement::Integrity,
            other => SecurityRequirement::Other(other.to_string()),
        })
    }
}

impl fmt::Display for SecurityRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SecurityRequirement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SecurityRequirement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.is_empty() {
            return Err(serde::de::Error::custom("empty security requirement"));
        }
        Ok(s.parse().expect("infallible"))
    }
}

/// Ordering constraint between two protections applied to the same artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precedence {
    #[default]
    Allowed,
    Required,
    Forbidden,
    Encouraged,
    Discouraged,
}

impl Precedence {
    /// Encouraged and discouraged orders are still allowed orders.
    pub fn allows(self) -> bool {
        !matches!(self, Precedence::Forbidden)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractProtection {
    pub id: AspId,
    pub name: String,
    pub applicable_kinds: BTreeSet<ArtifactKind>,
    pub enforced_requirements: BTreeSet<SecurityRequirement>,
}

impl AbstractProtection {
    pub fn enforces(&self, r: &SecurityRequirement) -> bool {
        self.enforced_requirements.contains(r)
    }

    pub fn compatible(&self, artifact: &Artifact) -> bool {
        self.applicable_kinds.contains(&artifact.kind)
    }
}

/// `value <- value * multiplier + offset`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDelta {
    #[serde(default = "one")]
    pub multiplier: f64,
    #[serde(default)]
    pub offset: f64,
}

impl MetricDelta {
    pub const IDENTITY: MetricDelta = MetricDelta {
        multiplier: 1.0,
        offset: 0.0,
    };

    pub fn apply(&self, value: f64) -> f64 {
        value * self.multiplier + self.offset
    }
}

/// Overhead estimate in percent: `base + per_instruction * instructions`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OverheadCoefficients {
    #[serde(default)]
    pub base: f64,
    #[serde(default)]
    pub per_instruction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteProtection {
    pub id: CpId,
    pub asp_id: AspId,
    pub config_label: String,
    /// Online protections need a server and contribute server/network overheads.
    pub online: bool,
    pub metric_deltas: BTreeMap<Metric, MetricDelta>,
    pub overhead_coeffs: BTreeMap<OverheadType, OverheadCoefficients>,
    /// Mitigation factor per attack step, in `[0, 1]`.
    pub mitigation: BTreeMap<StepId, f64>,
}

impl ConcreteProtection {
    pub fn delta(&self, metric: Metric) -> MetricDelta {
        self.metric_deltas
            .get(&metric)
            .copied()
            .unwrap_or(MetricDelta::IDENTITY)
    }

    /// Missing entries mean the protection does not mitigate the step.
    pub fn mitigation_for(&self, step: &StepId) -> f64 {
        self.mitigation.get(step).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackStep {
    pub id: StepId,
    pub description: String,
    pub base_probability: BTreeMap<ArtifactKind, f64>,
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    asps: Vec<AbstractProtection>,
    cps: Vec<ConcreteProtection>,
    steps: Vec<AttackStep>,
    asp_index: HashMap<AspId, usize>,
    cp_index: HashMap<CpId, usize>,
    step_index: HashMap<StepId, usize>,
    /// Row-major `asps.len() x asps.len()`, `[before][after]`.
    precedence: Vec<Precedence>,
    /// Per ASP, the ASPs that are required to precede it.
    required_before: Vec<Vec<usize>>,
    synergy: HashMap<(usize, usize, usize), f64>,
    cp_asp: Vec<usize>,
    index_config: IndexConfig,
}

impl KnowledgeBase {
    pub fn asps(&self) -> &[AbstractProtection] {
        &self.asps
    }

    pub fn cps(&self) -> &[ConcreteProtection] {
        &self.cps
    }

    pub fn attack_steps(&self) -> &[AttackStep] {
        &self.steps
    }

    pub fn asp(&self, id: &str) -> Option<&AbstractProtection> {
        self.asp_index.get(id).map(|&i| &self.asps[i])
    }

    pub fn cp(&self, id: &str) -> Option<&ConcreteProtection> {
        self.cp_index.get(id).map(|&i| &self.cps[i])
    }

    pub fn step(&self, id: &str) -> Option<&AttackStep> {
        self.step_index.get(id).map(|&i| &self.steps[i])
    }

    pub fn asp_position(&self, id: &str) -> Option<usize> {
        self.asp_index.get(id).copied()
    }

    pub fn cp_position(&self, id: &str) -> Option<usize> {
        self.cp_index.get(id).copied()
    }

    pub fn asp_of(&self, cp: &ConcreteProtection) -> &AbstractProtection {
        &self.asps[self.asp_index[&cp.asp_id]]
    }

    pub(crate) fn cp_asp_position(&self, cp_pos: usize) -> usize {
        self.cp_asp[cp_pos]
    }

    pub fn index_config(&self) -> &IndexConfig {
        &self.index_config
    }

    /// Relation between two protections applied to the same artifact, looked
    /// up on their abstract protections.
    pub fn precedence(
        &self,
        before: &ConcreteProtection,
        after: &ConcreteProtection,
    ) -> Precedence {
        let b = self.asp_index[&before.asp_id];
        let a = self.asp_index[&after.asp_id];
        self.precedence_at(b, a)
    }

    pub fn asp_precedence(&self, before: &AspId, after: &AspId) -> Option<Precedence> {
        let b = *self.asp_index.get(before)?;
        let a = *self.asp_index.get(after)?;
        Some(self.precedence_at(b, a))
    }

    pub(crate) fn precedence_at(&self, before: usize, after: usize) -> Precedence {
        self.precedence[before * self.asps.len() + after]
    }

    pub(crate) fn required_before(&self, asp: usize) -> &[usize] {
        &self.required_before[asp]
    }

    /// Synergy factor of `first` applied before `second` on the same artifact
    /// for the given attack step; 1 when not listed.
    pub fn synergy(&self, step: &StepId, first: &CpId, second: &CpId) -> f64 {
        match (
            self.step_index.get(step),
            self.cp_index.get(first),
            self.cp_index.get(second),
        ) {
            (Some(&s), Some(&f), Some(&g)) => self.synergy_at(s, f, g),
            _ => 1.0,
        }
    }

    pub(crate) fn synergy_at(&self, step: usize, first: usize, second: usize) -> f64 {
        self.synergy
            .get(&(step, first, second))
            .copied()
            .unwrap_or(1.0)
    }

    pub(crate) fn step_position(&self, id: &str) -> Option<usize> {
        self.step_index.get(id).copied()
    }

    /// Base success probability of a step on an artifact kind, scaled by the
    /// configured attacker expertise and clamped to `(0, 1]`.
    pub fn base_probability(&self, step: &StepId, kind: ArtifactKind) -> Result<f64> {
        let unknown = || Error::UnknownStep {
            step: step.to_string(),
            kind: kind.to_string(),
        };
        let s = self.step(step.as_str()).ok_or_else(unknown)?;
        let p = *s.base_probability.get(&kind).ok_or_else(unknown)?;
        Ok((p * self.index_config.expertise).clamp(f64::MIN_POSITIVE, 1.0))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: KbFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("knowledge base: {e}")))?;
        Self::from_file(file)
    }

    pub(crate) fn from_file(file: KbFile) -> Result<Self> {
        if file.kb_version != KB_VERSION {
            return Err(Error::validation(format!(
                "unsupported kb_version {} (expected {KB_VERSION})",
                file.kb_version
            )));
        }

        let mut asps = Vec::with_capacity(file.asps.len());
        let mut asp_index = HashMap::new();
        for a in file.asps {
            let id = AspId::new(a.id);
            if a.applicable_kinds.is_empty() {
                return Err(Error::validation(format!(
                    "asp `{id}`: applicable_kinds must not be empty"
                )));
            }
            if asp_index.insert(id.clone(), asps.len()).is_some() {
                return Err(Error::validation(format!("duplicate asp id `{id}`")));
            }
            asps.push(AbstractProtection {
                name: a.name.unwrap_or_else(|| id.to_string()),
                id,
                applicable_kinds: a.applicable_kinds.into_iter().collect(),
                enforced_requirements: a.enforces.into_iter().collect(),
            });
        }

        let mut steps = Vec::with_capacity(file.attack_steps.len());
        let mut step_index = HashMap::new();
        for s in file.attack_steps {
            let id = StepId::new(s.id);
            for (kind, p) in &s.base_probability {
                if !(p.is_finite() && *p > 0.0 && *p <= 1.0) {
                    return Err(Error::validation(format!(
                        "attack step `{id}`: base probability {p} for {kind} artifacts outside (0, 1]"
                    )));
                }
            }
            if step_index.insert(id.clone(), steps.len()).is_some() {
                return Err(Error::validation(format!(
                    "duplicate attack step id `{id}`"
                )));
            }
            steps.push(AttackStep {
                id,
                description: s.description,
                base_probability: s.base_probability,
            });
        }

        let mut cps = Vec::with_capacity(file.cps.len());
        let mut cp_index = HashMap::new();
        let mut cp_asp = Vec::with_capacity(file.cps.len());
        for c in file.cps {
            let id = CpId::new(c.id);
            let asp_id = AspId::new(c.asp);
            let Some(&asp_pos) = asp_index.get(&asp_id) else {
                return Err(Error::validation(format!(
                    "cp `{id}`: asp `{asp_id}` does not resolve"
                )));
            };
            let mut metric_deltas = BTreeMap::new();
            for (name, delta) in c.metric_deltas {
                let metric: Metric = name
                    .parse()
                    .map_err(|e| Error::validation(format!("cp `{id}`: {e}")))?;
                if !(delta.multiplier.is_finite() && delta.multiplier >= 0.0) {
                    return Err(Error::validation(format!(
                        "cp `{id}`: multiplier for {metric} must be finite and >= 0"
                    )));
                }
                if !delta.offset.is_finite() {
                    return Err(Error::validation(format!(
                        "cp `{id}`: offset for {metric} must be finite"
                    )));
                }
                metric_deltas.insert(metric, delta);
            }
            let mut overhead_coeffs = BTreeMap::new();
            for (name, coeffs) in c.overheads {
                let ty: OverheadType = name
                    .parse()
                    .map_err(|e| Error::validation(format!("cp `{id}`: {e}")))?;
                if !(coeffs.base.is_finite() && coeffs.per_instruction.is_finite()) {
                    return Err(Error::validation(format!(
                        "cp `{id}`: overhead coefficients for {ty} must be finite"
                    )));
                }
                overhead_coeffs.insert(ty, coeffs);
            }
            let mut mitigation = BTreeMap::new();
            for (step, zeta) in c.mitigation {
                let step = StepId::new(step);
                if !step_index.contains_key(&step) {
                    return Err(Error::validation(format!(
                        "cp `{id}`: mitigation references unknown attack step `{step}`"
                    )));
                }
                if !(zeta.is_finite() && (0.0..=1.0).contains(&zeta)) {
                    return Err(Error::validation(format!(
                        "cp `{id}`: mitigation factor {zeta} for `{step}` outside [0, 1]"
                    )));
                }
                mitigation.insert(step, zeta);
            }
            if cp_index.insert(id.clone(), cps.len()).is_some() {
                return Err(Error::validation(format!("duplicate cp id `{id}`")));
            }
            cp_asp.push(asp_pos);
            cps.push(ConcreteProtection {
                id,
                asp_id,
                config_label: c.config,
                online: c.online,
                metric_deltas,
                overhead_coeffs,
                mitigation,
            });
        }

        let n = asps.len();
        let mut precedence = vec![Precedence::Allowed; n * n];
        let mut declared: HashMap<(usize, usize), Precedence> = HashMap::new();
        for p in file.precedence {
            let resolve = |id: &str| {
                asp_index.get(id).copied().ok_or_else(|| {
                    Error::validation(format!("precedence references unknown asp `{id}`"))
                })
            };
            let b = resolve(&p.before)?;
            let a = resolve(&p.after)?;
            if let Some(prev) = declared.insert((b, a), p.rel) {
                if prev != p.rel {
                    return Err(Error::validation(format!(
                        "conflicting precedence for ({}, {}): {prev:?} and {:?}",
                        p.before, p.after, p.rel
                    )));
                }
            }
            precedence[b * n + a] = p.rel;
        }
        let mut required_before = vec![Vec::new(); n];
        for ((b, a), rel) in &declared {
            if *rel == Precedence::Required {
                required_before[*a].push(*b);
            }
        }
        for list in &mut required_before {
            list.sort_unstable();
        }

        let mut synergy = HashMap::new();
        for s in file.synergy {
            let Some(&step) = step_index.get(s.step.as_str()) else {
                return Err(Error::validation(format!(
                    "synergy references unknown attack step `{}`",
                    s.step
                )));
            };
            let resolve = |id: &str| {
                cp_index.get(id).copied().ok_or_else(|| {
                    Error::validation(format!("synergy references unknown cp `{id}`"))
                })
            };
            let f = resolve(&s.first)?;
            let g = resolve(&s.second)?;
            if !(s.omega.is_finite() && s.omega >= 0.0) {
                return Err(Error::validation(format!(
                    "synergy ({}, {}, {}): omega must be finite and >= 0",
                    s.step, s.first, s.second
                )));
            }
            let rel = precedence[cp_asp[f] * n + cp_asp[g]];
            let consistent = match s.omega {
                w if w > 1.0 => rel == Precedence::Discouraged,
                w if w < 1.0 => rel == Precedence::Encouraged,
                _ => true,
            };
            if !consistent {
                return Err(Error::validation(format!(
                    "synergy/precedence mismatch: omega {} on ({}, {}, {}) but precedence is {rel:?}",
                    s.omega, s.step, s.first, s.second
                )));
            }
            synergy.insert((step, f, g), s.omega);
        }

        let index_config = file.measure_config.into_config()?;

        Ok(KnowledgeBase {
            asps,
            cps,
            steps,
            asp_index,
            cp_index,
            step_index,
            precedence,
            required_before,
            synergy,
            cp_asp,
            index_config,
        })
    }
}

/// Loads and validates a knowledge base file.
pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeBase> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    KnowledgeBase::from_json_str(&text)
}

pub fn enforces(asp: &AbstractProtection, r: &SecurityRequirement) -> bool {
    asp.enforces(r)
}

pub fn compatible(asp: &AbstractProtection, artifact: &Artifact) -> bool {
    asp.compatible(artifact)
}

fn one() -> f64 {
    1.0
}

// On-disk layout.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct KbFile {
    pub kb_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub asps: Vec<AspFile>,
    pub cps: Vec<CpFile>,
    #[serde(default)]
    pub precedence: Vec<PrecedenceFile>,
    #[serde(default)]
    pub synergy: Vec<SynergyFile>,
    #[serde(default)]
    pub attack_steps: Vec<StepFile>,
    #[serde(default)]
    pub measure_config: MeasureConfigFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct AspFile {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub applicable_kinds: Vec<ArtifactKind>,
    #[serde(default)]
    pub enforces: Vec<SecurityRequirement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CpFile {
    pub id: String,
    pub asp: String,
    #[serde(default)]
    pub config: String,
    #[serde(default)]
    pub online: bool,
    #[serde(default)]
    pub metric_deltas: BTreeMap<String, MetricDelta>,
    #[serde(default)]
    pub overheads: BTreeMap<String, OverheadCoefficients>,
    #[serde(default)]
    pub mitigation: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PrecedenceFile {
    pub before: String,
    pub after: String,
    pub rel: Precedence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SynergyFile {
    pub step: String,
    pub first: String,
    pub second: String,
    pub omega: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct StepFile {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub base_probability: BTreeMap<ArtifactKind, f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct MeasureParamsFile {
    pub tau: Option<f64>,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct MeasureConfigFile {
    #[serde(default)]
    pub cc: Option<MeasureParamsFile>,
    #[serde(default)]
    pub ct: Option<MeasureParamsFile>,
    #[serde(default)]
    pub td: Option<MeasureParamsFile>,
    #[serde(default)]
    pub ta: Option<MeasureParamsFile>,
    #[serde(default)]
    pub expertise: Option<f64>,
}

impl MeasureConfigFile {
    fn into_config(self) -> Result<IndexConfig> {
        let mut cfg = IndexConfig::default();
        let entries = [
            (Measure::CC, self.cc),
            (Measure::CT, self.ct),
            (Measure::TD, self.td),
            (Measure::TA, self.ta),
        ];
        for (measure, file) in entries {
            let defaults = MeasureParams::default();
            let file = file.unwrap_or_default();
            let params = MeasureParams {
                tau: file.tau.unwrap_or(defaults.tau),
                rho: file.rho.unwrap_or(defaults.rho),
                epsilon: file.epsilon.unwrap_or(defaults.epsilon),
            };
            for (name, v) in [
                ("tau", params.tau),
                ("rho", params.rho),
                ("epsilon", params.epsilon),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::validation(format!(
                        "measure_config.{measure}: {name} must be finite and >= 0"
                    )));
                }
            }
            if params.rho < 10.0 * params.tau {
                return Err(Error::validation(format!(
                    "measure_config.{measure}: rho ({}) must be at least 10 x tau ({})",
                    params.rho, params.tau
                )));
            }
            *cfg.params_mut(measure) = params;
        }
        if let Some(e) = self.expertise {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::validation(
                    "measure_config.expertise must be finite and > 0",
                ));
            }
            cfg.expertise = e;
        }
        Ok(cfg)
    }
}
