//! Attack likelihood, security measures and the software protection (SP) index.
//!
//! The index of a state `(S, T)` is a weighted sum over protection objectives
//! of the measures relevant to the objective's requirement. Each measure is
//! predicted from the solution, attenuated by the likelihood of every attack
//! path in `T` aimed at that objective, and penalized when it falls below its
//! breach floor.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::StepId;
use crate::kb::{KnowledgeBase, SecurityRequirement};
use crate::metrics::{potency_or_zero, predict_vector, Metric};
use crate::model::{ApplicationModel, Artifact, ConcreteAttackPath, ProtectionObjective};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Code comprehension.
    CC,
    /// Code transfer.
    CT,
    /// Tampering detection.
    TD,
    /// Tampering avoidance.
    TA,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::CC, Measure::CT, Measure::TD, Measure::TA];

    /// Measures that count toward an objective with requirement `r`.
    pub fn relevant_to(r: &SecurityRequirement) -> &'static [Measure] {
        match r {
            SecurityRequirement::Confidentiality => &[Measure::CC, Measure::CT],
            SecurityRequirement::Integrity => &[Measure::TD, Measure::TA],
            SecurityRequirement::Other(_) => &[],
        }
    }

    pub fn requirement(self) -> SecurityRequirement {
        match self {
            Measure::CC | Measure::CT => SecurityRequirement::Confidentiality,
            Measure::TD | Measure::TA => SecurityRequirement::Integrity,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::CC => "cc",
            Measure::CT => "ct",
            Measure::TD => "td",
            Measure::TA => "ta",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    /// Scale of the measure.
    pub tau: f64,
    /// Breach penalty.
    pub rho: f64,
    /// Breach floor.
    pub epsilon: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            tau: 1.0,
            rho: 1000.0,
            epsilon: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexConfig {
    pub cc: MeasureParams,
    pub ct: MeasureParams,
    pub td: MeasureParams,
    pub ta: MeasureParams,
    /// Multiplier on base step probabilities.
    pub expertise: f64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            cc: MeasureParams::default(),
            ct: MeasureParams::default(),
            td: MeasureParams::default(),
            ta: MeasureParams::default(),
            expertise: 1.0,
        }
    }
}

impl IndexConfig {
    pub fn params(&self, m: Measure) -> &MeasureParams {
        match m {
            Measure::CC => &self.cc,
            Measure::CT => &self.ct,
            Measure::TD => &self.td,
            Measure::TA => &self.ta,
        }
    }

    pub fn params_mut(&mut self, m: Measure) -> &mut MeasureParams {
        match m {
            Measure::CC => &mut self.cc,
            Measure::CT => &mut self.ct,
            Measure::TD => &mut self.td,
            Measure::TA => &mut self.ta,
        }
    }
}

/// A solution and the attack paths mounted against it so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub solution: Solution,
    pub paths: Vec<ConcreteAttackPath>,
}

impl State {
    pub fn new(solution: Solution, paths: Vec<ConcreteAttackPath>) -> Self {
        State { solution, paths }
    }

    pub fn vanilla() -> Self {
        State::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SpIndex {
    pub value: f64,
}

impl SpIndex {
    pub fn is_breached(&self) -> bool {
        self.value < 0.0
    }
}

/// Success probability of a step after `n` units of effort:
/// `1 - (1 - p)^n` with `p` the (expertise-scaled) base probability.
pub fn step_success_prob(
    step: &StepId,
    artifact: &Artifact,
    n: u32,
    kb: &KnowledgeBase,
) -> Result<f64> {
    let p = kb.base_probability(step, artifact.kind)?;
    Ok(success_after(p, n))
}

fn success_after(p: f64, n: u32) -> f64 {
    let n = i32::try_from(n).unwrap_or(i32::MAX);
    1.0 - (1.0 - p).powi(n)
}

/// Combined mitigation of the DSPs on `artifact` against `step`: the product
/// of their mitigation factors times the synergy factor of every ordered pair.
pub fn mitigation(artifact: &str, s: &Solution, step: &StepId, kb: &KnowledgeBase) -> f64 {
    let cps: Vec<usize> = s
        .on_artifact(artifact)
        .filter_map(|d| kb.cp_position(d.cp.as_str()))
        .collect();
    let mut mu = 1.0;
    for &c in &cps {
        mu *= kb.cps()[c].mitigation_for(step);
    }
    if let Some(st) = kb.step_position(step.as_str()) {
        for (i, &a) in cps.iter().enumerate() {
            for &b in &cps[i + 1..] {
                mu *= kb.synergy_at(st, a, b);
            }
        }
    }
    mu
}

/// Probability that the concrete path succeeds against solution `s`.
pub fn likelihood(
    s: &Solution,
    cpath: &ConcreteAttackPath,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<f64> {
    let path = model
        .attack_path(cpath.path.as_str())
        .ok_or_else(|| Error::validation(format!("unknown attack path `{}`", cpath.path)))?;
    cpath.check(path)?;
    let mut units = vec![0u32; path.steps.len()];
    for &(idx, n) in &cpath.efforts {
        units[idx] = units[idx].saturating_add(n);
    }
    let mut lambda = 1.0;
    for (step, n) in path.steps.iter().zip(units) {
        let artifact = model
            .artifact(step.artifact.as_str())
            .ok_or_else(|| Error::validation(format!("unknown artifact `{}`", step.artifact)))?;
        let pi = step_success_prob(&step.step, artifact, n, kb)?;
        let mu = mitigation(artifact.id.as_str(), s, &step.step, kb);
        lambda *= (mu * pi).clamp(0.0, 1.0);
    }
    Ok(lambda.clamp(0.0, 1.0))
}

/// Unattenuated measure of `asset` under `s`.
pub fn raw_measure(m: Measure, asset: &Artifact, s: &Solution, kb: &KnowledgeBase) -> f64 {
    let predicted = predict_vector(s, asset, kb);
    raw_from_vector(m, asset, &predicted)
}

fn raw_from_vector(m: Measure, asset: &Artifact, v: &crate::model::MetricVector) -> f64 {
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    match m {
        Measure::CC => {
            let h = potency_or_zero(Metric::Halstead, asset, v.halstead);
            let c = potency_or_zero(Metric::Cyclomatic, asset, v.cyclomatic);
            (h + c).max(0.0)
        }
        Measure::CT => ratio(v.remote_instructions, asset.vanilla_metrics.instructions),
        Measure::TD => ratio(v.guarded_instructions, v.instructions),
        Measure::TA => ratio(v.local_instructions, v.instructions),
    }
}

/// Product of `1 - likelihood` over the paths of `t` aimed at `asset` with
/// requirement `r`, multiplied in a fixed canonical order so that the result
/// does not depend on the order of the paths in `t`. Returns the factor and
/// whether any such path exists.
fn attenuation(
    asset: &str,
    r: &SecurityRequirement,
    t: &State,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<(f64, bool)> {
    let mut relevant = Vec::new();
    for cp in &t.paths {
        let pos = model
            .path_position(cp.path.as_str())
            .ok_or_else(|| Error::validation(format!("unknown attack path `{}`", cp.path)))?;
        let path = &model.attack_paths()[pos];
        if path.target.as_str() == asset && &path.requirement == r {
            relevant.push((pos, cp));
        }
    }
    relevant.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.efforts.cmp(&b.1.efforts)));
    let mut factor = 1.0;
    for (_, cp) in &relevant {
        factor *= 1.0 - likelihood(&t.solution, cp, model, kb)?;
    }
    Ok((factor, !relevant.is_empty()))
}

/// Raw measure attenuated by every path of `t` aimed at `asset` with the
/// requirement the measure protects.
pub fn adjusted_measure(
    m: Measure,
    asset: &Artifact,
    t: &State,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<f64> {
    let (factor, _) = attenuation(asset.id.as_str(), &m.requirement(), t, model, kb)?;
    Ok(factor * raw_measure(m, asset, &t.solution, kb))
}

/// `tau * adjusted - rho * H(epsilon - adjusted)` with `H(0) = 0`.
pub fn measure_value(adjusted: f64, p: &MeasureParams) -> f64 {
    let breached = if p.epsilon - adjusted > 0.0 { 1.0 } else { 0.0 };
    p.tau * adjusted - p.rho * breached
}

/// The penalty term only applies once the objective is under attack, so that
/// unattacked states (including the vanilla state) score their plain measures.
pub fn penalized_measure(adjusted: f64, p: &MeasureParams, attacked: bool) -> f64 {
    if attacked {
        measure_value(adjusted, p)
    } else {
        p.tau * adjusted
    }
}

/// Contribution of one objective to the index.
fn objective_value(
    po: &ProtectionObjective,
    t: &State,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<f64> {
    let measures = Measure::relevant_to(&po.requirement);
    if measures.is_empty() {
        return Ok(0.0);
    }
    let asset = model
        .artifact(po.artifact.as_str())
        .ok_or_else(|| Error::validation(format!("unknown artifact `{}`", po.artifact)))?;
    let (factor, attacked) = attenuation(asset.id.as_str(), &po.requirement, t, model, kb)?;
    let predicted = predict_vector(&t.solution, asset, kb);
    let cfg = kb.index_config();
    let mut inner = 0.0;
    for &m in measures {
        let adjusted = factor * raw_from_vector(m, asset, &predicted);
        inner += penalized_measure(adjusted, cfg.params(m), attacked);
    }
    Ok(po.weight * inner)
}

/// SP index of a state over every objective of the model.
pub fn sp_index(t: &State, model: &ApplicationModel, kb: &KnowledgeBase) -> Result<SpIndex> {
    let all: Vec<usize> = (0..model.pos().len()).collect();
    sp_index_for(t, model, kb, &all)
}

/// SP index restricted to the objectives at `po_indices` (summed in the
/// given order).
pub fn sp_index_for(
    t: &State,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
    po_indices: &[usize],
) -> Result<SpIndex> {
    let mut total = 0.0;
    for &i in po_indices {
        total += objective_value(&model.pos()[i], t, model, kb)?;
    }
    Ok(SpIndex { value: total })
}

/// Index terms of one solution, precomputed so that states reached by
/// appending unit-effort paths can be scored from path counts alone.
///
/// Scores are bit-identical to [`sp_index_for`] on the same objectives when
/// the groups are summed in order.
#[derive(Debug, Clone)]
pub struct BoundIndex {
    groups: Vec<Vec<ObjectiveTerm>>,
}

#[derive(Debug, Clone)]
struct ObjectiveTerm {
    weight: f64,
    measures: Vec<(f64, MeasureParams)>,
    /// `(move index, 1 - likelihood)` in ascending model path order.
    paths: Vec<(usize, f64)>,
}

impl BoundIndex {
    /// `groups` lists objective indices per group; `moves` lists the model
    /// path indices the attacker can append, in move order.
    pub fn new(
        s: &Solution,
        groups: &[Vec<usize>],
        moves: &[usize],
        model: &ApplicationModel,
        kb: &KnowledgeBase,
    ) -> Result<Self> {
        let cfg = kb.index_config();
        let mut survive = Vec::with_capacity(moves.len());
        for &p in moves {
            let path = &model.attack_paths()[p];
            survive.push(1.0 - likelihood(s, &ConcreteAttackPath::unit(path), model, kb)?);
        }
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let mut terms = Vec::with_capacity(g.len());
            for &i in g {
                let po = &model.pos()[i];
                let asset = model.artifact(po.artifact.as_str()).ok_or_else(|| {
                    Error::validation(format!("unknown artifact `{}`", po.artifact))
                })?;
                let relevant = Measure::relevant_to(&po.requirement);
                let predicted = predict_vector(s, asset, kb);
                let measures = relevant
                    .iter()
                    .map(|&m| (raw_from_vector(m, asset, &predicted), *cfg.params(m)))
                    .collect();
                let mut paths: Vec<(usize, usize, f64)> = moves
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| {
                        let path = &model.attack_paths()[p];
                        path.target == po.artifact && path.requirement == po.requirement
                    })
                    .map(|(k, &p)| (p, k, survive[k]))
                    .collect();
                paths.sort_by_key(|&(p, _, _)| p);
                terms.push(ObjectiveTerm {
                    weight: po.weight,
                    measures,
                    paths: paths.into_iter().map(|(_, k, f)| (k, f)).collect(),
                });
            }
            out.push(terms);
        }
        Ok(BoundIndex { groups: out })
    }

    /// Index after appending `counts[k]` unit paths of move `k`.
    pub fn value(&self, counts: &[u32]) -> f64 {
        let mut total = 0.0;
        for g in &self.groups {
            total += Self::group_value(g, counts);
        }
        total
    }

    fn group_value(terms: &[ObjectiveTerm], counts: &[u32]) -> f64 {
        let mut sum = 0.0;
        for t in terms {
            if t.measures.is_empty() {
                sum += 0.0;
                continue;
            }
            let mut factor = 1.0;
            let mut attacked = false;
            for &(k, f) in &t.paths {
                for _ in 0..counts[k] {
                    factor *= f;
                    attacked = true;
                }
            }
            let mut inner = 0.0;
            for (raw, params) in &t.measures {
                inner += penalized_measure(factor * raw, params, attacked);
            }
            sum += t.weight * inner;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::DeployedProtection;

    const KB: &str = r#"{
        "kb_version": 1,
        "asps": [
            {"id": "obf", "applicable_kinds": ["code"], "enforces": ["confidentiality"]},
            {"id": "enc", "applicable_kinds": ["code"], "enforces": ["confidentiality"]}
        ],
        "cps": [
            {"id": "obf_1", "asp": "obf", "mitigation": {"analyse": 0.5},
             "metric_deltas": {"halstead": {"multiplier": 1.5}, "cyclomatic": {"multiplier": 2}}},
            {"id": "enc_1", "asp": "enc", "mitigation": {"analyse": 0.8},
             "metric_deltas": {"remote_instructions": {"offset": 30}}}
        ],
        "precedence": [{"before": "obf", "after": "enc", "rel": "encouraged"}],
        "synergy": [{"step": "analyse", "first": "obf_1", "second": "enc_1", "omega": 0.9}],
        "attack_steps": [
            {"id": "analyse", "base_probability": {"code": 0.5}},
            {"id": "sure", "base_probability": {"code": 1.0}},
            {"id": "likely", "base_probability": {"code": 0.8}}
        ]
    }"#;

    fn kb() -> KnowledgeBase {
        KnowledgeBase::from_json_str(KB).unwrap()
    }

    fn model(kb: &KnowledgeBase, weight: f64) -> ApplicationModel {
        let text = format!(
            r#"{{
            "model_version": 1,
            "artifacts": [{{"id": "f", "kind": "code", "file": "m.c", "lines": [1, 9],
                "vanilla_metrics": {{"halstead": 100, "cyclomatic": 2, "instructions": 120}}}}],
            "protection_objectives": [{{"requirement": "confidentiality", "artifact": "f", "weight": {weight}}}],
            "attack_paths": [
                {{"id": "K1", "target": "f", "requirement": "confidentiality",
                  "steps": [{{"step": "likely", "artifact": "f"}}]}},
                {{"id": "K2", "target": "f", "requirement": "confidentiality",
                  "steps": [{{"step": "sure", "artifact": "f"}}]}},
                {{"id": "K3", "target": "f", "requirement": "confidentiality",
                  "steps": [{{"step": "analyse", "artifact": "f"}}, {{"step": "likely", "artifact": "f"}}]}}
            ]
        }}"#
        );
        ApplicationModel::from_json_str(&text, kb).unwrap()
    }

    fn sol(cps: &[&str]) -> Solution {
        cps.iter()
            .map(|c| DeployedProtection::new(*c, "f"))
            .collect()
    }

    fn unit(m: &ApplicationModel, id: &str) -> ConcreteAttackPath {
        ConcreteAttackPath::unit(m.attack_path(id).unwrap())
    }

    #[test]
    fn success_probability() {
        let kb = kb();
        let m = model(&kb, 1.0);
        let f = m.artifact("f").unwrap();
        assert_eq!(step_success_prob(&"sure".into(), f, 7, &kb).unwrap(), 1.0);
        assert_eq!(
            step_success_prob(&"analyse".into(), f, 2, &kb).unwrap(),
            0.75
        );
        assert_eq!(
            step_success_prob(&"analyse".into(), f, 1, &kb).unwrap(),
            0.5
        );
        assert!(step_success_prob(&"nope".into(), f, 1, &kb).is_err());
    }

    #[test]
    fn mitigation_products() {
        let kb = kb();
        let step: StepId = "analyse".into();
        assert_eq!(mitigation("f", &Solution::vanilla(), &step, &kb), 1.0);
        assert_eq!(mitigation("f", &sol(&["obf_1"]), &step, &kb), 0.5);
        let mu = mitigation("f", &sol(&["obf_1", "enc_1"]), &step, &kb);
        assert!((mu - 0.36).abs() < 1e-12, "{mu}");
        // synergy only applies in the declared order
        let mu = mitigation("f", &sol(&["enc_1", "obf_1"]), &step, &kb);
        assert!((mu - 0.4).abs() < 1e-12, "{mu}");
    }

    #[test]
    fn likelihood_values() {
        let kb = kb();
        let m = model(&kb, 1.0);
        // analyse (0.5) mitigated by 0.5, then likely (0.8)
        let l = likelihood(&sol(&["obf_1"]), &unit(&m, "K3"), &m, &kb).unwrap();
        assert!((l - 0.25 * 0.8).abs() < 1e-12);
        let l = likelihood(&Solution::vanilla(), &unit(&m, "K3"), &m, &kb).unwrap();
        assert!((l - 0.5 * 0.8).abs() < 1e-12);
        let two_units = ConcreteAttackPath {
            path: "K1".into(),
            efforts: vec![(0, 2)],
        };
        let l = likelihood(&Solution::vanilla(), &two_units, &m, &kb).unwrap();
        assert!((l - 0.96).abs() < 1e-12);
    }

    #[test]
    fn raw_measures() {
        let kb = kb();
        let m = model(&kb, 1.0);
        let f = m.artifact("f").unwrap();
        for meas in Measure::ALL {
            assert_eq!(raw_measure(meas, f, &Solution::vanilla(), &kb), 0.0);
        }
        // halstead +0.5, cyclomatic +1.0
        assert_eq!(raw_measure(Measure::CC, f, &sol(&["obf_1"]), &kb), 1.5);
        assert_eq!(raw_measure(Measure::CT, f, &sol(&["enc_1"]), &kb), 0.25);
    }

    #[test]
    fn adjusted_measures() {
        let kb = kb();
        let m = model(&kb, 1.0);
        let f = m.artifact("f").unwrap();
        let s = sol(&["obf_1"]);
        let base = State::new(s.clone(), vec![]);
        assert_eq!(
            adjusted_measure(Measure::CC, f, &base, &m, &kb).unwrap(),
            1.5
        );
        let certain = State::new(s.clone(), vec![unit(&m, "K2")]);
        assert_eq!(
            adjusted_measure(Measure::CC, f, &certain, &m, &kb).unwrap(),
            0.0
        );
        let two = State::new(s, vec![unit(&m, "K1"), unit(&m, "K3")]);
        // (1 - 0.8) * (1 - 0.2) * 1.5
        let v = adjusted_measure(Measure::CC, f, &two, &m, &kb).unwrap();
        assert!((v - 0.2 * 0.8 * 1.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn measure_formula() {
        let p = |tau, rho, epsilon| MeasureParams { tau, rho, epsilon };
        assert_eq!(measure_value(0.1, &p(1.0, 100.0, 0.1)), 0.1);
        assert_eq!(measure_value(0.0, &p(1.0, 100.0, 0.1)), -100.0);
        assert_eq!(measure_value(0.5, &p(2.0, 100.0, 0.1)), 1.0);
        assert_eq!(penalized_measure(0.0, &p(1.0, 100.0, 0.1), false), 0.0);
    }

    #[test]
    fn index_values() {
        let kb = kb();
        let m = model(&kb, 2.0);
        assert_eq!(sp_index(&State::vanilla(), &m, &kb).unwrap().value, 0.0);
        // CC = 0.5 * 0 ... use obf_1: CC 1.5; enc_1: CT 0.25
        let s = sol(&["obf_1", "enc_1"]);
        let v = sp_index(&State::new(s, vec![]), &m, &kb).unwrap().value;
        assert_eq!(v, 2.0 * (1.5 + 0.25));
        let broken = State::new(sol(&["obf_1"]), vec![unit(&m, "K2")]);
        assert!(sp_index(&broken, &m, &kb).unwrap().is_breached());
    }

    #[test]
    fn bound_index_matches_direct_computation() {
        let kb = kb();
        let m = model(&kb, 2.0);
        let moves = [0, 1, 2];
        for s in [
            Solution::vanilla(),
            sol(&["obf_1"]),
            sol(&["obf_1", "enc_1"]),
            sol(&["enc_1"]),
        ] {
            let bound = BoundIndex::new(&s, &[vec![0]], &moves, &m, &kb).unwrap();
            for counts in [[0, 0, 0], [1, 0, 0], [0, 0, 2], [1, 1, 1], [2, 0, 1]] {
                let mut paths = Vec::new();
                for (k, &c) in counts.iter().enumerate().rev() {
                    for _ in 0..c {
                        paths.push(ConcreteAttackPath::unit(&m.attack_paths()[moves[k]]));
                    }
                }
                let direct = sp_index(&State::new(s.clone(), paths), &m, &kb)
                    .unwrap()
                    .value;
                assert_eq!(bound.value(&counts), direct, "{s} {counts:?}");
            }
        }
    }
}
