//! Seeded synthetic knowledge bases and models for benchmarks and tests.
//!
//! All generators are deterministic in their seed. Values are plausible but
//! carry no meaning beyond exercising the pipeline.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ids::ArtifactId;
use crate::kb::{
    ArtifactKind, AspFile, CpFile, KbFile, KnowledgeBase, MetricDelta, OverheadCoefficients,
    Precedence, PrecedenceFile, SecurityRequirement, StepFile,
};
use crate::model::{
    ApplicationModel, Artifact, AttackPath, AttackStepRef, CandidateSolution, MetricVector,
    ProtectionObjective,
};
use crate::overhead::OverheadType;
use crate::prep::compatible_dsps;
use crate::solspace::is_valid_sequence;
use crate::solution::Solution;

#[derive(Debug, Clone)]
pub struct Instance {
    pub kb: KnowledgeBase,
    pub model: ApplicationModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KbShape {
    pub asps: usize,
    pub cps_per_asp: usize,
    pub steps: usize,
    /// Add random required/forbidden/encouraged/discouraged pairs.
    pub constraints: bool,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape {
            asps: 6,
            cps_per_asp: 2,
            steps: 4,
            constraints: false,
        }
    }
}

fn requirement(i: usize) -> SecurityRequirement {
    if i.is_multiple_of(2) {
        SecurityRequirement::Confidentiality
    } else {
        SecurityRequirement::Integrity
    }
}

/// A knowledge base of `shape.asps` protections. Every protection may be
/// applied at most once per artifact.
pub fn knowledge_base(shape: &KbShape, seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps: Vec<StepFile> = (0..shape.steps.max(1))
        .map(|k| StepFile {
            id: format!("k{k}"),
            description: String::new(),
            base_probability: BTreeMap::from([
                (ArtifactKind::Code, rng.gen_range(0.2..0.9)),
                (ArtifactKind::Datum, rng.gen_range(0.2..0.9)),
            ]),
        })
        .collect();

    let mut asps = Vec::new();
    let mut cps = Vec::new();
    let mut precedence = Vec::new();
    for i in 0..shape.asps {
        let enforces = match i % 3 {
            0 => vec![SecurityRequirement::Confidentiality],
            1 => vec![SecurityRequirement::Integrity],
            _ => vec![
                SecurityRequirement::Confidentiality,
                SecurityRequirement::Integrity,
            ],
        };
        let mut kinds = vec![ArtifactKind::Code];
        if i % 4 == 3 {
            kinds.push(ArtifactKind::Datum);
        }
        asps.push(AspFile {
            id: format!("P{i}"),
            name: None,
            applicable_kinds: kinds,
            enforces,
        });
        precedence.push(PrecedenceFile {
            before: format!("P{i}"),
            after: format!("P{i}"),
            rel: Precedence::Forbidden,
        });
        for j in 0..shape.cps_per_asp {
            let mut deltas = BTreeMap::new();
            deltas.insert(
                "halstead".to_string(),
                MetricDelta {
                    multiplier: rng.gen_range(1.1..2.0),
                    offset: 0.0,
                },
            );
            deltas.insert(
                "cyclomatic".to_string(),
                MetricDelta {
                    multiplier: rng.gen_range(1.0..1.8),
                    offset: 0.0,
                },
            );
            deltas.insert(
                "instructions".to_string(),
                MetricDelta {
                    multiplier: rng.gen_range(1.0..1.3),
                    offset: 0.0,
                },
            );
            let share = match i % 3 {
                0 => "remote_instructions",
                1 => "guarded_instructions",
                _ => "local_instructions",
            };
            deltas.insert(
                share.to_string(),
                MetricDelta {
                    multiplier: 1.0,
                    offset: rng.gen_range(5.0..40.0),
                },
            );
            let mut mitigation = BTreeMap::new();
            for s in &steps {
                if rng.gen_bool(0.5) {
                    mitigation.insert(s.id.clone(), rng.gen_range(0.3..0.95));
                }
            }
            let overheads = BTreeMap::from([
                (
                    OverheadType::ClientTime.name().to_string(),
                    OverheadCoefficients {
                        base: rng.gen_range(1.0..10.0),
                        per_instruction: rng.gen_range(0.0..0.01),
                    },
                ),
                (
                    OverheadType::ClientMem.name().to_string(),
                    OverheadCoefficients {
                        base: rng.gen_range(0.0..5.0),
                        per_instruction: 0.0,
                    },
                ),
            ]);
            cps.push(CpFile {
                id: format!("p{i}_{j}"),
                asp: format!("P{i}"),
                config: String::new(),
                online: false,
                metric_deltas: deltas,
                overheads,
                mitigation,
            });
        }
    }
    if shape.constraints {
        for i in 0..shape.asps {
            for j in 0..shape.asps {
                if i == j || !rng.gen_bool(0.3) {
                    continue;
                }
                // one relation per unordered pair keeps the table consistent
                if precedence
                    .iter()
                    .any(|p| p.before == format!("P{j}") && p.after == format!("P{i}"))
                {
                    continue;
                }
                let rel = *[
                    Precedence::Required,
                    Precedence::Forbidden,
                    Precedence::Encouraged,
                    Precedence::Discouraged,
                ]
                .choose(&mut rng)
                .expect("nonempty");
                precedence.push(PrecedenceFile {
                    before: format!("P{i}"),
                    after: format!("P{j}"),
                    rel,
                });
            }
        }
    }
    KnowledgeBase::from_file(KbFile {
        kb_version: 1,
        description: None,
        asps,
        cps,
        precedence,
        synergy: Vec::new(),
        attack_steps: steps,
        measure_config: Default::default(),
    })
    .expect("synthetic knowledge base is valid")
}

fn code_artifact(id: String, file: String, lines: (u32, u32), rng: &mut ChaCha8Rng) -> Artifact {
    Artifact {
        id: ArtifactId::from(id),
        kind: ArtifactKind::Code,
        file,
        lines,
        depends_on: Vec::new(),
        vanilla_metrics: MetricVector {
            halstead: rng.gen_range(50.0..500.0),
            cyclomatic: f64::from(rng.gen_range(1u32..20)),
            instructions: f64::from(rng.gen_range(50u32..2000)),
            ..MetricVector::default()
        },
    }
}

fn path(
    id: String,
    target: &ArtifactId,
    req: SecurityRequirement,
    steps: Vec<(String, ArtifactId)>,
) -> AttackPath {
    AttackPath {
        id: id.into(),
        target: target.clone(),
        requirement: req,
        steps: steps
            .into_iter()
            .map(|(s, a)| AttackStepRef {
                step: s.into(),
                artifact: a,
            })
            .collect(),
    }
}

fn random_step(kb: &KnowledgeBase, rng: &mut ChaCha8Rng) -> String {
    let steps = kb.attack_steps();
    steps[rng.gen_range(0..steps.len())].id.to_string()
}

/// The benchmark instance: `po_count` code assets, one per file, and
/// `path_count` two-step attack paths dealt round-robin over the assets.
pub fn bench_instance(po_count: usize, path_count: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let kb = knowledge_base(&KbShape::default(), seed);
    let artifacts: Vec<Artifact> = (0..po_count)
        .map(|i| code_artifact(format!("a{i}"), format!("f{i}.c"), (1, 100), &mut rng))
        .collect();
    let pos: Vec<ProtectionObjective> = (0..po_count)
        .map(|i| ProtectionObjective {
            requirement: requirement(i),
            artifact: artifacts[i].id.clone(),
            weight: 1.0,
        })
        .collect();
    let paths: Vec<AttackPath> = (0..path_count)
        .map(|j| {
            let i = j % po_count.max(1);
            let a = &artifacts[i].id;
            let steps = vec![
                (random_step(&kb, &mut rng), a.clone()),
                (random_step(&kb, &mut rng), a.clone()),
            ];
            path(format!("K{j}"), a, requirement(i), steps)
        })
        .collect();
    let model = ApplicationModel::new(artifacts, pos, paths, BTreeMap::new(), &kb)
        .expect("synthetic model is valid");
    Instance { kb, model }
}

/// Random valid solutions over the compatible DSPs of every objective,
/// pairwise distinct, vanilla never included.
fn random_solutions(inst: &Instance, count: usize, rng: &mut ChaCha8Rng) -> Vec<Solution> {
    let mut universe = Vec::new();
    for po in inst.model.pos() {
        for d in compatible_dsps(po, &inst.model, &inst.kb) {
            if !universe.contains(&d) {
                universe.push(d);
            }
        }
    }
    let mut out: Vec<Solution> = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 200 && !universe.is_empty() {
        attempts += 1;
        let k = rng.gen_range(1..=universe.len().min(3));
        let mut pick = universe.clone();
        pick.shuffle(rng);
        pick.truncate(k);
        let s = Solution::new(pick);
        if is_valid_sequence(&s, &inst.kb) && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// A small game: one or two assets, one to four attack paths and one to
/// four candidate solutions (stored as the model's candidates).
pub fn random_small(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = knowledge_base(
        &KbShape {
            asps: 4,
            cps_per_asp: 2,
            steps: 3,
            constraints: false,
        },
        seed.wrapping_mul(31).wrapping_add(7),
    );
    let assets = rng.gen_range(1..=2usize);
    let artifacts: Vec<Artifact> = (0..assets)
        .map(|i| {
            code_artifact(
                format!("a{i}"),
                "main.c".into(),
                (i as u32 * 100 + 1, i as u32 * 100 + 50),
                &mut rng,
            )
        })
        .collect();
    let pos: Vec<ProtectionObjective> = (0..assets)
        .map(|i| ProtectionObjective {
            requirement: requirement(rng.gen_range(0..2)),
            artifact: artifacts[i].id.clone(),
            weight: rng.gen_range(0.5..2.0),
        })
        .collect();
    let n_paths = rng.gen_range(1..=4usize);
    let paths: Vec<AttackPath> = (0..n_paths)
        .map(|j| {
            let i = rng.gen_range(0..assets);
            let len = rng.gen_range(1..=2);
            let steps = (0..len)
                .map(|_| {
                    let on = rng.gen_range(0..assets);
                    (random_step(&kb, &mut rng), artifacts[on].id.clone())
                })
                .collect();
            path(
                format!("K{}", j + 1),
                &artifacts[i].id,
                pos[i].requirement.clone(),
                steps,
            )
        })
        .collect();
    let model = ApplicationModel::new(artifacts, pos, paths, BTreeMap::new(), &kb)
        .expect("synthetic model is valid");
    let mut inst = Instance { kb, model };
    let wanted = rng.gen_range(1..=4usize);
    let mut sols = random_solutions(&inst, wanted, &mut rng);
    if sols.len() < wanted {
        sols.insert(0, Solution::vanilla());
        sols.truncate(wanted);
    }
    let candidates = sols
        .into_iter()
        .enumerate()
        .map(|(i, dsps)| CandidateSolution {
            name: format!("S{}", i + 1),
            dsps,
        })
        .collect();
    inst.model = inst
        .model
        .with_candidates(candidates, &inst.kb)
        .expect("candidates are valid");
    inst
}

/// The candidate solutions of a [`random_small`] instance.
pub fn candidates(inst: &Instance) -> Vec<Solution> {
    inst.model
        .candidate_solutions()
        .iter()
        .map(|c| c.dsps.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterShape {
    pub clusters: usize,
    pub max_assets: usize,
    pub extra_paths: usize,
}

/// `shape.clusters` groups of assets that share nothing across groups. Each
/// group lives in its own file; every path of a group runs through a helper
/// artifact of that group, which ties the group together.
pub fn clustered(shape: &ClusterShape, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = knowledge_base(
        &KbShape {
            asps: 3,
            cps_per_asp: 1,
            steps: 3,
            constraints: false,
        },
        seed ^ 0xc1c1,
    );
    let mut artifacts = Vec::new();
    let mut pos = Vec::new();
    let mut paths = Vec::new();
    for c in 0..shape.clusters {
        let file = format!("c{c}.c");
        let helper = code_artifact(format!("h{c}"), file.clone(), (1, 10), &mut rng);
        let n = rng.gen_range(1..=shape.max_assets.max(1));
        let mut assets = Vec::new();
        for i in 0..n {
            let lo = 100 * (i as u32 + 1);
            let a = code_artifact(format!("c{c}a{i}"), file.clone(), (lo, lo + 50), &mut rng);
            pos.push(ProtectionObjective {
                requirement: requirement(rng.gen_range(0..2)),
                artifact: a.id.clone(),
                weight: 1.0,
            });
            assets.push((
                a.id.clone(),
                pos.last().expect("pushed").requirement.clone(),
            ));
            artifacts.push(a);
        }
        let extra = rng.gen_range(0..=shape.extra_paths);
        for j in 0..n + extra {
            let (target, req) = if j < n {
                assets[j].clone()
            } else {
                assets[rng.gen_range(0..n)].clone()
            };
            let steps = vec![
                (random_step(&kb, &mut rng), helper.id.clone()),
                (random_step(&kb, &mut rng), target.clone()),
            ];
            paths.push(path(format!("K{c}_{j}"), &target, req, steps));
        }
        artifacts.push(helper);
    }
    let model = ApplicationModel::new(artifacts, pos, paths, BTreeMap::new(), &kb)
        .expect("synthetic model is valid");
    Instance { kb, model }
}

/// A small space with precedence constraints and a finite client-time
/// threshold, for checking the solution walk against enumeration.
pub fn enumeration_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = knowledge_base(
        &KbShape {
            asps: rng.gen_range(2..=4),
            cps_per_asp: rng.gen_range(1..=2),
            steps: 2,
            constraints: true,
        },
        seed.rotate_left(17),
    );
    let assets = rng.gen_range(1..=2usize);
    let artifacts: Vec<Artifact> = (0..assets)
        .map(|i| code_artifact(format!("a{i}"), format!("f{i}.c"), (1, 80), &mut rng))
        .collect();
    let pos: Vec<ProtectionObjective> = (0..assets)
        .map(|i| ProtectionObjective {
            requirement: requirement(rng.gen_range(0..2)),
            artifact: artifacts[i].id.clone(),
            weight: 1.0,
        })
        .collect();
    let paths: Vec<AttackPath> = (0..assets)
        .map(|i| {
            let a = &artifacts[i].id;
            path(
                format!("K{i}"),
                a,
                pos[i].requirement.clone(),
                vec![(random_step(&kb, &mut rng), a.clone())],
            )
        })
        .collect();
    let theta = 1.0 + rng.gen_range(0.05..0.4);
    let thresholds = BTreeMap::from([(
        crate::model::GLOBAL_SCOPE.to_string(),
        BTreeMap::from([(OverheadType::ClientTime, theta)]),
    )]);
    let model = ApplicationModel::new(artifacts, pos, paths, thresholds, &kb)
        .expect("synthetic model is valid");
    Instance { kb, model }
}
