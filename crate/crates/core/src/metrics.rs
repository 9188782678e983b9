//! Post-protection metric prediction and potency.
//!
//! Each concrete protection carries a `(multiplier, offset)` pair per metric.
//! Predicting a metric folds those pairs over the protections deployed on the
//! artifact, in solution order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{ConcreteProtection, KnowledgeBase};
use crate::model::{Artifact, MetricVector};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Halstead,
    Cyclomatic,
    Instructions,
    RemoteInstructions,
    LocalInstructions,
    GuardedInstructions,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Halstead,
        Metric::Cyclomatic,
        Metric::Instructions,
        Metric::RemoteInstructions,
        Metric::LocalInstructions,
        Metric::GuardedInstructions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Halstead => "halstead",
            Metric::Cyclomatic => "cyclomatic",
            Metric::Instructions => "instructions",
            Metric::RemoteInstructions => "remote_instructions",
            Metric::LocalInstructions => "local_instructions",
            Metric::GuardedInstructions => "guarded_instructions",
        }
    }

    /// Counts that can never exceed the instruction count.
    fn is_instruction_share(self) -> bool {
        matches!(
            self,
            Metric::RemoteInstructions | Metric::LocalInstructions | Metric::GuardedInstructions
        )
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

/// Folds the deltas of `cps` (in order) over a vanilla vector.
pub fn fold_metrics<'a>(
    vanilla: &MetricVector,
    cps: impl IntoIterator<Item = &'a ConcreteProtection>,
) -> MetricVector {
    let mut v = *vanilla;
    for cp in cps {
        for m in Metric::ALL {
            let next = cp.delta(m).apply(v.get(m)).max(0.0);
            v.set(m, next);
        }
        for m in Metric::ALL {
            if m.is_instruction_share() && v.get(m) > v.instructions {
                v.set(m, v.instructions);
            }
        }
    }
    v
}

/// Predicted metric vector of `a` under solution `s`.
pub fn predict_vector(s: &Solution, a: &Artifact, kb: &KnowledgeBase) -> MetricVector {
    let cps = s
        .on_artifact(a.id.as_str())
        .filter_map(|d| kb.cp(d.cp.as_str()));
    fold_metrics(&a.vanilla_metrics, cps)
}

pub fn predict_metric(m: Metric, s: &Solution, a: &Artifact, kb: &KnowledgeBase) -> f64 {
    predict_vector(s, a, kb).get(m)
}

/// Like [`predict_metric`] but with the metric given by name.
pub fn predict_metric_named(
    name: &str,
    s: &Solution,
    a: &Artifact,
    kb: &KnowledgeBase,
) -> Result<f64> {
    Ok(predict_metric(name.parse()?, s, a, kb))
}

/// Relative change of `predicted` over `vanilla`: `predicted / vanilla - 1`.
pub fn potency_from(m: Metric, a: &Artifact, predicted: f64) -> Result<f64> {
    let vanilla = a.vanilla_metrics.get(m);
    if vanilla <= 0.0 {
        return Err(Error::DegenerateVanilla {
            metric: m.to_string(),
            artifact: a.id.to_string(),
        });
    }
    Ok(predicted / vanilla - 1.0)
}

pub fn potency(m: Metric, a: &Artifact, s: &Solution, kb: &KnowledgeBase) -> Result<f64> {
    potency_from(m, a, predict_metric(m, s, a, kb))
}

/// Potency with degenerate vanilla values mapped to 0.
pub(crate) fn potency_or_zero(m: Metric, a: &Artifact, predicted: f64) -> f64 {
    match potency_from(m, a, predicted) {
        Ok(p) => p,
        Err(e) => {
            log::trace!("{e}; potency taken as 0");
            0.0
        }
    }
}
