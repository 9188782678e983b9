//! Overhead estimation and threshold checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{ConcreteProtection, KnowledgeBase};
use crate::model::ApplicationModel;
use crate::prep::CodeCorrelationSet;
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverheadType {
    ClientTime,
    ClientMem,
    ServerTime,
    ServerMem,
    Network,
}

impl OverheadType {
    pub const ALL: [OverheadType; 5] = [
        OverheadType::ClientTime,
        OverheadType::ClientMem,
        OverheadType::ServerTime,
        OverheadType::ServerMem,
        OverheadType::Network,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OverheadType::ClientTime => "client_time",
            OverheadType::ClientMem => "client_mem",
            OverheadType::ServerTime => "server_time",
            OverheadType::ServerMem => "server_mem",
            OverheadType::Network => "network",
        }
    }

    /// Server and network overheads exist only for online protections.
    pub fn online_only(self) -> bool {
        matches!(
            self,
            OverheadType::ServerTime | OverheadType::ServerMem | OverheadType::Network
        )
    }
}

impl fmt::Display for OverheadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OverheadType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OverheadType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownOverheadType(s.to_string()))
    }
}

/// Percentage contribution of one protection deployed on an artifact with the
/// given vanilla instruction count.
pub fn contribution(ty: OverheadType, cp: &ConcreteProtection, instructions: f64) -> f64 {
    if ty.online_only() && !cp.online {
        return 0.0;
    }
    match cp.overhead_coeffs.get(&ty) {
        Some(c) => c.base + c.per_instruction * instructions,
        None => 0.0,
    }
}

/// Estimated overhead ratio of `s` restricted to DSPs on `arts`.
pub fn overhead<'a>(
    ty: OverheadType,
    s: &Solution,
    arts: impl IntoIterator<Item = &'a str>,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> f64 {
    let arts: Vec<&str> = arts.into_iter().collect();
    let mut percent = 0.0;
    for d in s.dsps() {
        if !arts.contains(&d.artifact.as_str()) {
            continue;
        }
        let (Some(cp), Some(a)) = (kb.cp(d.cp.as_str()), model.artifact(d.artifact.as_str()))
        else {
            continue;
        };
        percent += contribution(ty, cp, a.vanilla_metrics.instructions);
    }
    1.0 + percent / 100.0
}

/// Like [`overhead`] with the type given by name.
pub fn overhead_named<'a>(
    name: &str,
    s: &Solution,
    arts: impl IntoIterator<Item = &'a str>,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<f64> {
    Ok(overhead(name.parse()?, s, arts, model, kb))
}

/// All five overheads of `s` on the closure of `ccs`.
pub fn overheads(
    s: &Solution,
    ccs: &CodeCorrelationSet,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> BTreeMap<OverheadType, f64> {
    OverheadType::ALL
        .into_iter()
        .map(|ty| {
            let arts = ccs.closure.iter().map(|a| a.as_str());
            (ty, overhead(ty, s, arts, model, kb))
        })
        .collect()
}

/// True when every overhead of `s` on the closure of `ccs` is within the
/// thresholds of `ccs`. Missing thresholds are infinite.
pub fn within_thresholds(
    s: &Solution,
    ccs: &CodeCorrelationSet,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> bool {
    ccs.thresholds.iter().all(|(ty, theta)| {
        theta.is_infinite() || {
            let arts = ccs.closure.iter().map(|a| a.as_str());
            overhead(*ty, s, arts, model, kb) <= *theta
        }
    })
}
