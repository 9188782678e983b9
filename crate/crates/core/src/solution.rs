use std::fmt;

use serde::{Deserialize, Serialize};

use crate::hash::Fnv64;
use crate::ids::{ArtifactId, CpId};

/// A concrete protection applied to one artifact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeployedProtection {
    pub cp: CpId,
    pub artifact: ArtifactId,
}

impl DeployedProtection {
    pub fn new(cp: impl Into<CpId>, artifact: impl Into<ArtifactId>) -> Self {
        DeployedProtection {
            cp: cp.into(),
            artifact: artifact.into(),
        }
    }
}

impl fmt::Display for DeployedProtection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.cp, self.artifact)
    }
}

/// Ordered list of deployed protections. The empty list is the vanilla solution.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    dsps: Vec<DeployedProtection>,
}

impl Solution {
    pub fn vanilla() -> Self {
        Solution::default()
    }

    pub fn new(dsps: Vec<DeployedProtection>) -> Self {
        Solution { dsps }
    }

    pub fn dsps(&self) -> &[DeployedProtection] {
        &self.dsps
    }

    pub fn len(&self) -> usize {
        self.dsps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dsps.is_empty()
    }

    pub fn push(&mut self, dsp: DeployedProtection) {
        self.dsps.push(dsp);
    }

    /// DSPs deployed on `artifact`, in solution order.
    pub fn on_artifact<'a>(
        &'a self,
        artifact: &'a str,
    ) -> impl Iterator<Item = &'a DeployedProtection> + 'a {
        self.dsps
            .iter()
            .filter(move |d| d.artifact.as_str() == artifact)
    }

    /// Order-sensitive hash over the `(cp, artifact)` pairs, stable across runs.
    pub fn canonical_hash(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.dsps.len() as u64);
        for d in &self.dsps {
            h.write_str(d.cp.as_str());
            h.write_str(d.artifact.as_str());
        }
        h.finish()
    }

    pub fn into_inner(self) -> Vec<DeployedProtection> {
        self.dsps
    }
}

impl FromIterator<DeployedProtection> for Solution {
    fn from_iter<I: IntoIterator<Item = DeployedProtection>>(iter: I) -> Self {
        Solution {
            dsps: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dsps.is_empty() {
            return f.write_str("vanilla");
        }
        f.write_str("[")?;
        for (i, d) in self.dsps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_order() {
        let a = DeployedProtection::new("p", "x");
        let b = DeployedProtection::new("q", "x");
        let s1 = Solution::new(vec![a.clone(), b.clone()]);
        let s2 = Solution::new(vec![b, a]);
        assert_ne!(s1.canonical_hash(), s2.canonical_hash());
        assert_eq!(s1.canonical_hash(), s1.clone().canonical_hash());
    }

    #[test]
    fn hash_separates_ids() {
        let s1 = Solution::new(vec![DeployedProtection::new("ab", "c")]);
        let s2 = Solution::new(vec![DeployedProtection::new("a", "bc")]);
        assert_ne!(s1.canonical_hash(), s2.canonical_hash());
    }

    #[test]
    fn display() {
        assert_eq!(Solution::vanilla().to_string(), "vanilla");
        let s = Solution::new(vec![
            DeployedProtection::new("p", "x"),
            DeployedProtection::new("q", "y"),
        ]);
        assert_eq!(s.to_string(), "[p(x), q(y)]");
    }
}
