//! Where the defender's moves come from.

use crate::error::Result;
use crate::kb::KnowledgeBase;
use crate::model::ApplicationModel;
use crate::solspace::{enumerate_all, DspSpace};
use crate::solution::Solution;

/// A restartable stream of solutions. Every worker opens its own stream and
/// keeps the solutions whose ordinal falls in its shard.
pub trait SolutionSource: Sync {
    fn stream(&self) -> Result<Box<dyn Iterator<Item = Solution> + '_>>;
}

impl SolutionSource for [Solution] {
    fn stream(&self) -> Result<Box<dyn Iterator<Item = Solution> + '_>> {
        Ok(Box::new(self.iter().cloned()))
    }
}

impl SolutionSource for Vec<Solution> {
    fn stream(&self) -> Result<Box<dyn Iterator<Item = Solution> + '_>> {
        self.as_slice().stream()
    }
}

#[derive(Debug, Clone)]
pub enum Walk {
    /// The seeded walk, starting from `seed` (vanilla when `None`).
    Generated {
        seed: Option<Solution>,
        rng_seed: u64,
    },
    /// Every admissible solution in canonical order.
    Exhaustive,
}

/// Solutions drawn from a [`DspSpace`].
pub struct SpaceSource<'a> {
    pub space: DspSpace,
    pub walk: Walk,
    model: &'a ApplicationModel,
    kb: &'a KnowledgeBase,
}

impl<'a> SpaceSource<'a> {
    pub fn new(
        space: DspSpace,
        walk: Walk,
        model: &'a ApplicationModel,
        kb: &'a KnowledgeBase,
    ) -> Self {
        SpaceSource {
            space,
            walk,
            model,
            kb,
        }
    }
}

impl SolutionSource for SpaceSource<'_> {
    fn stream(&self) -> Result<Box<dyn Iterator<Item = Solution> + '_>> {
        match &self.walk {
            Walk::Generated { seed, rng_seed } => {
                let it = self
                    .space
                    .iter(self.model, self.kb, seed.as_ref(), *rng_seed)?;
                Ok(Box::new(it))
            }
            Walk::Exhaustive => Ok(Box::new(
                enumerate_all(&self.space, self.model, self.kb)?.into_iter(),
            )),
        }
    }
}
