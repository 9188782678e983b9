//! What the search engines play on.
//!
//! A [`Game`] binds a defender move (a solution) to a [`Line`], which scores
//! attack sequences and lists the attacker's moves. The engines only see move
//! indices, so the same engines drive the SP index and scripted trees.

use std::borrow::Cow;

use crate::error::Result;
use crate::index::BoundIndex;
use crate::kb::KnowledgeBase;
use crate::model::ApplicationModel;
use crate::prep::CcsPartition;
use crate::solution::Solution;

pub type Move = usize;

pub trait Game: Sync {
    fn bind(&self, s: &Solution) -> Result<Box<dyn Line + '_>>;

    fn move_count(&self) -> usize;

    /// Attacker moves never raise the value of a state.
    fn monotone(&self) -> bool;

    /// The value depends on the order of the moves, not only on how often
    /// each was played.
    fn order_sensitive(&self) -> bool {
        false
    }

    /// Attack paths (model indices) appended by move `m`.
    fn move_paths(&self, m: Move) -> Cow<'_, [usize]>;

    fn move_label(&self, m: Move) -> String;

    /// Display name of a defender move, if the game knows one.
    fn solution_label(&self, _s: &Solution) -> Option<String> {
        None
    }
}

pub trait Line {
    /// Value of the state reached by `seq`; `counts[m]` is how often move `m`
    /// occurs in `seq`.
    fn value(&self, seq: &[Move], counts: &[u32]) -> f64;

    /// Moves available after `seq`.
    fn moves(&self, seq: &[Move]) -> Cow<'_, [Move]>;
}

/// How many attack paths the attacker adds per turn when several CCSs are
/// searched in one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackBudget {
    /// One path per turn, against any asset.
    Shared,
    /// One path per turn in every CCS that has paths.
    PerCcs,
}

/// The SP index game: the attacker appends unit-effort attack paths.
pub struct IndexGame<'a> {
    model: &'a ApplicationModel,
    kb: &'a KnowledgeBase,
    groups: Vec<Vec<usize>>,
    /// Model indices of the paths the attacker can use.
    paths: Vec<usize>,
    /// Per move, indices into `paths`.
    moves: Vec<Vec<usize>>,
    all_moves: Vec<Move>,
}

impl<'a> IndexGame<'a> {
    /// Every objective and every path aimed at an asset.
    pub fn whole(model: &'a ApplicationModel, kb: &'a KnowledgeBase) -> Self {
        let pos: Vec<usize> = (0..model.pos().len()).collect();
        Self::single(model, kb, pos, |_| true)
    }

    /// Objectives and paths of the assets of one CCS.
    pub fn for_assets(
        model: &'a ApplicationModel,
        kb: &'a KnowledgeBase,
        assets: &[crate::ids::ArtifactId],
    ) -> Self {
        let pos: Vec<usize> = (0..model.pos().len())
            .filter(|&i| assets.contains(&model.pos()[i].artifact))
            .collect();
        Self::single(model, kb, pos, |target| {
            assets.iter().any(|a| a.as_str() == target)
        })
    }

    fn single(
        model: &'a ApplicationModel,
        kb: &'a KnowledgeBase,
        pos: Vec<usize>,
        keep: impl Fn(&str) -> bool,
    ) -> Self {
        let assets = model.assets();
        let paths: Vec<usize> = (0..model.attack_paths().len())
            .filter(|&p| {
                let t = model.attack_paths()[p].target.as_str();
                keep(t) && assets.iter().any(|a| a.as_str() == t)
            })
            .collect();
        let moves = (0..paths.len()).map(|k| vec![k]).collect();
        IndexGame {
            model,
            kb,
            groups: vec![pos],
            all_moves: (0..paths.len()).collect(),
            paths,
            moves,
        }
    }

    /// Every CCS in one tree; the index is summed per CCS in partition order.
    pub fn monolithic(
        model: &'a ApplicationModel,
        kb: &'a KnowledgeBase,
        partition: &CcsPartition,
        budget: AttackBudget,
    ) -> Self {
        let mut groups = Vec::new();
        let mut group_paths: Vec<Vec<usize>> = Vec::new();
        for c in &partition.sets {
            groups.push(
                (0..model.pos().len())
                    .filter(|&i| c.contains_asset(model.pos()[i].artifact.as_str()))
                    .collect(),
            );
            group_paths.push(
                (0..model.attack_paths().len())
                    .filter(|&p| c.contains_asset(model.attack_paths()[p].target.as_str()))
                    .collect(),
            );
        }
        let mut paths: Vec<usize> = group_paths.iter().flatten().copied().collect();
        paths.sort_unstable();
        let local = |p: usize| paths.binary_search(&p).expect("present");
        let moves: Vec<Vec<usize>> = match budget {
            AttackBudget::Shared => (0..paths.len()).map(|k| vec![k]).collect(),
            AttackBudget::PerCcs => {
                let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
                for gp in group_paths.iter().filter(|g| !g.is_empty()) {
                    let mut next = Vec::with_capacity(tuples.len() * gp.len());
                    for t in &tuples {
                        for &p in gp {
                            let mut t = t.clone();
                            t.push(local(p));
                            next.push(t);
                        }
                    }
                    tuples = next;
                }
                if tuples.len() == 1 && tuples[0].is_empty() {
                    Vec::new()
                } else {
                    tuples
                }
            }
        };
        IndexGame {
            model,
            kb,
            groups,
            all_moves: (0..moves.len()).collect(),
            paths,
            moves,
        }
    }

    /// Objective indices per group.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

impl Game for IndexGame<'_> {
    fn bind(&self, s: &Solution) -> Result<Box<dyn Line + '_>> {
        let bound = BoundIndex::new(s, &self.groups, &self.paths, self.model, self.kb)?;
        Ok(Box::new(IndexLine {
            bound,
            game: self,
            single: self.moves.iter().all(|m| m.len() == 1) && self.moves.len() == self.paths.len(),
        }))
    }

    fn move_count(&self) -> usize {
        self.moves.len()
    }

    fn monotone(&self) -> bool {
        true
    }

    fn move_paths(&self, m: Move) -> Cow<'_, [usize]> {
        Cow::Owned(self.moves[m].iter().map(|&k| self.paths[k]).collect())
    }

    fn move_label(&self, m: Move) -> String {
        let labels: Vec<String> = self.moves[m]
            .iter()
            .map(|&k| {
                let p = &self.model.attack_paths()[self.paths[k]];
                format!("{}({},{})", p.id, p.target, p.requirement)
            })
            .collect();
        labels.join("+")
    }
}

struct IndexLine<'g> {
    bound: BoundIndex,
    game: &'g IndexGame<'g>,
    /// Moves are single paths in path order, so move counts are path counts.
    single: bool,
}

impl Line for IndexLine<'_> {
    fn value(&self, _seq: &[Move], counts: &[u32]) -> f64 {
        if self.single {
            return self.bound.value(counts);
        }
        let mut per_path = vec![0u32; self.game.paths.len()];
        for (m, &c) in counts.iter().enumerate() {
            if c > 0 {
                for &k in &self.game.moves[m] {
                    per_path[k] += c;
                }
            }
        }
        self.bound.value(&per_path)
    }

    fn moves(&self, _seq: &[Move]) -> Cow<'_, [Move]> {
        Cow::Borrowed(&self.game.all_moves)
    }
}
