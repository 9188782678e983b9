//! Scripted evaluation: node values read from a fixture instead of the index.
//!
//! Each candidate solution carries an explicit attack tree. Every node names
//! the attack path played to reach it and its static value; a node without
//! children ends the line.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::game::{Game, Line, Move};
use crate::error::{Error, Result};
use crate::ids::PathId;
use crate::model::ApplicationModel;
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedTree {
    pub solutions: Vec<ScriptedSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedSolution {
    /// Name of a candidate solution of the model.
    pub solution: String,
    pub value: f64,
    #[serde(default)]
    pub children: Vec<ScriptedNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedNode {
    pub path: PathId,
    pub value: f64,
    #[serde(default)]
    pub children: Vec<ScriptedNode>,
}

impl ScriptedTree {
    pub(crate) fn check(&self, model: &ApplicationModel) -> Result<()> {
        fn walk(n: &ScriptedNode, model: &ApplicationModel) -> Result<()> {
            if model.attack_path(n.path.as_str()).is_none() {
                return Err(Error::validation(format!(
                    "scripted evaluation references unknown attack path `{}`",
                    n.path
                )));
            }
            if !n.value.is_finite() {
                return Err(Error::validation("scripted values must be finite"));
            }
            n.children.iter().try_for_each(|c| walk(c, model))
        }
        for s in &self.solutions {
            if !model
                .candidate_solutions()
                .iter()
                .any(|c| c.name == s.solution)
            {
                return Err(Error::validation(format!(
                    "scripted evaluation references unknown candidate solution `{}`",
                    s.solution
                )));
            }
            if !s.value.is_finite() {
                return Err(Error::validation("scripted values must be finite"));
            }
            s.children.iter().try_for_each(|c| walk(c, model))?;
        }
        Ok(())
    }
}

/// A game whose values come from a [`ScriptedTree`]. Moves are model attack
/// path indices.
pub struct ScriptedGame<'a> {
    model: &'a ApplicationModel,
    tree: &'a ScriptedTree,
}

impl<'a> ScriptedGame<'a> {
    pub fn new(model: &'a ApplicationModel) -> Result<Self> {
        let tree = model
            .scripted_evaluation()
            .ok_or_else(|| Error::config("model has no scripted evaluation"))?;
        Ok(ScriptedGame { model, tree })
    }

    /// The candidate solutions in script order.
    pub fn solutions(&self) -> Vec<Solution> {
        self.tree
            .solutions
            .iter()
            .filter_map(|s| {
                self.model
                    .candidate_solutions()
                    .iter()
                    .find(|c| c.name == s.solution)
                    .map(|c| c.dsps.clone())
            })
            .collect()
    }
}

impl Game for ScriptedGame<'_> {
    fn bind(&self, s: &Solution) -> Result<Box<dyn Line + '_>> {
        let name = self
            .model
            .candidate_solutions()
            .iter()
            .find(|c| &c.dsps == s)
            .map(|c| c.name.as_str())
            .ok_or_else(|| Error::config(format!("solution {s} is not a scripted candidate")))?;
        let root = self
            .tree
            .solutions
            .iter()
            .find(|r| r.solution == name)
            .ok_or_else(|| Error::config(format!("candidate `{name}` has no scripted tree")))?;
        Ok(Box::new(ScriptedLine {
            model: self.model,
            root,
        }))
    }

    fn move_count(&self) -> usize {
        self.model.attack_paths().len()
    }

    fn monotone(&self) -> bool {
        false
    }

    fn order_sensitive(&self) -> bool {
        true
    }

    fn move_paths(&self, m: Move) -> Cow<'_, [usize]> {
        Cow::Owned(vec![m])
    }

    fn move_label(&self, m: Move) -> String {
        let p = &self.model.attack_paths()[m];
        format!("{}({},{})", p.id, p.target, p.requirement)
    }

    fn solution_label(&self, s: &Solution) -> Option<String> {
        self.model
            .candidate_solutions()
            .iter()
            .find(|c| &c.dsps == s)
            .map(|c| c.name.clone())
    }
}

struct ScriptedLine<'a> {
    model: &'a ApplicationModel,
    root: &'a ScriptedSolution,
}

impl ScriptedLine<'_> {
    fn children(&self, seq: &[Move]) -> &[ScriptedNode] {
        let mut children = &self.root.children[..];
        for &m in seq {
            let id = &self.model.attack_paths()[m].id;
            match children.iter().find(|c| &c.path == id) {
                Some(c) => children = &c.children,
                None => return &[],
            }
        }
        children
    }
}

impl Line for ScriptedLine<'_> {
    fn value(&self, seq: &[Move], _counts: &[u32]) -> f64 {
        let Some((&last, prefix)) = seq.split_last() else {
            return self.root.value;
        };
        let id = &self.model.attack_paths()[last].id;
        self.children(prefix)
            .iter()
            .find(|c| &c.path == id)
            .map(|c| c.value)
            .expect("moves come from the script")
    }

    fn moves(&self, seq: &[Move]) -> Cow<'_, [Move]> {
        Cow::Owned(
            self.children(seq)
                .iter()
                .map(|c| self.model.path_position(c.path.as_str()).expect("checked"))
                .collect(),
        )
    }
}
