//! The exploratory stage: a defender-vs-attacker mini-max search.
//!
//! [`explore`] drives either engine over a [`Game`] and a [`SolutionSource`].
//! [`optimize_per_ccs`] builds one tree per code correlation set and
//! combines the partial optima.

mod ccs;
mod config;
mod game;
mod scripted;
mod search;
mod source;
mod trace;
mod tt;

pub use ccs::{
    optimize_monolithic, optimize_per_ccs, optimize_per_ccs_warm, CcsOutcome, CombinedResult,
    CombinedSolution, SourceSpec,
};
pub use config::{Engine, Margins, SearchConfig, Toggles};
pub use game::{AttackBudget, Game, IndexGame, Line, Move};
pub use scripted::{ScriptedGame, ScriptedNode, ScriptedSolution, ScriptedTree};
pub use search::{explore, explore_traced, rank_order, RankedSolution, SearchResult};
pub use source::{SolutionSource, SpaceSource, Walk};
pub use trace::{Trace, TraceNode, DOT_NODE_LIMIT};
