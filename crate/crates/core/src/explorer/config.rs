use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Literal mini-max over the whole tree.
    Plain,
    Optimized,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Engine::Plain),
            "optimized" => Ok(Engine::Optimized),
            other => Err(Error::config(format!("unknown engine `{other}`"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Plain => "plain",
            Engine::Optimized => "optimized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Toggles {
    pub alpha_beta: bool,
    pub aspiration: bool,
    pub tt: bool,
    pub futility: bool,
    pub ext_futility: bool,
    pub razoring: bool,
}

impl Toggles {
    pub const NONE: Toggles = Toggles {
        alpha_beta: false,
        aspiration: false,
        tt: false,
        futility: false,
        ext_futility: false,
        razoring: false,
    };

    /// The optimizations that never change the result.
    pub const EXACT: Toggles = Toggles {
        alpha_beta: true,
        aspiration: true,
        tt: true,
        ..Toggles::NONE
    };

    pub const ALL: Toggles = Toggles {
        alpha_beta: true,
        aspiration: true,
        tt: true,
        futility: true,
        ext_futility: true,
        razoring: true,
    };

    /// Parses a comma-separated list such as `alpha_beta,tt`. `all` and
    /// `exact` name the presets.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut t = Toggles::NONE;
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "alpha_beta" | "alphabeta" | "ab" => t.alpha_beta = true,
                "aspiration" => t.aspiration = true,
                "tt" => t.tt = true,
                "futility" => t.futility = true,
                "ext_futility" => t.ext_futility = true,
                "razoring" => t.razoring = true,
                "exact" => t = t.union(Toggles::EXACT),
                "all" => t = Toggles::ALL,
                "none" => {}
                other => return Err(Error::config(format!("unknown optimization `{other}`"))),
            }
        }
        Ok(t)
    }

    fn union(self, o: Toggles) -> Toggles {
        Toggles {
            alpha_beta: self.alpha_beta || o.alpha_beta,
            aspiration: self.aspiration || o.aspiration,
            tt: self.tt || o.tt,
            futility: self.futility || o.futility,
            ext_futility: self.ext_futility || o.ext_futility,
            razoring: self.razoring || o.razoring,
        }
    }

    pub(crate) fn forward_pruning(&self) -> bool {
        self.futility || self.ext_futility || self.razoring
    }
}

/// Forward-pruning margins in index units. Infinite margins never prune.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    pub futility: f64,
    pub ext_futility: f64,
    pub razor: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins {
            futility: f64::INFINITY,
            ext_futility: f64::INFINITY,
            razor: f64::INFINITY,
        }
    }
}

impl Margins {
    /// Parses `f=<v>,ef=<v>,rz=<v>`; omitted keys stay infinite.
    pub fn parse(s: &str) -> Result<Self> {
        let mut m = Margins::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::config(format!("margin `{part}` is not key=value")))?;
            let v: f64 = match v.trim() {
                "inf" | "infinity" => f64::INFINITY,
                x => x
                    .parse()
                    .map_err(|_| Error::config(format!("margin `{part}`: not a number")))?,
            };
            if v.is_nan() || v < 0.0 {
                return Err(Error::config(format!("margin `{part}` must be >= 0")));
            }
            match k.trim() {
                "f" => m.futility = v,
                "ef" => m.ext_futility = v,
                "rz" => m.razor = v,
                other => return Err(Error::config(format!("unknown margin `{other}`"))),
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// One defender turn plus `depth - 1` attacker turns.
    pub depth: u32,
    pub engine: Engine,
    pub toggles: Toggles,
    /// Center of the root aspiration window; the first solution's value when
    /// unset.
    pub aspiration_center: Option<f64>,
    pub aspiration_half_width: f64,
    pub margins: Margins,
    /// Transposition table slots (rounded up to a power of two).
    pub tt_capacity: usize,
    pub top_n: usize,
    pub workers: usize,
    /// Stop after this many defender moves.
    pub max_solutions: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            depth: 3,
            engine: Engine::Optimized,
            toggles: Toggles::EXACT,
            aspiration_center: None,
            aspiration_half_width: 1.0,
            margins: Margins::default(),
            tt_capacity: 1 << 16,
            top_n: 10,
            workers: 1,
            max_solutions: None,
        }
    }
}

impl SearchConfig {
    pub fn plain(depth: u32) -> Self {
        SearchConfig {
            depth,
            engine: Engine::Plain,
            toggles: Toggles::NONE,
            ..SearchConfig::default()
        }
    }

    pub fn optimized(depth: u32, toggles: Toggles) -> Self {
        SearchConfig {
            depth,
            engine: Engine::Optimized,
            toggles,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::config("depth must be at least 1"));
        }
        if self.top_n < 1 {
            return Err(Error::config("top_n must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        if self.aspiration_half_width.is_nan() || self.aspiration_half_width <= 0.0 {
            return Err(Error::config("aspiration half-width must be > 0"));
        }
        for m in [
            self.margins.futility,
            self.margins.ext_futility,
            self.margins.razor,
        ] {
            if m.is_nan() || m < 0.0 {
                return Err(Error::config("margins must be >= 0"));
            }
        }
        if self.engine == Engine::Plain && self.toggles != Toggles::NONE {
            return Err(Error::config("the plain engine takes no optimizations"));
        }
        Ok(())
    }
}
