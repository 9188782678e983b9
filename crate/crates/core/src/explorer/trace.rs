//! Recorded search trees and their DOT rendering.
//!
//! Node labels follow `label:p(p')`, with `p` the value propagated to the
//! node and `p'` its static value; leaves, where both agree, show `label:p`.

use std::fmt::Write as _;

use serde::Serialize;

use super::game::Move;
use crate::error::{Error, Result};

/// Largest tree [`Trace::to_dot`] renders by default.
pub const DOT_NODE_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceNode {
    pub parent: Option<usize>,
    pub label: String,
    pub value: f64,
    pub static_value: f64,
    /// Attacker move leading here, for attack nodes.
    pub mv: Option<Move>,
    /// Stream ordinal, for solution nodes.
    pub ordinal: Option<usize>,
    pub children: Vec<usize>,
    pub winning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    /// Node 0 is the root.
    pub nodes: Vec<TraceNode>,
}

impl Trace {
    pub(crate) fn new(root_label: &str) -> Self {
        Trace {
            nodes: vec![TraceNode {
                parent: None,
                label: root_label.to_string(),
                value: f64::NAN,
                static_value: f64::NAN,
                mv: None,
                ordinal: None,
                children: Vec::new(),
                winning: false,
            }],
        }
    }

    pub(crate) fn push(
        &mut self,
        parent: usize,
        label: String,
        static_value: f64,
        mv: Option<Move>,
        ordinal: Option<usize>,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TraceNode {
            parent: Some(parent),
            label,
            value: static_value,
            static_value,
            mv,
            ordinal,
            children: Vec::new(),
            winning: false,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Marks the root, the solution with `ordinal` and the nodes reached by
    /// `attack` below it.
    pub(crate) fn mark(&mut self, ordinal: usize, attack: &[Move]) {
        self.nodes[0].winning = true;
        let Some(mut at) = self.nodes[0]
            .children
            .iter()
            .copied()
            .find(|&c| self.nodes[c].ordinal == Some(ordinal))
        else {
            return;
        };
        self.nodes[at].winning = true;
        for &m in attack {
            let Some(next) = self.nodes[at]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c].mv == Some(m))
            else {
                return;
            };
            self.nodes[next].winning = true;
            at = next;
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The marked leaf-most node of the winning path.
    pub fn winning_leaf(&self) -> Option<usize> {
        let mut at = 0;
        if !self.nodes.first()?.winning {
            return None;
        }
        while let Some(&c) = self.nodes[at]
            .children
            .iter()
            .find(|&&c| self.nodes[c].winning)
        {
            at = c;
        }
        Some(at)
    }

    pub fn node_label(&self, id: usize) -> String {
        let n = &self.nodes[id];
        if n.parent.is_none() || (n.children.is_empty() && n.value == n.static_value) {
            format!("{}:{}", n.label, fmt_value(n.value))
        } else {
            format!(
                "{}:{}({})",
                n.label,
                fmt_value(n.value),
                fmt_value(n.static_value)
            )
        }
    }

    /// DOT text; trees above `limit` nodes are refused.
    pub fn to_dot(&self, limit: usize) -> Result<String> {
        if self.nodes.len() > limit {
            return Err(Error::TooLarge {
                nodes: self.nodes.len(),
                limit,
            });
        }
        let mut out =
            String::from("digraph search {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let label = self.node_label(id).replace('"', "\\\"");
            let style = if n.winning {
                ", style=bold, color=red"
            } else {
                ""
            };
            let _ = writeln!(out, "  n{id} [label=\"{label}\"{style}];");
        }
        for (id, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                let style = if n.winning && self.nodes[c].winning {
                    " [style=bold, color=red]"
                } else {
                    ""
                };
                let _ = writeln!(out, "  n{id} -> n{c}{style};");
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "?".to_string()
    } else if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_limit() {
        let mut t = Trace::new("root");
        let s = t.push(0, "S1".into(), 18.0, None, Some(0));
        let k = t.push(s, "K1".into(), 11.0, Some(0), None);
        t.nodes[s].value = 11.0;
        t.nodes[0].value = 11.0;
        t.mark(0, &[0]);
        assert_eq!(t.node_label(s), "S1:11(18)");
        assert_eq!(t.node_label(k), "K1:11");
        assert_eq!(t.node_label(0), "root:11");
        assert_eq!(t.winning_leaf(), Some(k));
        let dot = t.to_dot(DOT_NODE_LIMIT).unwrap();
        assert!(dot.contains("n1 -> n2 [style=bold, color=red];"));
        assert!(matches!(
            t.to_dot(2),
            Err(Error::TooLarge { nodes: 3, limit: 2 })
        ));
    }
}
