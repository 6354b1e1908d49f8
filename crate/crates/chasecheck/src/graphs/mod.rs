//! Position- and place-based acyclicity analyses, plus the shared graph
//! utilities they are built on.

pub mod ar;
pub mod fd;
pub mod gamma;
pub mod ja;
pub mod scc;
pub mod swa;
pub mod wa;

pub use ar::{ar_check, ar_ranking, verify_ranking, ArgumentRanking};
pub use fd::{fd_check, fd_positions};
pub use gamma::gamma_check;
pub use ja::{ja_check, ja_move};
pub use swa::{covers, swa_check};
pub use wa::{wa_check, wa_graph};

use std::collections::HashMap;

use crate::atom::Position;
use crate::error::{Error, Result};
use crate::rule::RuleSet;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeKind {
    Regular,
    Special,
}

/// A directed graph over predicate positions with regular and special edges.
#[derive(Clone, Default, Debug)]
pub struct PositionGraph {
    pub vertices: Vec<Position>,
    index: HashMap<Position, usize>,
    pub edges: Vec<(usize, usize, EdgeKind)>,
    edge_set: std::collections::HashSet<(usize, usize, bool)>,
}

impl PositionGraph {
    pub fn new() -> PositionGraph {
        PositionGraph::default()
    }

    pub fn vertex(&mut self, p: Position) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(p);
        self.index.insert(p, i);
        i
    }

    pub fn lookup(&self, p: Position) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn add_edge(&mut self, from: Position, to: Position, kind: EdgeKind) {
        let f = self.vertex(from);
        let t = self.vertex(to);
        if self
            .edge_set
            .insert((f, t, matches!(kind, EdgeKind::Special)))
        {
            self.edges.push((f, t, kind));
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(f, t, _) in &self.edges {
            adj[f].push(t);
        }
        adj
    }

    /// A cycle (as a position sequence) through some special edge, if any.
    pub fn special_cycle(&self) -> Option<Vec<Position>> {
        let adj = self.adjacency();
        let sccs = scc::tarjan(&adj);
        for &(f, t, kind) in &self.edges {
            if kind != EdgeKind::Special || sccs.comp_of[f] != sccs.comp_of[t] {
                continue;
            }
            // close the cycle: special edge f->t, then back from t to f
            let back = if f == t {
                vec![t]
            } else {
                match scc::path_within(&adj, &sccs.comp_of, t, f) {
                    Some(p) => p,
                    None => continue,
                }
            };
            let mut cycle = vec![self.vertices[f]];
            cycle.extend(back.iter().map(|&v| self.vertices[v]));
            return Some(cycle);
        }
        None
    }

    /// Whether a cycle passes through both positions (edge kinds ignored).
    pub fn cycle_through_both(&self, a: Position, b: Position) -> bool {
        let (Some(ia), Some(ib)) = (self.lookup(a), self.lookup(b)) else {
            return false;
        };
        let adj = self.adjacency();
        let sccs = scc::tarjan(&adj);
        if sccs.comp_of[ia] != sccs.comp_of[ib] {
            return false;
        }
        if ia != ib {
            return true; // same component with two vertices
        }
        sccs.on_cycle(ia, &adj)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .map(|&(f, t, kind)| {
                let style = if kind == EdgeKind::Special {
                    " [style=bold,label=\"*\"]"
                } else {
                    ""
                };
                format!(
                    "  \"{}\" -> \"{}\"{style};",
                    self.vertices[f], self.vertices[t]
                )
            })
            .collect();
        lines.sort();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }
}

/// Outcome of one graph-based notion check.
#[derive(Clone, Debug)]
pub struct NotionOutcome {
    pub acyclic: bool,
    pub witness: Option<GraphWitness>,
}

impl NotionOutcome {
    pub fn acyclic() -> Self {
        NotionOutcome {
            acyclic: true,
            witness: None,
        }
    }

    pub fn rejected(witness: GraphWitness) -> Self {
        NotionOutcome {
            acyclic: false,
            witness: Some(witness),
        }
    }
}

#[derive(Clone, Debug)]
pub enum GraphWitness {
    /// A position cycle through a special edge (weak-acyclicity style).
    PositionCycle(Vec<Position>),
    /// A cycle of existential variables (joint acyclicity).
    VariableCycle(Vec<String>),
    /// A cycle of rules (super-weak acyclicity, rule dependencies).
    RuleCycle(Vec<String>),
    /// The first position expelled from the finite-domain fixpoint.
    RemovedPosition { position: Position, rule: String },
    /// The position whose rank overflowed the argument-ranking bound.
    RankOverflow { position: Position },
}

impl std::fmt::Display for GraphWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphWitness::PositionCycle(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "position cycle {}", s.join(" -> "))
            }
            GraphWitness::VariableCycle(vs) => {
                write!(f, "existential cycle {}", vs.join(" -> "))
            }
            GraphWitness::RuleCycle(rs) => write!(f, "rule cycle {}", rs.join(" -> ")),
            GraphWitness::RemovedPosition { position, rule } => {
                write!(
                    f,
                    "position {position} escapes the finite-domain fixpoint at rule {rule}"
                )
            }
            GraphWitness::RankOverflow { position } => {
                write!(
                    f,
                    "no argument ranking: {position} exceeds the position count"
                )
            }
        }
    }
}

pub(crate) fn require_equality_free(rs: &RuleSet, notion: &str) -> Result<()> {
    if rs.contains_equality() {
        return Err(Error::EqualityNotAllowed(format!(
            "{notion} applies only to equality-free rules (axiomatise or singularise first)"
        )));
    }
    Ok(())
}

pub(crate) fn require_function_free(rs: &RuleSet, notion: &str) -> Result<()> {
    if rs.rules.iter().any(|r| !r.is_function_free()) {
        return Err(Error::FunctionalTerm(format!(
            "{notion} analyses unskolemised rules"
        )));
    }
    Ok(())
}
