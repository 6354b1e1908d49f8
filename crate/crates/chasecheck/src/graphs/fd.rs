//! The finite-domain notion: the greatest set of positions that can only
//! ever hold finitely many terms during the chase.

use std::collections::BTreeSet;

use crate::atom::{Position, Side};
use crate::error::Result;
use crate::rule::{Rule, RuleSet};

use super::{scc, wa::wa_graph, GraphWitness, NotionOutcome, PositionGraph};

pub(crate) struct Recursion {
    graph: PositionGraph,
    sccs: scc::Sccs,
    adj: Vec<Vec<usize>>,
}

impl Recursion {
    pub(crate) fn new(rs: &RuleSet) -> Result<Recursion> {
        let graph = wa_graph(rs)?;
        let adj = graph.adjacency();
        let sccs = scc::tarjan(&adj);
        Ok(Recursion { graph, sccs, adj })
    }

    /// Whether the dependency graph (edge kinds ignored) has a cycle through
    /// both positions: same component, and when they coincide the component
    /// must be nontrivial or carry a self-loop.
    pub(crate) fn recursive(&self, a: Position, b: Position) -> bool {
        let (Some(ia), Some(ib)) = (self.graph.lookup(a), self.graph.lookup(b)) else {
            return false;
        };
        if self.sccs.comp_of[ia] != self.sccs.comp_of[ib] {
            return false;
        }
        if ia != ib {
            return true;
        }
        self.sccs.on_cycle(ia, &self.adj)
    }
}

fn all_positions(rs: &RuleSet) -> Result<BTreeSet<Position>> {
    let mut out = BTreeSet::new();
    for (pred, arity) in rs.signature()? {
        if pred.is_equality() {
            continue;
        }
        for i in 1..=arity {
            out.insert(Position::new(pred, i as u32));
        }
    }
    Ok(out)
}

fn violates(rule: &Rule, pos: Position, pos_fd: &BTreeSet<Position>, rec: &Recursion) -> bool {
    for atom in &rule.head {
        if atom.pred != pos.pred {
            continue;
        }
        let t = atom.args[(pos.index - 1) as usize];
        if !t.is_var() {
            continue;
        }
        if rule.exist.contains(&t) {
            // an invented value lands here: every frontier variable must be
            // bounded by some finite, non-recursive body position
            for x in &rule.frontier {
                let ok = rule
                    .positions_of_unchecked(*x, Side::Body)
                    .into_iter()
                    .any(|q| pos_fd.contains(&q) && !rec.recursive(q, pos));
                if !ok {
                    return true;
                }
            }
        } else {
            // a copied value: its source must include a finite position
            let ok = rule
                .positions_of_unchecked(t, Side::Body)
                .into_iter()
                .any(|q| pos_fd.contains(&q));
            if !ok {
                return true;
            }
        }
    }
    false
}

/// The greatest fixpoint of the finite-domain conditions: start from all
/// positions and delete violators until stable.
pub fn fd_positions(rs: &RuleSet) -> Result<BTreeSet<Position>> {
    Ok(fd_fixpoint(rs)?.0)
}

type FdFixpoint = (BTreeSet<Position>, Option<(Position, String)>);

fn fd_fixpoint(rs: &RuleSet) -> Result<FdFixpoint> {
    super::require_function_free(rs, "finite domain")?;
    super::require_equality_free(rs, "finite domain")?;
    let rec = Recursion::new(rs)?;
    let mut pos_fd = all_positions(rs)?;
    let mut first_removed = None;
    loop {
        let mut removed = None;
        'scan: for pos in &pos_fd {
            for rule in &rs.rules {
                if violates(rule, *pos, &pos_fd, &rec) {
                    removed = Some((*pos, rule.id.clone()));
                    break 'scan;
                }
            }
        }
        match removed {
            Some((pos, rule)) => {
                pos_fd.remove(&pos);
                if first_removed.is_none() {
                    first_removed = Some((pos, rule));
                }
            }
            None => return Ok((pos_fd, first_removed)),
        }
    }
}

/// Finite-domain check: every position must survive the fixpoint.
pub fn fd_check(rs: &RuleSet) -> Result<NotionOutcome> {
    let (_, removed) = fd_fixpoint(rs)?;
    Ok(match removed {
        None => NotionOutcome::acyclic(),
        Some((position, rule)) => {
            NotionOutcome::rejected(GraphWitness::RemovedPosition { position, rule })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_rules;

    #[test]
    fn guarded_existential_is_fd() {
        // S|2 is not recursive with A|1, which bounds x
        let rs = parse_rules(
            "R(?z,?x), A(?x) -> exists ?y . S(?x,?y) .\n\
             S(?x1,?x2) -> R(?x1,?x2) .",
            "t",
        )
        .unwrap();
        assert!(fd_check(&rs).unwrap().acyclic);
    }

    #[test]
    fn feedback_through_filter_is_not_fd() {
        let rs = parse_rules(
            "A(?x) -> exists ?y . R(?x,?y) .\n\
             R(?x1,?x2) -> S(?x1,?x2) .\n\
             S(?z,?x) , B(?x) -> A(?x) .",
            "t",
        )
        .unwrap();
        let out = fd_check(&rs).unwrap();
        assert!(!out.acyclic);
        match out.witness {
            Some(GraphWitness::RemovedPosition { position, .. }) => {
                assert_eq!(position.to_string(), "R|2");
            }
            other => panic!("unexpected witness {other:?}"),
        }
        let fd = fd_positions(&rs).unwrap();
        let mut names: Vec<String> = fd.iter().map(|p| p.to_string()).collect();
        names.sort();
        assert_eq!(names, vec!["A|1", "B|1", "R|1", "S|1"]);
    }

    #[test]
    fn six_rule_example_cascades_fully() {
        let rs = parse_rules(
            "A(?x) -> exists ?y . R(?x,?y) .\n\
             R(?x1,?x2) -> S(?x1,?x2) .\n\
             S(?z,?x3), B(?x3) -> A(?x3) .\n\
             R(?z4,?x4) -> T(?x4,?x4) .\n\
             T(?x5,?z5) -> R(?x5,?x5) .\n\
             T(?z6,?x6), R(?z7,?x6) -> exists ?y6 . T(?x6,?y6) .",
            "t",
        )
        .unwrap();
        // R|2 escapes via the recursion condition, which drags down T|1,
        // T|2, R|1, and then both S positions through their copy sources.
        let fd = fd_positions(&rs).unwrap();
        let mut names: Vec<String> = fd.iter().map(|p| p.to_string()).collect();
        names.sort();
        assert_eq!(names, vec!["A|1", "B|1"]);
        assert!(!fd_check(&rs).unwrap().acyclic);
    }
}
