//! Joint acyclicity: tracks, per existential variable, the set of positions
//! its values can reach, and rejects cycles between existentials.

use std::collections::{BTreeMap, BTreeSet};

use crate::atom::{Position, Side};
use crate::error::Result;
use crate::rule::RuleSet;
use crate::term::Term;

use super::{require_equality_free, require_function_free, scc, GraphWitness, NotionOutcome};

/// The least set of positions values invented for `y` can move to: its head
/// positions, closed under propagation through any rule whose universal
/// variable reads only from covered positions.
pub fn ja_move(y: Term, rs: &RuleSet) -> BTreeSet<Position> {
    let mut moved: BTreeSet<Position> = rs
        .rules
        .iter()
        .find(|r| r.exist.contains(&y))
        .map(|r| r.positions_of_unchecked(y, Side::Head))
        .unwrap_or_default();
    loop {
        let mut grew = false;
        for rule in &rs.rules {
            for x in rule.frontier.iter().chain(rule.body_only.iter()) {
                let body = rule.positions_of_unchecked(*x, Side::Body);
                if body.is_empty() || !body.iter().all(|p| moved.contains(p)) {
                    continue;
                }
                for p in rule.positions_of_unchecked(*x, Side::Head) {
                    grew |= moved.insert(p);
                }
            }
        }
        if !grew {
            return moved;
        }
    }
}

/// Joint acyclicity of an equality-free rule set.
pub fn ja_check(rs: &RuleSet) -> Result<NotionOutcome> {
    require_function_free(rs, "joint acyclicity")?;
    require_equality_free(rs, "joint acyclicity")?;
    // vertices: existential variables, in rule order
    let mut vars: Vec<(usize, Term)> = Vec::new();
    for (ri, r) in rs.rules.iter().enumerate() {
        for y in &r.exist {
            vars.push((ri, *y));
        }
    }
    let moves: BTreeMap<Term, BTreeSet<Position>> =
        vars.iter().map(|(_, y)| (*y, ja_move(*y, rs))).collect();
    let mut adj = vec![Vec::new(); vars.len()];
    for (i, (_, y1)) in vars.iter().enumerate() {
        for (j, (rj, _)) in vars.iter().enumerate() {
            let rule = &rs.rules[*rj];
            let edge = rule.frontier.iter().any(|x| {
                let heads = rule.positions_of_unchecked(*x, Side::Head);
                if heads.is_empty() {
                    return false;
                }
                let body = rule.positions_of_unchecked(*x, Side::Body);
                body.iter().all(|p| moves[y1].contains(p))
            });
            if edge {
                adj[i].push(j);
            }
        }
    }
    let sccs = scc::tarjan(&adj);
    for (i, _) in vars.iter().enumerate() {
        if sccs.on_cycle(i, &adj) {
            let comp: Vec<String> = sccs.components[sccs.comp_of[i]]
                .iter()
                .map(|&v| vars[v].1.name().as_str().to_owned())
                .collect();
            return Ok(NotionOutcome::rejected(GraphWitness::VariableCycle(comp)));
        }
    }
    Ok(NotionOutcome::acyclic())
}
