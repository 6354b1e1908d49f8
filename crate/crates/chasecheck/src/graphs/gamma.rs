//! Safe-position acyclicity: finite-domain positions are extended with
//! positions whose producing rules sit on no dependency cycle or read only
//! from safe positions; the weak-acyclicity test then runs on the
//! propagation graph over the remaining (affected) positions.

use std::collections::BTreeSet;

use crate::atom::{Position, Side};
use crate::deps;
use crate::error::Result;
use crate::rule::RuleSet;
use crate::symbols::Name;
use crate::term::{Subst, Term};

use super::{fd, wa, GraphWitness, NotionOutcome, PositionGraph};

fn skolemised_heads(rs: &RuleSet) -> Vec<Vec<crate::atom::Atom>> {
    rs.rules
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            let mut subst = Subst::new();
            for (i, y) in r.exist.iter().enumerate() {
                let sym = Name::new(&format!("__ga_{ri}_{}", i + 1));
                subst.bind(*y, Term::fun(sym, r.frontier.clone()));
            }
            r.head.iter().map(|a| a.apply(&subst)).collect()
        })
        .collect()
}

pub fn gamma_check(rs: &RuleSet) -> Result<NotionOutcome> {
    super::require_function_free(rs, "safe-position acyclicity")?;
    super::require_equality_free(rs, "safe-position acyclicity")?;
    let pos_fd = fd::fd_positions(rs)?;
    let on_cycle = deps::rules_on_cycles(rs, true);
    let sk_heads = skolemised_heads(rs);

    let mut all_positions: BTreeSet<Position> = BTreeSet::new();
    for (pred, arity) in rs.signature()? {
        for i in 1..=arity {
            all_positions.insert(Position::new(pred, i as u32));
        }
    }

    // least fixpoint of safe positions above the finite-domain ones
    let mut safe = pos_fd.clone();
    loop {
        let mut grew = false;
        'candidates: for pos in &all_positions {
            if safe.contains(pos) {
                continue;
            }
            for (ri, rule) in rs.rules.iter().enumerate() {
                let produces = rule.head.iter().any(|a| a.pred == pos.pred);
                if !produces {
                    continue;
                }
                if !on_cycle.contains(&ri) {
                    continue; // this producer is harmless
                }
                // every variable inside the skolemised argument must read
                // from at least one safe position
                for atom in &sk_heads[ri] {
                    if atom.pred != pos.pred {
                        continue;
                    }
                    let arg = atom.args[(pos.index - 1) as usize];
                    let mut vars = Vec::new();
                    arg.collect_vars(&mut vars);
                    for x in vars {
                        let ok = rule
                            .positions_of_unchecked(x, Side::Body)
                            .into_iter()
                            .any(|q| safe.contains(&q));
                        if !ok {
                            continue 'candidates;
                        }
                    }
                }
            }
            safe.insert(*pos);
            grew = true;
        }
        if !grew {
            break;
        }
    }

    // propagation graph: weak-acyclicity edges restricted to affected ends
    let full = wa::wa_graph(rs)?;
    let mut pg = PositionGraph::new();
    for p in &all_positions {
        if !safe.contains(p) {
            pg.vertex(*p);
        }
    }
    for &(f, t, kind) in &full.edges {
        let from = full.vertices[f];
        let to = full.vertices[t];
        if !safe.contains(&from) && !safe.contains(&to) {
            pg.add_edge(from, to, kind);
        }
    }
    Ok(match pg.special_cycle() {
        None => NotionOutcome::acyclic(),
        Some(cycle) => NotionOutcome::rejected(GraphWitness::PositionCycle(cycle)),
    })
}
