//! Weak acyclicity: the position dependency graph with regular edges for
//! frontier-variable propagation and special edges into existential
//! positions. Equality atoms are ignored, so the check applies to rules
//! with equality heads as-is.

use crate::atom::Side;
use crate::error::{Error, Result};
use crate::rule::RuleSet;

use super::{require_function_free, EdgeKind, GraphWitness, NotionOutcome, PositionGraph};

/// Build the weak-acyclicity dependency graph. Positions of the equality
/// predicate are excluded as edge targets; bodies must be equality-free.
pub fn wa_graph(rs: &RuleSet) -> Result<PositionGraph> {
    require_function_free(rs, "weak acyclicity")?;
    if !rs.equality_only_in_heads() {
        return Err(Error::EqualityNotAllowed(
            "weak acyclicity expects body equalities to be eliminated".into(),
        ));
    }
    let mut g = PositionGraph::new();
    // every non-equality position is a vertex, even untouched by edges
    for (pred, arity) in rs.signature()? {
        if pred.is_equality() {
            continue;
        }
        for i in 1..=arity {
            g.vertex(crate::atom::Position::new(pred, i as u32));
        }
    }
    for rule in &rs.rules {
        for x in &rule.frontier {
            let sources = rule.positions_of_unchecked(*x, Side::Body);
            let regular_targets: Vec<_> = rule
                .positions_of_unchecked(*x, Side::Head)
                .into_iter()
                .filter(|p| !p.pred.is_equality())
                .collect();
            let mut special_targets = Vec::new();
            for y in &rule.exist {
                special_targets.extend(
                    rule.positions_of_unchecked(*y, Side::Head)
                        .into_iter()
                        .filter(|p| !p.pred.is_equality()),
                );
            }
            for src in &sources {
                for tgt in &regular_targets {
                    g.add_edge(*src, *tgt, EdgeKind::Regular);
                }
                for tgt in &special_targets {
                    g.add_edge(*src, *tgt, EdgeKind::Special);
                }
            }
        }
    }
    Ok(g)
}

/// A set is weakly acyclic iff its dependency graph has no cycle through a
/// special edge.
pub fn wa_check(rs: &RuleSet) -> Result<NotionOutcome> {
    let g = wa_graph(rs)?;
    Ok(match g.special_cycle() {
        None => NotionOutcome::acyclic(),
        Some(cycle) => NotionOutcome::rejected(GraphWitness::PositionCycle(cycle)),
    })
}
