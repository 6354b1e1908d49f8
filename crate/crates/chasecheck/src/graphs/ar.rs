//! Argument rankings: positions get nonnegative ranks such that copied
//! values never gain rank and invented values strictly exceed some body
//! rank of every frontier variable. The least ranking is computed by
//! fixpoint iteration, with divergence detected against the position count.

use std::collections::BTreeMap;

use crate::atom::{Position, Side};
use crate::error::Result;
use crate::rule::{Rule, RuleSet};

use super::{require_equality_free, require_function_free, GraphWitness, NotionOutcome};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ArgumentRanking {
    pub ranks: BTreeMap<Position, u32>,
}

impl ArgumentRanking {
    pub fn rank(&self, pos: Position) -> u32 {
        self.ranks.get(&pos).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for ArgumentRanking {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.ranks.iter().map(|(p, r)| format!("{p}:{r}")).collect();
        parts.sort();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The universal variables condition 2 ranges over: the frontier by
/// default, every body variable in the strict reading.
fn condition2_vars(rule: &Rule, strict: bool) -> Vec<crate::term::Term> {
    if strict {
        rule.frontier
            .iter()
            .chain(rule.body_only.iter())
            .copied()
            .collect()
    } else {
        rule.frontier.clone()
    }
}

fn min_body_rank(rule: &Rule, x: crate::term::Term, ranking: &ArgumentRanking) -> Option<u32> {
    rule.positions_of_unchecked(x, Side::Body)
        .into_iter()
        .map(|q| ranking.rank(q))
        .min()
}

/// The pointwise-least argument ranking, or `None` if some rank would have
/// to exceed the number of positions (no ranking exists).
pub fn ar_ranking(
    rs: &RuleSet,
    strict: bool,
) -> Result<std::result::Result<ArgumentRanking, Position>> {
    require_function_free(rs, "argument ranking")?;
    require_equality_free(rs, "argument ranking")?;
    let mut ranking = ArgumentRanking::default();
    for (pred, arity) in rs.signature()? {
        if pred.is_equality() {
            continue;
        }
        for i in 1..=arity {
            ranking.ranks.insert(Position::new(pred, i as u32), 0);
        }
    }
    let position_count = ranking.ranks.len() as u32;
    loop {
        let mut changed = false;
        for rule in &rs.rules {
            for x in &rule.frontier {
                let Some(m) = min_body_rank(rule, *x, &ranking) else {
                    continue;
                };
                for p in rule.positions_of_unchecked(*x, Side::Head) {
                    if ranking.rank(p) < m {
                        ranking.ranks.insert(p, m);
                        changed = true;
                    }
                }
            }
            for y in &rule.exist {
                for x in condition2_vars(rule, strict) {
                    let Some(m) = min_body_rank(rule, x, &ranking) else {
                        continue;
                    };
                    for p in rule.positions_of_unchecked(*y, Side::Head) {
                        if ranking.rank(p) < m + 1 {
                            ranking.ranks.insert(p, m + 1);
                            changed = true;
                        }
                    }
                }
            }
        }
        if let Some((p, _)) = ranking.ranks.iter().find(|(_, &r)| r > position_count) {
            return Ok(Err(*p));
        }
        if !changed {
            return Ok(Ok(ranking));
        }
    }
}

/// Independent re-verification of the two ranking conditions; used after
/// every computation.
pub fn verify_ranking(rs: &RuleSet, ranking: &ArgumentRanking, strict: bool) -> bool {
    for rule in &rs.rules {
        for x in &rule.frontier {
            for p in rule.positions_of_unchecked(*x, Side::Head) {
                let ok = rule
                    .positions_of_unchecked(*x, Side::Body)
                    .into_iter()
                    .any(|q| ranking.rank(p) >= ranking.rank(q));
                if !ok {
                    return false;
                }
            }
        }
        for y in &rule.exist {
            for p in rule.positions_of_unchecked(*y, Side::Head) {
                for x in condition2_vars(rule, strict) {
                    let ok = rule
                        .positions_of_unchecked(x, Side::Body)
                        .into_iter()
                        .any(|q| ranking.rank(p) > ranking.rank(q));
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Argument-restrictedness: a ranking exists.
pub fn ar_check(rs: &RuleSet, strict: bool) -> Result<(NotionOutcome, Option<ArgumentRanking>)> {
    match ar_ranking(rs, strict)? {
        Ok(ranking) => {
            debug_assert!(verify_ranking(rs, &ranking, strict));
            Ok((NotionOutcome::acyclic(), Some(ranking)))
        }
        Err(position) => Ok((
            NotionOutcome::rejected(GraphWitness::RankOverflow { position }),
            None,
        )),
    }
}
