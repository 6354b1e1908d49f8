//! Super-weak acyclicity over places (atom-occurrence slots), with covering
//! decided by unifiability of skolemised atoms.

use std::collections::BTreeSet;

use crate::atom::{Atom, Place, Side};
use crate::error::Result;
use crate::rule::{Rule, RuleSet};
use crate::symbols::Name;
use crate::term::{Subst, Term};
use crate::unify::unifiable_apart;

use super::{require_equality_free, require_function_free, scc, GraphWitness, NotionOutcome};

/// `cover` covers `targets` iff every target place has a cover place at the
/// same argument index whose atoms unify (variables treated apart).
pub fn covers(cover: &[Place], targets: &[Place]) -> bool {
    targets.iter().all(|t| {
        cover
            .iter()
            .any(|c| c.index == t.index && unifiable_apart(&t.atom, &c.atom))
    })
}

struct SwaContext {
    /// per rule: skolemised head atoms aligned with the rule's head order
    sk_heads: Vec<Vec<Atom>>,
}

impl SwaContext {
    fn new(rs: &RuleSet) -> SwaContext {
        let sk_heads = rs
            .rules
            .iter()
            .enumerate()
            .map(|(ri, r)| {
                let mut subst = Subst::new();
                for (i, y) in r.exist.iter().enumerate() {
                    let sym = Name::new(&format!("__swa_{ri}_{}", i + 1));
                    subst.bind(*y, Term::fun(sym, r.frontier.clone()));
                }
                r.head.iter().map(|a| a.apply(&subst)).collect()
            })
            .collect();
        SwaContext { sk_heads }
    }

    /// Body places of a universal variable.
    fn in_places(&self, ri: usize, rule: &Rule, w: Term) -> Vec<Place> {
        let mut out = Vec::new();
        for (ai, atom) in rule.body.iter().enumerate() {
            for (pi, t) in atom.args.iter().enumerate() {
                if *t == w {
                    out.push(Place {
                        rule: ri,
                        side: Side::Body,
                        atom_idx: ai,
                        atom: atom.clone(),
                        index: (pi + 1) as u32,
                    });
                }
            }
        }
        out
    }

    /// Skolemised head places of any rule variable.
    fn out_places(&self, ri: usize, rule: &Rule, w: Term) -> Vec<Place> {
        let mut out = Vec::new();
        for (ai, atom) in rule.head.iter().enumerate() {
            for (pi, t) in atom.args.iter().enumerate() {
                if *t == w {
                    out.push(Place {
                        rule: ri,
                        side: Side::Head,
                        atom_idx: ai,
                        atom: self.sk_heads[ri][ai].clone(),
                        index: (pi + 1) as u32,
                    });
                }
            }
        }
        out
    }
}

/// The move set of an existential variable: its skolemised output places,
/// closed under rules whose universal variable's input places are covered.
fn swa_move(ctx: &SwaContext, rs: &RuleSet, ri: usize, y: Term) -> Vec<Place> {
    let mut moved: Vec<Place> = ctx.out_places(ri, &rs.rules[ri], y);
    let mut moved_set: BTreeSet<Place> = moved.iter().cloned().collect();
    loop {
        let mut grew = false;
        for (rj, rule) in rs.rules.iter().enumerate() {
            for w in rule.frontier.iter().chain(rule.body_only.iter()) {
                let input = ctx.in_places(rj, rule, *w);
                if input.is_empty() || !covers(&moved, &input) {
                    continue;
                }
                for p in ctx.out_places(rj, rule, *w) {
                    if moved_set.insert(p.clone()) {
                        moved.push(p);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return moved;
        }
    }
}

/// Super-weak acyclicity of an equality-free rule set.
pub fn swa_check(rs: &RuleSet) -> Result<NotionOutcome> {
    require_function_free(rs, "super-weak acyclicity")?;
    require_equality_free(rs, "super-weak acyclicity")?;
    let ctx = SwaContext::new(rs);
    // move sets per existential variable, grouped by owning rule
    let mut moves: Vec<(usize, Vec<Place>)> = Vec::new();
    for (ri, r) in rs.rules.iter().enumerate() {
        for y in &r.exist {
            moves.push((ri, swa_move(&ctx, rs, ri, *y)));
        }
    }
    let n = rs.rules.len();
    let mut adj = vec![Vec::new(); n];
    for (ri, moved) in &moves {
        for (rj, rule) in rs.rules.iter().enumerate() {
            let triggers = rule.frontier.iter().any(|x| {
                let input = ctx.in_places(rj, rule, *x);
                !input.is_empty() && covers(moved, &input)
            });
            if triggers && !adj[*ri].contains(&rj) {
                adj[*ri].push(rj);
            }
        }
    }
    let sccs = scc::tarjan(&adj);
    for v in 0..n {
        if sccs.on_cycle(v, &adj) {
            let comp: Vec<String> = sccs.components[sccs.comp_of[v]]
                .iter()
                .map(|&r| rs.rules[r].id.clone())
                .collect();
            return Ok(NotionOutcome::rejected(GraphWitness::RuleCycle(comp)));
        }
    }
    Ok(NotionOutcome::acyclic())
}
