//! Shared helpers for the integration suites: seeded random rule sets,
//! instances, and queries with controllable shape.

#![allow(dead_code)]

use chasecheck::atom::{Atom, Pred};
use chasecheck::rule::{Provenance, Rule, RuleSet};
use chasecheck::store::FactStore;
use chasecheck::term::Term;
use chasecheck::text::Cq;
use rand::rngs::StdRng;
use rand::Rng;

#[derive(Clone)]
pub struct GenCfg {
    pub max_rules: usize,
    pub max_body_atoms: usize,
    pub max_head_atoms: usize,
    pub max_arity: usize,
    pub n_preds: usize,
    pub n_vars: usize,
    /// chance that a rule gets an existential variable
    pub exist_prob: f64,
    /// chance that a rule's head is a single equality atom
    pub eq_head_prob: f64,
    /// chance of a constant argument
    pub const_prob: f64,
}

impl GenCfg {
    /// Equality-free sets within the usual property-test bounds.
    pub fn lattice() -> GenCfg {
        GenCfg {
            max_rules: 5,
            max_body_atoms: 3,
            max_head_atoms: 2,
            max_arity: 3,
            n_preds: 4,
            n_vars: 4,
            exist_prob: 0.5,
            eq_head_prob: 0.0,
            const_prob: 0.1,
        }
    }

    /// Sets with equality heads for the singularisation properties.
    pub fn with_equality() -> GenCfg {
        GenCfg {
            max_rules: 4,
            max_body_atoms: 3,
            max_head_atoms: 2,
            max_arity: 3,
            n_preds: 4,
            n_vars: 4,
            exist_prob: 0.45,
            eq_head_prob: 0.4,
            const_prob: 0.1,
        }
    }

    /// Small rules for the dependency oracle.
    pub fn pairs() -> GenCfg {
        GenCfg {
            max_rules: 2,
            max_body_atoms: 3,
            max_head_atoms: 2,
            max_arity: 2,
            n_preds: 3,
            n_vars: 3,
            exist_prob: 0.5,
            eq_head_prob: 0.0,
            const_prob: 0.15,
        }
    }

    /// Tiny satisfiable inputs for the query oracle.
    pub fn queries() -> GenCfg {
        GenCfg {
            max_rules: 3,
            max_body_atoms: 2,
            max_head_atoms: 2,
            max_arity: 2,
            n_preds: 3,
            n_vars: 3,
            exist_prob: 0.4,
            eq_head_prob: 0.2,
            const_prob: 0.2,
        }
    }
}

fn pred(i: usize) -> Pred {
    Pred::new(&format!("P{i}"))
}

fn var(rule: usize, i: usize) -> Term {
    Term::var(&format!("v{rule}_{i}"))
}

fn constant(i: usize) -> Term {
    Term::constant(&format!("c{i}"))
}

/// A random rule set over a fixed signature. Rules are always safe, and
/// variable names are apart by construction.
pub fn random_rule_set(rng: &mut StdRng, cfg: &GenCfg) -> RuleSet {
    let arities: Vec<usize> = (0..cfg.n_preds)
        .map(|_| rng.random_range(1..=cfg.max_arity))
        .collect();
    let n_rules = rng.random_range(1..=cfg.max_rules);
    let mut rules = Vec::new();
    for ri in 0..n_rules {
        let n_body = rng.random_range(1..=cfg.max_body_atoms);
        let vars: Vec<Term> = (0..cfg.n_vars).map(|i| var(ri, i)).collect();
        let mut body = Vec::new();
        for _ in 0..n_body {
            let p = rng.random_range(0..cfg.n_preds);
            let args: Vec<Term> = (0..arities[p])
                .map(|_| {
                    if rng.random_bool(cfg.const_prob) {
                        constant(rng.random_range(0..2))
                    } else {
                        vars[rng.random_range(0..cfg.n_vars)]
                    }
                })
                .collect();
            body.push(Atom::new(pred(p), args));
        }
        let body_vars: Vec<Term> = {
            let mut out = Vec::new();
            for a in &body {
                for v in a.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            out
        };
        if body_vars.is_empty() {
            // keep at least one variable so heads stay interesting
            body.push(Atom::new(pred(0), {
                let mut args = vec![vars[0]];
                args.extend((1..arities[0]).map(|_| vars[0]));
                args
            }));
        }
        let body_vars: Vec<Term> = {
            let mut out = Vec::new();
            for a in &body {
                for v in a.vars() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            out
        };

        if cfg.eq_head_prob > 0.0 && rng.random_bool(cfg.eq_head_prob) {
            let lhs = body_vars[rng.random_range(0..body_vars.len())];
            let rhs = if rng.random_bool(0.2) {
                constant(rng.random_range(0..2))
            } else {
                body_vars[rng.random_range(0..body_vars.len())]
            };
            rules.push(
                Rule::new(
                    format!("g{}", ri + 1),
                    body,
                    vec![Atom::equality(lhs, rhs)],
                    vec![],
                    Provenance::User,
                )
                .expect("generated rule is well formed"),
            );
            continue;
        }

        let n_exist = if rng.random_bool(cfg.exist_prob) {
            rng.random_range(1..=2)
        } else {
            0
        };
        let exist: Vec<Term> = (0..n_exist).map(|i| var(ri, cfg.n_vars + i)).collect();
        let n_head = rng.random_range(1..=cfg.max_head_atoms);
        let mut head = Vec::new();
        for h in 0..n_head {
            let p = rng.random_range(0..cfg.n_preds);
            let args: Vec<Term> = (0..arities[p])
                .map(|_| {
                    let roll = rng.random_range(0..10);
                    if !exist.is_empty() && (roll < 4 || h == 0 && roll < 6) {
                        exist[rng.random_range(0..exist.len())]
                    } else if roll < 1 {
                        constant(rng.random_range(0..2))
                    } else {
                        body_vars[rng.random_range(0..body_vars.len())]
                    }
                })
                .collect();
            head.push(Atom::new(pred(p), args));
        }
        if cfg.eq_head_prob > 0.0 && rng.random_bool(cfg.eq_head_prob / 2.0) {
            // mixed head: an equality atom alongside ordinary ones, which
            // may promote a body-only variable into the frontier
            let lhs = body_vars[rng.random_range(0..body_vars.len())];
            let rhs = body_vars[rng.random_range(0..body_vars.len())];
            head.push(Atom::equality(lhs, rhs));
        }
        rules.push(
            Rule::new(format!("g{}", ri + 1), body, head, exist, Provenance::User)
                .expect("generated rule is well formed"),
        );
    }
    RuleSet::new(rules).standardize_apart()
}

/// A random small instance over the same signature family.
pub fn random_instance(rng: &mut StdRng, rs: &RuleSet, max_facts: usize) -> FactStore {
    let sig: Vec<(Pred, usize)> = rs
        .signature()
        .expect("generated signature is consistent")
        .into_iter()
        .filter(|(p, _)| !p.is_equality() && !p.is_top() && !p.is_bot())
        .collect();
    let mut store = FactStore::new();
    if sig.is_empty() {
        return store;
    }
    for _ in 0..rng.random_range(1..=max_facts) {
        let (p, arity) = sig[rng.random_range(0..sig.len())];
        let args: Vec<Term> = (0..arity)
            .map(|_| constant(rng.random_range(0..3)))
            .collect();
        store.insert(Atom::new(p, args)).expect("ground fact");
    }
    store
}

/// A random conjunctive query over the rule set's signature.
pub fn random_query(rng: &mut StdRng, rs: &RuleSet, max_atoms: usize) -> Cq {
    let sig: Vec<(Pred, usize)> = rs
        .signature()
        .expect("generated signature is consistent")
        .into_iter()
        .filter(|(p, _)| !p.is_equality() && !p.is_top() && !p.is_bot())
        .collect();
    let vars: Vec<Term> = (0..3).map(|i| Term::var(&format!("q{i}"))).collect();
    let mut atoms = Vec::new();
    for _ in 0..rng.random_range(1..=max_atoms) {
        if sig.is_empty() {
            break;
        }
        let (p, arity) = sig[rng.random_range(0..sig.len())];
        let args: Vec<Term> = (0..arity)
            .map(|_| {
                if rng.random_bool(0.25) {
                    constant(rng.random_range(0..3))
                } else {
                    vars[rng.random_range(0..vars.len())]
                }
            })
            .collect();
        atoms.push(Atom::new(p, args));
    }
    if atoms.is_empty() {
        atoms.push(Atom::new(Pred::new("P0"), vec![vars[0]]));
    }
    let mut seen = Vec::new();
    for a in &atoms {
        for v in a.vars() {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    // half the variables are answer variables, the rest existential
    let split = seen.len().div_ceil(2);
    Cq {
        answer_vars: seen[..split].to_vec(),
        exist_vars: seen[split..].to_vec(),
        atoms,
    }
}
