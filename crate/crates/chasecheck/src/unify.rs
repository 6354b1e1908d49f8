//! First-order unification with occurs check, over interned terms.

use crate::atom::Atom;
use crate::term::{Subst, Term, TermKind};

fn resolve(t: Term, subst: &Subst) -> Term {
    let mut cur = t;
    while cur.is_var() {
        match subst.get(cur) {
            Some(next) if next != cur => cur = next,
            _ => break,
        }
    }
    cur
}

fn occurs(var: Term, t: Term, subst: &Subst) -> bool {
    let t = resolve(t, subst);
    if t == var {
        return true;
    }
    match t.kind() {
        TermKind::Fun(_, args) => args.iter().any(|a| occurs(var, *a, subst)),
        _ => false,
    }
}

/// Extend `subst` to a most general unifier of `t1` and `t2`; on failure
/// `subst` may hold partial bindings, so callers pass a scratch copy.
pub fn unify_terms(t1: Term, t2: Term, subst: &mut Subst) -> bool {
    let a = resolve(t1, subst);
    let b = resolve(t2, subst);
    if a == b {
        return true;
    }
    match (a.kind(), b.kind()) {
        (TermKind::Var(_), _) => {
            if occurs(a, b, subst) {
                false
            } else {
                subst.bind(a, b);
                true
            }
        }
        (_, TermKind::Var(_)) => {
            if occurs(b, a, subst) {
                false
            } else {
                subst.bind(b, a);
                true
            }
        }
        (TermKind::Fun(f, fa), TermKind::Fun(g, ga)) if f == g && fa.len() == ga.len() => fa
            .iter()
            .zip(ga.iter())
            .all(|(x, y)| unify_terms(*x, *y, subst)),
        _ => false,
    }
}

/// Unify two atoms argument-wise.
pub fn unify_atoms(a1: &Atom, a2: &Atom, subst: &mut Subst) -> bool {
    a1.pred == a2.pred
        && a1.args.len() == a2.args.len()
        && a1
            .args
            .iter()
            .zip(a2.args.iter())
            .all(|(x, y)| unify_terms(*x, *y, subst))
}

/// Whether two atoms are unifiable when their variables are considered
/// disjoint: the second atom is renamed apart first.
pub fn unifiable_apart(a1: &Atom, a2: &Atom) -> bool {
    let mut rename = Subst::new();
    for (k, v) in a2.vars().into_iter().enumerate() {
        rename.bind(v, Term::var(&format!("__ua{k}")));
    }
    let renamed = a2.apply(&rename);
    let mut subst = Subst::new();
    unify_atoms(a1, &renamed, &mut subst)
}
