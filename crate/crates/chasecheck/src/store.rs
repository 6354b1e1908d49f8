//! Indexed sets of ground atoms: the chase's mutable state and the
//! query-answering substrate.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::atom::{Atom, Pred};
use crate::error::{Error, Result};
use crate::rule::conjunction_vars;
use crate::symbols::FreshCounter;
use crate::term::{Subst, Term};

static FREEZE_CONSTS: FreshCounter = FreshCounter::new();

/// A set of ground atoms with a per-predicate list (insertion order, which
/// keeps match enumeration deterministic) and a (predicate, position, term)
/// index for bound-argument lookups.
#[derive(Clone, Default)]
pub struct FactStore {
    set: HashSet<Atom>,
    by_pred: BTreeMap<Pred, Vec<Atom>>,
    index: HashMap<(Pred, u32, Term), Vec<usize>>,
    arities: HashMap<Pred, usize>,
    constants: BTreeSet<Term>,
}

impl FactStore {
    pub fn new() -> FactStore {
        FactStore::default()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.set.contains(atom)
    }

    /// Insert a ground atom; returns false if it was already present.
    pub fn insert(&mut self, atom: Atom) -> Result<bool> {
        if !atom.is_ground() {
            return Err(Error::NonGround(atom.to_string()));
        }
        match self.arities.get(&atom.pred) {
            Some(&n) if n != atom.arity() => {
                return Err(Error::ArityConflict {
                    pred: atom.pred.to_string(),
                    expected: n,
                    found: atom.arity(),
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(atom.pred, atom.arity());
            }
        }
        if !self.set.insert(atom.clone()) {
            return Ok(false);
        }
        for t in &atom.args {
            let mut cs = Vec::new();
            t.collect_consts(&mut cs);
            self.constants.extend(cs);
        }
        let list = self.by_pred.entry(atom.pred).or_default();
        let idx = list.len();
        for (i, t) in atom.args.iter().enumerate() {
            self.index
                .entry((atom.pred, (i + 1) as u32, *t))
                .or_default()
                .push(idx);
        }
        list.push(atom);
        Ok(true)
    }

    pub fn extend(&mut self, atoms: impl IntoIterator<Item = Atom>) -> Result<usize> {
        let mut added = 0;
        for a in atoms {
            if self.insert(a)? {
                added += 1;
            }
        }
        Ok(added)
    }

    /// Facts of one predicate in insertion order.
    pub fn facts_of(&self, pred: Pred) -> &[Atom] {
        self.by_pred.get(&pred).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Facts of `pred` whose argument at 1-based `position` equals `term`.
    pub fn facts_at(&self, pred: Pred, position: u32, term: Term) -> Vec<&Atom> {
        match self.index.get(&(pred, position, term)) {
            None => Vec::new(),
            Some(rows) => {
                let list = &self.by_pred[&pred];
                rows.iter().map(|&i| &list[i]).collect()
            }
        }
    }

    /// Deterministic iteration: predicate id order, then insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.by_pred.values().flatten()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (Pred, usize)> + '_ {
        self.by_pred
            .iter()
            .map(|(p, v)| (*p, self.arities.get(p).copied().unwrap_or(v.len())))
    }

    pub fn constants(&self) -> &BTreeSet<Term> {
        &self.constants
    }

    /// Every term contained in some fact (direct arguments).
    pub fn contained_terms(&self) -> BTreeSet<Term> {
        self.iter().flat_map(|a| a.args.iter().copied()).collect()
    }

    /// Maximum term depth over the whole store.
    pub fn max_depth(&self) -> u32 {
        self.iter().map(|a| a.max_depth()).max().unwrap_or(0)
    }

    pub fn arity_of(&self, pred: Pred) -> Option<usize> {
        self.arities.get(&pred).copied()
    }

    /// Render sorted by display string, so output is stable across runs.
    pub fn sorted_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.iter().map(|a| a.to_string()).collect();
        out.sort();
        out
    }
}

impl std::fmt::Display for FactStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for line in self.sorted_strings() {
            writeln!(f, "{line} .")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for FactStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FactStore({} facts)", self.len())
    }
}

impl FromIterator<Atom> for FactStore {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        let mut s = FactStore::new();
        for a in iter {
            s.insert(a).expect("ground, arity-consistent atoms");
        }
        s
    }
}

/// Replace each variable of a function-free conjunction by a fresh distinct
/// constant; the canonical-witness construction used by the rule-dependency
/// and query oracles.
pub fn freeze(conjunction: &[Atom]) -> Result<FactStore> {
    for a in conjunction {
        if !a.is_function_free() {
            return Err(Error::FunctionalTerm(a.to_string()));
        }
    }
    let mut subst = Subst::new();
    for v in conjunction_vars(conjunction) {
        subst.bind(v, Term::constant_name(FREEZE_CONSTS.fresh("k")));
    }
    let mut store = FactStore::new();
    for a in conjunction {
        store.insert(a.apply(&subst))?;
    }
    Ok(store)
}
