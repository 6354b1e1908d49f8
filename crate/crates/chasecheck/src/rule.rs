//! Rules, rule sets, and markings.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::atom::{Atom, Position, Pred, Side};
use crate::error::{Error, Result};
use crate::symbols::Name;
use crate::term::{Subst, Term};

/// Where a rule came from. Transforms tag everything they add so that
/// analyses can tell user content from generated scaffolding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    User,
    TopAxiom,
    EqualityAxiom,
    Singularisation,
    MfaAux,
    MsaAux,
    Normalisation,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    /// Existentially quantified head variables, in declaration order.
    pub exist: Vec<Term>,
    /// Variables occurring in both body and head.
    pub frontier: Vec<Term>,
    /// Variables occurring only in the body.
    pub body_only: Vec<Term>,
    /// Head variables that are neither existential nor bound by the body.
    /// Nonempty means the rule is unsafe until top-augmentation repairs it.
    pub unbound_head: Vec<Term>,
    pub provenance: Provenance,
}

fn dedup_atoms(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut seen = HashSet::new();
    atoms
        .into_iter()
        .filter(|a| seen.insert(a.clone()))
        .collect()
}

fn vars_of(atoms: &[Atom]) -> Vec<Term> {
    let mut out = Vec::new();
    for a in atoms {
        for t in &a.args {
            t.collect_vars(&mut out);
        }
    }
    out
}

impl Rule {
    /// Build a rule, computing the variable partition. `exist` lists the
    /// declared existential variables; ones that never occur in the head are
    /// dropped, ones that occur in the body are rejected.
    pub fn new(
        id: impl Into<String>,
        body: Vec<Atom>,
        head: Vec<Atom>,
        exist: Vec<Term>,
        provenance: Provenance,
    ) -> Result<Rule> {
        let body = dedup_atoms(body);
        let head = dedup_atoms(head);
        if head.is_empty() {
            return Err(Error::Internal("rule with empty head".into()));
        }
        let body_vars = vars_of(&body);
        let head_vars = vars_of(&head);
        let mut exist_kept = Vec::new();
        for y in exist {
            if body_vars.contains(&y) {
                return Err(Error::Internal(format!(
                    "existential variable {y} occurs in the body"
                )));
            }
            if head_vars.contains(&y) && !exist_kept.contains(&y) {
                exist_kept.push(y);
            }
        }
        let frontier: Vec<Term> = body_vars
            .iter()
            .copied()
            .filter(|v| head_vars.contains(v))
            .collect();
        let body_only: Vec<Term> = body_vars
            .iter()
            .copied()
            .filter(|v| !head_vars.contains(v))
            .collect();
        let unbound_head: Vec<Term> = head_vars
            .iter()
            .copied()
            .filter(|v| !body_vars.contains(v) && !exist_kept.contains(v))
            .collect();
        Ok(Rule {
            id: id.into(),
            body,
            head,
            exist: exist_kept,
            frontier,
            body_only,
            unbound_head,
            provenance,
        })
    }

    pub fn is_safe(&self) -> bool {
        self.unbound_head.is_empty()
    }

    pub fn is_datalog(&self) -> bool {
        self.exist.is_empty() && self.head.iter().all(|a| a.is_function_free())
    }

    /// True once skolemisation (or the summary transform) has run.
    pub fn has_functional_head(&self) -> bool {
        self.head.iter().any(|a| !a.is_function_free())
    }

    pub fn is_function_free(&self) -> bool {
        self.body.iter().all(|a| a.is_function_free())
            && self.head.iter().all(|a| a.is_function_free())
    }

    pub fn all_vars(&self) -> Vec<Term> {
        let mut out = vars_of(&self.body);
        for v in vars_of(&self.head) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn contains_equality(&self) -> bool {
        self.body
            .iter()
            .chain(self.head.iter())
            .any(|a| a.pred.is_equality())
    }

    pub fn atoms(&self, side: Side) -> &[Atom] {
        match side {
            Side::Body => &self.body,
            Side::Head => &self.head,
        }
    }

    /// The positions at which `var` occurs as a direct argument on `side`.
    pub fn positions_of(&self, var: Term, side: Side) -> Result<BTreeSet<Position>> {
        if !self.all_vars().contains(&var) {
            return Err(Error::UnknownVariable(var.name().as_str().to_owned()));
        }
        Ok(self.positions_of_unchecked(var, side))
    }

    pub fn positions_of_unchecked(&self, var: Term, side: Side) -> BTreeSet<Position> {
        let mut out = BTreeSet::new();
        for atom in self.atoms(side) {
            for (i, t) in atom.args.iter().enumerate() {
                if *t == var {
                    out.insert(Position::new(atom.pred, (i + 1) as u32));
                }
            }
        }
        out
    }

    /// Apply a substitution to every atom, recomputing the partition.
    pub fn substitute(&self, subst: &Subst) -> Result<Rule> {
        let body = self.body.iter().map(|a| a.apply(subst)).collect();
        let head = self.head.iter().map(|a| a.apply(subst)).collect();
        let exist = self.exist.iter().map(|v| subst.apply(*v)).collect();
        Rule::new(self.id.clone(), body, head, exist, self.provenance)
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " -> ")?;
        if !self.exist.is_empty() {
            write!(f, "exists ")?;
            for (i, y) in self.exist.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{y}")?;
            }
            write!(f, " . ")?;
        }
        for (i, a) in self.head.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " .")
    }
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.id, self)
    }
}

/// An ordered set of rules plus the seed facts that empty-body constructions
/// (such as constant-equality elimination) inject into every chase start.
#[derive(Clone, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub seeds: Vec<Atom>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> RuleSet {
        RuleSet {
            rules,
            seeds: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Predicates with their arities, over rules and seeds. Fails on a
    /// symbol used with two different arities.
    pub fn signature(&self) -> Result<BTreeMap<Pred, usize>> {
        let mut sig: BTreeMap<Pred, usize> = BTreeMap::new();
        let mut record = |atom: &Atom| -> Result<()> {
            match sig.get(&atom.pred) {
                Some(&n) if n != atom.arity() => Err(Error::ArityConflict {
                    pred: atom.pred.to_string(),
                    expected: n,
                    found: atom.arity(),
                }),
                Some(_) => Ok(()),
                None => {
                    sig.insert(atom.pred, atom.arity());
                    Ok(())
                }
            }
        };
        for r in &self.rules {
            for a in r.body.iter().chain(r.head.iter()) {
                record(a)?;
            }
        }
        for a in &self.seeds {
            record(a)?;
        }
        Ok(sig)
    }

    /// Constants occurring in rule bodies, optionally restricted to
    /// user-provenance rules.
    pub fn body_constants(&self, user_only: bool) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            if user_only && r.provenance != Provenance::User {
                continue;
            }
            for a in &r.body {
                let mut cs = Vec::new();
                for t in &a.args {
                    t.collect_consts(&mut cs);
                }
                out.extend(cs);
            }
        }
        out
    }

    /// Function symbols occurring anywhere (nonempty only after skolemisation).
    pub fn fn_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            for a in r.body.iter().chain(r.head.iter()) {
                for t in &a.args {
                    out.extend(t.fn_symbols());
                }
            }
        }
        out
    }

    pub fn contains_equality(&self) -> bool {
        self.rules.iter().any(|r| r.contains_equality())
    }

    pub fn equality_only_in_heads(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.body.iter().all(|a| !a.pred.is_equality()))
    }

    /// Rules with at least one existential variable.
    pub fn generating_rule_count(&self) -> usize {
        self.rules.iter().filter(|r| !r.exist.is_empty()).count()
    }

    /// Rename variables so that no name occurs in two rules. Atoms are
    /// otherwise unchanged.
    pub fn standardize_apart(&self) -> RuleSet {
        let all_names: HashSet<String> = self
            .rules
            .iter()
            .flat_map(|r| r.all_vars())
            .map(|v| v.name().as_str().to_owned())
            .collect();
        let mut used: HashSet<String> = HashSet::new();
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut subst = Subst::new();
            for v in r.all_vars() {
                let base = v.name().as_str().to_owned();
                if used.insert(base.clone()) {
                    continue;
                }
                let mut k = 2;
                let fresh = loop {
                    let cand = format!("{base}_{k}");
                    if !used.contains(&cand) && !all_names.contains(&cand) {
                        break cand;
                    }
                    k += 1;
                };
                used.insert(fresh.clone());
                subst.bind(v, Term::var(&fresh));
            }
            let renamed = if subst.is_empty() {
                r.clone()
            } else {
                r.substitute(&subst).expect("renaming preserves rule shape")
            };
            rules.push(renamed);
        }
        RuleSet {
            rules,
            seeds: self.seeds.clone(),
        }
    }

    pub fn vars_are_apart(&self) -> bool {
        let mut seen: HashSet<Term> = HashSet::new();
        for r in &self.rules {
            for v in r.all_vars() {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Display for RuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RuleSet ({} rules)", self.rules.len())?;
        for r in &self.rules {
            writeln!(f, "  {r:?}")?;
        }
        for s in &self.seeds {
            writeln!(f, "  seed {s}")?;
        }
        Ok(())
    }
}

/// For one rule: which body occurrence of each body variable is marked.
/// Occurrences are `(atom index, argument index)` pairs, 0-based.
pub type RuleMarking = BTreeMap<Term, (usize, usize)>;

/// One marking per rule, aligned with the rule set's rule order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Marking {
    pub per_rule: Vec<RuleMarking>,
}

impl Marking {
    /// Check that every body variable of every rule has exactly one marked
    /// occurrence and that the occurrence really holds that variable.
    pub fn validate(&self, rs: &RuleSet) -> Result<()> {
        if self.per_rule.len() != rs.rules.len() {
            return Err(Error::MarkingIncomplete("rule count mismatch".into()));
        }
        for (rule, marking) in rs.rules.iter().zip(&self.per_rule) {
            for v in vars_of(&rule.body) {
                match marking.get(&v) {
                    None => {
                        return Err(Error::MarkingIncomplete(format!(
                            "variable {v} in rule {}",
                            rule.id
                        )))
                    }
                    Some(&(ai, pi)) => {
                        let ok = rule
                            .body
                            .get(ai)
                            .and_then(|a| a.args.get(pi))
                            .map(|t| *t == v)
                            .unwrap_or(false);
                        if !ok {
                            return Err(Error::MarkingIncomplete(format!(
                                "marked occurrence of {v} in rule {} does not hold it",
                                rule.id
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Variables of a conjunction in first-occurrence order.
pub fn conjunction_vars(atoms: &[Atom]) -> Vec<Term> {
    vars_of(atoms)
}
