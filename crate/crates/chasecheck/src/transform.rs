//! Rule-to-rule constructions: truth-predicate augmentation, body-equality
//! elimination, equality axiomatisation, skolemisation, the critical
//! instance, head/body normalisation, the model-faithful and
//! model-summarising transforms, singularisation with marking enumeration,
//! and the Horn-DL axiom translation.
//!
//! Generated symbols are derived from rule ids rather than global counters,
//! so repeated runs over the same input produce identical output.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::atom::{Atom, Pred};
use crate::error::{Error, Result};
use crate::rule::{conjunction_vars, Marking, Provenance, Rule, RuleMarking, RuleSet};
use crate::store::FactStore;
use crate::symbols::Name;
use crate::term::{Subst, Term};
use crate::text::DlAxiom;

/// Auxiliary predicate for tracking skolem-argument flow (`S` in memory,
/// `__S` in output).
pub fn s_pred() -> Pred {
    Pred::new("__S")
}

/// Transitive closure of [`s_pred`].
pub fn d_pred() -> Pred {
    Pred::new("__D")
}

/// The nullary alarm predicate derived exactly when the tracked model
/// contains two nested values of one existential.
pub fn c_pred() -> Pred {
    Pred::new("__C")
}

/// The explicit-equality predicate introduced by singularisation.
pub fn eq_pred() -> Pred {
    Pred::new("__eq")
}

/// The ordinary predicate the user-level equality is demoted to once the
/// replacement axioms have been instantiated.
pub fn approx_pred() -> Pred {
    Pred::new("__approx")
}

// ------------------------------------------------------------------ TOP

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TopMode {
    /// Repair unsafe rules; instantiate the truth-propagation rules only
    /// when TOP or BOT occurs afterwards.
    Minimal,
    /// Always instantiate the truth-propagation rules.
    Full,
}

/// Make every rule safe by binding unbound head variables with `TOP(v)`
/// body atoms, and populate `TOP` via one propagation rule per predicate
/// when required (always, in [`TopMode::Full`]).
pub fn augment_top(rs: &RuleSet, mode: TopMode) -> Result<RuleSet> {
    let mut rules = Vec::with_capacity(rs.rules.len());
    let mut saw_top = false;
    for r in &rs.rules {
        for a in r.body.iter().chain(r.head.iter()) {
            if a.pred.is_top() || a.pred.is_bot() {
                saw_top = true;
            }
        }
        if r.is_safe() && !r.body.is_empty() {
            rules.push(r.clone());
            continue;
        }
        saw_top = true;
        let mut body = r.body.clone();
        for v in &r.unbound_head {
            body.push(Atom::new(Pred::top(), vec![*v]));
        }
        if body.is_empty() {
            // an empty-body rule with a ground head would have become seed
            // facts upstream; anything left has head variables to bind
            for v in conjunction_vars(&r.head) {
                if !r.exist.contains(&v) {
                    body.push(Atom::new(Pred::top(), vec![v]));
                }
            }
        }
        rules.push(Rule::new(
            r.id.clone(),
            body,
            r.head.clone(),
            r.exist.clone(),
            r.provenance,
        )?);
    }
    let mut out = RuleSet {
        rules,
        seeds: rs.seeds.clone(),
    };
    if mode == TopMode::Full || saw_top {
        let sig = out.signature()?;
        for (pred, arity) in sig {
            if pred.is_top() || pred.is_equality() || arity == 0 {
                continue;
            }
            // idempotent: an existing propagation rule for this predicate
            // survives a second augmentation pass
            if out
                .rules
                .iter()
                .any(|r| r.provenance == Provenance::TopAxiom && r.body[0].pred == pred)
            {
                continue;
            }
            let vars: Vec<Term> = (1..=arity).map(|i| Term::var(&format!("x{i}"))).collect();
            let head = vars
                .iter()
                .map(|v| Atom::new(Pred::top(), vec![*v]))
                .collect();
            out.rules.push(Rule::new(
                format!("top_{pred}"),
                vec![Atom::new(pred, vars.clone())],
                head,
                vec![],
                Provenance::TopAxiom,
            )?);
        }
    }
    Ok(out.standardize_apart())
}

// ----------------------------------------------------- body equalities

/// Remove every equality atom from rule bodies: variable equalities are
/// substituted away, and a constant equality `a = b` becomes a body atom
/// `__o_a(b)` backed by the seed fact `__o_a(a)`.
pub fn eliminate_body_equality(rs: &RuleSet) -> Result<RuleSet> {
    let mut out = RuleSet {
        rules: Vec::new(),
        seeds: rs.seeds.clone(),
    };
    for r in &rs.rules {
        let mut body = r.body.clone();
        let mut head = r.head.clone();
        while let Some(i) = body.iter().position(|a| a.pred.is_equality()) {
            let atom = body.remove(i);
            let (lhs, rhs) = (atom.args[0], atom.args[1]);
            if lhs == rhs {
                continue;
            }
            if lhs.is_var() || rhs.is_var() {
                let (var, term) = if lhs.is_var() { (lhs, rhs) } else { (rhs, lhs) };
                let mut s = Subst::new();
                s.bind(var, term);
                body = body.iter().map(|a| a.apply(&s)).collect();
                head = head.iter().map(|a| a.apply(&s)).collect();
            } else {
                // two distinct constants: marker predicate keyed on the left one
                let marker = Pred::new(&format!("__o_{}", lhs.name()));
                body.insert(i, Atom::new(marker, vec![rhs]));
                let seed = Atom::new(marker, vec![lhs]);
                if !out.seeds.contains(&seed) {
                    out.seeds.push(seed);
                }
            }
        }
        if body.is_empty() && head.iter().all(|a| a.is_ground()) {
            for a in head {
                if !out.seeds.contains(&a) {
                    out.seeds.push(a);
                }
            }
            continue;
        }
        out.rules.push(Rule::new(
            r.id.clone(),
            body,
            head,
            r.exist.clone(),
            r.provenance,
        )?);
    }
    Ok(out)
}

// ------------------------------------------------------ equality axioms

/// Reflexivity, symmetry, transitivity, and one replacement rule per
/// argument position of every non-equality predicate of `rs`. Empty when
/// `rs` is equality-free. Reflexivity is made safe with a `TOP(x)` body.
pub fn equality_axioms(rs: &RuleSet) -> Result<RuleSet> {
    if !rs.contains_equality() {
        return Ok(RuleSet::default());
    }
    let eq = Pred::equality();
    let x = Term::var("x");
    let x1 = Term::var("x1");
    let x2 = Term::var("x2");
    let x3 = Term::var("x3");
    let mut rules = vec![
        Rule::new(
            "eq_refl",
            vec![Atom::new(Pred::top(), vec![x])],
            vec![Atom::new(eq, vec![x, x])],
            vec![],
            Provenance::EqualityAxiom,
        )?,
        Rule::new(
            "eq_sym",
            vec![Atom::new(eq, vec![x1, x2])],
            vec![Atom::new(eq, vec![x2, x1])],
            vec![],
            Provenance::EqualityAxiom,
        )?,
        Rule::new(
            "eq_trans",
            vec![Atom::new(eq, vec![x1, x2]), Atom::new(eq, vec![x2, x3])],
            vec![Atom::new(eq, vec![x1, x3])],
            vec![],
            Provenance::EqualityAxiom,
        )?,
    ];
    for (pred, arity) in rs.signature()? {
        if pred.is_equality() || arity == 0 {
            continue;
        }
        for i in 0..arity {
            let vars: Vec<Term> = (1..=arity).map(|k| Term::var(&format!("x{k}"))).collect();
            let fresh = Term::var(&format!("x{}p", i + 1));
            let mut replaced = vars.clone();
            replaced[i] = fresh;
            rules.push(Rule::new(
                format!("eq_repl_{pred}_{}", i + 1),
                vec![
                    Atom::new(pred, vars.clone()),
                    Atom::new(eq, vec![vars[i], fresh]),
                ],
                vec![Atom::new(pred, replaced)],
                vec![],
                Provenance::EqualityAxiom,
            )?);
        }
    }
    Ok(RuleSet::new(rules).standardize_apart())
}

/// Replace the user-level equality predicate by an ordinary one across a
/// rule set, once the axioms above have been appended. The result is
/// equality-free, so every notion applies.
pub fn demote_equality(rs: &RuleSet) -> RuleSet {
    let swap = |a: &Atom| {
        if a.pred.is_equality() {
            Atom::new(approx_pred(), a.args.clone())
        } else {
            a.clone()
        }
    };
    let rules = rs
        .rules
        .iter()
        .map(|r| {
            Rule::new(
                r.id.clone(),
                r.body.iter().map(swap).collect(),
                r.head.iter().map(swap).collect(),
                r.exist.clone(),
                r.provenance,
            )
            .expect("demotion preserves rule shape")
        })
        .collect();
    RuleSet {
        rules,
        seeds: rs.seeds.iter().map(swap).collect(),
    }
}

// --------------------------------------------------------- skolemisation

/// Which function symbol replaced which existential variable.
#[derive(Clone, Default, Debug)]
pub struct SkolemMap {
    /// (rule id, variable name) -> (function symbol, arity)
    pub entries: BTreeMap<(String, String), (Name, usize)>,
}

/// Replace every existential variable `y_i` of every rule by
/// `__f_<rule>_<i>(frontier)`; bodies are unchanged.
pub fn skolemise(rs: &RuleSet) -> Result<(RuleSet, SkolemMap)> {
    let mut map = SkolemMap::default();
    let mut rules = Vec::with_capacity(rs.rules.len());
    for r in &rs.rules {
        if r.exist.is_empty() {
            rules.push(r.clone());
            continue;
        }
        let mut subst = Subst::new();
        for (i, y) in r.exist.iter().enumerate() {
            let sym = Name::new(&format!("__f_{}_{}", r.id, i + 1));
            map.entries.insert(
                (r.id.clone(), y.name().as_str().to_owned()),
                (sym, r.frontier.len()),
            );
            subst.bind(*y, Term::fun(sym, r.frontier.clone()));
        }
        let head = r.head.iter().map(|a| a.apply(&subst)).collect();
        rules.push(Rule::new(
            r.id.clone(),
            r.body.clone(),
            head,
            vec![],
            r.provenance,
        )?);
    }
    Ok((
        RuleSet {
            rules,
            seeds: rs.seeds.clone(),
        },
        map,
    ))
}

// ------------------------------------------------------ critical instance

#[derive(Clone, Copy, Debug, Default)]
pub struct CriticalOptions {
    /// Use every rule's signature instead of only user-provenance rules.
    pub literal: bool,
    /// Include equality facts when the equality predicate occurs.
    pub include_equality: bool,
}

/// The instance over which universal chase termination is decided: every
/// fact buildable from the rules' predicates, their body constants, and the
/// special constant `*`.
///
/// By default only user-provenance rules contribute predicates and
/// constants: predicates invented by normalisation or the analysis
/// transforms cannot occur in arbitrary input instances.
pub fn critical_instance(rs: &RuleSet, opts: CriticalOptions) -> Result<FactStore> {
    let any_user = rs.rules.iter().any(|r| r.provenance == Provenance::User);
    let include = |r: &Rule| opts.literal || !any_user || r.provenance == Provenance::User;

    let mut sig: BTreeMap<Pred, usize> = BTreeMap::new();
    for r in rs.rules.iter().filter(|r| include(r)) {
        for a in r.body.iter().chain(r.head.iter()) {
            if a.pred.is_equality() && !opts.include_equality {
                continue;
            }
            // generated predicates cannot occur in input instances: the
            // parsers reject their reserved prefix
            if !opts.literal && a.pred.name().is_reserved() {
                continue;
            }
            sig.insert(a.pred, a.arity());
        }
    }
    let mut constants: BTreeSet<Term> = BTreeSet::new();
    for r in rs.rules.iter().filter(|r| include(r)) {
        for a in &r.body {
            let mut cs = Vec::new();
            for t in &a.args {
                t.collect_consts(&mut cs);
            }
            constants.extend(cs);
        }
    }
    constants.insert(Term::constant("*"));
    let pool: Vec<Term> = constants.into_iter().collect();

    let mut store = FactStore::new();
    for (pred, arity) in sig {
        let mut tuple = vec![0usize; arity];
        loop {
            store.insert(Atom::new(pred, tuple.iter().map(|&i| pool[i]).collect()))?;
            // odometer over the constant pool
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < pool.len() {
                    break;
                }
                tuple[k] = 0;
            }
            if tuple.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(store)
}

// ----------------------------------------------------------- normalisation

/// Applies head/body normalisation steps, optionally reusing predicates
/// whose defining conjunction is isomorphic (identical interface-variable
/// ordering, renamed otherwise).
pub struct Normaliser {
    sharing: bool,
    next_q: u32,
    defs: HashMap<String, Pred>,
}

impl Normaliser {
    pub fn new(sharing: bool) -> Normaliser {
        Normaliser {
            sharing,
            next_q: 1,
            defs: HashMap::new(),
        }
    }

    fn fresh_q(&mut self) -> Pred {
        let p = Pred::new(&format!("__q{}", self.next_q));
        self.next_q += 1;
        p
    }

    fn lookup(&mut self, key: &str) -> Option<Pred> {
        if self.sharing {
            self.defs.get(key).copied()
        } else {
            None
        }
    }

    /// Replace the head sub-conjunction given by `pulled` (indices into the
    /// head) with a fresh atom; returns the rewritten rule and, unless an
    /// existing predicate was reused, the companion definition rule.
    pub fn head_step(&mut self, r: &Rule, pulled: &[usize]) -> Result<(Rule, Option<Rule>)> {
        let (part, rest) = split_atoms(&r.head, pulled, "head")?;
        if rest.is_empty() {
            return Err(Error::InvalidSplit(
                "the remaining head conjunction must stay nonempty".into(),
            ));
        }
        let part_vars = conjunction_vars(&part);
        let rest_vars = conjunction_vars(&rest);
        // interface: universals of the pulled part, then existentials shared
        // with the rest
        let mut interface: Vec<Term> = part_vars
            .iter()
            .copied()
            .filter(|v| !r.exist.contains(v))
            .collect();
        let shared_exist: Vec<Term> = part_vars
            .iter()
            .copied()
            .filter(|v| r.exist.contains(v) && rest_vars.contains(v))
            .collect();
        interface.extend(shared_exist.iter().copied());

        let key = canonical_conjunction(&part, &interface);
        let (q, companion) = match self.lookup(&key) {
            Some(q) => (q, None),
            None => {
                let q = self.fresh_q();
                self.defs.insert(key, q);
                let def_exist: Vec<Term> = part_vars
                    .iter()
                    .copied()
                    .filter(|v| r.exist.contains(v) && !rest_vars.contains(v))
                    .collect();
                let def = Rule::new(
                    format!("{}", q).trim_start_matches("__").to_owned() + "_def",
                    vec![Atom::new(q, interface.clone())],
                    part.clone(),
                    def_exist,
                    Provenance::Normalisation,
                )?;
                (q, Some(def))
            }
        };
        let mut head = rest;
        head.push(Atom::new(q, interface));
        let new_exist: Vec<Term> = r
            .exist
            .iter()
            .copied()
            .filter(|y| conjunction_vars(&head).contains(y))
            .collect();
        let replaced = Rule::new(r.id.clone(), r.body.clone(), head, new_exist, r.provenance)?;
        Ok((replaced, companion))
    }

    /// Replace the body sub-conjunction given by `pulled` with a fresh atom;
    /// the companion rule derives it.
    pub fn body_step(&mut self, r: &Rule, pulled: &[usize]) -> Result<(Rule, Option<Rule>)> {
        let (part, rest) = split_atoms(&r.body, pulled, "body")?;
        let part_vars = conjunction_vars(&part);
        let rest_vars = conjunction_vars(&rest);
        let head_vars = conjunction_vars(&r.head);
        // interface: frontier variables of the pulled part, then body-only
        // variables it shares with the rest
        let mut interface: Vec<Term> = part_vars
            .iter()
            .copied()
            .filter(|v| head_vars.contains(v))
            .collect();
        interface.extend(
            part_vars
                .iter()
                .copied()
                .filter(|v| !head_vars.contains(v) && rest_vars.contains(v)),
        );
        let key = canonical_conjunction(&part, &interface);
        let (q, companion) = match self.lookup(&key) {
            Some(q) => (q, None),
            None => {
                let q = self.fresh_q();
                self.defs.insert(key, q);
                let def = Rule::new(
                    format!("{}", q).trim_start_matches("__").to_owned() + "_def",
                    part.clone(),
                    vec![Atom::new(q, interface.clone())],
                    vec![],
                    Provenance::Normalisation,
                )?;
                (q, Some(def))
            }
        };
        let mut body = vec![Atom::new(q, interface)];
        body.extend(rest);
        let replaced = Rule::new(
            r.id.clone(),
            body,
            r.head.clone(),
            r.exist.clone(),
            r.provenance,
        )?;
        Ok((replaced, companion))
    }
}

fn split_atoms(atoms: &[Atom], pulled: &[usize], what: &str) -> Result<(Vec<Atom>, Vec<Atom>)> {
    if pulled.is_empty() {
        return Err(Error::InvalidSplit(format!(
            "the pulled {what} conjunction must be nonempty"
        )));
    }
    let mut part = Vec::new();
    let mut rest = Vec::new();
    let set: BTreeSet<usize> = pulled.iter().copied().collect();
    if set.len() != pulled.len() {
        return Err(Error::InvalidSplit("duplicate atom index".into()));
    }
    for &i in &set {
        if i >= atoms.len() {
            return Err(Error::InvalidSplit(format!("atom index {i} out of range")));
        }
    }
    for (i, a) in atoms.iter().enumerate() {
        if set.contains(&i) {
            part.push(a.clone());
        } else {
            rest.push(a.clone());
        }
    }
    Ok((part, rest))
}

/// Canonical string of a conjunction with the interface variables pinned in
/// order and every other variable renamed by first occurrence; minimised
/// over atom permutations so that set equality up to renaming is exact.
fn canonical_conjunction(atoms: &[Atom], interface: &[Term]) -> String {
    fn render(perm: &[&Atom], interface: &[Term]) -> String {
        let mut names: HashMap<Term, String> = HashMap::new();
        for (i, v) in interface.iter().enumerate() {
            names.insert(*v, format!("i{i}"));
        }
        let mut next = 0usize;
        let mut out = String::new();
        for a in perm {
            out.push_str(a.pred.name().as_str());
            out.push('(');
            for t in &a.args {
                if t.is_var() {
                    let label = names.entry(*t).or_insert_with(|| {
                        let s = format!("v{next}");
                        next += 1;
                        s
                    });
                    out.push_str(label);
                } else {
                    out.push('c');
                    out.push_str(&t.to_string());
                }
                out.push(',');
            }
            out.push(')');
        }
        out
    }
    let mut refs: Vec<&Atom> = atoms.iter().collect();
    if refs.len() > 7 {
        // identity canonicalisation is exact enough at this size cutoff:
        // sharing simply never triggers for巨 conjunctions
        return format!("nocanon:{}", render(&refs, interface));
    }
    let mut best: Option<String> = None;
    permute(&mut refs, 0, &mut |perm| {
        let s = render(perm, interface);
        if best.as_ref().map(|b| s < *b).unwrap_or(true) {
            best = Some(s);
        }
    });
    best.unwrap_or_default()
}

fn permute<'a>(items: &mut Vec<&'a Atom>, k: usize, visit: &mut impl FnMut(&[&'a Atom])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

// --------------------------------------------- model-based transforms

fn tracking_atoms(r: &Rule, value_of: &dyn Fn(Term) -> Term) -> Vec<Atom> {
    let mut extra = Vec::new();
    for (i, y) in r.exist.iter().enumerate() {
        let f = Pred::new(&format!("__F_{}_{}", r.id, i + 1));
        extra.push(Atom::new(f, vec![value_of(*y)]));
        for x in &r.frontier {
            extra.push(Atom::new(s_pred(), vec![*x, value_of(*y)]));
        }
    }
    extra
}

fn tracking_rules(rs: &RuleSet) -> Result<Vec<Rule>> {
    let x1 = Term::var("x1");
    let x2 = Term::var("x2");
    let x3 = Term::var("x3");
    let mut rules = vec![
        Rule::new(
            "aux_sd",
            vec![Atom::new(s_pred(), vec![x1, x2])],
            vec![Atom::new(d_pred(), vec![x1, x2])],
            vec![],
            Provenance::MfaAux,
        )?,
        Rule::new(
            "aux_dtrans",
            vec![
                Atom::new(d_pred(), vec![x1, x2]),
                Atom::new(s_pred(), vec![x2, x3]),
            ],
            vec![Atom::new(d_pred(), vec![x1, x3])],
            vec![],
            Provenance::MfaAux,
        )?,
    ];
    for r in &rs.rules {
        for (i, _) in r.exist.iter().enumerate() {
            let f = Pred::new(&format!("__F_{}_{}", r.id, i + 1));
            rules.push(Rule::new(
                format!("aux_c_{}_{}", r.id, i + 1),
                vec![
                    Atom::new(f, vec![x1]),
                    Atom::new(d_pred(), vec![x1, x2]),
                    Atom::new(f, vec![x2]),
                ],
                vec![Atom::new(c_pred(), vec![])],
                vec![],
                Provenance::MfaAux,
            )?);
        }
    }
    Ok(rules)
}

/// Extend each generating rule's head with value-tracking atoms: one
/// `__F_r_i(y_i)` per existential and `__S(x_j, y_i)` per frontier
/// variable, plus the closure rules deriving the alarm predicate `__C`.
pub fn mfa_transform(rs: &RuleSet) -> Result<RuleSet> {
    let aux = tracking_rules(rs)?;
    let mut rules = Vec::new();
    for r in &rs.rules {
        if r.exist.is_empty() {
            rules.push(r.clone());
            continue;
        }
        let mut head = r.head.clone();
        head.extend(tracking_atoms(r, &|t| t));
        rules.push(Rule::new(
            r.id.clone(),
            r.body.clone(),
            head,
            r.exist.clone(),
            r.provenance,
        )?);
    }
    rules.extend(aux);
    Ok(RuleSet {
        rules,
        seeds: rs.seeds.clone(),
    }
    .standardize_apart())
}

/// Like [`mfa_transform`], but each existential is summarised by a fresh
/// constant `__c_r_i`, so the output is function-free.
pub fn msa_transform(rs: &RuleSet) -> Result<RuleSet> {
    let aux = tracking_rules(rs)?;
    let mut rules = Vec::new();
    for r in &rs.rules {
        if r.exist.is_empty() {
            rules.push(r.clone());
            continue;
        }
        let mut theta = Subst::new();
        for (i, y) in r.exist.iter().enumerate() {
            theta.bind(*y, Term::constant(&format!("__c_{}_{}", r.id, i + 1)));
        }
        let mut head: Vec<Atom> = r.head.iter().map(|a| a.apply(&theta)).collect();
        head.extend(tracking_atoms(r, &|t| theta.apply(t)));
        rules.push(Rule::new(
            r.id.clone(),
            r.body.clone(),
            head,
            vec![],
            r.provenance,
        )?);
    }
    rules.extend(aux);
    Ok(RuleSet {
        rules,
        seeds: rs.seeds.clone(),
    }
    .standardize_apart())
}

// ------------------------------------------------------- singularisation

/// Rewrite away equality atoms whose operands include an existential
/// variable: `y ≈ t` becomes `__eqd_r_k(y, t)` plus a companion rule
/// deriving the equality from the fresh predicate. Afterwards markings are
/// well defined for every rule.
pub fn rewrite_existential_equalities(rs: &RuleSet) -> Result<RuleSet> {
    let mut out = RuleSet {
        rules: Vec::new(),
        seeds: rs.seeds.clone(),
    };
    let mut companions = Vec::new();
    for r in &rs.rules {
        let mut head = Vec::with_capacity(r.head.len());
        let mut k = 0;
        for a in &r.head {
            let existential = a.pred.is_equality() && a.args.iter().any(|t| r.exist.contains(t));
            if !existential {
                head.push(a.clone());
                continue;
            }
            k += 1;
            let fresh = Pred::new(&format!("__eqd_{}_{k}", r.id));
            head.push(Atom::new(fresh, a.args.clone()));
            let v1 = Term::var("x1");
            let v2 = Term::var("x2");
            companions.push(Rule::new(
                format!("{}_eqd{k}", r.id),
                vec![Atom::new(fresh, vec![v1, v2])],
                vec![Atom::equality(v1, v2)],
                vec![],
                r.provenance,
            )?);
        }
        out.rules.push(Rule::new(
            r.id.clone(),
            r.body.clone(),
            head,
            r.exist.clone(),
            r.provenance,
        )?);
    }
    out.rules.extend(companions);
    Ok(out.standardize_apart())
}

/// The three explicit-equality axioms shared by every singularisation.
fn eq_axioms() -> Result<Vec<Rule>> {
    let x = Term::var("x");
    let x1 = Term::var("x1");
    let x2 = Term::var("x2");
    let x3 = Term::var("x3");
    Ok(vec![
        Rule::new(
            "sing_refl",
            vec![Atom::new(Pred::top(), vec![x])],
            vec![Atom::new(eq_pred(), vec![x, x])],
            vec![],
            Provenance::Singularisation,
        )?,
        Rule::new(
            "sing_sym",
            vec![Atom::new(eq_pred(), vec![x1, x2])],
            vec![Atom::new(eq_pred(), vec![x2, x1])],
            vec![],
            Provenance::Singularisation,
        )?,
        Rule::new(
            "sing_trans",
            vec![
                Atom::new(eq_pred(), vec![x1, x2]),
                Atom::new(eq_pred(), vec![x2, x3]),
            ],
            vec![Atom::new(eq_pred(), vec![x1, x3])],
            vec![],
            Provenance::Singularisation,
        )?,
    ])
}

/// Singularise one rule under one rule marking: equality heads become
/// `__eq` atoms, and every unmarked body occurrence of a term `t` is
/// replaced by a fresh variable `z` with `__eq(t, z)` appended.
fn singularise_rule(r: &Rule, marking: &RuleMarking, id: String) -> Result<Rule> {
    let mut body = Vec::with_capacity(r.body.len());
    let mut eq_atoms = Vec::new();
    let mut fresh = 0usize;
    for (ai, atom) in r.body.iter().enumerate() {
        let mut args = Vec::with_capacity(atom.args.len());
        for (pi, t) in atom.args.iter().enumerate() {
            let marked = t.is_var() && marking.get(t) == Some(&(ai, pi));
            if marked {
                args.push(*t);
            } else {
                fresh += 1;
                let z = Term::var(&format!("u{fresh}_{}", id));
                args.push(z);
                eq_atoms.push(Atom::new(eq_pred(), vec![*t, z]));
            }
        }
        body.push(Atom::new(atom.pred, args));
    }
    body.extend(eq_atoms);
    let head = r
        .head
        .iter()
        .map(|a| {
            if a.pred.is_equality() {
                Atom::new(eq_pred(), a.args.clone())
            } else {
                a.clone()
            }
        })
        .collect();
    Rule::new(id, body, head, r.exist.clone(), Provenance::Singularisation)
}

/// Singularise a whole rule set under a marking. Equality must already be
/// confined to heads; rules whose equality heads mention existential
/// variables are rewritten first (see [`rewrite_existential_equalities`]),
/// which leaves body occurrences — and hence the marking — untouched.
pub fn singularise(rs: &RuleSet, marking: &Marking) -> Result<RuleSet> {
    if !rs.equality_only_in_heads() {
        return Err(Error::Inapplicable(
            "singularisation requires equality only in rule heads".into(),
        ));
    }
    let rs = rewrite_existential_equalities(rs)?;
    marking.validate(&rs)?;
    let mut rules = Vec::new();
    for (r, m) in rs.rules.iter().zip(&marking.per_rule) {
        rules.push(singularise_rule(r, m, r.id.clone())?);
    }
    rules.extend(eq_axioms()?);
    Ok(RuleSet {
        rules,
        seeds: rs.seeds.clone(),
    }
    .standardize_apart())
}

/// Body occurrences of every body variable of a rule, in occurrence order.
fn occurrences(r: &Rule) -> BTreeMap<Term, Vec<(usize, usize)>> {
    let mut map: BTreeMap<Term, Vec<(usize, usize)>> = BTreeMap::new();
    for (ai, atom) in r.body.iter().enumerate() {
        for (pi, t) in atom.args.iter().enumerate() {
            if t.is_var() {
                map.entry(*t).or_default().push((ai, pi));
            }
        }
    }
    map
}

/// A variable is relevant when it occurs more than once in the body and at
/// all in the head; only relevant variables make singularisations differ.
///
/// The head occurrence may sit inside an equality atom: after
/// singularisation that atom is an ordinary one, so the variable holds a
/// head position and the syntactic analyses can tell the marking variants
/// apart (the chases still coincide, but joint acyclicity need not). A
/// variable absent from the head never holds a head position in any
/// variant, so pinning its marking is sound for every notion.
fn relevant_vars(r: &Rule) -> BTreeSet<Term> {
    let occ = occurrences(r);
    let head_vars = conjunction_vars(&r.head);
    let mut out = BTreeSet::new();
    for (v, positions) in occ {
        if positions.len() >= 2 && head_vars.contains(&v) {
            out.insert(v);
        }
    }
    out
}

type MarkingSlot = (usize, Term, Vec<(usize, usize)>);

/// Streams markings in a fixed order: rule order, then variable name order,
/// then occurrence order. With `reduced`, only relevant variables vary and
/// all others are pinned to their first occurrence.
pub struct MarkingEnum {
    base: Vec<RuleMarking>,
    /// (rule index, variable, candidate occurrences)
    slots: Vec<MarkingSlot>,
    counters: Vec<usize>,
    done: bool,
}

impl MarkingEnum {
    pub fn total(&self) -> usize {
        self.slots.iter().map(|(_, _, occ)| occ.len()).product()
    }
}

impl Iterator for MarkingEnum {
    type Item = Marking;

    fn next(&mut self) -> Option<Marking> {
        if self.done {
            return None;
        }
        let mut per_rule = self.base.clone();
        for ((ri, v, occ), &c) in self.slots.iter().zip(&self.counters) {
            per_rule[*ri].insert(*v, occ[c]);
        }
        // advance the odometer, last slot fastest
        let mut k = self.slots.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.counters[k] += 1;
            if self.counters[k] < self.slots[k].2.len() {
                break;
            }
            self.counters[k] = 0;
        }
        if self.slots.is_empty() {
            self.done = true;
        }
        Some(Marking { per_rule })
    }
}

/// Enumerate markings of `rs` (after the existential-equality rewrite).
/// `reduced` enumerates only the combinations that can change the result.
pub fn enumerate_markings(rs: &RuleSet, reduced: bool) -> Result<MarkingEnum> {
    if !rs.equality_only_in_heads() {
        return Err(Error::Inapplicable(
            "markings require equality only in rule heads".into(),
        ));
    }
    let rs = rewrite_existential_equalities(rs)?;
    let mut base = Vec::with_capacity(rs.rules.len());
    let mut slots = Vec::new();
    for (ri, r) in rs.rules.iter().enumerate() {
        let occ = occurrences(r);
        let relevant = relevant_vars(r);
        let mut pinned = RuleMarking::new();
        // variable name order
        let mut vars: Vec<(&Term, &Vec<(usize, usize)>)> = occ.iter().collect();
        vars.sort_by_key(|(v, _)| v.name().as_str());
        for (v, positions) in vars {
            let varies = if reduced {
                relevant.contains(v)
            } else {
                positions.len() > 1
            };
            if varies {
                slots.push((ri, *v, positions.clone()));
            } else {
                pinned.insert(*v, positions[0]);
            }
        }
        base.push(pinned);
    }
    Ok(MarkingEnum {
        base,
        counters: vec![0; slots.len()],
        slots,
        done: false,
    })
}

/// The union of the singularisations over one maximal reduced marking
/// family: each rule contributes one copy per combination of its own
/// relevant-variable markings, renamed apart.
pub fn sing_union(rs: &RuleSet) -> Result<RuleSet> {
    if !rs.equality_only_in_heads() {
        return Err(Error::Inapplicable(
            "singularisation requires equality only in rule heads".into(),
        ));
    }
    let rs = rewrite_existential_equalities(rs)?;
    let mut rules = Vec::new();
    for r in &rs.rules {
        let occ = occurrences(r);
        let relevant = relevant_vars(r);
        let mut pinned = RuleMarking::new();
        let mut slots: Vec<(Term, Vec<(usize, usize)>)> = Vec::new();
        let mut vars: Vec<(&Term, &Vec<(usize, usize)>)> = occ.iter().collect();
        vars.sort_by_key(|(v, _)| v.name().as_str());
        for (v, positions) in vars {
            if relevant.contains(v) {
                slots.push((*v, positions.clone()));
            } else {
                pinned.insert(*v, positions[0]);
            }
        }
        let combos: usize = slots.iter().map(|(_, occ)| occ.len()).product();
        for c in 0..combos.max(1) {
            let mut m = pinned.clone();
            let mut rem = c;
            for (v, occs) in slots.iter().rev() {
                m.insert(*v, occs[rem % occs.len()]);
                rem /= occs.len();
            }
            let id = if combos <= 1 {
                r.id.clone()
            } else {
                format!("{}_m{}", r.id, c + 1)
            };
            rules.push(singularise_rule(r, &m, id)?);
        }
    }
    rules.extend(eq_axioms()?);
    Ok(RuleSet {
        rules,
        seeds: rs.seeds.clone(),
    }
    .standardize_apart())
}

// -------------------------------------------------------- DL translation

/// One rule per normalised Horn axiom.
pub fn dl_translate(axioms: &[DlAxiom]) -> Result<RuleSet> {
    let mut rules = Vec::with_capacity(axioms.len());
    for (k, ax) in axioms.iter().enumerate() {
        let id = format!("r{}", k + 1);
        let x = Term::var("x");
        let y = Term::var("y");
        let z = Term::var("z");
        let x1 = Term::var("x1");
        let x2 = Term::var("x2");
        let rule = match ax {
            DlAxiom::SomeValues { sub, role, filler } => Rule::new(
                id,
                vec![Atom::new(*sub, vec![x])],
                vec![role.atom(x, y), Atom::new(*filler, vec![y])],
                vec![y],
                Provenance::User,
            )?,
            DlAxiom::MaxOne { sub, role, filler } => Rule::new(
                id,
                vec![
                    Atom::new(*sub, vec![z]),
                    role.atom(z, x1),
                    Atom::new(*filler, vec![x1]),
                    role.atom(z, x2),
                    Atom::new(*filler, vec![x2]),
                ],
                vec![Atom::equality(x1, x2)],
                vec![],
                Provenance::User,
            )?,
            DlAxiom::ConjSubclass { left, right, sup } => Rule::new(
                id,
                vec![Atom::new(*left, vec![x]), Atom::new(*right, vec![x])],
                vec![Atom::new(*sup, vec![x])],
                vec![],
                Provenance::User,
            )?,
            DlAxiom::AllValues { sub, role, filler } => Rule::new(
                id,
                vec![Atom::new(*sub, vec![z]), role.atom(z, x)],
                vec![Atom::new(*filler, vec![x])],
                vec![],
                Provenance::User,
            )?,
            DlAxiom::SubRole { sub, sup } => Rule::new(
                id,
                vec![sub.atom(x1, x2)],
                vec![sup.atom(x1, x2)],
                vec![],
                Provenance::User,
            )?,
            DlAxiom::RoleChain { first, second, sup } => Rule::new(
                id,
                vec![first.atom(x1, z), second.atom(z, x2)],
                vec![sup.atom(x1, x2)],
                vec![],
                Provenance::User,
            )?,
            DlAxiom::Nominal { sub, individual } => Rule::new(
                id,
                vec![Atom::new(*sub, vec![x])],
                vec![Atom::equality(x, *individual)],
                vec![],
                Provenance::User,
            )?,
        };
        rules.push(rule);
    }
    Ok(RuleSet::new(rules).standardize_apart())
}
