//! The rule dependency relation, its strongly connected decomposition, and
//! the per-component acyclicity combinator.
//!
//! `r1` depends-into `r2` when some instance triggers `r1` so that its
//! output newly enables a *productive* application of `r2`. The witness
//! search enumerates, per body atom of `r2`, whether it is matched against
//! the instance or against a specific skolemised head atom of `r1`,
//! unifies the paired atoms, freezes the leftover variables, and checks the
//! four defining conditions on the constructed instance. Completeness rests
//! on skolem functions being private to the producing rule, so every
//! non-instance body fact must come from the head of `r1`; the randomised
//! test suite cross-checks the search against a substitution-enumerating
//! oracle.

use std::collections::{BTreeSet, HashSet};

use crate::atom::Atom;
use crate::error::Result;
use crate::graphs::scc;
use crate::rule::{Rule, RuleSet};
use crate::store::FactStore;
use crate::symbols::Name;
use crate::term::{Subst, Term};
use crate::unify::unify_atoms;

/// A positive dependency witness: the instance, and the substitutions for
/// the producing and the enabled rule.
#[derive(Clone, Debug)]
pub struct DepWitness {
    pub instance: Vec<Atom>,
    pub producer: Subst,
    pub enabled: Subst,
}

impl std::fmt::Display for DepWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut atoms: Vec<String> = self.instance.iter().map(|a| a.to_string()).collect();
        atoms.sort();
        write!(
            f,
            "I={{{}}} via {} then {}",
            atoms.join(", "),
            self.producer,
            self.enabled
        )
    }
}

fn skolemise_head(rule: &Rule) -> Vec<Atom> {
    let mut subst = Subst::new();
    for (i, y) in rule.exist.iter().enumerate() {
        let sym = Name::new(&format!("__dep_{}_{}", rule.id, i + 1));
        subst.bind(*y, Term::fun(sym, rule.frontier.clone()));
    }
    rule.head.iter().map(|a| a.apply(&subst)).collect()
}

fn rename_rule(rule: &Rule, suffix: &str) -> Rule {
    let mut subst = Subst::new();
    for v in rule.all_vars() {
        subst.bind(v, Term::var(&format!("{}{suffix}", v.name())));
    }
    rule.substitute(&subst).expect("renaming preserves shape")
}

/// Decide whether applying `r1` can newly enable a productive application
/// of `r2`. With `optimised` (the default), the enabled application must
/// derive something not already present.
pub fn rule_depends(r1: &Rule, r2: &Rule, optimised: bool) -> Option<DepWitness> {
    // self-dependency compares two variable-disjoint copies; the skolem
    // functions stay keyed by the rule id, hence shared between the copies
    let shared: bool = r1.all_vars().iter().any(|v| r2.all_vars().contains(v));
    let left = r1.clone();
    let right = if shared {
        rename_rule(r2, "_dep")
    } else {
        r2.clone()
    };

    let head1 = skolemise_head(&left);
    let head2 = skolemise_head(&right);

    // per body atom of r2: None = matched in the instance, Some(j) = matched
    // against head atom j of r1
    let mut options: Vec<Vec<Option<usize>>> = Vec::new();
    for b in &right.body {
        let mut opts = vec![None];
        for (j, h) in head1.iter().enumerate() {
            if h.pred == b.pred && h.arity() == b.arity() {
                opts.push(Some(j));
            }
        }
        options.push(opts);
    }
    let mut choice = vec![0usize; options.len()];
    loop {
        let assignment: Vec<Option<usize>> = choice
            .iter()
            .zip(&options)
            .map(|(&c, opts)| opts[c])
            .collect();
        if assignment.iter().any(Option::is_some) {
            if let Some(w) = try_assignment(&left, &right, &head1, &head2, &assignment, optimised) {
                return Some(w);
            }
        }
        // advance
        let mut k = options.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn ground_term(t: Term, unifier: &Subst, freeze: &mut Subst, next: &mut usize) -> Term {
    let resolved = unifier.apply_deep(t);
    let mut vars = Vec::new();
    resolved.collect_vars(&mut vars);
    for v in vars {
        if freeze.get(v).is_none() {
            *next += 1;
            freeze.bind(v, Term::constant(&format!("__w{next}")));
        }
    }
    freeze.apply(resolved)
}

fn ground_atom(a: &Atom, unifier: &Subst, freeze: &mut Subst, next: &mut usize) -> Atom {
    Atom::new(
        a.pred,
        a.args
            .iter()
            .map(|t| ground_term(*t, unifier, freeze, next))
            .collect(),
    )
}

fn try_assignment(
    r1: &Rule,
    r2: &Rule,
    head1: &[Atom],
    head2: &[Atom],
    assignment: &[Option<usize>],
    optimised: bool,
) -> Option<DepWitness> {
    let mut unifier = Subst::new();
    for (b, pick) in r2.body.iter().zip(assignment) {
        if let Some(j) = pick {
            if !unify_atoms(b, &head1[*j], &mut unifier) {
                return None;
            }
        }
    }
    // freeze every leftover variable to a fresh constant
    let mut freeze = Subst::new();
    let mut next = 0usize;
    let ground = |a: &Atom, freeze: &mut Subst, next: &mut usize| -> Atom {
        ground_atom(a, &unifier, freeze, next)
    };
    let body1: Vec<Atom> = r1
        .body
        .iter()
        .map(|a| ground(a, &mut freeze, &mut next))
        .collect();
    let body2: Vec<Atom> = r2
        .body
        .iter()
        .map(|a| ground(a, &mut freeze, &mut next))
        .collect();
    let out1: Vec<Atom> = head1
        .iter()
        .map(|a| ground(a, &mut freeze, &mut next))
        .collect();
    let out2: Vec<Atom> = head2
        .iter()
        .map(|a| ground(a, &mut freeze, &mut next))
        .collect();

    // the candidate instance: r1's premises plus r2's instance-labelled atoms
    let mut instance: BTreeSet<Atom> = body1.iter().cloned().collect();
    for (b, pick) in body2.iter().zip(assignment) {
        if pick.is_none() {
            instance.insert(b.clone());
        }
    }
    if instance.iter().any(|a| !a.is_function_free()) {
        return None;
    }
    let extended: BTreeSet<Atom> = instance
        .iter()
        .cloned()
        .chain(out1.iter().cloned())
        .collect();
    // the enabled rule must not match the instance alone
    if body2.iter().all(|b| instance.contains(b)) {
        return None;
    }
    // but must match once r1's output is added
    if !body2.iter().all(|b| extended.contains(b)) {
        return None;
    }
    // and, with the optimisation, must derive something new
    if optimised && out2.iter().all(|h| extended.contains(h)) {
        return None;
    }

    let mut collect_subst = |rule: &Rule| {
        let mut s = Subst::new();
        for v in rule.all_vars() {
            if !rule.exist.contains(&v) {
                s.bind(v, ground_term(v, &unifier, &mut freeze, &mut next));
            }
        }
        s
    };
    let producer = collect_subst(r1);
    let enabled = collect_subst(r2);
    Some(DepWitness {
        instance: instance.into_iter().collect(),
        producer,
        enabled,
    })
}

/// The dependency graph of a rule set: edges, condensation in topological
/// order, and self-dependency flags.
#[derive(Clone, Debug)]
pub struct DependencyGraph {
    pub edges: BTreeSet<(usize, usize)>,
    /// Strongly connected components, ordered so no later component
    /// depends into an earlier one.
    pub partition: Vec<Vec<usize>>,
    pub self_dependent: Vec<bool>,
}

impl DependencyGraph {
    pub fn on_cycle(&self, rule: usize) -> bool {
        self.self_dependent[rule]
            || self
                .partition
                .iter()
                .any(|c| c.len() > 1 && c.contains(&rule))
    }

    /// Acyclic graph of rule dependencies: every component is a single rule
    /// that does not depend on itself.
    pub fn is_acyclic(&self) -> bool {
        self.partition
            .iter()
            .all(|c| c.len() == 1 && !self.self_dependent[c[0]])
    }

    pub fn to_dot(&self, rs: &RuleSet) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for &(f, t) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                rs.rules[f].id, rs.rules[t].id
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Compute the full dependency relation and its condensation.
pub fn dependency_graph(rs: &RuleSet, optimised: bool) -> DependencyGraph {
    let n = rs.rules.len();
    let mut edges = BTreeSet::new();
    let mut adj = vec![Vec::new(); n];
    for (i, row) in adj.iter_mut().enumerate() {
        for j in 0..n {
            if rule_depends(&rs.rules[i], &rs.rules[j], optimised).is_some() {
                edges.insert((i, j));
                row.push(j);
            }
        }
    }
    let sccs = scc::tarjan(&adj);
    let partition = sccs.topological();
    let self_dependent = (0..n).map(|i| edges.contains(&(i, i))).collect();
    DependencyGraph {
        edges,
        partition,
        self_dependent,
    }
}

/// Outcome of the per-component combinator.
#[derive(Clone, Debug)]
pub struct ComponentOutcome {
    pub acyclic: bool,
    /// Rule ids of the failing component, when rejected.
    pub failing: Option<Vec<String>>,
}

/// The dependency combinator: every strongly connected component must be a
/// non-self-dependent singleton or pass the base check. The base check for
/// plain dependency acyclicity accepts nothing (`|_| Ok(false)`).
pub fn check_with_dependencies<F>(
    rs: &RuleSet,
    optimised: bool,
    base: F,
) -> Result<ComponentOutcome>
where
    F: Fn(&RuleSet) -> Result<bool>,
{
    let graph = dependency_graph(rs, optimised);
    for component in &graph.partition {
        if component.len() == 1 && !graph.self_dependent[component[0]] {
            continue;
        }
        let subset = RuleSet {
            rules: component.iter().map(|&i| rs.rules[i].clone()).collect(),
            seeds: rs.seeds.clone(),
        };
        if !base(&subset)? {
            return Ok(ComponentOutcome {
                acyclic: false,
                failing: Some(component.iter().map(|&i| rs.rules[i].id.clone()).collect()),
            });
        }
    }
    Ok(ComponentOutcome {
        acyclic: true,
        failing: None,
    })
}

/// Rule indices lying on a dependency cycle; used by the safe-position
/// analysis.
pub fn rules_on_cycles(rs: &RuleSet, optimised: bool) -> HashSet<usize> {
    let graph = dependency_graph(rs, optimised);
    (0..rs.rules.len()).filter(|&i| graph.on_cycle(i)).collect()
}

/// A brute-force oracle for the dependency relation: enumerate ground
/// substitutions over a canonical constant pool for the producing rule,
/// then over that pool plus the produced skolem terms for the enabled rule,
/// and test the defining conditions on the minimal instance. Lives here so
/// integration suites can run it; only tests should call it.
pub fn rule_depends_oracle(r1: &Rule, r2: &Rule) -> bool {
    let shared: bool = r1.all_vars().iter().any(|v| r2.all_vars().contains(v));
    let left = r1.clone();
    let right = if shared {
        rename_rule(r2, "_dep")
    } else {
        r2.clone()
    };
    let head1 = skolemise_head(&left);
    let head2 = skolemise_head(&right);

    let mut constants: Vec<Term> = Vec::new();
    for a in left
        .body
        .iter()
        .chain(right.body.iter())
        .chain(head1.iter())
    {
        let mut cs = Vec::new();
        for t in &a.args {
            t.collect_consts(&mut cs);
        }
        for c in cs {
            if !constants.contains(&c) {
                constants.push(c);
            }
        }
    }
    let vars1: Vec<Term> = left
        .all_vars()
        .into_iter()
        .filter(|v| !left.exist.contains(v))
        .collect();
    let vars2: Vec<Term> = right
        .all_vars()
        .into_iter()
        .filter(|v| !right.exist.contains(v))
        .collect();
    let base_consts = constants.len();
    for k in 0..(vars1.len() + vars2.len()) {
        constants.push(Term::constant(&format!("__bf{k}")));
    }

    // canonical substitutions for r1: fresh constants appear in first-use
    // order, so permutations of the pool are never enumerated twice
    let mut sigma1s: Vec<Vec<usize>> = Vec::new();
    enumerate_canonical(vars1.len(), base_consts, &mut vec![], &mut sigma1s);
    for picks1 in &sigma1s {
        let mut s1 = Subst::new();
        for (v, &c) in vars1.iter().zip(picks1) {
            s1.bind(*v, constants[c]);
        }
        let body1: Vec<Atom> = left.body.iter().map(|a| a.apply(&s1)).collect();
        let out1: Vec<Atom> = head1.iter().map(|a| a.apply(&s1)).collect();
        // terms available to r2: everything produced so far, the rules'
        // own constants, plus enough fresh constants of its own
        let mut pool: Vec<Term> = Vec::new();
        for a in body1.iter().chain(out1.iter()) {
            for t in &a.args {
                if !pool.contains(t) {
                    pool.push(*t);
                }
            }
        }
        for c in constants.iter().take(base_consts) {
            if !pool.contains(c) {
                pool.push(*c);
            }
        }
        for extra in 0..vars2.len() {
            let c = Term::constant(&format!("__bg{extra}"));
            if !pool.contains(&c) {
                pool.push(c);
            }
        }
        let mut picks2 = vec![0usize; vars2.len()];
        loop {
            let mut s2 = Subst::new();
            for (v, &c) in vars2.iter().zip(&picks2) {
                s2.bind(*v, pool[c]);
            }
            if dependency_conditions(&body1, &out1, &right, &head2, &s2) {
                return true;
            }
            let mut advanced = false;
            let mut k = picks2.len();
            while k > 0 {
                k -= 1;
                picks2[k] += 1;
                if picks2[k] < pool.len() {
                    advanced = true;
                    break;
                }
                picks2[k] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    false
}

fn enumerate_canonical(
    vars: usize,
    base: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == vars {
        out.push(current.clone());
        return;
    }
    let next_fresh = current
        .iter()
        .copied()
        .filter(|&c| c >= base)
        .max()
        .map(|m| m + 1)
        .unwrap_or(base);
    for c in 0..=next_fresh {
        if c < base || c == next_fresh || current.contains(&c) {
            current.push(c);
            enumerate_canonical(vars, base, current, out);
            current.pop();
        }
    }
}

fn dependency_conditions(
    body1: &[Atom],
    out1: &[Atom],
    r2: &Rule,
    head2: &[Atom],
    s2: &Subst,
) -> bool {
    let body2: Vec<Atom> = r2.body.iter().map(|a| a.apply(s2)).collect();
    let out2: Vec<Atom> = head2.iter().map(|a| a.apply(s2)).collect();
    if body2.iter().any(|a| !a.is_ground()) {
        return false;
    }
    // minimal instance: r1's ground premises plus whatever function-free
    // part of r2's premises the head of r1 does not supply
    let produced: BTreeSet<Atom> = out1.iter().cloned().collect();
    let mut instance: BTreeSet<Atom> = body1.iter().cloned().collect();
    for b in &body2 {
        if !produced.contains(b) {
            if !b.is_function_free() {
                return false;
            }
            instance.insert(b.clone());
        }
    }
    if instance.iter().any(|a| !a.is_function_free()) {
        return false;
    }
    // enabled only together with the produced atoms
    if body2.iter().all(|b| instance.contains(b)) {
        return false;
    }
    let extended: BTreeSet<Atom> = instance
        .iter()
        .cloned()
        .chain(produced.iter().cloned())
        .collect();
    if !body2.iter().all(|b| extended.contains(b)) {
        return false;
    }
    // and productive
    !out2.iter().all(|h| extended.contains(h))
}

/// Convenience wrapper: build the frozen instance of a witness as a store.
pub fn witness_store(w: &DepWitness) -> FactStore {
    w.instance.iter().cloned().collect()
}
