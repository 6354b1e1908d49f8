//! Homomorphism matching and the skolem chase.
//!
//! The chase follows the two-phase discipline: as long as some function-free
//! rule derives a new fact, only function-free rules are applied; functional
//! (skolemised generating) rules fire only on steps where the function-free
//! ones are saturated. Each step applies *all* rules of its phase against
//! the frozen previous store, so the sequence of stores is canonical and
//! independent of rule enumeration order.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::rule::{Rule, RuleSet};
use crate::store::FactStore;
use crate::term::{Subst, Term, TermKind};

#[derive(Clone, Debug)]
pub struct ChaseConfig {
    pub max_facts: Option<usize>,
    /// Term-nesting cap; `None` when cyclic-term detection is the intended
    /// stop condition.
    pub max_depth: Option<u32>,
    pub max_steps: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Stop as soon as a freshly built term nests a function symbol inside
    /// itself.
    pub detect_cyclic: bool,
    /// Record one trace entry per productive firing.
    pub trace: bool,
    /// Stop once this fact is derived (used by the entailment-style
    /// acyclicity check, where the chase itself need not terminate).
    pub watch_fact: Option<Atom>,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            max_facts: Some(1_000_000),
            max_depth: Some(100),
            max_steps: Some(100_000),
            time_limit: Some(Duration::from_secs(60)),
            detect_cyclic: false,
            trace: false,
            watch_fact: None,
        }
    }
}

impl ChaseConfig {
    /// Configuration for acyclicity checking by cyclic-term detection:
    /// detection is the stop condition, so depth is uncapped.
    pub fn for_detection() -> Self {
        ChaseConfig {
            detect_cyclic: true,
            max_depth: None,
            ..ChaseConfig::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LimitKind {
    Facts,
    Depth,
    Steps,
    Time,
}

impl std::fmt::Display for LimitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitKind::Facts => write!(f, "fact"),
            LimitKind::Depth => write!(f, "depth"),
            LimitKind::Steps => write!(f, "step"),
            LimitKind::Time => write!(f, "time"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ChaseStatus {
    /// No rule application adds a new fact.
    Fixpoint,
    /// A freshly built term nests some function symbol inside itself.
    CyclicTerm {
        term: Term,
        rule: String,
        subst: Subst,
    },
    LimitExceeded(LimitKind),
    /// The watched fact was derived.
    WatchedFact,
}

impl ChaseStatus {
    pub fn is_fixpoint(&self) -> bool {
        matches!(self, ChaseStatus::Fixpoint)
    }
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub step: usize,
    pub rule: String,
    pub subst: Subst,
    pub new_atoms: Vec<Atom>,
}

impl std::fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let atoms: Vec<String> = self.new_atoms.iter().map(|a| a.to_string()).collect();
        write!(
            f,
            "step={} rule={} subst={} new={{{}}}",
            self.step,
            self.rule,
            self.subst,
            atoms.join(", ")
        )
    }
}

#[derive(Clone, Default, Debug)]
pub struct ChaseStats {
    pub steps: usize,
    pub facts: usize,
    pub max_term_depth: u32,
    /// Productive firings (substitutions that contributed a new fact).
    pub firings_per_rule: BTreeMap<String, usize>,
    /// Facts first derived during a functional (generating) phase.
    pub generated_facts: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct ChaseOutcome {
    pub status: ChaseStatus,
    pub store: FactStore,
    pub stats: ChaseStats,
    pub trace: Vec<TraceEntry>,
}

// ------------------------------------------------------------- matching

fn match_term(pattern: Term, ground: Term, subst: &mut Subst) -> bool {
    match pattern.kind() {
        TermKind::Var(_) => match subst.get(pattern) {
            Some(bound) => bound == ground,
            None => {
                subst.bind(pattern, ground);
                true
            }
        },
        TermKind::Const(_) => pattern == ground,
        TermKind::Fun(f, args) => match ground.kind() {
            TermKind::Fun(g, gargs) if f == g && args.len() == gargs.len() => args
                .iter()
                .zip(gargs.iter())
                .all(|(p, g)| match_term(*p, *g, subst)),
            _ => false,
        },
    }
}

fn match_atom(pattern: &Atom, fact: &Atom, subst: &Subst) -> Option<Subst> {
    if pattern.pred != fact.pred || pattern.args.len() != fact.args.len() {
        return None;
    }
    let mut s = subst.clone();
    for (p, g) in pattern.args.iter().zip(fact.args.iter()) {
        if !match_term(*p, *g, &mut s) {
            return None;
        }
    }
    Some(s)
}

/// Candidate facts for an atom under a partial substitution, using the
/// narrowest per-position index available.
fn candidates<'s>(atom: &Atom, subst: &Subst, store: &'s FactStore) -> Vec<&'s Atom> {
    let mut best: Option<(usize, u32, Term)> = None;
    for (i, t) in atom.args.iter().enumerate() {
        let bound = subst.apply(*t);
        if !bound.is_ground() {
            continue;
        }
        let len = store.facts_at(atom.pred, (i + 1) as u32, bound).len();
        if best.map(|(l, _, _)| len < l).unwrap_or(true) {
            best = Some((len, (i + 1) as u32, bound));
        }
    }
    match best {
        Some((_, pos, t)) => store.facts_at(atom.pred, pos, t),
        None => store.facts_of(atom.pred).iter().collect(),
    }
}

/// Estimated candidate count, for the greedy join order.
fn estimate(atom: &Atom, subst: &Subst, store: &FactStore) -> usize {
    let mut best = store.facts_of(atom.pred).len();
    for (i, t) in atom.args.iter().enumerate() {
        let bound = subst.apply(*t);
        if bound.is_ground() {
            best = best.min(store.facts_at(atom.pred, (i + 1) as u32, bound).len());
        }
    }
    best
}

/// All substitutions mapping `atoms` into `store`, in a deterministic
/// order. Matching picks the most constrained atom next at every level;
/// candidate facts are enumerated in insertion order.
pub fn match_conjunction(atoms: &[Atom], store: &FactStore) -> Vec<Subst> {
    let mut out = Vec::new();
    for_each_match(atoms, store, &mut |s| {
        out.push(s.clone());
        true
    });
    out
}

/// Visit matches until the visitor returns `false`.
pub fn for_each_match(
    atoms: &[Atom],
    store: &FactStore,
    visit: &mut impl FnMut(&Subst) -> bool,
) -> bool {
    let mut remaining: Vec<&Atom> = atoms.iter().collect();
    descend(&mut remaining, store, &Subst::new(), visit)
}

fn descend(
    remaining: &mut Vec<&Atom>,
    store: &FactStore,
    subst: &Subst,
    visit: &mut impl FnMut(&Subst) -> bool,
) -> bool {
    if remaining.is_empty() {
        return visit(subst);
    }
    // most constrained atom first, ties by list order
    let mut pick = 0;
    let mut best = usize::MAX;
    for (i, a) in remaining.iter().enumerate() {
        let e = estimate(a, subst, store);
        if e < best {
            best = e;
            pick = i;
        }
    }
    let atom = remaining.remove(pick);
    let cands = candidates(atom, subst, store);
    let mut keep_going = true;
    for fact in cands {
        if let Some(next) = match_atom(atom, fact, subst) {
            if !descend(remaining, store, &next, visit) {
                keep_going = false;
                break;
            }
        }
    }
    remaining.insert(pick, atom);
    keep_going
}

// ------------------------------------------------------------ application

/// The result of applying one rule to a frozen store: the atoms its head
/// would add, minus what the store already holds.
pub fn apply_rule(rule: &Rule, store: &FactStore) -> Vec<Atom> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for subst in match_conjunction(&rule.body, store) {
        for head in &rule.head {
            let fact = head.apply(&subst);
            debug_assert!(fact.is_ground(), "unsafe or unskolemised rule {}", rule.id);
            if !store.contains(&fact) && seen.insert(fact.clone()) {
                out.push(fact);
            }
        }
    }
    out
}

struct Phase<'r> {
    rules: Vec<&'r Rule>,
    generating: bool,
}

/// Run the skolem chase of `rs` on `instance` (extended with the rule set's
/// seed facts) under `cfg`.
pub fn chase(rs: &RuleSet, instance: &FactStore, cfg: &ChaseConfig) -> Result<ChaseOutcome> {
    let started = Instant::now();
    let mut store = instance.clone();
    for seed in &rs.seeds {
        store.insert(seed.clone())?;
    }
    let function_free: Phase = Phase {
        rules: rs
            .rules
            .iter()
            .filter(|r| !r.has_functional_head())
            .collect(),
        generating: false,
    };
    let functional: Phase = Phase {
        rules: rs
            .rules
            .iter()
            .filter(|r| r.has_functional_head())
            .collect(),
        generating: true,
    };
    let mut stats = ChaseStats::default();
    let mut trace = Vec::new();
    let status;

    'steps: loop {
        if let Some(watch) = &cfg.watch_fact {
            if store.contains(watch) {
                status = ChaseStatus::WatchedFact;
                break;
            }
        }
        if let Some(max) = cfg.max_steps {
            if stats.steps >= max {
                status = ChaseStatus::LimitExceeded(LimitKind::Steps);
                break;
            }
        }
        if let Some(limit) = cfg.time_limit {
            if started.elapsed() > limit {
                status = ChaseStatus::LimitExceeded(LimitKind::Time);
                break;
            }
        }

        let mut new_atoms: Vec<Atom> = Vec::new();
        let mut firings: Vec<TraceEntry> = Vec::new();
        let mut phase_generating = false;
        for phase in [&function_free, &functional] {
            for rule in &phase.rules {
                for subst in match_conjunction(&rule.body, &store) {
                    let mut fresh = Vec::new();
                    for head in &rule.head {
                        let fact = head.apply(&subst);
                        for t in &fact.args {
                            if cfg.detect_cyclic && t.is_cyclic() {
                                status = ChaseStatus::CyclicTerm {
                                    term: *t,
                                    rule: rule.id.clone(),
                                    subst: subst.clone(),
                                };
                                break 'steps;
                            }
                            if let Some(cap) = cfg.max_depth {
                                if t.depth() > cap {
                                    status = ChaseStatus::LimitExceeded(LimitKind::Depth);
                                    break 'steps;
                                }
                            }
                        }
                        if !store.contains(&fact) && !new_atoms.contains(&fact) {
                            fresh.push(fact);
                        }
                    }
                    if !fresh.is_empty() {
                        *stats.firings_per_rule.entry(rule.id.clone()).or_default() += 1;
                        if cfg.trace {
                            firings.push(TraceEntry {
                                step: stats.steps + 1,
                                rule: rule.id.clone(),
                                subst,
                                new_atoms: fresh.clone(),
                            });
                        }
                        new_atoms.extend(fresh);
                    }
                }
            }
            if !new_atoms.is_empty() {
                phase_generating = phase.generating;
                break; // functional rules wait until the function-free phase is dry
            }
        }
        if new_atoms.is_empty() {
            status = ChaseStatus::Fixpoint;
            break;
        }
        stats.steps += 1;
        if phase_generating {
            stats.generated_facts += new_atoms.len();
        }
        for a in new_atoms {
            stats.max_term_depth = stats.max_term_depth.max(a.max_depth());
            store.insert(a)?;
        }
        trace.extend(firings);
        if let Some(max) = cfg.max_facts {
            if store.len() > max {
                status = ChaseStatus::LimitExceeded(LimitKind::Facts);
                break;
            }
        }
    }

    stats.facts = store.len();
    stats.max_term_depth = stats.max_term_depth.max(store.max_depth());
    stats.elapsed = started.elapsed();
    Ok(ChaseOutcome {
        status,
        store,
        stats,
        trace,
    })
}

/// Maximal function-symbol nesting depth in a fixpoint chase.
pub fn ontology_depth(outcome: &ChaseOutcome) -> Result<u32> {
    if !outcome.status.is_fixpoint() {
        return Err(Error::NonFixpoint(format!("{:?}", outcome.status)));
    }
    Ok(outcome.store.max_depth())
}

// ---------------------------------------------------------------- metrics

/// An exact nonnegative rational.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.max(1), den);
        Ratio {
            num: num / if num == 0 { 1 } else { g },
            den: den / if num == 0 { den } else { g },
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MaterialisationMetrics {
    /// Facts introduced by generating rules, relative to the input size.
    pub generated_size: Ratio,
    /// Total facts after materialisation, relative to the input size.
    pub materialisation_size: Ratio,
}

/// The cost metrics of a materialisation: both are exact ratios against the
/// size of the store the chase started from.
pub fn materialisation_metrics(
    before: &FactStore,
    outcome: &ChaseOutcome,
) -> Result<MaterialisationMetrics> {
    if !outcome.status.is_fixpoint() {
        return Err(Error::NonFixpoint(format!("{:?}", outcome.status)));
    }
    metrics_from_counts(
        before.len(),
        outcome.stats.generated_facts,
        outcome.store.len(),
    )
}

/// The same arithmetic over raw counts.
pub fn metrics_from_counts(
    before: usize,
    generated: usize,
    after: usize,
) -> Result<MaterialisationMetrics> {
    if before == 0 {
        return Err(Error::EmptyStore);
    }
    Ok(MaterialisationMetrics {
        generated_size: Ratio::new(generated as u64, before as u64),
        materialisation_size: Ratio::new(after as u64, before as u64),
    })
}
