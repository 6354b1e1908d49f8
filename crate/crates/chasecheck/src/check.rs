//! The single entry point for acyclicity checking: every notion, the
//! dependency combinator, and the four equality-handling strategies, plus
//! the whole-catalogue taxonomy with its containment cross-check.

use std::collections::BTreeMap;

use crate::atom::Atom;
use crate::chase::{chase, ChaseConfig, ChaseStatus};
use crate::deps;
use crate::error::{Error, Result};
use crate::graphs::{self, GraphWitness, NotionOutcome};
use crate::rule::{Marking, RuleSet};
use crate::store::FactStore;
use crate::transform::{
    self, augment_top, critical_instance, eliminate_body_equality, mfa_transform, msa_transform,
    skolemise, CriticalOptions, TopMode,
};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Notion {
    Wa,
    Ja,
    Swa,
    Agrd,
    Fd,
    Ar,
    Ga,
    Msa,
    Mfa,
}

impl Notion {
    pub const ALL: [Notion; 9] = [
        Notion::Wa,
        Notion::Ja,
        Notion::Swa,
        Notion::Agrd,
        Notion::Fd,
        Notion::Ar,
        Notion::Ga,
        Notion::Msa,
        Notion::Mfa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Wa => "wa",
            Notion::Ja => "ja",
            Notion::Swa => "swa",
            Notion::Agrd => "agrd",
            Notion::Fd => "fd",
            Notion::Ar => "ar",
            Notion::Ga => "ga",
            Notion::Msa => "msa",
            Notion::Mfa => "mfa",
        }
    }

    /// Whether the notion tolerates equality atoms without preprocessing.
    pub fn handles_equality(self) -> bool {
        matches!(self, Notion::Wa)
    }
}

impl std::str::FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Notion> {
        Ok(match s {
            "wa" => Notion::Wa,
            "ja" => Notion::Ja,
            "swa" => Notion::Swa,
            "agrd" => Notion::Agrd,
            "fd" => Notion::Fd,
            "ar" => Notion::Ar,
            "ga" => Notion::Ga,
            "msa" => Notion::Msa,
            "mfa" => Notion::Mfa,
            other => {
                return Err(Error::Inapplicable(format!("unknown notion '{other}'")));
            }
        })
    }
}

impl std::fmt::Display for Notion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EqualityMode {
    None,
    Axiomatize,
    SingUnion,
    SingSome,
    SingAll,
}

impl EqualityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EqualityMode::None => "none",
            EqualityMode::Axiomatize => "axiomatize",
            EqualityMode::SingUnion => "sing-union",
            EqualityMode::SingSome => "sing-some",
            EqualityMode::SingAll => "sing-all",
        }
    }
}

impl std::str::FromStr for EqualityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<EqualityMode> {
        Ok(match s {
            "none" => EqualityMode::None,
            "axiomatize" => EqualityMode::Axiomatize,
            "sing-union" => EqualityMode::SingUnion,
            "sing-some" => EqualityMode::SingSome,
            "sing-all" => EqualityMode::SingAll,
            other => {
                return Err(Error::Inapplicable(format!(
                    "unknown equality mode '{other}'"
                )))
            }
        })
    }
}

#[derive(Clone, Debug)]
pub enum Mode {
    Universal,
    Instance(FactStore),
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Universal => "universal",
            Mode::Instance(_) => "instance",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckFlags {
    pub top_mode: TopMode,
    /// Strict reading of the ranking condition: quantify over every body
    /// variable instead of the frontier.
    pub ar_strict: bool,
    /// Critical instance over every rule instead of user-provenance ones.
    pub literal_critical: bool,
    /// Include equality facts in the critical instance.
    pub critical_equality: bool,
    /// Drop the productivity condition from the dependency relation.
    pub weak_deps: bool,
    /// Decide model-faithful acyclicity by deriving the alarm fact instead
    /// of by cyclic-term detection (differential-testing path).
    pub mfa_via_c: bool,
    /// Decide sing-all joint acyclicity via the weak-acyclicity
    /// equivalence on the original rules.
    pub wa_equivalence_shortcut: bool,
}

impl Default for CheckFlags {
    fn default() -> Self {
        CheckFlags {
            top_mode: TopMode::Minimal,
            ar_strict: false,
            literal_critical: false,
            critical_equality: false,
            weak_deps: false,
            mfa_via_c: false,
            wa_equivalence_shortcut: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckRequest {
    pub notion: Notion,
    pub dep: bool,
    pub mode: Mode,
    pub equality: EqualityMode,
    pub chase: ChaseConfig,
    pub flags: CheckFlags,
}

impl CheckRequest {
    pub fn new(notion: Notion) -> CheckRequest {
        CheckRequest {
            notion,
            dep: false,
            mode: Mode::Universal,
            equality: EqualityMode::None,
            chase: ChaseConfig::default(),
            flags: CheckFlags::default(),
        }
    }

    pub fn with_equality(mut self, equality: EqualityMode) -> Self {
        self.equality = equality;
        self
    }

    pub fn with_dep(mut self) -> Self {
        self.dep = true;
        self
    }

    pub fn on_instance(mut self, store: FactStore) -> Self {
        self.mode = Mode::Instance(store);
        self
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Acyclic,
    NotAcyclic,
    Unknown,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Acyclic => "acyclic",
            Outcome::NotAcyclic => "not-acyclic",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    Graph(GraphWitness),
    CyclicTerm { term: String, rule: String },
    AlarmDerived,
    Component { rules: Vec<String> },
    Marking { index: usize, rendered: String },
    MarkingsExhausted { count: usize },
    Limit(String),
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Graph(g) => write!(f, "{g}"),
            Witness::CyclicTerm { term, rule } => {
                write!(f, "cyclic term {term} built by rule {rule}")
            }
            Witness::AlarmDerived => write!(f, "the alarm fact was derived"),
            Witness::Component { rules } => {
                write!(f, "failing dependency component {{{}}}", rules.join(", "))
            }
            Witness::Marking { index, rendered } => {
                write!(f, "marking #{index}: {rendered}")
            }
            Witness::MarkingsExhausted { count } => {
                write!(f, "all {count} reduced markings rejected")
            }
            Witness::Limit(which) => write!(f, "{which} limit exceeded"),
        }
    }
}

#[derive(Clone, Default, Debug)]
pub struct VerdictStats {
    pub facts: Option<usize>,
    pub terms: Option<usize>,
    pub depth: Option<u32>,
    pub steps: Option<usize>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub notion: Notion,
    pub dep: bool,
    pub mode: String,
    pub equality: EqualityMode,
    pub stats: VerdictStats,
}

impl Verdict {
    fn new(outcome: Outcome, witness: Option<Witness>, req: &CheckRequest) -> Verdict {
        Verdict {
            outcome,
            witness,
            notion: req.notion,
            dep: req.dep,
            mode: req.mode.as_str().to_owned(),
            equality: req.equality,
            stats: VerdictStats::default(),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.outcome == Outcome::Acyclic
    }
}

fn from_graph(out: NotionOutcome, req: &CheckRequest) -> Verdict {
    match out.witness {
        None => Verdict::new(Outcome::Acyclic, None, req),
        Some(w) => Verdict::new(Outcome::NotAcyclic, Some(Witness::Graph(w)), req),
    }
}

/// Append one rule set to another and restore variable apartness.
fn combine(base: &RuleSet, extra: RuleSet) -> RuleSet {
    let mut rules = base.rules.clone();
    rules.extend(extra.rules);
    let mut seeds = base.seeds.clone();
    for s in extra.seeds {
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }
    RuleSet { rules, seeds }.standardize_apart()
}

fn alarm_fact() -> Atom {
    Atom::new(transform::c_pred(), vec![])
}

/// Decide one notion on an equality-free (or equality-native) set,
/// without the dependency combinator.
fn dispatch_plain(req: &CheckRequest, set: &RuleSet) -> Result<Verdict> {
    match req.notion {
        Notion::Wa => Ok(from_graph(graphs::wa_check(set)?, req)),
        Notion::Ja => Ok(from_graph(graphs::ja_check(set)?, req)),
        Notion::Swa => Ok(from_graph(graphs::swa_check(set)?, req)),
        Notion::Fd => Ok(from_graph(graphs::fd_check(set)?, req)),
        Notion::Ar => {
            let (out, _) = graphs::ar_check(set, req.flags.ar_strict)?;
            Ok(from_graph(out, req))
        }
        Notion::Ga => Ok(from_graph(graphs::gamma_check(set)?, req)),
        Notion::Agrd => {
            let graph = deps::dependency_graph(set, !req.flags.weak_deps);
            if graph.is_acyclic() {
                Ok(Verdict::new(Outcome::Acyclic, None, req))
            } else {
                let cyclic = graph
                    .partition
                    .iter()
                    .find(|c| c.len() > 1 || graph.self_dependent[c[0]])
                    .map(|c| c.iter().map(|&i| set.rules[i].id.clone()).collect())
                    .unwrap_or_default();
                Ok(Verdict::new(
                    Outcome::NotAcyclic,
                    Some(Witness::Graph(GraphWitness::RuleCycle(cyclic))),
                    req,
                ))
            }
        }
        Notion::Msa | Notion::Mfa => model_check(req, set),
    }
}

/// The model-based checks: transform, resolve equality on the transformed
/// set, make it safe, skolemise, and chase.
fn model_check(req: &CheckRequest, set: &RuleSet) -> Result<Verdict> {
    let summarise = req.notion == Notion::Msa;
    let start_store = match &req.mode {
        Mode::Universal => critical_instance(
            set,
            CriticalOptions {
                literal: req.flags.literal_critical,
                include_equality: req.flags.critical_equality,
            },
        )?,
        Mode::Instance(store) => store.clone(),
    };
    let transformed = if summarise {
        msa_transform(set)?
    } else {
        mfa_transform(set)?
    };
    let resolved = if transformed.contains_equality() {
        let axioms = transform::equality_axioms(&transformed)?;
        transform::demote_equality(&combine(&transformed, axioms))
    } else {
        transformed
    };
    let topped = augment_top(&resolved, req.flags.top_mode)?;
    let (sk, _) = skolemise(&topped)?;

    let mut cfg = req.chase.clone();
    if summarise || req.flags.mfa_via_c {
        cfg.watch_fact = Some(alarm_fact());
    } else {
        // the cyclic term itself is the witness; the alarm closure may fire
        // earlier through equality replacement, so it is not watched here
        cfg.detect_cyclic = true;
        cfg.max_depth = None;
    }
    let outcome = chase(&sk, &start_store, &cfg)?;
    let mut verdict = match &outcome.status {
        ChaseStatus::CyclicTerm { term, rule, .. } => Verdict::new(
            Outcome::NotAcyclic,
            Some(Witness::CyclicTerm {
                term: term.to_string(),
                rule: rule.clone(),
            }),
            req,
        ),
        ChaseStatus::WatchedFact => {
            Verdict::new(Outcome::NotAcyclic, Some(Witness::AlarmDerived), req)
        }
        ChaseStatus::Fixpoint => {
            if outcome.store.contains(&alarm_fact()) {
                Verdict::new(Outcome::NotAcyclic, Some(Witness::AlarmDerived), req)
            } else {
                Verdict::new(Outcome::Acyclic, None, req)
            }
        }
        ChaseStatus::LimitExceeded(kind) => Verdict::new(
            Outcome::Unknown,
            Some(Witness::Limit(kind.to_string())),
            req,
        ),
    };
    verdict.stats = VerdictStats {
        facts: Some(outcome.stats.facts),
        terms: Some(outcome.store.contained_terms().len()),
        depth: Some(outcome.stats.max_term_depth),
        steps: Some(outcome.stats.steps),
        elapsed_ms: outcome.stats.elapsed.as_millis(),
    };
    Ok(verdict)
}

/// Run the notion on a prepared set, applying the dependency combinator
/// when requested.
///
/// Graph notions analyse the top-augmented set: the chase injects the
/// truth-propagation rules whenever the truth predicate occurs (the safe
/// reflexivity axioms of the equality encodings rely on it), so leaving
/// them out would under-approximate how values move. The model-based
/// checks augment internally, after the critical instance is fixed.
fn dispatch(req: &CheckRequest, set: &RuleSet) -> Result<Verdict> {
    let prepared;
    let set = if matches!(req.notion, Notion::Msa | Notion::Mfa) && !req.dep {
        set
    } else {
        // the combinator also needs the propagation rules in its partition:
        // they are what lets one component's facts reach another through
        // the truth predicate
        prepared = augment_top(set, req.flags.top_mode)?;
        &prepared
    };
    if !req.dep || req.notion == Notion::Agrd {
        return dispatch_plain(req, set);
    }
    let graph = deps::dependency_graph(set, !req.flags.weak_deps);
    let mut saw_unknown = None;
    for component in &graph.partition {
        if component.len() == 1 && !graph.self_dependent[component[0]] {
            continue;
        }
        let subset = RuleSet {
            rules: component.iter().map(|&i| set.rules[i].clone()).collect(),
            seeds: set.seeds.clone(),
        };
        let inner = dispatch_plain(req, &subset)?;
        match inner.outcome {
            Outcome::Acyclic => {}
            Outcome::NotAcyclic => {
                return Ok(Verdict::new(
                    Outcome::NotAcyclic,
                    Some(Witness::Component {
                        rules: component.iter().map(|&i| set.rules[i].id.clone()).collect(),
                    }),
                    req,
                ));
            }
            Outcome::Unknown => saw_unknown = inner.witness.clone().or(saw_unknown),
        }
    }
    match saw_unknown {
        Some(w) => Ok(Verdict::new(Outcome::Unknown, Some(w), req)),
        None => Ok(Verdict::new(Outcome::Acyclic, None, req)),
    }
}

fn render_marking(rs: &RuleSet, m: &Marking) -> String {
    let mut parts = Vec::new();
    for (rule, rm) in rs.rules.iter().zip(&m.per_rule) {
        for (v, (ai, pi)) in rm {
            if rule
                .body
                .iter()
                .map(|a| a.args.iter().filter(|t| *t == v).count())
                .sum::<usize>()
                > 1
            {
                parts.push(format!("{}:{}@{}[{}]", rule.id, v, rule.body[*ai], pi + 1));
            }
        }
    }
    parts.join(", ")
}

/// Check a rule set against one acyclicity notion.
pub fn check(req: &CheckRequest, rs: &RuleSet) -> Result<Verdict> {
    let has_eq = rs.contains_equality();
    if has_eq && req.equality == EqualityMode::None && !req.notion.handles_equality() {
        return Err(Error::Inapplicable(format!(
            "{} needs equality-free input; pick an equality handling mode",
            req.notion
        )));
    }
    if matches!(req.mode, Mode::Instance(_)) && !matches!(req.notion, Notion::Msa | Notion::Mfa) {
        return Err(Error::Inapplicable(format!(
            "{} is instance-independent; use universal mode",
            req.notion
        )));
    }
    let rs1 = eliminate_body_equality(rs)?;
    match req.equality {
        EqualityMode::None => dispatch(req, &rs1),
        EqualityMode::Axiomatize => {
            if matches!(req.notion, Notion::Msa | Notion::Mfa) && !req.dep {
                // the axioms are instantiated over the transformed set
                // inside model_check, so replacement covers the tracking
                // predicates
                dispatch(req, &rs1)
            } else {
                // with the combinator, the partition must see the
                // replacement rules as first-class rules: equality lets one
                // component enable another, which the dependency relation
                // over inert equality atoms cannot express
                let set = if rs1.contains_equality() {
                    let axioms = transform::equality_axioms(&rs1)?;
                    transform::demote_equality(&combine(&rs1, axioms))
                } else {
                    rs1.clone()
                };
                dispatch(req, &set)
            }
        }
        EqualityMode::SingUnion => {
            let set = transform::sing_union(&rs1)?;
            dispatch(req, &set)
        }
        EqualityMode::SingSome | EqualityMode::SingAll => {
            let want_all = req.equality == EqualityMode::SingAll;
            if want_all && req.notion == Notion::Ja && req.flags.wa_equivalence_shortcut && !req.dep
            {
                // equivalent to weak acyclicity of the original rules
                let wa = graphs::wa_check(&rs1)?;
                return Ok(match wa.witness {
                    None => Verdict::new(Outcome::Acyclic, None, req),
                    Some(w) => Verdict::new(Outcome::NotAcyclic, Some(Witness::Graph(w)), req),
                });
            }
            let rewritten = transform::rewrite_existential_equalities(&rs1)?;
            let mut saw_unknown = false;
            let mut count = 0usize;
            for (idx, marking) in transform::enumerate_markings(&rs1, true)?.enumerate() {
                count += 1;
                let set = transform::singularise(&rs1, &marking)?;
                let inner = dispatch(req, &set)?;
                match (inner.outcome, want_all) {
                    (Outcome::Acyclic, false) => {
                        let mut v = inner;
                        v.equality = req.equality;
                        v.witness = Some(Witness::Marking {
                            index: idx + 1,
                            rendered: render_marking(&rewritten, &marking),
                        });
                        return Ok(v);
                    }
                    (Outcome::NotAcyclic, true) => {
                        let mut v = inner;
                        v.equality = req.equality;
                        v.witness = Some(Witness::Marking {
                            index: idx + 1,
                            rendered: render_marking(&rewritten, &marking),
                        });
                        return Ok(v);
                    }
                    (Outcome::Unknown, _) => saw_unknown = true,
                    _ => {}
                }
            }
            if saw_unknown {
                Ok(Verdict::new(
                    Outcome::Unknown,
                    Some(Witness::Limit("marking".into())),
                    req,
                ))
            } else if want_all {
                Ok(Verdict::new(Outcome::Acyclic, None, req))
            } else {
                Ok(Verdict::new(
                    Outcome::NotAcyclic,
                    Some(Witness::MarkingsExhausted { count }),
                    req,
                ))
            }
        }
    }
}

// ----------------------------------------------------------------- taxonomy

/// Containments between notions: if the left is acyclic, the right must be.
/// Entries name taxonomy keys (`+dep` marks the combinator variant).
pub const LATTICE: [(&str, &str); 14] = [
    ("wa", "fd"),
    ("fd", "ar"),
    ("ar", "ja"),
    ("ja", "swa"),
    ("swa", "msa"),
    ("msa", "mfa"),
    ("agrd", "ga"),
    ("fd", "ga"),
    ("ga+dep", "ar+dep"),
    ("mfa+dep", "mfa"),
    // the combinator only widens a notion
    ("wa", "wa+dep"),
    ("fd", "fd+dep"),
    ("ja", "ja+dep"),
    ("mfa", "mfa+dep"),
];

#[derive(Clone, Debug)]
pub struct Taxonomy {
    pub verdicts: BTreeMap<String, Verdict>,
    pub violations: Vec<String>,
}

/// Run every applicable notion (plain and combinator variants) and check
/// the containment lattice between the resulting verdicts.
pub fn taxonomy(
    rs: &RuleSet,
    equality: EqualityMode,
    chase: &ChaseConfig,
    flags: &CheckFlags,
) -> Result<Taxonomy> {
    let has_eq = rs.contains_equality();
    let mut verdicts = BTreeMap::new();
    for notion in Notion::ALL {
        for dep in [false, true] {
            if notion == Notion::Agrd && dep {
                continue;
            }
            if has_eq && equality == EqualityMode::None && !notion.handles_equality() {
                continue;
            }
            let req = CheckRequest {
                notion,
                dep,
                mode: Mode::Universal,
                equality,
                chase: chase.clone(),
                flags: flags.clone(),
            };
            let key = if dep {
                format!("{notion}+dep")
            } else {
                notion.to_string()
            };
            verdicts.insert(key, check(&req, rs)?);
        }
    }
    let mut violations = Vec::new();
    for (lo, hi) in LATTICE {
        let (Some(a), Some(b)) = (verdicts.get(lo), verdicts.get(hi)) else {
            continue;
        };
        if a.outcome == Outcome::Acyclic && b.outcome == Outcome::NotAcyclic {
            violations.push(format!("{lo} acyclic but {hi} not-acyclic"));
        }
    }
    // the combinator never loses a plain verdict, and the model-faithful
    // check absorbs its own combinator
    for notion in Notion::ALL {
        let plain = verdicts.get(notion.as_str());
        let combined = verdicts.get(&format!("{notion}+dep"));
        if let (Some(p), Some(c)) = (plain, combined) {
            if p.outcome == Outcome::Acyclic && c.outcome == Outcome::NotAcyclic {
                violations.push(format!("{notion} acyclic but {notion}+dep not-acyclic"));
            }
        }
    }
    if let (Some(agrd), Some(_)) = (verdicts.get("agrd"), verdicts.get("wa+dep")) {
        if agrd.outcome == Outcome::Acyclic {
            for notion in Notion::ALL {
                if let Some(c) = verdicts.get(&format!("{notion}+dep")) {
                    if c.outcome == Outcome::NotAcyclic {
                        violations.push(format!("agrd acyclic but {notion}+dep not-acyclic"));
                    }
                }
            }
        }
    }
    Ok(Taxonomy {
        verdicts,
        violations,
    })
}
