//! Hash-consed terms with cached depth, function-symbol sets, and cyclicity.
//!
//! Every term is interned exactly once, so `Term` is a copyable handle and
//! structural equality coincides with handle equality. The caches make the
//! two operations the chase performs on every derived term cheap:
//! `depth` is a field read, and cyclicity of `f(args)` is decided at
//! construction from the argument caches alone.

use std::collections::{BTreeMap, HashMap};
use std::sync::{LazyLock, RwLock};

use crate::symbols::Name;

/// A handle into the global term store.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(u32);

/// The shape of a term: constant, variable, or function application.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TermKind {
    Const(Name),
    Var(Name),
    /// Function applications only ever arise from skolemisation; source
    /// rules and instances are function-free.
    Fun(Name, Vec<Term>),
}

struct TermData {
    kind: TermKind,
    depth: u32,
    /// Function symbols occurring anywhere in the term, sorted by id.
    fn_syms: Vec<Name>,
    cyclic: bool,
    has_var: bool,
}

struct TermStore {
    data: Vec<TermData>,
    index: HashMap<TermKind, Term>,
}

static TERMS: LazyLock<RwLock<TermStore>> = LazyLock::new(|| {
    RwLock::new(TermStore {
        data: Vec::new(),
        index: HashMap::new(),
    })
});

fn intern(kind: TermKind) -> Term {
    {
        let store = TERMS.read().unwrap();
        if let Some(&t) = store.index.get(&kind) {
            return t;
        }
    }
    let mut store = TERMS.write().unwrap();
    if let Some(&t) = store.index.get(&kind) {
        return t;
    }
    let data = match &kind {
        TermKind::Const(_) => TermData {
            kind: kind.clone(),
            depth: 0,
            fn_syms: Vec::new(),
            cyclic: false,
            has_var: false,
        },
        TermKind::Var(_) => TermData {
            kind: kind.clone(),
            depth: 0,
            fn_syms: Vec::new(),
            cyclic: false,
            has_var: true,
        },
        TermKind::Fun(f, args) => {
            let mut depth = 0;
            let mut fn_syms: Vec<Name> = Vec::new();
            let mut cyclic = false;
            let mut has_var = false;
            for a in args {
                let ad = &store.data[a.0 as usize];
                depth = depth.max(ad.depth);
                cyclic = cyclic || ad.cyclic || ad.fn_syms.binary_search(f).is_ok();
                has_var = has_var || ad.has_var;
                for s in &ad.fn_syms {
                    if let Err(pos) = fn_syms.binary_search(s) {
                        fn_syms.insert(pos, *s);
                    }
                }
            }
            if let Err(pos) = fn_syms.binary_search(f) {
                fn_syms.insert(pos, *f);
            }
            TermData {
                kind: kind.clone(),
                depth: depth + 1,
                fn_syms,
                cyclic,
                has_var,
            }
        }
    };
    let id = Term(store.data.len() as u32);
    store.data.push(data);
    store.index.insert(kind, id);
    id
}

impl Term {
    pub fn constant(name: &str) -> Term {
        intern(TermKind::Const(Name::new(name)))
    }

    pub fn constant_name(name: Name) -> Term {
        intern(TermKind::Const(name))
    }

    pub fn var(name: &str) -> Term {
        intern(TermKind::Var(Name::new(name)))
    }

    pub fn var_name(name: Name) -> Term {
        intern(TermKind::Var(name))
    }

    pub fn fun(name: Name, args: Vec<Term>) -> Term {
        intern(TermKind::Fun(name, args))
    }

    pub fn kind(self) -> TermKind {
        TERMS.read().unwrap().data[self.0 as usize].kind.clone()
    }

    /// dep(t): 0 for constants and variables, 1 + max child depth otherwise.
    pub fn depth(self) -> u32 {
        TERMS.read().unwrap().data[self.0 as usize].depth
    }

    /// True iff some subterm `f(..)` has a proper subterm with the same `f`.
    pub fn is_cyclic(self) -> bool {
        TERMS.read().unwrap().data[self.0 as usize].cyclic
    }

    /// Function symbols occurring anywhere in the term.
    pub fn fn_symbols(self) -> Vec<Name> {
        TERMS.read().unwrap().data[self.0 as usize].fn_syms.clone()
    }

    pub fn is_var(self) -> bool {
        matches!(
            TERMS.read().unwrap().data[self.0 as usize].kind,
            TermKind::Var(_)
        )
    }

    pub fn is_const(self) -> bool {
        matches!(
            TERMS.read().unwrap().data[self.0 as usize].kind,
            TermKind::Const(_)
        )
    }

    pub fn is_functional(self) -> bool {
        matches!(
            TERMS.read().unwrap().data[self.0 as usize].kind,
            TermKind::Fun(..)
        )
    }

    pub fn is_ground(self) -> bool {
        !TERMS.read().unwrap().data[self.0 as usize].has_var
    }

    /// The name of a constant or variable; panics on function applications.
    pub fn name(self) -> Name {
        match self.kind() {
            TermKind::Const(n) | TermKind::Var(n) => n,
            TermKind::Fun(..) => panic!("name() on functional term"),
        }
    }

    /// Variables occurring in the term, in first-occurrence order.
    pub fn collect_vars(self, out: &mut Vec<Term>) {
        match self.kind() {
            TermKind::Var(_) => {
                if !out.contains(&self) {
                    out.push(self);
                }
            }
            TermKind::Const(_) => {}
            TermKind::Fun(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Constants occurring anywhere in the term.
    pub fn collect_consts(self, out: &mut Vec<Term>) {
        match self.kind() {
            TermKind::Const(_) => {
                if !out.contains(&self) {
                    out.push(self);
                }
            }
            TermKind::Var(_) => {}
            TermKind::Fun(_, args) => {
                for a in args {
                    a.collect_consts(out);
                }
            }
        }
    }

    /// All subterms including the term itself.
    pub fn subterms(self) -> Vec<Term> {
        let mut out = Vec::new();
        fn walk(t: Term, out: &mut Vec<Term>) {
            if out.contains(&t) {
                return;
            }
            out.push(t);
            if let TermKind::Fun(_, args) = t.kind() {
                for a in args {
                    walk(a, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind() {
            TermKind::Const(n) => write!(f, "{n}"),
            TermKind::Var(n) => write!(f, "?{n}"),
            TermKind::Fun(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl std::fmt::Debug for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// A substitution from variables to terms. Ordered so displays and
/// deterministic enumeration orders come out stable.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Subst {
    map: BTreeMap<Term, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn bind(&mut self, var: Term, term: Term) {
        debug_assert!(var.is_var());
        self.map.insert(var, term);
    }

    pub fn get(&self, var: Term) -> Option<Term> {
        self.map.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Term, Term)> + '_ {
        self.map.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, t: Term) -> Term {
        match t.kind() {
            TermKind::Var(_) => self.get(t).unwrap_or(t),
            TermKind::Const(_) => t,
            TermKind::Fun(f, args) => {
                Term::fun(f, args.into_iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// Apply repeatedly until fixpoint; needed after unification, where
    /// bindings may chain through each other.
    pub fn apply_deep(&self, t: Term) -> Term {
        match t.kind() {
            TermKind::Var(_) => match self.get(t) {
                Some(u) if u != t => self.apply_deep(u),
                _ => t,
            },
            TermKind::Const(_) => t,
            TermKind::Fun(f, args) => {
                Term::fun(f, args.into_iter().map(|a| self.apply_deep(a)).collect())
            }
        }
    }
}

impl std::fmt::Display for Subst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // sorted by variable name, not interner id
        let mut entries: Vec<(String, String)> = self
            .map
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        entries.sort();
        write!(f, "{{")?;
        for (i, (k, v)) in entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(args: Vec<Term>) -> Term {
        Term::fun(Name::new("__tf"), args)
    }
    fn g(args: Vec<Term>) -> Term {
        Term::fun(Name::new("__tg"), args)
    }

    #[test]
    fn depth_base_cases() {
        assert_eq!(Term::constant("a").depth(), 0);
        assert_eq!(Term::var("x").depth(), 0);
        assert_eq!(f(vec![Term::constant("a")]).depth(), 1);
        assert_eq!(f(vec![g(vec![Term::constant("*")])]).depth(), 2);
    }

    #[test]
    fn cyclic_detection() {
        let star = Term::constant("*");
        assert!(!star.is_cyclic());
        let gf = g(vec![f(vec![star])]);
        assert!(!gf.is_cyclic());
        let fgf = f(vec![gf]);
        assert!(fgf.is_cyclic());
    }

    #[test]
    fn interning_gives_handle_equality() {
        let t1 = f(vec![Term::constant("a"), Term::var("x")]);
        let t2 = f(vec![Term::constant("a"), Term::var("x")]);
        assert_eq!(t1, t2);
    }

    #[test]
    fn subst_application() {
        let x = Term::var("x");
        let a = Term::constant("a");
        let mut s = Subst::new();
        s.bind(x, a);
        assert_eq!(s.apply(f(vec![x, x])), f(vec![a, a]));
        assert_eq!(s.apply(Term::var("y")), Term::var("y"));
    }

    /// Brute-force recomputation of the cached quantities.
    fn depth_oracle(t: Term) -> u32 {
        match t.kind() {
            TermKind::Const(_) | TermKind::Var(_) => 0,
            TermKind::Fun(_, args) => 1 + args.iter().map(|a| depth_oracle(*a)).max().unwrap_or(0),
        }
    }

    fn cyclic_oracle(t: Term) -> bool {
        // enumerate all (subterm, proper subterm) pairs
        for s in t.subterms() {
            if let TermKind::Fun(fs, _) = s.kind() {
                for u in s.subterms() {
                    if u != s {
                        if let TermKind::Fun(us, _) = u.kind() {
                            if us == fs {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn arb_term() -> impl proptest::strategy::Strategy<Value = Term> {
        use proptest::prelude::*;
        let leaf = prop_oneof![
            (0u32..3).prop_map(|i| Term::constant(&format!("pc{i}"))),
            (0u32..3).prop_map(|i| Term::var(&format!("pv{i}"))),
        ];
        leaf.prop_recursive(8, 64, 3, |inner| {
            ((0u32..4), proptest::collection::vec(inner, 1..3))
                .prop_map(|(f, args)| Term::fun(Name::new(&format!("__pf{f}")), args))
        })
    }

    proptest::proptest! {
        /// The constructor caches agree with from-scratch recomputation.
        #[test]
        fn caches_match_recomputation(t in arb_term()) {
            proptest::prop_assert_eq!(t.depth(), depth_oracle(t));
            proptest::prop_assert_eq!(t.is_cyclic(), cyclic_oracle(t));
            let mut syms = std::collections::BTreeSet::new();
            fn collect(t: Term, out: &mut std::collections::BTreeSet<Name>) {
                if let TermKind::Fun(f, args) = t.kind() {
                    out.insert(f);
                    for a in args {
                        collect(a, out);
                    }
                }
            }
            collect(t, &mut syms);
            let cached: std::collections::BTreeSet<Name> = t.fn_symbols().into_iter().collect();
            proptest::prop_assert_eq!(cached, syms);
        }
    }

    fn random_term(seed: &mut u64, depth: u32) -> Term {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let pick = (*seed >> 33) % 10;
        if depth == 0 || pick < 3 {
            if pick.is_multiple_of(2) {
                Term::constant(&format!("c{}", pick % 3))
            } else {
                Term::var(&format!("v{}", pick % 3))
            }
        } else {
            let sym = Name::new(&format!("__h{}", (*seed >> 17) % 4));
            let arity = 1 + ((*seed >> 11) % 2) as usize;
            let args = (0..arity).map(|_| random_term(seed, depth - 1)).collect();
            Term::fun(sym, args)
        }
    }

    #[test]
    fn cached_values_match_oracles() {
        let mut seed = 0x5eed;
        for _ in 0..2000 {
            let t = random_term(&mut seed, 8);
            assert_eq!(t.depth(), depth_oracle(t), "depth mismatch for {t}");
            assert_eq!(
                t.is_cyclic(),
                cyclic_oracle(t),
                "cyclicity mismatch for {t}"
            );
        }
    }
}
