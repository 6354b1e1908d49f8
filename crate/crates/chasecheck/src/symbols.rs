//! Global string interner shared by terms, predicates, and rule ids.
//!
//! Constants, variables, predicates, and function symbols live in separate
//! namespaces: the same string may name a predicate and a constant without
//! clash, because the namespace is carried by the enclosing type, not by the
//! interned name itself.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

/// Prefix reserved for machine-generated symbols. The parsers reject
/// identifiers starting with it, which guarantees freshness of everything
/// the transforms invent (skolem functions, summary constants, auxiliary
/// predicates, freeze constants).
pub const RESERVED_PREFIX: &str = "__";

/// An interned string. Copyable, `Eq`/`Ord` by interner id.
///
/// Id order is the order of first interning, which is deterministic for a
/// fixed single-threaded input but not across runs with different inputs;
/// anything user-visible must therefore be ordered by [`Name::as_str`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(u32);

struct NameTable {
    strings: Vec<&'static str>,
    index: HashMap<&'static str, Name>,
}

static NAMES: LazyLock<RwLock<NameTable>> = LazyLock::new(|| {
    RwLock::new(NameTable {
        strings: Vec::new(),
        index: HashMap::new(),
    })
});

impl Name {
    pub fn new(s: &str) -> Name {
        {
            let table = NAMES.read().unwrap();
            if let Some(&n) = table.index.get(s) {
                return n;
            }
        }
        let mut table = NAMES.write().unwrap();
        if let Some(&n) = table.index.get(s) {
            return n;
        }
        // Interned names live for the whole process; leaking keeps `as_str` free.
        let owned: &'static str = Box::leak(s.to_owned().into_boxed_str());
        let id = Name(table.strings.len() as u32);
        table.strings.push(owned);
        table.index.insert(owned, id);
        id
    }

    pub fn as_str(self) -> &'static str {
        NAMES.read().unwrap().strings[self.0 as usize]
    }

    pub fn is_reserved(self) -> bool {
        self.as_str().starts_with(RESERVED_PREFIX)
    }
}

impl std::fmt::Display for Name {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::fmt::Debug for Name {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

/// Monotone counter for generated symbol families (`__f3`, `__q1`, ...).
pub struct FreshCounter {
    next: RwLock<u64>,
}

impl Default for FreshCounter {
    fn default() -> Self {
        Self::new()
    }
}

impl FreshCounter {
    pub const fn new() -> Self {
        FreshCounter {
            next: RwLock::new(1),
        }
    }

    pub fn fresh(&self, prefix: &str) -> Name {
        let mut guard = self.next.write().unwrap();
        let n = *guard;
        *guard += 1;
        Name::new(&format!("{RESERVED_PREFIX}{prefix}{n}"))
    }
}
