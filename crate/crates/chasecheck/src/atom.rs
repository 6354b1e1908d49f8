//! Atoms, predicates, positions, and places.

use crate::symbols::Name;
use crate::term::{Subst, Term};

/// A predicate symbol. Arity is not part of the identity; rule sets and fact
/// stores enforce one arity per symbol when they are built.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pred(pub Name);

impl Pred {
    pub fn new(name: &str) -> Pred {
        Pred(Name::new(name))
    }

    pub fn name(self) -> Name {
        self.0
    }

    /// Universal truth. Written `TOP` in source files.
    pub fn top() -> Pred {
        Pred::new("TOP")
    }

    /// Universal falsehood. Written `BOT` in source files.
    pub fn bot() -> Pred {
        Pred::new("BOT")
    }

    /// The user-level equality predicate; only ever unparsed as `s = t`.
    pub fn equality() -> Pred {
        Pred::new("\u{2248}")
    }

    pub fn is_equality(self) -> bool {
        self == Pred::equality()
    }

    pub fn is_top(self) -> bool {
        self == Pred::top()
    }

    pub fn is_bot(self) -> bool {
        self == Pred::bot()
    }
}

impl std::fmt::Display for Pred {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Debug for Pred {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Pred,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: Pred, args: Vec<Term>) -> Atom {
        Atom { pred, args }
    }

    pub fn equality(lhs: Term, rhs: Term) -> Atom {
        Atom::new(Pred::equality(), vec![lhs, rhs])
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| t.is_ground())
    }

    pub fn is_function_free(&self) -> bool {
        self.args.iter().all(|t| !t.is_functional())
    }

    pub fn apply(&self, subst: &Subst) -> Atom {
        Atom::new(
            self.pred,
            self.args.iter().map(|t| subst.apply(*t)).collect(),
        )
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for t in &self.args {
            t.collect_vars(&mut out);
        }
        out
    }

    /// Maximum term depth over the arguments.
    pub fn max_depth(&self) -> u32 {
        self.args.iter().map(|t| t.depth()).max().unwrap_or(0)
    }
}

impl std::fmt::Display for Atom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pred.is_equality() && self.args.len() == 2 {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Atom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// A predicate-argument slot `P|i`, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub pred: Pred,
    pub index: u32,
}

impl Position {
    pub fn new(pred: Pred, index: u32) -> Position {
        debug_assert!(index >= 1);
        Position { pred, index }
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}|{}", self.pred, self.index)
    }
}

impl std::fmt::Debug for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Which side of a rule an atom occurrence sits on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Side {
    Body,
    Head,
}

/// An atom-occurrence slot: a specific atom in a specific rule together with
/// an argument index (1-based). Head places carry the skolemised atom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    pub rule: usize,
    pub side: Side,
    pub atom_idx: usize,
    pub atom: Atom,
    pub index: u32,
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{}, {}>", self.atom, self.index)
    }
}

impl std::fmt::Debug for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}
