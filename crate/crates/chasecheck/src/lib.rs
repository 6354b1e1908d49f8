//! Termination analysis and materialisation for existential rules.
//!
//! Existential rules (tuple-generating dependencies) extend datalog with
//! existentially quantified head variables. Applying them bottom-up — the
//! skolem chase — need not terminate, so this crate implements the standard
//! catalogue of sufficient *acyclicity* conditions plus the model-based ones
//! (MFA, MSA), equality handling via axiomatisation or singularisation, a
//! translation from Horn description-logic axioms, and conjunctive-query
//! answering over the materialised chase.
//!
//! The main entry points:
//!
//! - [`text`] parses `.rules`, `.facts`, `.query`, and `.dlx` files;
//! - [`check::check`] decides one acyclicity notion for one rule set;
//! - [`check::taxonomy`] runs the whole catalogue and cross-checks the
//!   known containments between notions;
//! - [`chase::chase`] materialises a fact store;
//! - [`query::answer`] computes certain answers over the materialisation.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the `chasecheck` binary for the command-line surface.
//!
//! ```
//! use chasecheck::chase::ChaseConfig;
//! use chasecheck::check::{check, CheckRequest, Notion, Outcome};
//! use chasecheck::query::{answer, Answers, QueryEquality};
//! use chasecheck::text::{parse_facts, parse_query, parse_rules};
//!
//! # fn main() -> chasecheck::Result<()> {
//! let rules = parse_rules(
//!     "Employee(?x) -> exists ?t . worksFor(?x,?t), Team(?t) .",
//!     "org.rules",
//! )?;
//!
//! // every notion in the catalogue accepts this set
//! let verdict = check(&CheckRequest::new(Notion::Mfa), &rules)?;
//! assert_eq!(verdict.outcome, Outcome::Acyclic);
//!
//! // so conjunctive queries can be answered by materialisation
//! let data = parse_facts("Employee(ada).", "org.facts")?;
//! let query = parse_query("ask exists ?t . worksFor(ada,?t) .", "org.query")?;
//! let answers = answer(&rules, &data, &query, &QueryEquality::None, &ChaseConfig::default())?;
//! assert!(answers.holds());
//! # Ok(())
//! # }
//! ```

pub mod atom;
pub mod chase;
pub mod check;
pub mod cli;
pub mod deps;
pub mod error;
pub mod graphs;
pub mod query;
pub mod rule;
pub mod store;
pub mod symbols;
pub mod term;
pub mod text;
pub mod transform;
pub mod unify;

pub use atom::{Atom, Place, Position, Pred, Side};
pub use error::{Error, Result, SourceSpan};
pub use rule::{Marking, Provenance, Rule, RuleSet};
pub use store::FactStore;
pub use term::{Subst, Term, TermKind};
