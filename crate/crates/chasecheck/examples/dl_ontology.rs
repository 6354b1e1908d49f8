//! Translate a Horn ontology into rules, check termination, and
//! materialise it over a small data set.
//!
//! ```bash
//! cargo run --example dl_ontology
//! ```

use chasecheck::chase::{chase, materialisation_metrics, ontology_depth, ChaseConfig};
use chasecheck::check::{check, CheckRequest, EqualityMode, Notion};
use chasecheck::text::{parse_dl_axioms, parse_facts};
use chasecheck::transform::{
    augment_top, demote_equality, dl_translate, eliminate_body_equality, equality_axioms,
    skolemise, TopMode,
};

const ONTOLOGY: &str = "\
Person subclassof some hasParent Ancestor
Person subclassof max1 hasFather Man
Man and Parent subclassof Father
Orphan subclassof all hasParent Deceased
hasFather subpropertyof hasParent
inv(hasParent) subpropertyof hasChild
hasParent o hasParent subpropertyof hasAncestor
Universe subclassof one world";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let axioms = parse_dl_axioms(ONTOLOGY, "family.dlx")?;
    println!("{} axioms:", axioms.len());
    for a in &axioms {
        println!("  type {}: {a:?}", a.axiom_type());
    }

    let rules = dl_translate(&axioms)?;
    println!("\ntranslated rules:\n{rules}");

    for notion in [Notion::Msa, Notion::Mfa, Notion::Ja] {
        let verdict = check(
            &CheckRequest::new(notion).with_equality(EqualityMode::Axiomatize),
            &rules,
        )?;
        println!("{notion}: {}", verdict.outcome.as_str());
    }

    // materialise over concrete individuals
    let data = parse_facts(
        "Person(alice). Person(bob). hasFather(alice,bob). Man(bob). Parent(bob).",
        "family.facts",
    )?;
    let prepared = eliminate_body_equality(&rules)?;
    let resolved = {
        let axioms = equality_axioms(&prepared)?;
        let mut all = prepared.rules.clone();
        all.extend(axioms.rules);
        demote_equality(
            &chasecheck::rule::RuleSet {
                rules: all,
                seeds: prepared.seeds.clone(),
            }
            .standardize_apart(),
        )
    };
    let topped = augment_top(&resolved, TopMode::Minimal)?;
    let (skolemised, _) = skolemise(&topped)?;
    let outcome = chase(&skolemised, &data, &ChaseConfig::default())?;
    println!("\nmaterialisation ({:?}):", outcome.status);
    for fact in outcome.store.sorted_strings() {
        if !fact.starts_with("__") && !fact.starts_with("TOP") {
            println!("  {fact}");
        }
    }
    println!("ontology depth: {}", ontology_depth(&outcome)?);
    let metrics = materialisation_metrics(&data, &outcome)?;
    println!(
        "generated size: {} ({:.3}), materialisation size: {} ({:.3})",
        metrics.generated_size,
        metrics.generated_size.to_f64(),
        metrics.materialisation_size,
        metrics.materialisation_size.to_f64()
    );
    Ok(())
}
