//! Equality handling: explicit axiomatisation makes this set diverge, while
//! singularisation under the right marking tames it. Shows the marking
//! enumeration, the per-marking verdicts, and the some/all/union modes.
//!
//! ```bash
//! cargo run --example equality_singularisation
//! ```

use chasecheck::check::{check, CheckRequest, EqualityMode, Notion};
use chasecheck::graphs::ja_check;
use chasecheck::text::parse_rules;
use chasecheck::transform::{eliminate_body_equality, enumerate_markings, sing_union, singularise};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // functionality merges every invented value with its parent, reviving
    // the generating rule over and over
    let rules = parse_rules(
        "A(?x), B(?x) -> exists ?y . R(?x,?y), B(?y) .\n\
         R(?z,?x1), R(?z,?x2) -> ?x1 = ?x2 .",
        "equality.rules",
    )?;
    println!("rules:\n{rules}");

    let axiomatised = check(
        &CheckRequest::new(Notion::Mfa).with_equality(EqualityMode::Axiomatize),
        &rules,
    )?;
    println!(
        "faithful check with explicit equality axioms: {}",
        axiomatised.outcome.as_str()
    );
    if let Some(w) = &axiomatised.witness {
        println!("  witness: {w}");
    }

    // singularisation replaces equality by an explicit predicate and
    // de-aliases unmarked occurrences; the marking choice matters
    let prepared = eliminate_body_equality(&rules)?;
    println!("\nreduced markings and their singularisations:");
    for (i, marking) in enumerate_markings(&prepared, true)?.enumerate() {
        let sung = singularise(&prepared, &marking)?;
        let ja = ja_check(&chasecheck::transform::augment_top(
            &sung,
            chasecheck::transform::TopMode::Minimal,
        )?)?;
        println!("-- marking #{}:", i + 1);
        for rule in &sung.rules {
            println!("   {rule}");
        }
        println!(
            "   jointly acyclic: {}",
            if ja.acyclic { "yes" } else { "no" }
        );
    }

    for mode in [
        EqualityMode::SingSome,
        EqualityMode::SingAll,
        EqualityMode::SingUnion,
    ] {
        let verdict = check(&CheckRequest::new(Notion::Mfa).with_equality(mode), &rules)?;
        print!(
            "faithful check, {}: {}",
            mode.as_str(),
            verdict.outcome.as_str()
        );
        match &verdict.witness {
            Some(w) => println!("  ({w})"),
            None => println!(),
        }
    }

    let union = sing_union(&prepared)?;
    println!("\nthe union singularisation (one copy per relevant marking):");
    for rule in &union.rules {
        println!("  {rule}");
    }
    Ok(())
}
