//! Run the whole catalogue of termination checks over a few rule sets and
//! print the verdict table, including the dependency-combinator variants.
//!
//! ```bash
//! cargo run --example acyclicity_taxonomy
//! ```

use chasecheck::chase::ChaseConfig;
use chasecheck::check::{taxonomy, CheckFlags, EqualityMode};
use chasecheck::text::parse_rules;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sets = [
        (
            "role round trip (model-based notions only)",
            "A(?x1) -> exists ?y1 . R(?x1,?y1), B(?y1) .\n\
             R(?x2,?z1), B(?z1) -> A(?x2) .\n\
             B(?x3) -> exists ?y2 . R(?x3,?y2), C(?y2) .\n\
             C(?x4) -> D(?x4) .\n\
             R(?x5,?z2), D(?z2) -> B(?x5) .",
        ),
        (
            "repeated-variable guard (place covering sees it)",
            "A(?x1) -> exists ?y . R(?x1,?y), R(?y,?x1), R(?x1,?x1) .\n\
             R(?x2,?x2) -> B(?x2) .\n\
             B(?x3) -> A(?x3) .",
        ),
        (
            "guarded feedback (finite positions beat the position graph)",
            "R(?z,?x), A(?x) -> exists ?y . S(?x,?y) .\n\
             S(?x1,?x2) -> R(?x1,?x2) .",
        ),
        (
            "two reflexive loops (only the component split rescues it)",
            "R(?x1,?x1) -> exists ?y1, ?y2 . A(?x1), S(?y1,?x1), S(?x1,?y2) .\n\
             A(?x2) -> B(?x2) .\n\
             B(?x3) -> R(?x3,?x3) .\n\
             S(?x4,?x4) -> exists ?y3, ?y4 . C(?x4), R(?y3,?x4), R(?x4,?y4) .\n\
             C(?x5) -> D(?x5) .\n\
             D(?x6) -> S(?x6,?x6) .",
        ),
    ];
    for (label, text) in sets {
        let rules = parse_rules(text, "taxonomy.rules")?;
        println!("== {label}\n{rules}");
        let tax = taxonomy(
            &rules,
            EqualityMode::None,
            &ChaseConfig::default(),
            &CheckFlags::default(),
        )?;
        for (notion, verdict) in &tax.verdicts {
            let witness = verdict
                .witness
                .as_ref()
                .map(|w| format!("  [{w}]"))
                .unwrap_or_default();
            println!("  {notion:<8} {}{witness}", verdict.outcome.as_str());
        }
        assert!(tax.violations.is_empty());
        println!();
    }
    Ok(())
}
