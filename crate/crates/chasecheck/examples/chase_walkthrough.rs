//! Materialise a rule set step by step: skolemise, build the critical
//! instance, run the chase with a trace, and inspect the result.
//!
//! ```bash
//! cargo run --example chase_walkthrough
//! ```

use chasecheck::chase::{chase, ChaseConfig};
use chasecheck::text::parse_rules;
use chasecheck::transform::{critical_instance, skolemise, CriticalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a role round trip: every A-instance gets an R-successor in B, every
    // B-instance one in C, and both concepts flow back along R
    let rules = parse_rules(
        "A(?x1) -> exists ?y1 . R(?x1,?y1), B(?y1) .\n\
         R(?x2,?z1), B(?z1) -> A(?x2) .\n\
         B(?x3) -> exists ?y2 . R(?x3,?y2), C(?y2) .\n\
         C(?x4) -> D(?x4) .\n\
         R(?x5,?z2), D(?z2) -> B(?x5) .",
        "walkthrough.rules",
    )?;
    println!("rules:\n{rules}");

    let (skolemised, witnesses) = skolemise(&rules)?;
    println!("skolemised:\n{skolemised}");
    for ((rule, var), (symbol, arity)) in &witnesses.entries {
        println!("  {rule}: ?{var} -> {symbol}/{arity}");
    }

    // the critical instance: every fact over the rules' own signature and
    // one special constant; universal termination reduces to this start
    let start = critical_instance(&rules, CriticalOptions::default())?;
    println!("\ncritical instance:");
    for fact in start.sorted_strings() {
        println!("  {fact}");
    }

    let cfg = ChaseConfig {
        trace: true,
        ..ChaseConfig::default()
    };
    let outcome = chase(&skolemised, &start, &cfg)?;
    println!("\nfirings:");
    for entry in &outcome.trace {
        println!("  {entry}");
    }
    println!("\nstatus: {:?}", outcome.status);
    println!("facts ({}):", outcome.store.len());
    for fact in outcome.store.sorted_strings() {
        println!("  {fact}");
    }
    println!(
        "steps: {}, max term depth: {}",
        outcome.stats.steps, outcome.stats.max_term_depth
    );
    Ok(())
}
