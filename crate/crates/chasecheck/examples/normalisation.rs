//! Head and body normalisation: splitting conjunctions behind fresh
//! predicates can make a rule set acyclic (the skolem witness depends on
//! fewer variables) — and, applied carelessly, can also endanger it.
//!
//! ```bash
//! cargo run --example normalisation
//! ```

use chasecheck::check::{check, CheckRequest, Notion};
use chasecheck::rule::RuleSet;
use chasecheck::text::parse_rules;
use chasecheck::transform::{critical_instance, Normaliser};

fn verdict(rules: &RuleSet, notion: Notion) -> &'static str {
    check(&CheckRequest::new(notion), rules)
        .map(|v| v.outcome.as_str())
        .unwrap_or("error")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // the head atoms share no variables, so the invented value never needs
    // to depend on x; the split makes that explicit
    let tangled = parse_rules("A(?x) -> exists ?y . B(?x), A(?y) .", "n1.rules")?;
    println!("before:\n{tangled}");
    println!("faithful check: {}", verdict(&tangled, Notion::Mfa));

    let mut norm = Normaliser::new(false);
    let (replaced, companion) = norm.head_step(&tangled.rules[0], &[1])?;
    let split = RuleSet::new(vec![replaced, companion.unwrap()]).standardize_apart();
    println!("\nafter pulling the second head atom behind a bridge:\n{split}");
    println!("faithful check: {}", verdict(&split, Notion::Mfa));
    println!("joint acyclicity: {}", verdict(&split, Notion::Ja));

    // the converse: splitting a chain across two rules is harmless only
    // because the bridge predicate cannot occur in input instances
    let chain = parse_rules(
        "C(?z), R(?z,?x), B(?x) -> exists ?y1, ?y2 . R(?x,?y1), R(?y1,?y2), B(?y2) .",
        "n2.rules",
    )?;
    println!("\na two-step chain in one rule:\n{chain}");
    println!("faithful check: {}", verdict(&chain, Notion::Mfa));

    let mut norm = Normaliser::new(false);
    let (replaced, companion) = norm.head_step(&chain.rules[0], &[1, 2])?;
    let split = RuleSet::new(vec![replaced, companion.unwrap()]).standardize_apart();
    println!("\nsplit behind a generated bridge:\n{split}");
    println!("faithful check: {}", verdict(&split, Notion::Mfa));
    let critical = critical_instance(&split, Default::default())?;
    println!(
        "critical instance (no bridge facts): {}",
        critical.sorted_strings().join(", ")
    );

    // spelling the same bridge as an ordinary user predicate changes the
    // verdict, because inputs may now mention it
    let user_bridge = parse_rules(
        "C(?z), R(?z,?x), B(?x) -> exists ?y1 . R(?x,?y1), Q(?y1) .\n\
         Q(?y) -> exists ?y2 . R(?y,?y2), B(?y2) .",
        "n3.rules",
    )?;
    println!("\nthe same split with a user-visible bridge:\n{user_bridge}");
    println!("faithful check: {}", verdict(&user_bridge, Notion::Mfa));
    let critical = critical_instance(&user_bridge, Default::default())?;
    println!(
        "critical instance now seeds the bridge: {}",
        critical.sorted_strings().join(", ")
    );

    // structure sharing reuses one bridge for isomorphic conjunctions
    let pair = parse_rules(
        "A(?x) -> exists ?y . R(?x,?y), B(?y), A(?x) .\n\
         C(?x2) -> exists ?y2 . R(?x2,?y2), B(?y2), C(?x2) .",
        "n4.rules",
    )?;
    let mut sharing = Normaliser::new(true);
    let (r1, c1) = sharing.head_step(&pair.rules[0], &[0, 1])?;
    let (r2, c2) = sharing.head_step(&pair.rules[1], &[0, 1])?;
    println!("\nstructure sharing:");
    println!("  {r1}");
    println!("  {r2}");
    println!(
        "  first split defines {}; second reuses it: {}",
        c1.map(|r| r.to_string()).unwrap_or_default(),
        c2.is_none()
    );
    Ok(())
}
