//! The rule dependency relation: which rule can newly enable which, the
//! strongly connected decomposition, and the per-component combinator that
//! widens every notion.
//!
//! ```bash
//! cargo run --example rule_dependencies
//! ```

use chasecheck::check::{check, CheckRequest, Notion};
use chasecheck::deps::{dependency_graph, rule_depends};
use chasecheck::text::parse_rules;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // the reflexive join in the first rule never re-enables itself, and the
    // productivity condition also keeps the third rule from enabling it
    let rules = parse_rules(
        "R(?x1,?x1), U(?x1,?z), U(?x2,?z) -> R(?x1,?x2) .\n\
         R(?z3,?x3) -> exists ?y3 . T(?x3,?y3) .\n\
         T(?z4,?x4) -> exists ?y4 . U(?x4,?y4) .",
        "deps.rules",
    )?;
    println!("rules:\n{rules}");

    println!("dependency witnesses:");
    for r1 in &rules.rules {
        for r2 in &rules.rules {
            match rule_depends(r1, r2, true) {
                Some(witness) => println!("  {} -> {}  via {witness}", r1.id, r2.id),
                None => println!("  {} -/> {}", r1.id, r2.id),
            }
        }
    }

    let graph = dependency_graph(&rules, true);
    println!("\ncondensation (topological): {:?}", graph.partition);
    println!("dependency-acyclic: {}", graph.is_acyclic());
    println!("\n{}", graph.to_dot(&rules));

    // the relation is strictly finer than the summarising model check:
    // the same set alarms under the constant summary
    let msa = check(&CheckRequest::new(Notion::Msa), &rules)?;
    println!("summarising check: {}", msa.outcome.as_str());
    let mfa = check(&CheckRequest::new(Notion::Mfa), &rules)?;
    println!("faithful check:    {}", mfa.outcome.as_str());

    // and the combinator lets a weak notion profit from the split: these
    // two rules form one dependency cycle, but the component is finitely
    // bounded even though the plain position graph rejects it
    let guarded = parse_rules(
        "R(?z,?x), A(?x) -> exists ?y . S(?x,?y) .\n\
         S(?x1,?x2) -> R(?x1,?x2) .",
        "guarded.rules",
    )?;
    let wa = check(&CheckRequest::new(Notion::Wa), &guarded)?;
    let fd_dep = check(&CheckRequest::new(Notion::Fd).with_dep(), &guarded)?;
    println!(
        "\nguarded feedback: position graph {}, finite-domain split {}",
        wa.outcome.as_str(),
        fd_dep.outcome.as_str()
    );
    Ok(())
}
