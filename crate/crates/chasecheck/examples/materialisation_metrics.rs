//! Cost metrics of a materialisation: nesting depth, generated size, and
//! materialisation size, as exact ratios against the input.
//!
//! ```bash
//! cargo run --example materialisation_metrics
//! ```

use chasecheck::chase::{chase, materialisation_metrics, ontology_depth, ChaseConfig};
use chasecheck::text::{parse_facts, parse_rules};
use chasecheck::transform::skolemise;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rules = parse_rules(
        "Student(?x) -> Person(?x) .\n\
         Person(?x) -> exists ?y . hasId(?x,?y), Id(?y) .\n\
         hasId(?x,?i), Id(?i) -> Registered(?x) .",
        "campus.rules",
    )?;
    let data = parse_facts(
        "Student(s1). Student(s2). Student(s3). Person(p1). Person(p2).",
        "campus.facts",
    )?;
    println!("rules:\n{rules}");
    println!("input facts: {}", data.len());

    let (skolemised, _) = skolemise(&rules)?;
    let outcome = chase(&skolemised, &data, &ChaseConfig::default())?;
    println!("\nmaterialisation:");
    for fact in outcome.store.sorted_strings() {
        println!("  {fact}");
    }

    println!("\ndepth: {}", ontology_depth(&outcome)?);
    let metrics = materialisation_metrics(&data, &outcome)?;
    println!(
        "generated size:       {} = {:.3} (facts from generating rules / input facts)",
        metrics.generated_size,
        metrics.generated_size.to_f64()
    );
    println!(
        "materialisation size: {} = {:.3} (all facts / input facts)",
        metrics.materialisation_size,
        metrics.materialisation_size.to_f64()
    );
    Ok(())
}
