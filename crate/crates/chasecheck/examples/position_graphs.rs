//! The graph-based analyses up close: the weak-acyclicity position graph
//! with its special edges, move sets for joint acyclicity, finite-domain
//! positions, argument rankings, and the safe-position refinement.
//!
//! ```bash
//! cargo run --example position_graphs
//! ```

use chasecheck::graphs::{ar_check, fd_positions, gamma_check, ja_move, wa_check, wa_graph};
use chasecheck::text::parse_rules;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let guarded = parse_rules(
        "R(?z,?x), A(?x) -> exists ?y . S(?x,?y) .\n\
         S(?x1,?x2) -> R(?x1,?x2) .",
        "g.rules",
    )?;
    println!("guarded feedback:\n{guarded}");
    println!("{}", wa_graph(&guarded)?.to_dot("wa"));
    let wa = wa_check(&guarded)?;
    println!(
        "weak acyclicity: {}{}",
        if wa.acyclic { "yes" } else { "no" },
        wa.witness.map(|w| format!("  [{w}]")).unwrap_or_default()
    );
    let fd = fd_positions(&guarded)?;
    let fd: Vec<String> = fd.iter().map(|p| p.to_string()).collect();
    println!("finite-domain positions: {}", fd.join(", "));

    // move sets: where values invented for an existential can travel
    let round_trip = parse_rules(
        "A(?x1) -> exists ?y1 . R(?x1,?y1), B(?y1) .\n\
         R(?x2,?z1), B(?z1) -> A(?x2) .\n\
         B(?x3) -> exists ?y2 . R(?x3,?y2), C(?y2) .\n\
         C(?x4) -> D(?x4) .\n\
         R(?x5,?z2), D(?z2) -> B(?x5) .",
        "rt.rules",
    )?;
    println!("\nround trip:\n{round_trip}");
    for rule in &round_trip.rules {
        for y in &rule.exist {
            let moved: Vec<String> = ja_move(*y, &round_trip)
                .iter()
                .map(|p| p.to_string())
                .collect();
            println!("  move({y}) = {{{}}}", moved.join(", "));
        }
    }

    // argument rankings bound how deep invented values can stack
    let ranked = parse_rules(
        "A(?x) -> exists ?y . R(?x,?y) .\n\
         R(?x1,?x2) -> S(?x1,?x2) .\n\
         S(?z,?x3), B(?x3) -> A(?x3) .",
        "rank.rules",
    )?;
    println!("\nrankable filter chain:\n{ranked}");
    let (outcome, ranking) = ar_check(&ranked, false)?;
    println!(
        "argument-restricted: {}, ranking {}",
        if outcome.acyclic { "yes" } else { "no" },
        ranking.map(|r| r.to_string()).unwrap_or_default()
    );

    // safe positions rescue it even though finite-domain does not
    let gamma = gamma_check(&ranked)?;
    println!(
        "safe-position acyclicity: {}",
        if gamma.acyclic { "yes" } else { "no" }
    );
    Ok(())
}
