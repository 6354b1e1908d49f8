//! Worked-example behaviours beyond the verdict matrix: chase shapes,
//! dependency edges, normalisation effects, detection equivalences, and
//! instance-mode checks.

mod common;

use std::collections::BTreeSet;

use chasecheck::atom::Atom;
use chasecheck::chase::{self, ChaseConfig, ChaseStatus};
use chasecheck::check::{check, CheckRequest, EqualityMode, Mode, Notion, Outcome, Witness};
use chasecheck::deps;
use chasecheck::rule::RuleSet;
use chasecheck::text::{parse_dl_axioms, parse_facts, parse_rules};
use chasecheck::transform;

fn golden(text: &str) -> RuleSet {
    parse_rules(text, "golden").unwrap()
}

const NORMALISED_SPLIT: &str = include_str!("data/golden/normalised_split.rules");
const SUMMARY_GAP: &str = include_str!("data/golden/summary_gap.rules");
const EQUALITY_LOOP: &str = include_str!("data/golden/equality_loop.rules");
const ROUND_TRIP: &str = include_str!("data/golden/round_trip.rules");

#[test]
fn split_rule_depends_on_who_may_speak_its_bridge_predicate() {
    // as parsed, Q is a user predicate: the critical instance contains
    // Q(*), and the chase nests the second skolem inside itself
    let rs = golden(NORMALISED_SPLIT);
    let critical = transform::critical_instance(&rs, Default::default()).unwrap();
    assert!(critical.sorted_strings().contains(&"Q(*)".to_string()));
    let (sk, _) = transform::skolemise(&rs).unwrap();
    let outcome = chase::chase(&sk, &critical, &ChaseConfig::for_detection()).unwrap();
    match &outcome.status {
        ChaseStatus::CyclicTerm { term, .. } => {
            let rendered = term.to_string();
            assert!(
                rendered.matches("__f_r2_1").count() >= 2,
                "the second rule's witness nests inside itself: {rendered}"
            );
        }
        other => panic!("expected a cyclic term, got {other:?}"),
    }
    assert_eq!(
        check(&CheckRequest::new(Notion::Mfa), &rs).unwrap().outcome,
        Outcome::NotAcyclic
    );

    // produced by the normaliser from the unsplit rule, the bridge is a
    // generated predicate, stays out of the critical instance, and the
    // faithful check accepts
    let original =
        golden("C(?z), R(?z,?x), B(?x) -> exists ?y1, ?y2 . R(?x,?y1), R(?y1,?y2), B(?y2) .");
    assert_eq!(
        check(&CheckRequest::new(Notion::Mfa), &original)
            .unwrap()
            .outcome,
        Outcome::Acyclic
    );
    let mut norm = transform::Normaliser::new(false);
    let (replaced, companion) = norm.head_step(&original.rules[0], &[1, 2]).unwrap();
    let split = RuleSet::new(vec![replaced, companion.unwrap()]).standardize_apart();
    let critical2 = transform::critical_instance(&split, Default::default()).unwrap();
    assert!(
        !critical2.sorted_strings().iter().any(|f| f.contains("__q")),
        "generated bridge predicates stay out of input instances"
    );
    assert_eq!(
        check(&CheckRequest::new(Notion::Mfa), &split)
            .unwrap()
            .outcome,
        Outcome::Acyclic
    );
}

#[test]
fn head_split_rescues_the_self_feeding_rule() {
    // A(x) -> exists y . B(x), A(y) is rejected by the faithful check; the
    // variable-disjoint head split makes the skolem a constant
    let rs = golden("A(?x) -> exists ?y . B(?x), A(?y) .");
    assert_eq!(
        check(&CheckRequest::new(Notion::Mfa), &rs).unwrap().outcome,
        Outcome::NotAcyclic
    );
    let mut norm = transform::Normaliser::new(false);
    let (replaced, companion) = norm.head_step(&rs.rules[0], &[1]).unwrap();
    let split = RuleSet::new(vec![replaced, companion.unwrap()]).standardize_apart();
    assert_eq!(
        check(&CheckRequest::new(Notion::Mfa), &split)
            .unwrap()
            .outcome,
        Outcome::Acyclic
    );
    assert_eq!(
        check(&CheckRequest::new(Notion::Ja), &split)
            .unwrap()
            .outcome,
        Outcome::Acyclic
    );
}

#[test]
fn dependency_edges_of_the_summary_gap_set() {
    let rs = golden(SUMMARY_GAP);
    let graph = deps::dependency_graph(&rs, true);
    let expected: BTreeSet<(usize, usize)> = [(0, 1), (1, 2)].into_iter().collect();
    assert_eq!(graph.edges, expected, "exactly r1->r2 and r2->r3");
    assert!(graph.is_acyclic());
    // and the summarising chase still alarms: the witness constant serves
    // every parent at once
    let v = check(&CheckRequest::new(Notion::Msa), &rs).unwrap();
    assert_eq!(v.outcome, Outcome::NotAcyclic);
    assert!(matches!(v.witness, Some(Witness::AlarmDerived)));
}

#[test]
fn detection_and_alarm_routes_agree() {
    let inputs = [
        (ROUND_TRIP, EqualityMode::None, Outcome::Acyclic),
        (NORMALISED_SPLIT, EqualityMode::None, Outcome::NotAcyclic),
        (EQUALITY_LOOP, EqualityMode::Axiomatize, Outcome::NotAcyclic),
        // acyclic dependencies imply the faithful check accepts, even
        // though the summarised one rejects
        (SUMMARY_GAP, EqualityMode::None, Outcome::Acyclic),
    ];
    for (text, equality, want) in inputs {
        let rs = golden(text);
        let direct = check(&CheckRequest::new(Notion::Mfa).with_equality(equality), &rs).unwrap();
        let mut req = CheckRequest::new(Notion::Mfa).with_equality(equality);
        req.flags.mfa_via_c = true;
        let via_alarm = check(&req, &rs).unwrap();
        assert_eq!(direct.outcome, want);
        assert_eq!(via_alarm.outcome, want, "routes disagree on:\n{rs}");
    }
}

#[test]
fn alarm_fires_within_four_function_free_steps_of_detection() {
    for (text, equality) in [
        (NORMALISED_SPLIT, EqualityMode::None),
        (EQUALITY_LOOP, EqualityMode::Axiomatize),
    ] {
        let rs = golden(text);
        let direct = check(&CheckRequest::new(Notion::Mfa).with_equality(equality), &rs).unwrap();
        let mut req = CheckRequest::new(Notion::Mfa).with_equality(equality);
        req.flags.mfa_via_c = true;
        let via_alarm = check(&req, &rs).unwrap();
        let detect_steps = direct.stats.steps.unwrap();
        let alarm_steps = via_alarm.stats.steps.unwrap();
        assert!(
            alarm_steps <= detect_steps + 4,
            "alarm took {alarm_steps} steps, detection stopped at {detect_steps}"
        );
    }
}

#[test]
fn combinator_coincides_with_plain_faithful_check_on_goldens() {
    for text in [
        ROUND_TRIP,
        NORMALISED_SPLIT,
        SUMMARY_GAP,
        include_str!("data/golden/mfa_only.rules"),
        include_str!("data/golden/split_loops.rules"),
        include_str!("data/golden/ranked_not_safe.rules"),
    ] {
        let rs = golden(text);
        let plain = check(&CheckRequest::new(Notion::Mfa), &rs).unwrap().outcome;
        let combined = check(&CheckRequest::new(Notion::Mfa).with_dep(), &rs)
            .unwrap()
            .outcome;
        assert_eq!(plain, combined, "on:\n{rs}");
    }
}

#[test]
fn instance_mode_respects_the_given_facts() {
    // universally rejected, but harmless on an instance that never feeds
    // the loop
    let rs = golden(NORMALISED_SPLIT);
    let idle = parse_facts("B(a).", "t").unwrap();
    let v = check(&CheckRequest::new(Notion::Mfa).on_instance(idle), &rs).unwrap();
    assert_eq!(v.outcome, Outcome::Acyclic);
    // a reflexive seed keeps the first rule re-applicable along the chain
    let triggering = parse_facts("C(c). R(c,c). B(c). Q(c).", "t").unwrap();
    let v2 = check(
        &CheckRequest::new(Notion::Mfa).on_instance(triggering.clone()),
        &rs,
    )
    .unwrap();
    assert_eq!(v2.outcome, Outcome::NotAcyclic);
    // the summarised check is no more permissive on the same instance
    let msa = check(&CheckRequest::new(Notion::Msa).on_instance(triggering), &rs).unwrap();
    assert_eq!(msa.outcome, Outcome::NotAcyclic);
}

#[test]
fn limits_surface_as_unknown_not_as_verdicts() {
    let rs = golden(ROUND_TRIP);
    let mut req = CheckRequest::new(Notion::Mfa);
    req.flags.mfa_via_c = true;
    req.chase.max_facts = Some(6);
    let v = check(&req, &rs).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
    assert!(matches!(v.witness, Some(Witness::Limit(_))));
}

#[test]
fn ontology_translation_pipeline() {
    let axioms = parse_dl_axioms(include_str!("data/golden/ontology.dlx"), "ontology.dlx").unwrap();
    assert_eq!(axioms.len(), 8);
    let rs = transform::dl_translate(&axioms).unwrap();
    assert_eq!(rs.len(), 8);
    assert!(
        rs.contains_equality(),
        "max1 and one produce equality heads"
    );
    // the translated ontology passes the faithful check once equality is
    // axiomatised, and the summarised check agrees
    let mfa = check(
        &CheckRequest::new(Notion::Mfa).with_equality(EqualityMode::Axiomatize),
        &rs,
    )
    .unwrap();
    assert_eq!(mfa.outcome, Outcome::Acyclic);
    let msa = check(
        &CheckRequest::new(Notion::Msa).with_equality(EqualityMode::Axiomatize),
        &rs,
    )
    .unwrap();
    assert_eq!(msa.outcome, Outcome::Acyclic);
    // the serialised translation parses back to the same shapes
    let reparsed = parse_rules(&rs.to_string(), "roundtrip").unwrap();
    assert_eq!(reparsed.len(), rs.len());
    for (a, b) in rs.rules.iter().zip(&reparsed.rules) {
        assert_eq!(a.body.len(), b.body.len());
        assert_eq!(a.head.len(), b.head.len());
        assert_eq!(a.exist.len(), b.exist.len());
    }
}

#[test]
fn equality_loop_diverges_only_with_replacement() {
    let rs = golden(EQUALITY_LOOP);
    let rs1 = transform::eliminate_body_equality(&rs).unwrap();
    // without axiomatisation the equality atoms are inert and the chase
    // saturates quickly
    let inert = transform::demote_equality(&rs1);
    let topped = transform::augment_top(&inert, transform::TopMode::Minimal).unwrap();
    let (sk, _) = transform::skolemise(&topped).unwrap();
    let critical = transform::critical_instance(&rs1, Default::default()).unwrap();
    let outcome = chase::chase(&sk, &critical, &ChaseConfig::for_detection()).unwrap();
    assert!(outcome.status.is_fixpoint());
    // with the replacement rules the merged witness revives the generator
    let v = check(
        &CheckRequest::new(Notion::Mfa).with_equality(EqualityMode::Axiomatize),
        &rs,
    )
    .unwrap();
    assert_eq!(v.outcome, Outcome::NotAcyclic);
    match v.witness {
        Some(Witness::CyclicTerm { term, .. }) => {
            assert!(term.matches("__f_r1_1").count() >= 2, "witness: {term}")
        }
        other => panic!("expected a cyclic-term witness, got {other:?}"),
    }
}

#[test]
fn reports_are_deterministic_and_schema_shaped() {
    let rs = golden(ROUND_TRIP);
    let v = check(&CheckRequest::new(Notion::Msa), &rs).unwrap();
    let one = chasecheck::text::emit_report(&v, false);
    let v2 = check(&CheckRequest::new(Notion::Msa), &rs).unwrap();
    let two = chasecheck::text::emit_report(&v2, false);
    assert_eq!(one, two, "reports must be byte-identical across runs");
    let parsed: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(parsed["notion"], "msa");
    assert_eq!(parsed["mode"], "universal");
    assert_eq!(parsed["equality"], "none");
    assert_eq!(parsed["verdict"], "acyclic");
    assert!(parsed["stats"]["facts"].is_number());
    assert!(parsed["stats"].get("elapsedMs").is_none());
    // a rejen report carries its witness
    let bad = check(&CheckRequest::new(Notion::Ja), &rs).unwrap();
    let report = chasecheck::text::emit_report(&bad, false);
    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(parsed["verdict"], "not-acyclic");
    assert_eq!(parsed["witness"]["kind"], "variable-cycle");
}

#[test]
fn seeds_from_constant_equalities_reach_every_chase() {
    let rs = golden("a = b, A(?z) -> C(?z) .\nA(?x) -> B(?x) .");
    let rs1 = transform::eliminate_body_equality(&rs).unwrap();
    assert_eq!(rs1.seeds.len(), 1);
    let instance = parse_facts("A(d).", "t").unwrap();
    let (sk, _) = transform::skolemise(&rs1).unwrap();
    let outcome = chase::chase(&sk, &instance, &ChaseConfig::default()).unwrap();
    // the marker seed lets the rewritten rule fire exactly when b equals a
    assert!(outcome.store.contains(&Atom::new(
        chasecheck::atom::Pred::new("B"),
        vec![chasecheck::term::Term::constant("d")]
    )));
    // a = b is not derivable, so C stays empty
    assert!(outcome
        .store
        .facts_of(chasecheck::atom::Pred::new("C"))
        .is_empty());
}

#[test]
fn verdicts_always_carry_witnesses_when_rejecting() {
    let cases: Vec<(RuleSet, Notion, EqualityMode)> = vec![
        (golden(ROUND_TRIP), Notion::Ja, EqualityMode::None),
        (golden(ROUND_TRIP), Notion::Swa, EqualityMode::None),
        (
            golden(include_str!("data/golden/fd_only.rules")),
            Notion::Wa,
            EqualityMode::None,
        ),
        (
            golden(include_str!("data/golden/ar_only.rules")),
            Notion::Fd,
            EqualityMode::None,
        ),
        (
            golden(include_str!("data/golden/ja_only.rules")),
            Notion::Ar,
            EqualityMode::None,
        ),
        (
            golden(include_str!("data/golden/ranked_not_safe.rules")),
            Notion::Ga,
            EqualityMode::None,
        ),
        (
            golden(include_str!("data/golden/datalog_cycle.rules")),
            Notion::Agrd,
            EqualityMode::None,
        ),
        (golden(SUMMARY_GAP), Notion::Msa, EqualityMode::None),
        (golden(EQUALITY_LOOP), Notion::Mfa, EqualityMode::Axiomatize),
    ];
    for (rs, notion, equality) in cases {
        let v = check(&CheckRequest::new(notion).with_equality(equality), &rs).unwrap();
        assert_eq!(v.outcome, Outcome::NotAcyclic, "{notion}");
        assert!(v.witness.is_some(), "{notion} must justify its rejection");
    }
}

#[test]
fn universal_mode_equals_instance_mode_on_the_critical_instance() {
    for text in [ROUND_TRIP, SUMMARY_GAP] {
        let rs = golden(text);
        let critical = transform::critical_instance(&rs, Default::default()).unwrap();
        let universal = check(&CheckRequest::new(Notion::Msa), &rs).unwrap().outcome;
        let pinned = check(&CheckRequest::new(Notion::Msa).on_instance(critical), &rs)
            .unwrap()
            .outcome;
        assert_eq!(universal, pinned);
    }
}

#[test]
fn graph_notions_reject_instance_mode() {
    let rs = golden(ROUND_TRIP);
    let store = parse_facts("A(a).", "t").unwrap();
    let req = CheckRequest {
        mode: Mode::Instance(store),
        ..CheckRequest::new(Notion::Ja)
    };
    assert!(check(&req, &rs).is_err());
}

/// Pinned counterexamples from the randomised suites: each of these once
/// exposed an unsound shortcut and must keep its verdict agreement.
#[test]
fn regression_marking_analysis_needs_the_propagation_rules() {
    // the de-aliasing bridge atoms must not block value flow: without the
    // truth-propagation rules in the analysed set, every bridge looked
    // like a dead end and the singularised analysis over-accepted
    let rs = golden("P3(c0), P0(?v0,?v0) -> exists ?v4 . P3(?v4), P0(?v4,?v0) .");
    let mut req = CheckRequest::new(Notion::Ja).with_equality(EqualityMode::SingAll);
    req.flags.wa_equivalence_shortcut = false;
    let via_markings = check(&req, &rs).unwrap().outcome;
    let via_wa = check(&CheckRequest::new(Notion::Wa), &rs).unwrap().outcome;
    assert_eq!(via_markings, Outcome::NotAcyclic);
    assert_eq!(via_markings, via_wa);
}

#[test]
fn regression_equality_head_variables_are_marking_relevant() {
    // the repeated body variable only reaches the head inside an equality
    // atom; pinning its marking hid the one singularisation whose analysis
    // rejects, so the all-markings verdict disagreed with its equivalence
    let rs = golden(
        "P1(c0), P0(?w3,?w2,?w2) -> ?w2 = ?w3 .\n\
         P0(?x2,?x2,c1), P3(?x1,?x2,c1), P1(?x3) -> P1(?x2) .\n\
         P0(?y1,?y0,?y0), P2(?y1,?y3), P2(?y1,?y0) -> exists ?y4 . P2(?y4,?y4), ?y0 = ?y1 .\n\
         P1(c1), P0(?z0,?z0,?z0) -> exists ?z4, ?z5 . P1(?z4), P2(?z4,?z5) .",
    );
    let mut req = CheckRequest::new(Notion::Ja).with_equality(EqualityMode::SingAll);
    req.flags.wa_equivalence_shortcut = false;
    let via_markings = check(&req, &rs).unwrap().outcome;
    let via_wa = check(&CheckRequest::new(Notion::Wa), &rs).unwrap().outcome;
    assert_eq!(via_markings, Outcome::NotAcyclic);
    assert_eq!(via_markings, via_wa);
}

#[test]
fn regression_combinator_partitions_the_augmented_set() {
    // the replacement and truth-propagation rules connect components, so
    // the dependency split must see them; both equality routes agree with
    // the plain faithful check on the divergent equality loop
    let rs = golden(EQUALITY_LOOP);
    for equality in [EqualityMode::Axiomatize, EqualityMode::SingUnion] {
        let plain = check(&CheckRequest::new(Notion::Mfa).with_equality(equality), &rs)
            .unwrap()
            .outcome;
        let combined = check(
            &CheckRequest::new(Notion::Mfa)
                .with_equality(equality)
                .with_dep(),
            &rs,
        )
        .unwrap()
        .outcome;
        assert_eq!(plain, Outcome::NotAcyclic, "{}", equality.as_str());
        assert_eq!(plain, combined, "{}", equality.as_str());
    }
}
