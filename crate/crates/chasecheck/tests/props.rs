//! Randomised module invariants: serialisation round-trips, chase
//! discipline, singularisation bounds, and equality-handling agreements.

mod common;

use std::collections::BTreeSet;

use chasecheck::chase::{self, apply_rule, ChaseConfig};
use chasecheck::check::{check, CheckRequest, EqualityMode, Notion, Outcome};
use chasecheck::query::{answer, brute_force_certain_answers, QueryEquality};
use chasecheck::rule::{Rule, RuleSet};
use chasecheck::term::{Subst, Term};
use chasecheck::text::{parse_rules, Cq};
use chasecheck::transform;
use common::{random_instance, random_query, random_rule_set, GenCfg};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Rules compared up to variable renaming: canonical names by first
/// occurrence across body then head.
fn canonical(rule: &Rule) -> String {
    let mut subst = Subst::new();
    for (n, v) in rule.all_vars().into_iter().enumerate() {
        subst.bind(v, Term::var(&format!("cv{n}")));
    }
    let renamed = rule.substitute(&subst).unwrap();
    renamed.to_string()
}

#[test]
fn serialisation_round_trips_up_to_renaming() {
    let mut rng = StdRng::seed_from_u64(0x201);
    for cfg in [GenCfg::lattice(), GenCfg::with_equality()] {
        for _ in 0..150 {
            let rs = random_rule_set(&mut rng, &cfg);
            let rendered = rs.to_string();
            let reparsed = parse_rules(&rendered, "roundtrip")
                .unwrap_or_else(|e| panic!("serialised set failed to parse: {e}\n{rendered}"));
            assert_eq!(rs.len(), reparsed.len());
            for (a, b) in rs.rules.iter().zip(&reparsed.rules) {
                assert_eq!(canonical(a), canonical(b), "in\n{rendered}");
            }
        }
    }
    for text in [
        include_str!("data/golden/round_trip.rules"),
        include_str!("data/golden/equality_loop.rules"),
        include_str!("data/golden/split_loops.rules"),
    ] {
        let rs = parse_rules(text, "golden").unwrap();
        let reparsed = parse_rules(&rs.to_string(), "golden2").unwrap();
        for (a, b) in rs.rules.iter().zip(&reparsed.rules) {
            assert_eq!(canonical(a), canonical(b));
        }
    }
}

#[test]
fn positions_survive_renaming() {
    let mut rng = StdRng::seed_from_u64(0x202);
    let cfg = GenCfg::lattice();
    for _ in 0..100 {
        let rs = random_rule_set(&mut rng, &cfg);
        let renamed = rs.standardize_apart();
        for (a, b) in rs.rules.iter().zip(&renamed.rules) {
            for (va, vb) in a.all_vars().into_iter().zip(b.all_vars()) {
                for side in [chasecheck::atom::Side::Body, chasecheck::atom::Side::Head] {
                    assert_eq!(
                        a.positions_of_unchecked(va, side),
                        b.positions_of_unchecked(vb, side)
                    );
                }
            }
        }
    }
}

#[test]
fn chase_respects_the_two_phase_discipline() {
    let mut rng = StdRng::seed_from_u64(0x203);
    let cfg = GenCfg::lattice();
    let mut traced = 0;
    for _ in 0..120 {
        let rs = random_rule_set(&mut rng, &cfg);
        let accepted = check(&CheckRequest::new(Notion::Mfa), &rs).unwrap();
        if accepted.outcome != Outcome::Acyclic {
            continue;
        }
        let (sk, _) = transform::skolemise(&rs).unwrap();
        let critical = transform::critical_instance(&rs, Default::default()).unwrap();
        let outcome = chase::chase(
            &sk,
            &critical,
            &ChaseConfig {
                trace: true,
                ..ChaseConfig::default()
            },
        )
        .unwrap();
        assert!(outcome.status.is_fixpoint());
        let functional: BTreeSet<String> = sk
            .rules
            .iter()
            .filter(|r| r.has_functional_head())
            .map(|r| r.id.clone())
            .collect();
        // no functional firing shares a step with a function-free one
        let mut steps: std::collections::BTreeMap<usize, (bool, bool)> = Default::default();
        for entry in &outcome.trace {
            let slot = steps.entry(entry.step).or_insert((false, false));
            if functional.contains(&entry.rule) {
                slot.1 = true;
            } else {
                slot.0 = true;
            }
        }
        for (step, (plain, func)) in &steps {
            assert!(!(*plain && *func), "step {step} mixes phases on\n{rs}");
        }
        // fixpoint soundness: no rule can add anything
        for rule in &sk.rules {
            assert!(
                apply_rule(rule, &outcome.store).is_empty(),
                "rule {} still fires at fixpoint on\n{rs}",
                rule.id
            );
        }
        // set-at-a-time semantics: rule order is irrelevant
        let mut shuffled = sk.clone();
        shuffled.rules.reverse();
        let again = chase::chase(&shuffled, &critical, &ChaseConfig::default()).unwrap();
        assert_eq!(
            outcome.store.sorted_strings(),
            again.store.sorted_strings(),
            "rule order changed the chase on\n{rs}"
        );
        traced += 1;
    }
    assert!(traced > 20, "need enough accepted samples, got {traced}");
}

#[test]
fn normalisation_steps_are_conservative() {
    let mut rng = StdRng::seed_from_u64(0x204);
    let cfg = GenCfg::queries();
    let mut compared = 0;
    let mut attempts = 0;
    while compared < 60 && attempts < 2500 {
        attempts += 1;
        let rs = random_rule_set(&mut rng, &cfg);
        if rs.contains_equality() {
            continue;
        }
        // pick a rule and a random nontrivial split
        let ri = rng.random_range(0..rs.rules.len());
        let rule = &rs.rules[ri];
        let head_side = rng.random_bool(0.5);
        let atoms = if head_side { &rule.head } else { &rule.body };
        if atoms.len() < 2 {
            continue;
        }
        let pulled: Vec<usize> = (0..atoms.len()).filter(|_| rng.random_bool(0.5)).collect();
        if pulled.is_empty() || pulled.len() == atoms.len() {
            continue;
        }
        let mut norm = transform::Normaliser::new(false);
        let stepped = if head_side {
            norm.head_step(rule, &pulled)
        } else {
            norm.body_step(rule, &pulled)
        };
        let Ok((replaced, companion)) = stepped else {
            continue;
        };
        let mut rules = rs.rules.clone();
        rules[ri] = replaced;
        rules.extend(companion);
        let normalised = RuleSet::new(rules).standardize_apart();

        let instance = random_instance(&mut rng, &rs, 3);
        if instance.is_empty() {
            continue;
        }
        // boolean query over original predicates only
        let q = random_query(&mut rng, &rs, 2);
        let q = Cq {
            answer_vars: vec![],
            exist_vars: {
                let mut vs = q.answer_vars.clone();
                vs.extend(q.exist_vars.clone());
                vs
            },
            atoms: q.atoms.clone(),
        };
        let before = brute_force_certain_answers(&rs, &instance, &q, 4000);
        let after = brute_force_certain_answers(&normalised, &instance, &q, 4000);
        let (Ok(before), Ok(after)) = (before, after) else {
            continue;
        };
        assert_eq!(
            before.holds(),
            after.holds(),
            "normalisation changed an answer on\n{rs}\nvs\n{normalised}\nquery {q}"
        );
        compared += 1;
    }
    assert!(compared >= 40, "only {compared} comparisons ran");
}

#[test]
fn union_singularisation_is_a_lower_bound() {
    let mut rng = StdRng::seed_from_u64(0x205);
    let cfg = GenCfg::with_equality();
    let mut eq_sets = 0;
    for _ in 0..100 {
        let rs = random_rule_set(&mut rng, &cfg);
        let rs1 = transform::eliminate_body_equality(&rs).unwrap();
        let Ok(markings) = transform::enumerate_markings(&rs1, true) else {
            continue;
        };
        if markings.total() > 16 {
            continue;
        }
        if rs.contains_equality() {
            eq_sets += 1;
        }
        for notion in [Notion::Ja, Notion::Msa, Notion::Mfa] {
            let union = check(
                &CheckRequest::new(notion).with_equality(EqualityMode::SingUnion),
                &rs,
            )
            .unwrap()
            .outcome;
            let mut all_req = CheckRequest::new(notion).with_equality(EqualityMode::SingAll);
            all_req.flags.wa_equivalence_shortcut = false;
            let all = check(&all_req, &rs).unwrap().outcome;
            let some = check(
                &CheckRequest::new(notion).with_equality(EqualityMode::SingSome),
                &rs,
            )
            .unwrap()
            .outcome;
            // the union accepts only what every marking accepts, and any
            //的 acceptance implies some-marking acceptance
            if union == Outcome::Acyclic {
                assert_eq!(all, Outcome::Acyclic, "{notion} on\n{rs}");
            }
            if all == Outcome::Acyclic {
                assert_eq!(some, Outcome::Acyclic, "{notion} on\n{rs}");
            }
        }
    }
    assert!(eq_sets > 25);
}

#[test]
fn singularised_answers_are_marking_independent() {
    let mut rng = StdRng::seed_from_u64(0x206);
    let cfg = GenCfg::queries();
    let mut compared = 0;
    let mut attempts = 0;
    while compared < 40 && attempts < 3000 {
        attempts += 1;
        let rs = random_rule_set(&mut rng, &cfg);
        if !rs.contains_equality() {
            continue;
        }
        let rs1 = transform::eliminate_body_equality(&rs).unwrap();
        let Ok(markings) = transform::enumerate_markings(&rs1, true) else {
            continue;
        };
        if markings.total() > 8 {
            continue;
        }
        // only meaningful when every singularisation terminates
        let all = check(
            &{
                let mut r = CheckRequest::new(Notion::Mfa).with_equality(EqualityMode::SingAll);
                r.flags.wa_equivalence_shortcut = false;
                r
            },
            &rs,
        )
        .unwrap();
        if all.outcome != Outcome::Acyclic {
            continue;
        }
        let instance = random_instance(&mut rng, &rs, 3);
        if instance.is_empty() {
            continue;
        }
        let q = random_query(&mut rng, &rs, 2);
        let mut answers = Vec::new();
        for marking in transform::enumerate_markings(&rs1, true).unwrap() {
            match answer(
                &rs,
                &instance,
                &q,
                &QueryEquality::Singularise(marking),
                &ChaseConfig::default(),
            ) {
                Ok(a) => answers.push(a),
                Err(_) => break,
            }
        }
        if answers.len() < 2 {
            continue;
        }
        for pair in answers.windows(2) {
            assert_eq!(
                pair[0], pair[1],
                "marking changed answers on\n{rs}\nquery {q}"
            );
        }
        // and the axiomatised route agrees with the singularised one
        let ax = answer(
            &rs,
            &instance,
            &q,
            &QueryEquality::Axiomatize,
            &ChaseConfig::default(),
        );
        if let Ok(ax) = ax {
            assert_eq!(
                ax, answers[0],
                "axiomatised route diverged on\n{rs}\nquery {q}"
            );
        }
        compared += 1;
    }
    assert!(compared >= 25, "only {compared} comparisons ran");
}

#[test]
fn equality_free_answers_ignore_the_equality_mode() {
    let mut rng = StdRng::seed_from_u64(0x207);
    let cfg = GenCfg::lattice();
    let mut compared = 0;
    for _ in 0..200 {
        let rs = random_rule_set(&mut rng, &cfg);
        if check(&CheckRequest::new(Notion::Mfa), &rs).unwrap().outcome != Outcome::Acyclic {
            continue;
        }
        let instance = random_instance(&mut rng, &rs, 3);
        if instance.is_empty() {
            continue;
        }
        let q = random_query(&mut rng, &rs, 2);
        let plain = answer(
            &rs,
            &instance,
            &q,
            &QueryEquality::None,
            &ChaseConfig::default(),
        );
        let ax = answer(
            &rs,
            &instance,
            &q,
            &QueryEquality::Axiomatize,
            &ChaseConfig::default(),
        );
        let (Ok(plain), Ok(ax)) = (plain, ax) else {
            continue;
        };
        assert_eq!(plain, ax, "on\n{rs}\nquery {q}");
        // answers subsume the direct matches in the instance
        if let chasecheck::query::Answers::Rows(rows) = &plain {
            for m in chase::match_conjunction(&q.atoms, &instance) {
                if q.answer_vars.iter().all(|v| m.apply(*v).is_const()) {
                    let direct: std::collections::BTreeMap<String, Term> = q
                        .answer_vars
                        .iter()
                        .map(|v| (v.name().as_str().to_owned(), m.apply(*v)))
                        .collect();
                    assert!(rows.contains(&direct), "missing direct match on\n{rs}");
                }
            }
        }
        compared += 1;
    }
    assert!(compared > 40);
}

#[test]
fn harmless_equality_heads_never_change_weak_acyclicity() {
    // an equality head is invisible to the analysis as long as it does not
    // promote a body-only variable into the frontier of a generating rule
    // (that would widen the skolem arguments, a real semantic change)
    let mut rng = StdRng::seed_from_u64(0x208);
    let cfg = GenCfg::lattice();
    let mut mutated = 0;
    for _ in 0..200 {
        let rs = random_rule_set(&mut rng, &cfg);
        let before = check(&CheckRequest::new(Notion::Wa), &rs).unwrap().outcome;
        let ri = rng.random_range(0..rs.rules.len());
        let rule = &rs.rules[ri];
        let candidates: Vec<Term> = if rule.exist.is_empty() {
            rule.all_vars()
        } else {
            rule.frontier.clone()
        };
        if candidates.is_empty() {
            continue;
        }
        let lhs = candidates[rng.random_range(0..candidates.len())];
        let rhs = candidates[rng.random_range(0..candidates.len())];
        let mut rules = rs.rules.clone();
        let mut head = rules[ri].head.clone();
        head.push(chasecheck::atom::Atom::equality(lhs, rhs));
        rules[ri] = Rule::new(
            rules[ri].id.clone(),
            rules[ri].body.clone(),
            head,
            rules[ri].exist.clone(),
            rules[ri].provenance,
        )
        .unwrap();
        let with_eq = RuleSet {
            rules,
            seeds: rs.seeds.clone(),
        };
        let after = check(&CheckRequest::new(Notion::Wa), &with_eq)
            .unwrap()
            .outcome;
        assert_eq!(before, after, "equality head changed the verdict on\n{rs}");
        mutated += 1;
    }
    assert!(mutated > 100);
}

#[test]
fn accepted_sets_really_terminate() {
    let mut rng = StdRng::seed_from_u64(0x209);
    let cfg = GenCfg::with_equality();
    let mut verified = 0;
    for _ in 0..150 {
        let rs = random_rule_set(&mut rng, &cfg);
        let verdict = check(
            &CheckRequest::new(Notion::Mfa).with_equality(EqualityMode::Axiomatize),
            &rs,
        )
        .unwrap();
        if verdict.outcome != Outcome::Acyclic {
            continue;
        }
        // the real materialisation pipeline reaches a fixpoint
        let rs1 = transform::eliminate_body_equality(&rs).unwrap();
        let resolved = if rs1.contains_equality() {
            let axioms = transform::equality_axioms(&rs1).unwrap();
            let mut rules = rs1.rules.clone();
            rules.extend(axioms.rules);
            transform::demote_equality(&RuleSet {
                rules,
                seeds: rs1.seeds.clone(),
            })
        } else {
            rs1.clone()
        };
        let topped = transform::augment_top(&resolved, transform::TopMode::Minimal).unwrap();
        let (sk, _) = transform::skolemise(&topped).unwrap();
        let critical = transform::critical_instance(&rs1, Default::default()).unwrap();
        let outcome = chase::chase(&sk, &critical, &ChaseConfig::default()).unwrap();
        assert!(
            outcome.status.is_fixpoint(),
            "accepted set failed to materialise: {:?}\n{rs}",
            outcome.status
        );
        verified += 1;
    }
    assert!(verified > 25, "only {verified} accepted sets");
}

#[test]
fn dependency_acyclicity_implies_every_combinator_accepts() {
    let mut rng = StdRng::seed_from_u64(0x20a);
    let cfg = GenCfg::lattice();
    let mut hits = 0;
    for _ in 0..200 {
        let rs = random_rule_set(&mut rng, &cfg);
        if check(&CheckRequest::new(Notion::Agrd), &rs)
            .unwrap()
            .outcome
            != Outcome::Acyclic
        {
            continue;
        }
        hits += 1;
        for notion in [Notion::Wa, Notion::Ja, Notion::Fd, Notion::Msa, Notion::Mfa] {
            let v = check(&CheckRequest::new(notion).with_dep(), &rs).unwrap();
            assert_eq!(
                v.outcome,
                Outcome::Acyclic,
                "{notion}+dep rejected a dependency-acyclic set\n{rs}"
            );
        }
    }
    assert!(hits > 10, "only {hits} dependency-acyclic samples");
}

#[test]
fn summarised_acceptance_transfers_to_the_faithful_check_on_instances() {
    let mut rng = StdRng::seed_from_u64(0x20b);
    let cfg = GenCfg::lattice();
    let mut hits = 0;
    for _ in 0..120 {
        let rs = random_rule_set(&mut rng, &cfg);
        let instance = random_instance(&mut rng, &rs, 3);
        if instance.is_empty() {
            continue;
        }
        let msa = check(
            &CheckRequest::new(Notion::Msa).on_instance(instance.clone()),
            &rs,
        )
        .unwrap()
        .outcome;
        if msa != Outcome::Acyclic {
            continue;
        }
        let mfa = check(&CheckRequest::new(Notion::Mfa).on_instance(instance), &rs)
            .unwrap()
            .outcome;
        assert_eq!(mfa, Outcome::Acyclic, "on\n{rs}");
        hits += 1;
    }
    assert!(hits > 30);
}

#[test]
fn detection_and_alarm_routes_agree_on_random_sets() {
    let mut rng = StdRng::seed_from_u64(0x20c);
    let cfg = GenCfg::with_equality();
    let mut compared = 0;
    for _ in 0..150 {
        let rs = random_rule_set(&mut rng, &cfg);
        let equality = if rs.contains_equality() {
            EqualityMode::Axiomatize
        } else {
            EqualityMode::None
        };
        let direct = check(&CheckRequest::new(Notion::Mfa).with_equality(equality), &rs)
            .unwrap()
            .outcome;
        let mut req = CheckRequest::new(Notion::Mfa).with_equality(equality);
        req.flags.mfa_via_c = true;
        req.chase.max_facts = Some(30_000);
        let via_alarm = check(&req, &rs).unwrap().outcome;
        if via_alarm == Outcome::Unknown {
            continue; // the alarm route hit a limit before deciding
        }
        assert_eq!(direct, via_alarm, "routes disagree on\n{rs}");
        compared += 1;
    }
    assert!(compared > 100, "only {compared} decisive comparisons");
}
