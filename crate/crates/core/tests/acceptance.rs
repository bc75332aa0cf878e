//! Acceptance gate: one test per headline capability, each printing a
//! single PASS line (run with `--nocapture` to see them).  A failing
//! capability fails its test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hilbert_forge::algebra::{
    filters, leibniz, leibniz_sdm, samples, star_algebra, is_in_class, Congruence, FiniteAlgebra,
    Matrix,
};
use hilbert_forge::calculi::{builtin, ockham_calculus, preset, Provenance, Rule, RuleSet};
use hilbert_forge::engine::{
    builtin_ruleset, check_derivation, corpus_replay, parse_script, prove, substitute_derivation,
    ProveOutcome, SearchBudget, CORPUS,
};
use hilbert_forge::search::{enumerate_algebras, find_countermodel, EnumerationSpec, SearchOutcome, Target};
use hilbert_forge::semantics::{
    all_filters_entails, order_entails, rule_sound, Consecution, SemanticsMode,
};
use hilbert_forge::syntax::{
    and, f_k, g_n, neg, neg_depth, neg_n, neg_occurrence_depths, or, parse, parse_internal, print,
    substitute, var, Formula, Substitution,
};

fn spec(class: &str, max_size: usize) -> EnumerationSpec {
    EnumerationSpec {
        class: class.into(),
        max_size,
        include_trivial: false,
    }
}

fn assert_all_sound(rs: &RuleSet, algebras: &[FiniteAlgebra], mode: &SemanticsMode, label: &str) {
    use rayon::prelude::*;
    let bad: Vec<String> = rs
        .rules
        .par_iter()
        .filter_map(|r| {
            rule_sound(r, algebras, mode)
                .expect("semantics error")
                .map(|_| r.name.clone())
        })
        .collect();
    assert!(bad.is_empty(), "{label}: unsound rules {bad:?}");
}

#[test]
fn calculus_generation_counts() {
    let eqs = preset("SDM").unwrap().equations;
    let full = hilbert_forge::calculi::sdm_calculus(&eqs).unwrap();
    let reduced = hilbert_forge::calculi::sdm_calculus_reduced(&eqs).unwrap();
    assert_eq!(full.rules.len(), 75, "full SDM calculus size");
    assert_eq!(reduced.rules.len(), 59, "reduced SDM calculus size");
    assert!(reduced.rules.iter().all(|r| r.provenance != Provenance::REq));
    for name in ["N2", "SDM3", "L3b.g0", "L3b.g1", "L3b.g2", "s_neg_and", "r_dist", "ax_top"] {
        assert!(full.get(name).is_some(), "missing rule {name}");
    }
    println!("acceptance 1/8 calculus generation: PASS (sdm = 75 rules, reduced = 59)");
}

#[test]
fn soundness_sweeps() {
    let sdm5 = enumerate_algebras(&spec("SDM", 5)).unwrap();
    let full = builtin_ruleset("sdm").unwrap();
    assert_all_sound(&full, &sdm5, &SemanticsMode::Filter, "sdm/SDM<=5");
    let b10 = enumerate_algebras(&spec("berman:1:0", 5)).unwrap();
    assert_all_sound(
        &ockham_calculus(1, 0).unwrap(),
        &b10,
        &SemanticsMode::Filter,
        "ockham:1:0/Berman(1,0)<=5",
    );
    let b11 = enumerate_algebras(&spec("berman:1:1", 5)).unwrap();
    assert_all_sound(
        &ockham_calculus(1, 1).unwrap(),
        &b11,
        &SemanticsMode::Filter,
        "ockham:1:1/Berman(1,1)<=5",
    );
    let rtop = builtin("R_top").unwrap();
    assert_all_sound(&rtop, &sdm5, &SemanticsMode::Assertional, "R_top/SDM<=5");
    println!(
        "acceptance 2/8 soundness: PASS (sdm filter-sound on {} SDM algebras, ockham(1,0)/(1,1) on {}/{} Berman algebras, R_top assertionally sound)",
        sdm5.len(),
        b10.len(),
        b11.len()
    );
}

#[test]
fn refutation_searches() {
    // f_n of the ¬-tower rule over p∧p / p is refuted on a 2-element
    // algebra for n = 1, 2, 3.
    for n in 1..=3usize {
        let premise = f_k(n, &neg_n(n + 1, parse("p & p").unwrap()));
        let conclusion = f_k(n, &neg_n(n + 1, var("p")));
        let rule = Rule {
            name: format!("f{n}(tower)"),
            premises: vec![premise],
            conclusion,
            bidirectional: false,
            provenance: Provenance::User,
        };
        match find_countermodel(&Target::Rule(rule), &spec("DN", 2), &SemanticsMode::Filter).unwrap()
        {
            SearchOutcome::Refuted(w) => assert_eq!(w.algebra.size, 2, "n={n}"),
            SearchOutcome::Exhausted(_) => panic!("f_{n}(tower) not refuted"),
        }
    }
    // wxc is filter-refuted within size 4 (in fact at size 3) ...
    let wxc = Rule {
        name: "r_wxc".into(),
        premises: vec![parse("p & ~p").unwrap()],
        conclusion: parse("~q").unwrap(),
        bidirectional: false,
        provenance: Provenance::User,
    };
    let found = match find_countermodel(
        &Target::Rule(wxc.clone()),
        &spec("DM", 4),
        &SemanticsMode::Filter,
    )
    .unwrap()
    {
        SearchOutcome::Refuted(w) => w.algebra.size,
        SearchOutcome::Exhausted(_) => panic!("wxc not filter-refuted"),
    };
    assert!(found <= 4);
    // ... yet assertionally sound over all DN algebras up to size 5.
    let dn5 = enumerate_algebras(&spec("DN", 5)).unwrap();
    assert!(rule_sound(&wxc, &dn5, &SemanticsMode::Assertional).unwrap().is_none());
    println!(
        "acceptance 3/8 refutation: PASS (f_n towers refuted at size 2, wxc filter-refuted at size {found}, wxc assertionally sound on {} DN algebras)",
        dn5.len()
    );
}

#[test]
fn corpus_replays_quickly() {
    let t = std::time::Instant::now();
    let report = corpus_replay();
    let elapsed = t.elapsed();
    assert_eq!(report.len(), CORPUS.len());
    for e in &report {
        if let Err(err) = &e.result {
            panic!("corpus script {} failed: {err}", e.name);
        }
    }
    assert!(elapsed.as_secs_f64() < 5.0, "corpus replay took {elapsed:?}");
    // Spot-check derivability from scratch: the two base congruence goals
    // are re-proved under the default budget.
    let rs = builtin_ruleset("sdm").unwrap();
    for goal in ["(p & p) | q |- p | q", "(p & p) & q |- p & q"] {
        let goal = hilbert_forge::engine::parse_consecution(goal).unwrap();
        match prove(&rs, &goal, &SearchBudget::default()) {
            ProveOutcome::Proved(d) => check_derivation(&rs, &d, &goal).unwrap(),
            ProveOutcome::Exhausted(_) => panic!("expected proof"),
        }
    }
    println!(
        "acceptance 4/8 corpus: PASS ({} scripts replayed in {elapsed:?}, base goals re-proved from scratch)",
        report.len()
    );
}

#[test]
fn leibniz_agreement() {
    let sdm5 = enumerate_algebras(&spec("SDM", 5)).unwrap();
    // The assertional companion: plain equation rules plus R_⊤.
    let mut assertional = hilbert_forge::calculi::rules_from_equations(&preset("SDM").unwrap().equations);
    assertional.extend_from(&builtin("R_top").unwrap());
    let mut matrices = 0usize;
    let mut reduced_models = 0usize;
    for alg in &sdm5 {
        for d in filters(alg) {
            let m = Matrix {
                algebra: alg.clone(),
                designated: d,
            };
            assert_eq!(
                leibniz(&m).unwrap(),
                leibniz_sdm(&m).unwrap(),
                "algebra size {}, designated {:?}",
                m.algebra.size,
                m.designated
            );
            matrices += 1;
            // Among matrix models of the R_⊤-extended calculus, the
            // reduced ones designate exactly {⊤}.
            let is_model = assertional
                .rules
                .iter()
                .all(|r| {
                    rule_sound(
                        r,
                        std::slice::from_ref(alg),
                        &SemanticsMode::FixedMatrix(m.designated.clone()),
                    )
                    .unwrap()
                    .is_none()
                });
            if is_model && leibniz(&m).unwrap() == Congruence::identity(alg.size) {
                reduced_models += 1;
                assert_eq!(m.designated, vec![alg.top], "size {}", alg.size);
            }
        }
    }
    assert!(reduced_models > 0);
    println!(
        "acceptance 5/8 leibniz: PASS (closed form matches on {matrices} matrices over {} SDM algebras; {reduced_models} reduced R_top models, all with D = {{top}})",
        sdm5.len()
    );
}

#[test]
fn negation_lemma_and_star() {
    let sdm6 = enumerate_algebras(&spec("SDM", 6)).unwrap();
    for alg in &sdm6 {
        let ng = |x: usize| alg.neg[x];
        for a in 0..alg.size {
            for b in 0..alg.size {
                // ¬(a∧b) is insensitive to double negation of either side.
                let base = ng(alg.meet(a, b));
                assert_eq!(base, ng(alg.meet(ng(ng(a)), b)));
                assert_eq!(base, ng(alg.meet(a, ng(ng(b)))));
                assert_eq!(base, ng(alg.meet(ng(ng(a)), ng(ng(b)))));
                for c in 0..alg.size {
                    // ¬(¬(¬a∧b)∧c) ≤ ¬(a∧c).
                    let lhs = ng(alg.meet(ng(alg.meet(ng(a), b)), c));
                    let rhs = ng(alg.meet(a, c));
                    assert!(alg.leq(lhs, rhs), "size {} a={a} b={b} c={c}", alg.size);
                }
            }
        }
        assert!(is_in_class(&star_algebra(alg).unwrap(), "DM").unwrap());
    }
    println!(
        "acceptance 6/8 negation lemma: PASS (identities, inequality, and star-is-DM on {} SDM algebras up to size 6)",
        sdm6.len()
    );
}

/// Random formula over the given variables with roughly the given size.
fn random_formula(rng: &mut ChaCha8Rng, vars: &[&str], budget: usize) -> Formula {
    if budget <= 1 {
        return match rng.random_range(0..vars.len() + 2) {
            0 => Formula::Bot,
            1 => Formula::Top,
            k => var(vars[k - 2]),
        };
    }
    match rng.random_range(0..3) {
        0 => neg(random_formula(rng, vars, budget - 1)),
        1 => {
            let l = rng.random_range(1..budget);
            and(
                random_formula(rng, vars, l),
                random_formula(rng, vars, budget - 1 - l),
            )
        }
        _ => {
            let l = rng.random_range(1..budget);
            or(
                random_formula(rng, vars, l),
                random_formula(rng, vars, budget - 1 - l),
            )
        }
    }
}

#[test]
fn random_consecutions_filter_vs_order() {
    let dn4 = enumerate_algebras(&spec("DN", 4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x484c4254);
    let vars = ["x", "y", "z"];
    let mut entailed = 0usize;
    for i in 0..1000 {
        let n_prem = rng.random_range(0..=2);
        let c = Consecution {
            premises: (0..n_prem)
                .map(|_| {
                    let budget = rng.random_range(1..=9);
                    random_formula(&mut rng, &vars, budget)
                })
                .collect(),
            conclusion: {
                let budget = rng.random_range(1..=9);
                random_formula(&mut rng, &vars, budget)
            },
        };
        let by_order = order_entails(&dn4, &c).unwrap().is_none();
        let by_filters = all_filters_entails(&dn4, &c).unwrap().is_none();
        assert_eq!(by_order, by_filters, "consecution #{i}: {c:?}");
        entailed += by_order as usize;
    }
    println!(
        "acceptance 7/8 transfer: PASS (order-theoretic and all-filters consequence agree on 1000 random consecutions over {} DN algebras; {entailed} entailed)",
        dn4.len()
    );
}

#[test]
fn property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x464f524745);
    // (a) print/parse round trip, including reserved variables.
    let all_vars = ["x", "y", "z", "ab1", "q_0", "#q0", "#q17", "#t", "#n[~(x & y)]"];
    for _ in 0..10_000 {
        let budget = rng.random_range(1..=25);
        let f = random_formula(&mut rng, &all_vars, budget);
        assert_eq!(parse_internal(&print(&f)).unwrap(), f);
    }
    // (b) derivations remain valid under substitution.
    let scripts: Vec<_> = CORPUS
        .iter()
        .map(|(_, text)| parse_script(text).unwrap())
        .collect();
    let rulesets: Vec<_> = scripts
        .iter()
        .map(|d| builtin_ruleset(&d.ruleset_id).unwrap())
        .collect();
    let script_vars = ["p", "q", "a", "b", "c", "d"];
    for i in 0..10_000 {
        let d = &scripts[i % scripts.len()];
        let sigma: Substitution = script_vars
            .iter()
            .map(|v| {
                (
                    v.to_string(),
                    {
                        let budget = rng.random_range(1..=5);
                        random_formula(&mut rng, &["x", "y"], budget)
                    },
                )
            })
            .collect();
        let inst = substitute_derivation(d, &sigma);
        let goal = inst.goal.clone();
        check_derivation(&rulesets[i % scripts.len()], &inst, &goal)
            .unwrap_or_else(|e| panic!("instance #{i} of {} invalid: {e}", d.ruleset_id));
        // Instantiated goals are still goals: conclusion matches final step.
        assert_eq!(
            inst.steps.last().unwrap().formula,
            substitute(&d.goal.conclusion, &sigma)
        );
    }
    // (c) f_k is the identity exactly when no ¬-headed subformula sits at
    // depth k (neg_occurrence_depths is the definitional oracle).
    for _ in 0..10_000 {
        let budget = rng.random_range(1..=15);
        let f = random_formula(&mut rng, &["x", "y", "z"], budget);
        let k = rng.random_range(0..=6);
        assert_eq!(
            f_k(k, &f) == f,
            !neg_occurrence_depths(&f).contains(&k),
            "f_{k} on {}",
            print(&f)
        );
    }
    // (d) the g-pattern adds exactly one negation level per layer.
    for _ in 0..10_000 {
        let budget = rng.random_range(1..=12);
        let f = random_formula(&mut rng, &["x", "y"], budget);
        let n = rng.random_range(0..=8);
        assert_eq!(neg_depth(&g_n(n, &f)), n + neg_depth(&f));
    }
    println!("acceptance 8/8 property suites: PASS (4 suites x 10000 instances)");
}

#[test]
fn cli_binary_smoke() {
    // The acceptance gate also exercises the installed binary surface once.
    let exe = env!("CARGO_BIN_EXE_hilbert-forge");
    let out = std::process::Command::new(exe)
        .args(["compile", "--preset", "SDM", "--target", "sdm"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 75);
    let out = std::process::Command::new(exe).args(["corpus"]).output().unwrap();
    assert!(out.status.success());
    let out = std::process::Command::new(exe)
        .args(["--max", "3", "refute", "--goal", "p & ~p |- ~q", "--class", "DM"])
        .output()
        .unwrap();
    assert!(out.status.success(), "refute should find a countermodel");
    let out = std::process::Command::new(exe)
        .args(["--max", "3", "refute", "--goal", "p |- p", "--class", "DN"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "unrefutable goal exits 1");
    // Sanity for samples referenced in docs.
    assert_eq!(samples::chain_pl(3).size, 3);
}
