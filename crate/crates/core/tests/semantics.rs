use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use paracoherent::algorithms::{self, AlgorithmKind, AlgorithmOptions, OneOf};
use paracoherent::engine::{self, SolveStats, SolverOptions};
use paracoherent::oracle::{self, OracleBudget, RandomParams};
use paracoherent::program::{parse, AtomId, AtomKind, Interpretation, Program};
use paracoherent::transform::{self, TransformKind, TransformedProgram};
use paracoherent::Error;
use proptest::prelude::*;

const EXAMPLE: &str = "b :- not a. c :- not b. a :- c. d :- not d.";
const COUNTEREXAMPLE: &str = "b :- not a. c :- a. d :- b, not d.";

fn names(tp: &TransformedProgram, m: &Interpretation) -> Vec<String> {
    m.names(tp.program.signature())
}

fn gaps(tp: &TransformedProgram, answer_sets: &[Interpretation]) -> Vec<BTreeSet<AtomId>> {
    answer_sets.iter().map(|m| tp.gap_of(m).iter().collect()).collect()
}

fn is_minimal(gap: &BTreeSet<AtomId>, all: &[BTreeSet<AtomId>]) -> bool {
    !all.iter().any(|g| g.len() < gap.len() && g.is_subset(gap))
}

#[test]
fn counterexample_semi_equilibrium_models() {
    let p = parse(COUNTEREXAMPLE).unwrap();
    let tp = transform::ht_transform(&p).unwrap();
    let all = algorithms::enumerate_all(&tp, &AlgorithmOptions::default()).unwrap();
    let models: Vec<Vec<String>> = all.models.iter().map(|m| names(&tp, &m.model)).collect();
    // k_b :- b puts k_b into every model containing b
    assert_eq!(models, [vec!["b", "k_b", "k_d"], vec!["k_a", "k_c"]]);
    assert_eq!(oracle::oracle_semantics(&p, TransformKind::Ht, &OracleBudget::default()).unwrap().models, all
        .models
        .iter()
        .map(|m| m.model.clone())
        .collect::<Vec<_>>());

    let second = all.models.iter().find(|m| names(&tp, &m.model) == ["k_a", "k_c"]).unwrap();
    assert_eq!(second.gap.names(tp.program.signature()), ["gap_k_a", "gap_k_c"]);
    let r = algorithms::weak_method(&tp, &AlgorithmOptions::default()).unwrap();
    assert_eq!(names(&tp, &r.model), ["b", "k_b", "k_d"]);
    assert_eq!(r.gap.names(tp.program.signature()), ["gap_k_d"]);

    // the two-atom gap model is paracoherent yet never optimal
    let mut stats = SolveStats::default();
    assert!(algorithms::is_paracoherent(&tp, &second.answer_set, &AlgorithmOptions::default(), &mut stats).unwrap());
    for seed in 0..20 {
        let opts = AlgorithmOptions {
            solver: SolverOptions {
                seed: Some(seed),
                deadline: None,
            },
            oneof: OneOf::Lowest,
        };
        assert_eq!(algorithms::weak_method(&tp, &opts).unwrap().gap.len(), 1);
    }
}

#[test]
fn counterexample_semi_stable_models() {
    let p = parse(COUNTEREXAMPLE).unwrap();
    let tp = transform::kappa_transform(&p).unwrap();
    let all = algorithms::enumerate_all(&tp, &AlgorithmOptions::default()).unwrap();
    let models: Vec<Vec<String>> = all.models.iter().map(|m| names(&tp, &m.model)).collect();
    assert_eq!(models, [vec!["b", "k_d"], vec!["k_a"]]);
}

#[test]
fn worked_example_answer_sets_from_the_oracle() {
    let p = parse(EXAMPLE).unwrap();
    let tp = transform::kappa_transform(&p).unwrap();
    let expected: Vec<Interpretation> = [
        &["k_a", "k_b", "k_d", "gap_k_a", "gap_k_b", "gap_k_d"][..],
        &["lam_0_0", "b", "k_b", "k_d", "gap_k_d"],
        &["lam_1_0", "a", "c", "k_a", "k_d", "gap_k_d"],
    ]
    .iter()
    .map(|n| tp.program.signature().interpretation(n.iter().copied()).unwrap())
    .collect();
    let got = oracle::oracle_transformed_answer_sets(&tp, &OracleBudget::default()).unwrap();
    assert_eq!(got.len(), 3);
    for m in &expected {
        assert!(got.contains(m), "{:?}", names(&tp, m));
    }
}

#[test]
fn worked_example_call_counts() {
    let tp = transform::kappa_transform(&parse(EXAMPLE).unwrap()).unwrap();
    let opts = AlgorithmOptions::default();
    let filtering = algorithms::filtering(&tp, &opts).unwrap();
    assert_eq!(filtering.stats.models_enumerated, 3);
    let minimize = algorithms::minimize(&tp, &opts).unwrap();
    assert!(minimize.stats.solver_calls <= 4 + 2);
    let split = algorithms::split(&tp, &opts).unwrap();
    assert!(split.stats.solver_calls <= 2 * 4 + 2);
    assert_eq!(split.asserted.unwrap().names(tp.program.signature()), ["gap_k_d"]);
}

#[test]
fn incoherent_sample_has_paracoherent_models() {
    let budget = OracleBudget::default();
    let mut sample = 0;
    let mut seed = 0u64;
    while sample < 200 {
        let batch = oracle::random_suite(64, 6, 10, seed);
        seed += 1;
        for params in batch {
            let generated = oracle::random_instance(&params, &budget).unwrap();
            if generated.coherent || sample == 200 {
                continue;
            }
            sample += 1;
            let sst = oracle::oracle_sst(&generated.program, &budget).unwrap();
            let seq = oracle::oracle_seq(&generated.program, &budget).unwrap();
            // only one direction: `:- not a.` becomes the fact `k_a.`
            if generated.has_classical_model {
                assert!(!sst.is_empty(), "{params:?}");
                assert!(!seq.is_empty(), "{params:?}");
            }
        }
    }
}

#[test]
fn generated_programs_are_deterministic() {
    let params = RandomParams {
        atoms: 5,
        rules: 8,
        seed: 99,
        ..Default::default()
    };
    assert_eq!(oracle::random_program(&params), oracle::random_program(&params));
    let positive = oracle::random_program(&RandomParams { neg_prob: 0.0, ..params });
    assert!(positive.classify().positive);
}

#[test]
fn negative_constraints_allow_models_without_classical_ones() {
    let p = parse(":- a. :- not a.").unwrap();
    assert!(!engine::has_classical_model(&p));
    let tp = transform::kappa_transform(&p).unwrap();
    let r = algorithms::minimize(&tp, &AlgorithmOptions::default()).unwrap();
    assert_eq!(names(&tp, &r.model), ["k_a"]);
}

#[test]
fn no_classical_model() {
    let p = parse("a | b. :- a. :- b.").unwrap();
    assert!(!engine::has_classical_model(&p));
    for kind in [TransformKind::Kappa, TransformKind::Ht] {
        let tp = transform::transform(&p, kind, true).unwrap();
        for alg in AlgorithmKind::ALL {
            assert_eq!(algorithms::run(alg, &tp, &AlgorithmOptions::default()).unwrap_err(), Error::NoParacoherentModel);
        }
    }
}

#[test]
fn algorithms_respect_the_deadline() {
    let p = oracle::random_program(&RandomParams {
        atoms: 18,
        rules: 30,
        max_head: 3,
        max_body: 2,
        neg_prob: 0.6,
        seed: 4,
    });
    let tp = transform::ht_transform(&p).unwrap();
    let opts = AlgorithmOptions {
        solver: SolverOptions {
            seed: None,
            deadline: Some(Instant::now() - Duration::from_millis(1)),
        },
        oneof: OneOf::Lowest,
    };
    for alg in AlgorithmKind::ALL {
        match algorithms::run(alg, &tp, &opts) {
            Err(Error::Timeout) => {}
            Ok(r) => assert!(r.stats.decisions < 256 * r.stats.solver_calls.max(1)),
            Err(e) => panic!("{alg:?}: {e}"),
        }
    }
}

fn suite_params() -> impl Strategy<Value = RandomParams> {
    (1usize..=5, 1usize..=8, 1usize..=2, 1usize..=3, 0.1f64..=0.9, any::<u64>()).prop_map(
        |(atoms, rules, max_head, max_body, neg_prob, seed)| RandomParams {
            atoms,
            rules,
            max_head,
            max_body,
            neg_prob,
            seed,
        },
    )
}

fn kinds() -> impl Strategy<Value = TransformKind> {
    prop_oneof![Just(TransformKind::Kappa), Just(TransformKind::Ht)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn paracoherence_check_is_gap_minimality(params in suite_params(), kind in kinds()) {
        let p = oracle::random_program(&params);
        let sem = oracle::oracle_semantics(&p, kind, &OracleBudget::default()).unwrap();
        let tp = &sem.transformed;
        let all = gaps(tp, &sem.answer_sets);
        let mut stats = SolveStats::default();
        for (m, g) in sem.answer_sets.iter().zip(&all) {
            let accepted = algorithms::is_paracoherent(tp, m, &AlgorithmOptions::default(), &mut stats).unwrap();
            prop_assert_eq!(accepted, is_minimal(g, &all));
        }
    }

    #[test]
    fn seeded_runs_stay_in_the_oracle_set(params in suite_params(), kind in kinds(), seed in any::<u64>()) {
        let p = oracle::random_program(&params);
        let sem = oracle::oracle_semantics(&p, kind, &OracleBudget::default()).unwrap();
        let opts = AlgorithmOptions {
            solver: SolverOptions { seed: Some(seed), deadline: None },
            oneof: OneOf::Random(seed),
        };
        for alg in AlgorithmKind::ALL {
            match algorithms::run(alg, &sem.transformed, &opts) {
                Ok(r) => {
                    prop_assert!(sem.models.contains(&r.model), "{:?}", alg);
                    if alg == AlgorithmKind::Split {
                        prop_assert_eq!(r.asserted.as_ref(), Some(&r.gap));
                    }
                }
                Err(Error::NoParacoherentModel) => prop_assert!(sem.models.is_empty()),
                Err(e) => prop_assert!(false, "{:?}: {}", alg, e),
            }
        }
    }

    #[test]
    fn maximal_canonical_filter_is_exact(params in suite_params(), kind in kinds()) {
        let p = oracle::random_program(&params);
        let sem = oracle::oracle_semantics(&p, kind, &OracleBudget::default()).unwrap();
        let tp = &sem.transformed;
        let sig = tp.program.signature();
        let all = gaps(tp, &sem.answer_sets);
        let project = |m: &Interpretation| m.filtered(|a| matches!(sig.kind(a), AtomKind::Base | AtomKind::Belief(_)));
        // every kept model has a witness with a minimal gap; every dropped
        // projection has only witnesses with a strictly smaller gap elsewhere
        for (m, g) in sem.answer_sets.iter().zip(&all) {
            let projected = project(m);
            if is_minimal(g, &all) {
                prop_assert!(sem.models.contains(&projected));
            } else if sem.models.contains(&projected) {
                let witnessed = sem.answer_sets.iter().zip(&all).any(|(n, h)| project(n) == projected && is_minimal(h, &all));
                prop_assert!(witnessed);
            }
        }
    }

    #[test]
    fn coherent_programs_keep_their_answer_sets(params in suite_params(), kind in kinds()) {
        let p: Program = oracle::random_program(&params);
        let budget = OracleBudget::default();
        let answer_sets = oracle::oracle_answer_sets(&p, &budget).unwrap();
        if !answer_sets.is_empty() {
            let sem = oracle::oracle_semantics(&p, kind, &budget).unwrap();
            let sig = sem.signature();
            let mut base: Vec<Interpretation> = sem.models.iter().map(|m| m.filtered(|a| sig.kind(a) == AtomKind::Base).resized(p.signature().len())).collect();
            base.sort_by_key(|m| m.iter().collect::<Vec<_>>());
            base.dedup();
            let mut expected = answer_sets;
            expected.sort_by_key(|m| m.iter().collect::<Vec<_>>());
            prop_assert_eq!(base, expected);
            // no gaps at all when the program is coherent
            prop_assert!(sem.answer_sets.iter().any(|m| sem.transformed.gap_of(m).is_empty()));
        }
    }
}
