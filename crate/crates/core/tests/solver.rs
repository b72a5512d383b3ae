mod common;

use std::collections::BTreeSet;

use aspkit::format::{emit_ground_format, parse_ground_format};
use aspkit::ground::DomainMode;
use aspkit::oracle::{brute_force_models, least_model, reduct, BRUTE_FORCE_CAP};
use aspkit::pipeline::{compile, GroundOptions};
use aspkit::solver::{guess_atoms, solve, well_founded, Solver, SolverOptions};
use aspkit::translate::PrimitiveRule;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn all_rule_types_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..600 {
        let p = random_primitive_program(&mut rng, 10, 12);
        let expected: BTreeSet<_> = brute_force_models(&p, BRUTE_FORCE_CAP).unwrap().into_iter().collect();
        for full_atmost in [false, true] {
            let opts = SolverOptions { full_atmost, verify: true, ..Default::default() };
            let (got, _) = solve(&p, opts, 0);
            let set: BTreeSet<_> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "program {i}: duplicate models");
            assert_eq!(set, expected, "program {i}:\n{}", emit_ground_format(&p));
        }
    }
}

#[test]
fn lookahead_sampling_does_not_change_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let p = random_primitive_program(&mut rng, 12, 14);
        let full: BTreeSet<_> = solve(&p, SolverOptions::default(), 0).0.into_iter().collect();
        let opts = SolverOptions { full_lookahead_limit: 0, sample_size: 2, ..Default::default() };
        let sampled: BTreeSet<_> = solve(&p, opts, 0).0.into_iter().collect();
        assert_eq!(full, sampled);
    }
}

#[test]
fn decisions_bounded_by_guess_atoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for i in 0..500 {
        let p = if i % 2 == 0 { random_normal_program(&mut rng, 10, 15) } else { random_primitive_program(&mut rng, 10, 12) };
        let k = guess_atoms(&p).len() as u32;
        let (_, stats) = solve(&p, SolverOptions::default(), 0);
        assert!(stats.decisions <= 1u64 << k, "program {i}: {} decisions, k = {k}", stats.decisions);
    }
}

#[test]
fn queens_four_search_space() {
    let opts = GroundOptions {
        constants: [("n".to_string(), 4)].into(),
        domain_mode: DomainMode::RemoveDomain,
        lint: false,
    };
    let c = compile(&[read_program("queens.lp")], &opts).unwrap();
    let choice_atoms: BTreeSet<_> = c
        .primitive
        .rules
        .iter()
        .filter(|r| matches!(r, PrimitiveRule::Choice { .. }))
        .flat_map(|r| r.heads().to_vec())
        .collect();
    assert_eq!(choice_atoms.len(), 16);
    let (models, stats) = solve(&c.primitive, SolverOptions::default(), 0);
    assert_eq!(models.len(), 2);
    assert!(stats.decisions < 1 << 16, "{} decisions", stats.decisions);
}

#[test]
fn enumeration_is_deterministic() {
    let c = compile(
        &[read_program("queens.lp")],
        &GroundOptions { constants: [("n".to_string(), 6)].into(), domain_mode: DomainMode::RemoveDomain, lint: false },
    )
    .unwrap();
    let a = solve(&c.primitive, SolverOptions::default(), 0);
    let b = solve(&c.primitive, SolverOptions::default(), 0);
    assert_eq!(a, b);
    assert_eq!(a.0.len(), 4);
    let seeded = |seed| solve(&c.primitive, SolverOptions { seed: Some(seed), ..Default::default() }, 0).0;
    assert_eq!(seeded(7), seeded(7));
    let mut x = seeded(7);
    let mut y = a.0.clone();
    x.sort();
    y.sort();
    assert_eq!(x, y);
}

#[test]
fn well_founded_of_definite_programs_is_least_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..200 {
        let mut p = random_normal_program(&mut rng, 10, 15);
        for r in &mut p.rules {
            if let PrimitiveRule::Basic { neg, .. } = r {
                neg.clear();
            }
        }
        let wf = well_founded(&p).unwrap();
        let mut least = least_model(&reduct(&p.rules, &BTreeSet::new()));
        let falsity = least.remove(&aspkit::ground::AtomId::FALSE);
        assert!(wf.unknown.is_empty());
        assert_eq!(wf.true_atoms, least);
        assert_eq!(wf.inconsistent, falsity);
    }
}

#[test]
fn iterator_interface() {
    let c = compile(&[read_program("ncolor.lp"), read_program("graph.lp")], &GroundOptions::default()).unwrap();
    let solver = Solver::new(&c.primitive, SolverOptions::default());
    assert_eq!(solver.count(), 2);
}

proptest! {
    #[test]
    fn format_round_trip(seed in any::<u64>()) {
        let p = random_primitive_program(&mut ChaCha8Rng::seed_from_u64(seed), 12, 15);
        let text = emit_ground_format(&p);
        let back = parse_ground_format(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(emit_ground_format(&back), text);
    }
}
