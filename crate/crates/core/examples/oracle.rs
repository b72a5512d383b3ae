//! The reference oracle: stability by the reduct, exhaustive enumeration,
//! and the source-level check for constraint programs.
//!
//!     cargo run --example oracle

use std::collections::BTreeSet;

use aspkit::ground::{ground, DomainMode};
use aspkit::oracle::{brute_force_models, direct_stable_models, is_stable, project, BRUTE_FORCE_CAP};
use aspkit::pipeline::visible_atoms;
use aspkit::solver::{solve, SolverOptions};
use aspkit::syntax::parse_str;
use aspkit::translate::translate;

fn main() {
    let src = "{ a, b, c }. d :- 2 [ a = 1, b = 1, not c = 2 ]. :- d, c.";
    let g = ground(&parse_str(src).unwrap(), DomainMode::RemoveDomain).unwrap().program;
    let p = translate(&g);

    let (found, _) = solve(&p, SolverOptions::default(), 0);
    for m in &found {
        assert!(is_stable(&p, m));
    }
    let exhaustive = brute_force_models(&p, BRUTE_FORCE_CAP).unwrap();
    assert_eq!(found.iter().collect::<BTreeSet<_>>(), exhaustive.iter().collect());

    let direct = direct_stable_models(&g, BRUTE_FORCE_CAP).unwrap();
    let projected: BTreeSet<_> = found.iter().map(|m| project(&p.symbols, m)).collect();
    assert_eq!(projected, direct.iter().cloned().collect());

    for m in &direct {
        println!("{{ {} }}", visible_atoms(&g.symbols, m).join(", "));
    }
    println!("{} models; solver, exhaustive search and source-level check agree", direct.len());
}
