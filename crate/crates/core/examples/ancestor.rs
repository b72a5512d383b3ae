//! Domain predicates of the ancestor program and the extension each one
//! gets before instantiation.
//!
//!     cargo run --example ancestor

use aspkit::analysis::{analyze, check_domain_restriction};
use aspkit::ground::{evaluate_domain_predicates, instantiate_rules, DomainMode};
use aspkit::pipeline::visible_atoms;
use aspkit::solver::{solve, SolverOptions};
use aspkit::syntax::parse_str;
use aspkit::translate::translate;

fn main() {
    let program = parse_str(include_str!("../programs/ancestor.lp")).unwrap();
    let (graph, info) = analyze(&program);
    assert!(check_domain_restriction(&program, &info).is_empty());

    let domain: Vec<String> = info.domain_predicates().map(ToString::to_string).collect();
    let other: Vec<String> = info.non_domain_predicates().map(ToString::to_string).collect();
    println!("domain predicates: {}", domain.join(" "));
    println!("non-domain predicates: {}", other.join(" "));

    let ext = evaluate_domain_predicates(&program, &graph, &info).unwrap();
    for key in ext.predicates() {
        let atoms: Vec<String> = ext.atoms(key).into_iter().collect();
        println!("  {key}: {}", atoms.join(" "));
    }

    let grounding = instantiate_rules(&program, ext, DomainMode::RemoveDomain).unwrap();
    println!("\nground rules for the rest:\n{}", grounding.program.text());

    let primitive = translate(&grounding.program);
    let (models, _) = solve(&primitive, SolverOptions::default(), 0);
    println!("stable model: {}", visible_atoms(&primitive.symbols, &models[0]).join(" "));
}
