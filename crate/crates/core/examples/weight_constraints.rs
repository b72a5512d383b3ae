//! Cardinality and weight constraints: the ground rules, the primitive
//! rules they translate to, and the resulting models.
//!
//!     cargo run --example weight_constraints

use aspkit::format::emit_ground_format;
use aspkit::ground::DomainMode;
use aspkit::pipeline::{compile, visible_atoms, GroundOptions};
use aspkit::solver::{solve, SolverOptions};

// Pick items within a budget; the value must reach 10.
const PROGRAM: &str = "
    item(1..4).
    cost(1, 3). cost(2, 4). cost(3, 2). cost(4, 5).
    value(1, 4). value(2, 5). value(3, 3). value(4, 6).
    { pick(I) : item(I) }.
    :- 10 [ pick(I) : cost(I, C) = C ].
    enough :- 10 [ pick(I) : value(I, V) = V ].
    :- not enough.
    small :- { pick(I) : item(I) } 2.
";

fn main() {
    let opts = GroundOptions { domain_mode: DomainMode::RemoveDomain, ..Default::default() };
    let compiled = compile(&[PROGRAM], &opts).unwrap();
    println!("ground program:\n{}", compiled.ground.text());
    println!("primitive rules (numeric format):\n{}", emit_ground_format(&compiled.primitive));

    let (models, _) = solve(&compiled.primitive, SolverOptions::default(), 0);
    for m in &models {
        println!("{}", visible_atoms(&compiled.primitive.symbols, m).join(" "));
    }
}
