//! Writing and reading the numeric ground format, as `ground` and `solve`
//! exchange it through a pipe.
//!
//!     cargo run --example ground_format

use aspkit::format::{emit_ground_format, parse_ground_format};
use aspkit::pipeline::{compile, model_line, GroundOptions};
use aspkit::solver::{solve, SolverOptions};

fn main() {
    let compiled = compile(&["{ a, b }. c :- 1 { a, not b }. :- a, b. compute { c }."], &GroundOptions::default()).unwrap();
    let text = emit_ground_format(&compiled.primitive);
    print!("{text}");

    let back = parse_ground_format(&text).expect("own output parses");
    assert_eq!(emit_ground_format(&back), text);

    let (models, _) = solve(&back, SolverOptions::default(), back.compute.models);
    for m in &models {
        println!("{}", model_line(&back.symbols, m));
    }

    match parse_ground_format("1 2 1 0\n0\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("truncated input: {e}"),
    }
}
