//! Three-colorings of a triangle with node `a` fixed to red.
//!
//!     cargo run --example coloring

use aspkit::ground::DomainMode;
use aspkit::pipeline::{compile, model_line, GroundOptions};
use aspkit::solver::{solve, SolverOptions};

fn main() {
    let sources = [include_str!("../programs/ncolor.lp"), include_str!("../programs/graph.lp")];
    let opts = GroundOptions { domain_mode: DomainMode::RemoveDomain, ..Default::default() };
    let compiled = compile(&sources, &opts).expect("coloring program compiles");

    let (models, stats) = solve(&compiled.primitive, SolverOptions::default(), 0);
    for (i, m) in models.iter().enumerate() {
        println!("Answer: {}", i + 1);
        println!("{}", model_line(&compiled.primitive.symbols, m));
    }
    println!("{} models, {} decisions", stats.models, stats.decisions);
}
