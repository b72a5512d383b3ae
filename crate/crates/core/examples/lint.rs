//! Diagnostics: a rule that is not domain-restricted, and lint warnings.
//!
//!     cargo run --example lint

use aspkit::pipeline::{compile, GroundOptions, PipelineError};

const PROGRAM: &str = "
node(1..3).
edge(X, Y) :- node(X), node(Y), X < Y.
reach(X) :- edge(start, X).
reach(Y) :- reach(X), edge(X, Y).
blocked(Z) :- not reach(Z).
";

fn main() {
    let files = ["graph.lp".to_string()];
    let opts = GroundOptions { lint: true, ..Default::default() };
    match compile(&[PROGRAM], &opts) {
        Err(PipelineError::Semantic(diags)) => {
            for d in &diags {
                println!("{}", d.render(&files));
            }
        }
        other => panic!("expected a domain-restriction error, got {other:?}"),
    }

    let fixed = PROGRAM.replace("blocked(Z) :- not reach(Z).", "blocked(Z) :- node(Z), not reach(Z).");
    let compiled = compile(&[fixed], &opts).unwrap();
    for w in &compiled.warnings {
        println!("{}", w.render(&files));
    }
}
