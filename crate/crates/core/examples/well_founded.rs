//! Well-founded model of a normal program, compared with its stable models.
//!
//!     cargo run --example well_founded

use aspkit::ground::DomainMode;
use aspkit::pipeline::{compile, visible_atoms, GroundOptions};
use aspkit::solver::{solve, well_founded, SolverOptions};

const PROGRAM: &str = "
    move(a, b). move(b, a). move(b, c). move(c, d).
    pos(a). pos(b). pos(c). pos(d).
    win(X) :- move(X, Y), not win(Y).
";

fn main() {
    let opts = GroundOptions { domain_mode: DomainMode::RemoveDomain, ..Default::default() };
    let compiled = compile(&[PROGRAM], &opts).unwrap();
    let p = &compiled.primitive;

    let wf = well_founded(p).expect("normal program");
    println!("true:    {}", visible_atoms(&p.symbols, &wf.true_atoms).join(" "));
    println!("false:   {}", visible_atoms(&p.symbols, &wf.false_atoms).join(" "));
    println!("unknown: {}", visible_atoms(&p.symbols, &wf.unknown).join(" "));

    let (models, _) = solve(p, SolverOptions::default(), 0);
    for m in &models {
        assert!(wf.true_atoms.is_subset(m) && wf.false_atoms.is_disjoint(m));
        println!("stable:  {}", visible_atoms(&p.symbols, m).join(" "));
    }
}
