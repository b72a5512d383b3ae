//! Driving the solver by hand: propagate, probe, branch and backtrack.
//!
//!     cargo run --example search_api

use aspkit::pipeline::{compile, GroundOptions};
use aspkit::solver::{Solver, SolverOptions};

fn main() {
    let compiled = compile(&["a :- not b. b :- not a. c :- a. c :- b. d :- c, not e. e :- not d."], &GroundOptions::default())
        .unwrap();
    let p = &compiled.primitive;
    let show = |s: &Solver| {
        let line: Vec<String> = p
            .symbols
            .named()
            .map(|(id, name)| match s.value(id) {
                Some(true) => format!("{name}=T"),
                Some(false) => format!("{name}=F"),
                None => format!("{name}=?"),
            })
            .collect();
        println!("level {}: {}", s.level(), line.join(" "));
    };

    let mut s = Solver::new(p, SolverOptions::default());
    s.initialize().unwrap();
    show(&s);

    let (atom, value) = s.lookahead().unwrap().expect("something to branch on");
    println!("lookahead picks {} = {value}", p.symbols.label(atom));
    s.assume(atom, value).unwrap();
    s.expand().unwrap();
    show(&s);
    s.check_counters().unwrap();

    s.backtrack();
    show(&s);

    let models: Vec<_> = s.by_ref().collect();
    println!("{} stable models; {:?}", models.len(), s.stats());
}
