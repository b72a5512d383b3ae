//! N queens: counts all placements and draws the first one.
//!
//!     cargo run --release --example queens -- 8

use aspkit::ground::DomainMode;
use aspkit::pipeline::{compile, visible_atoms, GroundOptions};
use aspkit::solver::{Solver, SolverOptions};

fn main() {
    let n: i64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let opts = GroundOptions {
        constants: [("n".to_string(), n)].into(),
        domain_mode: DomainMode::RemoveDomain,
        lint: false,
    };
    let compiled = compile(&[include_str!("../programs/queens.lp")], &opts).expect("queens program compiles");
    println!("{} primitive rules", compiled.primitive.rules.len());

    let mut solver = Solver::new(&compiled.primitive, SolverOptions::default());
    let Some(first) = solver.next_model() else {
        println!("no placement for n = {n}");
        return;
    };
    let mut board = vec![vec!['.'; n as usize]; n as usize];
    for atom in visible_atoms(&compiled.primitive.symbols, &first) {
        // q(X,Y)
        let inner = &atom[2..atom.len() - 1];
        let (x, y) = inner.split_once(',').unwrap();
        let (x, y): (usize, usize) = (x.parse().unwrap(), y.parse().unwrap());
        board[y - 1][x - 1] = 'Q';
    }
    for row in &board {
        println!("{}", row.iter().collect::<String>());
    }
    let total = 1 + solver.by_ref().count();
    let stats = solver.stats();
    println!("{total} placements ({} decisions, {} conflicts)", stats.decisions, stats.conflicts);
}
