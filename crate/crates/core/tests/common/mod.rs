#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use aspkit::ground::{AtomId, ComputeSpec, GroundBody, GroundHead, GroundProgram, GroundRule, Lit, SymbolTable};
use aspkit::translate::{PrimitiveProgram, PrimitiveRule};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn program_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name)
}

pub fn read_program(name: &str) -> String {
    std::fs::read_to_string(program_path(name)).unwrap()
}

/// Names of the named atoms in `m`.
pub fn names(symbols: &SymbolTable, m: &BTreeSet<AtomId>) -> BTreeSet<String> {
    m.iter().filter_map(|a| symbols.name(*a).map(str::to_string)).collect()
}

pub fn name_set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn atom_table(n: usize) -> (SymbolTable, Vec<AtomId>) {
    let mut symbols = SymbolTable::new();
    let atoms = (0..n).map(|i| symbols.intern(&format!("a{i}"))).collect();
    (symbols, atoms)
}

fn pick(rng: &mut impl Rng, atoms: &[AtomId], max: usize) -> Vec<AtomId> {
    let k = rng.gen_range(0..=max);
    (0..k).map(|_| *atoms.choose(rng).unwrap()).collect()
}

/// A normal program over at most `max_atoms` atoms with at most
/// `max_rules` rules; about one rule in ten is an integrity constraint.
pub fn random_normal_program(rng: &mut impl Rng, max_atoms: usize, max_rules: usize) -> PrimitiveProgram {
    let (symbols, atoms) = atom_table(rng.gen_range(1..=max_atoms));
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(0..=max_rules) {
        let head = if rng.gen_bool(0.1) { AtomId::FALSE } else { *atoms.choose(rng).unwrap() };
        rules.push(PrimitiveRule::Basic { head, pos: pick(rng, &atoms, 2), neg: pick(rng, &atoms, 2) });
    }
    let mut p = PrimitiveProgram { rules, symbols, compute: ComputeSpec::default() };
    p.reserve_atoms();
    p
}

/// A primitive program using every rule type.
pub fn random_primitive_program(rng: &mut impl Rng, max_atoms: usize, max_rules: usize) -> PrimitiveProgram {
    let (symbols, atoms) = atom_table(rng.gen_range(1..=max_atoms));
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(0..=max_rules) {
        let head = if rng.gen_bool(0.1) { AtomId::FALSE } else { *atoms.choose(rng).unwrap() };
        let (pos, neg) = (pick(rng, &atoms, 3), pick(rng, &atoms, 2));
        let n = (pos.len() + neg.len()) as u64;
        rules.push(match rng.gen_range(0..4) {
            0 => PrimitiveRule::Basic { head, pos, neg },
            1 => PrimitiveRule::Constraint { head, bound: rng.gen_range(0..=n + 1), pos, neg },
            2 => {
                let mut heads: Vec<AtomId> = pick(rng, &atoms, 3);
                heads.sort();
                heads.dedup();
                PrimitiveRule::Choice { heads, pos, neg }
            }
            _ => {
                let w = |rng: &mut _, v: Vec<AtomId>| v.into_iter().map(|a| (a, Rng::gen_range(rng, 0..=4))).collect();
                let pos: Vec<(AtomId, u64)> = w(rng, pos);
                let neg: Vec<(AtomId, u64)> = w(rng, neg);
                let total: u64 = pos.iter().chain(&neg).map(|e| e.1).sum();
                PrimitiveRule::Weight { head, bound: rng.gen_range(0..=total + 1), pos, neg }
            }
        });
    }
    let mut p = PrimitiveProgram { rules, symbols, compute: ComputeSpec::default() };
    p.reserve_atoms();
    p
}

fn lit(rng: &mut impl Rng, atoms: &[AtomId]) -> Lit {
    Lit { atom: *atoms.choose(rng).unwrap(), negative: rng.gen_bool(0.4) }
}

fn bounds(rng: &mut impl Rng, lo: i64, hi: i64) -> (i64, Option<i64>) {
    let lower = rng.gen_range(lo..=hi);
    let upper = rng.gen_bool(0.5).then(|| rng.gen_range(lower.max(lo)..=hi + 1));
    (lower, upper)
}

/// A ground program with cardinality and weight constraints in heads and
/// bodies, negative weights included.
pub fn random_extended_program(rng: &mut impl Rng, max_atoms: usize, max_rules: usize) -> GroundProgram {
    let (symbols, atoms) = atom_table(rng.gen_range(1..=max_atoms));
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=max_rules) {
        let head = match rng.gen_range(0..10) {
            0..=3 => GroundHead::Atom(*atoms.choose(rng).unwrap()),
            4 => GroundHead::Falsity,
            5..=7 => {
                let hs: Vec<AtomId> = (0..rng.gen_range(1..=3)).map(|_| *atoms.choose(rng).unwrap()).collect();
                let (lower, upper) = bounds(rng, -1, hs.len() as i64);
                GroundHead::Cardinality { lower, atoms: hs, upper }
            }
            _ => {
                let elems: Vec<(AtomId, i64)> =
                    (0..rng.gen_range(1..=3)).map(|_| (*atoms.choose(rng).unwrap(), rng.gen_range(-2..=4))).collect();
                let (lower, upper) = bounds(rng, -2, 6);
                GroundHead::Weight { lower, elems, upper }
            }
        };
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            body.push(match rng.gen_range(0..3) {
                0 => GroundBody::Lit(lit(rng, &atoms)),
                1 => {
                    let lits: Vec<Lit> = (0..rng.gen_range(1..=3)).map(|_| lit(rng, &atoms)).collect();
                    let (lower, upper) = bounds(rng, -1, lits.len() as i64);
                    GroundBody::Cardinality { lower, lits, upper }
                }
                _ => {
                    let elems: Vec<(Lit, i64)> =
                        (0..rng.gen_range(1..=3)).map(|_| (lit(rng, &atoms), rng.gen_range(-3..=5))).collect();
                    let (lower, upper) = bounds(rng, -3, 7);
                    GroundBody::Weight { lower, elems, upper }
                }
            });
        }
        rules.push(GroundRule { head, body });
    }
    GroundProgram { rules, symbols, compute: ComputeSpec::default() }
}

/// Source text of the 3-coloring of the square of an `n`-cycle.
pub fn cycle_square_coloring() -> &'static str {
    "node(0..n-1).
     edge(X, (X + 1) mod n) :- node(X).
     edge(X, (X + 2) mod n) :- node(X).
     color(r; g; b).
     1 { col(X, C) : color(C) } 1 :- node(X).
     :- edge(X, Y), col(X, C), col(Y, C), color(C)."
}

/// All placements of `n` non-attacking queens, as `q(x,y)` name sets
/// (x = column of the queen in row y), found by filtering permutations.
pub fn queens_by_permutation(n: i64) -> BTreeSet<BTreeSet<String>> {
    fn rec(n: i64, cols: &mut Vec<i64>, out: &mut BTreeSet<BTreeSet<String>>) {
        let y = cols.len() as i64;
        if y == n {
            out.insert(cols.iter().enumerate().map(|(i, x)| format!("q({x},{})", i + 1)).collect());
            return;
        }
        for x in 1..=n {
            let clash = cols.iter().enumerate().any(|(i, &c)| c == x || (c - x).abs() == (y - i as i64).abs());
            if !clash {
                cols.push(x);
                rec(n, cols, out);
                cols.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}
