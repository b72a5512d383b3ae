use std::collections::{BTreeMap, BTreeSet};

use super::{variable_occurrences, DomainInfo};
use crate::diag::Diagnostic;
use crate::syntax::{Atom, BodyElem, Head, Literal, LiteralKind, Pos, PredKey, Program, Term};

/// Warnings for constructs that are usually mistakes:
///
/// * a constant used exactly once, in an argument position where every
///   other occurrence of that position is a variable;
/// * a variable occurring exactly once in its rule (names starting with `_` are exempt);
/// * a predicate that is used but never defined.
pub fn lint(program: &Program, _info: &DomainInfo) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let atoms = all_atoms(program);

    // (a) constants that look like mistyped variables
    let mut const_count: BTreeMap<&str, usize> = BTreeMap::new();
    for (a, _) in &atoms {
        for t in &a.args {
            count_symbols(t, &mut const_count);
        }
    }
    let mut by_position: BTreeMap<(PredKey, usize), Vec<&Term>> = BTreeMap::new();
    for (a, _) in &atoms {
        for (i, t) in a.args.iter().enumerate() {
            by_position.entry((a.key(), i)).or_default().push(t);
        }
    }
    for (a, _) in &atoms {
        for (i, t) in a.args.iter().enumerate() {
            let Term::Symbol(c) = t else { continue };
            if const_count[c.as_str()] != 1 {
                continue;
            }
            let siblings = &by_position[&(a.key(), i)];
            let others: Vec<_> = siblings.iter().filter(|s| !matches!(s, Term::Symbol(x) if x == c)).collect();
            if !others.is_empty() && others.iter().all(|s| matches!(s, Term::Variable(_))) {
                out.push(Diagnostic::warning(
                    a.pos,
                    format!(
                        "constant `{c}` occurs only once, and argument {} of {} is a variable everywhere else; mistyped variable?",
                        i + 1,
                        a.key()
                    ),
                ));
            }
        }
    }

    // (b) singleton variables
    for rule in &program.rules {
        let (occs, _) = variable_occurrences(rule);
        let mut counts: BTreeMap<&str, (usize, Pos)> = BTreeMap::new();
        for o in &occs {
            counts.entry(o.name).or_insert((0, o.pos)).0 += 1;
        }
        for o in &occs {
            let (n, pos) = counts[o.name];
            if n == 1 && !o.name.starts_with('_') {
                out.push(Diagnostic::warning(pos, format!("variable `{}` occurs only once in rule `{rule}`", o.name)));
            }
        }
    }

    // (c) used but never defined
    let defined: BTreeSet<PredKey> =
        program.rules.iter().flat_map(|r| r.head_atoms()).map(Atom::key).collect();
    let mut reported = BTreeSet::new();
    for (a, is_head) in &atoms {
        let key = a.key();
        if !is_head && !defined.contains(&key) && reported.insert(key.clone()) {
            out.push(Diagnostic::warning(a.pos, format!("predicate {key} is used but never defined")));
        }
    }
    out
}

fn count_symbols<'a>(t: &'a Term, counts: &mut BTreeMap<&'a str, usize>) {
    match t {
        Term::Symbol(s) => *counts.entry(s).or_default() += 1,
        Term::Variable(_) | Term::Integer(_) => {}
        Term::Range(a, b) => {
            count_symbols(a, counts);
            count_symbols(b, counts);
        }
        Term::Pool(ts) | Term::Func(_, ts) => ts.iter().for_each(|t| count_symbols(t, counts)),
    }
}

/// Every atom of the program in textual order, flagged `true` when it is
/// defined by the rule it appears in.
fn all_atoms(program: &Program) -> Vec<(&Atom, bool)> {
    let mut out = Vec::new();
    fn lit<'a>(l: &'a Literal, head: bool, out: &mut Vec<(&'a Atom, bool)>) {
        match &l.kind {
            LiteralKind::Atom(a) => out.push((a, head)),
            LiteralKind::Comparison { .. } => {}
            LiteralKind::Conditional { atom, conditions } => {
                out.push((atom, head));
                out.extend(conditions.iter().map(|c| (c, false)));
            }
        }
    }
    for rule in &program.rules {
        match &rule.head {
            Head::Atom(a) => out.push((a, true)),
            Head::Falsity => {}
            Head::Cardinality { elems, .. } => elems.iter().for_each(|l| lit(l, true, &mut out)),
            Head::Weight { elems, .. } => elems.iter().for_each(|e| lit(&e.literal, true, &mut out)),
        }
        for b in &rule.body {
            match b {
                BodyElem::Literal(l) => lit(l, false, &mut out),
                BodyElem::Cardinality { elems, .. } => elems.iter().for_each(|l| lit(l, false, &mut out)),
                BodyElem::Weight { elems, .. } => elems.iter().for_each(|e| lit(&e.literal, false, &mut out)),
            }
        }
    }
    if let Some(c) = &program.compute {
        c.literals.iter().for_each(|l| lit(l, false, &mut out));
    }
    out
}
