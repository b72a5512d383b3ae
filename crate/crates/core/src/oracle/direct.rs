//! Stable models of ground programs with cardinality and weight constraints,
//! evaluated from the satisfaction definitions without any translation.

use std::collections::BTreeSet;

use super::{respects, Model};
use crate::error::OracleError;
use crate::ground::{AtomId, GroundBody, GroundHead, GroundProgram, Lit};

fn lit_true(l: Lit, m: &Model) -> bool {
    m.contains(&l.atom) != l.negative
}

/// `(lower, elems, upper)` of a body element, weights possibly negative.
fn parts(b: &GroundBody) -> (i128, Vec<(Lit, i128)>, Option<i128>) {
    match b {
        GroundBody::Lit(l) => (1, vec![(*l, 1)], None),
        GroundBody::Cardinality { lower, lits, upper } => {
            (*lower as i128, lits.iter().map(|&l| (l, 1)).collect(), upper.map(|u| u as i128))
        }
        GroundBody::Weight { lower, elems, upper } => {
            (*lower as i128, elems.iter().map(|&(l, w)| (l, w as i128)).collect(), upper.map(|u| u as i128))
        }
    }
}

fn weigh(elems: &[(Lit, i128)], m: &Model) -> i128 {
    elems.iter().filter(|(l, _)| lit_true(*l, m)).map(|e| e.1).sum()
}

fn body_true(body: &[GroundBody], m: &Model) -> bool {
    body.iter().all(|b| {
        let (lo, elems, up) = parts(b);
        let s = weigh(&elems, m);
        s >= lo && up.is_none_or(|u| s <= u)
    })
}

fn head_true(h: &GroundHead, m: &Model) -> bool {
    match h {
        GroundHead::Atom(a) => m.contains(a),
        GroundHead::Falsity => false,
        GroundHead::Cardinality { lower, atoms, upper } => {
            let n = atoms.iter().filter(|a| m.contains(a)).collect::<BTreeSet<_>>().len() as i64;
            n >= *lower && upper.is_none_or(|u| n <= u)
        }
        GroundHead::Weight { lower, elems, upper } => {
            let s: i128 = elems.iter().filter(|(a, _)| m.contains(a)).map(|e| e.1 as i128).sum();
            s >= *lower as i128 && upper.is_none_or(|u| s <= u as i128)
        }
    }
}

/// A reduct rule: `head` holds once positive atoms already derived weigh
/// at least `bound` in every one of the lower-bound constraints.
struct Reduced {
    head: AtomId,
    constraints: Vec<(i128, Vec<(AtomId, i128)>)>,
}

fn reduct(program: &GroundProgram, m: &Model) -> Vec<Reduced> {
    let mut out = Vec::new();
    'rules: for r in &program.rules {
        let mut constraints = Vec::new();
        for b in &r.body {
            let (mut lo, elems, mut up) = parts(b);
            // make every weight non-negative: (l, -w) becomes (not l, w)
            let mut norm = Vec::with_capacity(elems.len());
            for (l, w) in elems {
                if w < 0 {
                    lo -= w;
                    up = up.map(|u| u - w);
                    norm.push((Lit { atom: l.atom, negative: !l.negative }, -w));
                } else {
                    norm.push((l, w));
                }
            }
            // the upper bound acts like negation: it is decided by m
            if let Some(u) = up {
                if weigh(&norm, m) > u {
                    continue 'rules;
                }
            }
            let satisfied_neg: i128 =
                norm.iter().filter(|(l, _)| l.negative && !m.contains(&l.atom)).map(|e| e.1).sum();
            let pos = norm.iter().filter(|(l, _)| !l.negative).map(|&(l, w)| (l.atom, w)).collect();
            constraints.push((lo - satisfied_neg, pos));
        }
        let heads: Vec<AtomId> = match &r.head {
            GroundHead::Atom(a) => vec![*a],
            GroundHead::Falsity => Vec::new(),
            GroundHead::Cardinality { atoms, .. } => atoms.clone(),
            GroundHead::Weight { elems, .. } => elems.iter().map(|e| e.0).collect(),
        };
        for h in heads {
            if m.contains(&h) {
                out.push(Reduced { head: h, constraints: constraints.clone() });
            }
        }
    }
    out
}

fn least_model(rules: &[Reduced]) -> Model {
    let mut m = Model::new();
    loop {
        let mut changed = false;
        for r in rules {
            if m.contains(&r.head) {
                continue;
            }
            let fires = r.constraints.iter().all(|(bound, elems)| {
                let s: i128 = elems.iter().filter(|(a, _)| m.contains(a)).map(|e| e.1).sum();
                s >= *bound
            });
            if fires {
                m.insert(r.head);
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

/// `m` satisfies every rule and is the least model of the reduct.
pub fn direct_is_stable(program: &GroundProgram, m: &Model) -> bool {
    if m.contains(&AtomId::FALSE) || !respects(&program.compute, m) {
        return false;
    }
    if program.rules.iter().any(|r| body_true(&r.body, m) && !head_true(&r.head, m)) {
        return false;
    }
    least_model(&reduct(program, m)) == *m
}

pub fn direct_stable_models(program: &GroundProgram, cap: u32) -> Result<Vec<Model>, OracleError> {
    let atoms: Vec<AtomId> = (2..=program.max_atom()).map(AtomId).collect();
    if atoms.len() as u32 > cap {
        return Err(OracleError::CapExceeded { atoms: atoms.len(), cap: cap as usize });
    }
    let mut out = Vec::new();
    for bits in 0u64..1 << atoms.len() {
        let m: Model = atoms.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, a)| *a).collect();
        if direct_is_stable(program, &m) {
            out.push(m);
        }
    }
    Ok(out)
}
