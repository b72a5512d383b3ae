//! Brute-force reference implementation of stable-model semantics.
//!
//! Nothing here shares code with the solver; it exists to check it.

mod direct;

use std::collections::BTreeSet;

pub use direct::{direct_is_stable, direct_stable_models};

use crate::error::OracleError;
use crate::ground::{AtomId, ComputeSpec};
use crate::translate::{PrimitiveProgram, PrimitiveRule};

/// Default limit on the number of atoms for exhaustive enumeration.
pub const BRUTE_FORCE_CAP: u32 = 20;

pub type Model = BTreeSet<AtomId>;

/// A negation-free rule: `head` holds once the atoms of `body` already
/// derived weigh at least `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductRule {
    pub head: AtomId,
    pub bound: u64,
    pub body: Vec<(AtomId, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductProgram {
    pub rules: Vec<ReductRule>,
}

/// Gelfond-Lifschitz reduct of primitive rules with respect to `m`.
pub fn reduct(rules: &[PrimitiveRule], m: &Model) -> ReductProgram {
    let mut out = Vec::new();
    let unit = |v: &[AtomId]| v.iter().map(|&a| (a, 1)).collect::<Vec<_>>();
    for r in rules {
        match r {
            PrimitiveRule::Basic { head, pos, neg } => {
                if neg.iter().all(|b| !m.contains(b)) {
                    out.push(ReductRule { head: *head, bound: pos.len() as u64, body: unit(pos) });
                }
            }
            PrimitiveRule::Constraint { head, bound, pos, neg } => {
                let false_neg = neg.iter().filter(|b| !m.contains(b)).count() as u64;
                out.push(ReductRule { head: *head, bound: bound.saturating_sub(false_neg), body: unit(pos) });
            }
            PrimitiveRule::Weight { head, bound, pos, neg } => {
                let false_neg: u64 = neg.iter().filter(|(b, _)| !m.contains(b)).map(|e| e.1).fold(0, u64::saturating_add);
                out.push(ReductRule { head: *head, bound: bound.saturating_sub(false_neg), body: pos.clone() });
            }
            PrimitiveRule::Choice { heads, pos, neg } => {
                if neg.iter().all(|b| !m.contains(b)) {
                    for h in heads.iter().filter(|h| m.contains(h)) {
                        out.push(ReductRule { head: *h, bound: pos.len() as u64, body: unit(pos) });
                    }
                }
            }
        }
    }
    ReductProgram { rules: out }
}

/// Least fixpoint of the one-step consequence operator.
pub fn least_model(p: &ReductProgram) -> Model {
    let mut m = Model::new();
    loop {
        let mut changed = false;
        for r in &p.rules {
            if m.contains(&r.head) {
                continue;
            }
            let w: u128 = r.body.iter().filter(|(a, _)| m.contains(a)).map(|e| e.1 as u128).sum();
            if w >= r.bound as u128 {
                m.insert(r.head);
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

fn respects(compute: &ComputeSpec, m: &Model) -> bool {
    compute.positive.iter().all(|a| m.contains(a)) && compute.negative.iter().all(|a| !m.contains(a))
}

pub fn is_stable(program: &PrimitiveProgram, m: &Model) -> bool {
    !m.contains(&AtomId::FALSE) && respects(&program.compute, m) && least_model(&reduct(&program.rules, m)) == *m
}

/// Every stable model, by enumerating all subsets of atoms `2..=max_atom`.
pub fn brute_force_models(program: &PrimitiveProgram, cap: u32) -> Result<Vec<Model>, OracleError> {
    let atoms: Vec<AtomId> = (2..=program.max_atom()).map(AtomId).collect();
    if atoms.len() as u32 > cap {
        return Err(OracleError::CapExceeded { atoms: atoms.len(), cap: cap as usize });
    }
    let mut out = Vec::new();
    for bits in 0u64..1 << atoms.len() {
        let m: Model = atoms.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, a)| *a).collect();
        if is_stable(program, &m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Drops hidden atoms (those without a name) from a model.
pub fn project(program_symbols: &crate::ground::SymbolTable, m: &Model) -> Model {
    m.iter().copied().filter(|a| program_symbols.name(*a).is_some()).collect()
}

/// Extends the visible atoms `visible` with the hidden atoms the rules
/// derive from them. Hidden atoms come from translation and are defined by
/// rules over visible literals, so the extension is unique.
pub fn complete_hidden(program: &PrimitiveProgram, visible: &Model) -> Model {
    let mut m = visible.clone();
    let hidden = |a: &AtomId| *a != AtomId::FALSE && program.symbols.name(*a).is_none();
    loop {
        let mut changed = false;
        for r in &program.rules {
            let weight: u128 = r
                .body()
                .iter()
                .filter(|(a, negative, _)| m.contains(a) != *negative)
                .map(|e| e.2 as u128)
                .sum();
            let bound = match r {
                PrimitiveRule::Basic { pos, neg, .. } => (pos.len() + neg.len()) as u128,
                PrimitiveRule::Constraint { bound, .. } | PrimitiveRule::Weight { bound, .. } => *bound as u128,
                PrimitiveRule::Choice { .. } => continue,
            };
            let h = r.heads()[0];
            if weight >= bound && hidden(&h) && m.insert(h) {
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::SymbolTable;

    fn a(n: u32) -> AtomId {
        AtomId(n)
    }

    fn m(ids: &[u32]) -> Model {
        ids.iter().map(|&n| AtomId(n)).collect()
    }

    fn prog(rules: Vec<PrimitiveRule>) -> PrimitiveProgram {
        let mut p = PrimitiveProgram { rules, symbols: SymbolTable::new(), compute: ComputeSpec::default() };
        p.reserve_atoms();
        p
    }

    fn basic(head: u32, pos: &[u32], neg: &[u32]) -> PrimitiveRule {
        PrimitiveRule::Basic { head: a(head), pos: pos.iter().map(|&n| a(n)).collect(), neg: neg.iter().map(|&n| a(n)).collect() }
    }

    #[test]
    fn reduct_examples() {
        // h :- 1 {a, not b} with M = {h}
        let r = PrimitiveRule::Constraint { head: a(2), bound: 1, pos: vec![a(3)], neg: vec![a(4)] };
        let red = reduct(&[r], &m(&[2]));
        assert_eq!(red.rules, vec![ReductRule { head: a(2), bound: 0, body: vec![(a(3), 1)] }]);
        assert_eq!(least_model(&red), m(&[2]));

        let r = basic(2, &[3], &[]);
        assert_eq!(reduct(&[r], &m(&[])).rules, vec![ReductRule { head: a(2), bound: 1, body: vec![(a(3), 1)] }]);

        let r = PrimitiveRule::Choice { heads: vec![a(2), a(3)], pos: vec![], neg: vec![a(4)] };
        assert_eq!(reduct(&[r], &m(&[2])).rules, vec![ReductRule { head: a(2), bound: 0, body: vec![] }]);
    }

    #[test]
    fn least_model_examples() {
        let p = ReductProgram {
            rules: vec![
                ReductRule { head: a(2), bound: 0, body: vec![] },
                ReductRule { head: a(3), bound: 1, body: vec![(a(2), 1)] },
            ],
        };
        assert_eq!(least_model(&p), m(&[2, 3]));
        let p = ReductProgram { rules: vec![ReductRule { head: a(2), bound: 0, body: vec![(a(3), 1)] }] };
        assert_eq!(least_model(&p), m(&[2]));
        let p = ReductProgram {
            rules: vec![
                ReductRule { head: a(2), bound: 5, body: vec![(a(3), 6)] },
                ReductRule { head: a(3), bound: 0, body: vec![] },
            ],
        };
        assert_eq!(least_model(&p), m(&[2, 3]));
    }

    #[test]
    fn stability_examples() {
        let p = prog(vec![basic(2, &[], &[3]), basic(3, &[], &[2])]);
        assert!(is_stable(&p, &m(&[2])));
        assert!(!is_stable(&p, &m(&[2, 3])));
        assert_eq!(brute_force_models(&p, BRUTE_FORCE_CAP).unwrap(), vec![m(&[2]), m(&[3])]);

        let p = prog(vec![basic(2, &[], &[2])]);
        assert!(!is_stable(&p, &m(&[])));
        assert!(!is_stable(&p, &m(&[2])));
        assert!(brute_force_models(&p, BRUTE_FORCE_CAP).unwrap().is_empty());

        assert_eq!(brute_force_models(&prog(vec![]), BRUTE_FORCE_CAP).unwrap(), vec![m(&[])]);
    }

    #[test]
    fn compute_filters() {
        let mut p = prog(vec![basic(2, &[], &[3]), basic(3, &[], &[2])]);
        p.compute.negative.push(a(2));
        assert_eq!(brute_force_models(&p, BRUTE_FORCE_CAP).unwrap(), vec![m(&[3])]);
    }

    #[test]
    fn cap() {
        let p = prog(vec![basic(30, &[], &[])]);
        assert_eq!(brute_force_models(&p, 20), Err(OracleError::CapExceeded { atoms: 29, cap: 20 }));
    }
}
