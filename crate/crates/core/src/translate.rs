//! Compilation of ground rules into the four primitive rule forms.

use crate::ground::{AtomId, ComputeSpec, GroundBody, GroundHead, GroundProgram, GroundRule, Lit, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrimitiveRule {
    Basic { head: AtomId, pos: Vec<AtomId>, neg: Vec<AtomId> },
    /// Head is true when at least `bound` body literals are.
    Constraint { head: AtomId, bound: u64, pos: Vec<AtomId>, neg: Vec<AtomId> },
    Choice { heads: Vec<AtomId>, pos: Vec<AtomId>, neg: Vec<AtomId> },
    /// Head is true when the true body literals weigh at least `bound`.
    Weight { head: AtomId, bound: u64, pos: Vec<(AtomId, u64)>, neg: Vec<(AtomId, u64)> },
}

impl PrimitiveRule {
    pub fn heads(&self) -> &[AtomId] {
        match self {
            PrimitiveRule::Basic { head, .. }
            | PrimitiveRule::Constraint { head, .. }
            | PrimitiveRule::Weight { head, .. } => std::slice::from_ref(head),
            PrimitiveRule::Choice { heads, .. } => heads,
        }
    }

    /// Body atoms with their polarity (`true` = negative) and weight.
    pub fn body(&self) -> Vec<(AtomId, bool, u64)> {
        match self {
            PrimitiveRule::Basic { pos, neg, .. }
            | PrimitiveRule::Constraint { pos, neg, .. }
            | PrimitiveRule::Choice { pos, neg, .. } => {
                neg.iter().map(|&a| (a, true, 1)).chain(pos.iter().map(|&a| (a, false, 1))).collect()
            }
            PrimitiveRule::Weight { pos, neg, .. } => {
                neg.iter().map(|&(a, w)| (a, true, w)).chain(pos.iter().map(|&(a, w)| (a, false, w))).collect()
            }
        }
    }

    fn max_atom(&self) -> u32 {
        let h = self.heads().iter().map(|a| a.0).max().unwrap_or(0);
        self.body().iter().map(|b| b.0 .0).max().unwrap_or(0).max(h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimitiveProgram {
    pub rules: Vec<PrimitiveRule>,
    pub symbols: SymbolTable,
    pub compute: ComputeSpec,
}

impl PrimitiveProgram {
    /// Largest atom number used anywhere (at least 1).
    pub fn max_atom(&self) -> u32 {
        let r = self.rules.iter().map(PrimitiveRule::max_atom).max().unwrap_or(1);
        let c = self.compute.positive.iter().chain(&self.compute.negative).map(|a| a.0).max().unwrap_or(1);
        r.max(c).max(self.symbols.max_atom())
    }

    /// Grows the symbol table so that every atom in use has an entry.
    pub fn reserve_atoms(&mut self) {
        let m = self.max_atom();
        self.symbols.reserve(AtomId(m));
    }
}

/// Mints hidden atom numbers above every user atom.
#[derive(Debug, Clone)]
pub struct AtomAllocator {
    next: u32,
}

impl AtomAllocator {
    pub fn above(max_atom: u32) -> Self {
        AtomAllocator { next: max_atom.max(1) + 1 }
    }

    pub fn fresh(&mut self) -> AtomId {
        self.next += 1;
        AtomId(self.next - 1)
    }
}

pub fn translate(program: &GroundProgram) -> PrimitiveProgram {
    let mut alloc = AtomAllocator::above(program.max_atom());
    let mut rules = Vec::with_capacity(program.rules.len());
    for r in &program.rules {
        translate_rule(r, &mut alloc, &mut rules);
    }
    let mut p = PrimitiveProgram { rules, symbols: program.symbols.clone(), compute: program.compute.clone() };
    p.reserve_atoms();
    p
}

/// Replaces every weight element with a negative weight by its complement
/// with the opposite weight, raising both bounds accordingly.
pub fn normalize_weights(rule: &GroundRule) -> GroundRule {
    let body = rule
        .body
        .iter()
        .map(|b| match b {
            GroundBody::Weight { lower, elems, upper } => {
                let (lower, elems, upper) = normalize(*lower, elems, *upper);
                let clamp = |v: i128| v.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
                GroundBody::Weight {
                    lower: clamp(lower),
                    elems: elems.into_iter().map(|(l, w)| (l, w.min(i64::MAX as u64) as i64)).collect(),
                    upper: upper.map(clamp),
                }
            }
            b => b.clone(),
        })
        .collect();
    GroundRule { head: rule.head.clone(), body }
}

fn normalize(lower: i64, elems: &[(Lit, i64)], upper: Option<i64>) -> (i128, Vec<(Lit, u64)>, Option<i128>) {
    let mut lo = lower as i128;
    let mut up = upper.map(|u| u as i128);
    let mut out = Vec::with_capacity(elems.len());
    for &(l, w) in elems {
        if w < 0 {
            let shift = -(w as i128);
            lo += shift;
            up = up.map(|u| u + shift);
            out.push((Lit { atom: l.atom, negative: !l.negative }, w.unsigned_abs()));
        } else {
            out.push((l, w as u64));
        }
    }
    (lo, out, up)
}

struct Body {
    pos: Vec<AtomId>,
    neg: Vec<AtomId>,
}

impl Body {
    fn with(&self, extra: Lit) -> (Vec<AtomId>, Vec<AtomId>) {
        let (mut pos, mut neg) = (self.pos.clone(), self.neg.clone());
        if extra.negative {
            neg.push(extra.atom);
        } else {
            pos.push(extra.atom);
        }
        (pos, neg)
    }
}

/// Auxiliary atoms `g_l` (at least `lower`) and `g_u` (at least `upper + 1`)
/// over a list of weighted literals. `None` stands for a bound that is
/// trivially true (`g_l`) or never reached (`g_u`).
fn bound_atoms(
    lower: i128,
    elems: &[(Lit, u64)],
    upper: Option<i128>,
    unit: bool,
    alloc: &mut AtomAllocator,
    out: &mut Vec<PrimitiveRule>,
) -> (Option<AtomId>, Option<AtomId>) {
    let total: i128 = elems.iter().map(|e| e.1 as i128).sum();
    let mut define = |bound: i128, out: &mut Vec<PrimitiveRule>| {
        let g = alloc.fresh();
        let bound = bound.clamp(0, total + 1).min(u64::MAX as i128) as u64;
        out.push(if unit {
            PrimitiveRule::Constraint {
                head: g,
                bound,
                pos: elems.iter().filter(|e| !e.0.negative).map(|e| e.0.atom).collect(),
                neg: elems.iter().filter(|e| e.0.negative).map(|e| e.0.atom).collect(),
            }
        } else {
            PrimitiveRule::Weight {
                head: g,
                bound,
                pos: elems.iter().filter(|e| !e.0.negative).map(|e| (e.0.atom, e.1)).collect(),
                neg: elems.iter().filter(|e| e.0.negative).map(|e| (e.0.atom, e.1)).collect(),
            }
        });
        g
    };
    let gl = if lower > 0 { Some(define(lower, out)) } else { None };
    let gu = match upper {
        Some(u) if u < total => Some(define(u + 1, out)),
        _ => None,
    };
    (gl, gu)
}

pub fn translate_rule(rule: &GroundRule, alloc: &mut AtomAllocator, out: &mut Vec<PrimitiveRule>) {
    let mut body = Body { pos: Vec::new(), neg: Vec::new() };
    for b in &rule.body {
        match b {
            GroundBody::Lit(l) => {
                if l.negative {
                    body.neg.push(l.atom)
                } else {
                    body.pos.push(l.atom)
                }
            }
            GroundBody::Cardinality { lower, lits, upper } => {
                let elems: Vec<(Lit, u64)> = lits.iter().map(|&l| (l, 1)).collect();
                let (gl, gu) = bound_atoms(*lower as i128, &elems, upper.map(|u| u as i128), true, alloc, out);
                body.pos.extend(gl);
                body.neg.extend(gu);
            }
            GroundBody::Weight { lower, elems, upper } => {
                let (lo, elems, up) = normalize(*lower, elems, *upper);
                let (gl, gu) = bound_atoms(lo, &elems, up, false, alloc, out);
                body.pos.extend(gl);
                body.neg.extend(gu);
            }
        }
    }
    let head_constraint = |lower: i128,
                           elems: Vec<(Lit, u64)>,
                           upper: Option<i128>,
                           unit: bool,
                           alloc: &mut AtomAllocator,
                           out: &mut Vec<PrimitiveRule>| {
        let mut heads: Vec<AtomId> = Vec::with_capacity(elems.len());
        for e in &elems {
            if !heads.contains(&e.0.atom) {
                heads.push(e.0.atom);
            }
        }
        out.push(PrimitiveRule::Choice { heads, pos: body.pos.clone(), neg: body.neg.clone() });
        let (gl, gu) = bound_atoms(lower, &elems, upper, unit, alloc, out);
        if let Some(g) = gl {
            let (pos, neg) = body.with(Lit::neg(g));
            out.push(PrimitiveRule::Basic { head: AtomId::FALSE, pos, neg });
        }
        if let Some(g) = gu {
            let (pos, neg) = body.with(Lit::pos(g));
            out.push(PrimitiveRule::Basic { head: AtomId::FALSE, pos, neg });
        }
    };
    match &rule.head {
        GroundHead::Atom(h) => out.push(PrimitiveRule::Basic { head: *h, pos: body.pos, neg: body.neg }),
        GroundHead::Falsity => out.push(PrimitiveRule::Basic { head: AtomId::FALSE, pos: body.pos, neg: body.neg }),
        GroundHead::Cardinality { lower, atoms, upper } => {
            let mut elems: Vec<(Lit, u64)> = Vec::with_capacity(atoms.len());
            for &a in atoms {
                if !elems.iter().any(|e| e.0.atom == a) {
                    elems.push((Lit::pos(a), 1));
                }
            }
            head_constraint(*lower as i128, elems, upper.map(|u| u as i128), true, alloc, out);
        }
        GroundHead::Weight { lower, elems, upper } => {
            let lits: Vec<(Lit, i64)> = elems.iter().map(|&(a, w)| (Lit::pos(a), w)).collect();
            let (lo, elems, up) = normalize(*lower, &lits, *upper);
            head_constraint(lo, elems, up, false, alloc, out);
        }
    }
}
