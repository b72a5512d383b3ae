use std::collections::BTreeSet;

use crate::error::SolveError;
use crate::ground::AtomId;
use crate::translate::{PrimitiveProgram, PrimitiveRule};

/// Three-valued well-founded model over atoms `2..=max_atom`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WellFounded {
    pub true_atoms: BTreeSet<AtomId>,
    pub false_atoms: BTreeSet<AtomId>,
    pub unknown: BTreeSet<AtomId>,
    /// The body of some integrity constraint is well-founded true, so the
    /// program has no stable model.
    pub inconsistent: bool,
}

struct Normal<'a> {
    head: u32,
    pos: &'a [AtomId],
    neg: &'a [AtomId],
}

/// Least model of the rules whose negative literals all avoid `blocked`.
fn least_model(rules: &[Normal], by_pos: &[Vec<u32>], n: usize, blocked: &[bool]) -> Vec<bool> {
    let mut missing: Vec<usize> = rules.iter().map(|r| r.pos.len()).collect();
    let mut derived = vec![false; n + 1];
    let mut queue = Vec::new();
    let usable = |r: &Normal| r.neg.iter().all(|b| !blocked[b.index()]);
    for (i, r) in rules.iter().enumerate() {
        if missing[i] == 0 && usable(r) && !derived[r.head as usize] {
            derived[r.head as usize] = true;
            queue.push(r.head);
        }
    }
    while let Some(a) = queue.pop() {
        for &ri in &by_pos[a as usize] {
            let ri = ri as usize;
            missing[ri] -= 1;
            let r = &rules[ri];
            if missing[ri] == 0 && usable(r) && !derived[r.head as usize] {
                derived[r.head as usize] = true;
                queue.push(r.head);
            }
        }
    }
    derived
}

/// Alternating fixpoint: an underestimate of the true atoms and an
/// overestimate of the possibly-true atoms tighten each other until stable.
pub fn well_founded(program: &PrimitiveProgram) -> Result<WellFounded, SolveError> {
    let mut rules = Vec::with_capacity(program.rules.len());
    for (index, r) in program.rules.iter().enumerate() {
        match r {
            PrimitiveRule::Basic { head, pos, neg } => rules.push(Normal { head: head.0, pos, neg }),
            _ => return Err(SolveError::UnsupportedRuleType { index }),
        }
    }
    let n = program.max_atom() as usize;
    let mut by_pos = vec![Vec::new(); n + 1];
    for (i, r) in rules.iter().enumerate() {
        for a in r.pos {
            by_pos[a.index()].push(i as u32);
        }
    }
    // true atoms block nothing; possibly-true atoms block their negations
    let mut possible = vec![true; n + 1];
    let mut certain;
    loop {
        certain = least_model(&rules, &by_pos, n, &possible);
        let next = least_model(&rules, &by_pos, n, &certain);
        if next == possible {
            break;
        }
        possible = next;
    }
    let mut wf = WellFounded { inconsistent: n >= 1 && certain[1], ..Default::default() };
    for a in 2..=n {
        let id = AtomId(a as u32);
        if certain[a] {
            wf.true_atoms.insert(id);
        } else if possible[a] {
            wf.unknown.insert(id);
        } else {
            wf.false_atoms.insert(id);
        }
    }
    Ok(wf)
}
