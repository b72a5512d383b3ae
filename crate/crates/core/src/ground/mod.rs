//! Bottom-up evaluation of domain predicates and rule instantiation.

mod engine;
pub mod program;
mod relation;
mod value;

use std::collections::{BTreeSet, HashSet};
use std::ops::Range;

pub use program::{AtomId, ComputeSpec, GroundBody, GroundHead, GroundProgram, GroundRule, Lit, SymbolTable};
pub use value::{Symbols, Value};

use engine::{compile_ground_atom, compile_rule, derive, instantiate, reads, AtomTable, CRule, Db, Env, PredId};
use crate::analysis::{DependencyGraph, DomainInfo};
use crate::diag::Diagnostic;
use crate::error::GroundError;
use crate::syntax::{Head, LiteralKind, PredKey, Program};

/// What happens to domain predicates in the ground program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainMode {
    /// Domain facts are emitted and positive domain body literals retained.
    #[default]
    KeepDomain,
    /// All domain predicates are evaluated away (`-d none`).
    RemoveDomain,
}

/// Extensions of the evaluated predicates.
#[derive(Debug)]
pub struct Extension {
    db: Db,
    order: Vec<PredId>,
    warnings: Vec<Diagnostic>,
}

impl Extension {
    /// Evaluated predicates, callees first.
    pub fn predicates(&self) -> Vec<&PredKey> {
        self.order.iter().map(|&p| &self.db.preds[p]).collect()
    }

    pub fn len(&self, key: &PredKey) -> usize {
        self.db.pred_id(key).map_or(0, |p| self.db.relations[p].len())
    }

    pub fn is_empty(&self, key: &PredKey) -> bool {
        self.len(key) == 0
    }

    /// Ground atoms of `key` as text, e.g. `d(1)`.
    pub fn atoms(&self, key: &PredKey) -> BTreeSet<String> {
        let Some(p) = self.db.pred_id(key) else { return BTreeSet::new() };
        self.db.relations[p].iter().map(|t| self.db.atom_text(p, t)).collect()
    }

    /// Argument tuples of `key` as text.
    pub fn tuples(&self, key: &PredKey) -> BTreeSet<Vec<String>> {
        let Some(p) = self.db.pred_id(key) else { return BTreeSet::new() };
        self.db.relations[p]
            .iter()
            .map(|t| {
                t.iter()
                    .map(|v| {
                        let mut s = String::new();
                        self.db.symbols.write_value(&mut s, *v);
                        s
                    })
                    .collect()
            })
            .collect()
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }
}

/// A ground program along with the warnings raised while grounding.
#[derive(Debug, Clone)]
pub struct Grounding {
    pub program: GroundProgram,
    pub warnings: Vec<Diagnostic>,
}

/// Least model of the rules defining domain predicates, by semi-naive
/// iteration over the strata of `graph`.
pub fn evaluate_domain_predicates(
    program: &Program,
    graph: &DependencyGraph,
    info: &DomainInfo,
) -> Result<Extension, GroundError> {
    let domain = graph.predicates().iter().filter(|k| info.is_domain(k)).cloned().collect();
    evaluate_fixpoint(program, graph, domain)
}

/// Least model of the rules whose head is in `evaluable`, which must be
/// closed under dependencies and stratified. Recursion among evaluable
/// predicates is allowed.
pub fn evaluate_fixpoint(
    program: &Program,
    graph: &DependencyGraph,
    evaluable: BTreeSet<PredKey>,
) -> Result<Extension, GroundError> {
    let mut db = Db::new(evaluable);
    let mut env = Env::default();
    let mut order = Vec::new();
    for stratum in graph.strata() {
        let ids: Vec<PredId> = stratum.iter().map(|k| db.pred(k)).collect();
        let members: HashSet<PredId> = ids.into_iter().filter(|&p| db.evaluable[p]).collect();
        if members.is_empty() {
            continue;
        }
        let mut ids: Vec<PredId> = members.iter().copied().collect();
        ids.sort_unstable();
        order.extend(&ids);
        let mut rules = Vec::new();
        for rule in &program.rules {
            if let Head::Atom(a) = &rule.head {
                if db.pred_id(&a.key()).is_some_and(|p| members.contains(&p)) {
                    let cr = compile_rule(&mut db, rule)?;
                    let (mono, non) = reads(&cr);
                    if let Some(&p) = non.iter().find(|p| members.contains(p)) {
                        return Err(GroundError::Unsupported {
                            pos: rule.pos,
                            message: format!("{} depends non-monotonically on itself", db.preds[p]),
                        });
                    }
                    let full = mono.iter().any(|p| members.contains(p));
                    prepare(&mut db, &cr);
                    rules.push((cr, full));
                }
            }
        }
        evaluate_stratum(&mut db, &mut env, &rules, &members)?;
    }
    Ok(Extension { db, order, warnings: env.warn.list })
}

fn evaluate_stratum(
    db: &mut Db,
    env: &mut Env,
    rules: &[(CRule, bool)],
    members: &HashSet<PredId>,
) -> Result<(), GroundError> {
    let mut new = Vec::new();
    for (r, _) in rules {
        derive(db, r, env, &[], &mut new)?;
    }
    loop {
        let before: Vec<(PredId, u32)> = members.iter().map(|&p| (p, db.relations[p].len() as u32)).collect();
        let mut grew = false;
        for (p, t) in new.drain(..) {
            grew |= db.relations[p].insert(t);
        }
        if !grew {
            return Ok(());
        }
        let delta = |p: PredId| -> Range<u32> {
            let start = before.iter().find(|b| b.0 == p).map_or(0, |b| b.1);
            start..db.relations[p].len() as u32
        };
        for (r, full) in rules {
            if *full {
                derive(db, r, env, &[], &mut new)?;
                continue;
            }
            for (j, &pj) in r.scan_preds.iter().enumerate() {
                if !members.contains(&pj) {
                    continue;
                }
                let src: Vec<Range<u32>> = r
                    .scan_preds
                    .iter()
                    .enumerate()
                    .map(|(k, &pk)| if k == j { delta(pk) } else { 0..db.relations[pk].len() as u32 })
                    .collect();
                derive(db, r, env, &src, &mut new)?;
            }
        }
    }
}

fn prepare(db: &mut Db, rule: &CRule) {
    let mut masks = Vec::new();
    engine::index_masks(rule, &mut masks);
    for (p, m) in masks {
        db.relations[p].ensure_index(m);
    }
}

/// Instantiates every rule not defining an evaluated predicate.
pub fn instantiate_rules(program: &Program, ext: Extension, mode: DomainMode) -> Result<Grounding, GroundError> {
    let Extension { mut db, order, warnings } = ext;
    let mut env = Env::default();
    let mut atoms = AtomTable::new();
    let mut rules = Vec::new();
    let keep = mode == DomainMode::KeepDomain;
    if keep {
        for &p in &order {
            for t in db.relations[p].iter() {
                rules.push(GroundRule::fact(atoms.intern(&db, p, t)));
            }
        }
    }
    for rule in &program.rules {
        if let Head::Atom(a) = &rule.head {
            if db.pred_id(&a.key()).is_some_and(|p| db.evaluable[p]) {
                continue;
            }
        }
        let cr = compile_rule(&mut db, rule)?;
        prepare(&mut db, &cr);
        instantiate(&db, &cr, &mut env, &mut atoms, keep, &mut rules)?;
    }

    let mut compute = ComputeSpec::default();
    if let Some(c) = &program.compute {
        if let Some(n) = c.models {
            compute.models = n;
        }
        for l in &c.literals {
            let LiteralKind::Atom(a) = &l.kind else {
                return Err(GroundError::Unsupported {
                    pos: l.position(),
                    message: "compute statements take plain literals only".into(),
                });
            };
            let ca = compile_ground_atom(&mut db, a);
            env.reset(0);
            for t in engine::expand_args(&db, &ca, &mut env)? {
                if db.evaluable[ca.pred] {
                    if db.relations[ca.pred].contains(&t) == l.negative {
                        compute.positive.push(AtomId::FALSE);
                    }
                } else {
                    let id = atoms.intern(&db, ca.pred, &t);
                    if l.negative {
                        compute.negative.push(id);
                    } else {
                        compute.positive.push(id);
                    }
                }
            }
        }
    }
    let mut all_warnings = warnings;
    all_warnings.extend(env.warn.list);
    Ok(Grounding { program: GroundProgram { rules, symbols: atoms.symbols, compute }, warnings: all_warnings })
}

/// Domain evaluation followed by instantiation. The program is assumed to
/// have passed the domain-restriction check.
pub fn ground(program: &Program, mode: DomainMode) -> Result<Grounding, GroundError> {
    let (graph, info) = crate::analysis::analyze(program);
    let ext = evaluate_domain_predicates(program, &graph, &info)?;
    instantiate_rules(program, ext, mode)
}

#[cfg(test)]
mod tests;
