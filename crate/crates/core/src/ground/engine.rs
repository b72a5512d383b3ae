//! Rule compilation, joins over extensions, and resolution of rule
//! instances into ground rules.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::Range;

use indexmap::{IndexMap, IndexSet};

use super::program::{AtomId, GroundBody, GroundHead, GroundRule, Lit, SymbolTable};
use super::relation::{Relation, Tuple};
use super::value::{apply, compare, Symbols, Value};
use crate::diag::Diagnostic;
use crate::error::GroundError;
use crate::syntax::{Atom, BodyElem, BuiltinOp, CmpOp, Head, Literal, LiteralKind, Pos, PredKey, Rule, Term};

pub(crate) type PredId = usize;

/// Warnings, reported once per source position.
#[derive(Debug, Default)]
pub(crate) struct Warnings {
    seen: HashSet<(usize, u32, u32)>,
    pub list: Vec<Diagnostic>,
}

impl Warnings {
    fn push(&mut self, pos: Pos, message: String) {
        if self.seen.insert((pos.file, pos.line, pos.col)) {
            self.list.push(Diagnostic::warning(pos, message));
        }
    }
}

/// Predicates, symbolic constants and the extensions of evaluable predicates.
#[derive(Debug, Default)]
pub(crate) struct Db {
    pub symbols: Symbols,
    pub preds: IndexSet<PredKey>,
    pub relations: Vec<Relation>,
    pub evaluable: Vec<bool>,
    evaluable_keys: BTreeSet<PredKey>,
}

impl Db {
    pub fn new(evaluable_keys: BTreeSet<PredKey>) -> Self {
        Db { evaluable_keys, ..Db::default() }
    }

    pub fn pred(&mut self, key: &PredKey) -> PredId {
        if let Some(i) = self.preds.get_index_of(key) {
            return i;
        }
        self.preds.insert(key.clone());
        self.relations.push(Relation::default());
        self.evaluable.push(self.evaluable_keys.contains(key));
        self.preds.len() - 1
    }

    pub fn pred_id(&self, key: &PredKey) -> Option<PredId> {
        self.preds.get_index_of(key)
    }

    pub fn atom_text(&self, pred: PredId, args: &[Value]) -> String {
        self.symbols.atom_text(&self.preds[pred].name, args)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CTerm {
    Var(usize),
    Val(Value),
    Func(BuiltinOp, Vec<CTerm>),
    Range(Box<CTerm>, Box<CTerm>),
    Pool(Vec<CTerm>),
}

impl CTerm {
    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            CTerm::Var(s) => out.push(*s),
            CTerm::Val(_) => {}
            CTerm::Func(_, ts) | CTerm::Pool(ts) => ts.iter().for_each(|t| t.vars(out)),
            CTerm::Range(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn expands(&self) -> bool {
        match self {
            CTerm::Range(..) | CTerm::Pool(_) => true,
            CTerm::Func(_, ts) => ts.iter().any(CTerm::expands),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CAtom {
    pub pred: PredId,
    pub args: Vec<CTerm>,
    pub pos: Pos,
    expands: bool,
}

impl CAtom {
    fn vars(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.args.iter().for_each(|t| t.vars(&mut v));
        v
    }
}

#[derive(Debug, Clone)]
pub(crate) enum ArgPat {
    /// First occurrence of an unbound variable.
    Bind(usize),
    /// Variable bound by an earlier column of the same tuple.
    Same(usize),
    /// Column covered by the index key.
    Key,
    Check(CTerm),
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    Scan { no: usize, pred: PredId, pats: Vec<ArgPat>, mask: u64, keys: Vec<CTerm>, pos: Pos },
    Cmp { lhs: CTerm, op: CmpOp, rhs: CTerm, pos: Pos },
    /// Every expansion of the atom is (or, when negative, none is) in the extension.
    Member { atom: CAtom, negative: bool },
}

impl Step {
    fn vars(&self) -> Vec<usize> {
        match self {
            Step::Scan { .. } => Vec::new(),
            Step::Cmp { lhs, rhs, .. } => {
                let mut v = Vec::new();
                lhs.vars(&mut v);
                rhs.vars(&mut v);
                v
            }
            Step::Member { atom, .. } => atom.vars(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CElem {
    pub atom: CAtom,
    pub negative: bool,
    pub weight: CTerm,
    conditional: bool,
    conds: Vec<CAtom>,
    plan: Vec<Step>,
}

#[derive(Debug, Clone)]
pub(crate) struct CAgg {
    lower: Option<CTerm>,
    elems: Vec<CElem>,
    upper: Option<CTerm>,
    weighted: bool,
    pos: Pos,
}

#[derive(Debug, Clone)]
pub(crate) enum CHead {
    Atom(CAtom),
    Falsity,
    Agg(CAgg),
}

#[derive(Debug, Clone)]
pub(crate) enum COut {
    Lit(CElem),
    Agg(CAgg),
}

#[derive(Debug, Clone)]
pub(crate) struct CRule {
    pub nvars: usize,
    pub head: CHead,
    pub plan: Vec<Step>,
    /// Predicate of each numbered scan in `plan`.
    pub scan_preds: Vec<PredId>,
    pub out: Vec<COut>,
    /// Positive domain literals of the body, in textual order.
    pub keep: Vec<CAtom>,
    pub pos: Pos,
}

struct Compiler<'d> {
    db: &'d mut Db,
    names: Vec<String>,
    slots: HashMap<String, usize>,
}

impl Compiler<'_> {
    fn term(&mut self, t: &Term) -> CTerm {
        match t {
            Term::Variable(v) => {
                let next = self.names.len();
                let s = *self.slots.entry(v.clone()).or_insert(next);
                if s == next {
                    self.names.push(v.clone());
                }
                CTerm::Var(s)
            }
            Term::Symbol(s) => CTerm::Val(Value::Sym(self.db.symbols.intern(s))),
            Term::Integer(n) => CTerm::Val(Value::Int(*n)),
            Term::Range(a, b) => CTerm::Range(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Pool(ts) => CTerm::Pool(ts.iter().map(|t| self.term(t)).collect()),
            Term::Func(op, ts) => CTerm::Func(*op, ts.iter().map(|t| self.term(t)).collect()),
        }
    }

    fn atom(&mut self, a: &Atom) -> CAtom {
        let pred = self.db.pred(&a.key());
        let args: Vec<CTerm> = a.args.iter().map(|t| self.term(t)).collect();
        let expands = args.iter().any(CTerm::expands);
        CAtom { pred, args, pos: a.pos, expands }
    }

    fn elem(&mut self, l: &Literal, weight: Option<&Term>) -> Result<CElem, GroundError> {
        let weight = match weight {
            Some(w) => self.term(w),
            None => CTerm::Val(Value::Int(1)),
        };
        match &l.kind {
            LiteralKind::Atom(a) => Ok(CElem {
                atom: self.atom(a),
                negative: l.negative,
                weight,
                conditional: false,
                conds: Vec::new(),
                plan: Vec::new(),
            }),
            LiteralKind::Conditional { atom, conditions } => Ok(CElem {
                atom: self.atom(atom),
                negative: l.negative,
                weight,
                conditional: true,
                conds: conditions.iter().map(|c| self.atom(c)).collect(),
                plan: Vec::new(),
            }),
            LiteralKind::Comparison { pos, .. } => Err(GroundError::Unsupported {
                pos: *pos,
                message: "comparison inside a cardinality or weight constraint".into(),
            }),
        }
    }

    fn agg(
        &mut self,
        lower: &Option<Term>,
        elems: Vec<(&Literal, Option<&Term>)>,
        upper: &Option<Term>,
        weighted: bool,
        pos: Pos,
    ) -> Result<CAgg, GroundError> {
        let lower = lower.as_ref().map(|t| self.term(t));
        let elems = elems.into_iter().map(|(l, w)| self.elem(l, w)).collect::<Result<_, _>>()?;
        let upper = upper.as_ref().map(|t| self.term(t));
        Ok(CAgg { lower, elems, upper, weighted, pos })
    }
}

/// Orders scans greedily by ascending extension size, placing each filter
/// right after the scan that binds its last variable.
fn build_plan(
    db: &Db,
    mut scans: Vec<CAtom>,
    mut filters: Vec<Step>,
    bound: &mut [bool],
    scan_preds: Option<&mut Vec<PredId>>,
    names: &[String],
    pos: Pos,
) -> Result<Vec<Step>, GroundError> {
    let mut numbering = scan_preds;
    let mut plan = Vec::new();
    let place_filters = |filters: &mut Vec<Step>, plan: &mut Vec<Step>, bound: &[bool]| {
        let mut i = 0;
        while i < filters.len() {
            if filters[i].vars().iter().all(|&s| bound[s]) {
                plan.push(filters.remove(i));
            } else {
                i += 1;
            }
        }
    };
    place_filters(&mut filters, &mut plan, bound);
    while !scans.is_empty() {
        let ready = |a: &CAtom| {
            a.args.iter().all(|t| match t {
                CTerm::Var(_) => true,
                t => {
                    let mut v = Vec::new();
                    t.vars(&mut v);
                    v.iter().all(|&s| bound[s])
                }
            })
        };
        let Some(best) = (0..scans.len())
            .filter(|&i| ready(&scans[i]))
            .min_by_key(|&i| (db.relations[scans[i].pred].len(), i))
        else {
            break;
        };
        let atom = scans.remove(best);
        let mut pats = Vec::with_capacity(atom.args.len());
        let mut keys = Vec::new();
        let mut mask = 0u64;
        let mut here: Vec<usize> = Vec::new();
        for (col, t) in atom.args.into_iter().enumerate() {
            match t {
                CTerm::Var(s) if here.contains(&s) => pats.push(ArgPat::Same(s)),
                CTerm::Var(s) if !bound[s] => {
                    here.push(s);
                    pats.push(ArgPat::Bind(s));
                }
                t if col < 64 => {
                    mask |= 1 << col;
                    keys.push(t);
                    pats.push(ArgPat::Key);
                }
                t => pats.push(ArgPat::Check(t)),
            }
        }
        for &s in &here {
            bound[s] = true;
        }
        let no = match numbering.as_deref_mut() {
            Some(v) => {
                v.push(atom.pred);
                v.len() - 1
            }
            None => usize::MAX,
        };
        plan.push(Step::Scan { no, pred: atom.pred, pats, mask, keys, pos: atom.pos });
        place_filters(&mut filters, &mut plan, bound);
    }
    let leftover = scans.iter().flat_map(CAtom::vars).chain(filters.iter().flat_map(Step::vars));
    if let Some(s) = leftover.into_iter().find(|&s| !bound[s]) {
        return Err(GroundError::Unsupported { pos, message: format!("variable `{}` is not bound", names[s]) });
    }
    Ok(plan)
}

/// Compiles `rule` against the current extension sizes.
pub(crate) fn compile_rule(db: &mut Db, rule: &Rule) -> Result<CRule, GroundError> {
    let mut c = Compiler { db, names: Vec::new(), slots: HashMap::new() };
    let head = match &rule.head {
        Head::Atom(a) => CHead::Atom(c.atom(a)),
        Head::Falsity => CHead::Falsity,
        Head::Cardinality { lower, elems, upper } => {
            CHead::Agg(c.agg(lower, elems.iter().map(|l| (l, None)).collect(), upper, false, rule.pos)?)
        }
        Head::Weight { lower, elems, upper } => CHead::Agg(c.agg(
            lower,
            elems.iter().map(|e| (&e.literal, Some(&e.weight))).collect(),
            upper,
            true,
            rule.pos,
        )?),
    };
    let mut scans = Vec::new();
    let mut filters = Vec::new();
    let mut out = Vec::new();
    for b in &rule.body {
        match b {
            BodyElem::Literal(l) => match &l.kind {
                LiteralKind::Atom(a) => {
                    let ca = c.atom(a);
                    if c.db.evaluable[ca.pred] {
                        if !l.negative && !ca.expands {
                            scans.push(ca);
                        } else {
                            filters.push(Step::Member { atom: ca, negative: l.negative });
                        }
                    } else {
                        out.push(COut::Lit(c.elem(l, None)?));
                    }
                }
                LiteralKind::Comparison { lhs, op, rhs, pos } => {
                    filters.push(Step::Cmp { lhs: c.term(lhs), op: *op, rhs: c.term(rhs), pos: *pos });
                }
                LiteralKind::Conditional { .. } => out.push(COut::Lit(c.elem(l, None)?)),
            },
            BodyElem::Cardinality { lower, elems, upper } => {
                out.push(COut::Agg(c.agg(lower, elems.iter().map(|l| (l, None)).collect(), upper, false, rule.pos)?))
            }
            BodyElem::Weight { lower, elems, upper } => out.push(COut::Agg(c.agg(
                lower,
                elems.iter().map(|e| (&e.literal, Some(&e.weight))).collect(),
                upper,
                true,
                rule.pos,
            )?)),
        }
    }
    let Compiler { db, names, .. } = c;
    let nvars = names.len();
    let keep = scans.clone();
    let mut bound = vec![false; nvars];
    let mut scan_preds = Vec::new();
    let plan = build_plan(db, scans, filters, &mut bound, Some(&mut scan_preds), &names, rule.pos)?;

    let mut head = head;
    let plan_conds = |e: &mut CElem| -> Result<(), GroundError> {
        if e.conditional {
            let mut local = bound.clone();
            let (scans, filters): (Vec<CAtom>, Vec<CAtom>) = e.conds.drain(..).partition(|a| !a.expands);
            let filters = filters.into_iter().map(|atom| Step::Member { atom, negative: false }).collect();
            e.plan = build_plan(db, scans, filters, &mut local, None, &names, e.atom.pos)?;
            let mut v = e.atom.vars();
            e.weight.vars(&mut v);
            if let Some(s) = v.into_iter().find(|&s| !local[s]) {
                return Err(GroundError::Unsupported {
                    pos: e.atom.pos,
                    message: format!("variable `{}` is not bound", names[s]),
                });
            }
        }
        Ok(())
    };
    let mut plan_conds = plan_conds;
    if let CHead::Agg(a) = &mut head {
        a.elems.iter_mut().try_for_each(&mut plan_conds)?;
    }
    for o in &mut out {
        match o {
            COut::Lit(e) => plan_conds(e)?,
            COut::Agg(a) => a.elems.iter_mut().try_for_each(&mut plan_conds)?,
        }
    }
    Ok(CRule { nvars, head, plan, scan_preds, out, keep, pos: rule.pos })
}

/// Compiles a ground atom outside any rule (compute statements).
pub(crate) fn compile_ground_atom(db: &mut Db, a: &Atom) -> CAtom {
    let mut c = Compiler { db, names: Vec::new(), slots: HashMap::new() };
    c.atom(a)
}

/// Variable bindings plus the warning sink.
#[derive(Debug, Default)]
pub(crate) struct Env {
    pub vals: Vec<Option<Value>>,
    pub warn: Warnings,
}

impl Env {
    pub fn reset(&mut self, nvars: usize) {
        self.vals.clear();
        self.vals.resize(nvars, None);
    }
}

fn unbound(pos: Pos) -> GroundError {
    GroundError::Unsupported { pos, message: "internal error: unbound variable during grounding".into() }
}

pub(crate) fn eval_int(db: &Db, t: &CTerm, env: &Env, pos: Pos) -> Result<i64, GroundError> {
    match t {
        CTerm::Var(s) => match env.vals[*s] {
            Some(Value::Int(n)) => Ok(n),
            Some(Value::Sym(c)) => Err(GroundError::Arithmetic {
                pos,
                message: format!("symbolic constant `{}` used as a number", db.symbols.name(c)),
            }),
            None => Err(unbound(pos)),
        },
        CTerm::Val(Value::Int(n)) => Ok(*n),
        CTerm::Val(Value::Sym(c)) => Err(GroundError::UnboundConstant { pos, name: db.symbols.name(*c).to_string() }),
        CTerm::Func(op, args) => {
            let vals = args.iter().map(|a| eval_int(db, a, env, pos)).collect::<Result<Vec<_>, _>>()?;
            apply(*op, &vals, pos)
        }
        CTerm::Range(..) | CTerm::Pool(_) => {
            Err(GroundError::Unsupported { pos, message: "range or pool used inside arithmetic".into() })
        }
    }
}

pub(crate) fn eval_value(db: &Db, t: &CTerm, env: &Env, pos: Pos) -> Result<Value, GroundError> {
    match t {
        CTerm::Var(s) => env.vals[*s].ok_or_else(|| unbound(pos)),
        CTerm::Val(v) => Ok(*v),
        _ => eval_int(db, t, env, pos).map(Value::Int),
    }
}

fn expand_term(db: &Db, t: &CTerm, env: &mut Env, pos: Pos, out: &mut Vec<Value>) -> Result<(), GroundError> {
    match t {
        CTerm::Range(a, b) => {
            let lo = eval_int(db, a, env, pos)?;
            let hi = eval_int(db, b, env, pos)?;
            if lo > hi {
                env.warn.push(pos, format!("empty range {lo}..{hi}"));
            }
            out.extend((lo..=hi).map(Value::Int));
        }
        CTerm::Pool(ts) => {
            for t in ts {
                expand_term(db, t, env, pos, out)?;
            }
        }
        t => out.push(eval_value(db, t, env, pos)?),
    }
    Ok(())
}

/// All argument tuples of `atom` under the current binding (several when
/// arguments contain ranges or pools).
pub(crate) fn expand_args(db: &Db, atom: &CAtom, env: &mut Env) -> Result<Vec<Tuple>, GroundError> {
    if !atom.expands {
        let t = atom.args.iter().map(|a| eval_value(db, a, env, atom.pos)).collect::<Result<Tuple, _>>()?;
        return Ok(vec![t]);
    }
    let mut tuples: Vec<Vec<Value>> = vec![Vec::with_capacity(atom.args.len())];
    let mut vals = Vec::new();
    for a in &atom.args {
        vals.clear();
        expand_term(db, a, env, atom.pos, &mut vals)?;
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                vals.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(*v);
                    t
                })
            })
            .collect();
    }
    Ok(tuples.into_iter().map(Vec::into_boxed_slice).collect())
}

pub(crate) type Emit<'a> = dyn FnMut(&Db, &mut Env) -> Result<(), GroundError> + 'a;

/// Enumerates the bindings satisfying `steps`. Scan `no` reads the tuple
/// ids in `src[no]` (all tuples when absent).
pub(crate) fn join(
    db: &Db,
    steps: &[Step],
    env: &mut Env,
    src: &[Range<u32>],
    emit: &mut Emit<'_>,
) -> Result<(), GroundError> {
    let Some((step, rest)) = steps.split_first() else { return emit(db, env) };
    match step {
        Step::Cmp { lhs, op, rhs, pos } => {
            let a = eval_value(db, lhs, env, *pos)?;
            let b = eval_value(db, rhs, env, *pos)?;
            if compare(&db.symbols, *op, a, b) {
                join(db, rest, env, src, emit)?;
            }
        }
        Step::Member { atom, negative } => {
            let rel = &db.relations[atom.pred];
            let tuples = expand_args(db, atom, env)?;
            if tuples.iter().all(|t| rel.contains(t) != *negative) {
                join(db, rest, env, src, emit)?;
            }
        }
        Step::Scan { no, pred, pats, mask, keys, pos } => {
            let rel = &db.relations[*pred];
            let range = src.get(*no).cloned().unwrap_or(0..rel.len() as u32);
            if *mask == 0 {
                for id in range {
                    scan_one(db, rel.get(id), pats, rest, env, src, emit, *pos)?;
                }
            } else {
                let key = keys.iter().map(|k| eval_value(db, k, env, *pos)).collect::<Result<Vec<_>, _>>()?;
                let ids = rel.lookup(*mask, &key);
                let start = ids.partition_point(|&i| i < range.start);
                for &id in &ids[start..] {
                    if id >= range.end {
                        break;
                    }
                    scan_one(db, rel.get(id), pats, rest, env, src, emit, *pos)?;
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn scan_one(
    db: &Db,
    tuple: &[Value],
    pats: &[ArgPat],
    rest: &[Step],
    env: &mut Env,
    src: &[Range<u32>],
    emit: &mut Emit<'_>,
    pos: Pos,
) -> Result<(), GroundError> {
    let mut ok = true;
    for (pat, v) in pats.iter().zip(tuple) {
        ok = match pat {
            ArgPat::Bind(s) => {
                env.vals[*s] = Some(*v);
                true
            }
            ArgPat::Same(s) => env.vals[*s] == Some(*v),
            ArgPat::Key => true,
            ArgPat::Check(t) => eval_value(db, t, env, pos)? == *v,
        };
        if !ok {
            break;
        }
    }
    if ok {
        join(db, rest, env, src, emit)?;
    }
    for pat in pats {
        if let ArgPat::Bind(s) = pat {
            env.vals[*s] = None;
        }
    }
    Ok(())
}

/// Ground atom numbering for non-evaluated predicates.
#[derive(Debug, Default)]
pub(crate) struct AtomTable {
    map: Vec<HashMap<Tuple, AtomId>>,
    pub symbols: SymbolTable,
}

impl AtomTable {
    pub fn new() -> Self {
        AtomTable { map: Vec::new(), symbols: SymbolTable::new() }
    }

    pub fn intern(&mut self, db: &Db, pred: PredId, args: &[Value]) -> AtomId {
        if self.map.len() <= pred {
            self.map.resize_with(pred + 1, HashMap::new);
        }
        if let Some(&id) = self.map[pred].get(args) {
            return id;
        }
        let id = self.symbols.intern(&db.atom_text(pred, args));
        self.map[pred].insert(args.into(), id);
        id
    }
}

enum Res {
    Known(bool),
    Atom(AtomId),
}

fn resolve(
    db: &Db,
    atoms: Option<&mut AtomTable>,
    pred: PredId,
    t: &[Value],
    pos: Pos,
) -> Result<Res, GroundError> {
    if db.evaluable[pred] {
        return Ok(Res::Known(db.relations[pred].contains(t)));
    }
    match atoms {
        Some(tab) => Ok(Res::Atom(tab.intern(db, pred, t))),
        None => Err(GroundError::Unsupported {
            pos,
            message: format!("{} is not evaluable here", db.preds[pred]),
        }),
    }
}

struct Instance {
    pred: PredId,
    args: Tuple,
    negative: bool,
    weight: i64,
}

fn instances(db: &Db, e: &CElem, env: &mut Env) -> Result<Vec<Instance>, GroundError> {
    let mut out = Vec::new();
    let mut one = |db: &Db, env: &mut Env| -> Result<(), GroundError> {
        let weight = eval_int(db, &e.weight, env, e.atom.pos)?;
        for args in expand_args(db, &e.atom, env)? {
            out.push(Instance { pred: e.atom.pred, args, negative: e.negative, weight });
        }
        Ok(())
    };
    if e.conditional {
        join(db, &e.plan, env, &[], &mut one)?;
    } else {
        one(db, env)?;
    }
    Ok(out)
}

pub(crate) enum AggOut {
    True,
    False,
    Elems { lower: i64, elems: Vec<(Lit, i64)>, upper: Option<i64> },
}

fn overflow(pos: Pos) -> GroundError {
    GroundError::Arithmetic { pos, message: "integer overflow in constraint bound".into() }
}

fn resolve_agg(db: &Db, agg: &CAgg, env: &mut Env, mut atoms: Option<&mut AtomTable>) -> Result<AggOut, GroundError> {
    let lower = match &agg.lower {
        Some(t) => eval_int(db, t, env, agg.pos)?,
        None => 0,
    };
    let upper = agg.upper.as_ref().map(|t| eval_int(db, t, env, agg.pos)).transpose()?;
    let mut fixed = 0i64;
    let mut elems: IndexMap<Lit, i64> = IndexMap::new();
    let mut seen: HashSet<(PredId, Tuple, bool)> = HashSet::new();
    for e in &agg.elems {
        for inst in instances(db, e, env)? {
            if !agg.weighted && !seen.insert((inst.pred, inst.args.clone(), inst.negative)) {
                continue;
            }
            match resolve(db, atoms.as_deref_mut(), inst.pred, &inst.args, e.atom.pos)? {
                Res::Known(b) => {
                    if b != inst.negative {
                        fixed = fixed.checked_add(inst.weight).ok_or_else(|| overflow(agg.pos))?;
                    }
                }
                Res::Atom(id) => {
                    let w = elems.entry(Lit { atom: id, negative: inst.negative }).or_insert(0);
                    *w = w.checked_add(inst.weight).ok_or_else(|| overflow(agg.pos))?;
                }
            }
        }
    }
    let lower = lower.checked_sub(fixed).ok_or_else(|| overflow(agg.pos))?;
    let upper = upper.map(|u| u.checked_sub(fixed).ok_or_else(|| overflow(agg.pos))).transpose()?;
    if elems.is_empty() {
        let sat = lower <= 0 && upper.is_none_or(|u| u >= 0);
        return Ok(if sat { AggOut::True } else { AggOut::False });
    }
    Ok(AggOut::Elems { lower, elems: elems.into_iter().collect(), upper })
}

/// Ground body of the current instance, or `None` when some evaluated
/// literal is false.
pub(crate) fn resolve_body(
    db: &Db,
    rule: &CRule,
    env: &mut Env,
    mut atoms: Option<&mut AtomTable>,
) -> Result<Option<Vec<GroundBody>>, GroundError> {
    let mut body = Vec::new();
    for o in &rule.out {
        match o {
            COut::Lit(e) => {
                for inst in instances(db, e, env)? {
                    match resolve(db, atoms.as_deref_mut(), inst.pred, &inst.args, e.atom.pos)? {
                        Res::Known(b) => {
                            if b == inst.negative {
                                return Ok(None);
                            }
                        }
                        Res::Atom(id) => body.push(GroundBody::Lit(Lit { atom: id, negative: inst.negative })),
                    }
                }
            }
            COut::Agg(a) => match resolve_agg(db, a, env, atoms.as_deref_mut())? {
                AggOut::True => {}
                AggOut::False => return Ok(None),
                AggOut::Elems { lower, elems, upper } => body.push(if a.weighted {
                    GroundBody::Weight { lower, elems, upper }
                } else {
                    GroundBody::Cardinality { lower, lits: elems.into_iter().map(|e| e.0).collect(), upper }
                }),
            },
        }
    }
    Ok(Some(body))
}

/// Ground heads of the current instance; an empty list means the rule
/// instance is trivially satisfied.
pub(crate) fn resolve_head(
    db: &Db,
    rule: &CRule,
    env: &mut Env,
    atoms: &mut AtomTable,
) -> Result<Vec<GroundHead>, GroundError> {
    match &rule.head {
        CHead::Falsity => Ok(vec![GroundHead::Falsity]),
        CHead::Atom(a) => Ok(expand_args(db, a, env)?
            .iter()
            .map(|t| GroundHead::Atom(atoms.intern(db, a.pred, t)))
            .collect()),
        CHead::Agg(agg) => {
            if let Some(e) = agg.elems.iter().find(|e| e.negative) {
                return Err(GroundError::Unsupported {
                    pos: e.atom.pos,
                    message: "negative literal in a rule head".into(),
                });
            }
            Ok(match resolve_agg(db, agg, env, Some(atoms))? {
                AggOut::True => Vec::new(),
                AggOut::False => vec![GroundHead::Falsity],
                AggOut::Elems { lower, elems, upper } if agg.weighted => vec![GroundHead::Weight {
                    lower,
                    elems: elems.into_iter().map(|(l, w)| (l.atom, w)).collect(),
                    upper,
                }],
                AggOut::Elems { lower, elems, upper } => vec![GroundHead::Cardinality {
                    lower,
                    atoms: elems.into_iter().map(|(l, _)| l.atom).collect(),
                    upper,
                }],
            })
        }
    }
}

/// Instantiates one non-evaluated rule, appending its ground instances.
pub(crate) fn instantiate(
    db: &Db,
    rule: &CRule,
    env: &mut Env,
    atoms: &mut AtomTable,
    keep_domain: bool,
    out: &mut Vec<GroundRule>,
) -> Result<(), GroundError> {
    env.reset(rule.nvars);
    join(db, &rule.plan, env, &[], &mut |db, env| {
        let Some(mut body) = resolve_body(db, rule, env, Some(atoms))? else { return Ok(()) };
        if keep_domain && !rule.keep.is_empty() {
            let mut kept = Vec::with_capacity(rule.keep.len() + body.len());
            for a in &rule.keep {
                for t in expand_args(db, a, env)? {
                    kept.push(GroundBody::Lit(Lit::pos(atoms.intern(db, a.pred, &t))));
                }
            }
            kept.append(&mut body);
            body = kept;
        }
        let heads = resolve_head(db, rule, env, atoms)?;
        if let Some((last, init)) = heads.split_last() {
            for h in init {
                out.push(GroundRule { head: h.clone(), body: body.clone() });
            }
            out.push(GroundRule { head: last.clone(), body });
        }
        Ok(())
    })
}

/// Derives the head tuples of an evaluated rule, reading scan `no` from
/// `src[no]`. New tuples are appended to `out`.
pub(crate) fn derive(
    db: &Db,
    rule: &CRule,
    env: &mut Env,
    src: &[Range<u32>],
    out: &mut Vec<(PredId, Tuple)>,
) -> Result<(), GroundError> {
    let CHead::Atom(head) = &rule.head else {
        return Err(GroundError::Unsupported { pos: rule.pos, message: "evaluated rule without an atom head".into() });
    };
    env.reset(rule.nvars);
    join(db, &rule.plan, env, src, &mut |db, env| {
        if resolve_body(db, rule, env, None)?.is_some() {
            for t in expand_args(db, head, env)? {
                if !db.relations[head.pred].contains(&t) {
                    out.push((head.pred, t));
                }
            }
        }
        Ok(())
    })
}

/// Predicates read by the rule outside its numbered scans, split into
/// monotone reads (positive membership) and non-monotone ones (negation,
/// conditions, constraint elements). Used for stratification.
pub(crate) fn reads(rule: &CRule) -> (Vec<PredId>, Vec<PredId>) {
    let mut mono = Vec::new();
    let mut non = Vec::new();
    fn steps(s: &[Step], mono: &mut Vec<PredId>, non: &mut Vec<PredId>) {
        for st in s {
            match st {
                Step::Member { atom, negative: true } => non.push(atom.pred),
                Step::Member { atom, negative: false } => mono.push(atom.pred),
                Step::Scan { no: usize::MAX, pred, .. } => non.push(*pred),
                _ => {}
            }
        }
    }
    steps(&rule.plan, &mut mono, &mut non);
    for o in &rule.out {
        match o {
            COut::Lit(e) => {
                if e.negative {
                    non.push(e.atom.pred);
                } else {
                    mono.push(e.atom.pred);
                }
                let mut conds = Vec::new();
                steps(&e.plan, &mut conds, &mut non);
                non.extend(conds);
            }
            COut::Agg(a) => {
                for e in &a.elems {
                    non.push(e.atom.pred);
                    let mut conds = Vec::new();
                    steps(&e.plan, &mut conds, &mut non);
                    non.extend(conds);
                }
            }
        }
    }
    (mono, non)
}

/// Index masks used by the scans of `rule`, conditions included.
pub(crate) fn index_masks(rule: &CRule, out: &mut Vec<(PredId, u64)>) {
    fn steps(s: &[Step], out: &mut Vec<(PredId, u64)>) {
        for st in s {
            if let Step::Scan { pred, mask, .. } = st {
                if *mask != 0 {
                    out.push((*pred, *mask));
                }
            }
        }
    }
    steps(&rule.plan, out);
    let aggs = rule.out.iter().filter_map(|o| match o {
        COut::Agg(a) => Some(a),
        COut::Lit(_) => None,
    });
    let head = match &rule.head {
        CHead::Agg(a) => Some(a),
        _ => None,
    };
    for a in aggs.chain(head) {
        a.elems.iter().for_each(|e| steps(&e.plan, out));
    }
    for o in &rule.out {
        if let COut::Lit(e) = o {
            steps(&e.plan, out);
        }
    }
}
