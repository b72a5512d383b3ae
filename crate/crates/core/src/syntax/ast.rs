//! Symbolic (non-ground) program representation.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

/// Source location of a token: file index, 1-based line and column.
///
/// Positions never participate in equality or hashing, so two ASTs parsed
/// from differently formatted text compare equal when their structure does.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub file: usize,
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(file: usize, line: u32, col: u32) -> Self {
        Pos { file, line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Hash for Pos {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// Built-in integer functions. `Neg` is unary minus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Abs,
    Neg,
}

impl BuiltinOp {
    pub fn arity(self) -> usize {
        match self {
            BuiltinOp::Abs | BuiltinOp::Neg => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BuiltinOp::Add => "+",
            BuiltinOp::Sub | BuiltinOp::Neg => "-",
            BuiltinOp::Mul => "*",
            BuiltinOp::Div => "/",
            BuiltinOp::Mod => "mod",
            BuiltinOp::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Variable(String),
    Symbol(String),
    Integer(i64),
    /// `lo..hi`; only valid directly in an atom argument position.
    Range(Box<Term>, Box<Term>),
    /// `a ; b ; c`; only valid directly in an atom argument position.
    Pool(Vec<Term>),
    Func(BuiltinOp, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Variable(name.to_string())
    }

    pub fn sym(name: &str) -> Term {
        Term::Symbol(name.to_string())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Symbol(_) | Term::Integer(_) => true,
            Term::Range(lo, hi) => lo.is_ground() && hi.is_ground(),
            Term::Pool(ts) | Term::Func(_, ts) => ts.iter().all(Term::is_ground),
        }
    }

    /// Appends every variable name occurring in the term, in order, with repeats.
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Variable(v) => out.push(v),
            Term::Symbol(_) | Term::Integer(_) => {}
            Term::Range(lo, hi) => {
                lo.collect_vars(out);
                hi.collect_vars(out);
            }
            Term::Pool(ts) | Term::Func(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn has_range_or_pool(&self) -> bool {
        matches!(self, Term::Range(..) | Term::Pool(_))
    }

    pub(crate) fn map_symbols(&mut self, f: &mut impl FnMut(&str) -> Option<Term>) {
        match self {
            Term::Symbol(name) => {
                if let Some(t) = f(name) {
                    *self = t;
                }
            }
            Term::Variable(_) | Term::Integer(_) => {}
            Term::Range(lo, hi) => {
                lo.map_symbols(f);
                hi.map_symbols(f);
            }
            Term::Pool(ts) | Term::Func(_, ts) => ts.iter_mut().for_each(|t| t.map_symbols(f)),
        }
    }
}

/// Predicate name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: String,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey { name: name.to_string(), arity }
    }
}

impl std::fmt::Display for PredKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
    pub pos: Pos,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.to_string(), args, pos: Pos::default() }
    }

    pub fn key(&self) -> PredKey {
        PredKey::new(&self.pred, self.args.len())
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        self.args.iter().for_each(|t| t.collect_vars(out));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A literal's payload. Comparisons are always positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    Atom(Atom),
    Comparison { lhs: Term, op: CmpOp, rhs: Term, pos: Pos },
    /// `atom : cond1 : cond2`; conditions must be domain predicates.
    Conditional { atom: Atom, conditions: Vec<Atom> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negative: bool,
    pub kind: LiteralKind,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { negative: false, kind: LiteralKind::Atom(atom) }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { negative: true, kind: LiteralKind::Atom(atom) }
    }

    /// The atom carrying the literal's predicate, if any.
    pub fn atom(&self) -> Option<&Atom> {
        match &self.kind {
            LiteralKind::Atom(a) | LiteralKind::Conditional { atom: a, .. } => Some(a),
            LiteralKind::Comparison { .. } => None,
        }
    }

    pub fn position(&self) -> Pos {
        match &self.kind {
            LiteralKind::Atom(a) | LiteralKind::Conditional { atom: a, .. } => a.pos,
            LiteralKind::Comparison { pos, .. } => *pos,
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            LiteralKind::Atom(a) => a.collect_vars(out),
            LiteralKind::Comparison { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            LiteralKind::Conditional { atom, conditions } => {
                atom.collect_vars(out);
                conditions.iter().for_each(|c| c.collect_vars(out));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedLiteral {
    pub literal: Literal,
    pub weight: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    Atom(Atom),
    /// Empty head of an integrity constraint.
    Falsity,
    /// `lo { elems } hi`; elements are positive atoms or conditionals.
    Cardinality { lower: Option<Term>, elems: Vec<Literal>, upper: Option<Term> },
    /// `lo [ elem = w, ... ] hi`.
    Weight { lower: Option<Term>, elems: Vec<WeightedLiteral>, upper: Option<Term> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BodyElem {
    Literal(Literal),
    Cardinality { lower: Option<Term>, elems: Vec<Literal>, upper: Option<Term> },
    Weight { lower: Option<Term>, elems: Vec<WeightedLiteral>, upper: Option<Term> },
}

impl BodyElem {
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BodyElem::Literal(l) => l.collect_vars(out),
            BodyElem::Cardinality { lower, elems, upper } => {
                lower.iter().for_each(|t| t.collect_vars(out));
                elems.iter().for_each(|l| l.collect_vars(out));
                upper.iter().for_each(|t| t.collect_vars(out));
            }
            BodyElem::Weight { lower, elems, upper } => {
                lower.iter().for_each(|t| t.collect_vars(out));
                for e in elems {
                    e.literal.collect_vars(out);
                    e.weight.collect_vars(out);
                }
                upper.iter().for_each(|t| t.collect_vars(out));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElem>,
    pub pos: Pos,
}

impl Rule {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && matches!(self.head, Head::Atom(_))
    }

    /// Atoms defined by this rule's head (conditions excluded).
    pub fn head_atoms(&self) -> Vec<&Atom> {
        match &self.head {
            Head::Atom(a) => vec![a],
            Head::Falsity => Vec::new(),
            Head::Cardinality { elems, .. } => elems.iter().filter_map(Literal::atom).collect(),
            Head::Weight { elems, .. } => elems.iter().filter_map(|e| e.literal.atom()).collect(),
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.head {
            Head::Atom(a) => a.collect_vars(out),
            Head::Falsity => {}
            Head::Cardinality { lower, elems, upper } => {
                lower.iter().for_each(|t| t.collect_vars(out));
                elems.iter().for_each(|l| l.collect_vars(out));
                upper.iter().for_each(|t| t.collect_vars(out));
            }
            Head::Weight { lower, elems, upper } => {
                lower.iter().for_each(|t| t.collect_vars(out));
                for e in elems {
                    e.literal.collect_vars(out);
                    e.weight.collect_vars(out);
                }
                upper.iter().for_each(|t| t.collect_vars(out));
            }
        }
        self.body.iter().for_each(|b| b.collect_vars(out));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compute {
    /// Model count given inside the statement (`compute 0 { ... }`), if any.
    pub models: Option<u64>,
    pub literals: Vec<Literal>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub compute: Option<Compute>,
    pub consts: BTreeMap<String, i64>,
}

impl Program {
    /// Appends another program, as if the two sources had been concatenated.
    pub fn merge(&mut self, other: Program) -> Result<(), Pos> {
        self.rules.extend(other.rules);
        self.consts.extend(other.consts);
        match (&self.compute, other.compute) {
            (Some(_), Some(c)) => return Err(c.pos),
            (None, c) => self.compute = c,
            _ => {}
        }
        Ok(())
    }
}

fn visit_atom_mut(a: &mut Atom, f: &mut dyn FnMut(&mut Term)) {
    a.args.iter_mut().for_each(&mut *f);
}

fn visit_literal_mut(l: &mut Literal, f: &mut dyn FnMut(&mut Term)) {
    match &mut l.kind {
        LiteralKind::Atom(a) => visit_atom_mut(a, f),
        LiteralKind::Comparison { lhs, rhs, .. } => {
            f(lhs);
            f(rhs);
        }
        LiteralKind::Conditional { atom, conditions } => {
            visit_atom_mut(atom, f);
            conditions.iter_mut().for_each(|c| visit_atom_mut(c, f));
        }
    }
}

fn visit_bounded_mut(
    lower: &mut Option<Term>,
    elems: &mut [WeightedLiteral],
    upper: &mut Option<Term>,
    f: &mut dyn FnMut(&mut Term),
) {
    lower.iter_mut().for_each(&mut *f);
    for e in elems {
        visit_literal_mut(&mut e.literal, f);
        f(&mut e.weight);
    }
    upper.iter_mut().for_each(&mut *f);
}

impl Program {
    /// Calls `f` on every top-level term of the program: atom arguments,
    /// comparison operands, weights and bounds.
    pub fn visit_terms_mut(&mut self, f: &mut dyn FnMut(&mut Term)) {
        for rule in &mut self.rules {
            match &mut rule.head {
                Head::Atom(a) => visit_atom_mut(a, f),
                Head::Falsity => {}
                Head::Cardinality { lower, elems, upper } => {
                    lower.iter_mut().for_each(&mut *f);
                    elems.iter_mut().for_each(|l| visit_literal_mut(l, f));
                    upper.iter_mut().for_each(&mut *f);
                }
                Head::Weight { lower, elems, upper } => visit_bounded_mut(lower, elems, upper, f),
            }
            for b in &mut rule.body {
                match b {
                    BodyElem::Literal(l) => visit_literal_mut(l, f),
                    BodyElem::Cardinality { lower, elems, upper } => {
                        lower.iter_mut().for_each(&mut *f);
                        elems.iter_mut().for_each(|l| visit_literal_mut(l, f));
                        upper.iter_mut().for_each(&mut *f);
                    }
                    BodyElem::Weight { lower, elems, upper } => visit_bounded_mut(lower, elems, upper, f),
                }
            }
        }
        if let Some(c) = &mut self.compute {
            c.literals.iter_mut().for_each(|l| visit_literal_mut(l, f));
        }
    }
}
