//! Predicate dependency analysis, domain predicate classification,
//! domain-restriction checking and lint warnings.

mod graph;
mod lint;

use std::collections::{BTreeMap, BTreeSet};

pub use graph::{DependencyGraph, Polarity};
pub use lint::lint;

use crate::diag::Diagnostic;
use crate::syntax::{Atom, BodyElem, Head, Literal, LiteralKind, Pos, PredKey, Program, Rule, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateInfo {
    pub key: PredKey,
    pub is_domain: bool,
    pub defined_in_constraint_head: bool,
    pub recursive: bool,
    pub scc_id: usize,
}

/// Classification of every predicate of a program.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DomainInfo {
    pub preds: BTreeMap<PredKey, PredicateInfo>,
}

impl DomainInfo {
    /// Unknown predicates count as domain predicates with an empty extension.
    pub fn is_domain(&self, key: &PredKey) -> bool {
        self.preds.get(key).is_none_or(|p| p.is_domain)
    }

    pub fn domain_predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.preds.values().filter(|p| p.is_domain).map(|p| &p.key)
    }

    pub fn non_domain_predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.preds.values().filter(|p| !p.is_domain).map(|p| &p.key)
    }
}

/// A predicate is a domain predicate iff it is not recursive, never occurs
/// in a cardinality or weight head, and everything it depends on is a
/// domain predicate. Computed as a greatest fixpoint.
pub fn classify_domain_predicates(graph: &DependencyGraph, program: &Program) -> DomainInfo {
    let in_head: BTreeSet<PredKey> =
        program.rules.iter().flat_map(graph::constraint_head_atoms).map(Atom::key).collect();

    let mut domain: BTreeMap<&PredKey, bool> = graph
        .predicates()
        .iter()
        .map(|k| (k, !graph.is_recursive(k) && !in_head.contains(k)))
        .collect();
    loop {
        let mut changed = false;
        for k in graph.predicates() {
            if domain[k] && graph.callees(k).iter().any(|(c, _)| !domain[c]) {
                domain.insert(k, false);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let preds = graph
        .predicates()
        .iter()
        .map(|k| {
            let info = PredicateInfo {
                key: k.clone(),
                is_domain: domain[k],
                defined_in_constraint_head: in_head.contains(k),
                recursive: graph.is_recursive(k),
                scc_id: graph.scc_id(k).unwrap_or(0),
            };
            (k.clone(), info)
        })
        .collect();
    DomainInfo { preds }
}

/// Builds the graph and classifies in one go.
pub fn analyze(program: &Program) -> (DependencyGraph, DomainInfo) {
    let graph = DependencyGraph::build(program);
    let info = classify_domain_predicates(&graph, program);
    (graph, info)
}

/// Where a variable occurrence lives: the rule at large or inside the
/// `n`-th conditional literal of the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Scope {
    Global,
    Local(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct VarOcc<'a> {
    pub name: &'a str,
    pub pos: Pos,
    pub scope: Scope,
}

/// Every variable occurrence in `rule`, in textual order, along with the
/// conditional literals of the rule (indexed by `Scope::Local`).
pub(crate) fn variable_occurrences(rule: &Rule) -> (Vec<VarOcc<'_>>, Vec<&Literal>) {
    struct Walk<'a> {
        occs: Vec<VarOcc<'a>>,
        conds: Vec<&'a Literal>,
    }
    impl<'a> Walk<'a> {
        fn term(&mut self, t: &'a Term, pos: Pos, scope: Scope) {
            let mut names = Vec::new();
            t.collect_vars(&mut names);
            self.occs.extend(names.into_iter().map(|name| VarOcc { name, pos, scope }));
        }
        fn atom(&mut self, a: &'a Atom, scope: Scope) {
            a.args.iter().for_each(|t| self.term(t, a.pos, scope));
        }
        fn literal(&mut self, l: &'a Literal, weight: Option<&'a Term>) {
            match &l.kind {
                LiteralKind::Atom(a) => {
                    self.atom(a, Scope::Global);
                    if let Some(w) = weight {
                        self.term(w, a.pos, Scope::Global);
                    }
                }
                LiteralKind::Comparison { lhs, rhs, pos, .. } => {
                    self.term(lhs, *pos, Scope::Global);
                    self.term(rhs, *pos, Scope::Global);
                }
                LiteralKind::Conditional { atom, conditions } => {
                    let scope = Scope::Local(self.conds.len());
                    self.conds.push(l);
                    self.atom(atom, scope);
                    conditions.iter().for_each(|c| self.atom(c, scope));
                    if let Some(w) = weight {
                        self.term(w, atom.pos, scope);
                    }
                }
            }
        }
        fn bounds(&mut self, lower: &'a Option<Term>, upper: &'a Option<Term>, pos: Pos) {
            lower.iter().chain(upper.iter()).for_each(|t| self.term(t, pos, Scope::Global));
        }
    }

    let mut w = Walk { occs: Vec::new(), conds: Vec::new() };
    match &rule.head {
        Head::Atom(a) => w.atom(a, Scope::Global),
        Head::Falsity => {}
        Head::Cardinality { lower, elems, upper } => {
            w.bounds(lower, upper, rule.pos);
            elems.iter().for_each(|l| w.literal(l, None));
        }
        Head::Weight { lower, elems, upper } => {
            w.bounds(lower, upper, rule.pos);
            elems.iter().for_each(|e| w.literal(&e.literal, Some(&e.weight)));
        }
    }
    for b in &rule.body {
        match b {
            BodyElem::Literal(l) => w.literal(l, None),
            BodyElem::Cardinality { lower, elems, upper } => {
                w.bounds(lower, upper, rule.pos);
                elems.iter().for_each(|l| w.literal(l, None));
            }
            BodyElem::Weight { lower, elems, upper } => {
                w.bounds(lower, upper, rule.pos);
                elems.iter().for_each(|e| w.literal(&e.literal, Some(&e.weight)));
            }
        }
    }
    (w.occs, w.conds)
}

/// Variables appearing as plain arguments of `atom`. Atoms with range or
/// pool arguments bind nothing.
pub(crate) fn binding_vars(atom: &Atom) -> Vec<&str> {
    if atom.args.iter().any(Term::has_range_or_pool) {
        return Vec::new();
    }
    atom.args
        .iter()
        .filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            _ => None,
        })
        .collect()
}

/// Checks that every variable of every rule is bound by a positive domain
/// literal of the rule body, or, for variables local to a conditional, by
/// the conditional's own conditions. Conditions must be domain predicates
/// and compute statements must be ground.
pub fn check_domain_restriction(program: &Program, info: &DomainInfo) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for rule in &program.rules {
        let (occs, conds) = variable_occurrences(rule);

        for lit in &conds {
            if let LiteralKind::Conditional { conditions, .. } = &lit.kind {
                for c in conditions {
                    if !info.is_domain(&c.key()) {
                        diags.push(Diagnostic::error(
                            c.pos,
                            format!("condition `{c}` in rule `{rule}` is not a domain predicate"),
                        ));
                    }
                }
            }
        }

        let global: BTreeSet<&str> =
            occs.iter().filter(|o| o.scope == Scope::Global).map(|o| o.name).collect();
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        for b in &rule.body {
            if let BodyElem::Literal(Literal { negative: false, kind: LiteralKind::Atom(a) }) = b {
                if info.is_domain(&a.key()) {
                    covered.extend(binding_vars(a));
                }
            }
        }

        let mut reported: BTreeSet<(&str, Scope)> = BTreeSet::new();
        for o in &occs {
            let (ok, scope) = match o.scope {
                Scope::Local(k) if !global.contains(o.name) => {
                    let LiteralKind::Conditional { conditions, .. } = &conds[k].kind else { unreachable!() };
                    (conditions.iter().any(|c| binding_vars(c).contains(&o.name)), o.scope)
                }
                _ => (covered.contains(o.name), Scope::Global),
            };
            if !ok && reported.insert((o.name, scope)) {
                let msg = if let Scope::Local(k) = scope {
                    format!(
                        "variable `{}` in conditional `{}` of rule `{rule}` is not bound by any of its conditions",
                        o.name, conds[k]
                    )
                } else {
                    format!(
                        "variable `{}` in rule `{rule}` does not occur in a positive domain predicate of the body",
                        o.name
                    )
                };
                diags.push(Diagnostic::error(o.pos, msg));
            }
        }
    }
    if let Some(c) = &program.compute {
        for l in &c.literals {
            if let Some(a) = l.atom() {
                if !a.args.iter().all(Term::is_ground) {
                    diags.push(Diagnostic::error(a.pos, format!("compute literal `{l}` must be ground")));
                }
            }
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_str;

    pub(crate) const ANCESTOR: &str = "
        ancestor(X,Y) :- ancestor(X,Z), parent(Z,Y), person(X).
        ancestor(X,Y) :- parent(X,Y).
        son(X,Y) :- parent(Y,X), male(X).
        daughter(X,Y) :- parent(Y,X), female(X).
        person(X) :- male(X).
        person(X) :- female(X).
        parent(jack, jill). parent(joan, jack).
        male(jack). female(jill). female(joan).";

    const QUEENS: &str = "
        1 { q(X,Y):d(X) } 1 :- d(Y).
        1 { q(X,Y):d(Y) } 1 :- d(X).
        :- d(X), d(Y), d(X1), d(Y1), q(X,Y), q(X1,Y1), X != X1, Y != Y1, abs(X - X1) == abs(Y - Y1).
        d(1..n).";

    fn k(name: &str, arity: usize) -> PredKey {
        PredKey::new(name, arity)
    }

    #[test]
    fn ancestor_edges() {
        let g = DependencyGraph::build(&parse_str(ANCESTOR).unwrap());
        assert!(g.has_edge(&k("ancestor", 2), &k("ancestor", 2), Polarity::Positive));
        assert!(g.has_edge(&k("ancestor", 2), &k("parent", 2), Polarity::Positive));
        assert!(g.has_edge(&k("person", 1), &k("male", 1), Polarity::Positive));
        assert!(!g.has_edge(&k("parent", 2), &k("ancestor", 2), Polarity::Positive));
        assert_eq!(g.predicates().len(), 7);
    }

    #[test]
    fn empty_and_self_negative() {
        assert!(DependencyGraph::build(&Program::default()).is_empty());
        let g = DependencyGraph::build(&parse_str("a :- not a.").unwrap());
        assert!(g.has_edge(&k("a", 0), &k("a", 0), Polarity::Negative));
        assert!(g.is_recursive(&k("a", 0)));
    }

    #[test]
    fn ancestor_classification() {
        let (_, info) = analyze(&parse_str(ANCESTOR).unwrap());
        let non: Vec<_> = info.non_domain_predicates().cloned().collect();
        assert_eq!(non, vec![k("ancestor", 2)]);
        assert_eq!(info.domain_predicates().count(), 6);
    }

    #[test]
    fn constraint_head_is_non_domain() {
        let (_, info) = analyze(&parse_str("1 { p(X) : d(X) } 1. d(1..3).").unwrap());
        assert!(info.is_domain(&k("d", 1)));
        assert!(!info.is_domain(&k("p", 1)));
        assert!(info.preds[&k("p", 1)].defined_in_constraint_head);
    }

    #[test]
    fn mutual_recursion_and_dependents() {
        let (_, info) = analyze(&parse_str("p :- q. q :- p. r :- p. s :- not t. t.").unwrap());
        assert!(!info.is_domain(&k("p", 0)));
        assert!(!info.is_domain(&k("q", 0)));
        assert!(!info.is_domain(&k("r", 0)));
        assert!(info.is_domain(&k("s", 0)));
        assert!(info.is_domain(&k("t", 0)));
    }

    #[test]
    fn strata_put_callees_first() {
        let g = DependencyGraph::build(&parse_str("c :- b. b :- a. a.").unwrap());
        let order: Vec<String> = g.strata().iter().flatten().map(|k| k.name.clone()).collect();
        assert_eq!(order, vec!["a", "b", "c"]);
    }

    fn restriction(src: &str) -> Vec<Diagnostic> {
        let p = parse_str(src).unwrap();
        let (_, info) = analyze(&p);
        check_domain_restriction(&p, &info)
    }

    #[test]
    fn queens_is_domain_restricted() {
        assert!(restriction(QUEENS).is_empty());
        assert!(restriction(ANCESTOR).is_empty());
    }

    #[test]
    fn negative_literal_does_not_cover() {
        let d = restriction("p(X) :- not q(X). q(1).");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`X`"));
        let d = restriction("p(X) :- not q(X). q(Y) :- q(Y), r(Y).");
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn uncovered_variable_named() {
        let d = restriction("p(X,Y) :- d(X). d(1).");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`Y`"), "{}", d[0].message);
        assert_eq!((d[0].pos.line, d[0].pos.col), (1, 1));
    }

    #[test]
    fn comparisons_and_non_domain_do_not_cover() {
        assert_eq!(restriction("p(X) :- X == 1.").len(), 1);
        assert_eq!(restriction("p(X) :- r(X). r(X) :- r(X), d(X). d(1).").len(), 1);
    }

    #[test]
    fn conditional_locals() {
        assert!(restriction("h :- 1 { p(X) : d(X) }. d(1..2). { p(1) }.").is_empty());
        let d = restriction("h :- 1 { p(X,Y) : d(X) }. d(1..2).");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`Y`"));
        let d = restriction("h :- 1 { p(X) : p(X) }. { p(1) }.");
        assert!(d.iter().any(|d| d.message.contains("not a domain predicate")));
    }

    #[test]
    fn compute_must_be_ground() {
        assert_eq!(restriction("a. compute { p(X) }.").len(), 1);
    }
}
