use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::analysis::analyze;
use crate::syntax::{parse_str, substitute_constants, Atom, BodyElem, Literal, Rule, Term};

fn key(name: &str, arity: usize) -> PredKey {
    PredKey::new(name, arity)
}

fn extension(src: &str) -> Extension {
    let p = parse_str(src).unwrap();
    let (g, info) = analyze(&p);
    evaluate_domain_predicates(&p, &g, &info).unwrap()
}

fn ground_text(src: &str, mode: DomainMode) -> String {
    let p = parse_str(src).unwrap();
    ground(&p, mode).unwrap().program.text()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn range_fact() {
    let e = extension("d(1..3).");
    assert_eq!(e.atoms(&key("d", 1)), set(&["d(1)", "d(2)", "d(3)"]));
}

#[test]
fn ancestor_facts() {
    let e = extension(
        "parent(jack, jill). parent(joan, jack).
         person(jack). person(jill). person(joan).
         ancestor(X, Y) :- parent(X, Y).
         ancestor(X, Y) :- parent(X, Z), ancestor(Z, Y).",
    );
    assert_eq!(e.atoms(&key("person", 1)), set(&["person(jack)", "person(jill)", "person(joan)"]));
    assert_eq!(e.atoms(&key("parent", 2)), set(&["parent(jack,jill)", "parent(joan,jack)"]));
    // recursive, so not evaluated here
    assert!(e.is_empty(&key("ancestor", 2)));
}

#[test]
fn arithmetic_in_head() {
    let e = extension("e(X+1) :- d(X), X < 3. d(1..3).");
    assert_eq!(e.atoms(&key("e", 1)), set(&["e(2)", "e(3)"]));
}

#[test]
fn choice_over_condition() {
    let t = ground_text("1 { q(X,Y) : d(X) } 1 :- d(Y). d(1..2).", DomainMode::RemoveDomain);
    assert_eq!(t, "1 { q(1,1), q(2,1) } 1.\n1 { q(1,2), q(2,2) } 1.\n");
}

#[test]
fn keep_domain_retains_body_literals() {
    let t = ground_text("1 { q(X,Y) : d(X) } 1 :- d(Y). d(1..2).", DomainMode::KeepDomain);
    assert_eq!(t, "d(1).\nd(2).\n1 { q(1,1), q(2,1) } 1 :- d(1).\n1 { q(1,2), q(2,2) } 1 :- d(2).\n");
}

#[test]
fn queens_diagonal_filter() {
    let src = "{ q(X,Y) : d(X) : d(Y) }.
               :- d(X), d(Y), d(X1), d(Y1), q(X,Y), q(X1,Y1), X != X1, Y != Y1, abs(X - X1) == abs(Y - Y1).
               d(1..n).";
    let mut consts = BTreeMap::new();
    consts.insert("n".to_string(), 4);
    let p = substitute_constants(parse_str(src).unwrap(), &consts);
    let g = ground(&p, DomainMode::RemoveDomain).unwrap().program;
    let mut expected = 0;
    for x in 1..=4i64 {
        for y in 1..=4i64 {
            for x1 in 1..=4i64 {
                for y1 in 1..=4i64 {
                    if x != x1 && y != y1 && (x - x1).abs() == (y - y1).abs() {
                        expected += 1;
                    }
                }
            }
        }
    }
    assert_eq!(g.rules.len(), expected + 1);
    assert!(g.rules[1..].iter().all(|r| r.head == GroundHead::Falsity && r.body.len() == 2));
    assert!(g.text().contains(":- q(1,1), q(2,2)."));
    assert!(!g.text().contains(":- q(1,1), q(2,3)."));
}

#[test]
fn false_domain_literal_kills_rule() {
    let t = ground_text("{ x }. a :- d(5), x. b :- not d(1), x. c :- not d(7), x. d(1).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { x }.\nc :- x.\n");
}

#[test]
fn negative_domain_literal() {
    let t = ground_text("{ q(1..3) }. p(X) :- d(X), not e(X), not q(X). d(1..3). e(2).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { q(1), q(2), q(3) }.\np(1) :- not q(1).\np(3) :- not q(3).\n");
}

#[test]
fn conditional_body() {
    let t = ground_text("{ p(1..2) }. ok :- p(X) : d(X). d(1..2).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { p(1), p(2) }.\nok :- p(1), p(2).\n");
    let t = ground_text("{ p(1..2) }. ok :- not p(X) : d(X), not e. d(1..2).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { p(1), p(2) }.\nok :- not p(1), not p(2).\n");
}

#[test]
fn duplicate_elements() {
    let t = ground_text("{ b }. a :- 2 [ b = 1, b = 1 ]. c :- 1 { b, b } 1.", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { b }.\na :- 2 [ b = 2 ].\nc :- 1 { b } 1.\n");
}

#[test]
fn true_domain_elements_shift_bounds() {
    let t = ground_text("{ b, c }. a :- 2 { d(1), d(2), b, c } 3. d(1).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { b, c }.\na :- 1 { b, c } 2.\n");
    let t = ground_text("{ b }. a :- 1 { d(1), b }. d(1).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { b }.\na :- 0 { b }.\n");
    let t = ground_text("{ b }. a :- 2 { d(1), d(3) }, b. d(1).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { b }.\n");
}

#[test]
fn domain_weight_body_evaluated() {
    let e = extension("d(1..4). big :- 5 [ d(X) : d(X) = X ] 10. small :- 11 [ d(X) : d(X) = X ].");
    assert_eq!(e.atoms(&key("big", 0)), set(&["big"]));
    assert!(e.atoms(&key("small", 0)).is_empty());
}

#[test]
fn pools_and_ranges() {
    let t = ground_text("{ p(1;2) }. q(X) :- d(X), p(X;X+1). d(0..2).", DomainMode::RemoveDomain);
    assert_eq!(t, "0 { p(1), p(2) }.\nq(0) :- p(0), p(1).\nq(1) :- p(1), p(2).\nq(2) :- p(2), p(3).\n");
}

#[test]
fn reversed_range_warns() {
    let p = parse_str("{ q }. d(3..1). p :- not d(2), q.").unwrap();
    let g = ground(&p, DomainMode::RemoveDomain).unwrap();
    assert_eq!(g.program.text(), "0 { q }.\np :- q.\n");
    assert_eq!(g.warnings.len(), 1);
    assert!(g.warnings[0].message.contains("empty range"));
}

#[test]
fn arithmetic_errors() {
    let err = |src: &str| ground(&parse_str(src).unwrap(), DomainMode::RemoveDomain).unwrap_err();
    assert!(matches!(err("d(1). p(X / 0) :- d(X)."), GroundError::Arithmetic { .. }));
    assert!(matches!(err("d(1..n)."), GroundError::UnboundConstant { name, .. } if name == "n"));
    assert!(matches!(err("d(jack). p(X + 1) :- d(X)."), GroundError::Arithmetic { .. }));
    assert!(matches!(err("d(9223372036854775807). p(X + 1) :- d(X)."), GroundError::Arithmetic { .. }));
}

#[test]
fn compute_statement() {
    let p = parse_str("{ a, b }. d(1). compute 0 { a, not b, d(1) }.").unwrap();
    let g = ground(&p, DomainMode::RemoveDomain).unwrap().program;
    let a = g.symbols.get("a").unwrap();
    let b = g.symbols.get("b").unwrap();
    assert_eq!(g.compute, ComputeSpec { positive: vec![a], negative: vec![b], models: 0 });
    let p = parse_str("{ a }. d(1). compute { not d(1) }.").unwrap();
    let g = ground(&p, DomainMode::RemoveDomain).unwrap().program;
    assert_eq!(g.compute.positive, vec![AtomId::FALSE]);
    assert_eq!(g.compute.models, 1);
}

#[test]
fn symbol_ids_are_dense() {
    let p = parse_str("1 { q(X,Y) : d(X) } 1 :- d(Y). d(1..3).").unwrap();
    let g = ground(&p, DomainMode::KeepDomain).unwrap().program;
    let ids: Vec<u32> = g.symbols.named().map(|(a, _)| a.0).collect();
    assert_eq!(ids, (2..2 + ids.len() as u32).collect::<Vec<_>>());
    assert_eq!(ids.len(), 3 + 9);
}

#[test]
fn weight_head_and_falsity_fallback() {
    let t = ground_text("2 [ a : e(X) = X, b = 1 ] 4. e(1..2).", DomainMode::RemoveDomain);
    assert_eq!(t, "2 [ a = 3, b = 1 ] 4.\n");
    let t = ground_text("1 { p(X) : d(X) }. d(1..0).", DomainMode::RemoveDomain);
    assert_eq!(t, ":- .\n");
}

// ---- semi-naive against a naive fixpoint oracle ----

/// Naive evaluation of a positive program with plain arguments: every rule
/// is applied to every substitution over the constants of the program until
/// nothing changes.
fn naive_least_model(p: &Program) -> BTreeSet<String> {
    let mut constants: BTreeSet<String> = BTreeSet::new();
    let mut vars_of = Vec::new();
    for r in &p.rules {
        let mut vs = Vec::new();
        r.collect_vars(&mut vs);
        let vs: BTreeSet<String> = vs.into_iter().map(str::to_string).collect();
        vars_of.push(vs.into_iter().collect::<Vec<_>>());
        for a in r.head_atoms().into_iter().chain(body_atoms(r)) {
            for t in &a.args {
                if let Term::Symbol(s) = t {
                    constants.insert(s.clone());
                }
            }
        }
    }
    let constants: Vec<String> = constants.into_iter().collect();
    let text = |a: &Atom, sub: &BTreeMap<String, String>| {
        let args: Vec<String> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Variable(v) => sub[v].clone(),
                Term::Symbol(s) => s.clone(),
                _ => unreachable!(),
            })
            .collect();
        if args.is_empty() {
            a.pred.clone()
        } else {
            format!("{}({})", a.pred, args.join(","))
        }
    };
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for (r, vars) in p.rules.iter().zip(&vars_of) {
            let n = vars.len();
            let total = constants.len().pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let mut sub = BTreeMap::new();
                for v in vars {
                    sub.insert(v.clone(), constants[c % constants.len()].clone());
                    c /= constants.len();
                }
                if body_atoms(r).iter().all(|a| model.contains(&text(a, &sub))) {
                    let Head::Atom(h) = &r.head else { unreachable!() };
                    changed |= model.insert(text(h, &sub));
                }
            }
        }
        if !changed {
            return model;
        }
    }
}

fn body_atoms(r: &Rule) -> Vec<&Atom> {
    r.body
        .iter()
        .filter_map(|b| match b {
            BodyElem::Literal(Literal { kind: LiteralKind::Atom(a), .. }) => Some(a),
            _ => None,
        })
        .collect()
}

fn semi_naive_model(p: &Program) -> BTreeSet<String> {
    let (g, _) = analyze(p);
    let all: BTreeSet<PredKey> = g.predicates().iter().cloned().collect();
    let ext = evaluate_fixpoint(p, &g, all.clone()).unwrap();
    all.iter().flat_map(|k| ext.atoms(k)).collect()
}

#[test]
fn transitive_closure_matches_naive() {
    let p = parse_str(
        "e(a,b). e(b,c). e(c,d). e(d,b).
         t(X,Y) :- e(X,Y).
         t(X,Y) :- t(X,Z), t(Z,Y).
         s(X) :- t(X,X).",
    )
    .unwrap();
    let m = semi_naive_model(&p);
    assert_eq!(m, naive_least_model(&p));
    assert!(m.contains("s(b)") && !m.contains("s(a)"));
}

fn arb_program() -> impl Strategy<Value = String> {
    let consts = ["a", "b", "c", "d"];
    let fact = (0..3usize, 0..4usize, 0..4usize)
        .prop_map(move |(p, x, y)| format!("{}({},{}).", ["e", "f", "g"][p], consts[x], consts[y]));
    let lit = (0..5usize, 0..3usize, 0..3usize).prop_map(|(p, x, y)| {
        let v = ["X", "Y", "Z"];
        format!("{}({},{})", ["e", "f", "g", "p", "q"][p], v[x], v[y])
    });
    let rule = (0..2usize, 0..3usize, 0..3usize, prop::collection::vec(lit, 1..4)).prop_map(|(h, x, y, body)| {
        let v = ["X", "Y", "Z"];
        // every head variable must occur in the body
        let mut body = body;
        body.push(format!("e({},{})", v[x], v[y]));
        format!("{}({},{}) :- {}.", ["p", "q"][h], v[x], v[y], body.join(", "))
    });
    (prop::collection::vec(fact, 1..8), prop::collection::vec(rule, 1..5))
        .prop_map(|(f, r)| format!("{}\n{}", f.join(" "), r.join("\n")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn semi_naive_equals_naive(src in arb_program()) {
        let p = parse_str(&src).unwrap();
        prop_assert_eq!(semi_naive_model(&p), naive_least_model(&p));
    }
}
