use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::syntax::{Atom, BodyElem, Head, Literal, LiteralKind, PredKey, Program, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Predicate dependency graph: an edge `caller -> callee` for every rule with
/// `caller` in its head and `callee` in its body or in a condition list.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    keys: Vec<PredKey>,
    index: BTreeMap<PredKey, usize>,
    edges: BTreeSet<(usize, usize, Polarity)>,
    scc: Vec<usize>,
    scc_sizes: Vec<usize>,
    /// SCC ids in evaluation order: callees before callers.
    scc_order: Vec<usize>,
}

impl DependencyGraph {
    pub fn build(program: &Program) -> Self {
        let mut g = DependencyGraph {
            keys: Vec::new(),
            index: BTreeMap::new(),
            edges: BTreeSet::new(),
            scc: Vec::new(),
            scc_sizes: Vec::new(),
            scc_order: Vec::new(),
        };
        for rule in &program.rules {
            g.add_rule(rule);
        }
        if let Some(c) = &program.compute {
            for l in &c.literals {
                if let Some(a) = l.atom() {
                    g.node(&a.key());
                }
            }
        }
        g.compute_sccs();
        g
    }

    fn node(&mut self, key: &PredKey) -> usize {
        if let Some(&i) = self.index.get(key) {
            return i;
        }
        self.keys.push(key.clone());
        self.index.insert(key.clone(), self.keys.len() - 1);
        self.keys.len() - 1
    }

    fn add_rule(&mut self, rule: &Rule) {
        let mut callees: Vec<(PredKey, Polarity)> = Vec::new();
        let literal = |l: &Literal, out: &mut Vec<(PredKey, Polarity)>| match &l.kind {
            LiteralKind::Atom(a) => out.push((a.key(), polarity(l.negative))),
            LiteralKind::Comparison { .. } => {}
            LiteralKind::Conditional { atom, conditions } => {
                out.push((atom.key(), polarity(l.negative)));
                out.extend(conditions.iter().map(|c| (c.key(), Polarity::Positive)));
            }
        };
        match &rule.head {
            Head::Cardinality { elems, .. } => {
                for l in elems {
                    if let LiteralKind::Conditional { conditions, .. } = &l.kind {
                        callees.extend(conditions.iter().map(|c| (c.key(), Polarity::Positive)));
                    }
                }
            }
            Head::Weight { elems, .. } => {
                for e in elems {
                    if let LiteralKind::Conditional { conditions, .. } = &e.literal.kind {
                        callees.extend(conditions.iter().map(|c| (c.key(), Polarity::Positive)));
                    }
                }
            }
            Head::Atom(_) | Head::Falsity => {}
        }
        for b in &rule.body {
            match b {
                BodyElem::Literal(l) => literal(l, &mut callees),
                BodyElem::Cardinality { elems, .. } => elems.iter().for_each(|l| literal(l, &mut callees)),
                BodyElem::Weight { elems, .. } => elems.iter().for_each(|e| literal(&e.literal, &mut callees)),
            }
        }
        let callee_ids: Vec<(usize, Polarity)> = callees.iter().map(|(k, p)| (self.node(k), *p)).collect();
        for head in rule.head_atoms() {
            let h = self.node(&head.key());
            for &(c, p) in &callee_ids {
                self.edges.insert((h, c, p));
            }
        }
    }

    fn compute_sccs(&mut self) {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.keys.len(), self.edges.len());
        for _ in &self.keys {
            g.add_node(());
        }
        for &(a, b, _) in &self.edges {
            g.update_edge(NodeIndex::new(a), NodeIndex::new(b), ());
        }
        // tarjan_scc yields SCCs in post-order, i.e. callees first.
        let sccs = tarjan_scc(&g);
        self.scc = vec![0; self.keys.len()];
        self.scc_sizes = sccs.iter().map(Vec::len).collect();
        for (id, comp) in sccs.iter().enumerate() {
            for n in comp {
                self.scc[n.index()] = id;
            }
        }
        self.scc_order = (0..sccs.len()).collect();
    }

    pub fn predicates(&self) -> &[PredKey] {
        &self.keys
    }

    pub fn contains(&self, key: &PredKey) -> bool {
        self.index.contains_key(key)
    }

    /// `(caller, callee, polarity)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (&PredKey, &PredKey, Polarity)> + '_ {
        self.edges.iter().map(|&(a, b, p)| (&self.keys[a], &self.keys[b], p))
    }

    pub fn has_edge(&self, caller: &PredKey, callee: &PredKey, pol: Polarity) -> bool {
        match (self.index.get(caller), self.index.get(callee)) {
            (Some(&a), Some(&b)) => self.edges.contains(&(a, b, pol)),
            _ => false,
        }
    }

    pub fn callees(&self, key: &PredKey) -> Vec<(&PredKey, Polarity)> {
        let Some(&i) = self.index.get(key) else { return Vec::new() };
        self.edges
            .range((i, 0, Polarity::Positive)..=(i, usize::MAX, Polarity::Negative))
            .map(|&(_, b, p)| (&self.keys[b], p))
            .collect()
    }

    pub fn scc_id(&self, key: &PredKey) -> Option<usize> {
        self.index.get(key).map(|&i| self.scc[i])
    }

    /// Member of a multi-node SCC or carrying a self-edge.
    pub fn is_recursive(&self, key: &PredKey) -> bool {
        let Some(&i) = self.index.get(key) else { return false };
        self.scc_sizes[self.scc[i]] > 1
            || self.edges.contains(&(i, i, Polarity::Positive))
            || self.edges.contains(&(i, i, Polarity::Negative))
    }

    /// Predicates grouped by SCC, callees before callers.
    pub fn strata(&self) -> Vec<Vec<&PredKey>> {
        let mut groups: Vec<Vec<&PredKey>> = vec![Vec::new(); self.scc_sizes.len()];
        for (i, k) in self.keys.iter().enumerate() {
            groups[self.scc[i]].push(k);
        }
        self.scc_order.iter().map(|&s| std::mem::take(&mut groups[s])).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

fn polarity(negative: bool) -> Polarity {
    if negative {
        Polarity::Negative
    } else {
        Polarity::Positive
    }
}

/// Every atom in the head of `rule` that sits inside a cardinality or weight head.
pub(crate) fn constraint_head_atoms(rule: &Rule) -> Vec<&Atom> {
    match rule.head {
        Head::Cardinality { .. } | Head::Weight { .. } => rule.head_atoms(),
        _ => Vec::new(),
    }
}
