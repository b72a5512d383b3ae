//! Ground (variable-free) programs over numbered atoms.

use std::collections::HashMap;
use std::fmt;

/// Atom number. `1` is reserved for the falsity atom; user atoms start at `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub const FALSE: AtomId = AtomId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub atom: AtomId,
    pub negative: bool,
}

impl Lit {
    pub fn pos(atom: AtomId) -> Self {
        Lit { atom, negative: false }
    }

    pub fn neg(atom: AtomId) -> Self {
        Lit { atom, negative: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundHead {
    Atom(AtomId),
    Falsity,
    Cardinality { lower: i64, atoms: Vec<AtomId>, upper: Option<i64> },
    Weight { lower: i64, elems: Vec<(AtomId, i64)>, upper: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundBody {
    Lit(Lit),
    Cardinality { lower: i64, lits: Vec<Lit>, upper: Option<i64> },
    Weight { lower: i64, elems: Vec<(Lit, i64)>, upper: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: GroundHead,
    pub body: Vec<GroundBody>,
}

impl GroundRule {
    pub fn fact(atom: AtomId) -> Self {
        GroundRule { head: GroundHead::Atom(atom), body: Vec::new() }
    }

    pub fn head_atoms(&self) -> Vec<AtomId> {
        match &self.head {
            GroundHead::Atom(a) => vec![*a],
            GroundHead::Falsity => Vec::new(),
            GroundHead::Cardinality { atoms, .. } => atoms.clone(),
            GroundHead::Weight { elems, .. } => elems.iter().map(|e| e.0).collect(),
        }
    }

    /// Every literal of the body, constraint elements included.
    pub fn body_lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.body.iter().flat_map(|b| -> Box<dyn Iterator<Item = Lit> + '_> {
            match b {
                GroundBody::Lit(l) => Box::new(std::iter::once(*l)),
                GroundBody::Cardinality { lits, .. } => Box::new(lits.iter().copied()),
                GroundBody::Weight { elems, .. } => Box::new(elems.iter().map(|e| e.0)),
            }
        })
    }
}

/// Atom names by number. Atoms without a name (auxiliaries, the falsity
/// atom) are hidden from printed models.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    // index 0 is unused, index 1 is the falsity atom
    names: Vec<Option<String>>,
    index: HashMap<String, AtomId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable { names: vec![None, None], index: HashMap::new() }
    }

    /// Number of the named atom, allocating the next free number if needed.
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = AtomId(self.names.len() as u32);
        self.names.push(Some(name.to_string()));
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn fresh_hidden(&mut self) -> AtomId {
        self.names.push(None);
        AtomId(self.names.len() as u32 - 1)
    }

    /// Records `name` for an explicit atom number, growing the table as needed.
    pub fn set(&mut self, id: AtomId, name: &str) {
        self.reserve(id);
        if let Some(old) = self.names[id.index()].take() {
            self.index.remove(&old);
        }
        self.names[id.index()] = Some(name.to_string());
        self.index.insert(name.to_string(), id);
    }

    /// Makes sure `id` is a valid atom number.
    pub fn reserve(&mut self, id: AtomId) {
        if self.names.len() <= id.index() {
            self.names.resize(id.index() + 1, None);
        }
    }

    pub fn get(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> Option<&str> {
        self.names.get(id.index()).and_then(|n| n.as_deref())
    }

    /// Largest atom number in use (at least 1).
    pub fn max_atom(&self) -> u32 {
        self.names.len() as u32 - 1
    }

    /// Named atoms in ascending number order.
    pub fn named(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.names.iter().enumerate().filter_map(|(i, n)| n.as_deref().map(|n| (AtomId(i as u32), n)))
    }

    /// Printable name, with a placeholder for hidden atoms.
    pub fn label(&self, id: AtomId) -> String {
        match self.name(id) {
            Some(n) => n.to_string(),
            None if id == AtomId::FALSE => "_false".to_string(),
            None => format!("_x{}", id.0),
        }
    }
}

/// Literals every reported model must agree with, and how many models to find.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputeSpec {
    pub positive: Vec<AtomId>,
    pub negative: Vec<AtomId>,
    /// 0 means all models.
    pub models: u64,
}

impl Default for ComputeSpec {
    fn default() -> Self {
        ComputeSpec { positive: Vec::new(), negative: Vec::new(), models: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub symbols: SymbolTable,
    pub compute: ComputeSpec,
}

impl Default for GroundProgram {
    fn default() -> Self {
        GroundProgram { rules: Vec::new(), symbols: SymbolTable::new(), compute: ComputeSpec::default() }
    }
}

impl GroundProgram {
    pub fn max_atom(&self) -> u32 {
        let mut m = self.symbols.max_atom();
        for r in &self.rules {
            for a in r.head_atoms() {
                m = m.max(a.0);
            }
            for l in r.body_lits() {
                m = m.max(l.atom.0);
            }
        }
        m
    }

    /// Ground rules in source syntax, one per line.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&self.rule_text(r));
            out.push('\n');
        }
        if !self.compute.positive.is_empty() || !self.compute.negative.is_empty() {
            let lits: Vec<String> = self
                .compute
                .positive
                .iter()
                .map(|a| self.symbols.label(*a))
                .chain(self.compute.negative.iter().map(|a| format!("not {}", self.symbols.label(*a))))
                .collect();
            out.push_str(&format!("compute {} {{ {} }}.\n", self.compute.models, lits.join(", ")));
        }
        out
    }

    pub fn rule_text(&self, r: &GroundRule) -> String {
        let name = |a: AtomId| self.symbols.label(a);
        let lit = |l: Lit| if l.negative { format!("not {}", name(l.atom)) } else { name(l.atom) };
        let bounds = |lower: i64, body: String, upper: Option<i64>| match upper {
            Some(u) => format!("{lower} {body} {u}"),
            None => format!("{lower} {body}"),
        };
        let head = match &r.head {
            GroundHead::Atom(a) => name(*a),
            GroundHead::Falsity => String::new(),
            GroundHead::Cardinality { lower, atoms, upper } => {
                let e: Vec<String> = atoms.iter().map(|a| name(*a)).collect();
                bounds(*lower, format!("{{ {} }}", e.join(", ")), *upper)
            }
            GroundHead::Weight { lower, elems, upper } => {
                let e: Vec<String> = elems.iter().map(|(a, w)| format!("{} = {}", name(*a), wtext(*w))).collect();
                bounds(*lower, format!("[ {} ]", e.join(", ")), *upper)
            }
        };
        let body: Vec<String> = r
            .body
            .iter()
            .map(|b| match b {
                GroundBody::Lit(l) => lit(*l),
                GroundBody::Cardinality { lower, lits, upper } => {
                    let e: Vec<String> = lits.iter().map(|l| lit(*l)).collect();
                    bounds(*lower, format!("{{ {} }}", e.join(", ")), *upper)
                }
                GroundBody::Weight { lower, elems, upper } => {
                    let e: Vec<String> = elems.iter().map(|(l, w)| format!("{} = {}", lit(*l), wtext(*w))).collect();
                    bounds(*lower, format!("[ {} ]", e.join(", ")), *upper)
                }
            })
            .collect();
        match (head.is_empty(), body.is_empty()) {
            (_, true) if !head.is_empty() => format!("{head}."),
            (true, true) => ":- .".to_string(),
            _ if head.is_empty() => format!(":- {}.", body.join(", ")),
            _ => format!("{head} :- {}.", body.join(", ")),
        }
    }
}

fn wtext(w: i64) -> String {
    if w < 0 {
        format!("({w})")
    } else {
        w.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_numbers_start_at_two() {
        let mut t = SymbolTable::new();
        assert_eq!(t.max_atom(), 1);
        let a = t.intern("a");
        let b = t.intern("b");
        assert_eq!((a, b), (AtomId(2), AtomId(3)));
        assert_eq!(t.intern("a"), a);
        let h = t.fresh_hidden();
        assert_eq!(h, AtomId(4));
        assert_eq!(t.name(h), None);
        assert_eq!(t.named().map(|x| x.1).collect::<Vec<_>>(), ["a", "b"]);
        t.set(AtomId(7), "z");
        assert_eq!(t.max_atom(), 7);
        assert_eq!(t.get("z"), Some(AtomId(7)));
    }

    #[test]
    fn text_form() {
        let mut p = GroundProgram::default();
        let a = p.symbols.intern("a");
        let b = p.symbols.intern("b");
        p.rules.push(GroundRule::fact(a));
        p.rules.push(GroundRule {
            head: GroundHead::Cardinality { lower: 1, atoms: vec![a, b], upper: Some(1) },
            body: vec![GroundBody::Lit(Lit::neg(b))],
        });
        p.rules.push(GroundRule {
            head: GroundHead::Falsity,
            body: vec![GroundBody::Weight { lower: 2, elems: vec![(Lit::pos(a), -1)], upper: None }],
        });
        assert_eq!(p.text(), "a.\n1 { a, b } 1 :- not b.\n:- 2 [ a = (-1) ].\n");
    }
}
