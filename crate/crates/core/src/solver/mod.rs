//! Stable-model search: propagation (ATLEAST and ATMOST), failed-literal
//! lookahead and chronological backtracking.

mod wfs;

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use wfs::{well_founded, WellFounded};

use crate::ground::AtomId;
use crate::oracle;
use crate::translate::{PrimitiveProgram, PrimitiveRule};

/// Both truth values were forced for some atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Every unknown atom is probed while at most this many are unknown.
    pub full_lookahead_limit: usize,
    /// Number of atoms probed above the limit.
    pub sample_size: usize,
    /// Randomizes tie-breaking and branch polarity.
    pub seed: Option<u64>,
    /// Recomputes unfounded sets over the whole program instead of per component.
    pub full_atmost: bool,
    /// Checks counters and stability of each model against the oracle.
    pub verify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { full_lookahead_limit: 400, sample_size: 24, seed: None, full_atmost: false, verify: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    /// Truth values assigned by propagation, lookahead probes included.
    pub propagations: u64,
    pub models: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Normal,
    Choice,
}

#[derive(Debug, Clone)]
struct Rule {
    kind: Kind,
    heads: (u32, u32),
    lits: (u32, u32),
    bound: u128,
    total: u128,
    max_w: u64,
    /// Weight of true body literals.
    sat: u128,
    /// Weight of false body literals.
    fals: u128,
    /// Some head lies in a cyclic positive component.
    cyclic: bool,
}

impl Rule {
    fn is_true(&self) -> bool {
        self.sat >= self.bound
    }

    fn is_false(&self) -> bool {
        self.total - self.fals < self.bound
    }
}

const UNKNOWN: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_SCC: u32 = u32::MAX;

fn code(atom: u32, negative: bool) -> usize {
    (atom as usize) << 1 | negative as usize
}

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
struct Csr<T> {
    start: Vec<u32>,
    data: Vec<T>,
}

impl<T: Copy> Csr<T> {
    fn build(n: usize, items: impl Iterator<Item = (usize, T)> + Clone) -> Self {
        let mut start = vec![0u32; n + 1];
        for (k, _) in items.clone() {
            start[k + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut data: Vec<Option<T>> = vec![None; start[n] as usize];
        for (k, v) in items {
            data[fill[k] as usize] = Some(v);
            fill[k] += 1;
        }
        Csr { start, data: data.into_iter().map(Option::unwrap).collect() }
    }

}

#[derive(Debug, Clone, Copy)]
struct Frame {
    trail_len: usize,
    atom: u32,
    value: bool,
    flipped: bool,
}

pub struct Solver {
    opts: SolverOptions,
    n: u32,
    rules: Vec<Rule>,
    heads: Vec<u32>,
    lits: Vec<u32>,
    weights: Vec<u64>,
    occ: Csr<(u32, u64)>,
    head_occ: Csr<u32>,
    support: Vec<u32>,
    val: Vec<i8>,
    trail: Vec<u32>,
    qhead: usize,
    levels: Vec<usize>,
    // unfounded-set machinery
    scc_of: Vec<u32>,
    scc_atoms: Vec<Vec<u32>>,
    scc_rules: Vec<Vec<u32>>,
    dirty: Vec<bool>,
    dirty_list: Vec<u32>,
    global_dirty: bool,
    avail: Vec<u128>,
    founded: Vec<u32>,
    epoch: u32,
    // search
    frames: Vec<Frame>,
    started: bool,
    searching: bool,
    done: bool,
    cursor: u32,
    rng: Option<ChaCha8Rng>,
    stats: Stats,
    program: Option<PrimitiveProgram>,
    required: (Vec<u32>, Vec<u32>),
}

impl Solver {
    pub fn new(program: &PrimitiveProgram, opts: SolverOptions) -> Self {
        let n = program.max_atom().max(1);
        let mut rules = Vec::with_capacity(program.rules.len());
        let mut heads = Vec::new();
        let mut lits = Vec::new();
        let mut weights = Vec::new();
        for r in &program.rules {
            let h0 = heads.len() as u32;
            heads.extend(r.heads().iter().map(|a| a.0));
            let l0 = lits.len() as u32;
            let (kind, bound) = match r {
                PrimitiveRule::Basic { pos, neg, .. } => (Kind::Normal, (pos.len() + neg.len()) as u128),
                PrimitiveRule::Choice { pos, neg, .. } => (Kind::Choice, (pos.len() + neg.len()) as u128),
                PrimitiveRule::Constraint { bound, .. } | PrimitiveRule::Weight { bound, .. } => {
                    (Kind::Normal, *bound as u128)
                }
            };
            let mut total = 0u128;
            let mut max_w = 0u64;
            for (a, negative, w) in r.body() {
                lits.push(code(a.0, negative) as u32);
                weights.push(w);
                total += w as u128;
                max_w = max_w.max(w);
            }
            rules.push(Rule {
                kind,
                heads: (h0, heads.len() as u32),
                lits: (l0, lits.len() as u32),
                bound,
                total,
                max_w,
                sat: 0,
                fals: 0,
                cyclic: false,
            });
        }
        let nl = 2 * (n as usize + 1);
        let (lr, wr, hr) = (&lits, &weights, &heads);
        let occ = Csr::build(
            nl,
            rules.iter().enumerate().flat_map(|(ri, r)| {
                (r.lits.0..r.lits.1).map(move |i| (lr[i as usize] as usize, (ri as u32, wr[i as usize])))
            }),
        );
        let head_occ = Csr::build(
            n as usize + 1,
            rules.iter().enumerate().flat_map(|(ri, r)| {
                (r.heads.0..r.heads.1).map(move |i| (hr[i as usize] as usize, ri as u32))
            }),
        );
        let mut support = vec![0u32; n as usize + 1];
        for r in &rules {
            if !r.is_false() {
                for i in r.heads.0..r.heads.1 {
                    support[heads[i as usize] as usize] += 1;
                }
            }
        }
        let rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
        let nrules = rules.len();
        let mut s = Solver {
            opts,
            n,
            rules,
            heads,
            lits,
            weights,
            occ,
            head_occ,
            support,
            val: vec![UNKNOWN; n as usize + 1],
            trail: Vec::new(),
            qhead: 0,
            levels: Vec::new(),
            scc_of: vec![NO_SCC; n as usize + 1],
            scc_atoms: Vec::new(),
            scc_rules: Vec::new(),
            dirty: Vec::new(),
            dirty_list: Vec::new(),
            global_dirty: true,
            avail: vec![0; nrules],
            founded: vec![0; n as usize + 1],
            epoch: 0,
            frames: Vec::new(),
            started: false,
            searching: false,
            done: false,
            cursor: 2,
            rng,
            stats: Stats::default(),
            program: None,
            required: (
                program.compute.positive.iter().map(|a| a.0).collect(),
                program.compute.negative.iter().map(|a| a.0).collect(),
            ),
        };
        s.build_components();
        if s.opts.verify {
            s.program = Some(program.clone());
        }
        s
    }

    /// Cyclic strongly connected components of the positive dependency graph.
    fn build_components(&mut self) {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.n as usize + 1, self.lits.len());
        for _ in 0..=self.n {
            g.add_node(());
        }
        let mut self_loop = vec![false; self.n as usize + 1];
        for r in &self.rules {
            for hi in r.heads.0..r.heads.1 {
                let h = self.heads[hi as usize];
                for li in r.lits.0..r.lits.1 {
                    let l = self.lits[li as usize];
                    if l & 1 == 0 {
                        let b = l >> 1;
                        if b == h {
                            self_loop[h as usize] = true;
                        }
                        g.add_edge(NodeIndex::new(h as usize), NodeIndex::new(b as usize), ());
                    }
                }
            }
        }
        for comp in tarjan_scc(&g) {
            if comp.len() > 1 || self_loop[comp[0].index()] {
                let id = self.scc_atoms.len() as u32;
                let atoms: Vec<u32> = comp.iter().map(|n| n.index() as u32).collect();
                for &a in &atoms {
                    self.scc_of[a as usize] = id;
                }
                self.scc_atoms.push(atoms);
            }
        }
        self.scc_rules = vec![Vec::new(); self.scc_atoms.len()];
        for (ri, r) in self.rules.iter_mut().enumerate() {
            let mut seen: Vec<u32> = Vec::new();
            for hi in r.heads.0..r.heads.1 {
                let s = self.scc_of[self.heads[hi as usize] as usize];
                if s != NO_SCC && !seen.contains(&s) {
                    seen.push(s);
                    self.scc_rules[s as usize].push(ri as u32);
                }
            }
            r.cyclic = !seen.is_empty();
        }
        self.dirty = vec![true; self.scc_atoms.len()];
        self.dirty_list = (0..self.scc_atoms.len() as u32).collect();
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn max_atom(&self) -> u32 {
        self.n
    }

    pub fn value(&self, a: AtomId) -> Option<bool> {
        match self.val[a.index()] {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    /// Truth value of every atom, indexed by atom number (index 0 unused).
    pub fn assignment(&self) -> Vec<Option<bool>> {
        (0..=self.n).map(|a| if a == 0 { None } else { self.value(AtomId(a)) }).collect()
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    // ---- assignment and counters ----

    fn assign(&mut self, a: u32, v: bool) -> Result<(), Conflict> {
        let want = if v { TRUE } else { FALSE };
        match self.val[a as usize] {
            UNKNOWN => {}
            cur if cur == want => return Ok(()),
            _ => return Err(Conflict),
        }
        self.val[a as usize] = want;
        self.trail.push(a);
        self.stats.propagations += 1;
        let (sat_code, false_code) = (code(a, !v), code(a, v));
        for i in self.occ.start[sat_code]..self.occ.start[sat_code + 1] {
            let (r, w) = self.occ.data[i as usize];
            self.rules[r as usize].sat += w as u128;
        }
        for i in self.occ.start[false_code]..self.occ.start[false_code + 1] {
            let (r, w) = self.occ.data[i as usize];
            let rule = &mut self.rules[r as usize];
            let was_false = rule.is_false();
            rule.fals += w as u128;
            if !was_false && rule.is_false() {
                for hi in rule.heads.0..rule.heads.1 {
                    self.support[self.heads[hi as usize] as usize] -= 1;
                }
            }
            if rule.cyclic {
                self.mark_dirty(r);
            }
        }
        if !v {
            let s = self.scc_of[a as usize];
            if s != NO_SCC && !self.dirty[s as usize] {
                self.dirty[s as usize] = true;
                self.dirty_list.push(s);
            }
        }
        self.global_dirty = true;
        Ok(())
    }

    fn mark_dirty(&mut self, r: u32) {
        let rule = &self.rules[r as usize];
        for hi in rule.heads.0..rule.heads.1 {
            let s = self.scc_of[self.heads[hi as usize] as usize];
            if s != NO_SCC && !self.dirty[s as usize] {
                self.dirty[s as usize] = true;
                self.dirty_list.push(s);
            }
        }
    }

    fn unassign(&mut self, a: u32) {
        let v = self.val[a as usize] == TRUE;
        let (sat_code, false_code) = (code(a, !v), code(a, v));
        for i in self.occ.start[sat_code]..self.occ.start[sat_code + 1] {
            let (r, w) = self.occ.data[i as usize];
            self.rules[r as usize].sat -= w as u128;
        }
        for i in self.occ.start[false_code]..self.occ.start[false_code + 1] {
            let (r, w) = self.occ.data[i as usize];
            let rule = &mut self.rules[r as usize];
            let was_false = rule.is_false();
            rule.fals -= w as u128;
            if was_false && !rule.is_false() {
                for hi in rule.heads.0..rule.heads.1 {
                    self.support[self.heads[hi as usize] as usize] += 1;
                }
            }
        }
        self.val[a as usize] = UNKNOWN;
        if a < self.cursor {
            self.cursor = a;
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let a = self.trail.pop().unwrap();
            self.unassign(a);
        }
        self.qhead = self.qhead.min(len);
    }

    fn lit_value(&self, l: u32) -> i8 {
        let v = self.val[(l >> 1) as usize];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn set_lit(&mut self, l: u32, truth: bool) -> Result<(), Conflict> {
        self.assign(l >> 1, truth != (l & 1 == 1))
    }

    // ---- ATLEAST ----

    fn process(&mut self, a: u32) -> Result<(), Conflict> {
        for c in [code(a, false), code(a, true)] {
            for i in self.occ.start[c]..self.occ.start[c + 1] {
                let r = self.occ.data[i as usize].0;
                self.check_rule(r)?;
            }
        }
        match self.val[a as usize] {
            FALSE => {
                for i in self.head_occ.start[a as usize]..self.head_occ.start[a as usize + 1] {
                    let r = self.head_occ.data[i as usize];
                    if self.rules[r as usize].kind == Kind::Normal {
                        self.contrapose(r)?;
                    }
                }
            }
            _ => match self.support[a as usize] {
                0 => return Err(Conflict),
                1 => self.backchain(a)?,
                _ => {}
            },
        }
        Ok(())
    }

    fn check_rule(&mut self, r: u32) -> Result<(), Conflict> {
        let rule = &self.rules[r as usize];
        let (h0, h1) = rule.heads;
        if rule.is_true() {
            if rule.kind == Kind::Normal {
                self.assign(self.heads[h0 as usize], true)?;
            }
        } else if rule.is_false() {
            for hi in h0..h1 {
                let h = self.heads[hi as usize];
                match self.support[h as usize] {
                    0 => self.assign(h, false)?,
                    1 if self.val[h as usize] == TRUE => self.backchain(h)?,
                    _ => {}
                }
            }
        } else {
            if rule.kind == Kind::Normal && self.val[self.heads[h0 as usize] as usize] == FALSE {
                self.contrapose(r)?;
            }
            let rule = &self.rules[r as usize];
            if rule.total - rule.fals < rule.bound + rule.max_w as u128 {
                for hi in h0..h1 {
                    let h = self.heads[hi as usize];
                    if self.val[h as usize] == TRUE && self.support[h as usize] == 1 {
                        self.backchain(h)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// The head of `r` is false: no literal may complete its body.
    fn contrapose(&mut self, r: u32) -> Result<(), Conflict> {
        let rule = &self.rules[r as usize];
        if rule.is_false() {
            return Ok(());
        }
        if rule.is_true() {
            return Err(Conflict);
        }
        if rule.sat + (rule.max_w as u128) < rule.bound {
            return Ok(());
        }
        let (l0, l1) = rule.lits;
        for i in l0..l1 {
            let l = self.lits[i as usize];
            let w = self.weights[i as usize] as u128;
            let rule = &self.rules[r as usize];
            if self.lit_value(l) == UNKNOWN && rule.sat + w >= rule.bound {
                self.set_lit(l, false)?;
            }
        }
        Ok(())
    }

    /// `h` is true and has a single rule left that can derive it: that
    /// rule's body must hold.
    fn backchain(&mut self, h: u32) -> Result<(), Conflict> {
        let mut supporter = None;
        for i in self.head_occ.start[h as usize]..self.head_occ.start[h as usize + 1] {
            let r = self.head_occ.data[i as usize];
            if !self.rules[r as usize].is_false() {
                supporter = Some(r);
                break;
            }
        }
        let Some(r) = supporter else { return Err(Conflict) };
        let rule = &self.rules[r as usize];
        if rule.is_true() || rule.total - rule.fals >= rule.bound + rule.max_w as u128 {
            return Ok(());
        }
        let (l0, l1) = rule.lits;
        for i in l0..l1 {
            let l = self.lits[i as usize];
            let w = self.weights[i as usize] as u128;
            let rule = &self.rules[r as usize];
            if self.lit_value(l) == UNKNOWN && rule.total - rule.fals < rule.bound + w {
                self.set_lit(l, true)?;
            }
        }
        Ok(())
    }

    // ---- ATMOST ----

    /// Atoms of component `s` (or of the whole program when `s` is `None`)
    /// that are not false and have no support independent of the component.
    fn unfounded(&mut self, s: Option<u32>) -> Vec<u32> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.founded.iter_mut().for_each(|f| *f = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let in_scope = |scc_of: &[u32], a: u32| match s {
            Some(s) => scc_of[a as usize] == s,
            None => true,
        };
        let rule_ids: Vec<u32> = match s {
            Some(s) => self.scc_rules[s as usize].clone(),
            None => (0..self.rules.len() as u32).collect(),
        };
        let mut queue: Vec<u32> = Vec::new();
        for &r in &rule_ids {
            let rule = &self.rules[r as usize];
            if rule.is_false() {
                continue;
            }
            let mut avail = 0u128;
            for i in rule.lits.0..rule.lits.1 {
                let l = self.lits[i as usize];
                if self.lit_value(l) == FALSE || (l & 1 == 0 && in_scope(&self.scc_of, l >> 1)) {
                    continue;
                }
                avail += self.weights[i as usize] as u128;
            }
            self.avail[r as usize] = avail;
            if avail >= rule.bound {
                for hi in rule.heads.0..rule.heads.1 {
                    let h = self.heads[hi as usize];
                    if in_scope(&self.scc_of, h) && self.val[h as usize] != FALSE && self.founded[h as usize] != epoch {
                        self.founded[h as usize] = epoch;
                        queue.push(h);
                    }
                }
            }
        }
        while let Some(b) = queue.pop() {
            let c = code(b, false);
            for i in self.occ.start[c]..self.occ.start[c + 1] {
                let (r, w) = self.occ.data[i as usize];
                let rule = &self.rules[r as usize];
                if rule.is_false() {
                    continue;
                }
                let relevant = match s {
                    Some(s) => rule.cyclic && self.scc_rules[s as usize].binary_search(&r).is_ok(),
                    None => true,
                };
                if !relevant {
                    continue;
                }
                let before = self.avail[r as usize];
                self.avail[r as usize] = before + w as u128;
                if before < rule.bound && before + w as u128 >= rule.bound {
                    for hi in rule.heads.0..rule.heads.1 {
                        let h = self.heads[hi as usize];
                        if in_scope(&self.scc_of, h) && self.val[h as usize] != FALSE && self.founded[h as usize] != epoch
                        {
                            self.founded[h as usize] = epoch;
                            queue.push(h);
                        }
                    }
                }
            }
        }
        let atoms: Vec<u32> = match s {
            Some(s) => self.scc_atoms[s as usize].clone(),
            None => (2..=self.n).collect(),
        };
        atoms.into_iter().filter(|&a| self.val[a as usize] != FALSE && self.founded[a as usize] != epoch).collect()
    }

    /// Falsifies unfounded atoms; returns whether anything was assigned.
    fn atmost(&mut self) -> Result<bool, Conflict> {
        if self.opts.full_atmost {
            if !self.global_dirty {
                return Ok(false);
            }
            self.global_dirty = false;
            let u = self.unfounded(None);
            for &a in &u {
                self.assign(a, false)?;
            }
            return Ok(!u.is_empty());
        }
        while let Some(s) = self.dirty_list.pop() {
            self.dirty[s as usize] = false;
            let u = self.unfounded(Some(s));
            if !u.is_empty() {
                for a in u {
                    self.assign(a, false)?;
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Propagates to a fixpoint of ATLEAST and ATMOST.
    pub fn expand(&mut self) -> Result<(), Conflict> {
        loop {
            while self.qhead < self.trail.len() {
                let a = self.trail[self.qhead];
                self.qhead += 1;
                self.process(a)?;
            }
            if !self.atmost()? {
                return Ok(());
            }
        }
    }

    // ---- levels ----

    /// Opens a new decision level and assigns `atom` (without propagating).
    pub fn assume(&mut self, atom: AtomId, value: bool) -> Result<(), Conflict> {
        self.levels.push(self.trail.len());
        self.assign(atom.0, value)
    }

    /// Undoes the most recent decision level; false at level 0.
    pub fn backtrack(&mut self) -> bool {
        match self.levels.pop() {
            Some(len) => {
                self.undo_to(len);
                true
            }
            None => false,
        }
    }

    /// Level-0 assignments: the falsity atom, compute literals, facts.
    fn init(&mut self) -> Result<(), Conflict> {
        self.assign(1, false)?;
        for a in self.required.0.clone() {
            self.assign(a, true)?;
        }
        for a in self.required.1.clone() {
            self.assign(a, false)?;
        }
        for r in 0..self.rules.len() as u32 {
            self.check_rule(r)?;
        }
        for a in 2..=self.n {
            if self.support[a as usize] == 0 {
                self.assign(a, false)?;
            }
        }
        self.expand()
    }

    /// Prepares the level-0 state; further calls are no-ops.
    pub fn initialize(&mut self) -> Result<(), Conflict> {
        if self.started {
            return if self.done { Err(Conflict) } else { Ok(()) };
        }
        self.started = true;
        let r = self.init();
        if r.is_err() {
            self.done = true;
        }
        r
    }

    // ---- lookahead ----

    fn probe(&mut self, a: u32, v: bool) -> Option<usize> {
        let start = self.trail.len();
        self.levels.push(start);
        let r = self.assign(a, v).and_then(|_| self.expand());
        let n = self.trail.len() - start;
        self.backtrack();
        r.ok().map(|_| n)
    }

    fn candidates(&mut self) -> Vec<u32> {
        while self.cursor <= self.n && self.val[self.cursor as usize] != UNKNOWN {
            self.cursor += 1;
        }
        let unknown = (self.cursor..=self.n).filter(|&a| self.val[a as usize] == UNKNOWN);
        let limit = self.opts.full_lookahead_limit;
        let mut c: Vec<u32> = unknown.clone().take(limit + 1).collect();
        if c.len() > limit {
            c = unknown.take(self.opts.sample_size.max(1)).collect();
        }
        if let Some(rng) = &mut self.rng {
            c.shuffle(rng);
        }
        c
    }

    /// Probes candidate atoms; failed literals are fixed in place. Returns
    /// the branching literal, or `None` when every atom is assigned.
    pub fn lookahead(&mut self) -> Result<Option<(AtomId, bool)>, Conflict> {
        loop {
            let cands = self.candidates();
            if cands.is_empty() {
                return Ok(None);
            }
            let mut best: Option<(usize, u32)> = None;
            let mut forced = false;
            for a in cands {
                if self.val[a as usize] != UNKNOWN {
                    continue;
                }
                let t = self.probe(a, true);
                let f = self.probe(a, false);
                match (t, f) {
                    (None, None) => return Err(Conflict),
                    (None, Some(_)) | (Some(_), None) => {
                        self.assign(a, t.is_some())?;
                        self.expand()?;
                        forced = true;
                    }
                    (Some(x), Some(y)) => {
                        let score = x + y;
                        let better = match best {
                            None => true,
                            Some((s, b)) => score > s || (score == s && self.rng.is_none() && a < b),
                        };
                        if better {
                            best = Some((score, a));
                        }
                    }
                }
            }
            if forced {
                continue;
            }
            let (_, a) = best.expect("unknown atoms remain");
            let value = match &mut self.rng {
                Some(rng) => rng.gen_bool(0.5),
                None => true,
            };
            return Ok(Some((AtomId(a), value)));
        }
    }

    // ---- search ----

    fn flip(&mut self) -> bool {
        while let Some(f) = self.frames.pop() {
            self.levels.pop();
            self.undo_to(f.trail_len);
            if !f.flipped {
                self.levels.push(f.trail_len);
                self.frames.push(Frame { value: !f.value, flipped: true, ..f });
                self.assign(f.atom, !f.value).expect("flipped atom is unassigned");
                return true;
            }
        }
        false
    }

    /// The next stable model, or `None` once the search space is exhausted.
    pub fn next_model(&mut self) -> Option<BTreeSet<AtomId>> {
        if self.done {
            return None;
        }
        if !self.searching {
            self.searching = true;
            if self.initialize().is_err() {
                return None;
            }
        } else if !self.flip() {
            self.done = true;
            return None;
        }
        loop {
            match self.expand().and_then(|_| self.lookahead()) {
                Err(Conflict) => {
                    self.stats.conflicts += 1;
                    if !self.flip() {
                        self.done = true;
                        return None;
                    }
                }
                Ok(Some((a, v))) => {
                    self.stats.decisions += 1;
                    self.frames.push(Frame { trail_len: self.trail.len(), atom: a.0, value: v, flipped: false });
                    self.levels.push(self.trail.len());
                    self.assign(a.0, v).expect("decision atom is unassigned");
                }
                Ok(None) => {
                    let model: BTreeSet<AtomId> =
                        (2..=self.n).filter(|&a| self.val[a as usize] == TRUE).map(AtomId).collect();
                    if self.opts.verify {
                        if let Err(e) = self.check_counters() {
                            panic!("counter check failed: {e}");
                        }
                        let p = self.program.as_ref().unwrap();
                        assert!(oracle::is_stable(p, &model), "solver produced a model that is not stable");
                    }
                    self.stats.models += 1;
                    return Some(model);
                }
            }
        }
    }

    /// Recounts every counter from the assignment and compares.
    pub fn check_counters(&self) -> Result<(), String> {
        let mut support = vec![0u32; self.n as usize + 1];
        for (ri, r) in self.rules.iter().enumerate() {
            let (mut sat, mut fals) = (0u128, 0u128);
            for i in r.lits.0..r.lits.1 {
                match self.lit_value(self.lits[i as usize]) {
                    TRUE => sat += self.weights[i as usize] as u128,
                    FALSE => fals += self.weights[i as usize] as u128,
                    _ => {}
                }
            }
            if sat != r.sat || fals != r.fals {
                return Err(format!("rule {ri}: counters ({}, {}) but recount ({sat}, {fals})", r.sat, r.fals));
            }
            if !r.is_false() {
                for hi in r.heads.0..r.heads.1 {
                    support[self.heads[hi as usize] as usize] += 1;
                }
            }
        }
        if support != self.support {
            return Err("support counts differ from recount".into());
        }
        Ok(())
    }
}

impl Iterator for Solver {
    type Item = BTreeSet<AtomId>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_model()
    }
}

/// Up to `count` stable models (all when `count` is 0).
pub fn solve(program: &PrimitiveProgram, opts: SolverOptions, count: u64) -> (Vec<BTreeSet<AtomId>>, Stats) {
    let mut s = Solver::new(program, opts);
    let mut out = Vec::new();
    while count == 0 || (out.len() as u64) < count {
        match s.next_model() {
            Some(m) => out.push(m),
            None => break,
        }
    }
    (out, s.stats())
}

/// Atoms the search may have to guess: heads of choice rules and atoms
/// occurring negatively in a rule whose head depends on them.
pub fn guess_atoms(program: &PrimitiveProgram) -> BTreeSet<AtomId> {
    let n = program.max_atom() as usize;
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n + 1, 0);
    for _ in 0..=n {
        g.add_node(());
    }
    for r in &program.rules {
        for h in r.heads() {
            for (b, _, _) in r.body() {
                g.add_edge(NodeIndex::new(h.index()), NodeIndex::new(b.index()), ());
            }
        }
    }
    let mut comp = vec![0usize; n + 1];
    for (i, c) in tarjan_scc(&g).iter().enumerate() {
        for x in c {
            comp[x.index()] = i;
        }
    }
    let mut out = BTreeSet::new();
    for r in &program.rules {
        if let PrimitiveRule::Choice { heads, .. } = r {
            out.extend(heads.iter().copied());
        }
        for h in r.heads() {
            for (b, negative, _) in r.body() {
                if negative && comp[b.index()] == comp[h.index()] {
                    out.insert(b);
                }
            }
        }
    }
    out
}
