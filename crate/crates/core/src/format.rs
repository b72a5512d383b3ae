//! The line-oriented numeric interchange format between grounder and solver.

use std::fmt::Write;

use crate::error::FormatError;
use crate::ground::{AtomId, ComputeSpec, SymbolTable};
use crate::translate::{PrimitiveProgram, PrimitiveRule};

fn ids(out: &mut String, atoms: &[AtomId]) {
    for a in atoms {
        write!(out, " {}", a.0).unwrap();
    }
}

pub fn emit_ground_format(program: &PrimitiveProgram) -> String {
    let mut out = String::with_capacity(program.rules.len() * 16);
    for r in &program.rules {
        match r {
            PrimitiveRule::Basic { head, pos, neg } => {
                write!(out, "1 {} {} {}", head.0, pos.len() + neg.len(), neg.len()).unwrap();
                ids(&mut out, neg);
                ids(&mut out, pos);
            }
            PrimitiveRule::Constraint { head, bound, pos, neg } => {
                write!(out, "2 {} {} {} {}", head.0, pos.len() + neg.len(), neg.len(), bound).unwrap();
                ids(&mut out, neg);
                ids(&mut out, pos);
            }
            PrimitiveRule::Choice { heads, pos, neg } => {
                write!(out, "3 {}", heads.len()).unwrap();
                ids(&mut out, heads);
                write!(out, " {} {}", pos.len() + neg.len(), neg.len()).unwrap();
                ids(&mut out, neg);
                ids(&mut out, pos);
            }
            PrimitiveRule::Weight { head, bound, pos, neg } => {
                write!(out, "5 {} {} {} {}", head.0, bound, pos.len() + neg.len(), neg.len()).unwrap();
                for (a, _) in neg.iter().chain(pos) {
                    write!(out, " {}", a.0).unwrap();
                }
                for (_, w) in neg.iter().chain(pos) {
                    write!(out, " {w}").unwrap();
                }
            }
        }
        out.push('\n');
    }
    out.push_str("0\n");
    for (id, name) in program.symbols.named() {
        writeln!(out, "{} {}", id.0, name).unwrap();
    }
    out.push_str("0\nB+\n");
    for a in &program.compute.positive {
        writeln!(out, "{}", a.0).unwrap();
    }
    out.push_str("0\nB-\n1\n");
    for a in &program.compute.negative {
        writeln!(out, "{}", a.0).unwrap();
    }
    writeln!(out, "0\n{}", program.compute.models).unwrap();
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, FormatError> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => Err(FormatError::Malformed { line: self.line + 1, reason: "unexpected end of input".into() }),
        }
    }

    fn err(&self, reason: impl Into<String>) -> FormatError {
        FormatError::Malformed { line: self.line, reason: reason.into() }
    }
}

struct Fields<'a, 'l> {
    it: std::str::SplitAsciiWhitespace<'a>,
    lines: &'l Lines<'a>,
}

impl Fields<'_, '_> {
    fn num(&mut self) -> Result<u64, FormatError> {
        let f = self.it.next().ok_or_else(|| self.lines.err("missing field"))?;
        f.parse().map_err(|_| self.lines.err(format!("expected a non-negative integer, found `{f}`")))
    }

    fn atom(&mut self) -> Result<AtomId, FormatError> {
        let n = self.num()?;
        if n == 0 || n > u32::MAX as u64 {
            return Err(self.lines.err(format!("invalid atom number {n}")));
        }
        Ok(AtomId(n as u32))
    }

    fn count(&mut self) -> Result<usize, FormatError> {
        let n = self.num()?;
        usize::try_from(n).map_err(|_| self.lines.err("count too large"))
    }

    fn atoms(&mut self, n: usize) -> Result<Vec<AtomId>, FormatError> {
        (0..n).map(|_| self.atom()).collect()
    }

    fn lits(&mut self) -> Result<(usize, usize), FormatError> {
        let lits = self.count()?;
        let neg = self.count()?;
        if neg > lits {
            return Err(self.lines.err("more negative literals than literals"));
        }
        Ok((lits, neg))
    }

    fn end(&mut self) -> Result<(), FormatError> {
        match self.it.next() {
            None => Ok(()),
            Some(f) => Err(self.lines.err(format!("unexpected trailing field `{f}`"))),
        }
    }
}

/// Inverse of [`emit_ground_format`].
pub fn parse_ground_format(text: &str) -> Result<PrimitiveProgram, FormatError> {
    let mut lines = Lines { iter: text.lines().enumerate(), line: 0 };
    let mut rules = Vec::new();
    loop {
        let l = lines.next()?;
        let mut f = Fields { it: l.split_ascii_whitespace(), lines: &lines };
        let ty = f.it.next().ok_or_else(|| lines.err("empty line"))?;
        let ty: i64 = ty.parse().map_err(|_| lines.err(format!("expected a rule type, found `{ty}`")))?;
        let rule = match ty {
            0 => {
                f.end()?;
                break;
            }
            1 => {
                let head = f.atom()?;
                let (n, k) = f.lits()?;
                let neg = f.atoms(k)?;
                let pos = f.atoms(n - k)?;
                PrimitiveRule::Basic { head, pos, neg }
            }
            2 => {
                let head = f.atom()?;
                let (n, k) = f.lits()?;
                let bound = f.num()?;
                let neg = f.atoms(k)?;
                let pos = f.atoms(n - k)?;
                PrimitiveRule::Constraint { head, bound, pos, neg }
            }
            3 => {
                let h = f.count()?;
                let heads = f.atoms(h)?;
                let (n, k) = f.lits()?;
                let neg = f.atoms(k)?;
                let pos = f.atoms(n - k)?;
                PrimitiveRule::Choice { heads, pos, neg }
            }
            5 => {
                let head = f.atom()?;
                let bound = f.num()?;
                let (n, k) = f.lits()?;
                let atoms = f.atoms(n)?;
                let weights = (0..n).map(|_| f.num()).collect::<Result<Vec<_>, _>>()?;
                let mut it = atoms.into_iter().zip(weights);
                let neg = it.by_ref().take(k).collect();
                let pos = it.collect();
                PrimitiveRule::Weight { head, bound, pos, neg }
            }
            ty => return Err(FormatError::UnknownRuleType { line: lines.line, ty }),
        };
        f.end()?;
        rules.push(rule);
    }

    let mut symbols = SymbolTable::new();
    loop {
        let l = lines.next()?;
        if l == "0" {
            break;
        }
        let (id, name) = l.split_once(' ').ok_or_else(|| lines.err("expected `id name`"))?;
        let id: u32 = id.parse().map_err(|_| lines.err(format!("invalid atom number `{id}`")))?;
        if id < 2 || name.is_empty() {
            return Err(lines.err("invalid symbol table entry"));
        }
        symbols.set(AtomId(id), name);
    }

    let mut compute = ComputeSpec::default();
    for (label, negative) in [("B+", false), ("B-", true)] {
        if lines.next()? != label {
            return Err(lines.err(format!("expected `{label}`")));
        }
        loop {
            let l = lines.next()?;
            let n: u32 = l.trim().parse().map_err(|_| lines.err(format!("invalid atom number `{l}`")))?;
            match (n, negative) {
                (0, _) => break,
                (1, true) => {}
                (n, true) => compute.negative.push(AtomId(n)),
                (n, false) => compute.positive.push(AtomId(n)),
            }
        }
    }
    let l = lines.next()?;
    compute.models = l.trim().parse().map_err(|_| lines.err(format!("invalid model count `{l}`")))?;
    for (i, rest) in lines.iter.by_ref() {
        if !rest.trim().is_empty() {
            return Err(FormatError::Malformed { line: i + 1, reason: "unexpected content after model count".into() });
        }
    }

    let mut p = PrimitiveProgram { rules, symbols, compute };
    p.reserve_atoms();
    Ok(p)
}
