//! Source-syntax rendering. Output reparses to a structurally identical AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) | Term::Symbol(v) => f.write_str(v),
            Term::Integer(n) if *n < 0 => write!(f, "({n})"),
            Term::Integer(n) => write!(f, "{n}"),
            Term::Range(lo, hi) => write!(f, "{lo}..{hi}"),
            Term::Pool(ts) => join(f, ts, ";"),
            Term::Func(BuiltinOp::Abs, args) => write!(f, "abs({})", args[0]),
            Term::Func(BuiltinOp::Neg, args) => write!(f, "-{}", Paren(&args[0])),
            Term::Func(op, args) => {
                let sep = if *op == BuiltinOp::Mod { " mod " } else { op.symbol() };
                write!(f, "{}{sep}{}", Paren(&args[0]), Paren(&args[1]))
            }
        }
    }
}

/// Parenthesises compound arithmetic so nesting survives a reparse.
struct Paren<'a>(&'a Term);

impl Display for Paren<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Func(BuiltinOp::Abs, _) => write!(f, "{}", self.0),
            Term::Func(..) => write!(f, "({})", self.0),
            t => write!(f, "{t}"),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            join(f, &self.args, ",")?;
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("not ")?;
        }
        match &self.kind {
            LiteralKind::Atom(a) => write!(f, "{a}"),
            LiteralKind::Comparison { lhs, op, rhs, .. } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            LiteralKind::Conditional { atom, conditions } => {
                write!(f, "{atom}")?;
                for c in conditions {
                    write!(f, " : {c}")?;
                }
                Ok(())
            }
        }
    }
}

impl Display for WeightedLiteral {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.literal, self.weight)
    }
}

fn bounded<T: Display>(
    f: &mut Formatter<'_>,
    lower: &Option<Term>,
    open: &str,
    elems: &[T],
    close: &str,
    upper: &Option<Term>,
) -> fmt::Result {
    if let Some(l) = lower {
        write!(f, "{l} ")?;
    }
    f.write_str(open)?;
    join(f, elems, ", ")?;
    f.write_str(close)?;
    if let Some(u) = upper {
        write!(f, " {u}")?;
    }
    Ok(())
}

impl Display for Head {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Head::Atom(a) => write!(f, "{a}"),
            Head::Falsity => Ok(()),
            Head::Cardinality { lower, elems, upper } => bounded(f, lower, "{ ", elems, " }", upper),
            Head::Weight { lower, elems, upper } => bounded(f, lower, "[ ", elems, " ]", upper),
        }
    }
}

impl Display for BodyElem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            BodyElem::Literal(l) => write!(f, "{l}"),
            BodyElem::Cardinality { lower, elems, upper } => bounded(f, lower, "{ ", elems, " }", upper),
            BodyElem::Weight { lower, elems, upper } => bounded(f, lower, "[ ", elems, " ]", upper),
        }
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            if self.head != Head::Falsity {
                f.write_char(' ')?;
            }
            f.write_str(":- ")?;
            join(f, &self.body, ", ")?;
        }
        f.write_char('.')
    }
}

impl Display for Compute {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("compute ")?;
        if let Some(n) = self.models {
            write!(f, "{n} ")?;
        }
        f.write_str("{ ")?;
        join(f, &self.literals, ", ")?;
        f.write_str(" }.")
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (name, value) in &self.consts {
            writeln!(f, "#const {name} = {value}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        if let Some(c) = &self.compute {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn join<T: Display>(f: &mut Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}
