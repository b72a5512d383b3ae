//! Recursive descent parser for the rule language.
//!
//! Arithmetic precedence, tightest first: unary `-` and `abs(..)`, then
//! `*`, `/`, `mod`, then `+`, `-`. All binary operators are left associative.

use super::ast::*;
use super::lexer::{Tok, Token};
use crate::error::SyntaxError;

/// Either an atom-shaped expression (`p`, `p(X)`) or an arithmetic term.
/// Which one it is only becomes clear after looking at the following token.
enum Expr {
    Atom(Atom),
    Term(Term),
}

pub fn parse_program(tokens: &[Token]) -> Result<Program, SyntaxError> {
    let mut p = Parser { tokens, idx: 0 };
    let mut program = Program::default();
    while p.peek() != &Tok::Eof {
        match p.peek() {
            Tok::HashConst => {
                let (name, value) = p.const_decl()?;
                program.consts.insert(name, value);
            }
            Tok::Compute => {
                let pos = p.pos();
                let c = p.compute()?;
                if program.compute.is_some() {
                    return Err(SyntaxError::DuplicateCompute { pos });
                }
                program.compute = Some(c);
            }
            _ => program.rules.push(p.rule()?),
        }
    }
    Ok(program)
}

struct Parser<'a> {
    tokens: &'a [Token],
    idx: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.idx + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.idx].pos
    }

    fn bump(&mut self) -> &Tok {
        let t = &self.tokens[self.idx].tok;
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        SyntaxError::Unexpected {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    /// Expects the `.` closing a statement. A statement that runs into end of
    /// input or into a new line without one gets a dedicated error.
    fn terminator(&mut self) -> Result<(), SyntaxError> {
        if self.eat(&Tok::Dot) {
            return Ok(());
        }
        let prev = self.tokens[self.idx.saturating_sub(1)].pos;
        let here = self.pos();
        if self.peek() == &Tok::Eof || here.line > prev.line || here.file != prev.file {
            Err(SyntaxError::MissingTerminator { pos: prev })
        } else {
            Err(self.unexpected("`.` or `,`"))
        }
    }

    fn const_decl(&mut self) -> Result<(String, i64), SyntaxError> {
        self.bump();
        let name = match self.bump().clone() {
            Tok::Ident(n) => n,
            _ => {
                self.idx -= 1;
                return Err(self.unexpected("constant name"));
            }
        };
        self.expect(&Tok::Assign, "`=`")?;
        let pos = self.pos();
        let value = self.term()?;
        let value = fold_integer(&value).ok_or_else(|| SyntaxError::Invalid {
            pos,
            message: format!("value of constant `{name}` must be an integer expression"),
        })?;
        self.terminator()?;
        Ok((name, value))
    }

    fn compute(&mut self) -> Result<Compute, SyntaxError> {
        let pos = self.pos();
        self.bump();
        let models = match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Some(n as u64)
            }
            _ => None,
        };
        self.expect(&Tok::LBrace, "`{`")?;
        let mut literals = Vec::new();
        if self.peek() != &Tok::RBrace {
            loop {
                let negative = self.eat(&Tok::Not);
                let atom = self.atom()?;
                literals.push(Literal { negative, kind: LiteralKind::Atom(atom) });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        self.terminator()?;
        Ok(Compute { models, literals, pos })
    }

    fn rule(&mut self) -> Result<Rule, SyntaxError> {
        let pos = self.pos();
        let head = if self.peek() == &Tok::If {
            Head::Falsity
        } else {
            self.head()?
        };
        let mut body = Vec::new();
        if self.eat(&Tok::If) {
            loop {
                body.push(self.body_elem()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        } else if head == Head::Falsity {
            return Err(self.unexpected("`:-`"));
        }
        self.terminator()?;
        Ok(Rule { head, body, pos })
    }

    fn head(&mut self) -> Result<Head, SyntaxError> {
        let lower = match self.peek() {
            Tok::LBrace | Tok::LBracket => None,
            _ => match self.expr()? {
                Expr::Atom(a) if !matches!(self.peek(), Tok::LBrace | Tok::LBracket) => {
                    return Ok(Head::Atom(a));
                }
                e => Some(self.expr_term(e)?),
            },
        };
        if self.eat(&Tok::LBrace) {
            let elems = self.elem_list(&Tok::RBrace, false, false)?;
            let upper = self.upper_bound()?;
            Ok(Head::Cardinality { lower, elems: elems.into_iter().map(|e| e.literal).collect(), upper })
        } else if self.eat(&Tok::LBracket) {
            let elems = self.elem_list(&Tok::RBracket, false, true)?;
            let upper = self.upper_bound()?;
            Ok(Head::Weight { lower, elems, upper })
        } else {
            Err(self.unexpected("`{` or `[`"))
        }
    }

    fn upper_bound(&mut self) -> Result<Option<Term>, SyntaxError> {
        match self.peek() {
            Tok::Int(_) | Tok::Var(_) | Tok::Ident(_) | Tok::Minus | Tok::LParen => Ok(Some(self.term()?)),
            _ => Ok(None),
        }
    }

    fn body_elem(&mut self) -> Result<BodyElem, SyntaxError> {
        if self.eat(&Tok::Not) {
            let atom = self.atom()?;
            return Ok(BodyElem::Literal(self.conditional(atom, true)?));
        }
        let lower = match self.peek() {
            Tok::LBrace | Tok::LBracket => None,
            _ => {
                let e = self.expr()?;
                if let Some(op) = self.cmp_op() {
                    let pos = self.tokens[self.idx - 1].pos;
                    let lhs = self.expr_term(e)?;
                    let rhs = self.term()?;
                    return Ok(BodyElem::Literal(Literal {
                        negative: false,
                        kind: LiteralKind::Comparison { lhs, op, rhs, pos },
                    }));
                }
                match e {
                    Expr::Atom(a) if !matches!(self.peek(), Tok::LBrace | Tok::LBracket) => {
                        return Ok(BodyElem::Literal(self.conditional(a, false)?));
                    }
                    e => Some(self.expr_term(e)?),
                }
            }
        };
        if self.eat(&Tok::LBrace) {
            let elems = self.elem_list(&Tok::RBrace, true, false)?;
            let upper = self.upper_bound()?;
            Ok(BodyElem::Cardinality { lower, elems: elems.into_iter().map(|e| e.literal).collect(), upper })
        } else if self.eat(&Tok::LBracket) {
            let elems = self.elem_list(&Tok::RBracket, true, true)?;
            let upper = self.upper_bound()?;
            Ok(BodyElem::Weight { lower, elems, upper })
        } else {
            Err(self.unexpected("comparison operator, `{` or `[`"))
        }
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn conditional(&mut self, atom: Atom, negative: bool) -> Result<Literal, SyntaxError> {
        let mut conditions = Vec::new();
        while self.eat(&Tok::Colon) {
            conditions.push(self.atom()?);
        }
        let kind = if conditions.is_empty() {
            LiteralKind::Atom(atom)
        } else {
            LiteralKind::Conditional { atom, conditions }
        };
        Ok(Literal { negative, kind })
    }

    /// Elements of `{ ... }` or `[ ... ]`, up to and including the closer.
    /// Weightless elements get weight 1.
    fn elem_list(
        &mut self,
        close: &Tok,
        allow_negation: bool,
        weighted: bool,
    ) -> Result<Vec<WeightedLiteral>, SyntaxError> {
        let mut elems = Vec::new();
        if self.eat(close) {
            return Ok(elems);
        }
        loop {
            let pos = self.pos();
            let negative = self.eat(&Tok::Not);
            if negative && !allow_negation {
                return Err(SyntaxError::Invalid {
                    pos,
                    message: "negative literals are not allowed in rule heads".into(),
                });
            }
            let atom = self.atom()?;
            let literal = self.conditional(atom, negative)?;
            let weight = if weighted && self.eat(&Tok::Assign) {
                self.term()?
            } else {
                Term::Integer(1)
            };
            elems.push(WeightedLiteral { literal, weight });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let what = if close == &Tok::RBrace { "`,` or `}`" } else { "`,` or `]`" };
        self.expect(close, what)?;
        Ok(elems)
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) if name != "abs" => {
                self.bump();
                let args = if self.eat(&Tok::LParen) { self.args()? } else { Vec::new() };
                Ok(Atom { pred: name, args, pos })
            }
            _ => Err(self.unexpected("atom")),
        }
    }

    /// Argument list after `(`, consuming the closing `)`.
    fn args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = Vec::new();
        loop {
            let first = self.range_term()?;
            if self.peek() == &Tok::Semi {
                let mut members = vec![first];
                while self.eat(&Tok::Semi) {
                    members.push(self.range_term()?);
                }
                args.push(Term::Pool(members));
            } else {
                args.push(first);
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RParen, "`,` or `)`")?;
        Ok(args)
    }

    fn range_term(&mut self) -> Result<Term, SyntaxError> {
        let lo = self.term()?;
        if self.eat(&Tok::DotDot) {
            let hi = self.term()?;
            Ok(Term::Range(Box::new(lo), Box::new(hi)))
        } else {
            Ok(lo)
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let e = self.expr()?;
        self.expr_term(e)
    }

    fn expr_term(&self, e: Expr) -> Result<Term, SyntaxError> {
        match e {
            Expr::Term(t) => Ok(t),
            Expr::Atom(a) if a.args.is_empty() => Ok(Term::Symbol(a.pred)),
            Expr::Atom(a) => Err(SyntaxError::Invalid {
                pos: a.pos,
                message: format!("`{}(..)` used as a term; function symbols are not supported", a.pred),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let first = self.mul_expr()?;
        if !matches!(self.peek(), Tok::Plus | Tok::Minus) {
            return Ok(first);
        }
        let mut acc = self.expr_term(first)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BuiltinOp::Add,
                Tok::Minus => BuiltinOp::Sub,
                _ => return Ok(Expr::Term(acc)),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            let rhs = self.expr_term(rhs)?;
            acc = Term::Func(op, vec![acc, rhs]);
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, SyntaxError> {
        let first = self.unary()?;
        if !matches!(self.peek(), Tok::Star | Tok::Slash | Tok::Mod) {
            return Ok(first);
        }
        let mut acc = self.expr_term(first)?;
        loop {
            let op = match self.peek() {
                Tok::Star => BuiltinOp::Mul,
                Tok::Slash => BuiltinOp::Div,
                Tok::Mod => BuiltinOp::Mod,
                _ => return Ok(Expr::Term(acc)),
            };
            self.bump();
            let rhs = self.unary()?;
            let rhs = self.expr_term(rhs)?;
            acc = Term::Func(op, vec![acc, rhs]);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Expr::Term(match self.expr_term(inner)? {
                Term::Integer(n) => Term::Integer(-n),
                t => Term::Func(BuiltinOp::Neg, vec![t]),
            }));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Term(Term::Integer(n)))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(Expr::Term(Term::Variable(v)))
            }
            Tok::Ident(name) if name == "abs" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Expr::Term(Term::Func(BuiltinOp::Abs, vec![t])))
            }
            Tok::Ident(_) => Ok(Expr::Atom(self.atom()?)),
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Expr::Term(t))
            }
            _ => Err(self.unexpected("term")),
        }
    }
}

/// Evaluates a variable-free integer expression; `None` if it is not one.
fn fold_integer(t: &Term) -> Option<i64> {
    match t {
        Term::Integer(n) => Some(*n),
        Term::Func(op, args) => {
            let vals: Option<Vec<i64>> = args.iter().map(fold_integer).collect();
            let vals = vals?;
            match (op, vals.as_slice()) {
                (BuiltinOp::Neg, [a]) => a.checked_neg(),
                (BuiltinOp::Abs, [a]) => a.checked_abs(),
                (BuiltinOp::Add, [a, b]) => a.checked_add(*b),
                (BuiltinOp::Sub, [a, b]) => a.checked_sub(*b),
                (BuiltinOp::Mul, [a, b]) => a.checked_mul(*b),
                (BuiltinOp::Div, [a, b]) => a.checked_div(*b),
                (BuiltinOp::Mod, [a, b]) => a.checked_rem(*b),
                _ => None,
            }
        }
        _ => None,
    }
}
