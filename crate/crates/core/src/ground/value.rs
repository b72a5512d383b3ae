use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write;

use crate::error::GroundError;
use crate::syntax::{BuiltinOp, CmpOp, Pos};

/// A ground term: an integer or an interned symbolic constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Sym(u32),
}

/// Interner for symbolic constants.
#[derive(Debug, Clone, Default)]
pub struct Symbols {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Symbols {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    /// Total order: integers numerically, then symbols by name.
    pub fn compare(&self, a: Value, b: Value) -> Ordering {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => x.cmp(&y),
            (Value::Int(_), Value::Sym(_)) => Ordering::Less,
            (Value::Sym(_), Value::Int(_)) => Ordering::Greater,
            (Value::Sym(x), Value::Sym(y)) => self.name(x).cmp(self.name(y)),
        }
    }

    pub fn write_value(&self, out: &mut String, v: Value) {
        match v {
            Value::Int(n) => write!(out, "{n}").unwrap(),
            Value::Sym(s) => out.push_str(self.name(s)),
        }
    }

    /// `pred(a,b)` without spaces, or `pred` for nullary atoms.
    pub fn atom_text(&self, pred: &str, args: &[Value]) -> String {
        let mut s = String::with_capacity(pred.len() + 4 * args.len() + 2);
        s.push_str(pred);
        if !args.is_empty() {
            s.push('(');
            for (i, v) in args.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                self.write_value(&mut s, *v);
            }
            s.push(')');
        }
        s
    }
}

pub(crate) fn compare(symbols: &Symbols, op: CmpOp, a: Value, b: Value) -> bool {
    let ord = symbols.compare(a, b);
    match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::Ne => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
    }
}

/// Checked integer arithmetic. `/` and `mod` truncate toward zero.
pub(crate) fn apply(op: BuiltinOp, args: &[i64], pos: Pos) -> Result<i64, GroundError> {
    let overflow = || GroundError::Arithmetic { pos, message: format!("integer overflow in `{}`", op.symbol()) };
    match (op, args) {
        (BuiltinOp::Neg, [a]) => a.checked_neg().ok_or_else(overflow),
        (BuiltinOp::Abs, [a]) => a.checked_abs().ok_or_else(overflow),
        (BuiltinOp::Add, [a, b]) => a.checked_add(*b).ok_or_else(overflow),
        (BuiltinOp::Sub, [a, b]) => a.checked_sub(*b).ok_or_else(overflow),
        (BuiltinOp::Mul, [a, b]) => a.checked_mul(*b).ok_or_else(overflow),
        (BuiltinOp::Div | BuiltinOp::Mod, [_, 0]) => {
            Err(GroundError::Arithmetic { pos, message: "division by zero".into() })
        }
        (BuiltinOp::Div, [a, b]) => a.checked_div(*b).ok_or_else(overflow),
        (BuiltinOp::Mod, [a, b]) => a.checked_rem(*b).ok_or_else(overflow),
        _ => Err(GroundError::Arithmetic { pos, message: format!("wrong number of arguments to `{}`", op.symbol()) }),
    }
}
