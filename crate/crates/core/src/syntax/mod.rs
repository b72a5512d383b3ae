//! Front end: lexing, parsing, printing and constant substitution.

mod ast;
mod lexer;
mod parser;
mod print;

use std::collections::BTreeMap;

pub use ast::*;
pub use lexer::{tokenize, Tok, Token};
pub use parser::parse_program;

use crate::error::SyntaxError;

/// Tokenizes and parses a single source text (file index 0).
pub fn parse_str(text: &str) -> Result<Program, SyntaxError> {
    parse_program(&tokenize(text, 0)?)
}

/// Parses several sources as if they were concatenated in order. Token streams
/// are joined rather than text, so positions keep pointing into the right file.
pub fn parse_sources<S: AsRef<str>>(sources: &[S]) -> Result<Program, SyntaxError> {
    let mut tokens = Vec::new();
    for (file, src) in sources.iter().enumerate() {
        let mut toks = tokenize(src.as_ref(), file)?;
        if file + 1 < sources.len() {
            toks.pop();
        }
        tokens.extend(toks);
    }
    if tokens.is_empty() {
        tokens = tokenize("", 0)?;
    }
    parse_program(&tokens)
}

/// Replaces bound symbolic constants by integers. In-file `#const`
/// declarations apply first; `bindings` (command line) take precedence.
pub fn substitute_constants(mut program: Program, bindings: &BTreeMap<String, i64>) -> Program {
    let mut values = program.consts.clone();
    values.extend(bindings.iter().map(|(k, v)| (k.clone(), *v)));
    if values.is_empty() {
        return program;
    }
    program.visit_terms_mut(&mut |t| t.map_symbols(&mut |n| values.get(n).map(|v| Term::Integer(*v))));
    program
}
