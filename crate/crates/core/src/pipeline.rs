//! Source text to primitive program in one call, plus model printing.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis::{analyze, check_domain_restriction, lint};
use crate::diag::Diagnostic;
use crate::error::{GroundError, SyntaxError};
use crate::ground::{evaluate_domain_predicates, instantiate_rules, AtomId, DomainMode, GroundProgram, SymbolTable};
use crate::syntax::{parse_sources, substitute_constants};
use crate::translate::{translate, PrimitiveProgram};

#[derive(Debug, Clone, Default)]
pub struct GroundOptions {
    /// `-c name=value` bindings; they override `#const` declarations.
    pub constants: BTreeMap<String, i64>,
    pub domain_mode: DomainMode,
    /// Run the lint pass and report its warnings.
    pub lint: bool,
}

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Syntax(SyntaxError),
    #[error("program is not domain-restricted")]
    Semantic(Vec<Diagnostic>),
    #[error("{0}")]
    Ground(GroundError),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub ground: GroundProgram,
    pub primitive: PrimitiveProgram,
    /// Warnings from linting and grounding, in that order.
    pub warnings: Vec<Diagnostic>,
}

/// Parses `sources` as one program, checks it, grounds it and translates
/// the result into primitive rules.
pub fn compile<S: AsRef<str>>(sources: &[S], opts: &GroundOptions) -> Result<Compiled, PipelineError> {
    let program = parse_sources(sources).map_err(PipelineError::Syntax)?;
    let program = substitute_constants(program, &opts.constants);
    let (graph, info) = analyze(&program);
    let errors = check_domain_restriction(&program, &info);
    if !errors.is_empty() {
        return Err(PipelineError::Semantic(errors));
    }
    let mut warnings = if opts.lint { lint(&program, &info) } else { Vec::new() };
    let ext = evaluate_domain_predicates(&program, &graph, &info).map_err(PipelineError::Ground)?;
    let grounding = instantiate_rules(&program, ext, opts.domain_mode).map_err(PipelineError::Ground)?;
    warnings.extend(grounding.warnings);
    let primitive = translate(&grounding.program);
    Ok(Compiled { ground: grounding.program, primitive, warnings })
}

/// Names of the visible atoms of `model`, by ascending atom number.
pub fn visible_atoms<'a>(symbols: &'a SymbolTable, model: &BTreeSet<AtomId>) -> Vec<&'a str> {
    model.iter().filter_map(|a| symbols.name(*a)).collect()
}

/// The `Stable Model:` line for `model`, without a trailing newline.
pub fn model_line(symbols: &SymbolTable, model: &BTreeSet<AtomId>) -> String {
    format!("Stable Model: {}", visible_atoms(symbols, model).join(" "))
}
