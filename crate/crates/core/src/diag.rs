use std::fmt;

use crate::syntax::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn error(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, pos, message: message.into() }
    }

    pub fn warning(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, pos, message: message.into() }
    }

    /// `file:line:col: severity: message`, with `files` indexed by `pos.file`.
    pub fn render(&self, files: &[String]) -> String {
        render(files, self.pos, &self.severity.to_string(), &self.message)
    }
}

pub(crate) fn render(files: &[String], pos: Pos, severity: &str, message: &str) -> String {
    let file = files.get(pos.file).map(String::as_str).unwrap_or("<input>");
    format!("{file}:{}:{}: {severity}: {message}", pos.line, pos.col)
}
