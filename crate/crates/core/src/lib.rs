pub mod analysis;
pub mod cli;
pub mod diag;
pub mod error;
pub mod format;
pub mod ground;
pub mod oracle;
pub mod pipeline;
pub mod solver;
pub mod syntax;
pub mod translate;
