//! The `ground`, `solve`, `run` and `verify` subcommands.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::diag::Diagnostic;
use crate::format::{emit_ground_format, parse_ground_format};
use crate::ground::DomainMode;
use crate::oracle::{complete_hidden, is_stable, Model};
use crate::pipeline::{compile, model_line, visible_atoms, GroundOptions, PipelineError};
use crate::solver::{well_founded, Solver, SolverOptions};
use crate::translate::PrimitiveProgram;

#[derive(Parser, Debug)]
#[command(name = "aspkit", version, about = "Ground and solve domain-restricted logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground programs and write the numeric format to stdout
    Ground(GroundArgs),
    /// Read the numeric format from stdin and print stable models
    Solve(SolveArgs),
    /// Ground and solve in one process
    Run(RunArgs),
    /// Check a model against a ground program with the reference oracle
    Verify {
        ground_file: PathBuf,
        /// Atom names separated by whitespace, or `solve` output (first model is used)
        model_file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct FrontArgs {
    /// Bind a constant, e.g. `-c n=8`
    #[arg(short = 'c', value_name = "NAME=VALUE", value_parser = parse_binding)]
    consts: Vec<(String, i64)>,
    /// `none` removes evaluated domain predicates from the output
    #[arg(short = 'd', value_name = "MODE", value_parser = ["none", "all"])]
    domain: Option<String>,
    /// Report lint warnings
    #[arg(short = 'W')]
    warnings: bool,
}

#[derive(Args, Debug)]
struct GroundArgs {
    #[command(flatten)]
    front: FrontArgs,
    /// Print the ground program in source syntax instead
    #[arg(long)]
    text: bool,
    /// Program files, read in order as one program (stdin when absent)
    files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Print the well-founded model instead of stable models
    #[arg(long)]
    wfs: bool,
    /// Check counters and every model against the oracle while searching
    #[arg(long)]
    verify: bool,
    /// Print search statistics to stderr
    #[arg(long)]
    stats: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Number of models to print, 0 for all (default: the count in the input)
    count: Option<u64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    front: FrontArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Program files, optionally followed by a model count
    #[arg(value_name = "FILE")]
    args: Vec<String>,
}

fn parse_binding(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = value.trim().parse().map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.trim().to_string(), value))
}

const EXIT_USAGE: i32 = 1;
const EXIT_PARSE: i32 = 2;
const EXIT_SEMANTIC: i32 = 3;
const EXIT_GROUND: i32 = 4;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let code = match cli.command {
        Command::Ground(a) => ground_cmd(a, stdin, out, err),
        Command::Solve(a) => solve_cmd(a, stdin, out, err),
        Command::Run(a) => run_cmd(a, stdin, out, err),
        Command::Verify { ground_file, model_file } => verify_cmd(&ground_file, &model_file, out, err),
    };
    let _ = out.flush();
    code
}

struct Sources {
    names: Vec<String>,
    texts: Vec<String>,
}

fn read_sources(files: &[PathBuf], stdin: &mut dyn Read, err: &mut dyn Write) -> Result<Sources, i32> {
    if files.is_empty() {
        let mut text = String::new();
        if let Err(e) = stdin.read_to_string(&mut text) {
            let _ = writeln!(err, "error: cannot read standard input: {e}");
            return Err(EXIT_USAGE);
        }
        return Ok(Sources { names: vec!["<stdin>".into()], texts: vec![text] });
    }
    let mut s = Sources { names: Vec::new(), texts: Vec::new() };
    for f in files {
        match std::fs::read_to_string(f) {
            Ok(t) => {
                s.names.push(f.display().to_string());
                s.texts.push(t);
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", f.display());
                return Err(EXIT_USAGE);
            }
        }
    }
    Ok(s)
}

fn report(err: &mut dyn Write, names: &[String], diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}", d.render(names));
    }
}

fn options(front: &FrontArgs) -> GroundOptions {
    GroundOptions {
        constants: front.consts.iter().cloned().collect::<BTreeMap<_, _>>(),
        domain_mode: match front.domain.as_deref() {
            Some("none") => DomainMode::RemoveDomain,
            _ => DomainMode::KeepDomain,
        },
        lint: front.warnings,
    }
}

/// Grounds and translates; on failure prints diagnostics and returns the exit code.
fn front_end(
    front: &FrontArgs,
    files: &[PathBuf],
    stdin: &mut dyn Read,
    err: &mut dyn Write,
) -> Result<crate::pipeline::Compiled, i32> {
    let src = read_sources(files, stdin, err)?;
    match compile(&src.texts, &options(front)) {
        Ok(c) => {
            report(err, &src.names, &c.warnings);
            Ok(c)
        }
        Err(PipelineError::Syntax(e)) => {
            let _ = writeln!(err, "{}", crate::diag::render(&src.names, e.pos(), "error", &e.to_string()));
            Err(EXIT_PARSE)
        }
        Err(PipelineError::Semantic(diags)) => {
            report(err, &src.names, &diags);
            Err(EXIT_SEMANTIC)
        }
        Err(PipelineError::Ground(e)) => {
            let _ = writeln!(err, "{}", crate::diag::render(&src.names, e.pos(), "error", &e.to_string()));
            Err(EXIT_GROUND)
        }
    }
}

fn ground_cmd(a: GroundArgs, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let c = match front_end(&a.front, &a.files, stdin, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let text = if a.text { c.ground.text() } else { emit_ground_format(&c.primitive) };
    let _ = out.write_all(text.as_bytes());
    0
}

/// Prints models (or the well-founded model) of `program`; returns the exit code.
fn search(program: &PrimitiveProgram, count: Option<u64>, a: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if a.wfs {
        let wf = match well_founded(program) {
            Ok(wf) => wf,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_PARSE;
            }
        };
        let line = |label: &str, set: &Model| format!("{label}: {}", visible_atoms(&program.symbols, set).join(" "));
        let _ = writeln!(out, "{}", line("Well-founded true", &wf.true_atoms));
        let _ = writeln!(out, "{}", line("Well-founded false", &wf.false_atoms));
        let _ = writeln!(out, "{}", line("Well-founded unknown", &wf.unknown));
        if wf.inconsistent {
            let _ = writeln!(out, "Inconsistent");
            return 1;
        }
        return 0;
    }
    let count = count.unwrap_or(program.compute.models);
    let opts = SolverOptions { verify: a.verify, ..Default::default() };
    let mut solver = Solver::new(program, opts);
    let mut found = 0u64;
    while count == 0 || found < count {
        let Some(m) = solver.next_model() else { break };
        found += 1;
        let _ = writeln!(out, "Answer: {found}\n{}", model_line(&program.symbols, &m));
    }
    let _ = writeln!(out, "{}", if found > 0 { "True" } else { "False" });
    if a.stats {
        let s = solver.stats();
        let _ = writeln!(
            err,
            "models: {}  decisions: {}  conflicts: {}  propagations: {}",
            s.models, s.decisions, s.conflicts, s.propagations
        );
    }
    if found > 0 {
        0
    } else {
        1
    }
}

fn solve_cmd(a: SolveArgs, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut text = String::new();
    if let Err(e) = stdin.read_to_string(&mut text) {
        let _ = writeln!(err, "error: cannot read standard input: {e}");
        return EXIT_USAGE;
    }
    match parse_ground_format(&text) {
        Ok(p) => search(&p, a.count, &a.search, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_PARSE
        }
    }
}

fn run_cmd(a: RunArgs, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut args = a.args;
    let mut count = None;
    if let Some(n) = args.last().and_then(|s| s.parse::<u64>().ok()) {
        args.pop();
        count = Some(n);
    }
    let files: Vec<PathBuf> = args.into_iter().map(PathBuf::from).collect();
    match front_end(&a.front, &files, stdin, err) {
        Ok(c) => search(&c.primitive, count, &a.search, out, err),
        Err(code) => code,
    }
}

/// Atom names from a model file: the first `Stable Model:` line if there is
/// one, otherwise every whitespace-separated token.
fn model_names(text: &str) -> Vec<&str> {
    match text.lines().find_map(|l| l.strip_prefix("Stable Model:")) {
        Some(rest) => rest.split_whitespace().collect(),
        None => text.split_whitespace().collect(),
    }
}

fn verify_cmd(ground_file: &PathBuf, model_file: &PathBuf, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let read = |p: &PathBuf, err: &mut dyn Write| {
        std::fs::read_to_string(p).map_err(|e| {
            let _ = writeln!(err, "error: cannot read {}: {e}", p.display());
        })
    };
    let (Ok(ground), Ok(model)) = (read(ground_file, err), read(model_file, err)) else {
        return EXIT_USAGE;
    };
    let program = match parse_ground_format(&ground) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", ground_file.display());
            return EXIT_PARSE;
        }
    };
    let mut visible = Model::new();
    for name in model_names(&model) {
        match program.symbols.get(name) {
            Some(id) => {
                visible.insert(id);
            }
            None => {
                let _ = writeln!(err, "error: `{name}` is not an atom of the program");
                return EXIT_PARSE;
            }
        }
    }
    if is_stable(&program, &complete_hidden(&program, &visible)) {
        let _ = writeln!(out, "Stable");
        0
    } else {
        let _ = writeln!(out, "Not stable");
        1
    }
}
