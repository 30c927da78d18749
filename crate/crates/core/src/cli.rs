//! Command-line front end: diagram files, subcommands and exit codes.
//!
//! Diagram files are line oriented; `#` starts a comment.
//!
//! ```text
//! node W          # optional declaration
//! Z -> X
//! Z <-> Y
//! select Z
//! X: X
//! Y: Y
//! Z: Z
//! ```
//!
//! Exit codes: 0 transportable, 1 usage or parse error, 2 not transportable,
//! 3 validation found an error above tolerance.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{Format, ProbExpr};
use crate::graph::{is_valid_name, NodeSet, Query, SelectionDiagram, SemiMarkovianGraph};
use crate::identify::{sid_z, IdentResult, Identification};
use crate::oracle::{generate_pair, single_term_mutations, validate_formula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_TRANSPORTABLE: i32 = 2;
pub const EXIT_VALIDATION_FAILED: i32 = 3;

/// Errors above this fail `validate`.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Latex,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub format: OutputFormat,
    pub seed: u64,
    pub validations: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { format: OutputFormat::Text, seed: 0, validations: 20 }
    }
}

/// A parsed diagram file.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFile {
    pub diagram: SelectionDiagram,
    pub query: Query,
    pub options: RunOptions,
}

fn split_names(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect()
}

pub fn parse_diagram(text: &str) -> Result<QueryFile, ParseError> {
    let mut nodes: Vec<String> = Vec::new();
    let mut directed: Vec<(String, String)> = Vec::new();
    let mut bidirected: Vec<(String, String)> = Vec::new();
    let mut select: Vec<(usize, String)> = Vec::new();
    let mut sets: HashMap<&'static str, (usize, Vec<String>)> = HashMap::new();
    let mut children: HashMap<String, Vec<String>> = HashMap::new();

    let declare = |nodes: &mut Vec<String>, name: &str, line: usize| -> Result<(), ParseError> {
        if !is_valid_name(name) {
            return err(line, format!("invalid node name `{name}`"));
        }
        if !nodes.iter().any(|n| n == name) {
            nodes.push(name.to_string());
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((head, rest)) = content.split_once(':') {
            let key = match head.trim() {
                "X" => "X",
                "Y" => "Y",
                "Z" => "Z",
                other => return err(line, format!("unknown set `{other}`; expected X, Y or Z")),
            };
            if sets.contains_key(key) {
                return err(line, format!("set {key} given twice"));
            }
            let names: Vec<String> = split_names(rest).into_iter().map(str::to_string).collect();
            if let Some(bad) = names.iter().find(|n| !is_valid_name(n)) {
                return err(line, format!("invalid node name `{bad}`"));
            }
            sets.insert(key, (line, names));
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            ["node", names @ ..] if !names.is_empty() => {
                for n in names {
                    declare(&mut nodes, n, line)?;
                }
            }
            ["select", names @ ..] if !names.is_empty() => {
                for n in names {
                    select.push((line, n.to_string()));
                }
            }
            [a, "->", b] => {
                declare(&mut nodes, a, line)?;
                declare(&mut nodes, b, line)?;
                if a == b {
                    return err(line, format!("self-loop on `{a}`"));
                }
                let edge = (a.to_string(), b.to_string());
                if directed.contains(&edge) {
                    return err(line, format!("duplicate edge {a} -> {b}"));
                }
                if reaches(&children, b, a) {
                    return err(line, format!("edge {a} -> {b} closes a directed cycle"));
                }
                children.entry(a.to_string()).or_default().push(b.to_string());
                directed.push(edge);
            }
            [a, "<->", b] => {
                declare(&mut nodes, a, line)?;
                declare(&mut nodes, b, line)?;
                if a == b {
                    return err(line, format!("self-loop on `{a}`"));
                }
                let edge = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
                if bidirected.contains(&edge) {
                    return err(line, format!("duplicate edge {a} <-> {b}"));
                }
                bidirected.push(edge);
            }
            _ => return err(line, format!("unrecognized line `{content}`")),
        }
    }

    let last_line = text.lines().count().max(1);
    let lookup = |key: &str| -> Result<(usize, NodeSet), ParseError> {
        let (line, names) = sets.get(key).cloned().unwrap_or((last_line, Vec::new()));
        for n in &names {
            if !nodes.contains(n) {
                return err(line, format!("`{n}` is not a node of the diagram"));
            }
        }
        Ok((line, names.into_iter().collect()))
    };
    let (x_line, x) = lookup("X")?;
    let (y_line, y) = lookup("Y")?;
    let (_, z) = lookup("Z")?;
    if y.is_empty() {
        return err(y_line, "outcome set Y is empty");
    }
    if let Some(n) = x.intersection(&y).next() {
        return err(x_line.max(y_line), format!("`{n}` is in both X and Y; treatment and outcome must be disjoint"));
    }
    let mut s_targets = NodeSet::new();
    for (line, n) in select {
        if !nodes.contains(&n) {
            return err(line, format!("`{n}` is not a node of the diagram"));
        }
        s_targets.insert(n);
    }

    let graph = SemiMarkovianGraph::new(nodes, directed, bidirected)
        .map_err(|e| ParseError { line: 0, message: e.to_string() })?;
    let query = Query::new(x, y, z, &graph).map_err(|e| ParseError { line: 0, message: e.to_string() })?;
    let diagram =
        SelectionDiagram::new(graph, s_targets).map_err(|e| ParseError { line: 0, message: e.to_string() })?;
    Ok(QueryFile { diagram, query, options: RunOptions::default() })
}

fn reaches(children: &HashMap<String, Vec<String>>, from: &str, to: &str) -> bool {
    let mut stack = vec![from.to_string()];
    let mut seen = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if seen.insert(n.clone()) {
            stack.extend(children.get(&n).into_iter().flatten().cloned());
        }
    }
    false
}

/// Canonical text of a query file; parsing it yields the same file.
pub fn render_query_file(qf: &QueryFile) -> String {
    let g = qf.diagram.graph();
    let mut out = String::new();
    for n in g.nodes() {
        let _ = writeln!(out, "node {n}");
    }
    for (a, b) in g.directed_edges() {
        let _ = writeln!(out, "{a} -> {b}");
    }
    for (a, b) in g.bidirected_edges() {
        let _ = writeln!(out, "{a} <-> {b}");
    }
    for s in qf.diagram.s_targets() {
        let _ = writeln!(out, "select {s}");
    }
    let join = |s: &NodeSet| s.iter().cloned().collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "X: {}", join(&qf.query.x));
    let _ = writeln!(out, "Y: {}", join(&qf.query.y));
    let _ = writeln!(out, "Z: {}", join(&qf.query.z));
    out
}

/// Runs the z-transportability check for the file's query.
pub fn identify(qf: &QueryFile) -> Result<Identification, String> {
    sid_z(&qf.query.y, &qf.query.x, &qf.diagram, &qf.query.z).map_err(|e| e.to_string())
}

fn node_list(g: &SemiMarkovianGraph) -> Vec<String> {
    g.nodes().to_vec()
}

/// The output document of `run` and its exit code.
pub fn run(qf: &QueryFile) -> Result<(i32, Value), String> {
    let id = identify(qf)?;
    let doc = match &id.result {
        IdentResult::Formula(e) => {
            let e = e.normalize().map_err(|e| e.to_string())?;
            json!({
                "status": "transportable",
                "formula": e,
                "formula_text": e.render(Format::Text),
                "formula_latex": e.render(Format::Latex),
                "witness": Value::Null,
                "warnings": id.warnings,
            })
        }
        IdentResult::Failure(w) => json!({
            "status": "not_transportable",
            "formula": Value::Null,
            "formula_text": Value::Null,
            "formula_latex": Value::Null,
            "witness": {
                "kind": w.kind.as_str(),
                "f_nodes": node_list(&w.f_graph),
                "f_sub_nodes": node_list(&w.f_sub),
                "s_targets": w.s_targets_in_component,
            },
            "warnings": id.warnings,
        }),
    };
    let code = if id.result.is_formula() { EXIT_OK } else { EXIT_NOT_TRANSPORTABLE };
    Ok((code, doc))
}

fn render_run(doc: &Value, format: OutputFormat) -> String {
    if format == OutputFormat::Json {
        return serde_json::to_string_pretty(doc).unwrap_or_default();
    }
    let key = if format == OutputFormat::Latex { "formula_latex" } else { "formula_text" };
    match doc[key].as_str() {
        Some(f) => f.to_string(),
        None => {
            let w = &doc["witness"];
            let list = |v: &Value| {
                v.as_array()
                    .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default()
            };
            format!(
                "not transportable: {} F = {{{}}}, F' = {{{}}}",
                w["kind"].as_str().unwrap_or("?"),
                list(&w["f_nodes"]),
                list(&w["f_sub_nodes"])
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub formula: ProbExpr,
    pub errors: Vec<(u64, f64)>,
}

impl ValidationReport {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().map(|&(_, e)| e).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.errors.iter().all(|&(_, e)| e <= TOLERANCE)
    }
}

/// Validates the emitted formula on one model pair per seed. `corrupt`
/// swaps in a single-term mutation of the formula first.
pub fn validate(
    qf: &QueryFile,
    seeds: RangeInclusive<u64>,
    arity: usize,
    corrupt: bool,
) -> Result<Option<ValidationReport>, String> {
    let id = identify(qf)?;
    let Some(formula) = id.result.formula() else { return Ok(None) };
    let mut formula = formula.normalize().map_err(|e| e.to_string())?;
    if corrupt {
        formula = single_term_mutations(&formula)
            .into_iter()
            .next()
            .ok_or_else(|| "formula has no single-term mutation".to_string())?;
    }
    let mut errors = Vec::new();
    for seed in seeds {
        let pair = generate_pair(&qf.diagram, seed, arity).map_err(|e| e.to_string())?;
        let e = validate_formula(&formula, &pair, &qf.query).map_err(|e| e.to_string())?;
        errors.push((seed, e));
    }
    Ok(Some(ValidationReport { formula, errors }))
}

/// Lines describing the c-components of the diagram and of the graph with
/// the treatment removed.
pub fn components(qf: &QueryFile) -> String {
    let g = qf.diagram.graph();
    let fmt = |s: &NodeSet| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", "));
    let mut out = String::from("C(G):\n");
    for c in g.c_components() {
        let _ = writeln!(out, "  {}", fmt(&c.members));
    }
    let _ = writeln!(out, "C(G \\ X) with X = {}:", fmt(&qf.query.x));
    for c in g.without(&qf.query.x).c_components() {
        let hit: NodeSet = c.members.intersection(qf.diagram.s_targets()).cloned().collect();
        let label = if hit.is_empty() { "direct".to_string() } else { format!("selected {}", fmt(&hit)) };
        let _ = writeln!(out, "  {}  {label}", fmt(&c.members));
    }
    out
}

pub fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) =
        s.split_once("..=").or_else(|| s.split_once("..")).ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad seed `{b}`"))?;
    if a > b {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok(a..=b)
}

#[derive(Debug, Parser)]
#[command(
    name = "ztransport",
    version,
    about = "Transport causal effects across domains from experiments on controllable variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide z-transportability and print the transport formula or witness.
    Run {
        file: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Check the emitted formula against exact ground truth on random models.
    Validate {
        file: std::path::PathBuf,
        /// Inclusive seed range `A..B`; defaults to 20 seeds from ZTRANSPORT_SEED.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, env = "ZTRANSPORT_SEED", default_value_t = 0, hide_env_values = true)]
        seed: u64,
        /// Test hook: corrupt one term of the formula before validating.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Print the c-component decomposition.
    Components { file: std::path::PathBuf },
}

fn load(path: &std::path::Path) -> Result<QueryFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_diagram(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the command line `args`, writing to `out` and `err`, and returns the
/// exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, errs: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(errs, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, out, errs) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(errs, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn std::io::Write, errs: &mut dyn std::io::Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Run { file, format } => {
            let qf = load(&file)?;
            let (code, doc) = run(&qf)?;
            if format != OutputFormat::Json {
                for w in doc["warnings"].as_array().into_iter().flatten() {
                    writeln!(errs, "warning: {}", w.as_str().unwrap_or_default()).map_err(io)?;
                }
            }
            writeln!(out, "{}", render_run(&doc, format)).map_err(io)?;
            Ok(code)
        }
        Command::Validate { file, seeds, arity, seed, corrupt } => {
            let qf = load(&file)?;
            let range = match seeds {
                Some(s) => parse_seeds(&s)?,
                None => seed..=seed + qf.options.validations as u64 - 1,
            };
            match validate(&qf, range, arity, corrupt)? {
                None => {
                    writeln!(out, "not transportable; nothing to validate").map_err(io)?;
                    Ok(EXIT_NOT_TRANSPORTABLE)
                }
                Some(report) => {
                    writeln!(out, "formula: {}", report.formula.render(Format::Text)).map_err(io)?;
                    writeln!(out, "{:>8}  {:>12}", "seed", "max_abs_err").map_err(io)?;
                    for (s, e) in &report.errors {
                        writeln!(out, "{s:>8}  {e:>12.3e}").map_err(io)?;
                    }
                    let verdict = if report.passed() { "pass" } else { "FAIL" };
                    writeln!(out, "{verdict}: max error {:.3e} (tolerance {TOLERANCE:e})", report.max_error())
                        .map_err(io)?;
                    Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION_FAILED })
                }
            }
        }
        Command::Components { file } => {
            let qf = load(&file)?;
            write!(out, "{}", components(&qf)).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}
