//! Subcommands. Every command reads the workspace file, and the mutating
//! ones write it back only after the new model validates.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use knowbase::knowhow::{KnowHowBinding, KnowHowTable, TableError};
use knowbase::par::ExecMode;
use knowbase::semantics::{compare_solution_sets, oracle_solutions, OracleConfig, SemanticsError};
use knowbase::solver::{solve, ExplainFormat, SolveConfig, SolveError, TaskError, TaskSpec};
use knowbase::validation::{has_errors, Code, Diagnostic, render_report, sort_diagnostics, validate_consistency, validate_model};
use knowbase::value::name;
use knowbase::workspace::{assemble_located, extend_draft, LoadError, Workspace, WorkspaceError};

use crate::api;

#[derive(Debug, Parser)]
#[command(name = "knowbase", version, about = "Know-how knowledge base: model, solve, explain, validate")]
pub struct Cli {
    /// Workspace file (model text plus know-how tables).
    #[arg(long, short, global = true, env = "KNOWBASE_MODEL", default_value = "knowbase.model")]
    pub model: PathBuf,
    /// Largest nominal candidate space the oracle may enumerate, or `unlimited`.
    #[arg(long, global = true, default_value = "1000000", value_parser = parse_budget)]
    pub budget: u128,
    /// Run enumeration on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_budget(s: &str) -> Result<u128, String> {
    if s == "unlimited" {
        return Ok(u128::MAX);
    }
    s.replace('_', "").parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List or add scales.
    Scales {
        #[command(subcommand)]
        action: ScalesAction,
    },
    /// List or declare symbols and variables.
    Ontology {
        #[command(subcommand)]
        action: OntologyAction,
    },
    /// Compile a know-how table into the model.
    Knowhow {
        #[command(subcommand)]
        action: KnowhowAction,
    },
    /// Inspect stored facts.
    Facts {
        #[command(subcommand)]
        action: FactsAction,
    },
    /// Report diagnostics; exits nonzero on errors.
    Validate {
        /// Stored task to check for satisfiability.
        #[arg(long)]
        probe: Option<String>,
    },
    /// Solve a stored task.
    Solve(SolveArgs),
    /// Explain a solution of a stored task by its id.
    Explain {
        id: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Serve the JSON API on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Print the workspace file.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a workspace file and make it the current one.
    Import { file: PathBuf },
    /// Write the end-milling demo pack as a workspace file.
    Demo {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScalesAction {
    List,
    /// Add a scale, e.g. `Rpm = int 0 .. 20000 step 100 unit "1/min"`.
    Add { declaration: String },
}

#[derive(Debug, Subcommand)]
pub enum OntologyAction {
    List,
    /// Declare a symbol in a layer (`--layer 1 "const spindle : Rpm"`) or a
    /// variable (`--var "g : 2 : func(Material) -> AngleDeg"`).
    Declare {
        #[arg(long, conflicts_with = "var", required_unless_present = "var")]
        layer: Option<u8>,
        #[arg(long)]
        var: bool,
        declaration: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum KnowhowAction {
    /// Add a table file. `--class` and `--bind col=constant` override the
    /// file's own `class:` and `bind:` headers.
    Add {
        file: PathBuf,
        #[arg(long)]
        class: Option<String>,
        #[arg(long = "bind", value_parser = parse_binding)]
        bind: Vec<(String, String)>,
    },
    /// List the tables in the workspace.
    List,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    let (c, t) = s.split_once('=').ok_or("expected column=constant")?;
    Ok((c.trim().to_string(), t.trim().to_string()))
}

#[derive(Debug, Subcommand)]
pub enum FactsAction {
    List {
        /// Only facts of this level.
        #[arg(long)]
        level: Option<u8>,
        /// Only facts of this symbol.
        #[arg(long)]
        symbol: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub task: String,
    /// `none`, `maximize <term>`, `minimize <term>` or `predicate <formula>`.
    #[arg(long)]
    pub criterion: Option<String>,
    /// Override an input, `symbol=value`.
    #[arg(long = "input", value_parser = parse_binding)]
    pub inputs: Vec<(String, String)>,
    /// Also enumerate with the oracle and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Workspace(#[from] WorkspaceError),
    #[error("{0}")]
    Table(#[from] TableError),
    #[error("{0}")]
    Task(#[from] TaskError),
    #[error("{0}")]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Oracle(#[from] SemanticsError),
    #[error("oracle disagrees with the solver:\n{0}")]
    OracleMismatch(String),
    #[error("validation failed:\n{0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
    #[error("no stored task has a solution with id `{0}`")]
    UnknownSolution(String),
}

impl CliError {
    /// 1 validation errors, 2 usage, 3 unknown name, 4 no solution,
    /// 5 oracle disagreement, 6 file or parse problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Workspace(WorkspaceError::Load(_)) => 6,
            CliError::Invalid(_) | CliError::Workspace(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Task(TaskError::UnknownTask(_) | TaskError::UnknownSymbol(_)) | CliError::UnknownSolution(_) => 3,
            CliError::Task(_) => 2,
            CliError::Solve(SolveError::Task(TaskError::UnknownTask(_))) => 3,
            CliError::Solve(_) => 4,
            CliError::OracleMismatch(_) | CliError::Oracle(_) => 5,
            CliError::Io { .. } | CliError::Load(_) | CliError::Table(_) => 6,
        }
    }
    /// The error in the line format validation reports use.
    pub fn report(&self) -> String {
        let one = |code, at: &str| vec![Diagnostic::new(code, at, self.to_string(), None)];
        let d = match self {
            CliError::Invalid(report) => return report.clone(),
            CliError::Task(e) | CliError::Solve(SolveError::Task(e)) => vec![api::task_diagnostic(e)],
            CliError::Solve(SolveError::Conflict { .. }) => one(Code::Inconsistent, "solve"),
            CliError::Solve(SolveError::Criterion(_)) => one(Code::Type, "criterion"),
            CliError::Solve(_) => one(Code::NoSolution, "solve"),
            CliError::Workspace(e) => api::knowhow_diagnostics("workspace", e),
            CliError::UnknownSolution(id) => one(Code::Undeclared, &format!("solution {id}")),
            CliError::Load(_) => one(Code::Type, "model"),
            CliError::Table(_) => one(Code::Type, "table"),
            CliError::Io { path, .. } => one(Code::Type, path),
            CliError::Oracle(_) | CliError::OracleMismatch(_) => one(Code::Inconsistent, "oracle"),
            CliError::Usage(_) => one(Code::Type, "arguments"),
        };
        render_report(&d)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|error| CliError::Io { path: path.display().to_string(), error })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|error| CliError::Io { path: path.display().to_string(), error })
}

fn open(cli: &Cli) -> Result<Workspace, CliError> {
    Ok(Workspace::import(&read(&cli.model)?)?)
}

fn oracle_config(cli: &Cli) -> OracleConfig {
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::default() };
    OracleConfig { budget: cli.budget, mode, ..OracleConfig::default() }
}

/// Replace the model with `draft` and save, or report why not.
fn commit(cli: &Cli, mut ws: Workspace, draft: knowbase::model::ModelDraft) -> Result<String, CliError> {
    let model = assemble_located(draft)?;
    ws.replace_model(model)?;
    write(&cli.model, &ws.export())?;
    Ok(format!("saved {}\n", cli.model.display()))
}

/// Run one command; the returned text goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Scales { action: ScalesAction::List } => {
            let ws = open(cli)?;
            Ok(ws.model().scales().iter().map(|s| format!("{} = {}\n", s.name(), s.describe())).collect())
        }
        Command::Scales { action: ScalesAction::Add { declaration } } => {
            let ws = open(cli)?;
            let draft = extend_draft(ws.model().draft(), &format!("scales {{ {}; }}", declaration.trim_end_matches(';')))?;
            commit(cli, ws, draft)
        }
        Command::Ontology { action: OntologyAction::List } => {
            let ws = open(cli)?;
            let m = ws.model();
            let mut out = String::new();
            for v in m.variables().values() {
                out.push_str(&format!("var {}\n", v.describe()));
            }
            for d in m.signature().symbols() {
                out.push_str(&format!("layer {} {}\n", d.layer, d.describe()));
            }
            Ok(out)
        }
        Command::Ontology { action: OntologyAction::Declare { layer, var, declaration } } => {
            let ws = open(cli)?;
            let decl = declaration.trim_end_matches(';');
            let fragment = match (layer, var) {
                (Some(l), false) => format!("layer {l} {{ {decl}; }}"),
                (None, true) => format!("vars {{ {decl}; }}"),
                _ => return Err(CliError::Usage("give exactly one of --layer or --var".into())),
            };
            let draft = extend_draft(ws.model().draft(), &fragment)?;
            commit(cli, ws, draft)
        }
        Command::Knowhow { action: KnowhowAction::Add { file, class, bind } } => {
            let mut ws = open(cli)?;
            let mut table = KnowHowTable::parse(&read(file)?)?;
            if let Some(c) = class {
                table.class = Some(name(c));
            }
            table.bind.extend(bind.iter().map(|(c, t)| (name(c), name(t))));
            let class = table.class.clone().ok_or_else(|| CliError::Usage("the table names no class; pass --class".into()))?;
            let binding = KnowHowBinding::declared(&table);
            let id = table.id.to_string();
            let delta = ws
                .add_knowhow(table, &binding, &class)
                .map_err(|e| CliError::Invalid(render_report(&api::knowhow_diagnostics(&id, &e))))?;
            write(&cli.model, &ws.export())?;
            let s = delta.summary();
            let mut out = format!("added {} symbol(s), {} fact(s)\n", s.symbols.len(), s.facts);
            for f in &s.formulas {
                out.push_str(&format!("formula {f}\n"));
            }
            Ok(out)
        }
        Command::Knowhow { action: KnowhowAction::List } => {
            let ws = open(cli)?;
            Ok(ws.tables().values().map(|t| format!("{}\t{} row(s)\t{}\n", t.id, t.rows.len(), t.title)).collect())
        }
        Command::Facts { action: FactsAction::List { level, symbol } } => {
            let ws = open(cli)?;
            let m = ws.model();
            let mut facts: Vec<_> = m
                .fact_entries()
                .iter()
                .filter(|f| level.is_none_or(|l| f.level == l))
                .filter(|f| symbol.as_ref().is_none_or(|s| f.symbol.as_ref() == s))
                .collect();
            facts.sort_by(|a, b| (a.level, &a.symbol, &a.args).cmp(&(b.level, &b.symbol, &b.args)));
            Ok(facts
                .into_iter()
                .map(|f| match &f.origin {
                    Some(o) => format!("{}\t{}\t{}:{}\n", f.level, f.describe(), o.table, o.row),
                    None => format!("{}\t{}\n", f.level, f.describe()),
                })
                .collect())
        }
        Command::Validate { probe } => {
            let ws = open(cli)?;
            let m = ws.model();
            let mut d = validate_model(m.draft());
            if !has_errors(&d) {
                let probe = probe.as_ref().map(|p| TaskSpec::named(&m, p)).transpose()?;
                d.extend(validate_consistency(&m, probe.as_ref(), &oracle_config(cli))?);
            }
            sort_diagnostics(&mut d);
            let report = render_report(&d);
            if has_errors(&d) {
                return Err(CliError::Invalid(report));
            }
            Ok(report)
        }
        Command::Solve(args) => solve_command(cli, args),
        Command::Explain { id, format } => {
            let ws = open(cli)?;
            let m = ws.model();
            for t in m.tasks().keys() {
                let task = TaskSpec::named(&m, t)?;
                let Ok(out) = solve(&m, &task, &SolveConfig::default()) else { continue };
                if let Some(s) = out.solutions.iter().find(|s| &s.id == id) {
                    return Ok(s.explanation.render(explain_format(*format)) + "\n");
                }
            }
            Err(CliError::UnknownSolution(id.clone()))
        }
        Command::Serve { port } => {
            let ws = open(cli)?;
            let state = crate::service::AppState::new(ws, oracle_config(cli));
            let rt = tokio::runtime::Runtime::new().map_err(|error| CliError::Io { path: "runtime".into(), error })?;
            rt.block_on(crate::service::serve(state, *port))
                .map_err(|error| CliError::Io { path: format!("port {port}"), error })?;
            Ok(String::new())
        }
        Command::Export { out } => {
            let text = open(cli)?.export();
            match out {
                Some(p) => {
                    write(p, &text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Import { file } => {
            let ws = Workspace::import(&read(file)?)?;
            write(&cli.model, &ws.export())?;
            Ok(format!("imported {} into {}\n", file.display(), cli.model.display()))
        }
        Command::Demo { out } => {
            let ws = knowbase::demo::build_demo().map_err(|e| CliError::Invalid(e.to_string()))?;
            let path = out.as_ref().unwrap_or(&cli.model);
            write(path, &ws.export())?;
            Ok(format!("wrote the demo pack to {}\n", path.display()))
        }
    }
}

fn explain_format(f: Format) -> ExplainFormat {
    match f {
        Format::Text => ExplainFormat::Text,
        Format::Structured => ExplainFormat::Structured,
    }
}

fn solve_command(cli: &Cli, args: &SolveArgs) -> Result<String, CliError> {
    let ws = open(cli)?;
    let m = ws.model();
    let mut source = m.tasks().get(args.task.as_str()).cloned().ok_or_else(|| TaskError::UnknownTask(args.task.clone()))?;
    if let Some(c) = &args.criterion {
        source.criterion = api::parse_criterion(c).ok_or_else(|| CliError::Usage(format!("bad criterion `{c}`")))?;
    }
    for (k, v) in &args.inputs {
        let value = api::value_from_json(&serde_json::Value::String(v.clone()))
            .ok_or_else(|| CliError::Usage(format!("bad value for {k}")))?;
        match source.inputs.iter_mut().find(|(s, _)| s.as_ref() == k) {
            Some(slot) => slot.1 = value,
            None => source.inputs.push((name(k), value)),
        }
    }
    let task = TaskSpec::from_source(&m, &source)?;
    let result = solve(&m, &task, &SolveConfig::default());
    let mut out = String::new();
    match args.format {
        Format::Structured => {
            let resp = api::solve_response(&m, &task, &result);
            out.push_str(&serde_json::to_string_pretty(&resp).expect("responses serialize"));
            out.push('\n');
        }
        Format::Text => {
            if let Ok(o) = &result {
                out.push_str(&format!("{}\n", task.describe()));
                for (s, sol) in o.solutions.iter().zip(&o.set.solutions) {
                    let values: Vec<String> = sol.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    out.push_str(&format!("{}\t{}\n", s.id, values.join(" ")));
                }
            }
        }
    }
    let outcome = match result {
        Ok(o) => o,
        Err(e) if args.format == Format::Structured && !api::is_request_error(&e) => {
            print_partial(&out);
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    if args.oracle {
        let oracle = oracle_solutions(&m, &task, &oracle_config(cli))?;
        let diff = compare_solution_sets(&outcome.set, &oracle)?;
        if !diff.is_empty() {
            return Err(CliError::OracleMismatch(format!("{diff:?}")));
        }
        out.push_str("oracle: identical\n");
    }
    Ok(out)
}

/// Structured output is still useful when the solve fails.
fn print_partial(out: &str) {
    let _ = std::io::stdout().write_all(out.as_bytes());
}
