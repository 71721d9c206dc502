//! Command-line front end. Reports go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad input (usage, syntax,
//! malformed JSON or state), 3 run got stuck, 4 run hit the step limit,
//! 5 a checked property was violated.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::ast::{parse_program, Stmt, VName, Val};
use crate::automaton::{
    check_location_closure, check_simulation, edges_closed, nodes_closed, regular_ta, stmt_to_ta,
    synt_step_image_closed, Automaton,
};
use crate::export::{rename_nodes, to_dot, trace_to_json, trace_to_text, AutomatonDoc, RenderNode};
use crate::semantics::{run_trace, State, TraceStatus};
use crate::tauclose::{check_tau_sim_witness, tauclose_ta, BaseNode, NodeSet, TauReport};
use crate::zipper::SyntConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_STUCK: i32 = 3;
pub const EXIT_STEP_LIMIT: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

pub const DEFAULT_MAX_STEPS: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(name = "zipta", version, about = "Run, compile and check programs of a tiny imperative language")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a program and print its canonical form.
    Parse {
        file: PathBuf,
        /// Print the syntax tree in constructor notation instead.
        #[arg(long)]
        ast: bool,
    },
    /// Execute a program step by step.
    Run {
        file: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
        trace_format: TraceFormat,
    },
    /// Translate a program into an automaton over its configurations.
    Compile {
        file: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Remove silent transitions from a program's automaton or a JSON automaton.
    Tauclose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a property of a program or automaton.
    Check {
        #[arg(value_enum)]
        property: Property,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        exec: ExecArgs,
    },
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Initial state, e.g. `x=true,y=null`.
    #[arg(long, default_value = "")]
    state: String,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Label DOT nodes by their integer id rather than their location.
    #[arg(long)]
    numbered: bool,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Program source file.
    #[arg(required_unless_present = "automaton", conflicts_with = "automaton")]
    file: Option<PathBuf>,
    /// Automaton in JSON form.
    #[arg(long)]
    automaton: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Sim,
    Closure,
    Regular,
    Tausim,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Input(_) => EXIT_INPUT,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_program(path: &Path) -> CliResult<Stmt> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))
}

fn load_automaton(path: &Path) -> CliResult<AutomatonDoc> {
    let text = read(path)?;
    AutomatonDoc::from_json(&text).map_err(|e| CliError::Input(format!("{}: malformed automaton: {e}", path.display())))
}

/// Parses `k=v[,k=v…]` with values `true`, `false` or `null`.
pub fn parse_state(spec: &str) -> Result<State, String> {
    let mut state = State::new();
    for binding in spec.split(',').map(str::trim).filter(|b| !b.is_empty()) {
        let (name, value) = binding.split_once('=').ok_or_else(|| format!("binding `{binding}` is not of the form k=v"))?;
        let name = VName::new(name.trim()).map_err(|e| e.to_string())?;
        let value: Val = value.trim().parse()?;
        state = state.update(&name, value);
    }
    Ok(state)
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, output: Option<&Path>, text: &str) -> CliResult<()> {
        match output {
            Some(path) => {
                std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
            }
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
        }
    }

    fn say(&mut self, line: &str) {
        let _ = writeln!(self.stdout, "{line}");
    }

    fn warn(&mut self, line: &str) {
        let _ = writeln!(self.stderr, "{line}");
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            io.warn(&format!("error: {e}"));
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CliResult<i32> {
    match command {
        Command::Parse { file, ast } => {
            let c = load_program(&file)?;
            let text = if ast { c.dump() } else { c.to_string() };
            io.say(&text);
            Ok(EXIT_OK)
        }
        Command::Run { file, exec, trace_format } => {
            let c = load_program(&file)?;
            let s0 = parse_state(&exec.state).map_err(CliError::Input)?;
            let trace = run_trace(&c, s0, exec.max_steps as usize);
            match trace_format {
                TraceFormat::Text => {
                    io.emit(None, &trace_to_text(&trace))?;
                    io.say(&format!("status: {} after {} steps", trace.status, trace.len()));
                }
                TraceFormat::Json => {
                    io.say(&trace_to_json(&trace));
                    io.warn(&format!("status: {} after {} steps", trace.status, trace.len()));
                }
            }
            Ok(match trace.status {
                TraceStatus::Terminated => EXIT_OK,
                TraceStatus::Stuck(_) => EXIT_STUCK,
                TraceStatus::StepLimit => EXIT_STEP_LIMIT,
            })
        }
        Command::Compile { file, out } => {
            let aut = stmt_to_ta(&load_program(&file)?);
            let text = match out.format {
                Format::Json => AutomatonDoc::from_program(&aut).to_json() + "\n",
                Format::Dot => dot_of(&aut, out.numbered),
            };
            io.emit(out.output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Tauclose { input, out } => {
            let text = match (&input.file, &input.automaton) {
                (Some(file), _) => {
                    let aut = stmt_to_ta(&load_program(file)?);
                    closed_output(&aut, &out, io)
                }
                (None, Some(path)) => {
                    let aut = load_automaton(path)?.to_automaton();
                    closed_output(&aut, &out, io)
                }
                (None, None) => unreachable!("clap requires an input"),
            };
            io.emit(out.output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Check { property, input, exec } => check(property, &input, &exec, io),
    }
}

fn dot_of<N: Eq + std::hash::Hash + RenderNode>(aut: &Automaton<N>, numbered: bool) -> String {
    let renamed = rename_nodes(aut);
    let labels: Vec<String> = if numbered {
        (0..renamed.legend.len()).map(|i| i.to_string()).collect()
    } else {
        renamed.legend.clone()
    };
    to_dot(&renamed.automaton, &labels)
}

/// Positions of base nodes, first occurrence wins.
fn base_ids<N: BaseNode>(aut: &Automaton<N>) -> HashMap<N, u64> {
    let mut ids = HashMap::new();
    for (pos, n) in aut.nodes.iter().enumerate() {
        ids.entry(n.clone()).or_insert(pos as u64);
    }
    ids
}

trait BaseIds: BaseNode + RenderNode + Sized {
    /// Id of each base node in exported output.
    fn id_table(aut: &Automaton<Self>) -> HashMap<Self, u64>;
}

impl BaseIds for SyntConfig {
    fn id_table(aut: &Automaton<Self>) -> HashMap<Self, u64> {
        base_ids(aut)
    }
}

impl BaseIds for u64 {
    fn id_table(aut: &Automaton<Self>) -> HashMap<Self, u64> {
        aut.nodes.iter().map(|&n| (n, n)).collect()
    }
}

fn closed_output<N: BaseIds>(aut: &Automaton<N>, out: &OutputArgs, io: &mut Io<'_>) -> String {
    if !regular_ta(aut) {
        io.warn("warning: input automaton is not regular; closing it anyway");
    }
    let closed = tauclose_ta(aut);
    let ids = N::id_table(aut);
    // Endpoints outside the node list have no position; number them after it.
    let fallback = aut.nodes.len() as u64;
    let id = |n: &N| ids.get(n).copied().unwrap_or(fallback);
    match out.format {
        Format::Json => AutomatonDoc::from_closed(&closed, id).to_json() + "\n",
        Format::Dot => {
            let renamed = rename_nodes(&closed.map_nodes(|set| IdSet(set.iter().map(&id).collect())));
            let labels: Vec<String> = if out.numbered {
                (0..renamed.legend.len()).map(|i| i.to_string()).collect()
            } else {
                renamed.legend.clone()
            };
            to_dot(&renamed.automaton, &labels)
        }
    }
}

/// Closed node expressed through base ids, rendered `{i,j,k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
struct IdSet(NodeSet<u64>);

impl RenderNode for IdSet {
    fn render(&self) -> String {
        self.0.render()
    }
}

fn report_tau<N: std::fmt::Debug>(report: &TauReport<N>, io: &mut Io<'_>) -> i32 {
    if report.result {
        io.say(&format!("tausim: pass ({} related pairs checked)", report.checked_pairs));
        EXIT_OK
    } else {
        let violation = report.first_violation.as_ref().map(|v| v.to_string()).unwrap_or_default();
        io.say(&format!("tausim: FAIL after {} related pairs: {violation}", report.checked_pairs));
        EXIT_VIOLATION
    }
}

fn check(property: Property, input: &InputArgs, exec: &ExecArgs, io: &mut Io<'_>) -> CliResult<i32> {
    let program = || -> CliResult<Stmt> {
        match &input.file {
            Some(file) => load_program(file),
            None => Err(CliError::Input(format!("`check {property:?}` needs a program file").to_lowercase())),
        }
    };
    match property {
        Property::Sim => {
            let c = program()?;
            let s0 = parse_state(&exec.state).map_err(CliError::Input)?;
            match check_simulation(&c, s0, exec.max_steps as usize) {
                Ok(report) => {
                    io.say(&format!("sim: pass ({} steps matched, run {})", report.matched.len(), report.status));
                    Ok(EXIT_OK)
                }
                Err(violation) => {
                    io.say(&format!("sim: FAIL: {violation}"));
                    Ok(EXIT_VIOLATION)
                }
            }
        }
        Property::Closure => {
            let c = program()?;
            let aut = stmt_to_ta(&c);
            let locations = check_location_closure(&c);
            let results = [
                ("locations_closed", locations.is_ok()),
                ("nodes_closed", nodes_closed(&aut)),
                ("edges_closed", edges_closed(&aut)),
                ("synt_step_image_closed", synt_step_image_closed(&aut)),
            ];
            for (name, ok) in results {
                io.say(&format!("{name}: {}", if ok { "pass" } else { "FAIL" }));
            }
            if let Err((from, to)) = locations {
                io.say(&format!("  successor {to} of {from} leaves the program"));
            }
            Ok(if results.iter().all(|(_, ok)| *ok) { EXIT_OK } else { EXIT_VIOLATION })
        }
        Property::Regular => {
            let ok = match (&input.file, &input.automaton) {
                (Some(_), _) => regular_ta(&stmt_to_ta(&program()?)),
                (None, Some(path)) => regular_ta(&load_automaton(path)?.to_automaton()),
                (None, None) => unreachable!("clap requires an input"),
            };
            io.say(&format!("regular: {}", if ok { "pass" } else { "FAIL" }));
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Property::Tausim => match (&input.file, &input.automaton) {
            (Some(_), _) => {
                let aut = stmt_to_ta(&program()?);
                Ok(report_tau(&check_tau_sim_witness(&aut, &tauclose_ta(&aut)), io))
            }
            (None, Some(path)) => {
                let aut = load_automaton(path)?.to_automaton();
                if !regular_ta(&aut) {
                    io.warn("warning: input automaton is not regular");
                }
                Ok(report_tau(&check_tau_sim_witness(&aut, &tauclose_ta(&aut)), io))
            }
            (None, None) => unreachable!("clap requires an input"),
        },
    }
}
